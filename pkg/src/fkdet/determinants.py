"""Estimators for log det_{N Gamma} and m(P), plus identity and inequality checks.

Every estimator returns a :class:`DetEstimate` holding a *log* value.  The
operator attached to a group-ring element f is right multiplication by f, so
the truncation to a finite set F has matrix entries f(g^-1 h) at (g, h); over
Z with F = {0, ..., n-1} this is the Toeplitz matrix c_{j-i}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionError,
    FkdetError,
    NotPositiveDefiniteError,
    NumericError,
    ParameterError,
    PreconditionError,
    ResourceError,
)
from .groupring import (
    GroupRingElement,
    InvertibilityCertificate,
    is_self_adjoint,
    l1_norm,
    l2_norm,
    neumann_certificate,
    polynomial_of,
    pushforward,
    trace,
    wiener_certificate,
)
from .groups import (
    CyclicImage,
    FolnerSet,
    GroupHomomorphism,
    Heisenberg,
    IntegerLattice,
    ModularLattice,
    folner_set,
)
from .laurent import LaurentPolynomial, from_groupring, grid_eval, to_groupring
from .numerics import (
    ZERO_PIVOT,
    cholesky_factor,
    cholesky_logdet,
    lu_logabsdet,
    poly_roots,
    toeplitz_logdet_sequence,
)

MAX_DENSE = 2048
MAX_HEISENBERG_FOLNER = 6
NONNEG_GRID = 4096


@dataclass
class DetEstimate:
    scheme: str  # quadrature | jensen | toeplitz | folner | quotient
    size: int
    value: float  # log-estimate; -inf allowed
    certificate: InvertibilityCertificate | None = None
    excluded: int = 0
    note: str = ""

    @property
    def determinant(self) -> float:
        return math.exp(self.value) if self.value != -math.inf else 0.0


# --------------------------------------------------------------------------
# Mahler measure


def _as_polynomial(P) -> LaurentPolynomial:
    if isinstance(P, LaurentPolynomial):
        return P
    if isinstance(P, GroupRingElement):
        return from_groupring(P)
    raise TypeError(f"expected a Laurent polynomial, got {type(P).__name__}")


def mahler_quadrature(P, N: int) -> DetEstimate:
    """m(P) as the mean of log|P| over the offset grid ((k + 1/2)/N)^d."""
    P = _as_polynomial(P)
    if not P.coeffs:
        raise PreconditionError("Mahler measure of the zero polynomial is -inf")
    if N < 2:
        raise ParameterError(f"grid size must be >= 2, got {N}")
    if list(P.coeffs) == [(0,) * P.d]:
        return DetEstimate("quadrature", N, math.log(abs(P.constant_term())))
    values = np.abs(grid_eval(P, N, offset=True)).ravel()
    keep = values >= ZERO_PIVOT
    excluded = int(values.size - keep.sum())
    if excluded == values.size:
        raise NumericError("every grid value vanished; degenerate input")
    return DetEstimate("quadrature", N, float(np.mean(np.log(values[keep]))), excluded=excluded)


def jensen_roots(P) -> tuple[complex, np.ndarray]:
    """Leading coefficient and roots of a one-variable Laurent polynomial (X^k factored out)."""
    P = _as_polynomial(P)
    if P.d != 1:
        raise DimensionError("Jensen's formula needs a one-variable polynomial")
    if not P.coeffs:
        raise PreconditionError("Mahler measure of the zero polynomial is -inf")
    dense, _ = P.dense_1d()
    if len(dense) == 1:
        return complex(dense[0]), np.zeros(0, dtype=complex)
    return complex(dense[-1]), poly_roots(dense).roots


def mahler_jensen(P) -> DetEstimate:
    """m(P) = log|a_lead| + sum log max(1, |alpha_i|)."""
    lead, roots = jensen_roots(P)
    value = math.log(abs(lead)) + float(np.sum(np.log(np.maximum(1.0, np.abs(roots)))))
    return DetEstimate("jensen", len(roots), value)


# --------------------------------------------------------------------------
# Szego / Toeplitz


@dataclass(frozen=True)
class SzegoTerm:
    n: int
    log_D: float
    log_root: float  # log D_n^{1/n}
    log_ratio: float  # log D_{n+1} / D_n

    @property
    def D(self):
        return math.exp(self.log_D)

    @property
    def root(self):
        return math.exp(self.log_root)

    @property
    def ratio(self):
        return math.exp(self.log_ratio)


def _check_nonnegative(P: LaurentPolynomial) -> None:
    scale = max(P.l1_norm(), 1e-300)
    sym = P.conj_reflect()
    keys = set(P.coeffs) | set(sym.coeffs)
    if any(abs(P.coeffs.get(k, 0) - sym.coeffs.get(k, 0)) > 1e-12 * scale for k in keys):
        raise PreconditionError("polynomial is not real-valued on the circle")
    values = grid_eval(P, NONNEG_GRID)
    if values.real.min() < -1e-12 * scale:
        raise PreconditionError("polynomial takes negative values on the circle")


def moments(P, n: int) -> np.ndarray:
    """c_0..c_{n-1}: for a Laurent polynomial these are its coefficients."""
    P = _as_polynomial(P)
    return np.array([P.coeffs.get((k,), 0) for k in range(n)], dtype=complex)


def szego_sequence(P, nmax: int) -> list[SzegoTerm]:
    """(D_n, D_n^{1/n}, D_{n+1}/D_n) for n = 1..nmax, in log form."""
    positive = isinstance(P, GroupRingElement) and P.positive == "square"
    P = _as_polynomial(P)
    if P.d != 1:
        raise DimensionError("Toeplitz determinants need a one-variable polynomial")
    if not P.coeffs:
        raise PreconditionError("P vanishes identically")
    if not positive:
        _check_nonnegative(P)
    logs = toeplitz_logdet_sequence(moments(P, nmax + 1))
    return [
        SzegoTerm(n, float(logs[n - 1]), float(logs[n - 1] / n), float(logs[n] - logs[n - 1]))
        for n in range(1, nmax + 1)
    ]


# --------------------------------------------------------------------------
# Folner truncations


@dataclass
class TruncationMatrix:
    F: FolnerSet
    matrix: np.ndarray

    @property
    def size(self):
        return len(self.F)


def folner_matrix(f: GroupRingElement, F) -> TruncationMatrix:
    """Compression A_F with entry f(g^-1 h) at (g, h); terms leaving F are dropped."""
    if not isinstance(F, FolnerSet):
        F = FolnerSet(tuple(F), len(F))
    m = len(F)
    if m > MAX_DENSE:
        raise ResourceError(f"truncation of size {m} exceeds dense cap {MAX_DENSE}", reached=m)
    M = np.zeros((m, m), dtype=complex)
    mul = f.model.mul
    index = F.index
    for s, c in f.coeffs.items():
        for i, g in enumerate(F.elements):
            j = index.get(mul(g, s))
            if j is not None:
                M[i, j] += c
    return TruncationMatrix(F, M)


def positivity_certificate(f: GroupRingElement) -> str:
    """How r(f) is known to be positive: ``"square"`` or ``"dominant"``; else raise.

    Dominance may be weak (f_e = ||g||_1); r(f) is then only positive
    semidefinite and truncations can be singular.
    """
    if f.positive == "square":
        return "square"
    c = trace(f)
    if is_self_adjoint(f) and c.imag == 0 and c.real >= l1_norm(f) - abs(c) - 1e-12 * max(1.0, c.real):
        # f_e e + g with g = g* and ||r(g)|| <= ||g||_1 <= f_e
        return "dominant"
    raise PreconditionError(
        "positivity is not certified: pass positive_square(g) or a self-adjoint, "
        "diagonally dominant element"
    )


def folner_det_sequence(f: GroupRingElement, sizes: Sequence[int], shape: str = "box") -> list[DetEstimate]:
    """log (det A_{F_n})^{1/|F_n|} for each n (Cholesky); -inf where A_{F_n} is not PD.

    Only ``limsup <= log det`` is guaranteed in general; for invertible f the
    sequence converges to log det_{N Gamma} f.
    """
    how = positivity_certificate(f)
    if isinstance(f.model, Heisenberg) and max(sizes) > MAX_HEISENBERG_FOLNER:
        raise ResourceError(f"Heisenberg Folner sets are capped at n <= {MAX_HEISENBERG_FOLNER}")
    out = []
    for n in sizes:
        T = folner_matrix(f, folner_set(f.model, n, shape))
        try:
            value = cholesky_logdet(T.matrix).value / T.size
            note = f"positive:{how}"
        except NotPositiveDefiniteError:
            value, note = -math.inf, f"positive:{how}; truncation not positive definite"
        out.append(DetEstimate("folner", n, value, note=note))
    return out


def tail_suprema(values: Sequence[float]) -> list[float]:
    """sup over m >= n of values[m]; the computable shadow of limsup."""
    out = []
    best = -math.inf
    for v in reversed(list(values)):
        best = max(best, v)
        out.append(best)
    return out[::-1]


# --------------------------------------------------------------------------
# finite quotients


def quotient_matrix(phi: GroupHomomorphism, f: GroupRingElement) -> np.ndarray:
    G = phi.target
    if not G.finite:
        raise PreconditionError(f"target {G!r} is not finite")
    if G.order > MAX_DENSE:
        raise ResourceError(f"|G| = {G.order} exceeds dense cap {MAX_DENSE}", reached=G.order)
    h = pushforward(phi, f)
    elements = G.elements()
    index = {g: i for i, g in enumerate(elements)}
    M = np.zeros((len(elements), len(elements)), dtype=complex)
    for s, c in h.coeffs.items():
        cols = [index[G.mul(g, s)] for g in elements]
        M[np.arange(len(elements)), cols] += c
    return M


def _quotient_fft(phi: GroupHomomorphism, f: GroupRingElement) -> float:
    P = from_groupring(f)
    values = np.abs(grid_eval(P, phi.target.moduli, offset=False)).ravel()
    if values.min() < ZERO_PIVOT:
        return -math.inf
    return float(np.mean(np.log(values)))


def quotient_det(phi: GroupHomomorphism, f: GroupRingElement, method: str = "auto") -> DetEstimate:
    """log |det r(phi_* f)|^{1/|G|} for a finite target G.

    An infinite cyclic target D(r)Z is handled exactly by Jensen's formula.

    ``method="fft"`` (Z^d -> prod Z/n_i only) sums log|P| over the exact
    roots-of-unity grid; ``"dense"`` uses LU on the |G| x |G| matrix.
    """
    if f.model != phi.source:
        raise ParameterError("element and homomorphism live on different groups")
    if isinstance(phi.target, CyclicImage) and phi.target.gcd:
        # D(r)Z = gZ is infinite cyclic: det over it is the Mahler measure in t = g
        h = pushforward(phi, f)
        g = phi.target.gcd
        P = LaurentPolynomial({(k // g,): c for k, c in h.coeffs.items()}, 1)
        value = mahler_jensen(P).value if P.coeffs else -math.inf
        return DetEstimate("quotient", 0, value, note="infinite cyclic target: Jensen")
    abelian_path = isinstance(phi.source, IntegerLattice) and isinstance(phi.target, ModularLattice)
    if method == "auto":
        method = "fft" if abelian_path else "dense"
    if method == "fft":
        if not abelian_path:
            raise PreconditionError("FFT path needs Z^d -> (Z/n_1) x ... x (Z/n_d)")
        value = _quotient_fft(phi, f)
    elif method == "dense":
        value = lu_logabsdet(quotient_matrix(phi, f)).value / phi.target.order
    else:
        raise ParameterError(f"unknown method {method!r}")
    note = "det = 0" if value == -math.inf else ""
    return DetEstimate("quotient", phi.target.order, value, note=note)


@dataclass
class QuotientSequence:
    estimates: list
    certified: bool
    certificate: InvertibilityCertificate | None
    relation: str
    labels: list

    @property
    def values(self):
        return [e.value for e in self.estimates]


def find_certificate(f: GroupRingElement, grid: int = 256) -> InvertibilityCertificate | None:
    cert = neumann_certificate(f)
    if cert is None and isinstance(f.model, IntegerLattice):
        cert = wiener_certificate(f, grid)
    return cert


def quotient_det_sequence(
    homs: Sequence[GroupHomomorphism],
    f_tilde: GroupRingElement,
    certificate: InvertibilityCertificate | None = None,
    certify: bool = False,
    labels=None,
    method: str = "auto",
) -> QuotientSequence:
    """log det of f_n = phi_n*(f_tilde) along a sequence of finite quotients.

    Without an invertibility certificate only ``log det f >= limsup`` is
    claimed; with one, convergence to log det f (given K_n -> e, or K_n -> K
    for a correspondence whose base map pushes f_tilde to f).
    """
    if certificate is None and certify:
        certificate = find_certificate(f_tilde)
    estimates = []
    for phi in homs:
        est = quotient_det(phi, f_tilde, method)
        est.certificate = certificate
        estimates.append(est)
    if certificate is not None:
        relation = "equality: det f = lim det f_n (invertible in L1)"
    else:
        relation = "upper bound only: det f >= limsup det f_n (no invertibility certificate)"
    labels = list(range(1, len(estimates) + 1)) if labels is None else list(labels)
    return QuotientSequence(estimates, certificate is not None, certificate, relation, labels)


# --------------------------------------------------------------------------
# orthogonalisation


@dataclass
class OrthogonalStep:
    element: object
    coefficients: np.ndarray  # on (gamma_1, ..., gamma_{k-1}, gamma_k); last entry is 1
    norm2: float  # ||Phi_gamma||_A^2 = det A_{F'} / det A_F
    logdet: float  # log det A_{F_k}


def orthogonal_chain(f: GroupRingElement, chain: Sequence, coefficients: bool = True) -> list[OrthogonalStep]:
    """Gram-Schmidt for (u, v)_A along gamma_1, gamma_2, ... (bordered Cholesky).

    With t_j = f(gamma_j^-1 gamma): ||Phi||^2 = tau(f) - t^H A_F^-1 t and
    Phi = gamma - sum_j conj((A_F^-1 t)_j) gamma_j.
    """
    model = f.model
    chain = [model.canonical(g) for g in chain]
    if len(set(chain)) != len(chain):
        raise ParameterError("chain elements must be distinct")
    tau = trace(f)
    if abs(tau.imag) > 1e-12 * max(1.0, abs(tau)):
        raise PreconditionError("trace of a positive element must be real")
    tau = tau.real
    m = len(chain)
    L = np.zeros((m, m), dtype=complex)
    steps = []
    logdet = 0.0
    for k, gamma in enumerate(chain):
        ginv = model.inv(gamma)
        t = np.array([f[model.mul(model.inv(g), gamma)] for g in chain[:k]], dtype=complex)
        if k:
            y = sla.solve_triangular(L[:k, :k], t, lower=True, check_finite=False)
        else:
            y = t
        norm2 = tau - float(np.vdot(y, y).real)
        if not norm2 > 0:
            raise NotPositiveDefiniteError("A_F is not positive definite", index=k + 1)
        L[k, :k] = y.conj()
        L[k, k] = math.sqrt(norm2)
        logdet += math.log(norm2)
        coeffs = None
        if coefficients:
            w = sla.solve_triangular(L[:k, :k].conj().T, y, lower=False, check_finite=False) if k else y
            coeffs = np.concatenate([-np.conj(w), [1.0]])
        steps.append(OrthogonalStep(gamma, coeffs, norm2, logdet))
        del ginv
    return steps


def chain_direct_logdets(f: GroupRingElement, chain: Sequence) -> list[float]:
    """log det A_{F_k} from a fresh Cholesky of each leading truncation."""
    full = folner_matrix(f, FolnerSet(tuple(f.model.canonical(g) for g in chain), len(chain))).matrix
    return [cholesky_logdet(full[:k, :k]).value for k in range(1, len(chain) + 1)]


# --------------------------------------------------------------------------
# identities and inequalities


@dataclass
class Report:
    name: str
    holds: bool
    values: dict = field(default_factory=dict)
    note: str = ""


def _slogdet(M):
    sign, logabs = np.linalg.slogdet(M)
    return complex(sign), float(logabs)


def schur_det_check(M, split: int, tol: float = 1e-9) -> Report:
    """det [[A, B], [C, D]] = det(D - C A^-1 B) det A with A the leading split x split block."""
    M = np.asarray(M, dtype=complex)
    if not 0 < split < M.shape[0]:
        raise ParameterError("split must leave two non-empty blocks")
    A, B = M[:split, :split], M[:split, split:]
    C, D = M[split:, :split], M[split:, split:]
    if lu_logabsdet(A).zero_pivot:
        raise NumericError("top-left block is singular")
    S = D - C @ np.linalg.solve(A, B)
    s_full, l_full = _slogdet(M)
    s_a, l_a = _slogdet(A)
    s_s, l_s = _slogdet(S)
    ratio = (s_a * s_s / s_full) * math.exp(l_a + l_s - l_full)
    err = abs(ratio - 1)
    return Report("schur", err <= tol, {"log_full": l_full, "log_blocks": l_a + l_s, "rel_err": err})


def _log_mahler(P, N: int = 512) -> float:
    P = _as_polynomial(P)
    if P.d == 1:
        return mahler_jensen(P).value
    return mahler_quadrature(P, N).value


def check_l2_bound(f, N: int = 512, margin: float = 1e-3) -> Report:
    """det f <= ||f||_2 over Z^d, with relative slack ``margin`` for the quadrature."""
    if isinstance(f, LaurentPolynomial):
        f = to_groupring(f)
    if not isinstance(f.model, IntegerLattice):
        raise PreconditionError("left side is only computable over Z^d")
    m = _log_mahler(from_groupring(f), N)
    rhs = l2_norm(f)
    lhs = math.exp(m)
    return Report("l2-bound", lhs <= rhs * (1 + margin), {"det": lhs, "l2": rhs})


def check_cor12(f: GroupRingElement, n: int, tol: float = 1e-8) -> Report:
    """For positive f over Z, F = {0..n-1}, gamma = n:
    M(F(Phi~_n)) = 1, zeros of the reversed orthogonal polynomial off the open disc,
    and M(P) M(F(Phi~_n))^2 <= D_{n+1}/D_n.
    """
    if not isinstance(f.model, IntegerLattice) or f.model.d != 1:
        raise PreconditionError("this check is for elements over Z")
    positivity_certificate(f)
    steps = orthogonal_chain(f, [(k,) for k in range(n + 1)])
    phi = steps[-1].coefficients  # on 0, 1, ..., n
    # F(Phi~_n)(z) = sum_j phi_j z^-j = z^-n R(z) with R(z) = sum_j phi_j z^(n-j)
    reversed_poly = LaurentPolynomial.from_coefficients(phi[::-1])
    m_phi = mahler_jensen(reversed_poly).value
    _, roots = jensen_roots(reversed_poly)
    min_root = float(np.abs(roots).min()) if len(roots) else math.inf
    m_p = mahler_jensen(from_groupring(f)).value
    logs = toeplitz_logdet_sequence(moments(f, n + 1))
    log_ratio = float(logs[n] - logs[n - 1]) if n >= 1 else float(logs[0])
    lhs = math.exp(m_p + 2 * m_phi)
    ratio = math.exp(log_ratio)
    slack = (ratio - lhs) / ratio
    ok = abs(m_phi) <= 1e-6 and min_root >= 1 - tol and slack >= -tol
    return Report(
        "chain-inequality",
        ok,
        {
            "M_phi": math.exp(m_phi),
            "min_root_modulus": min_root,
            "M_P": math.exp(m_p),
            "ratio": ratio,
            "chain_ratio": steps[-1].norm2,
            "slack": slack,
        },
    )


def trace_poly_convergence(
    f_tilde: GroupRingElement,
    p: Sequence,
    homs: Sequence[GroupHomomorphism],
    base: GroupHomomorphism | None = None,
) -> Report:
    """tau(p(f)) against tau(p(f_n)); deviation n is bounded by the mass of
    p(f_tilde) on K ^ K_n (K = ker base, or {e})."""
    g = polynomial_of(p, f_tilde)
    if base is None:
        exact = trace(g)
        in_k = lambda x: x == f_tilde.model.identity  # noqa: E731
    else:
        exact = trace(pushforward(base, g))
        in_k = base.in_kernel
    rows = []
    ok = True
    for phi in homs:
        fn = pushforward(phi, f_tilde)
        value = trace(polynomial_of(p, fn))
        bound = sum(abs(c) for x, c in g.coeffs.items() if in_k(x) != phi.in_kernel(x))
        dev = abs(value - exact)
        ok &= dev <= bound + 1e-9 * max(1.0, l1_norm(g))
        rows.append({"label": phi.label, "trace": value, "deviation": dev, "bound": bound})
    return Report("trace-poly", ok, {"exact": exact, "rows": rows})


def boyd_scan(P, z0: complex, z1: complex, meshes: Sequence[float], N: int = 4096) -> Report:
    """m(z - P) along the segment [z0, z1] at each mesh; max adjacent jump per mesh."""
    P = _as_polynomial(P)
    meshes = list(meshes)
    if any(b >= a for a, b in zip(meshes, meshes[1:])):
        raise ParameterError("mesh sizes must be strictly decreasing")
    values = grid_eval(P, N, offset=True).ravel()
    length = abs(z1 - z0)
    rows = []
    for h in meshes:
        steps = max(1, math.ceil(length / h - 1e-9))
        zs = z0 + (z1 - z0) * np.arange(steps + 1) / steps
        ms = []
        for z in zs:
            a = np.abs(z - values)
            a = a[a >= ZERO_PIVOT]
            ms.append(float(np.mean(np.log(a))))
        jumps = np.abs(np.diff(ms))
        rows.append({"mesh": h, "points": len(zs), "max_jump": float(jumps.max()) if len(jumps) else 0.0})
    jumps = [r["max_jump"] for r in rows]
    ok = all(b <= a for a, b in zip(jumps, jumps[1:]))
    return Report("boyd-scan", ok, {"rows": rows}, note="probe, not assertion")


def scheme_agreement(Q: GroupRingElement, quad_N: int = 2**16, nmax: int = 256) -> dict:
    """Four estimates of m(|Q|^2) over Z; Jensen (2 m(Q)) is the value of record."""
    from .groupring import positive_square

    f = positive_square(Q)
    P = from_groupring(f)
    record = 2 * mahler_jensen(from_groupring(Q)).value
    szego = szego_sequence(f, nmax)
    out = {
        "jensen": record,
        "quadrature": mahler_quadrature(P, quad_N).value,
        "toeplitz": szego[-1].log_ratio,
        "folner": folner_det_sequence(f, [nmax])[0].value,
    }
    return out


def safe(fn, *args, **kwargs):
    """Run an estimator, mapping package errors to a -inf estimate with the message."""
    try:
        return fn(*args, **kwargs)
    except FkdetError as exc:
        return DetEstimate("error", 0, -math.inf, note=str(exc))
