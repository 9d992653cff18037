"""Laurent polynomials on the torus T^d.

Points of the torus are given by angle vectors theta in [0, 1)^d; the
evaluation point is (exp(2 pi i theta_1), ..., exp(2 pi i theta_d)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import DimensionError, ParameterError, PreconditionError, ResourceError
from .expr import infer_dimension, parse_terms

GRID_BUDGET = 2**24
Q_CAP = 10**4


class LaurentPolynomial:
    """Sparse map from exponent vectors to complex coefficients."""

    __slots__ = ("d", "coeffs")

    def __init__(self, coeffs: Mapping, d: int | None = None):
        clean = {}
        for nu, c in coeffs.items():
            nu = (int(nu),) if isinstance(nu, (int, np.integer)) else tuple(int(a) for a in nu)
            c = complex(c)
            if c != 0:
                clean[nu] = clean.get(nu, 0) + c
                if clean[nu] == 0:
                    del clean[nu]
        if d is None:
            d = len(next(iter(clean))) if clean else 1
        if d < 1:
            raise DimensionError("dimension must be >= 1")
        for nu in clean:
            if len(nu) != d:
                raise DimensionError(f"exponent {nu} does not have length {d}")
        self.d = d
        self.coeffs = dict(sorted(clean.items()))

    # construction -----------------------------------------------------
    @classmethod
    def parse(cls, text: str, d: int | None = None) -> "LaurentPolynomial":
        terms = parse_terms(text)
        d = infer_dimension(terms, d)
        coeffs: dict = {}
        for term in terms:
            nu = [0] * d
            for idx, k in term.factors:
                nu[idx - 1] += k
            nu = tuple(nu)
            coeffs[nu] = coeffs.get(nu, 0) + term.coeff
        return cls(coeffs, d)

    @classmethod
    def constant(cls, c, d: int = 1) -> "LaurentPolynomial":
        return cls({(0,) * d: c}, d)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence, low: int = 0) -> "LaurentPolynomial":
        """One-variable polynomial with ``coeffs[k]`` at exponent ``low + k``."""
        return cls({(low + k,): c for k, c in enumerate(coeffs)}, 1)

    # basic protocol ---------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.d == other.d and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.d, tuple(self.coeffs.items())))

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"LaurentPolynomial({self!s}, d={self.d})"

    def __str__(self):
        return format_polynomial(self)

    def __add__(self, other):
        other = _coerce(other, self.d)
        out = dict(self.coeffs)
        for nu, c in other.coeffs.items():
            out[nu] = out.get(nu, 0) + c
        return LaurentPolynomial(out, self.d)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial({nu: -c for nu, c in self.coeffs.items()}, self.d)

    def __sub__(self, other):
        return self + (-_coerce(other, self.d))

    def __rsub__(self, other):
        return _coerce(other, self.d) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return LaurentPolynomial({nu: c * other for nu, c in self.coeffs.items()}, self.d)
        other = _coerce(other, self.d)
        out: dict = {}
        for nu, a in self.coeffs.items():
            for mu, b in other.coeffs.items():
                key = tuple(x + y for x, y in zip(nu, mu))
                out[key] = out.get(key, 0) + a * b
        return LaurentPolynomial(out, self.d)

    __rmul__ = __mul__

    def conj_reflect(self) -> "LaurentPolynomial":
        """nu -> conj(c_{-nu}); the Fourier side of the involution f -> f*."""
        return LaurentPolynomial(
            {tuple(-a for a in nu): c.conjugate() for nu, c in self.coeffs.items()}, self.d
        )

    def constant_term(self) -> complex:
        return self.coeffs.get((0,) * self.d, 0j)

    def l1_norm(self) -> float:
        return float(sum(abs(c) for c in self.coeffs.values()))

    def exponent_array(self) -> np.ndarray:
        return np.array(list(self.coeffs), dtype=np.int64).reshape(len(self.coeffs), self.d)

    def coefficient_array(self) -> np.ndarray:
        return np.array(list(self.coeffs.values()), dtype=np.complex128)

    def degree_range(self):
        """Per-axis (min, max) exponents."""
        e = self.exponent_array()
        if e.size == 0:
            return [(0, 0)] * self.d
        return list(zip(e.min(axis=0).tolist(), e.max(axis=0).tolist()))

    def dense_1d(self):
        """(coefficients ascending, lowest exponent) for a one-variable polynomial."""
        if self.d != 1:
            raise DimensionError("dense form only exists for one variable")
        if not self.coeffs:
            return np.zeros(1, dtype=complex), 0
        (lo, hi), = self.degree_range()
        out = np.zeros(hi - lo + 1, dtype=complex)
        for (k,), c in self.coeffs.items():
            out[k - lo] = c
        return out, lo

    # evaluation -------------------------------------------------------
    def __call__(self, theta) -> complex:
        return evaluate(self, theta)


def _coerce(other, d) -> LaurentPolynomial:
    if isinstance(other, LaurentPolynomial):
        if other.d != d:
            raise DimensionError(f"dimension mismatch: {d} vs {other.d}")
        return other
    if isinstance(other, (int, float, complex, np.number)):
        return LaurentPolynomial.constant(other, d)
    raise TypeError(f"cannot combine LaurentPolynomial with {type(other).__name__}")


def _format_coeff(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    if c.real == 0:
        return f"{c.imag!r}i"
    sign = "-" if math.copysign(1.0, c.imag) < 0 else "+"
    return f"({c.real!r}{sign}{abs(c.imag)!r}i)"


def _var_name(i: int, d: int) -> str:
    return "xyz"[i] if d <= 3 else f"x{i + 1}"


def format_polynomial(P: LaurentPolynomial) -> str:
    """Text form that ``parse`` reads back exactly."""
    if not P.coeffs:
        return "0"
    parts = []
    for nu, c in P.coeffs.items():
        negative = (c.imag == 0 and c.real < 0) or (c.real == 0 and c.imag < 0)
        if negative:
            c = -c
        monomial = [
            _var_name(i, P.d) + ("" if k == 1 else f"^{k}") for i, k in enumerate(nu) if k
        ]
        if c == 1 and monomial:
            body = "*".join(monomial)
        else:
            body = "*".join([_format_coeff(c)] + monomial)
        parts.append(("- " if negative else "+ ") + body)
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def parse(text: str, d: int | None = None) -> LaurentPolynomial:
    return LaurentPolynomial.parse(text, d)


def evaluate(P: LaurentPolynomial, theta) -> complex:
    """Direct sparse evaluation sum_nu c_nu exp(2 pi i (nu, theta))."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape != (P.d,):
        raise DimensionError(f"expected {P.d} angles, got {theta.shape}")
    return complex(evaluate_points(P, theta[None, :])[0])


def evaluate_points(P: LaurentPolynomial, thetas) -> np.ndarray:
    """Evaluate at many angle vectors (shape ``(m, d)``)."""
    thetas = np.ascontiguousarray(np.asarray(thetas, dtype=float).reshape(-1, P.d))
    if not P.coeffs:
        return np.zeros(len(thetas), dtype=complex)
    return kernels.eval_points(P.exponent_array(), P.coefficient_array(), thetas)


def grid_eval(P: LaurentPolynomial, N, offset: bool = False, budget: int = GRID_BUDGET) -> np.ndarray:
    """Values on the grid theta_k = (k + sigma) / N per axis, sigma = 1/2 if offset.

    ``N`` may be an int or one size per axis.  For d <= 3 the coefficients are
    twisted by the offset phase, folded modulo N (exact on grid points) and
    transformed with one inverse FFT; larger d uses direct evaluation.
    """
    sizes = (int(N),) * P.d if np.isscalar(N) else tuple(int(n) for n in N)
    if len(sizes) != P.d or min(sizes) < 1:
        raise ParameterError(f"grid sizes {sizes} invalid for dimension {P.d}")
    total = math.prod(sizes)
    if total > budget:
        raise ResourceError(f"grid of {total} points exceeds budget {budget}", reached=sizes)
    sigma = 0.5 if offset else 0.0
    if P.d <= 3:
        folded = np.zeros(sizes, dtype=complex)
        if P.coeffs:
            exps = P.exponent_array()
            coeffs = P.coefficient_array()
            if sigma:
                phase = np.sum(exps * (sigma / np.asarray(sizes)), axis=1)
                coeffs = coeffs * np.exp(2j * np.pi * phase)
            idx = tuple((exps % np.asarray(sizes)).T)
            np.add.at(folded, idx, coeffs)
        return np.fft.ifftn(folded) * total
    axes = [(np.arange(n) + sigma) / n for n in sizes]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.d)
    return evaluate_points(P, mesh).reshape(sizes)


def specialize(P: LaurentPolynomial, r: Sequence[int]) -> LaurentPolynomial:
    """P_r(X) = P(X^r_1, ..., X^r_d): coefficient at k is the sum over (nu, r) = k."""
    r = tuple(int(x) for x in r)
    if len(r) != P.d:
        raise DimensionError(f"r must have length {P.d}, got {len(r)}")
    out: dict = {}
    for nu, c in P.coeffs.items():
        k = sum(a * b for a, b in zip(nu, r))
        out[(k,)] = out.get((k,), 0) + c
    return LaurentPolynomial(out, 1)


# --------------------------------------------------------------------------
# Fourier correspondence with the group ring of Z^d


def to_groupring(P: LaurentPolynomial):
    from .groupring import GroupRingElement
    from .groups import IntegerLattice

    return GroupRingElement(IntegerLattice(P.d), P.coeffs)


def from_groupring(f) -> LaurentPolynomial:
    from .groups import IntegerLattice

    if not isinstance(f.model, IntegerLattice):
        raise PreconditionError(f"Fourier correspondence needs Z^d, got {f.model!r}")
    return LaurentPolynomial(f.coeffs, f.model.d)


# --------------------------------------------------------------------------
# q(r)


@dataclass(frozen=True)
class QResult:
    value: float  # int, or math.inf
    witness: tuple | None
    flag: str = ""  # "", "zero-vector convention", "d=1", "cap reached"

    def __int__(self):
        return int(self.value)


def q_of_r(r: Sequence[int], cap: int = Q_CAP) -> QResult:
    """min ||nu||_inf over nonzero integer nu with (nu, r) = 0, by growing boxes."""
    r = tuple(int(x) for x in r)
    d = len(r)
    if d < 1:
        raise ParameterError("r must be non-empty")
    if all(x == 0 for x in r):
        return QResult(1, (1,) + (0,) * (d - 1), "zero-vector convention")
    if d == 1:
        return QResult(math.inf, None, "d=1")
    pivot = max(range(d), key=lambda i: abs(r[i]))
    others = [i for i in range(d) if i != pivot]
    rp = r[pivot]
    ro = np.array([r[i] for i in others], dtype=np.int64)
    for B in range(1, cap + 1):
        # nu with sup-norm <= B: free coordinates in [-B, B], pivot coordinate solved
        axis = np.arange(-B, B + 1, dtype=np.int64)
        free = np.stack(np.meshgrid(*([axis] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1)
        # only vectors touching the shell ||.|| = B are new, but checking the box is simpler
        dot = free @ ro
        ok = (dot % rp == 0)
        nu_p = np.zeros_like(dot)
        nu_p[ok] = -dot[ok] // rp
        ok &= np.abs(nu_p) <= B
        ok &= (np.abs(free).max(axis=1) > 0) | (nu_p != 0)
        hits = np.flatnonzero(ok)
        if hits.size:
            # prefer the smallest sup-norm witness inside the box
            norms = np.maximum(np.abs(free[hits]).max(axis=1), np.abs(nu_p[hits]))
            j = hits[int(np.argmin(norms))]
            nu = [0] * d
            nu[pivot] = int(nu_p[j])
            for k, i in enumerate(others):
                nu[i] = int(free[j, k])
            return QResult(int(max(abs(a) for a in nu)), tuple(nu))
    return QResult(math.inf, None, "cap reached")


def q_brute_force(r: Sequence[int], bound: int):
    """Exhaustive min over [-bound, bound]^d; independent check for q_of_r."""
    best = None
    for nu in product(range(-bound, bound + 1), repeat=len(r)):
        if any(nu) and sum(a * b for a, b in zip(nu, r)) == 0:
            n = max(abs(a) for a in nu)
            best = n if best is None else min(best, n)
    return best
