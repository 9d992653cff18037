"""Finitely supported elements f = sum f_g g of the group ring, inside L^1."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ParameterError, PreconditionError
from .expr import parse_terms
from .groups import GroupHomomorphism, GroupModel, IntegerLattice

NEUMANN_TARGET = 1e-12
NEUMANN_MAX_TERMS = 10**4


class GroupRingElement:
    """Immutable sparse element of CG.  Exact zeros are dropped from the support.

    ``positive`` records how positivity of r(f) is known: ``"square"`` for
    results of :func:`positive_square`, ``None`` otherwise.
    """

    __slots__ = ("model", "coeffs", "positive")

    def __init__(self, model: GroupModel, coeffs: Mapping | None = None, positive: str | None = None):
        clean: dict = {}
        for g, c in (coeffs or {}).items():
            g = model.canonical(g)
            clean[g] = clean.get(g, 0) + complex(c)
        self.model = model
        self.coeffs = {g: c for g, c in clean.items() if c != 0}
        self.positive = positive

    # construction -----------------------------------------------------
    @classmethod
    def identity(cls, model, c=1.0):
        return cls(model, {model.identity: c})

    @classmethod
    def generator(cls, model, i: int, power: int = 1):
        return cls(model, {model.power(model.generators[i - 1], power): 1})

    @classmethod
    def parse(cls, text: str, model: GroupModel) -> "GroupRingElement":
        """Read ``"5 + x + x^-1 + y + y^-1"``; products of variables are words."""
        coeffs: dict = {}
        for term in parse_terms(text):
            g = model.identity
            for idx, k in term.factors:
                if idx > model.ngens:
                    raise ParameterError(f"generator x{idx} not available in {model!r}")
                g = model.mul(g, model.power(model.generators[idx - 1], k))
            coeffs[g] = coeffs.get(g, 0) + term.coeff
        return cls(model, coeffs)

    # protocol ---------------------------------------------------------
    def _check(self, other):
        if other.model != self.model:
            raise ParameterError(f"model mismatch: {self.model!r} vs {other.model!r}")

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.model == other.model and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.model, frozenset(self.coeffs.items())))

    def __repr__(self):
        terms = ", ".join(f"{g}: {c:.6g}" for g, c in self.coeffs.items())
        return f"GroupRingElement({self.model!r}, {{{terms}}})"

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, g):
        return self.coeffs.get(self.model.canonical(g), 0j)

    def support(self):
        return list(self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = GroupRingElement.identity(self.model, other)
        self._check(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return GroupRingElement(self.model, out)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, a) -> "GroupRingElement":
        return GroupRingElement(self.model, {g: a * c for g, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return convolve(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ParameterError("negative powers need an inverse")
        out = GroupRingElement.identity(self.model)
        for _ in range(k):
            out = out * self
        return out

    # quantities ---------------------------------------------------------
    def star(self):
        return star(self)

    def trace(self) -> complex:
        return trace(self)

    def l1_norm(self) -> float:
        return l1_norm(self)

    def l2_norm(self) -> float:
        return l2_norm(self)


def add(f, g):
    return f + g


def scalar_mul(a, f):
    return f.scale(a)


def convolve(f: GroupRingElement, g: GroupRingElement) -> GroupRingElement:
    """(f g)_x = sum over a b = x of f_a g_b."""
    f._check(g)
    mul = f.model.mul
    out: dict = {}
    for a, fa in f.coeffs.items():
        for b, gb in g.coeffs.items():
            x = mul(a, b)
            out[x] = out.get(x, 0) + fa * gb
    return GroupRingElement(f.model, out)


def star(f: GroupRingElement) -> GroupRingElement:
    """f* = sum conj(f_g) g^-1."""
    inv = f.model.inv
    return GroupRingElement(f.model, {inv(g): c.conjugate() for g, c in f.coeffs.items()}, f.positive)


def tilde(f: GroupRingElement) -> GroupRingElement:
    """sum f_g g^-1 (no conjugation)."""
    inv = f.model.inv
    return GroupRingElement(f.model, {inv(g): c for g, c in f.coeffs.items()})


def positive_square(f: GroupRingElement) -> GroupRingElement:
    """f* f, marked as a positive element."""
    raw = convolve(star(f), f)
    # symmetrise so that coefficients at g and g^-1 are exact conjugates
    inv = f.model.inv
    out = {}
    for g, c in raw.coeffs.items():
        h = inv(g)
        if h in out:
            continue
        if g == h:
            out[g] = complex(c.real, 0.0)  # g = g^-1 forces a real coefficient
        else:
            avg = 0.5 * (c + raw.coeffs.get(h, 0).conjugate())
            out[g], out[h] = avg, avg.conjugate()
    return GroupRingElement(f.model, out, "square")


def l1_norm(f) -> float:
    return float(sum(abs(c) for c in f.coeffs.values()))


def l2_norm(f) -> float:
    return math.sqrt(sum(abs(c) ** 2 for c in f.coeffs.values()))


def trace(f) -> complex:
    return f.coeffs.get(f.model.identity, 0j)


def is_self_adjoint(f, tol: float = 0.0) -> bool:
    fs = star(f)
    keys = set(f.coeffs) | set(fs.coeffs)
    return all(abs(f.coeffs.get(g, 0) - fs.coeffs.get(g, 0)) <= tol for g in keys)


def pushforward(phi: GroupHomomorphism, f: GroupRingElement) -> GroupRingElement:
    """Integration along the fibres: (phi_* f)_y = sum over phi(x) = y of f_x."""
    if f.model != phi.source:
        raise ParameterError(f"element lives on {f.model!r}, map starts at {phi.source!r}")
    out: dict = {}
    for g, c in f.coeffs.items():
        y = phi(g)
        out[y] = out.get(y, 0) + c
    return GroupRingElement(phi.target, out, f.positive)


def polynomial_of(p, f: GroupRingElement) -> GroupRingElement:
    """p(f) by Horner; ``p`` lists coefficients in ascending order."""
    out = GroupRingElement(f.model)
    for a in reversed(list(p)):
        out = out * f + a
    return out


# --------------------------------------------------------------------------
# invertibility certificates


@dataclass(frozen=True)
class InvertibilityCertificate:
    kind: str  # "neumann" | "wiener-grid"
    bound: float  # upper bound on ||f^-1||_1, or lower bound on min |P|
    params: dict = field(default_factory=dict)

    def describe(self) -> str:
        if self.kind == "neumann":
            return f"neumann: ||f^-1||_1 <= {self.bound:.6g}"
        return f"wiener-grid: min|P| >= {self.bound:.6g} (N={self.params.get('N')})"


def neumann_certificate(f: GroupRingElement) -> InvertibilityCertificate | None:
    """f = c e + g with ||g||_1 < |c| is invertible, ||f^-1||_1 <= 1/(|c| - ||g||_1).

    Returns ``None`` when the test does not apply (which proves nothing).
    """
    c = trace(f)
    rest = l1_norm(f) - abs(c)
    if not abs(c) > rest:
        return None
    q = rest / abs(c)
    if q == 0:
        terms = 1
    else:
        terms = min(NEUMANN_MAX_TERMS, max(1, math.ceil(math.log(NEUMANN_TARGET) / math.log(q))))
    return InvertibilityCertificate(
        "neumann", 1.0 / (abs(c) - rest), {"c": c, "rest_l1": rest, "ratio": q, "terms": terms}
    )


def neumann_inverse(f: GroupRingElement, terms: int | None = None) -> GroupRingElement:
    """Truncated series sum_{j<k} (-g/c)^j / c for f = c e + g."""
    cert = neumann_certificate(f)
    if cert is None:
        raise PreconditionError("Neumann series does not converge for this element")
    k = cert.params["terms"] if terms is None else terms
    c = cert.params["c"]
    g = f - GroupRingElement.identity(f.model, c)
    step = g.scale(-1 / c)
    power = GroupRingElement.identity(f.model)
    out = GroupRingElement(f.model)
    for _ in range(k):
        out = out + power
        power = power * step
    return out.scale(1 / c)


def wiener_certificate(f: GroupRingElement, N: int) -> InvertibilityCertificate | None:
    """Certify min over T^d of |F(f)| > 0 from an offset N^d grid plus Lipschitz bounds.

    With L_j = 2 pi sum |nu_j| |f_nu| every torus point is within 1/(2N) per
    axis of a grid point, so min |P| >= min_grid |P| - sum_j L_j / (2N).
    """
    from .laurent import from_groupring, grid_eval

    if not isinstance(f.model, IntegerLattice):
        raise PreconditionError("Wiener certificate is only available over Z^d")
    if N < 1:
        raise ParameterError(f"grid size must be >= 1, got {N}")
    P = from_groupring(f)
    if not P.coeffs:
        return None
    values = grid_eval(P, N, offset=True)
    m_grid = float(np.abs(values).min())
    exps = np.abs(P.exponent_array())
    weights = np.abs(P.coefficient_array())
    lips = 2 * np.pi * (exps * weights[:, None]).sum(axis=0)
    bound = m_grid - float(lips.sum()) / (2 * N)
    if not bound > 0:
        return None
    return InvertibilityCertificate(
        "wiener-grid", bound, {"N": N, "grid_min": m_grid, "lipschitz": lips.tolist()}
    )
