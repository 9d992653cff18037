"""Marked groups [G, S] and the two ultrametrics on the space of marked groups.

``delta_distance`` compares relation sets by word length; ``ball_distance``
compares labelled Cayley balls.  Both carry an ``exact`` flag: when no
difference shows up within the budget only an upper bound is known.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ParameterError, ResourceError
from .groups import GroupHomomorphism, GroupModel, kernels_escape, labeled_ball

MAX_LMAX = 14
WORD_BUDGET = 2**30
DEFAULT_LMAX = 10


@dataclass(frozen=True, eq=False)
class MarkedGroup:
    model: GroupModel
    generators: tuple

    def __init__(self, model: GroupModel, generators: Sequence | None = None):
        gens = model.generators if generators is None else generators
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "generators", tuple(model.canonical(s) for s in gens))
        if not self.generators:
            raise ParameterError("a marked group needs at least one generator")

    @property
    def d(self) -> int:
        return len(self.generators)

    def __repr__(self):
        return f"[{self.model!r}, {self.generators}]"


@dataclass(frozen=True)
class Word:
    """Letters (i, +-1) with 1-based generator index i."""

    letters: tuple = ()

    @classmethod
    def from_signed(cls, seq: Sequence[int]) -> "Word":
        """``[1, 1, -2]`` is s1 s1 s2^-1."""
        if any(k == 0 for k in seq):
            raise ParameterError("letter 0 does not exist; generators are 1-based")
        return cls(tuple((abs(k), 1 if k > 0 else -1) for k in seq))

    def __len__(self):
        return len(self.letters)

    def signed(self) -> tuple:
        return tuple(i * e for i, e in self.letters)

    def inverse(self) -> "Word":
        return Word(tuple((i, -e) for i, e in reversed(self.letters)))


def evaluate(mg: MarkedGroup, w) -> object:
    """Left-to-right product of the generator images named by ``w``."""
    letters = w.signed() if isinstance(w, Word) else tuple(w)
    if any(not 1 <= abs(k) <= mg.d for k in letters):
        raise ParameterError(f"letter out of range for d = {mg.d}")
    return mg.model.word(letters, mg.generators)


@dataclass
class Distance:
    value: float  # 2^-exponent
    exponent: int
    exact: bool
    method: str = ""
    words: int = 0

    @property
    def flag(self) -> str:
        return "exact" if self.exact else "upper bound"


def _check_pair(mg1: MarkedGroup, mg2: MarkedGroup):
    if mg1.d != mg2.d:
        raise ParameterError(f"marked groups have {mg1.d} and {mg2.d} generators")


def _check_budget(d: int, lmax: int):
    if lmax < 1:
        raise ParameterError("Lmax must be >= 1")
    if lmax > MAX_LMAX or (2 * d) ** lmax > WORD_BUDGET:
        raise ResourceError(
            f"word budget exceeded: (2d)^Lmax = {(2 * d) ** lmax} with Lmax = {lmax}", reached=lmax
        )


# --------------------------------------------------------------------------
# relation sets


def relations(mg: MarkedGroup, length: int, reduced: bool = False) -> set:
    """All words of exactly ``length`` letters that evaluate to e (brute force)."""
    letters = [k for i in range(1, mg.d + 1) for k in (i, -i)]
    model = mg.model
    out = set()
    for w in itertools.product(letters, repeat=length):
        if reduced and any(a == -b for a, b in zip(w, w[1:])):
            continue
        if model.word(w, mg.generators) == model.identity:
            out.add(w)
    return out


def delta_bruteforce(mg1: MarkedGroup, mg2: MarkedGroup, lmax: int, reduced: bool = False) -> Distance:
    """delta by direct comparison of relation sets; the unpruned oracle."""
    _check_pair(mg1, mg2)
    for length in range(1, lmax):
        if relations(mg1, length, reduced) != relations(mg2, length, reduced):
            return Distance(2.0**-length, length, True, "bruteforce")
    return Distance(2.0**-lmax, lmax, False, "bruteforce")


def _reduced_word_exists(nu, length: int, d: int) -> bool:
    """Is there a freely reduced word of this length with exponent sums nu?"""
    size = sum(abs(x) for x in nu)
    if size > length or (length - size) % 2:
        return False
    if d == 1:
        return size == length
    if size == length:
        return True
    return size > 0 or length >= 4


def _abelian_discrepancy(mg1: MarkedGroup, mg2: MarkedGroup, lmax: int):
    """First length with a reduced relation in exactly one group, via exponent sums.

    In an abelian group a word is a relation iff sum nu_i s_i = 0, so only
    the reachable exponent vectors matter.
    """
    d = mg1.d
    checked = 0

    def in_kernel(mg, nu):
        m = mg.model
        g = m.identity
        for s, k in zip(mg.generators, nu):
            if k:
                g = m.mul(g, m.power(s, k))
        return g == m.identity

    for length in range(1, lmax):
        for nu in itertools.product(range(-length, length + 1), repeat=d):
            if not _reduced_word_exists(nu, length, d):
                continue
            checked += 1
            if in_kernel(mg1, nu) != in_kernel(mg2, nu):
                return length, checked
    return 0, checked


def delta_distance(mg1: MarkedGroup, mg2: MarkedGroup, lmax: int = DEFAULT_LMAX, fast: bool = True) -> Distance:
    """delta = 2^-M with M the shortest length whose relation sets differ.

    Freely reducible words are skipped: a shortest discrepancy is always a
    reduced word (cancelling s s^-1 keeps relation status and shortens it).
    """
    _check_pair(mg1, mg2)
    _check_budget(mg1.d, lmax)
    if fast and mg1.model.abelian and mg2.model.abelian:
        length, words = _abelian_discrepancy(mg1, mg2, lmax)
        method = "abelian"
    else:
        radius = max(lmax - 1, 0)
        b1 = labeled_ball(mg1.model, radius, mg1.generators)
        b2 = labeled_ball(mg2.model, radius, mg2.generators)
        length, words = kernels.relation_discrepancy(b1.succ, b2.succ, lmax)
        method = "walk"
    if length:
        return Distance(2.0**-length, int(length), True, method, int(words))
    return Distance(2.0**-lmax, lmax, False, method, int(words))


# --------------------------------------------------------------------------
# balls


def _balls_agree(b1, b2, radius: int) -> bool:
    """Rooted labelled balls of this radius are isomorphic.

    BFS numbering is canonical, so the balls match iff they have the same
    number of vertices within ``radius`` and identical successor rows for
    every vertex below that level.
    """
    n1, n2 = b1.count(radius), b2.count(radius)
    if n1 != n2:
        return False
    inner = b1.count(radius - 1) if radius > 0 else 0
    return bool(np.array_equal(b1.succ[:inner], b2.succ[:inner]))


def ball_distance(mg1: MarkedGroup, mg2: MarkedGroup, nmax: int = DEFAULT_LMAX, cap: int = 10**6) -> Distance:
    """d = 2^-N with N the largest radius whose balls are isomorphic.

    ``Distance.exponent`` is N; the first failing radius is N + 1.  If the
    balls agree up to ``nmax`` the value 2^-nmax is only an upper bound.
    """
    _check_pair(mg1, mg2)
    if nmax < 1:
        raise ParameterError("Nmax must be >= 1")
    b1 = labeled_ball(mg1.model, nmax, mg1.generators, cap)
    b2 = labeled_ball(mg2.model, nmax, mg2.generators, cap)
    for radius in range(1, nmax + 1):
        if not _balls_agree(b1, b2, radius):
            return Distance(2.0 ** -(radius - 1), radius - 1, True, "ball")
    return Distance(2.0**-nmax, nmax, False, "ball")


# --------------------------------------------------------------------------
# convergence


@dataclass
class ScanRow:
    label: object
    delta: Distance
    shortest_kernel: int | None = None  # word length of the shortest nontrivial kernel element
    consistent: bool | None = None


@dataclass
class ScanReport:
    rows: list
    escape_index: object = None
    escape_radius: int | None = None
    consistent: bool = True
    notes: list = field(default_factory=list)


def shortest_kernel_element(phi: GroupHomomorphism, radius: int, generators=None) -> int | None:
    """Smallest word length of a nontrivial element of ker(phi) within the ball."""
    ball = labeled_ball(phi.source, radius, generators)
    for v, g in enumerate(ball.vertices):
        if v and phi.in_kernel(g):
            return int(ball.level[v])
    return None


def convergence_scan(
    sequence: Sequence[MarkedGroup],
    target: MarkedGroup,
    lmax: int = DEFAULT_LMAX,
    homs: Sequence[GroupHomomorphism] | None = None,
    labels=None,
    escape_radius: int = 3,
) -> ScanReport:
    """delta(mg_n, target) per n; with quotient maps target -> mg_n also the
    kernel-escape index for Q = B(2 * escape_radius) and a per-n check that the
    first relation discrepancy is the shortest nontrivial kernel element."""
    sequence = list(sequence)
    labels = list(range(1, len(sequence) + 1)) if labels is None else list(labels)
    rows = [ScanRow(lab, delta_distance(mg, target, lmax)) for lab, mg in zip(labels, sequence)]
    report = ScanReport(rows)
    if homs is None:
        return report
    homs = list(homs)
    if len(homs) != len(rows):
        raise ParameterError("need one homomorphism per marked group")
    for row, phi in zip(rows, homs):
        k = shortest_kernel_element(phi, lmax - 1, target.generators)
        row.shortest_kernel = k
        if row.delta.exact:
            row.consistent = k == row.delta.exponent
        else:
            row.consistent = k is None
        report.consistent &= row.consistent
    ball = labeled_ball(target.model, 2 * escape_radius, target.generators)
    report.escape_radius = escape_radius
    report.escape_index = kernels_escape(homs, ball.vertices, labels)
    return report
