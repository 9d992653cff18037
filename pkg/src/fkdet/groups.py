"""Concrete group models, homomorphisms between them, Folner sets and Cayley balls.

Element forms are canonical, hashable Python values:

* ``IntegerLattice`` and ``ModularLattice``: integer tuples (entries reduced to
  ``[0, n)`` in the modular case)
* ``CyclicImage``: a single ``int``
* ``Heisenberg``: a triple ``(a, b, c)`` with product
  ``(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')``
* ``TableGroup``: an ``int`` index into the multiplication table
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import ParameterError, PreconditionError, ResourceError, TableError

Element = Hashable

DEFAULT_BALL_CAP = 10**6


class GroupModel:
    """Interface shared by every group model.

    Subclasses provide ``identity``, ``generators``, ``mul``, ``inv`` and
    ``canonical``; finite ones also set ``order`` and implement ``elements``.
    """

    kind: str = "abstract"
    identity: Element
    generators: tuple
    order: int | None = None
    abelian: bool = False

    @property
    def finite(self) -> bool:
        return self.order is not None

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def canonical(self, g):
        return g

    def elements(self) -> list:
        raise PreconditionError(f"{self!r} is infinite and cannot be enumerated")

    def power(self, g, k: int):
        if k < 0:
            g, k = self.inv(g), -k
        result = self.identity
        while k:
            if k & 1:
                result = self.mul(result, g)
            g = self.mul(g, g)
            k >>= 1
        return result

    def product(self, items: Iterable):
        return reduce(self.mul, items, self.identity)

    def word(self, word: Sequence[int], generators=None):
        """Evaluate a word of signed 1-based letters (``-i`` is ``s_i^-1``)."""
        gens = self.generators if generators is None else generators
        g = self.identity
        for letter in word:
            s = gens[abs(letter) - 1]
            g = self.mul(g, s if letter > 0 else self.inv(s))
        return g

    def commutator(self, g, h):
        return self.product([g, h, self.inv(g), self.inv(h)])

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        raise NotImplementedError


class IntegerLattice(GroupModel):
    kind = "Zd"
    abelian = True

    def __init__(self, d: int):
        if d < 1:
            raise ParameterError(f"dimension must be >= 1, got {d}")
        self.d = d
        self.identity = (0,) * d
        self.generators = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    def power(self, g, k):
        return tuple(k * a for a in g)

    def canonical(self, g):
        if isinstance(g, (int, np.integer)):
            g = (g,)
        g = tuple(int(a) for a in g)
        if len(g) != self.d:
            raise ParameterError(f"expected a vector of length {self.d}, got {g}")
        return g

    def _key(self):
        return (self.d,)

    def __repr__(self):
        return f"IntegerLattice(d={self.d})"


class ModularLattice(GroupModel):
    """(Z/n_1) x ... x (Z/n_d) with the standard basis as generators."""

    kind = "Zmod"
    abelian = True

    def __init__(self, moduli: Sequence[int]):
        moduli = tuple(int(n) for n in moduli)
        if not moduli:
            raise ParameterError("need at least one modulus")
        if any(n < 1 for n in moduli):
            raise ParameterError(f"moduli must be >= 1, got {moduli}")
        self.moduli = moduli
        self.d = len(moduli)
        self.identity = (0,) * self.d
        self.generators = tuple(
            tuple(int(i == j) % moduli[j] for j in range(self.d)) for i in range(self.d)
        )
        self.order = math.prod(moduli)

    def mul(self, g, h):
        return tuple((a + b) % n for a, b, n in zip(g, h, self.moduli))

    def inv(self, g):
        return tuple(-a % n for a, n in zip(g, self.moduli))

    def power(self, g, k):
        return tuple(k * a % n for a, n in zip(g, self.moduli))

    def canonical(self, g):
        if isinstance(g, (int, np.integer)):
            g = (g,)
        if len(g) != self.d:
            raise ParameterError(f"expected a vector of length {self.d}, got {g}")
        return tuple(int(a) % n for a, n in zip(g, self.moduli))

    def elements(self):
        return list(product(*(range(n) for n in self.moduli)))

    def _key(self):
        return self.moduli

    def __repr__(self):
        return f"ModularLattice(moduli={self.moduli})"


class CyclicImage(GroupModel):
    """The subgroup D(r)Z of Z generated by r_1, ..., r_d, marked by (r_1, ..., r_d)."""

    kind = "CyclicImage"
    abelian = True

    def __init__(self, r: Sequence[int]):
        r = tuple(int(x) for x in r)
        if not r:
            raise ParameterError("r must have at least one entry")
        self.r = r
        self.gcd = math.gcd(*r)
        self.identity = 0
        self.generators = r
        if self.gcd == 0:
            self.order = 1

    def mul(self, g, h):
        return g + h

    def inv(self, g):
        return -g

    def power(self, g, k):
        return k * g

    def canonical(self, g):
        if isinstance(g, tuple):
            (g,) = g
        g = int(g)
        if (self.gcd == 0 and g != 0) or (self.gcd and g % self.gcd):
            raise ParameterError(f"{g} is not in D(r)Z with D(r) = {self.gcd}")
        return g

    def elements(self):
        if self.gcd == 0:
            return [0]
        return super().elements()

    def _key(self):
        return self.r

    def __repr__(self):
        return f"CyclicImage(r={self.r})"


class Heisenberg(GroupModel):
    """Integral Heisenberg group, or its quotient H3(Z/n) when ``n`` is given.

    Generators are x = (1, 0, 0) and y = (0, 1, 0); the central z = (0, 0, 1)
    equals the commutator x y x^-1 y^-1.
    """

    kind = "Heisenberg"

    def __init__(self, n: int | None = None):
        if n is not None and n < 1:
            raise ParameterError(f"modulus must be >= 1, got {n}")
        self.n = n
        self.identity = (0, 0, 0)
        if n is None:
            self.generators = ((1, 0, 0), (0, 1, 0))
        else:
            self.generators = ((1 % n, 0, 0), (0, 1 % n, 0))
            self.order = n**3

    def mul(self, g, h):
        a, b, c = g
        a2, b2, c2 = h
        if self.n is None:
            return (a + a2, b + b2, c + c2 + a * b2)
        n = self.n
        return ((a + a2) % n, (b + b2) % n, (c + c2 + a * b2) % n)

    def inv(self, g):
        a, b, c = g
        if self.n is None:
            return (-a, -b, a * b - c)
        n = self.n
        return (-a % n, -b % n, (a * b - c) % n)

    def canonical(self, g):
        a, b, c = (int(x) for x in g)
        if self.n is None:
            return (a, b, c)
        return (a % self.n, b % self.n, c % self.n)

    def elements(self):
        if self.n is None:
            return super().elements()
        return list(product(range(self.n), repeat=3))

    def _key(self):
        return (self.n,)

    def __repr__(self):
        return "Heisenberg()" if self.n is None else f"Heisenberg(n={self.n})"


class TableGroup(GroupModel):
    """Finite group given by a 0-indexed multiplication table (row = left factor)."""

    kind = "Table"

    def __init__(self, table, generators: Sequence[int] | None = None, name: str = "table"):
        table = np.asarray(table, dtype=np.int64)
        validate_table(table)
        self.table = table
        self.table.setflags(write=False)
        self.name = name
        self.order = table.shape[0]
        self.identity = int(np.flatnonzero((table == np.arange(self.order)).all(axis=1))[0])
        self._inverse = np.argmax(table == self.identity, axis=1)
        if generators is None:
            generators = [g for g in range(self.order) if g != self.identity] or [self.identity]
        generators = tuple(int(g) for g in generators)
        if any(not 0 <= g < self.order for g in generators):
            raise ParameterError(f"generator index out of range: {generators}")
        self.generators = generators
        self.abelian = bool((table == table.T).all())

    def mul(self, g, h):
        return int(self.table[g, h])

    def inv(self, g):
        return int(self._inverse[g])

    def canonical(self, g):
        g = int(g)
        if not 0 <= g < self.order:
            raise ParameterError(f"element index {g} out of range")
        return g

    def elements(self):
        return list(range(self.order))

    def _key(self):
        return (self.table.tobytes(), self.generators)

    def __repr__(self):
        return f"TableGroup(order={self.order}, generators={self.generators})"


def validate_table(table: np.ndarray) -> None:
    """Reject tables that are not groups, naming a failing triple where possible."""
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] < 1:
        raise TableError("multiplication table must be a non-empty square array")
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        raise TableError("table entries must lie in [0, |G|)")
    full = np.arange(n)
    for a in range(n):
        if not np.array_equal(np.sort(table[a]), full):
            b = int(np.flatnonzero(np.bincount(table[a], minlength=n) != 1)[0])
            raise TableError("not a Latin square: row repeats or misses an entry", (a, b, None))
        if not np.array_equal(np.sort(table[:, a]), full):
            raise TableError("not a Latin square: column repeats or misses an entry", (None, a, None))
    ids = np.flatnonzero((table == full).all(axis=1) & (table.T == full).all(axis=1))
    if ids.size == 0:
        raise TableError("no two-sided identity element")
    # exhaustive associativity, one left factor at a time
    for a in range(n):
        lhs = table[table[a]]  # (a b) c for all b, c
        rhs = table[a][table]  # a (b c)
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            b, c = (int(x) for x in bad[0])
            raise TableError("associativity fails", (a, b, c))


def load_table(path) -> TableGroup:
    """Read a table file: ``|G|``, then ``|G|`` rows, then a generator line."""
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise TableError(f"{path}: empty table file")
    try:
        n = int(lines[0][0])
        rows = [[int(x) for x in ln] for ln in lines[1 : n + 1]]
        gens = [int(x) for x in lines[n + 1]] if len(lines) > n + 1 else None
    except (ValueError, IndexError) as exc:
        raise TableError(f"{path}: malformed table file ({exc})") from None
    if len(rows) != n or any(len(row) != n for row in rows):
        raise TableError(f"{path}: expected {n} rows of {n} entries")
    return TableGroup(rows, gens, name=str(path))


def make_model(kind: str, **params) -> GroupModel:
    """Instantiate a model by name.

    ``Zd`` (d), ``Zmod`` (n and d, or moduli), ``CyclicImage`` (r),
    ``Heisenberg`` (optional n), ``HeisenbergMod`` (n), ``Table`` (table,
    generators).
    """
    key = kind.lower().replace("_", "").replace("-", "")
    if key in ("zd", "z", "lattice"):
        return IntegerLattice(int(params.get("d", 1)))
    if key in ("zmod", "znd", "modular"):
        if "moduli" in params:
            return ModularLattice(params["moduli"])
        n = int(params["n"])
        if n <= 0:
            raise ParameterError(f"modulus must be >= 1, got {n}")
        return ModularLattice((n,) * int(params.get("d", 1)))
    if key in ("cyclicimage", "cyclic", "dr"):
        return CyclicImage(params["r"])
    if key in ("heisenberg", "h3"):
        return Heisenberg(params.get("n"))
    if key in ("heisenbergmod", "h3mod"):
        return Heisenberg(int(params["n"]))
    if key == "table":
        return TableGroup(params["table"], params.get("generators"))
    raise ParameterError(f"unknown model kind {kind!r}")


def check_group_axioms(model: GroupModel, elements=None) -> None:
    """Exhaustive identity, inverse and associativity check; raises TableError."""
    elements = model.elements() if elements is None else list(elements)
    e = model.identity
    for g in elements:
        if model.mul(e, g) != g or model.mul(g, e) != g:
            raise TableError("identity law fails", (e, g, None))
        if model.mul(g, model.inv(g)) != e or model.mul(model.inv(g), g) != e:
            raise TableError("inverse law fails", (g, model.inv(g), None))
    for a, b, c in product(elements, repeat=3):
        if model.mul(model.mul(a, b), c) != model.mul(a, model.mul(b, c)):
            raise TableError("associativity fails", (a, b, c))


# --------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True, eq=False)
class GroupHomomorphism:
    source: GroupModel
    target: GroupModel
    images: tuple
    rule: Callable | None = None
    label: str = ""

    def __call__(self, g):
        if self.rule is not None:
            return self.rule(g)
        return _extend_from_generators(self.source, self.target, self.images, g)

    def in_kernel(self, g) -> bool:
        return self(g) == self.target.identity


def _extend_from_generators(source, target, images, g):
    if isinstance(source, IntegerLattice):
        return target.product(target.power(s, k) for s, k in zip(images, g))
    if isinstance(source, Heisenberg) and source.n is None:
        a, b, c = g
        x, y = images
        z = target.commutator(x, y)
        return target.product([target.power(x, a), target.power(y, b), target.power(z, c - a * b)])
    raise PreconditionError(f"no normal form to extend a homomorphism from {source!r}")


def homomorphism(source: GroupModel, target: GroupModel, images: Sequence) -> GroupHomomorphism:
    """Homomorphism determined by generator images (source must have a normal form)."""
    images = tuple(target.canonical(s) for s in images)
    if len(images) != source.ngens:
        raise ParameterError(f"need {source.ngens} generator images, got {len(images)}")
    return GroupHomomorphism(source, target, images)


def quotient_hom(source: GroupModel, *, moduli=None, r=None, n=None) -> GroupHomomorphism:
    """Quotient maps Z^d -> prod Z/n_i, Z^d -> D(r)Z and H3(Z) -> H3(Z/n)."""
    if isinstance(source, IntegerLattice) and moduli is not None:
        if isinstance(moduli, int):
            moduli = (moduli,) * source.d
        if len(moduli) != source.d:
            raise ParameterError(f"need {source.d} moduli, got {len(moduli)}")
        target = ModularLattice(moduli)
        return GroupHomomorphism(source, target, target.generators, target.canonical,
                                 label=f"Z^{source.d}->Z/{'x'.join(map(str, target.moduli))}")
    if isinstance(source, IntegerLattice) and r is not None:
        r = tuple(int(x) for x in r)
        if len(r) != source.d:
            raise ParameterError(f"r must have length {source.d}, got {r}")
        target = CyclicImage(r)

        def rule(g, r=r):
            return sum(a * b for a, b in zip(g, r))

        return GroupHomomorphism(source, target, r, rule, label=f"phi_r r={r}")
    if isinstance(source, Heisenberg) and source.n is None and n is not None:
        target = Heisenberg(int(n))
        return GroupHomomorphism(source, target, target.generators, target.canonical,
                                 label=f"H3->H3(Z/{n})")
    raise PreconditionError(
        f"unsupported quotient of {source!r} (moduli={moduli}, r={r}, n={n})"
    )


def kernels_escape(homs: Sequence[GroupHomomorphism], Q: Iterable, labels=None, reference=None):
    """Smallest label N with K_n & Q within {e} for every provided n >= N.

    With ``reference`` (a kernel test for K on the common source) the
    condition becomes ``(K ^ K_n) & Q`` empty instead.  Returns ``None`` when
    even the last provided homomorphism fails.
    """
    homs = list(homs)
    if not homs:
        raise ParameterError("need at least one homomorphism")
    if labels is None:
        labels = list(range(1, len(homs) + 1))
    if len(labels) != len(homs):
        raise ParameterError("labels and homs differ in length")
    source = homs[0].source
    if any(h.source != source for h in homs):
        raise ParameterError("homomorphisms must share one source model")
    Q = [source.canonical(q) for q in Q]
    e = source.identity

    def ok(hom):
        for q in Q:
            if reference is None:
                if q != e and hom.in_kernel(q):
                    return False
            elif hom.in_kernel(q) != bool(reference(q)):
                return False
        return True

    answer = None
    for label, hom in zip(reversed(labels), reversed(homs)):
        if not ok(hom):
            break
        answer = label
    return answer


# --------------------------------------------------------------------------
# Folner sets and balls


@dataclass(frozen=True)
class FolnerSet:
    elements: tuple
    size: int
    index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        index = {g: i for i, g in enumerate(self.elements)}
        if len(index) != len(self.elements):
            raise ParameterError("Folner set contains duplicate elements")
        object.__setattr__(self, "index", index)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        return g in self.index


def folner_set(model: GroupModel, n: int, shape: str = "box") -> FolnerSet:
    """Box Folner sets: {0..n-1}^d in Z^d; {0..n-1}^2 x {0..n^2-1} in H3(Z).

    ``shape="tall"`` doubles the central range in H3 (an alternative
    sequence used by the sequence-dependence probe).
    """
    if n < 1:
        raise ParameterError(f"Folner size must be >= 1, got {n}")
    if isinstance(model, IntegerLattice):
        return FolnerSet(tuple(product(range(n), repeat=model.d)), n)
    if isinstance(model, Heisenberg) and model.n is None:
        height = {"box": n * n, "tall": 2 * n * n}.get(shape)
        if height is None:
            raise ParameterError(f"unknown Heisenberg Folner shape {shape!r}")
        return FolnerSet(tuple(product(range(n), range(n), range(height))), n)
    raise PreconditionError(f"no Folner sequence available for {model!r}")


@dataclass(frozen=True, eq=False)
class LabeledBall:
    """BFS ball; ``succ[v, 2i]`` / ``succ[v, 2i+1]`` follow s_i / s_i^-1 (-1 = outside)."""

    radius: int
    vertices: list
    level: np.ndarray
    succ: np.ndarray
    index: dict = field(repr=False)

    def __len__(self):
        return len(self.vertices)

    def count(self, radius: int) -> int:
        return int(np.searchsorted(self.level, radius, side="right"))


def labeled_ball(model: GroupModel, radius: int, generators=None, cap: int = DEFAULT_BALL_CAP) -> LabeledBall:
    if radius < 0:
        raise ParameterError(f"radius must be >= 0, got {radius}")
    gens = model.generators if generators is None else tuple(generators)
    steps = []
    for s in gens:
        steps += [s, model.inv(s)]
    e = model.identity
    vertices = [e]
    level = [0]
    index = {e: 0}
    rows = []
    queue = deque([0])
    while queue:
        v = queue.popleft()
        g = vertices[v]
        row = []
        for s in steps:
            h = model.mul(g, s)
            j = index.get(h)
            if j is None and level[v] < radius:
                if len(vertices) >= cap:
                    raise ResourceError(f"ball exceeds {cap} vertices", reached=level[v])
                j = len(vertices)
                index[h] = j
                vertices.append(h)
                level.append(level[v] + 1)
                queue.append(j)
            row.append(-1 if j is None else j)
        rows.append(row)
    succ = np.asarray(rows, dtype=np.int64).reshape(len(vertices), len(steps))
    return LabeledBall(radius, vertices, np.asarray(level, dtype=np.int64), succ, index)
