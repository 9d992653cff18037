import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fkdet.errors import ParameterError, PreconditionError, ResourceError, TableError
from fkdet.groups import (
    CyclicImage,
    FolnerSet,
    Heisenberg,
    IntegerLattice,
    ModularLattice,
    TableGroup,
    check_group_axioms,
    folner_set,
    homomorphism,
    kernels_escape,
    labeled_ball,
    load_table,
    make_model,
    quotient_hom,
)


def test_zd_model():
    Z2 = make_model("Zd", d=2)
    assert Z2.identity == (0, 0)
    assert Z2.generators == ((1, 0), (0, 1))
    assert Z2.mul((1, 2), (3, -4)) == (4, -2)
    assert Z2.inv((1, -2)) == (-1, 2)


def test_heisenberg_convention():
    H = make_model("Heisenberg")
    assert H.mul((1, 0, 0), (0, 1, 0)) == (1, 1, 1)
    assert H.mul((0, 1, 0), (1, 0, 0)) == (1, 1, 0)
    assert H.commutator((1, 0, 0), (0, 1, 0)) == (0, 0, 1)


def _matrix(g):
    a, b, c = g
    return np.array([[1, a, c], [0, 1, b], [0, 0, 1]])


@given(st.lists(st.integers(-5, 5), min_size=6, max_size=6))
def test_heisenberg_matches_matrices(v):
    H = Heisenberg()
    g, h = tuple(v[:3]), tuple(v[3:])
    assert np.array_equal(_matrix(H.mul(g, h)), _matrix(g) @ _matrix(h))
    assert H.mul(g, H.inv(g)) == H.identity


def test_cyclic_image():
    D = make_model("CyclicImage", r=(2, 4))
    assert D.gcd == 2
    assert D.generators == (2, 4)
    with pytest.raises(ParameterError):
        D.canonical(3)


def test_modular_reduction():
    M = make_model("Zmod", n=5, d=2)
    assert M.canonical((7, -1)) == (2, 4)
    assert M.order == 25
    with pytest.raises(ParameterError):
        make_model("Zmod", n=0)


@pytest.mark.parametrize(
    "model",
    [ModularLattice((2, 3)), ModularLattice((8,)), Heisenberg(3), Heisenberg(4), CyclicImage((0, 0))],
)
def test_finite_axioms(model):
    check_group_axioms(model)


def test_table_group_and_rejection(tmp_path):
    z3 = [[(i + j) % 3 for j in range(3)] for i in range(3)]
    G = TableGroup(z3, [1])
    check_group_axioms(G)
    assert G.inv(1) == 2
    bad = [[0, 1, 2], [1, 0, 2], [2, 2, 0]]
    with pytest.raises(TableError):
        TableGroup(bad)
    path = tmp_path / "z3.txt"
    path.write_text("3\n0 1 2\n1 2 0\n2 0 1\n1\n")
    assert load_table(path).order == 3


def test_non_associative_latin_square_rejected():
    # a Latin square with identity 0 that is not associative (order 5 loop)
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(TableError) as err:
        TableGroup(loop)
    assert err.value.triple is not None


def test_quotient_examples():
    Z2 = IntegerLattice(2)
    phi = quotient_hom(Z2, r=(1, 3))
    assert phi((1, 0)) == 1 and phi((0, 1)) == 3
    assert phi.in_kernel((3, -1)) and not phi.in_kernel((1, 1))
    Z = IntegerLattice(1)
    triv = quotient_hom(Z, moduli=1)
    assert all(triv.in_kernel((k,)) for k in range(-4, 5))
    psi = quotient_hom(Heisenberg(), n=2)
    assert psi((1, 1, 1)) == (1, 1, 1)
    assert psi((2, 0, 0)) == (0, 0, 0)
    with pytest.raises(PreconditionError):
        quotient_hom(Heisenberg(), moduli=3)


@pytest.mark.parametrize(
    "phi",
    [
        quotient_hom(IntegerLattice(2), moduli=(3, 4)),
        quotient_hom(IntegerLattice(2), r=(1, 3)),
        quotient_hom(Heisenberg(), n=3),
        homomorphism(Heisenberg(), Heisenberg(5), [(1, 0, 0), (0, 1, 0)]),
    ],
)
def test_homomorphism_on_ball(phi):
    ball = labeled_ball(phi.source, 4).vertices[:150]
    e = phi.source.identity
    assert phi(e) == phi.target.identity
    for g, h in itertools.product(ball, ball[:40]):
        assert phi(phi.source.mul(g, h)) == phi.target.mul(phi(g), phi(h))


def test_folner_sets():
    assert folner_set(IntegerLattice(1), 3).elements == ((0,), (1,), (2,))
    assert folner_set(IntegerLattice(2), 2).elements == ((0, 0), (0, 1), (1, 0), (1, 1))
    F = folner_set(Heisenberg(), 2)
    assert len(F) == 16 and {g[2] for g in F} == {0, 1, 2, 3}
    for n in range(1, 5):
        assert len(folner_set(IntegerLattice(3), n)) == n**3
        assert len(folner_set(Heisenberg(), n)) == n**4
    with pytest.raises(ParameterError):
        FolnerSet(((0,), (0,)), 1)
    with pytest.raises(PreconditionError):
        folner_set(ModularLattice((3,)), 2)


def test_folner_index_inverse():
    F = folner_set(Heisenberg(), 3)
    assert all(F.index[g] == i for i, g in enumerate(F.elements))


def test_labeled_balls():
    b = labeled_ball(IntegerLattice(1), 2)
    assert b.vertices == [(0,), (1,), (-1,), (2,), (-2,)]
    assert b.succ[3, 0] == -1
    b3 = labeled_ball(ModularLattice((3,)), 2)
    assert len(b3) == 3
    assert b3.succ[1, 0] == 2 and b3.succ[2, 0] == 0
    assert len(labeled_ball(IntegerLattice(2), 1)) == 5
    with pytest.raises(ResourceError) as err:
        labeled_ball(IntegerLattice(3), 30, cap=1000)
    assert err.value.reached is not None


def test_ball_deterministic():
    a = labeled_ball(Heisenberg(), 4)
    b = labeled_ball(Heisenberg(), 4)
    assert a.vertices == b.vertices and np.array_equal(a.succ, b.succ)


def test_kernels_escape():
    Z = IntegerLattice(1)
    homs = [quotient_hom(Z, moduli=n) for n in range(1, 11)]
    Q = [(k,) for k in range(-3, 4)]
    assert kernels_escape(homs, Q) == 4
    assert kernels_escape(homs, [(0,)]) == 1
    assert kernels_escape(homs[:3], Q) is None
    Z2 = IntegerLattice(2)
    rhoms = [quotient_hom(Z2, r=(1, n)) for n in range(1, 7)]
    # sup-norm box of radius 2: escape once q(r) = n > 2
    box = list(itertools.product(range(-2, 3), repeat=2))
    assert kernels_escape(rhoms, box, labels=list(range(1, 7))) == 3
    # word-metric ball of radius 2: the kernel generator (n, -1) has length n + 1
    ball = labeled_ball(Z2, 2).vertices
    assert kernels_escape(rhoms, ball, labels=list(range(1, 7))) == 2


def test_kernels_escape_correspondence():
    Z2 = IntegerLattice(2)
    base = quotient_hom(Z2, moduli=(1, 1000))  # K = Z x 1000Z
    homs = [quotient_hom(Z2, moduli=(1, n)) for n in (2, 3, 5, 7)]
    Q = list(itertools.product(range(-4, 5), repeat=2))
    assert kernels_escape(homs, Q, labels=[2, 3, 5, 7], reference=base.in_kernel) == 5
