import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fkdet import determinants as D
from fkdet.errors import DimensionError, NotPositiveDefiniteError, NumericError, PreconditionError, ResourceError
from fkdet.groupring import GroupRingElement as G, positive_square, pushforward, trace
from fkdet.groups import FolnerSet, Heisenberg, IntegerLattice, folner_set, labeled_ball, quotient_hom
from fkdet.laurent import LaurentPolynomial as L, parse
from fkdet.numerics import cholesky_logdet, toeplitz_matrix

Z = IntegerLattice(1)
Z2 = IntegerLattice(2)
H = Heisenberg()
LOG4 = math.log(4)


# -- Mahler measure --------------------------------------------------------


def test_quadrature_examples():
    assert D.mahler_quadrature(L.constant(-3.5), 8).value == math.log(3.5)
    assert abs(D.mahler_quadrature(parse("2 - x"), 2**16).value - math.log(2)) < 1e-4
    golden = math.log((1 + math.sqrt(5)) / 2)
    assert abs(D.mahler_quadrature(parse("x^2 - x - 1"), 2**16).value - golden) < 1e-3


def test_quadrature_errors():
    with pytest.raises(PreconditionError):
        D.mahler_quadrature(L({}, 1), 8)
    with pytest.raises(PreconditionError):
        D.mahler_quadrature(parse("x"), 1)


def test_quadrature_excludes_zeros():
    # the zero of 1 + x at theta = 1/2 is an offset grid point for odd N; roundoff keeps it finite
    est = D.mahler_quadrature(parse("1 + x"), 7)
    assert math.isfinite(est.value)
    assert abs(D.mahler_quadrature(parse("1 + x"), 2**12).value) < 1e-3


def test_jensen_examples():
    assert abs(math.exp(D.mahler_jensen(parse("2x - 1")).value) - 2) < 1e-12
    assert abs(math.exp(D.mahler_jensen(parse("x - 1")).value) - 1) < 1e-12
    lehmer = parse("x^10 + x^9 - x^7 - x^6 - x^5 - x^4 - x^3 + x + 1")
    assert math.exp(D.mahler_jensen(lehmer).value) == pytest.approx(1.17628081826, abs=1e-9)
    assert D.mahler_jensen(parse("3x^-2")).value == pytest.approx(math.log(3))
    with pytest.raises(DimensionError):
        D.mahler_jensen(parse("x + y"))


# -- Szego -----------------------------------------------------------------


def test_szego_examples():
    for t in D.szego_sequence(L.constant(3.0), 5):
        assert t.root == pytest.approx(3.0)
    terms = D.szego_sequence(parse("2 + x + x^-1"), 64)
    assert [round(t.D) for t in terms] == list(range(2, 66))
    terms = D.szego_sequence(positive_square(G.parse("2 - x", Z)), 32)
    assert abs(terms[-1].ratio - 4) < 1e-6


def test_szego_rejects_negative():
    with pytest.raises(PreconditionError):
        D.szego_sequence(parse("1 + x + x^-1"), 4)
    with pytest.raises(PreconditionError):
        D.szego_sequence(parse("2 + x"), 4)


# -- Folner ----------------------------------------------------------------


def test_folner_matrix_examples():
    f = G.parse("5 - 2x - 2x^-1", Z)
    M = D.folner_matrix(f, folner_set(Z, 3)).matrix
    assert np.array_equal(M, [[5, -2, 0], [-2, 5, -2], [0, -2, 5]])
    assert np.array_equal(D.folner_matrix(G.identity(H), folner_set(H, 2)).matrix, np.eye(16))


def test_folner_matrix_is_toeplitz():
    rng = np.random.default_rng(0)
    q = G(Z, {(k,): complex(*rng.normal(size=2)) for k in range(-2, 4)})
    f = positive_square(q)
    M = D.folner_matrix(f, folner_set(Z, 20)).matrix
    T = toeplitz_matrix(D.moments(f, 20))
    assert np.array_equal(M, T)
    assert np.array_equal(M, M.conj().T)


def test_folner_heisenberg_positive():
    g = G.parse("2 + x - 0.5y + 0.3i*x*y", H)
    M = D.folner_matrix(positive_square(g), folner_set(H, 3)).matrix
    assert np.array_equal(M, M.conj().T)
    assert math.isfinite(cholesky_logdet(M).value)


def test_folner_sequences():
    f = G.parse("5 - 2x - 2x^-1", Z)
    for est, n in zip(D.folner_det_sequence(f, [1, 4, 16, 64]), [1, 4, 16, 64]):
        assert est.value == pytest.approx(math.log((4 ** (n + 1) - 1) / 3) / n, rel=1e-12)
    assert all(e.value == 0 for e in D.folner_det_sequence(G.identity(Z2), [1, 3]))
    sq = positive_square(G.parse("1 - x", Z))
    weak = G.parse("2 - x - x^-1", Z)  # weakly dominant, so only semidefinite
    for f in (sq, weak):
        for est, n in zip(D.folner_det_sequence(f, [8, 64, 256]), [8, 64, 256]):
            assert est.value == pytest.approx(math.log(n + 1) / n, rel=1e-9)


def test_folner_requires_positivity():
    with pytest.raises(PreconditionError):
        D.folner_det_sequence(G.parse("2 - x", Z), [4])
    with pytest.raises(ResourceError):
        D.folner_det_sequence(G.parse("5 + x + x^-1", H), [7])


def test_folner_not_pd_gives_minus_inf():
    # a truncation of a square of a zero divisor over a finite group is singular
    from fkdet.groups import ModularLattice

    C2 = ModularLattice((2,))
    f = positive_square(G(C2, {(0,): 1, (1,): -1}))
    M = D.folner_matrix(f, FolnerSet(((0,), (1,)), 2)).matrix
    with pytest.raises(NotPositiveDefiniteError):
        cholesky_logdet(M)


def test_tail_suprema():
    assert D.tail_suprema([1, 3, 2, 0]) == [3, 3, 2, 0]


# -- finite quotients ------------------------------------------------------


def test_quotient_examples():
    f = G.parse("2 - x", Z)
    for n in (1, 2, 5, 13):
        phi = quotient_hom(Z, moduli=n)
        expected = math.log(2**n - 1) / n
        assert D.quotient_det(phi, f).value == pytest.approx(expected, abs=1e-12)
        assert D.quotient_det(phi, f, "dense").value == pytest.approx(expected, abs=1e-12)
    assert D.quotient_det(quotient_hom(Z, moduli=6), G.identity(Z)).value == 0
    assert D.quotient_det(quotient_hom(Z, moduli=6), G.parse("1 - x", Z)).value == -math.inf
    assert D.quotient_det(quotient_hom(Z, moduli=6), G.parse("1 - x", Z), "dense").value == -math.inf


@pytest.mark.parametrize("N", [2, 3, 5, 8, 11, 16])
def test_fft_matches_dense(N):
    rng = np.random.default_rng(N)
    f = G(Z2, {tuple(rng.integers(-3, 4, 2)): complex(*rng.normal(size=2)) for _ in range(6)})
    phi = quotient_hom(Z2, moduli=N)
    a = D.quotient_det(phi, f, "fft").value
    b = D.quotient_det(phi, f, "dense").value
    assert abs(a - b) <= 1e-8


def test_quotient_infinite_cyclic_target():
    f = G.parse("4 + x + y", Z2)
    seq = D.quotient_det_sequence([quotient_hom(Z2, r=(1, n)) for n in (2, 4, 8)], f, certify=True)
    assert seq.certified
    assert all(v == pytest.approx(LOG4, abs=1e-12) for v in seq.values)


def test_quotient_sequence_annotation():
    f = G.parse("1 - x", Z)
    seq = D.quotient_det_sequence([quotient_hom(Z, moduli=n) for n in (2, 3)], f, certify=True)
    assert not seq.certified and "upper bound" in seq.relation
    e = D.quotient_det_sequence([quotient_hom(Z, moduli=n) for n in (2, 3)], G.identity(Z))
    assert e.values == [0, 0]


def test_heisenberg_quotients_vs_folner():
    f = G.parse("5 + x + x^-1 + y + y^-1", H)
    seq = D.quotient_det_sequence([quotient_hom(H, n=n) for n in (4, 6)], f, certify=True)
    assert seq.certified and seq.certificate.kind == "neumann"
    fol = D.folner_det_sequence(f, [4])[0].value
    assert abs(seq.values[-1] - fol) < 0.05


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), st.lists(st.integers(-3, 3), min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_quotient_multiplicative(n, a, b):
    f = G(Z, {(k - 1,): c for k, c in enumerate(a)}) + 7
    g = G(Z, {(k,): c for k, c in enumerate(b)}) + 0.5j
    phi = quotient_hom(Z, moduli=n)
    lf, lg, lfg = (D.quotient_det(phi, h, "dense").value for h in (f, g, f * g))
    if min(lf, lg) > -3:  # away from singular quotients, where roundoff dominates
        assert abs(lfg - lf - lg) <= 1e-8


# -- orthogonalisation -----------------------------------------------------


def test_chain_examples():
    f = G.parse("5 - 2x - 2x^-1", Z)
    steps = D.orthogonal_chain(f, [(k,) for k in range(8)])
    for k, s in enumerate(steps):
        assert s.norm2 == pytest.approx((4 ** (k + 2) - 1) / (4 ** (k + 1) - 1), rel=1e-12)
        assert s.coefficients[-1] == 1
    c = G.identity(H, 2.5)
    steps = D.orthogonal_chain(c, list(folner_set(H, 2).elements))
    assert all(s.norm2 == 2.5 for s in steps)
    assert steps[-1].logdet == pytest.approx(16 * math.log(2.5))


def test_chain_orthogonal_when_s_vanishes():
    f = G.parse("3 + x^5 + x^-5", Z)
    steps = D.orthogonal_chain(f, [(0,), (1,), (2,)])
    assert [s.norm2 for s in steps] == [3, 3, 3]


def test_chain_not_pd_reports_step():
    f = G(Z, {(0,): 1, (1,): 1, (-1,): 1})  # 1 + 2cos: negative somewhere
    with pytest.raises(NotPositiveDefiniteError) as err:
        D.orthogonal_chain(f, [(k,) for k in range(6)])
    assert err.value.index is not None and err.value.index >= 2


def test_chain_coefficients_orthogonal():
    rng = np.random.default_rng(3)
    q = G(Z2, {tuple(rng.integers(-1, 2, 2)): complex(*rng.normal(size=2)) for _ in range(4)}) + 3
    f = positive_square(q)
    chain = list(folner_set(Z2, 4).elements)
    steps = D.orthogonal_chain(f, chain)
    M = D.folner_matrix(f, FolnerSet(tuple(chain), 4)).matrix
    k = len(chain)
    phi = steps[-1].coefficients
    # (A Phi, gamma_j) = 0 for j < k, in the matrix convention M[g, h] = (A g, h)
    inner = phi @ M  # row vector: sum_i phi_i (A g_i, g_j)
    assert np.max(np.abs(inner[: k - 1])) < 1e-9
    assert inner[k - 1].real == pytest.approx(steps[-1].norm2, rel=1e-9)


def _random_positive(model, rng, radius=1, terms=4):
    pool = labeled_ball(model, radius).vertices
    q = G(model, {pool[i]: complex(*rng.normal(size=2)) for i in rng.integers(0, len(pool), terms)})
    return positive_square(q + 1.5)


@pytest.mark.parametrize("model", [Z, Z2, H], ids=repr)
def test_chain_matches_direct(model):
    rng = np.random.default_rng(11)
    f = _random_positive(model, rng)
    chain = list(folner_set(model, {Z: 100, Z2: 10, H: 3}[model]).elements)[:100]
    steps = D.orthogonal_chain(f, chain, coefficients=False)
    direct = D.chain_direct_logdets(f, chain)
    tau = trace(f).real
    for s, d in zip(steps, direct):
        assert abs(math.expm1(s.logdet - d)) <= 1e-9
        assert 0 < s.norm2 <= tau + 1e-9


# -- checks ----------------------------------------------------------------


def test_schur_examples():
    rng = np.random.default_rng(5)
    A, Dm = rng.normal(size=(3, 3)), rng.normal(size=(2, 2))
    M = np.block([[A, np.zeros((3, 2))], [np.zeros((2, 3)), Dm]])
    assert D.schur_det_check(M, 3).holds
    a, b, c, d = 2.0, 3.0, 5.0, 7.0
    rep = D.schur_det_check(np.array([[a, b], [c, d]]), 1)
    assert rep.holds and math.exp(rep.values["log_full"]) == pytest.approx(abs(a * d - b * c))
    M = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
    assert D.schur_det_check(M, 6).values["rel_err"] <= 1e-10
    with pytest.raises(NumericError):
        D.schur_det_check(np.array([[0.0, 1], [1, 0]]), 1)


def test_l2_bound_examples():
    rep = D.check_l2_bound(G.identity(Z, 3))
    assert rep.holds and rep.values["det"] == pytest.approx(3)
    rep = D.check_l2_bound(G.parse("1 + x", Z))
    assert rep.values["det"] == pytest.approx(1) and rep.values["l2"] == pytest.approx(math.sqrt(2))


def test_cor12_examples():
    rep = D.check_cor12(G.identity(Z, 2.0), 4)
    assert rep.holds and rep.values["ratio"] == pytest.approx(2) and rep.values["M_P"] == pytest.approx(2)
    rep = D.check_cor12(positive_square(G.parse("2 - x", Z)), 8)
    assert rep.holds and rep.values["ratio"] == pytest.approx((4**10 - 1) / (4**9 - 1))
    rep = D.check_cor12(positive_square(G.parse("1 + x", Z)), 8)
    assert rep.holds and rep.values["ratio"] == pytest.approx(10 / 9)


def test_trace_poly_examples():
    f = G.parse("2 - x", Z)
    homs = [quotient_hom(Z, moduli=n) for n in range(1, 6)]
    rep = D.trace_poly_convergence(f, [0, 1], homs)
    assert [r["trace"] for r in rep.values["rows"]] == [1, 2, 2, 2, 2]
    assert rep.holds
    rep = D.trace_poly_convergence(f, [3], homs)
    assert all(r["deviation"] == 0 for r in rep.values["rows"])
    rep = D.trace_poly_convergence(G.parse("1 + x", Z), [0, 0, 1], [quotient_hom(Z, moduli=2)])
    row = rep.values["rows"][0]
    assert rep.values["exact"] == 1 and row["trace"] == 2 and row["deviation"] == 1 == row["bound"]


def test_trace_poly_correspondence():
    f = G.parse("4 + x + y - 0.5x*y^-1", Z2)
    base = quotient_hom(Z2, moduli=(1000, 1))
    homs = [quotient_hom(Z2, moduli=(n, 1)) for n in (2, 3, 5, 9)]
    rep = D.trace_poly_convergence(f, [1, -1, 0.5, 0.1], homs, base=base)
    assert rep.holds
    assert rep.values["rows"][-1]["deviation"] == pytest.approx(0, abs=1e-12)


def test_boyd_examples():
    rep = D.boyd_scan(L.constant(1.0), 2, 3, [1 / 16, 1 / 64])
    assert rep.holds
    rep = D.boyd_scan(parse("x + x^-1"), 0, 3, [1 / 16, 1 / 64, 1 / 256])
    assert rep.holds and rep.note == "probe, not assertion"
    with pytest.raises(Exception):
        D.boyd_scan(parse("x"), 0, 1, [0.1, 0.2])


def test_far_field():
    P = parse("x + x^-1 + 0.5y")
    z = 50.0
    values = D.grid_eval(P, 256, offset=True).ravel()
    m = float(np.mean(np.log(np.abs(z - values))))
    assert abs(m - math.log(z)) < 1e-6 * 10 or abs(m - math.log(z)) < 1e-3


def test_det_of_square_is_square_of_det():
    q = G.parse("3 - x + 0.5i*x^2", Z)
    phi = quotient_hom(Z, moduli=7)
    assert D.quotient_det(phi, positive_square(q)).value == pytest.approx(
        2 * D.quotient_det(phi, q).value, abs=1e-12
    )
