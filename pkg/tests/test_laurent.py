import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fkdet.errors import DimensionError, ParseError, ResourceError
from fkdet.expr import parse_terms
from fkdet.groupring import GroupRingElement, positive_square, pushforward, star
from fkdet.groups import IntegerLattice, quotient_hom
from fkdet.laurent import (
    LaurentPolynomial as L,
    evaluate,
    from_groupring,
    grid_eval,
    parse,
    q_brute_force,
    q_of_r,
    specialize,
    to_groupring,
)


def test_parse_examples():
    assert parse("2 - x").coeffs == {(0,): 2, (1,): -1}
    assert parse("4 + x + y").coeffs == {(0, 0): 4, (1, 0): 1, (0, 1): 1}
    assert parse("x*y^-2 - 3i").coeffs == {(1, -2): 1, (0, 0): -3j}


def test_parse_variants():
    assert parse("2x - 1") == parse("2*x - 1")
    assert parse("x1*x3^2", 3).coeffs == {(1, 0, 2): 1}
    assert parse("(1.5-2i)*x^(-3)").coeffs == {(-3,): 1.5 - 2j}
    assert parse("x + x - 2x") == L({}, 1)
    assert parse("-x^-1 + 0.5e1").coeffs == {(-1,): -1, (0,): 5}


@pytest.mark.parametrize("text,pos", [("2 - x^", 6), ("2 ++ x", 3), ("x $ y", 2), ("(x + 1)", 1), ("", 0)])
def test_parse_errors_have_positions(text, pos):
    with pytest.raises(ParseError) as err:
        parse_terms(text)
    assert err.value.position == pos


def test_dimension_error():
    with pytest.raises(DimensionError):
        parse("x + y", 1)


def test_evaluation_examples():
    P = parse("2 - x")
    assert evaluate(P, [0]) == pytest.approx(1)
    assert evaluate(P, [0.5]) == pytest.approx(3)


def test_grid_examples():
    assert np.allclose(grid_eval(parse("x"), 4), [1, 1j, -1, -1j])
    assert np.allclose(grid_eval(L.constant(1, 2), 5), np.ones((5, 5)))
    vals = grid_eval(parse("2 - x"), 8)
    assert np.prod(vals).real == pytest.approx(2**8 - 1)


def test_grid_budget():
    with pytest.raises(ResourceError):
        grid_eval(parse("x + y"), 2**13)


def random_poly(d, rng, terms=6, span=8):
    coeffs = {}
    for _ in range(terms):
        nu = tuple(int(v) for v in rng.integers(-span, span + 1, d))
        coeffs[nu] = complex(*rng.normal(size=2))
    return L(coeffs, d)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("offset", [False, True])
def test_grid_matches_direct(d, offset):
    rng = np.random.default_rng(d + 10 * offset)
    P = random_poly(d, rng)
    N = 7 if d < 4 else 4  # N below the exponent spread exercises folding
    grid = grid_eval(P, N, offset)
    sigma = 0.5 if offset else 0.0
    for _ in range(100):
        k = rng.integers(0, N, d)
        direct = evaluate(P, (k + sigma) / N)
        assert abs(grid[tuple(k)] - direct) <= 1e-12 * max(1, abs(direct)) * 10


def test_grid_per_axis_sizes():
    P = parse("x^3 + 2y^-1 - 1")
    grid = grid_eval(P, (3, 5), offset=True)
    assert grid.shape == (3, 5)
    assert grid[1, 4] == pytest.approx(evaluate(P, [1.5 / 3, 4.5 / 5]))


def test_fourier_correspondence():
    f = GroupRingElement.parse("2 - x", IntegerLattice(1))
    assert from_groupring(f) == parse("2 - x")
    assert from_groupring(positive_square(f)) == parse("5 - 2x - 2x^-1")
    assert to_groupring(parse("2 - x")) == f


def test_specialize_examples():
    assert specialize(parse("4 + x + y"), (1, 3)) == parse("4 + x + x^3")
    assert not specialize(parse("x - y"), (1, 1))
    assert specialize(parse("3 + 2x - y"), (0, 0)) == L.constant(4)


def test_q_examples():
    for n in range(1, 12):
        assert q_of_r((1, n)).value == n
    q = q_of_r((2, 3))
    assert q.value == 3 and sum(a * b for a, b in zip(q.witness, (2, 3))) == 0
    assert q_of_r((5,)).value == math.inf and q_of_r((5,)).flag == "d=1"
    assert q_of_r((0, 0)).value == 1 and q_of_r((0, 0)).flag


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-12, 12), min_size=2, max_size=3).filter(any))
def test_q_matches_brute_force(r):
    q = q_of_r(r)
    assert q.value == q_brute_force(r, 12)
    assert max(abs(a) for a in q.witness) == q.value
    assert sum(a * b for a, b in zip(q.witness, r)) == 0


def polys():
    exps = st.integers(-8, 8)
    coeff = st.one_of(
        st.integers(-9, 9).map(complex),
        st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False),
    )

    @st.composite
    def build(draw):
        d = draw(st.integers(1, 3))
        terms = draw(st.dictionaries(st.tuples(*[exps] * d), coeff, max_size=6))
        return L(terms, d)

    return build()


@settings(max_examples=1000, deadline=None)
@given(polys())
def test_print_parse_round_trip(P):
    assert parse(str(P), P.d) == P


@settings(max_examples=60, deadline=None)
@given(polys(), st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_specialize_is_pushforward(P, r):
    r = tuple(r[: P.d])
    if not any(r):
        return
    phi = quotient_hom(IntegerLattice(P.d), r=r)
    pushed = pushforward(phi, to_groupring(P))
    expected = L({(k,): c for k, c in pushed.coeffs.items()}, 1)
    got = specialize(P, r)
    keys = set(expected.coeffs) | set(got.coeffs)
    assert all(abs(expected.coeffs.get(k, 0) - got.coeffs.get(k, 0)) < 1e-9 for k in keys)


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_correspondence_is_ring_map(P, Q):
    if P.d != Q.d:
        return
    f, g = to_groupring(P), to_groupring(Q)
    prod = from_groupring(f * g)
    ref = P * Q
    keys = set(prod.coeffs) | set(ref.coeffs)
    assert all(abs(prod.coeffs.get(k, 0) - ref.coeffs.get(k, 0)) < 1e-9 for k in keys)
    assert from_groupring(star(f)) == P.conj_reflect()
    assert to_groupring(P).coeffs.get((0,) * P.d, 0) == P.constant_term()
