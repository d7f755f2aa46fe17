from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from formalnbhd.coefficients import QQ
from formalnbhd.errors import FormalError
from formalnbhd.flows import flow, model_field
from formalnbhd.germs import Germ, commutator_is_trivial, conjugate, contact_order, iterate
from formalnbhd.series import reversion


def G(coeffs, N):
    return Germ(coeffs, N, field=QQ)


def geometric(t, N):
    # y / (1 - t y)
    return G([0] + [Fraction(t) ** j for j in range(N)], N)


def test_contact_order_examples():
    f = G([0, 1, 1], 6)
    assert contact_order(f, f) is None
    assert contact_order(G([0, 1], 6), G([0, 1, 0, 1], 6)) == 3
    v = model_field(2, 0, 8)
    a = -1
    assert contact_order(a * flow(v, 1), a * flow(v, 2)) == 3


def test_conjugate_examples():
    f = G([0, 1, 1], 4)
    assert conjugate(f, Germ.identity(4)) == f
    assert conjugate(G([0, 2], 4), G([0, 3], 4)) == G([0, 2], 4)
    # a germ commutes with itself, so conjugating by itself changes nothing
    assert conjugate(f, f) == f


def test_conjugate_by_quadratic_shift():
    # h(2 h^-1(y)) for h = y + y^2; frozen from a sympy series-inversion oracle
    h = G([0, 1, 1], 4)
    assert conjugate(G([0, 2], 4), h) == G([0, 2, 2, -4, 10], 4)


def test_iterate_examples():
    f = geometric(1, 8)
    assert iterate(f, 0) == Germ.identity(8)
    assert iterate(f, 3) == geometric(3, 8)
    g = G([0, 2, 1], 6)
    assert iterate(g, -1).series == reversion(g.series)
    assert g ** 3 == g @ g @ g


def test_germ_validation():
    with pytest.raises(FormalError):
        G([1, 1], 4)
    with pytest.raises(FormalError):
        G([0, 0, 1], 4)


def test_linear_queries():
    assert Germ.identity(5).is_identity()
    assert G([0, 3], 5).is_linear() and not G([0, 3, 1], 5).is_linear()


def test_json_round_trip():
    f = G([0, Fraction(1, 2), 3, 0, -1], 6)
    assert Germ.from_json(f.to_json()) == f


def test_commuting_flows():
    v = model_field(3, Fraction(5, 7), 12)
    assert commutator_is_trivial(flow(v, 1), flow(v, Fraction(-2, 3)))
    assert not commutator_is_trivial(G([0, 1, 1], 8), G([0, 1, 0, 1], 8))


small = st.fractions(min_value=-4, max_value=4, max_denominator=4)


@st.composite
def germs(draw, N=7):
    a = draw(st.sampled_from([1, -1, 2, Fraction(1, 3)]))
    return G([0, a] + [draw(small) for _ in range(N - 1)], N)


@settings(max_examples=40, deadline=None)
@given(germs(), st.integers(-3, 3), st.integers(-3, 3))
def test_iteration_is_additive(f, p, q):
    assert (f ** p) @ (f ** q) == f ** (p + q)


@settings(max_examples=40, deadline=None)
@given(germs(), germs())
def test_conjugation_is_a_homomorphism(f, h):
    g = f ** 2
    assert conjugate(f @ g, h) == conjugate(f, h) @ conjugate(g, h)
