from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from formalnbhd.coefficients import QQ, exact_field
from formalnbhd.errors import FormalError
from formalnbhd.series import LSeries, PSeries, compose, identity_series, monomial, reversion


def P(coeffs, N):
    return PSeries(coeffs, N, field=QQ)


def test_compose_with_identity_inner():
    outer = P([0, 1, 1], 6)
    assert compose(outer, identity_series(6)) == outer


def test_compose_monomials():
    assert compose(P([0, 0, 1], 5), P([0, 2], 5)) == P([0, 0, 4], 5)


def test_compose_expansion():
    # (y + y^3) + (y + y^3)^2 through y^4
    got = compose(P([0, 1, 1], 4), P([0, 1, 0, 1], 4))
    assert got == P([0, 1, 1, 1, 2], 4)


def test_reversion_examples():
    assert reversion(identity_series(5)) == identity_series(5)
    assert reversion(P([0, 2], 5)) == P([0, Fraction(1, 2)], 5)
    # Catalan numbers with alternating signs
    assert reversion(P([0, 1, 1], 4)) == P([0, 1, -1, 2, -5], 4)


def test_laurent_inverse_duality():
    # (1/y^3 + lam/y) * y^3 / (1 + lam y^2) = 1
    lam = Fraction(5, 7)
    w = LSeries([1, 0, lam], 6, start=-3, field=QQ)
    v = P([0, 0, 0, 1, 0, -lam, 0, lam ** 2, 0, -lam ** 3], 9)
    prod = w * v
    assert prod[0] == 1
    assert all(prod[e] == 0 for e in range(1, prod.trunc + 1))


def test_laurent_basics():
    inv_y = LSeries([1], 5, start=-1, field=QQ)
    assert (inv_y * P([0, 1], 5))[0] == 1
    d = inv_y.derivative()
    assert d[-2] == -1 and d.valuation() == -2


def test_primitive():
    assert LSeries([], 4, field=QQ).primitive().is_zero()
    assert LSeries([1], 4, field=QQ).primitive()[1] == 1
    a = LSeries([-2, 0, 0, 0, 0, 3], 4, start=-3, field=QQ)  # 3y^2 - 2/y^3
    prim = a.primitive()
    assert prim[3] == 1 and prim[-2] == 1
    assert all(prim[e] == 0 for e in range(-2, prim.trunc + 1) if e not in (-2, 3))


def test_primitive_rejects_residue():
    with pytest.raises(FormalError) as err:
        LSeries([1], 4, start=-1, field=QQ).primitive()
    assert err.value.code == "NONZERO_RESIDUE"


def test_truncation_is_honest():
    # 1/(y^2 + y^3) only knows N - 4 orders
    s = LSeries([1, 1], 6, start=2, field=QQ)
    inv = s.inverse()
    assert inv.trunc == 6 - 4
    with pytest.raises(IndexError):
        inv[inv.trunc + 1]


def test_principal_part_and_residue():
    s = LSeries([2, 0, 3, 7], 4, start=-3, field=QQ)
    assert s.residue() == 3
    assert s.principal_part() == {-3: 2, -1: 3}


def test_json_round_trip_exact_and_laurent():
    K = exact_field(3)
    z = K.root_of_unity(3)
    s = LSeries([z, 0, Fraction(1, 2)], 5, start=-2, field=K)
    assert LSeries.from_json(s.to_json()) == s
    p = P([0, 3, Fraction(-1, 4)], 7)
    assert PSeries.from_json(p.to_json()) == p


def test_monomial():
    m = monomial(Fraction(3, 2), 3, 6, QQ)
    assert m[3] == Fraction(3, 2) and m.valuation() == 3


small = st.fractions(min_value=-5, max_value=5, max_denominator=5)


@st.composite
def tangent_series(draw, N=8):
    return P([0, 1] + [draw(small) for _ in range(N - 1)], N)


@settings(max_examples=40, deadline=None)
@given(tangent_series(), tangent_series(), tangent_series())
def test_composition_is_associative(f, g, h):
    assert compose(compose(f, g), h) == compose(f, compose(g, h))


@settings(max_examples=40, deadline=None)
@given(tangent_series())
def test_reversion_inverts(f):
    r = reversion(f)
    assert compose(f, r) == identity_series(f.trunc)
    assert compose(r, f) == identity_series(f.trunc)


@settings(max_examples=40, deadline=None)
@given(tangent_series(), tangent_series())
def test_product_rule(f, g):
    lhs = (f * g).derivative()
    rhs = f.derivative() * g + f * g.derivative()
    assert lhs.agrees_with(rhs, upto=min(lhs.trunc, rhs.trunc))
