from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from formalnbhd.coefficients import QQ, float_field
from formalnbhd.errors import FormalError
from formalnbhd.flows import (MForm, VField, dual_field, dual_form, flow, formal_log, model_field, model_form,
                              pullback, pushforward)
from formalnbhd.germs import Germ, conjugate
from formalnbhd.series import LSeries, PSeries


def V(coeffs, N):
    return VField(PSeries(coeffs, N, field=QQ))


def test_flow_at_time_zero_is_identity():
    assert flow(model_field(2, 1, 9), 0) == Germ.identity(9)


def test_flow_of_y_squared_is_geometric():
    t = Fraction(-3, 2)
    f = flow(V([0, 0, 1], 12), t)
    assert f == Germ([0] + [t ** j for j in range(12)], 12, field=QQ)


def test_model_flow_y5_coefficient():
    for lam in (0, 1, Fraction(5, 7)):
        f = flow(model_field(2, lam, 7), 1)
        assert f[5] == Fraction(3, 2) - lam


def test_exact_flow_needs_tangent_field():
    with pytest.raises(FormalError) as err:
        flow(V([0, 2], 6), 1)
    assert err.value.code == "NO_EXACT_EXPONENTIAL"


def test_float_flow_of_linear_field():
    R = float_field(120)
    v = VField(PSeries([0, R.coerce("0.3")], 6, field=R))
    f = flow(v, 2)
    assert abs(f[1] - R.ctx.exp(R.ctx.mpf("0.6"))) < 1e-30
    assert all(abs(f[j]) < 1e-30 for j in range(2, 7))


def test_formal_log_round_trips():
    v = model_field(1, 0, 10)
    assert formal_log(flow(v, 1)) == v
    geometric = Germ([0] + [1] * 10, 10, field=QQ)
    assert formal_log(geometric) == V([0, 0, 1], 10)


def test_formal_log_of_y_plus_cube():
    # frozen from an undetermined-coefficient solve in sympy
    v = formal_log(Germ([0, 1, 0, 1], 9, field=QQ))
    assert v == V([0, 0, 0, 1, 0, Fraction(-3, 2), 0, Fraction(7, 2), 0, Fraction(-39, 4)], 9)
    assert flow(v, 1) == Germ([0, 1, 0, 1], 9, field=QQ)


def test_formal_log_errors():
    with pytest.raises(FormalError) as err:
        formal_log(Germ([0, 2, 1], 6, field=QQ))
    assert err.value.code == "NOT_TANGENT"
    with pytest.raises(FormalError) as err:
        formal_log(Germ.identity(6))
    assert err.value.code == "IDENTITY"


def test_dual_form_examples():
    assert dual_form(V([0, 0, 1], 6)) == MForm(LSeries([1], 2, start=-2, field=QQ))
    lam = Fraction(5, 7)
    w = dual_form(model_field(3, lam, 12))
    assert w.series.principal_part() == {-4: 1, -1: lam}
    assert all(w[e] == 0 for e in range(0, w.trunc + 1))
    w2 = dual_form(V([0, 0, 1, 1], 8))
    assert [w2[e] for e in range(-2, 3)] == [1, -1, 1, -1, 1]


def test_dual_field_inverts_dual_form():
    v = model_field(2, Fraction(1, 3), 10)
    back = dual_field(dual_form(v))
    assert back.agrees_with(v, upto=back.trunc)


def test_pullback_examples():
    w = LSeries([1], 6, start=-1, field=QQ)
    same = pullback(MForm(w), Germ.identity(6))
    assert same.series.agrees_with(w, upto=same.trunc)
    assert pullback(MForm(w), Germ([0, 3], 6, field=QQ)).series.principal_part() == {-1: 1}
    w2 = MForm(LSeries([1], 8, start=-2, field=QQ))
    got = pullback(w2, Germ([0, 1, 1], 8, field=QQ))
    assert [got[e] for e in range(-2, 3)] == [1, 0, -1, 2, -3]


def test_model_form_is_dual_to_model_field():
    for k in (1, 2, 4):
        v = model_field(k, Fraction(2, 3), 4 * k)
        w = model_form(k, Fraction(2, 3), 4 * k)
        prod = w.series * v.series
        assert prod[0] == 1 and all(prod[e] == 0 for e in range(1, prod.trunc + 1))


small = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def tangent_fields(draw, N=10):
    val = draw(st.integers(2, 4))
    coeffs = [0] * val + [draw(st.sampled_from([1, -1, 2]))] + [draw(small) for _ in range(N - val)]
    return V(coeffs, N)


@settings(max_examples=25, deadline=None)
@given(tangent_fields(), small, small)
def test_flow_group_law(v, s, t):
    assert flow(v, s) @ flow(v, t) == flow(v, s + t)


@settings(max_examples=25, deadline=None)
@given(tangent_fields(), st.lists(small, min_size=3, max_size=3))
def test_pushforward_is_natural(v, hc):
    # h o exp(v) o h^-1 = exp(h_* v)
    N = v.trunc
    h = Germ([0, 1] + hc, N, field=QQ)
    lhs, rhs = conjugate(flow(v, 1), h), flow(pushforward(v, h), 1)
    assert lhs.agrees_with(rhs, upto=min(lhs.trunc, rhs.trunc))


@settings(max_examples=25, deadline=None)
@given(tangent_fields(), st.lists(small, min_size=3, max_size=3))
def test_pullback_preserves_duality(v, hc):
    # (h^* w)(h^-1_* v) = w(v) o h, so dual forms pull back to dual forms
    N = v.trunc
    h = Germ([0, 1] + hc, N, field=QQ)
    w = dual_form(pushforward(v, h))
    pulled = pullback(w, h)
    expected = dual_form(v)
    top = min(pulled.trunc, expected.trunc)
    assert pulled.series.agrees_with(expected.series, upto=top)
