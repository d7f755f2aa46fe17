import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from formalnbhd.coefficients import QQ
from formalnbhd.dynamics import (brjuno_profile, continued_fraction, diophantine_profile, from_quotients,
                                 golden_mean, koenigs, lattice_distance, quotients_by_rule)
from formalnbhd.errors import FormalError
from formalnbhd.germs import Germ
from formalnbhd.series import PSeries


def brjuno_terms_by_recurrence(quotients):
    # independent oracle: integer recurrence and math.log
    q = [1, quotients[0]]
    for a in quotients[1:]:
        q.append(a * q[-1] + q[-2])
    return [math.log(q[j + 1]) / q[j] for j in range(len(q) - 1)]


def test_koenigs_of_linear_map_is_identity():
    rep = koenigs(Germ([0, Fraction(1, 3)], 4, field=QQ), "0.25")
    assert abs(rep.value - mpmath.mpf("0.25")) < 1e-50
    assert rep.residual < 1e-50


def test_koenigs_quadratic_map():
    f = PSeries([0, Fraction(1, 2), 1], 2, field=QQ)
    rep = koenigs(f, "0.1", iterations=60)
    assert rep.converged and rep.residual < 1e-18
    # frozen: iterate z/2 + z^2 by hand in 300-bit mpmath
    mpmath.mp.prec = 300
    z = mpmath.mpf("0.1")
    for _ in range(80):
        z = z / 2 + z * z
    oracle = z * 2 ** 80
    mpmath.mp.prec = 53
    assert abs(rep.value - oracle) < 1e-17
    assert mpmath.nstr(rep.value.real, 15) == "0.154233451939507"


def test_koenigs_residual_shrinks_with_iterations():
    f = PSeries([0, Fraction(1, 2), 1], 2, field=QQ)
    residuals = [koenigs(f, "0.1", iterations=n).residual for n in (10, 20, 30, 40)]
    assert all(b < a for a, b in zip(residuals, residuals[1:]))


def test_koenigs_repelling_series_is_inverted():
    f = PSeries([0, 2, 1], 6, field=QQ)
    rep = koenigs(f, "0.01", iterations=40)
    assert abs(rep.multiplier - 2) < 1e-40


def test_koenigs_errors():
    with pytest.raises(FormalError) as err:
        koenigs(lambda z: mpmath.exp(2j * mpmath.pi * mpmath.sqrt(2)) * z + z * z, 0.1,
                multiplier=mpmath.exp(2j * mpmath.pi * mpmath.sqrt(2)))
    assert err.value.code == "NON_HYPERBOLIC"
    with pytest.raises(FormalError) as err:
        koenigs(PSeries([0, Fraction(1, 2), 1], 2, field=QQ), 5)
    assert err.value.code == "NO_CONVERGENCE"
    with pytest.raises(FormalError) as err:
        koenigs(lambda z: z / 2, 0.1)
    assert err.value.code == "BAD_INPUT"


def test_rational_expansion_terminates():
    cf = continued_fraction(Fraction(7, 19), 20)
    assert cf.terminated and cf.quotients == [2, 1, 2, 2]
    cf.verify()
    prof = brjuno_profile(cf)
    assert prof.verdict == "advisory-finite"


def test_decimal_input_keeps_only_determined_quotients():
    cf = continued_fraction("0.41421356237309504880168872420969807856967187537694", 60)
    assert cf.quotients == [2] * 60
    cf.verify()
    with pytest.raises(FormalError) as err:
        continued_fraction("0.4142", 20)
    assert err.value.code == "PRECISION_EXHAUSTED"


def test_golden_mean_expansion():
    cf = continued_fraction(golden_mean, 60)
    assert cf.quotients == [1] * 60
    cf.verify()


def test_golden_brjuno_terms_match_fibonacci_oracle():
    cf = continued_fraction(golden_mean, 60)
    prof = brjuno_profile(cf, terms=50)
    # term 0 is log(q_1) = log 1 = 0
    oracle = brjuno_terms_by_recurrence([1] * 51)
    assert all(abs(float(t) - o) <= 1e-12 * o for t, o in zip(prof.terms, oracle))
    # frozen derived values
    assert abs(float(prof.terms[40]) - 1.172e-7) < 1e-10
    first_small = next(j for j, t in enumerate(prof.terms) if 0 < t < 1e-8)
    assert first_small == 46
    assert abs(float(prof.partial_sums[-1]) - 3.286129698) < 1e-8
    assert prof.verdict == "advisory-bounded"


def test_liouville_rule_quotients():
    quotients = quotients_by_rule(lambda q: q, 6)
    assert quotients == [1, 1, 2, 5, 27, 734]
    cf = from_quotients(quotients)
    prof = brjuno_profile(cf)
    oracle = brjuno_terms_by_recurrence(quotients)
    assert all(abs(float(t) - o) < 1e-12 for t, o in zip(prof.terms, oracle))
    # frozen: the partial sums settle near 2.41945
    assert abs(float(prof.partial_sums[-1]) - 2.41945) < 1e-4


def test_brjuno_asks_for_too_many_terms():
    cf = from_quotients([1, 2, 3])
    with pytest.raises(FormalError) as err:
        brjuno_profile(cf, terms=10)
    assert err.value.code == "PRECISION_EXHAUSTED"


def test_diophantine_examples():
    tau = 1j
    prof = diophantine_profile(tau, 0, 20)
    assert all(d == 0 for d in prof.distances) and prof.verdict == "advisory-violated"
    half = diophantine_profile(tau, 0.5, 4)
    assert half.distances[1] == 0 and half.first_violation == 2
    assert abs(lattice_distance(0.3 + 0.4j, tau) - 0.5) < 1e-15


def test_diophantine_irrational_point_stays_off_the_lattice():
    mpmath.mp.prec = 120
    z0 = mpmath.sqrt(2) - 1
    mpmath.mp.prec = 53
    prof = diophantine_profile(1j, z0, 10 ** 4, bits=120)
    assert all(d > 0 for d in prof.distances)
    assert prof.verdict == "advisory-holds-at-horizon"


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=2, max_size=25))
def test_convergents_verify_for_any_quotients(quotients):
    x = Fraction(0)
    for a in reversed(quotients):
        x = 1 / (a + x)
    if not 0 < x < 1:
        return
    cf = continued_fraction(x, len(quotients) + 2)
    cf.verify()
    assert cf.terminated


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2), st.floats(0.3, 2), st.integers(-3, 3), st.integers(-3, 3), st.floats(-1, 1))
def test_lattice_distance_is_lattice_invariant(tau_re, tau_im, m, n, w_re):
    tau = complex(tau_re, tau_im)
    w = complex(w_re, 0.37)
    d0 = lattice_distance(w, tau)
    d1 = lattice_distance(w + m + n * tau, tau)
    d2 = lattice_distance(w, tau + 1)
    assert abs(d0 - d1) < 1e-9 and abs(d0 - d2) < 1e-9
