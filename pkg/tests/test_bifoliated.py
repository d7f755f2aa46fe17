from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from formalnbhd.bifoliated import (affine_structure, canonicalize_Lambda, classify_pair, compatibility_check,
                                   invariants_of_spec, tangency)
from formalnbhd.coefficients import exact_field
from formalnbhd.errors import FormalError
from formalnbhd.germs import Germ
from formalnbhd.neighborhood import INFINITY, ModelSpec, build_model, holonomy
from formalnbhd.normalform import HolRep

from helpers import float_spec, rand_admissible_pair, rand_spec, seeded

K4 = exact_field(4)
I = K4.root_of_unity(4)


def model_pair(spec, N=None):
    N = N or max(2 * spec.k + 2, spec.k + 2 * spec.p + 2)
    pres = build_model(spec, N)
    return pres, holonomy(pres, spec, 0), holonomy(pres, spec, INFINITY)


def test_tangency_of_equal_holonomies_is_undetected():
    spec = ModelSpec(-1, I, 8, 1, (0, 1), tau=I)
    _, F, _ = model_pair(spec)
    with pytest.raises(FormalError) as err:
        tangency(F, F)
    assert err.value.code == "UNDETECTED"


def test_tangency_between_pencil_members():
    spec = ModelSpec(-1, I, 8, Fraction(1, 2), (2, 1), tau=I)
    pres, F0, Finf = model_pair(spec)
    F1 = holonomy(pres, spec, 1)
    assert tangency(F0, F1) == spec.k + 1
    assert tangency(F0, Finf) == spec.p + 1


def test_affine_structure_of_unitary_pair():
    k, c = 3, Fraction(2, 7)
    N = 8
    one = Germ.identity(N, K4)
    F = HolRep(one, one, I)
    G = HolRep(Germ([0, 1, 0, 0, c], N, field=K4), Germ([0, 1, 0, 0, c * I], N, field=K4), I)
    aff = affine_structure(F, G, k)
    assert aff.theta == 0 and aff.c == c


def test_affine_structure_rejects_inconsistent_u():
    N = 8
    one = Germ.identity(N, K4)
    F = HolRep(one, one, I)
    G = HolRep(Germ([0, 1, 0, 1], N, field=K4), Germ([0, 1, 0, 1], N, field=K4), I)
    with pytest.raises(FormalError) as err:
        affine_structure(F, G, 2)
    assert err.value.code == "INCONSISTENT_AFFINE"


def test_compatibility_on_model_pair():
    spec = ModelSpec(1, 1, 2, Fraction(1, 3), (1, 2), tau=I)
    pres, F0, _ = model_pair(spec)
    F1 = holonomy(pres, spec, Fraction(1, 2))
    ok, _ = compatibility_check(F0, F1, spec.k)
    assert ok
    coeffs = F1.gentau.coefficients()
    coeffs[spec.k + 1] += 1
    bent = HolRep(F1.gen1, Germ(coeffs, F1.gentau.trunc, field=F1.gentau.field), I)
    ok, why = compatibility_check(F0, bent, spec.k)
    assert not ok and "INCONSISTENT_AFFINE" in why


def test_canonicalize_Lambda_examples():
    assert canonicalize_Lambda((0, 0), 2) == (0, 0)
    # mu = -1 flips the sign of the odd entry
    a = canonicalize_Lambda((1, 2), 2)
    b = canonicalize_Lambda((1, -2), 2)
    assert a == b
    assert canonicalize_Lambda((5,), 1) == (5,)
    with pytest.raises(FormalError):
        canonicalize_Lambda((1,), 2)


def test_classify_suspension():
    spec = ModelSpec(1, 1, 1, 0, (), tau=I)
    _, F0, Finf = model_pair(spec, 8)
    got = classify_pair(F0, Finf)
    assert got.case == "FIBRATION_TRANSVERSE" and (got.m, got.k, got.p) == (1, 1, -1)


def test_classify_intermediate_example():
    spec = ModelSpec(-1, I, 8, Fraction(2, 5), (Fraction(1, 2), 3), tau=I)
    _, F0, Finf = model_pair(spec)
    got = classify_pair(F0, Finf)
    assert got.case == "INTERMEDIATE"
    assert got.matches(invariants_of_spec(spec))


def test_classify_logarithmic_in_float():
    spec = float_spec(ModelSpec(1, 1, 2, Fraction(1, 3), (Fraction(3, 2), 0), tau=I))
    _, F0, Finf = model_pair(spec)
    got = classify_pair(F0, Finf)
    assert got.case == "LOGARITHMIC" and got.matches(invariants_of_spec(spec), tol=1e-40)


def test_classify_rejects_pair_outside_the_model():
    # along tau the second holonomy is the cube of the one along 1, not its flow for time tau
    spec = ModelSpec(1, 1, 2, Fraction(1, 3), (1, 2), tau=I)
    _, F0, Finf = model_pair(spec)
    G = HolRep(Finf.gen1, Finf.gen1 ** 3, I)
    with pytest.raises(FormalError) as err:
        classify_pair(F0, G)
    assert err.value.code == "NOT_IN_MODEL"


def test_classify_needs_truncation_for_the_residue():
    N = 4
    one = Germ.identity(N, K4)
    F = HolRep(one, Germ([0, 1, 0, 1], N, field=K4), I)
    with pytest.raises(FormalError) as err:
        classify_pair(F, F)
    assert err.value.code == "TRUNCATION_TOO_LOW"


def test_classify_rejects_linearizable_tau():
    N = 8
    F = HolRep(Germ.identity(N, K4), Germ.linear(2, N, K4), I)
    with pytest.raises(FormalError) as err:
        classify_pair(F, F)
    assert err.value.code == "NOT_F0_TYPE"


def test_invariants_json():
    spec = ModelSpec(-1, I, 8, Fraction(2, 5), (Fraction(1, 2), 3), tau=I)
    js = invariants_of_spec(spec).to_json()
    assert js["kind"] == "pair_invariants" and js["case"] == "INTERMEDIATE" and js["p"] == 4


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_classification_is_invariant_under_admissible_conjugation(seed):
    rng = seeded(seed)
    spec = rand_spec(rng, case=rng.choice(["p=-1", "p>0"]), max_k=6)
    pres, F0, Finf = model_pair(spec)
    phi, psi = rand_admissible_pair(rng, F0.gen1.trunc, spec.field, spec.k)
    got = classify_pair(F0.conjugate(phi), Finf.conjugate(psi))
    assert got.matches(invariants_of_spec(spec))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_canonical_Lambda_is_orbit_invariant(seed):
    rng = seeded(seed)
    spec = rand_spec(rng, case="p>0", max_k=8)
    kp = spec.kprime
    field = exact_field(4 * kp) if kp > 2 else K4
    mu = field.root_of_unity(kp) if kp > 1 else field.one
    j = rng.randrange(kp)
    moved = tuple(field.coerce(c) * mu ** (-i * j) for i, c in enumerate(spec.Lambda))
    a = canonicalize_Lambda(spec.Lambda, kp, field)
    b = canonicalize_Lambda(moved, kp, field)
    assert all(field.eq(field.coerce(x), field.coerce(y)) for x, y in zip(a, b))
