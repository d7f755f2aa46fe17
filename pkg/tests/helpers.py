"""Random generators shared by the test modules."""

import random
from fractions import Fraction
from math import gcd

from formalnbhd.coefficients import exact_field, float_field
from formalnbhd.germs import Germ
from formalnbhd.neighborhood import ModelSpec


def rand_rational(rng, lo=-5, hi=5, den=4):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def rand_nonzero(rng, lo=-5, hi=5, den=4):
    while True:
        x = rand_rational(rng, lo, hi, den)
        if x:
            return x


def lattice_field(m):
    """Exact field holding zeta_m and tau = i."""
    return exact_field(m * 4 // gcd(m, 4))


def rand_linear_parts(rng, m, field):
    # a1, atau powers of zeta_m whose orders have lcm m
    z = field.root_of_unity(m)
    while True:
        e1, e2 = rng.randrange(m), rng.randrange(m)
        if gcd(gcd(e1, e2), m) == 1:
            return z ** e1, z ** e2


def rand_spec(rng, case=None, max_k=8, max_m=4):
    """A random model spec with tau = i on the exact backend.

    ``case`` picks the degree class: "p=-1" (Lambda = 0), "p=0" (only
    the constant term) or "p>0"; ``None`` draws one.
    """
    case = case or rng.choice(["p=-1", "p>0", "p>0"])
    while True:
        m = rng.randint(1, max_m)
        kp = rng.randint(1, max_k // m) if max_k >= m else 0
        if kp == 0:
            continue
        if case == "p>0" and kp < 2:
            continue
        break
    k = m * kp
    field = lattice_field(m)
    a1, atau = rand_linear_parts(rng, m, field)
    lam = rand_rational(rng)
    if case == "p=-1":
        Lambda = ()
    elif case == "p=0":
        Lambda = (rand_nonzero(rng),)
    else:
        deg = rng.randint(1, kp - 1)
        Lambda = tuple(rand_rational(rng) for _ in range(deg)) + (rand_nonzero(rng),)
    return ModelSpec(a1, atau, k, lam, Lambda, field.root_of_unity(4), field)


def float_spec(spec, bits=200):
    field = float_field(bits)
    return spec.with_field(field)


def rand_tangent_germ(rng, trunc, field, lo=2, density=0.7):
    """``y + ...`` with random rational coefficients from degree ``lo`` on."""
    coeffs = [0, 1] + [0] * (trunc - 1)
    for e in range(lo, trunc + 1):
        if rng.random() < density:
            coeffs[e] = rand_rational(rng, -3, 3, 3)
    return Germ(coeffs, trunc, field=field)


def rand_admissible_pair(rng, trunc, field, k):
    """Conjugators ``(phi, psi)`` that agree modulo ``y^(k+2)``."""
    phi = rand_tangent_germ(rng, trunc, field)
    psi_coeffs = phi.coefficients()
    for e in range(k + 2, trunc + 1):
        if rng.random() < 0.5:
            psi_coeffs[e] = rand_rational(rng, -3, 3, 3)
    return phi, Germ(psi_coeffs, trunc, field=field)


def seeded(seed):
    return random.Random(seed)
