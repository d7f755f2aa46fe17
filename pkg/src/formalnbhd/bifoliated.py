"""Invariants of pairs of foliations read from their holonomy pairs.

``repF`` is the holonomy of the foliation tangent to the curve with the
resonant normal form ``(a1 y, atau exp(v_{k,lam}))`` and ``repG`` the holonomy
of a second foliation computed from first integrals agreeing with those of
``repF`` on the same transversal.
"""

from dataclasses import dataclass
from math import gcd
from typing import Any

import mpmath

from .coefficients import (Cyclo, FloatField, common_field, encode_coefficient, euler_phi, exact_field,
                           minimal_form)
from .errors import FormalError
from .flows import dual_form, flow, formal_log
from .germs import contact_order, conjugate
from .normalform import HolRep, extract_time, normalize_germ, TORSION_BOUND

FIBRATION_TRANSVERSE = "FIBRATION_TRANSVERSE"
LOGARITHMIC = "LOGARITHMIC"
INTERMEDIATE = "INTERMEDIATE"


def _lcm(a, b):
    return a * b // gcd(a, b)


def tangency(repF, repG):
    """Least contact order of the two holonomies over the generators ``1, tau``."""
    orders = [contact_order(f, g) for f, g in zip(repF.generators, repG.generators)]
    orders = [o for o in orders if o is not None]
    if not orders:
        raise FormalError("UNDETECTED", "the holonomies agree to the full truncation")
    return min(orders)


# -- resolving logarithms through the lattice --------------------------------

def _lattice_log(r1, rtau, tau, ctx, tol):
    """``c`` with ``e^c = r1`` and ``e^(c tau) = rtau``, or None if there is none."""
    two_pi_i = 2j * ctx.pi
    L1 = ctx.log(r1)
    Lt = ctx.log(rtau)
    w = (L1 * tau - Lt) / two_pi_i
    n = int(ctx.nint(-w.imag / tau.imag))
    c = L1 + two_pi_i * n
    resid = (c * tau - Lt) / two_pi_i
    if abs(resid.imag) > tol or abs(resid.real - ctx.nint(resid.real)) > tol:
        return None
    return c


def _float_setup(field, tau):
    if isinstance(field, FloatField):
        ctx, tol = field.ctx, max(field.eps, 1e-40) * 1e3
    else:
        ctx, tol = mpmath.mp, 1e-10
    if tau is None:
        raise FormalError("BAD_INPUT", "a numeric tau is needed")
    tau = field.to_complex(tau, ctx) if hasattr(field, "to_complex") else ctx.mpc(tau)
    if tau.imag <= 0:
        raise FormalError("BAD_INPUT", "tau must have positive imaginary part")
    return ctx, tol, tau


# -- affine structure ---------------------------------------------------------

@dataclass
class AffineStructure:
    """``u(gamma) = c (e^(theta gamma) - 1)``, or ``c gamma`` when ``theta = 0``."""

    theta: Any
    c: Any
    u: dict
    k: int

    def to_json(self):
        def enc(x):
            return encode_coefficient(x) if not isinstance(x, complex) else {"re": repr(x.real), "im": repr(x.imag)}
        return {"kind": "affine_structure", "k": self.k, "theta": enc(self.theta), "c": enc(self.c),
                "u": {key: enc(v) for key, v in self.u.items()}}


def _discrepancies(repF, repG, k):
    us = {}
    parts = {}
    for name, f, g in zip(("1", "tau"), repF.generators, repG.generators):
        field = f.field.join(g.field)
        d = g @ f.inverse()
        if d.trunc < k + 1:
            raise FormalError("TRUNCATION_TOO_LOW", f"need truncation at least {k + 1}")
        if not field.eq(d[1], field.one) or any(not field.is_zero(d[j]) for j in range(2, k + 1)):
            raise FormalError("TANGENCY_MISMATCH", f"holonomies along {name} differ below order {k + 1}")
        us[name] = d[k + 1]
        parts[name] = f.linear_part
    return us, parts


def affine_structure(repF, repG, k, tau=None):
    """Affine structure ``(theta, c, u)`` of a pair with tangency ``k + 1``."""
    tau = tau if tau is not None else repF.tau
    field = repF.gen1.field.join(repG.gen1.field)
    us, parts = _discrepancies(repF, repG, k)
    unitary = all(field.eq(parts[g] ** k, field.one) for g in ("1", "tau"))
    if unitary:
        if tau is None:
            raise FormalError("BAD_INPUT", "a numeric tau is needed")
        theta = field.zero
        c = us["1"]
        if not field.eq(us["tau"], c * field.coerce(tau)):
            raise FormalError("INCONSISTENT_AFFINE", "u(tau) != c tau for theta = 0")
        return AffineStructure(theta, c, us, k)
    ctx, tol, tau_c = _float_setup(field, tau)
    e1 = ctx.mpc(field.to_complex(parts["1"], ctx)) ** (-k)
    et = ctx.mpc(field.to_complex(parts["tau"], ctx)) ** (-k)
    theta = _lattice_log(e1, et, tau_c, ctx, tol)
    if theta is None:
        raise FormalError("INCONSISTENT_AFFINE", "no theta with e^theta = a_1^-k and e^(theta tau) = a_tau^-k")
    u1 = ctx.mpc(field.to_complex(us["1"], ctx))
    ut = ctx.mpc(field.to_complex(us["tau"], ctx))
    d1, dt = ctx.exp(theta) - 1, ctx.exp(theta * tau_c) - 1
    c = u1 / d1 if abs(d1) > tol else ut / dt
    if abs(c * d1 - u1) > tol * max(1, abs(u1)) or abs(c * dt - ut) > tol * max(1, abs(ut)):
        raise FormalError("INCONSISTENT_AFFINE", "the two generators give different c")
    return AffineStructure(theta, c, us, k)


def compatibility_check(repF, repG, k, tau=None):
    """Check the order-``k+1`` compatibility rule; returns ``(ok, diagnostic)``.

    For ``k = 0`` the ratio of linear parts must be ``(e^alpha, e^(alpha tau))``
    for one complex ``alpha`` (the periods of ``alpha dx``).
    """
    tau = tau if tau is not None else repF.tau
    field = repF.gen1.field.join(repG.gen1.field)
    if k == 0:
        ratios = [g.linear_part / f.linear_part for f, g in zip(repF.generators, repG.generators)]
        if all(field.eq(r, field.one) for r in ratios):
            return False, "linear parts agree, so the tangency exceeds 1"
        try:
            ctx, tol, tau_c = _float_setup(field, tau)
        except FormalError as exc:
            return False, exc.message
        r = [ctx.mpc(field.to_complex(x, ctx)) for x in ratios]
        alpha = _lattice_log(r[0], r[1], tau_c, ctx, tol)
        if alpha is None:
            return False, "ratio of linear parts is not the exponential of the periods of a 1-form"
        return True, f"alpha = {ctx.nstr(alpha, 15)}"
    try:
        aff = affine_structure(repF, repG, k, tau)
    except FormalError as exc:
        return False, f"{exc.code}: {exc.message}"
    return True, f"theta = {aff.theta}, c = {aff.c}"


# -- the finite group acting on Lambda ---------------------------------------

def _orbit(Lambda, kp, field):
    if field.exact:
        conductor = kp
        for c in Lambda:
            low = minimal_form(c)
            if isinstance(low, Cyclo):
                conductor = _lcm(conductor, low.n)
        field = exact_field(conductor)
    mu = field.root_of_unity(kp) if kp > 1 else field.one
    Lambda = [field.coerce(c) for c in Lambda]
    out = []
    inv = field.inv(mu)
    for j in range(kp):
        nu = inv ** j
        out.append(tuple(field.coerce(c * nu ** i) for i, c in enumerate(Lambda)))
    return out, field


def _key(entry, field):
    if field.exact:
        width = euler_phi(field.conductor)
        key = []
        for c in entry:
            c = field.coerce(c)
            key.append(tuple(c.coeffs()) if isinstance(c, Cyclo) else (c,) + (0,) * (width - 1))
        return tuple(key)
    ctx = field.ctx
    digits = max(6, int(-ctx.log10(field.eps)) - 4)
    key = []
    for c in entry:
        if field.is_zero(c):
            key.append((0.0, 0.0))
        else:
            key.append((round(float(abs(c)), digits), round(float(ctx.arg(c)), digits)))
    return tuple(key)


def canonicalize_Lambda(Lambda, kp, field=None):
    """Orbit representative of ``Lambda`` under ``(lambda_i) -> (mu^-i lambda_i)``, ``mu^kp = 1``.

    Exact values are compared by their coordinates in ``Q(zeta_L)`` with ``L``
    the least common conductor of the orbit; floats by ``(|z|, arg z)``.
    """
    Lambda = tuple(Lambda)
    if field is None:
        field = common_field(*Lambda) if Lambda else exact_field(1)
    if len(Lambda) != kp:
        raise FormalError("BAD_INPUT", f"Lambda must have k' = {kp} entries")
    if all(field.is_zero(c) for c in Lambda):
        return tuple(field.zero for _ in Lambda)
    orbit, big = _orbit(Lambda, kp, field)
    best = min(orbit, key=lambda e: _key(e, big))
    return best


# -- classification -----------------------------------------------------------

@dataclass
class PairInvariants:
    """``(m, k, p, lam, Lambda)`` with ``Lambda`` canonical, and the case tag."""

    m: int
    k: int
    p: int
    lam: Any
    Lambda: tuple
    case: str
    field: Any = None

    @property
    def kprime(self):
        return self.k // self.m

    def matches(self, other, tol=None):
        """Equality of invariants; floats are compared with ``tol`` (default: the field's)."""
        if (self.m, self.k, self.p, self.case) != (other.m, other.k, other.p, other.case):
            return False
        field = self.field.join(other.field)
        if tol is None:
            eq = field.eq
        else:
            eq = lambda a, b: abs(field.coerce(a) - field.coerce(b)) <= tol * max(1, abs(field.coerce(a)))
        if not eq(field.coerce(self.lam), field.coerce(other.lam)):
            return False
        a = canonicalize_Lambda(self.Lambda, self.kprime, field)
        b = canonicalize_Lambda(other.Lambda, other.kprime, field)
        if field.exact:
            field = field.join(common_field(*a, *b))
            return all(field.coerce(x) == field.coerce(y) for x, y in zip(a, b))
        return all(eq(field.coerce(x), field.coerce(y)) for x, y in zip(a, b))

    def to_json(self):
        enc = encode_coefficient
        return {"kind": "pair_invariants", "case": self.case, "m": self.m, "k": self.k, "p": self.p,
                "lambda": enc(self.lam), "Lambda": [enc(c) for c in self.Lambda]}


def invariants_of_spec(spec):
    """The invariants a model neighborhood should have, for comparison."""
    case = FIBRATION_TRANSVERSE if spec.p < 0 else (LOGARITHMIC if spec.p == 0 else INTERMEDIATE)
    return PairInvariants(spec.m, spec.k, spec.p, spec.lam,
                          canonicalize_Lambda(spec.Lambda, spec.kprime, spec.field), case, spec.field)


def _power_is_identity(g, bound):
    field = g.field
    n = field.mul_order(g.linear_part, bound)
    return n is not None and (g ** n).is_identity(), n


def classify_pair(repF, repG, tau=None, bound=TORSION_BOUND):
    """Classify a pair of holonomy representations and return :class:`PairInvariants`."""
    tau = tau if tau is not None else (repF.tau if repF.tau is not None else repG.tau)
    for rep in (repF, repG):
        if not rep.commutes():
            raise FormalError("NONABELIAN", "generators do not commute at the truncation")
    field = repF.gen1.field.join(repG.gen1.field)
    try:
        nf = normalize_germ(repF.gentau, bound, periodic=True)
    except FormalError as exc:
        if exc.code == "PERIODIC":
            raise FormalError("NOT_F0_TYPE", "holonomy along tau has finite order") from exc
        raise
    if nf.kind != "RESONANT":
        raise FormalError("NOT_F0_TYPE", "holonomy along tau is linearizable")
    if not field.eq(nf.scale, field.one):
        raise FormalError("BACKEND_MISMATCH", "the normalizing k-th root is not in the coefficient field")
    k, lam, h = nf.k, nf.lam, nf.normalizer
    # the normalizer is pinned down only through order N - k
    top = h.trunc - k

    def conj(g):
        return conjugate(g.with_field(field), h).truncate(top)

    F = HolRep(conj(repF.gen1), conj(repF.gentau), tau)
    a1, t1 = extract_time(F.gen1, k, lam)
    if not field.is_zero(t1):
        raise FormalError("NOT_F0_TYPE", "holonomy along 1 is not torsion", time=t1)
    atau = F.gentau.linear_part
    m = _lcm(field.mul_order(a1, bound), field.mul_order(atau, bound))
    kp = k // m
    G = HolRep(conj(repG.gen1), conj(repG.gentau), tau)
    b = [g.linear_part for g in G.generators]
    ratios = [field.coerce(b[0] / a1), field.coerce(b[1] / atau)]
    zero = field.zero
    if all(field.eq(r, field.one) for r in ratios):
        trivial = []
        for g in G.generators:
            ok, n = _power_is_identity(g, bound)
            trivial.append((ok, n))
        if all(ok for ok, _ in trivial):
            return PairInvariants(m, k, -1, lam, tuple(zero for _ in range(kp)), FIBRATION_TRANSVERSE, field)
        if not trivial[0][0]:
            n = trivial[0][1]
            vG = formal_log(G.gen1 ** n).scale(field.inv(field.coerce(n)))
        else:
            if tau is None:
                raise FormalError("BAD_INPUT", "a numeric tau is needed")
            n = trivial[1][1]
            vG = formal_log(G.gentau ** n).scale(field.inv(field.coerce(n) * field.coerce(tau)))
        B = dual_form(vG)
        if B.trunc < -1:
            # the residue of B needs vG through y^(2p+1)
            raise FormalError("TRUNCATION_TOO_LOW",
                              f"truncation {top} cannot resolve the residue of the second foliation")
        Lam = [zero] * kp
        for e, c in B.principal_part().items():
            i, r = divmod(-e - 1, m)
            if r or i >= kp:
                raise FormalError("NOT_IN_MODEL", f"unexpected pole y^{e} in the dual form of the second foliation")
            Lam[i] = c
        if not field.is_zero(B.residue()):
            Lam[0] = B.residue()
        deg = max(i for i in range(kp) if not field.is_zero(Lam[i]))
        p = m * deg
        if not 0 < p < k:
            raise FormalError("NOT_IN_MODEL", f"tangency parameter p={p} out of range")
        nt = field.mul_order(atau, bound)
        if tau is not None and not flow(vG, field.coerce(tau) * nt).agrees_with(G.gentau ** nt):
            raise FormalError("NOT_IN_MODEL", "holonomy along tau is not in the flow of the second foliation")
        Lam = [field.coerce(c) for c in Lam]
        return PairInvariants(m, k, p, lam, canonicalize_Lambda(Lam, kp, field), INTERMEDIATE, field)
    if any(field.mul_order(r, bound) is not None for r in ratios):
        raise FormalError("NOT_IN_MODEL", "ratio of linear parts is a nontrivial root of unity")
    if field.exact:
        raise FormalError("NO_EXACT_EXPONENTIAL", "a logarithmic second foliation needs the float backend")
    ctx, tol, tau_c = _float_setup(field, tau)
    c = _lattice_log(ratios[0], ratios[1], tau_c, ctx, tol)
    if c is None:
        raise FormalError("NOT_IN_MODEL", "ratios of linear parts are not (e^c, e^(c tau))")
    Lam = [field.coerce(1 / c)] + [zero] * (kp - 1)
    return PairInvariants(m, k, 0, lam, tuple(Lam), LOGARITHMIC, field)
