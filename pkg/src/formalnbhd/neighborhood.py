"""Neighborhoods of an elliptic curve given on the universal cover.

A neighborhood is the quotient of a germ of ``C_x x (C_y, 0)`` along
``{y = 0}`` by two commuting maps

    Phi(x, y) = (x + shift + drift(y), vert(y))

whose shifts ``1`` and ``tau`` generate the lattice of the curve.  The
normal-form models are built from ``(a1, atau, k, lam, Lambda)``:

    Phi_1   = (x + 1, a1 y)
    Phi_tau = (x + tau + g(y), atau phi(y)),   phi = exp(v_{k,lam}),
    g       = primitive((atau phi)^* w_Lambda - w_Lambda),
    w_Lambda = P(1 / y^m) dy / y,  P(z) = sum_i Lambda_i z^i.

They carry the pencil of closed forms ``w_t = w_0 + t w_inf`` with
``w_0 = dy / y^(k+1) + lam dy / y`` and ``w_inf = dx - w_Lambda``.
"""

from dataclasses import dataclass
from math import gcd
from typing import Any

from .coefficients import QQ, common_field, decode_coefficient, encode_coefficient, exact_field
from .errors import FormalError
from .flows import MForm, VField, dual_field, flow, model_form, pullback
from .germs import Germ
from .normalform import HolRep, extract_time
from .series import LSeries, PSeries, compose

INFINITY = "INFINITY"


def _lcm(a, b):
    return a * b // gcd(a, b)


def _is_infinity(t):
    return isinstance(t, str) and t.upper() in ("INFINITY", "INF", "OO")


@dataclass
class ModelSpec:
    """Parameters ``(a1, atau, k, lam, Lambda)`` of a normal-form neighborhood.

    ``tau`` is the lattice parameter; it may be None when only the
    presentation (not holonomy at nonzero pencil parameter) is needed.
    """

    a1: Any
    atau: Any
    k: int
    lam: Any
    Lambda: tuple = ()
    tau: Any = None
    field: Any = None

    def __post_init__(self):
        values = [self.a1, self.atau, self.lam, *self.Lambda]
        if self.tau is not None:
            values.append(self.tau)
        if self.field is None:
            self.field = common_field(*values)
        f = self.field
        self.a1, self.atau, self.lam = f.coerce(self.a1), f.coerce(self.atau), f.coerce(self.lam)
        self.tau = None if self.tau is None else f.coerce(self.tau)
        if not isinstance(self.k, int) or self.k < 1:
            raise FormalError("BAD_INPUT", "k must be a positive integer")
        m1 = f.mul_order(self.a1, 4 * self.k)
        mt = f.mul_order(self.atau, 4 * self.k)
        if m1 is None or mt is None:
            raise FormalError("BAD_INPUT", "a1 and atau must be roots of unity of order dividing k")
        self.m = _lcm(m1, mt)
        if self.k % self.m:
            raise FormalError("BAD_INPUT", f"group order {self.m} does not divide k={self.k}")
        kp = self.k // self.m
        lam_ = [f.coerce(c) for c in self.Lambda]
        if len(lam_) > kp:
            if any(not f.is_zero(c) for c in lam_[kp:]):
                raise FormalError("BAD_INPUT", f"Lambda has at most k' = {kp} entries")
            lam_ = lam_[:kp]
        self.Lambda = tuple(lam_ + [f.zero] * (kp - len(lam_)))

    @property
    def kprime(self):
        return self.k // self.m

    @property
    def degree(self):
        """Degree of ``P``, or -1 when ``Lambda = 0``."""
        for i in range(len(self.Lambda) - 1, -1, -1):
            if not self.field.is_zero(self.Lambda[i]):
                return i
        return -1

    @property
    def p(self):
        d = self.degree
        return -1 if d < 0 else self.m * d

    def with_field(self, field):
        return ModelSpec(self.a1, self.atau, self.k, self.lam, self.Lambda, self.tau, field)

    def to_json(self):
        enc = lambda x: encode_coefficient(x, self.field)
        out = {"a1": enc(self.a1), "atau": enc(self.atau), "m": self.m, "k": self.k,
               "lambda": enc(self.lam), "Lambda": [enc(c) for c in self.Lambda]}
        if self.tau is not None:
            out["tau"] = enc(self.tau)
        return out

    @classmethod
    def from_json(cls, obj, field=None):
        try:
            dec = lambda x: decode_coefficient(x, field)
            tau = obj.get("tau")
            spec = cls(dec(obj["a1"]), dec(obj["atau"]), int(obj["k"]), dec(obj.get("lambda", 0)),
                       tuple(dec(c) for c in obj.get("Lambda", [])),
                       None if tau is None else dec(tau), field)
        except KeyError as exc:
            raise FormalError("BAD_INPUT", f"model spec is missing {exc}") from exc
        if "m" in obj and int(obj["m"]) != spec.m:
            raise FormalError("BAD_INPUT", f"declared m={obj['m']} but the linear parts give {spec.m}")
        return spec


@dataclass
class Generator:
    """The map ``(x, y) -> (x + p + q tau + drift(y), vert(y))`` with ``shift = (p, q)``."""

    shift: tuple
    drift: PSeries
    vert: Germ

    def __post_init__(self):
        if not self.drift.field.is_zero(self.drift[0]):
            raise FormalError("BAD_INPUT", "drift must vanish at y = 0")

    @property
    def trunc(self):
        return min(self.drift.trunc, self.vert.trunc)

    def __matmul__(self, other):
        # self o other
        drift = other.drift + compose(self.drift, other.vert.series)
        return Generator((self.shift[0] + other.shift[0], self.shift[1] + other.shift[1]),
                         drift, self.vert @ other.vert)

    def inverse(self):
        vinv = self.vert.inverse()
        return Generator((-self.shift[0], -self.shift[1]), -compose(self.drift, vinv.series), vinv)

    def agrees_with(self, other):
        return (tuple(self.shift) == tuple(other.shift) and self.drift.agrees_with(other.drift)
                and self.vert.agrees_with(other.vert))

    def to_json(self):
        return {"shift": list(self.shift), "drift": self.drift.to_json(), "vert": self.vert.to_json()}

    @classmethod
    def from_json(cls, obj, field=None):
        shift = obj["shift"]
        if isinstance(shift, str):
            shift = {"1": (1, 0), "tau": (0, 1)}[shift]
        return cls(tuple(int(s) for s in shift), PSeries.from_json(obj["drift"], field),
                   Germ.from_json(obj["vert"], field))


@dataclass
class Presentation:
    """Two commuting generators over the lattice ``Z + tau Z``."""

    gen1: Generator
    gentau: Generator
    tau: Any = None

    @property
    def trunc(self):
        return min(self.gen1.trunc, self.gentau.trunc)

    @property
    def field(self):
        return self.gen1.vert.field

    @property
    def generators(self):
        return (self.gen1, self.gentau)

    def commutes(self):
        return (self.gen1 @ self.gentau).agrees_with(self.gentau @ self.gen1)

    def to_json(self):
        return {"tau": None if self.tau is None else encode_coefficient(self.tau, self.field),
                "gen1": self.gen1.to_json(), "gen_tau": self.gentau.to_json(), "trunc": self.trunc}

    @classmethod
    def from_json(cls, obj, field=None):
        tau = obj.get("tau")
        return cls(Generator.from_json(obj["gen1"], field), Generator.from_json(obj["gen_tau"], field),
                   None if tau is None else decode_coefficient(tau, field))


@dataclass
class CoverForm:
    """The closed form ``dx_coeff dx + B(y) dy`` on the cover."""

    dx_coeff: Any
    dy_part: MForm

    def to_json(self):
        f = self.dy_part.field
        return {"kind": "cover_form", "dx": encode_coefficient(self.dx_coeff, f),
                "dy": self.dy_part.to_json()}


def lambda_form(spec, trunc):
    """``w_Lambda = sum_i Lambda_i y^(-m i - 1) dy``."""
    f = spec.field
    m = spec.m
    start = -m * max(spec.degree, 0) - 1
    coeffs = [f.zero] * (-start)
    for i, c in enumerate(spec.Lambda):
        if not f.is_zero(c):
            coeffs[-m * i - 1 - start] = c
    return MForm(LSeries(coeffs, trunc, start=start, field=f))


def lambda_field(spec, trunc):
    """The dual field ``v_Lambda = y / P(1/y^m) d/dy``."""
    if spec.degree < 0:
        raise FormalError("BAD_INPUT", "Lambda = 0 has no dual field")
    return _trimmed_dual(lambda_form(spec, trunc), trunc)


def _trimmed_dual(w, trunc):
    v = dual_field(w)
    if v.trunc > trunc:
        v = VField(v.series.truncate(trunc))
    return v


def _model_flow(spec, trunc):
    return flow(_trimmed_dual(model_form(spec.k, spec.lam, trunc, spec.field), trunc), 1)


def drift_integrand(spec, trunc):
    """``(atau phi)^* w_Lambda - w_Lambda`` for the model's vertical map ``atau phi``."""
    w = lambda_form(spec, trunc)
    vert = spec.atau * _model_flow(spec, trunc)
    return pullback(w, vert) - w


def build_model(spec, trunc):
    """The normal-form presentation of ``spec`` truncated at ``trunc``."""
    if trunc < 2 * spec.k + 2:
        raise FormalError("TRUNCATION_TOO_LOW", f"need truncation at least 2k+2 = {2 * spec.k + 2}")
    f = spec.field
    # the pullback of a form with a pole of order p+1 loses p+1 orders
    work = trunc + max(spec.p, 0) + 2
    vert = (spec.atau * _model_flow(spec, work)).truncate(trunc)
    if spec.degree < 0:
        drift = PSeries([], trunc, field=f)
    else:
        integrand = drift_integrand(spec, work).series
        if integrand.principal_part() or not f.is_zero(integrand.residue()):
            raise FormalError("INTEGRAND_NOT_HOLOMORPHIC", "drift integrand has a pole")
        drift = integrand.primitive().as_pseries().truncate(trunc)
    pres = Presentation(Generator((1, 0), PSeries([], trunc, field=f), Germ.linear(spec.a1, trunc, f)),
                        Generator((0, 1), drift, vert), spec.tau)
    if not pres.commutes():
        raise FormalError("COMMUTATION_FAILURE", "model generators do not commute")
    return pres


def pencil_form(spec, t, trunc=None):
    """``w_0 + t w_inf`` (or ``w_inf`` for ``t = INFINITY``) as a cover form."""
    f = spec.field
    N = trunc if trunc is not None else 2 * spec.k + 2
    wl = lambda_form(spec, N)
    if _is_infinity(t):
        return CoverForm(f.one, -wl)
    t = f.coerce(t)
    w0 = model_form(spec.k, spec.lam, N, f)
    return CoverForm(t, w0 - wl.scale(t) if not f.is_zero(t) else w0)


def pencil_invariance_check(pres, w):
    """True iff both generators pull ``w`` back to itself at the truncation."""
    A = w.dx_coeff
    B = w.dy_part.series
    for g in pres.generators:
        pulled = B.substitute(g.vert.series) * g.vert.series.derivative()
        if not g.drift.field.is_zero(A):
            pulled = pulled + g.drift.derivative().scale(A)
        top = min(pulled.trunc, B.trunc)
        if not pulled.agrees_with(B, top):
            return False
    return True


def _times(spec, t):
    # flow times of the two loops: sigma_0 + t sigma_inf with sigma_0 = (0, 1), sigma_inf = (1, tau)
    f = spec.field
    if f.is_zero(t):
        return f.zero, f.one
    if spec.tau is None:
        raise FormalError("BAD_INPUT", "a numeric tau is needed for this pencil parameter")
    return t, f.one + t * spec.tau


def holonomy(pres, spec, t):
    """Holonomy of the pencil member ``w_t = 0`` on the transversal ``{x = 0}``."""
    f = spec.field
    N = pres.trunc
    if _is_infinity(t):
        if spec.degree < 0:
            return HolRep(Germ.linear(spec.a1, N, f), Germ.linear(spec.atau, N, f), spec.tau)
        if spec.tau is None:
            raise FormalError("BAD_INPUT", "a numeric tau is needed for the holonomy at infinity")
        v = lambda_field(spec, N)
        return HolRep(spec.a1 * flow(v, 1), spec.atau * flow(v, spec.tau), spec.tau)
    t = f.coerce(t)
    w = pencil_form(spec, t, N).dy_part
    v = _trimmed_dual(w, N)
    s1, stau = _times(spec, t)
    return HolRep(spec.a1 * flow(v, s1), spec.atau * flow(v, stau), spec.tau)


def pencil_slope(spec, t, trunc):
    """The slope ``dy/dx = -t / B_t(y)`` of the member ``w_t`` as a power series."""
    w = pencil_form(spec, t, trunc)
    f = spec.field
    if f.is_zero(w.dx_coeff):
        return PSeries([], trunc, field=f)
    s = w.dy_part.series.inverse().scale(-w.dx_coeff).as_pseries()
    return s.truncate(trunc) if s.trunc > trunc else s


def period_of(germ, k, lam):
    """The flow time of an element of ``E_{k,lam}``."""
    return extract_time(germ, k, lam)[1]


def fibration_model(n, a1, atau, trunc=None, tau=None):
    """The neighborhood ``(x + 1, a1 y), (x + tau + y^n, atau y)``; needs ``a1^n = 1``."""
    if not isinstance(n, int) or n < 1:
        raise FormalError("BAD_INPUT", "n must be a positive integer")
    N = trunc if trunc is not None else max(n + 2, 4)
    f = common_field(a1, atau) if tau is None else common_field(a1, atau, tau)
    a1, atau = f.coerce(a1), f.coerce(atau)
    if not f.eq(a1 ** n, f.one):
        raise FormalError("COMMUTATION_FAILURE", f"a1^{n} != 1, the generators cannot commute")
    drift = PSeries([f.zero] * n + [f.one], N, field=f)
    pres = Presentation(Generator((1, 0), PSeries([], N, field=f), Germ.linear(a1, N, f)),
                        Generator((0, 1), drift, Germ.linear(atau, N, f)), tau)
    if not pres.commutes():
        raise FormalError("COMMUTATION_FAILURE", "generators do not commute")
    return pres


def involution_root(k, field=QQ):
    """``xi = exp(pi i / k)``, so that ``xi^k = -1``; the field is enlarged if needed."""
    field = field.join(exact_field(2 * k)) if field.exact else field
    return field, field.root_of_unity(2 * k)


def involution(spec):
    """Parameters after the automorphism ``(x, y) -> (-x, xi y)`` with ``xi = exp(pi i / k)``."""
    field, xi = involution_root(spec.k, spec.field)
    m = spec.m
    lam_ = tuple(-(xi ** (-m * i)) * c for i, c in enumerate(spec.Lambda))
    tau = None if spec.tau is None else spec.tau
    return ModelSpec(field.inv(field.coerce(spec.a1)), field.inv(field.coerce(spec.atau)), spec.k,
                     -spec.lam, lam_, tau, field)


def involution_transport(rep, k):
    """Transport a holonomy pair through ``(x, y) -> (-x, xi y)``.

    The loops ``1, tau`` become ``-1, -tau``, so each image is inverted.
    """
    field, xi = involution_root(k, rep.gen1.field)
    N = rep.trunc
    s = Germ.linear(xi, N, field)
    sinv = Germ.linear(field.inv(xi), N, field)
    out = [s @ g.with_field(field).inverse() @ sinv for g in rep.generators]
    return HolRep(out[0], out[1], rep.tau)


def involution_presentation(pres, k):
    """Transport the generators of a presentation through the involution."""
    field, xi = involution_root(k, pres.field)
    N = pres.trunc
    s = Germ.linear(xi, N, field)
    sinv = Germ.linear(field.inv(xi), N, field)
    out = []
    for g in pres.generators:
        drift = g.drift.with_field(field)
        vert = g.vert.with_field(field)
        conj = Generator((-g.shift[0], -g.shift[1]), -compose(drift, sinv.series), s @ vert @ sinv)
        out.append(conj.inverse())
    return Presentation(out[0], out[1], pres.tau)


def cross_ratio(t1, t2, t3, t):
    """The value ``c`` for which :func:`cross_ratio_slope` of ``s_{t1}, s_{t2}, s_{t3}`` is ``s_t``."""
    return (t - t1) * (t2 - t3) / ((t - t3) * (t2 - t1))


def cross_ratio_slope(s1, s2, s3, c):
    """``(s1 (s2 - s3) - c s3 (s2 - s1)) / ((s2 - s3) - c (s2 - s1))``.

    The result loses as many orders as the valuation of the denominator.
    """
    field = s1.field.join(s2.field).join(s3.field)
    c = field.coerce(c)
    d23 = s2 - s3
    d21 = s2 - s1
    den = d23 - d21.scale(c)
    if den.is_zero():
        raise FormalError("DEGENERATE_CROSS_RATIO", "denominator vanishes identically")
    num = s1 * d23 - (s3 * d21).scale(c)
    q = num * den.inverse()
    try:
        return q.as_pseries()
    except FormalError as exc:
        raise FormalError("DEGENERATE_CROSS_RATIO", "recombined slope has a pole") from exc
