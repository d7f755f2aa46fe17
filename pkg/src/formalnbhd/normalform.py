"""Formal normal forms of single germs and of commuting pairs of germs.

Every formal diffeomorphism ``f`` of (C, 0) is conjugate to exactly one of

* ``a y`` (linearizable), or
* ``a exp(v_{k,lam})`` with ``a^k = 1`` and ``v_{k,lam} = y^(k+1) / (1 + lam y^k) d/dy``.

In the second case ``k`` and ``lam`` are read from ``v = log(f^m)`` where ``m``
is the order of ``a``: ``k + 1`` is the valuation of ``v`` and ``lam / m`` is
the residue of the dual form ``dy / v``.  The conjugating germ is solved from
the integrated identity ``h^*(dual of m v_{k,lam}) = dy / v``, then checked.

A commuting pair is put in the model group
``E_{k,lam} = {a exp(t v_{k,lam}) : a^k = 1}`` or the linear group, or is
recognized as a finite group.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Optional

from .coefficients import decode_coefficient, encode_coefficient
from .errors import FormalError
from .flows import dual_form, flow, formal_log, model_field
from .germs import Germ, commutator_is_trivial, conjugate
from .series import PSeries, monomial

TORSION_BOUND = 64
INFINITE = "INFINITE"


def unit_power(S, alpha):
    """``S ** alpha`` for a power series with ``S(0) = 1`` and rational ``alpha``.

    Uses the recurrence obtained from ``S R' = alpha S' R``.
    """
    field = S.field
    if not field.eq(S[0], field.one):
        raise FormalError("BAD_INPUT", "unit_power needs constant term 1")
    N = S.trunc
    p = S.coeffs
    r = [field.one] + [field.zero] * N
    a1 = alpha + 1
    for n in range(1, N + 1):
        acc = field.zero
        for j in range(1, n + 1):
            if p[j]:
                acc += (a1 * j - n) * p[j] * r[n - j]
        r[n] = acc * Fraction(1, n)
    return PSeries._raw(field, 0, N, r)


def _powers_table(f):
    # rows[i][j] = coefficient of y^j in f(y)^i, for 0 <= i, j <= N
    N = f.trunc
    field = f.field
    fs = f.series.coeffs
    rows = [[field.one] + [field.zero] * N, list(fs)]
    for i in range(2, N + 1):
        prev = rows[-1]
        nxt = [field.zero] * (N + 1)
        for p in range(i - 1, N + 1):
            x = prev[p]
            if not x:
                continue
            for q in range(1, N + 1 - p):
                c = fs[q]
                if c:
                    nxt[p + q] += x * c
        rows.append(nxt)
    return rows


@dataclass
class DiffeoNF:
    """Normal form of one germ: ``kind`` is "LINEAR" or "RESONANT".

    ``normalizer`` is the germ ``h`` with ``h o f o h^-1`` equal to the model
    ``a y`` or ``a exp(scale-rescaled v_{k,lam})``.  ``scale`` is 1 unless the
    exact backend lacks the k-th root needed to reach the unit-time model.
    """

    kind: str
    a: Any
    normalizer: Germ
    k: Optional[int] = None
    lam: Any = None
    m: Optional[int] = None
    scale: Any = 1
    warning: Optional[str] = None

    def model(self):
        h = self.normalizer
        if self.kind == "LINEAR":
            return Germ.linear(self.a, h.trunc, h.field)
        u = model_field(self.k, self.lam, h.trunc, h.field, scale=self.scale)
        return self.a * flow(u, 1)

    @property
    def invariants(self):
        if self.kind == "LINEAR":
            return ("LINEAR", self.a)
        return ("RESONANT", self.a, self.k, self.lam)

    def to_json(self):
        f = self.normalizer.field
        out = {"kind": self.kind, "a": encode_coefficient(self.a, f),
               "normalizer": self.normalizer.to_json()}
        if self.kind == "RESONANT":
            out.update({"k": self.k, "lambda": encode_coefficient(self.lam, f), "m": self.m,
                        "scale": encode_coefficient(self.scale, f)})
        if self.warning:
            out["warning"] = self.warning
        return out

    @classmethod
    def from_json(cls, obj):
        h = Germ.from_json(obj["normalizer"])
        f = h.field
        dec = lambda x: decode_coefficient(x, f)
        if obj["kind"] == "LINEAR":
            return cls("LINEAR", dec(obj["a"]), h, warning=obj.get("warning"))
        return cls("RESONANT", dec(obj["a"]), h, k=obj["k"], lam=dec(obj["lambda"]), m=obj["m"],
                   scale=dec(obj.get("scale", 1)), warning=obj.get("warning"))


def _conjugates_to(f, h, target):
    """Check ``h f h^-1 = target``.

    On the float backend the rounding error at order ``e`` grows like
    ``R^e`` with ``R`` the growth rate of the coefficients of ``f`` and ``h``,
    so the tolerance is scaled by it.
    """
    g = conjugate(f, h)
    field = f.field
    if field.exact:
        return g.agrees_with(target)
    R = 1
    for germ in (f, h):
        for e in range(2, germ.trunc + 1):
            c = abs(germ[e])
            if c:
                R = max(R, float(c) ** (1.0 / (e - 1)))
    eps = float(field.eps)
    for e in range(1, min(g.trunc, target.trunc) + 1):
        tol = eps * 16 * e * e * R ** (e - 1)
        if abs(g[e] - target[e]) > tol * max(1, abs(target[e])):
            return False
    return True


def _linearizer(f):
    """Solve ``h o f = a h`` order by order; needs ``a^j != a`` for every j >= 2."""
    field = f.field
    a = f.linear_part
    N = f.trunc
    rows = _powers_table(f)
    h = [field.zero, field.one] + [field.zero] * (N - 1)
    for j in range(2, N + 1):
        den = rows[j][j] - a
        if field.is_zero(den):
            raise FormalError("RESONANT_LINEAR_PART", f"a^{j} = a blocks linearization at order {j}")
        acc = field.zero
        for i in range(1, j):
            if h[i] and rows[i][j]:
                acc += h[i] * rows[i][j]
        h[j] = -acc / den
    return Germ(PSeries._raw(field, 0, N, h))


def _resonant_normalizer(f, a, m, v, k, lam, scale, s):
    """Germ ``h`` with ``h o f o h^-1 = a exp(u)``, ``u = model_field(k, lam, scale)``."""
    field = f.field
    N = f.trunc
    B = dual_form(v).series
    res = B.residue()
    G = (B - monomial(res, -1, B.trunc, field)).primitive()
    # y^k (G + C - (lam/m) log W) with the constant C fixed afterwards by the tie-break
    base = G.shift(k).as_pseries().scale(-k * m * scale)
    log_w = PSeries._raw(field, 0, base.trunc, [field.zero] * (base.trunc + 1))
    W = None
    for _ in range(base.trunc // k + 3):
        Q = base + log_w.shift(k).scale(k * lam * scale) if lam else base
        W = unit_power(Q.scale(field.inv(Q[0])), Fraction(-1, k)).scale(s)
        if not lam:
            break
        new_log = (W.derivative() * W.inverse()).primitive().as_pseries()
        if new_log.agrees_with(log_w):
            break
        log_w = new_log
    known = W.trunc + 1
    h0 = Germ(PSeries._raw(field, 0, N, [field.zero] + W.coeffs[: N] + [field.zero] * max(0, N - known)))
    u = model_field(k, lam, N, field, scale=scale)
    target = a * flow(u, 1)
    err = (conjugate(f, h0).series - target.series)
    fix = [field.zero, field.one] + [field.zero] * (N - 1)
    for j in range(2, N + 1):
        if field.is_zero(err[j]):
            continue
        den = a ** j - a
        if j <= known or field.is_zero(den):
            raise FormalError("NORMALIZATION_FAILED", f"residual conjugation error at order {j}")
        fix[j] = -err[j] / den
    h = Germ(PSeries._raw(field, 0, N, fix)) @ h0
    # tie-break inside the centralizer: zero coefficient of y^(k+1)
    shift = -h[k + 1] / (scale * s ** (k + 1))
    if not field.is_zero(shift):
        h = flow(u, shift) @ h
    if not _conjugates_to(f, h, target):
        raise FormalError("NORMALIZATION_FAILED", "normalizer does not conjugate to the model")
    return h


def normalize_germ(f, bound=TORSION_BOUND, periodic=False):
    """Conjugate ``f`` to its formal model and return a :class:`DiffeoNF`.

    ``periodic=True`` certifies that an ``f`` with ``f^m = id`` at the
    truncation is truly of finite order; this raises ``PERIODIC``.
    Without the certificate such a germ raises ``TRUNCATION_TOO_LOW``.
    """
    if not isinstance(f, Germ):
        raise FormalError("BAD_INPUT", "normalize_germ expects a Germ")
    field = f.field
    a = f.linear_part
    N = f.trunc
    if f.is_identity():
        if periodic:
            raise FormalError("PERIODIC", "f is the identity", order=1)
        raise FormalError("IDENTITY", "the identity has no normal form to compute")
    if f.is_linear():
        return DiffeoNF("LINEAR", a, Germ.identity(N, field))
    m = field.mul_order(a, bound)
    if m is None:
        warning = None if field.exact else f"no torsion order found up to {bound}"
        h = _linearizer(f)
        if not _conjugates_to(f, h, Germ.linear(a, N, field)):
            raise FormalError("NORMALIZATION_FAILED", "linearizer check failed")
        return DiffeoNF("LINEAR", a, h, warning=warning)
    g = f ** m
    if g.is_identity():
        if periodic:
            raise FormalError("PERIODIC", f"f has finite order {m}", order=m)
        raise FormalError("TRUNCATION_TOO_LOW",
                          f"f^{m} is the identity up to y^{N}; cannot tell a periodic germ from k > {N}")
    v = formal_log(g)
    k = v.valuation() - 1
    if k % m:
        raise FormalError("INCONSISTENT_TORSION", f"valuation {k + 1} of log f^{m} is not 1 mod {m}")
    if N < 2 * k + 1:
        raise FormalError("TRUNCATION_TOO_LOW", f"need truncation at least {2 * k + 1} to read lambda")
    lam = field.coerce(m * dual_form(v).residue())
    cv = v[k + 1]
    s = field.kth_root(cv / m, k)
    scale = field.one
    if s is None:
        s, scale = field.one, cv / m
    h = _resonant_normalizer(f, a, m, v, k, lam, scale, s)
    return DiffeoNF("RESONANT", a, h, k=k, lam=lam, m=m, scale=scale)


def extract_time(f, k, lam, scale=1):
    """``(a, t)`` with ``f = a exp(t v_{k,lam})`` at the truncation of ``f``."""
    field = f.field
    a = f.linear_part
    if not field.eq(a ** k, field.one):
        raise FormalError("NOT_IN_MODEL", "linear part is not a k-th root of unity")
    if f.trunc < k + 1:
        raise FormalError("TRUNCATION_TOO_LOW", f"need truncation at least {k + 1}")
    scale = field.coerce(scale)
    t = field.coerce(f[k + 1] / a / scale)
    u = model_field(k, lam, f.trunc, field, scale=scale)
    if not (a * flow(u, t)).agrees_with(f):
        raise FormalError("NOT_IN_MODEL", "germ is not in the model group E_{k,lam}")
    return a, t


@dataclass
class HolRep:
    """Images of the two lattice generators ``1`` and ``tau`` of a representation."""

    gen1: Germ
    gentau: Germ
    tau: Any = None

    def __post_init__(self):
        if self.gen1.trunc != self.gentau.trunc:
            N = min(self.gen1.trunc, self.gentau.trunc)
            self.gen1, self.gentau = self.gen1.truncate(N), self.gentau.truncate(N)
        field = self.gen1.field.join(self.gentau.field)
        if field != self.gen1.field or field != self.gentau.field:
            self.gen1, self.gentau = self.gen1.with_field(field), self.gentau.with_field(field)

    @property
    def trunc(self):
        return self.gen1.trunc

    @property
    def generators(self):
        return (self.gen1, self.gentau)

    def conjugate(self, h):
        return HolRep(conjugate(self.gen1, h), conjugate(self.gentau, h), self.tau)

    def commutes(self):
        return commutator_is_trivial(self.gen1, self.gentau)

    def to_json(self):
        out = {"kind": "holonomy", "gen1": self.gen1.to_json(), "gen_tau": self.gentau.to_json()}
        out["tau"] = None if self.tau is None else encode_coefficient(self.tau)
        return out

    @classmethod
    def from_json(cls, obj, field=None):
        tau = obj.get("tau")
        return cls(Germ.from_json(obj["gen1"], field), Germ.from_json(obj["gen_tau"], field),
                   None if tau is None else decode_coefficient(tau, field))


@dataclass
class PairNF:
    """Normal form of a commuting pair.

    ``kind`` is "LINEAR_PAIR", "RESONANT_PAIR" or "FINITE".  ``parts`` are
    the linear parts, ``times`` the flow times in ``E_{k,lam}``.
    """

    kind: str
    parts: tuple
    normalizer: Germ
    k: Optional[int] = None
    lam: Any = None
    times: tuple = ()
    scale: Any = 1
    certified: bool = True
    extra: dict = dc_field(default_factory=dict)

    @property
    def invariants(self):
        if self.kind == "RESONANT_PAIR":
            return (self.kind, self.k, self.lam, self.times, self.parts)
        return (self.kind, self.parts)

    def to_json(self):
        f = self.normalizer.field
        enc = lambda x: encode_coefficient(x, f)
        out = {"kind": self.kind, "parts": [enc(x) for x in self.parts],
               "normalizer": self.normalizer.to_json()}
        if self.kind == "RESONANT_PAIR":
            out.update({"k": self.k, "lambda": enc(self.lam), "times": [enc(t) for t in self.times],
                        "scale": enc(self.scale)})
        if self.kind == "FINITE":
            out["certified"] = self.certified
        return out


def _finite_linearizer(gens):
    # average lin(g)^-1 g over the group generated by two torsion germs
    field = gens[0].field
    N = gens[0].trunc
    orders = []
    for g in gens:
        m = field.mul_order(g.linear_part, TORSION_BOUND)
        if m is None:
            raise FormalError("NOT_FINITE", "generator is not torsion")
        orders.append(m)
    total = PSeries._raw(field, 0, N, [field.zero] * (N + 1))
    count = 0
    p = Germ.identity(N, field)
    for _ in range(orders[0]):
        q = p
        for _ in range(orders[1]):
            total = total + q.series.scale(field.inv(q.linear_part))
            count += 1
            q = gens[1] @ q
        p = gens[0] @ p
    return Germ(total.scale(Fraction(1, count)))


def normalize_pair(rep, bound=TORSION_BOUND):
    """Simultaneous normal form of a commuting pair (see :class:`PairNF`)."""
    if not rep.commutes():
        raise FormalError("NONABELIAN", "generators do not commute at the truncation")
    field = rep.gen1.field
    N = rep.trunc
    forms = []
    for g in rep.generators:
        try:
            forms.append(normalize_germ(g, bound, periodic=True))
        except FormalError as exc:
            if exc.code != "PERIODIC":
                raise
            forms.append(None)
    for nf in forms:
        if nf is not None and nf.kind == "RESONANT":
            h = nf.normalizer
            times = []
            parts = []
            for g in rep.generators:
                # the normalizer is pinned down only through order N - k
                a, t = extract_time(conjugate(g, h).truncate(N - nf.k), nf.k, nf.lam, nf.scale)
                parts.append(a)
                times.append(t)
            return PairNF("RESONANT_PAIR", tuple(parts), h, k=nf.k, lam=nf.lam,
                          times=tuple(times), scale=nf.scale)
    for nf in forms:
        if nf is not None and field.mul_order(nf.a, bound) is None:
            h = nf.normalizer
            parts = tuple(g.linear_part for g in rep.generators)
            for g, a in zip(rep.generators, parts):
                if not _conjugates_to(g, h, Germ.linear(a, N, field)):
                    raise FormalError("NORMALIZATION_FAILED", "common linearizer check failed")
            return PairNF("LINEAR_PAIR", parts, h)
    h = _finite_linearizer(rep.generators)
    parts = tuple(g.linear_part for g in rep.generators)
    certified = all(_conjugates_to(g, h, Germ.linear(a, N, field))
                    for g, a in zip(rep.generators, parts))
    return PairNF("FINITE", parts, h, certified=certified)


def ueda_data(rep, bound=TORSION_BOUND):
    """``(Ueda type, is_fibration)`` read from the holonomy of the tangent foliation."""
    nf = normalize_pair(rep, bound)
    if nf.kind == "FINITE":
        return INFINITE, True
    if nf.kind == "RESONANT_PAIR":
        return nf.k, False
    return INFINITE, False
