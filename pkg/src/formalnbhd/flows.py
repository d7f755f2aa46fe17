"""Formal vector fields, their flows and logarithms, and dual 1-forms.

A vector field ``F(y) d/dy`` with ``F(0) = 0`` acts on series by the
derivation ``g -> F g'``.  Its time-``t`` flow is the Lie series

    exp(t v)(y) = sum_n t^n / n! (v^n . y),

which is a finite sum at any truncation when ``F`` vanishes to order two.
The logarithm of a germ tangent to the identity is computed from the
composition operator ``C_f g = g o f`` as ``log(C_f) . y``, then checked by
exponentiating it again.
"""

from fractions import Fraction

from .coefficients import QQ
from .errors import FormalError
from .germs import Germ
from .series import LSeries, PSeries, compose, identity_series, reversion


class VField:
    """The vector field ``F(y) d/dy`` for a power series ``F`` with ``F(0) = 0``."""

    __slots__ = ("series",)

    def __init__(self, series, trunc=None, field=None):
        if not isinstance(series, PSeries):
            if trunc is None:
                raise FormalError("BAD_INPUT", "a truncation is needed to build a vector field")
            series = PSeries(series, trunc, field=field)
        if not series.field.is_zero(series[0]):
            raise FormalError("BAD_INPUT", "a vector field here must vanish at 0")
        self.series = series

    @property
    def field(self):
        return self.series.field

    @property
    def trunc(self):
        return self.series.trunc

    def __getitem__(self, e):
        return self.series[e]

    def valuation(self):
        return self.series.valuation()

    def is_zero(self):
        return self.series.is_zero()

    def scale(self, c):
        return VField(self.series.scale(c))

    def __rmul__(self, c):
        return self.scale(c)

    def __add__(self, other):
        return VField(self.series + other.series)

    def __neg__(self):
        return VField(-self.series)

    def __sub__(self, other):
        return VField(self.series - other.series)

    def apply(self, g):
        """The derivative ``F * g'`` of a power series ``g`` along the field."""
        F = self.series
        F, g = F._coerce_other(g)
        dg = g.coeffs
        vF = F.valuation()
        if vF is None:
            return PSeries._raw(F.field, 0, g.trunc, [F.field.zero] * (g.trunc + 1))
        trunc = min(F.trunc, g.trunc - 1 + vF)
        zero = F.field.zero
        out = [zero] * (trunc + 1)
        Fc = F.coeffs
        for i in range(vF, min(F.trunc, trunc) + 1):
            fi = Fc[i]
            if not fi:
                continue
            # coefficient of y^(j-1) in g' is j * g_j
            for j in range(1, trunc - i + 2):
                if j > g.trunc:
                    break
                gj = dg[j]
                if gj:
                    out[i + j - 1] += fi * gj * j
        return PSeries._raw(F.field, 0, trunc, out)

    def __eq__(self, other):
        if isinstance(other, VField):
            return self.series == other.series
        return NotImplemented

    __hash__ = None

    def agrees_with(self, other, upto=None):
        return self.series.agrees_with(other.series, upto)

    def __repr__(self):
        return f"VField(({self.series!r}) d/dy)"

    def to_json(self):
        out = self.series.to_json()
        out["kind"] = "vector_field"
        return out

    @classmethod
    def from_json(cls, obj, field=None):
        if obj.get("kind", "vector_field") != "vector_field":
            raise FormalError("BAD_INPUT", f"expected a vector field, got kind {obj.get('kind')!r}")
        return cls(PSeries.from_json(obj, field))


class MForm:
    """The meromorphic 1-form ``B(y) dy`` with ``B`` a truncated Laurent series."""

    __slots__ = ("series",)

    def __init__(self, series, trunc=None, start=0, field=None):
        if not isinstance(series, LSeries):
            if trunc is None:
                raise FormalError("BAD_INPUT", "a truncation is needed to build a 1-form")
            series = LSeries(series, trunc, start=start, field=field)
        self.series = series

    @property
    def field(self):
        return self.series.field

    @property
    def trunc(self):
        return self.series.trunc

    def __getitem__(self, e):
        return self.series[e]

    def residue(self):
        return self.series.residue()

    def principal_part(self):
        return self.series.principal_part()

    def __add__(self, other):
        return MForm(self.series + other.series)

    def __sub__(self, other):
        return MForm(self.series - other.series)

    def __neg__(self):
        return MForm(-self.series)

    def scale(self, c):
        return MForm(self.series.scale(c))

    def __rmul__(self, c):
        return self.scale(c)

    def evaluate(self, v):
        """The function ``w(v) = B * F``."""
        return self.series * v.series

    def truncate(self, n):
        return MForm(self.series.truncate(n))

    def is_zero(self):
        return self.series.is_zero()

    def __eq__(self, other):
        if isinstance(other, MForm):
            return self.series == other.series
        return NotImplemented

    __hash__ = None

    def agrees_with(self, other, upto=None):
        return self.series.agrees_with(other.series, upto)

    def __repr__(self):
        return f"MForm(({self.series!r}) dy)"

    def to_json(self):
        out = self.series.to_json()
        out["kind"] = "one_form"
        return out

    @classmethod
    def from_json(cls, obj, field=None):
        if obj.get("kind", "one_form") != "one_form":
            raise FormalError("BAD_INPUT", f"expected a 1-form, got kind {obj.get('kind')!r}")
        return cls(LSeries.from_json(obj, field))


def model_field(k, lam, trunc, field=QQ, scale=1):
    """``c y^(k+1) / (1 + lam c y^k) d/dy`` with ``c = scale``; ``scale = 1`` is v_{k,lam}."""
    c = field.coerce(scale)
    lam = field.coerce(lam)
    num = PSeries([field.zero] * (k + 1) + [c], trunc, field=field)
    den = PSeries([field.one] + [field.zero] * (k - 1) + [lam * c], trunc, field=field)
    return VField(num * den.inverse())


def model_form(k, lam, trunc, field=QQ):
    """``dy / y^(k+1) + lam dy / y``."""
    lam = field.coerce(lam)
    coeffs = [field.one] + [field.zero] * (k - 1) + [lam]
    return MForm(LSeries(coeffs, trunc, start=-k - 1, field=field))


def flow(v, t, max_terms=100000):
    """Time-``t`` flow ``exp(t v)`` as a germ truncated like ``v``.

    On the exact backend the field must vanish to second order unless
    ``t == 0``; a nonzero linear part would need the transcendental
    ``exp(t F'(0))`` and raises ``NO_EXACT_EXPONENTIAL``.
    """
    field = v.field
    t = field.coerce(t)
    N = v.trunc
    y = identity_series(N, field)
    if field.is_zero(t):
        return Germ(y)
    tangent = field.is_zero(v[1]) if N >= 1 else True
    if not tangent and field.exact:
        raise FormalError("NO_EXACT_EXPONENTIAL",
                          "flow of a field with nonzero linear part needs exp on the exact backend")
    total = list(y.coeffs)
    term = y
    n = 0
    quiet = 0
    while True:
        n += 1
        term = v.apply(term).scale(t * Fraction(1, n))
        if term.trunc < N:
            term = PSeries._raw(field, 0, N, term.coeffs + [field.zero] * (N - term.trunc))
        if term.is_zero():
            if tangent:
                break
            quiet += 1
            if quiet > 2:
                break
        else:
            quiet = 0
        for i, c in enumerate(term.coeffs):
            if c:
                total[i] += c
        if n > max_terms:
            raise FormalError("NO_CONVERGENCE", "Lie series did not settle")
    return Germ(PSeries._raw(field, 0, N, total))


def formal_log(f, validate=True):
    """The unique formal vector field ``v`` with ``exp(v) = f``.

    Raises ``NOT_TANGENT`` unless ``f'(0) = 1`` and ``IDENTITY`` when ``f`` is
    the identity at its truncation.

    Examples
    --------
    >>> f = Germ([0, 1, 0, 1], 7)
    >>> formal_log(f)
    VField((y^3 + -3/2*y^5 + 7/2*y^7 + O(y^8)) d/dy)
    """
    field = f.field
    if not field.eq(f.linear_part, field.one):
        raise FormalError("NOT_TANGENT", "logarithm needs a germ tangent to the identity")
    if f.is_identity():
        raise FormalError("IDENTITY", "the germ is the identity at this truncation")
    N = f.trunc
    zero = field.zero
    fs = f.series
    # powers of f for O(N^2) composition g -> g o f
    powers = [None, list(fs.coeffs)]
    for i in range(2, N + 1):
        prev = powers[-1]
        nxt = [zero] * (N + 1)
        for p in range(i - 1, N + 1):
            x = prev[p]
            if not x:
                continue
            for q in range(1, N + 1 - p):
                c = fs.coeffs[q]
                if c:
                    nxt[p + q] += x * c
        powers.append(nxt)

    def delta(g):
        out = [zero] * (N + 1)
        for i in range(1, N + 1):
            gi = g[i]
            if not gi:
                continue
            row = powers[i]
            for n in range(i, N + 1):
                r = row[n]
                if r:
                    out[n] += gi * r
        return [o - gi for o, gi in zip(out, g)]

    term = list(identity_series(N, field).coeffs)
    total = [zero] * (N + 1)
    n = 0
    while True:
        n += 1
        term = delta(term)
        if all(field.is_zero(c) for c in term):
            break
        sign = Fraction(1 if n % 2 else -1, n)
        for i, c in enumerate(term):
            if c:
                total[i] += c * sign
        if n > N + 1:
            break
    v = VField(PSeries._raw(field, 0, N, total))
    if validate and not flow(v, 1).agrees_with(f):
        raise FormalError("LOG_VALIDATION_FAILED", "re-exponentiation does not reproduce the germ")
    return v


def dual_form(v):
    """The 1-form ``w`` with ``w(v) = 1``, i.e. ``dy / F``."""
    if v.is_zero():
        raise FormalError("BAD_INPUT", "the zero field has no dual form")
    return MForm(v.series.inverse())


def dual_field(w):
    """The vector field ``v`` with ``w(v) = 1``, i.e. ``(1 / B) d/dy``."""
    if w.is_zero():
        raise FormalError("BAD_INPUT", "the zero form has no dual field")
    inv = w.series.inverse()
    if inv.valuation() is None or inv.valuation() < 1:
        raise FormalError("BAD_INPUT", "dual field does not vanish at 0")
    return VField(inv.as_pseries())


def pullback(w, f):
    """``f^* w = B(f(y)) f'(y) dy``."""
    B = w.series
    fs = f.series
    return MForm(B.substitute(fs) * fs.derivative())


def pushforward(v, h):
    """``h_* v = (h' o h^-1) (F o h^-1) d/dy``."""
    hinv = reversion(h.series)
    F = compose(v.series, hinv)
    dh = compose(h.series.derivative(), hinv)
    return VField((F * dh).as_pseries())
