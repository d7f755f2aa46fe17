"""Truncated power and Laurent series in one variable ``y``.

An :class:`LSeries` stores the coefficients of ``y**start .. y**trunc``;
everything from ``y**(trunc+1)`` on is unknown.  :class:`PSeries` is the
special case ``start == 0``.  Results never claim more precision than their
operands support: sums and products of power series keep the smaller
truncation, and products with poles lose as many orders as the pole demands.
"""

from fractions import Fraction

from .coefficients import QQ, common_field, decode_coefficient
from .errors import FormalError


def _zero_list(field, n):
    z = field.zero
    return [z] * n


def _mul_lists(a, b, n_out, zero):
    out = [zero] * n_out
    lb = len(b)
    for i, x in enumerate(a):
        if i >= n_out:
            break
        if not x:
            continue
        lim = min(n_out - i, lb)
        for j in range(lim):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def _inverse_list(u, n_out, field):
    # 1/u for a power series with invertible constant term
    if field.is_zero(u[0]):
        raise ZeroDivisionError("constant term is not invertible")
    inv0 = field.inv(u[0])
    r = [inv0]
    for n in range(1, n_out):
        s = field.zero
        for j in range(1, min(n, len(u) - 1) + 1):
            uj = u[j]
            if uj:
                s += uj * r[n - j]
        r.append(-s * inv0)
    return r[:n_out]


class LSeries:
    """Truncated Laurent series ``sum c_j y**j`` for ``start <= j <= trunc``.

    Parameters
    ----------
    coeffs : sequence
        Coefficients of ``y**start, y**(start+1), ...``.  Missing trailing
        coefficients up to ``trunc`` are zero; extra ones are dropped.
    trunc : int
        Highest known exponent.
    start : int
        Exponent of ``coeffs[0]``.
    field : coefficient field, optional
        Inferred from the coefficients when omitted.
    """

    __slots__ = ("field", "start", "trunc", "coeffs")

    def __init__(self, coeffs, trunc, start=0, field=None):
        if not isinstance(trunc, int) or not isinstance(start, int):
            raise FormalError("BAD_INPUT", "trunc and start must be integers")
        coeffs = list(coeffs)
        if field is None:
            field = common_field(*[c for c in coeffs if not isinstance(c, (str, dict))]) if coeffs else QQ
        coeffs = [field.coerce(c) for c in coeffs]
        n = max(trunc - start + 1, 0)
        if len(coeffs) < n:
            coeffs += _zero_list(field, n - len(coeffs))
        else:
            coeffs = coeffs[:n]
        self.field = field
        self.start = start
        self.trunc = trunc
        self.coeffs = coeffs

    @classmethod
    def _raw(cls, field, start, trunc, coeffs):
        obj = object.__new__(cls)
        obj.field = field
        obj.start = start
        obj.trunc = trunc
        obj.coeffs = coeffs
        return obj

    # basic access

    def __getitem__(self, e):
        if e > self.trunc:
            raise IndexError(f"coefficient of y^{e} is beyond the truncation {self.trunc}")
        if e < self.start:
            return self.field.zero
        return self.coeffs[e - self.start]

    def valuation(self):
        """Exponent of the first nonzero coefficient, or None for the zero series."""
        is_zero = self.field.is_zero
        for i, c in enumerate(self.coeffs):
            if not is_zero(c):
                return self.start + i
        return None

    def is_zero(self):
        return self.valuation() is None

    def residue(self):
        return self[-1] if self.trunc >= -1 else self.field.zero

    def principal_part(self):
        """The terms with negative exponent, as a dict exponent -> coefficient."""
        return {self.start + i: c for i, c in enumerate(self.coeffs)
                if self.start + i < 0 and not self.field.is_zero(c)}

    def pole_order(self):
        v = self.valuation()
        return 0 if v is None else max(0, -v)

    def with_field(self, field):
        return type(self)._raw(field, self.start, self.trunc, [field.coerce(c) for c in self.coeffs])

    def truncate(self, n):
        """Drop the coefficients above ``y**n`` (n may not exceed the truncation)."""
        if n > self.trunc:
            raise FormalError("TRUNCATION_TOO_LOW", f"cannot raise truncation {self.trunc} to {n}")
        keep = max(n - self.start + 1, 0)
        return type(self)._raw(self.field, self.start, n, self.coeffs[:keep])

    def shift(self, e):
        """Multiply by ``y**e`` (exact, truncation shifts too)."""
        return _make(self.field, self.start + e, self.trunc + e, list(self.coeffs))

    def _coerce_other(self, other):
        if isinstance(other, LSeries):
            if other.field != self.field:
                field = self.field.join(other.field)
                return self.with_field(field), other.with_field(field)
            return self, other
        c = self.field.coerce(other)
        return self, _make(self.field, 0, self.trunc, [c])

    # arithmetic

    def __add__(self, other):
        a, b = self._coerce_other(other)
        start = min(a.start, b.start)
        trunc = min(a.trunc, b.trunc)
        n = max(trunc - start + 1, 0)
        out = _zero_list(a.field, n)
        for s in (a, b):
            off = s.start - start
            for i, c in enumerate(s.coeffs):
                if off + i >= n:
                    break
                if c:
                    out[off + i] += c
        return _make(a.field, start, trunc, out)

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return type(self)._raw(self.field, self.start, self.trunc, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, LSeries) else -self.field.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = self.field.coerce(c)
        return type(self)._raw(self.field, self.start, self.trunc, [c * x for x in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, LSeries):
            return self.scale(other)
        a, b = self._coerce_other(other)
        va = a.valuation()
        vb = b.valuation()
        va_eff = a.trunc + 1 if va is None else va
        vb_eff = b.trunc + 1 if vb is None else vb
        trunc = min(a.trunc + min(0, vb_eff), b.trunc + min(0, va_eff))
        start = a.start + b.start
        n = max(trunc - start + 1, 0)
        out = _mul_lists(a.coeffs, b.coeffs, n, a.field.zero)
        return _make(a.field, start, trunc, out)

    def __rmul__(self, other):
        return self.scale(other)

    def inverse(self):
        v = self.valuation()
        if v is None:
            raise FormalError("BAD_INPUT", "division by a zero series")
        unit = self.coeffs[v - self.start:]
        n = self.trunc - v + 1
        inv = _inverse_list(unit, n, self.field)
        return _make(self.field, -v, self.trunc - 2 * v, inv)

    def __truediv__(self, other):
        if isinstance(other, LSeries):
            return self * other.inverse()
        c = self.field.coerce(other)
        if self.field.is_zero(c):
            raise FormalError("BAD_INPUT", "division by zero")
        return self.scale(self.field.inv(c))

    def __rtruediv__(self, other):
        return self.inverse().scale(other)

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = _make(self.field, 0, self.trunc, [self.field.one])
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def derivative(self):
        out = [c * (self.start + i) for i, c in enumerate(self.coeffs)]
        return _make(self.field, self.start - 1, self.trunc - 1, out)

    def primitive(self):
        """Termwise antiderivative with zero constant term.

        Raises ``NONZERO_RESIDUE`` if the coefficient of ``1/y`` is nonzero,
        since the result would need a logarithm.
        """
        if self.trunc >= -1 and not self.field.is_zero(self.residue()):
            raise FormalError("NONZERO_RESIDUE", "primitive of a series with nonzero residue",
                              residue=self.residue())
        out = []
        for i, c in enumerate(self.coeffs):
            e = self.start + i
            out.append(self.field.zero if e == -1 else c * Fraction(1, e + 1))
        return _make(self.field, self.start + 1, self.trunc + 1, out)

    def substitute(self, inner):
        """Compose with a power series ``inner`` of valuation one: ``self(inner(y))``."""
        if not isinstance(inner, PSeries):
            raise FormalError("BAD_INPUT", "substitution needs a power series")
        if not inner.field.is_zero(inner[0]):
            raise FormalError("BAD_INPUT", "inner series must vanish at 0")
        a, b = self._coerce_other(inner)
        if a.start >= 0:
            return compose(a.as_pseries(), b)
        q = -a.start
        head = _make(a.field, 0, a.trunc + q, list(a.coeffs))
        unit = _make(a.field, 0, b.trunc - 1, b.coeffs[1:])
        body = compose(head, b) * (unit ** (-q))
        return body.shift(-q)

    def as_pseries(self):
        v = self.valuation()
        if self.start >= 0 or v is None or v >= 0:
            lead = max(self.start, 0)
            coeffs = _zero_list(self.field, lead) + self.coeffs[lead - self.start:]
            return PSeries._raw(self.field, 0, self.trunc, coeffs)
        raise FormalError("BAD_INPUT", "series has a pole")

    # comparisons and printing

    def agrees_with(self, other, upto=None):
        a, b = self._coerce_other(other)
        top = min(a.trunc, b.trunc) if upto is None else upto
        if top > min(a.trunc, b.trunc):
            raise FormalError("TRUNCATION_TOO_LOW", "comparison beyond the truncation")
        lo = min(a.start, b.start)
        eq = a.field.eq
        return all(eq(a[e], b[e]) for e in range(lo, top + 1))

    def __eq__(self, other):
        if isinstance(other, LSeries):
            return self.trunc == other.trunc and self.agrees_with(other)
        return NotImplemented

    __hash__ = None

    def terms(self):
        return [(self.start + i, c) for i, c in enumerate(self.coeffs) if not self.field.is_zero(c)]

    def __repr__(self):
        parts = []
        for e, c in self.terms():
            mono = "" if e == 0 else "y" if e == 1 else f"y^{e}"
            cs = str(c)
            if mono and cs == "1":
                parts.append(mono)
            elif mono and cs == "-1":
                parts.append("-" + mono)
            elif mono:
                parts.append(f"({cs})*{mono}" if any(ch in cs for ch in "+- ") else f"{cs}*{mono}")
            else:
                parts.append(cs)
        parts.append(f"O(y^{self.trunc + 1})")
        return " + ".join(parts)

    def to_json(self):
        v = self.valuation()
        if v is None:
            v = self.trunc + 1
        return {"valuation": v, "trunc": self.trunc,
                "coeffs": [self.field.encode(self[e]) for e in range(v, self.trunc + 1)]}

    @classmethod
    def from_json(cls, obj, field=None):
        try:
            v = int(obj["valuation"])
            trunc = int(obj["trunc"])
            raw = obj["coeffs"]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormalError("BAD_INPUT", "series JSON needs valuation, trunc and coeffs") from exc
        vals = [decode_coefficient(c, field) for c in raw]
        if field is None:
            field = common_field(*vals) if vals else QQ
        if cls is PSeries or (v >= 0 and cls is not LSeries):
            if v < 0:
                raise FormalError("BAD_INPUT", "power series JSON with negative valuation")
            return PSeries([field.zero] * v + vals, trunc, field=field)
        return LSeries(vals, trunc, start=v, field=field)


class PSeries(LSeries):
    """Truncated power series ``c_0 + c_1 y + ... + c_N y**N + O(y**(N+1))``."""

    __slots__ = ()

    def __init__(self, coeffs, trunc, field=None):
        super().__init__(coeffs, trunc, 0, field)

    def __mul__(self, other):
        if isinstance(other, PSeries):
            a, b = self._coerce_other(other)
            trunc = min(a.trunc, b.trunc)
            out = _mul_lists(a.coeffs, b.coeffs, trunc + 1, a.field.zero)
            return PSeries._raw(a.field, 0, trunc, out)
        return super().__mul__(other)

    def __call__(self, inner):
        return compose(self, inner)

    def shift(self, e):
        if e >= 0:
            return PSeries._raw(self.field, 0, self.trunc + e, _zero_list(self.field, e) + list(self.coeffs))
        return super().shift(e)


def _make(field, start, trunc, coeffs):
    # build with start normalized to 0 when there is no pole
    if start >= 0:
        if start > 0:
            coeffs = _zero_list(field, start) + coeffs
        n = max(trunc + 1, 0)
        return PSeries._raw(field, 0, trunc, coeffs[:n])
    n = max(trunc - start + 1, 0)
    return LSeries._raw(field, start, trunc, coeffs[:n])


def identity_series(trunc, field=QQ):
    """The series ``y`` truncated at ``trunc``."""
    return PSeries([field.zero, field.one], trunc, field=field)


def monomial(c, e, trunc, field=None):
    """``c * y**e`` truncated at ``trunc``."""
    field = field or common_field(c)
    if e >= 0:
        return PSeries([field.zero] * e + [c], trunc, field=field)
    return LSeries([c], trunc, start=e, field=field)


def compose(outer, inner):
    """``outer(inner(y))`` by Horner's rule, for ``inner`` with zero constant term.

    Examples
    --------
    >>> f = PSeries([0, 1, 1], 4); g = PSeries([0, 1, 0, 1], 4)
    >>> compose(f, g)
    y + y^2 + y^3 + 2*y^4 + O(y^5)
    """
    if not isinstance(outer, PSeries):
        if isinstance(outer, LSeries):
            return outer.substitute(inner)
        raise FormalError("BAD_INPUT", "compose expects series")
    if not inner.field.is_zero(inner[0]):
        raise FormalError("BAD_INPUT", "inner series must have zero constant term")
    a, b = outer._coerce_other(inner)
    field = a.field
    N = min(a.trunc, b.trunc)
    zero = field.zero
    c = a.coeffs
    g = b.coeffs
    # R_i = c_i + inner * R_{i+1}, and R_i is only needed modulo y^(N-i+1)
    acc = [c[N]] if N < len(c) else [zero]
    for i in range(N - 1, -1, -1):
        width = N - i + 1
        prod = [zero] * width
        for p, x in enumerate(acc):
            if not x:
                continue
            for q in range(1, width - p):
                y = g[q]
                if y:
                    prod[p + q] += x * y
        prod[0] += c[i]
        acc = prod
    return PSeries._raw(field, 0, N, acc)


def reversion(f):
    """Compositional inverse of ``f`` with ``f(0) = 0`` and ``f'(0) != 0``.

    Examples
    --------
    >>> reversion(PSeries([0, 1, 1], 4))
    y + -y^2 + 2*y^3 + -5*y^4 + O(y^5)
    """
    field = f.field
    if not field.is_zero(f[0]):
        raise FormalError("BAD_INPUT", "reversion needs f(0) = 0")
    if f.trunc < 1 or field.is_zero(f[1]):
        raise FormalError("BAD_INPUT", "reversion needs an invertible linear coefficient")
    N = f.trunc
    zero = field.zero
    a_inv = field.inv(f[1])
    fc = f.coeffs
    g = [zero] * (N + 1)
    g[1] = a_inv
    # P[i][n]: coefficient of y^n in g^i, filled column by column
    P = [None, g] + [[zero] * (N + 1) for _ in range(2, N + 1)]
    for i in range(2, N + 1):
        P[i][i] = P[i - 1][i - 1] * a_inv
    for n in range(2, N + 1):
        for i in range(2, n):
            prev = P[i - 1]
            s = zero
            for j in range(i - 1, n):
                x = prev[j]
                if x:
                    y = g[n - j]
                    if y:
                        s += x * y
            P[i][n] = s
        s = zero
        for i in range(2, n + 1):
            fi = fc[i]
            if fi:
                s += fi * P[i][n]
        g[n] = -s * a_inv
    return PSeries._raw(field, 0, N, g)


def derivative(a):
    return a.derivative()


def primitive(a):
    return a.primitive()
