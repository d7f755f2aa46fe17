"""Coefficient fields for the series kernels.

Two backends are provided.

``ExactField(n)``
    The cyclotomic field Q(zeta_n).  Rational numbers are plain
    :class:`fractions.Fraction` values; genuinely cyclotomic elements are
    :class:`Cyclo` instances stored densely in the power basis of zeta_n,
    reduced modulo the n-th cyclotomic polynomial.  Zero tests are exact.

``FloatField(bits)``
    Complex numbers from a private :mod:`mpmath` context with ``bits`` of
    mantissa.  A value is treated as zero when its modulus is at most
    ``eps``, which defaults to ``1e-12 * 2**(53 - bits)``.

Every field exposes the same small vocabulary (``coerce``, ``is_zero``,
``eq``, ``inv``, ``root_of_unity``, ``mul_order``, ``exp``, ``log``,
``kth_root``, ``encode``, ``decode``) so the series code never needs to know
which backend it runs on.

Examples
--------
>>> K = ExactField(4)
>>> i = K.root_of_unity(4)
>>> i * i == -1
True
>>> K.mul_order(i, 8)
4
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import mpmath

from .errors import FormalError


def _normal_conductor(n):
    # Q(zeta_{2n}) = Q(zeta_n) for odd n
    return n // 2 if n % 4 == 2 else n


@lru_cache(maxsize=None)
def euler_phi(n):
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num, den):
    # exact division of integer polynomials, den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n):
    """Integer coefficients (low to high) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, cyclotomic_poly(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_table(n):
    # rows: x^j mod Phi_n for j = 0 .. 2*phi - 2
    phi = euler_phi(n)
    cyc = cyclotomic_poly(n)
    rows = []
    cur = [1] + [0] * (phi - 1)
    for _ in range(2 * phi - 1):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(phi):
                cur[i] -= top * cyc[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _power_of_generator(n, e):
    # zeta_n^e in the power basis of Q(zeta_n)
    table = _reduction_table(n)
    phi = euler_phi(n)
    e %= n
    cur = [1] + [0] * (phi - 1)
    step = table[1]
    for _ in range(e):
        cur = _reduce_product(n, _convolve(cur, step))
    return tuple(cur)


def _convolve(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _reduce_product(n, coeffs):
    phi = euler_phi(n)
    table = _reduction_table(n)
    out = list(coeffs[:phi]) + [0] * max(0, phi - len(coeffs))
    for j in range(phi, len(coeffs)):
        c = coeffs[j]
        if c:
            row = table[j]
            for i in range(phi):
                if row[i]:
                    out[i] += c * row[i]
    return out


def _solve_rational(columns, rhs):
    """Solve sum_j x_j * columns[j] = rhs exactly; return None if impossible."""
    rows = len(rhs)
    ncol = len(columns)
    mat = [[Fraction(columns[j][i]) for j in range(ncol)] + [Fraction(rhs[i])]
           for i in range(rows)]
    pivots = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, rows) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(rows):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if mat[i][ncol] != 0:
            return None
    sol = [Fraction(0)] * ncol
    for i, c in enumerate(pivots):
        sol[c] = mat[i][ncol]
    return sol


class Cyclo:
    """Element of Q(zeta_n) stored as integer numerators over a common denominator.

    The value is ``sum(num[i] * zeta_n**i) / den`` with ``len(num) == phi(n)``.
    Instances are immutable and normalized, so equal values in the same
    conductor have identical representations.
    """

    __slots__ = ("n", "num", "den")

    def __init__(self, n, num, den=1):
        n = _normal_conductor(n)
        phi = euler_phi(n)
        num = list(num)
        if len(num) < phi:
            num += [0] * (phi - len(num))
        elif len(num) > phi:
            num = _reduce_product(n, num)
        if den < 0:
            num = [-v for v in num]
            den = -den
        g = den
        for v in num:
            g = gcd(g, v)
            if g == 1:
                break
        if g > 1:
            num = [v // g for v in num]
            den //= g
        self.n = n
        self.num = tuple(num)
        self.den = den

    @classmethod
    def from_fractions(cls, n, coeffs):
        d = 1
        for c in coeffs:
            d = lcm(d, Fraction(c).denominator)
        return cls(n, [int(Fraction(c) * d) for c in coeffs], d)

    @classmethod
    def generator(cls, n):
        return cls(n, _power_of_generator(_normal_conductor(n), 1))

    def coeffs(self):
        return [Fraction(v, self.den) for v in self.num]

    def is_rational(self):
        return not any(self.num[1:])

    def rational_value(self):
        return Fraction(self.num[0], self.den)

    def lift(self, m):
        """Re-express in Q(zeta_m) for a multiple m of the conductor."""
        m = _normal_conductor(m)
        if m == self.n:
            return self
        if m % self.n:
            raise FormalError("CONDUCTOR_MISMATCH", f"cannot embed Q(zeta_{self.n}) in Q(zeta_{m})")
        step = m // self.n
        acc = [0] * euler_phi(m)
        for i, v in enumerate(self.num):
            if v:
                p = _power_of_generator(m, i * step)
                for j in range(len(acc)):
                    acc[j] += v * p[j]
        return Cyclo(m, acc, self.den)

    def _pair(self, other):
        if isinstance(other, Cyclo):
            if other.n == self.n:
                return self, other
            m = lcm(self.n, other.n)
            return self.lift(m), other.lift(m)
        if isinstance(other, (int, Fraction)):
            o = Fraction(other)
            return self, Cyclo(self.n, [o.numerator], o.denominator)
        return None, None

    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        d = a.den * b.den // gcd(a.den, b.den)
        fa, fb = d // a.den, d // b.den
        return Cyclo(a.n, [x * fa + y * fb for x, y in zip(a.num, b.num)], d)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.n, [-v for v in self.num], self.den)

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return b + (-a)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            o = Fraction(other)
            return Cyclo(self.n, [v * o.numerator for v in self.num], self.den * o.denominator)
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        prod = _reduce_product(a.n, _convolve(a.num, b.num))
        return Cyclo(a.n, prod, a.den * b.den)

    __rmul__ = __mul__

    def inverse(self):
        if not any(self.num):
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        if self.is_rational():
            return Cyclo(self.n, [self.den], self.num[0])
        phi = euler_phi(self.n)
        cols = []
        for j in range(phi):
            basis = [0] * phi
            basis[j] = 1
            cols.append(_reduce_product(self.n, _convolve(self.num, basis)))
        sol = _solve_rational(cols, [1] + [0] * (phi - 1))
        return Cyclo.from_fractions(self.n, [s * self.den for s in sol])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            o = Fraction(other)
            if o == 0:
                raise ZeroDivisionError("division by zero")
            return Cyclo(self.n, [v * o.denominator for v in self.num], self.den * o.numerator)
        if isinstance(other, Cyclo):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = Cyclo(self.n, [1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return any(self.num)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        if isinstance(other, Cyclo):
            if other.n == self.n:
                return self.num == other.num and self.den == other.den
            a, b = self._pair(other)
            return a.num == b.num and a.den == b.den
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational_value())
        low = minimal_form(self)
        return hash((low.n, low.num, low.den))

    def to_complex(self, ctx=mpmath.mp):
        z = ctx.mpc(0)
        for i, v in enumerate(self.num):
            if v:
                z += v * ctx.expjpi(ctx.mpf(2 * i) / self.n)
        return z / self.den

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs()):
            if c:
                terms.append(f"{c}" if i == 0 else f"({c})*z{self.n}^{i}" if i > 1 else f"({c})*z{self.n}")
        return " + ".join(terms) if terms else "0"


def minimal_form(x):
    """Return ``x`` re-expressed in the smallest cyclotomic field containing it.

    Rational values come back as :class:`Fraction`.
    """
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if x.is_rational():
        return x.rational_value()
    n = x.n
    for d in sorted(d for d in range(3, n) if n % d == 0 and d % 4 != 2):
        step = n // d
        cols = [_power_of_generator(n, j * step) for j in range(euler_phi(d))]
        sol = _solve_rational(cols, x.num)
        if sol is not None:
            return Cyclo.from_fractions(d, [s / x.den for s in sol])
    return x


def conductor_of(x):
    """Conductor of the cyclotomic field an exact value is stored in (1 for rationals)."""
    return x.n if isinstance(x, Cyclo) else 1


def _parse_rational(s):
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except ValueError as exc:
            raise FormalError("BAD_INPUT", f"not a rational number: {s!r}") from exc
    if isinstance(s, float) and s.is_integer():
        return Fraction(int(s))
    raise FormalError("BAD_INPUT", f"not a rational number: {s!r}")


class ExactField:
    """The cyclotomic field Q(zeta_n) with exact arithmetic."""

    exact = True

    def __init__(self, conductor=1):
        if not isinstance(conductor, int) or conductor < 1:
            raise FormalError("BAD_INPUT", f"conductor must be a positive integer, got {conductor!r}")
        self.conductor = _normal_conductor(conductor)
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __eq__(self, other):
        return isinstance(other, ExactField) and other.conductor == self.conductor

    def __hash__(self):
        return hash(("exact", self.conductor))

    def __repr__(self):
        return f"ExactField({self.conductor})"

    def join(self, other):
        if isinstance(other, ExactField):
            return exact_field(lcm(self.conductor, other.conductor))
        return other

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, bool):
            raise FormalError("BAD_INPUT", "booleans are not coefficients")
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, Cyclo):
            if self.conductor % x.n:
                low = minimal_form(x)
                if isinstance(low, Fraction):
                    return low
                if self.conductor % low.n:
                    raise FormalError("CONDUCTOR_MISMATCH",
                                      f"value needs conductor {low.n}, field has {self.conductor}")
                x = low
            if x.is_rational():
                return x.rational_value()
            return x.lift(self.conductor)
        if isinstance(x, (str, float)):
            return _parse_rational(x)
        if isinstance(x, dict):
            return self.decode(x)
        raise FormalError("BACKEND_MISMATCH", f"cannot use {type(x).__name__} on the exact backend")

    def is_zero(self, x):
        return x == 0

    def eq(self, a, b):
        return a == b

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x

    def generator(self):
        if self.conductor == 1:
            return Fraction(1)
        return Cyclo.generator(self.conductor)

    def has_root_of_unity(self, order):
        n = self.conductor
        return n % order == 0 or (n % 2 == 1 and (2 * n) % order == 0)

    def root_of_unity(self, order):
        """The root exp(2*pi*i/order) under the embedding zeta_n -> exp(2*pi*i/n)."""
        if not isinstance(order, int) or order < 1:
            raise FormalError("BAD_INPUT", f"order must be a positive integer, got {order!r}")
        if order <= 2:
            return Fraction(1) if order == 1 else Fraction(-1)
        n = self.conductor
        if n % order == 0:
            return Cyclo(n, _power_of_generator(n, n // order))
        if n % 2 == 1 and (2 * n) % order == 0:
            # zeta_{2n} = -zeta_n^{(n+1)/2}
            e = (2 * n) // order
            base = -Cyclo(n, _power_of_generator(n, (n + 1) // 2))
            return base ** e
        raise FormalError("CONDUCTOR_MISMATCH",
                          f"no primitive {order}-th root of unity in Q(zeta_{n})")

    def mul_order(self, a, bound):
        return _mul_order(self, a, bound)

    def exp(self, x):
        if x == 0:
            return Fraction(1)
        raise FormalError("NO_EXACT_EXPONENTIAL", "exponential of a nonzero value is transcendental")

    def log(self, x):
        if x == 1:
            return Fraction(0)
        raise FormalError("NO_EXACT_EXPONENTIAL", "logarithm of a value other than 1 is transcendental")

    def kth_root(self, x, k):
        """An exact k-th root of ``x`` if one is found, else None.

        Rationals are handled completely; other values only when they are a
        root of unity times a rational with a k-th root in the field.
        """
        if x == 0:
            return Fraction(0)
        if k == 1:
            return x
        low = minimal_form(x)
        if isinstance(low, Fraction):
            r = _rational_root(low, k)
            if r is not None:
                return r
            if low < 0 and self.has_root_of_unity(2 * k):
                r = _rational_root(-low, k)
                if r is not None:
                    return self.coerce(r * self.root_of_unity(2 * k))
            return None
        # x = (root of unity) * (positive rational)
        big = lcm(2, self.conductor)
        zeta = self.root_of_unity(big)
        units = [Fraction(1)]
        for _ in range(big - 1):
            units.append(units[-1] * zeta)
        for w in units:
            c = minimal_form(x / w)
            if not isinstance(c, Fraction) or c <= 0:
                continue
            r = _rational_root(c, k)
            if r is None:
                return None
            for v in units:
                if v ** k == w:
                    return self.coerce(r * v)
            return None
        return None

    def to_complex(self, x, ctx=mpmath.mp):
        if isinstance(x, Cyclo):
            return x.to_complex(ctx)
        x = Fraction(x)
        return ctx.mpc(ctx.mpf(x.numerator) / x.denominator)

    def encode(self, x):
        x = self.coerce(x)
        if isinstance(x, Fraction):
            coeffs = [x] + [Fraction(0)] * (euler_phi(self.conductor) - 1)
        else:
            coeffs = x.coeffs()
        return {"conductor": self.conductor, "coeffs": [_frac_str(c) for c in coeffs]}

    def decode(self, obj):
        if isinstance(obj, dict):
            if "coeffs" not in obj:
                raise FormalError("BAD_INPUT", "exact coefficient needs 'coeffs'")
            n = _normal_conductor(int(obj.get("conductor", 1)))
            coeffs = [_parse_rational(c) for c in obj["coeffs"]]
            if len(coeffs) > euler_phi(n):
                raise FormalError("BAD_INPUT", f"too many coefficients for conductor {n}")
            if n == 1:
                return coeffs[0] if coeffs else Fraction(0)
            return self.coerce(Cyclo.from_fractions(n, coeffs))
        return self.coerce(obj)


def _frac_str(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _int_root(n, k):
    if n < 0:
        return None
    if n in (0, 1):
        return n
    r = int(round(n ** (1.0 / k))) if n < 2 ** 1000 else int(mpmath.root(n, k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** k == n else None


def _rational_root(q, k):
    q = Fraction(q)
    sign = 1
    if q < 0:
        if k % 2 == 0:
            return None
        sign, q = -1, -q
    a = _int_root(q.numerator, k)
    b = _int_root(q.denominator, k)
    if a is None or b is None:
        return None
    return sign * Fraction(a, b)


def _mul_order(field, a, bound):
    if field.is_zero(a):
        raise FormalError("BAD_INPUT", "multiplicative order of zero")
    p = a
    for j in range(1, bound + 1):
        if field.eq(p, field.one):
            return j
        p = p * a
    return None


@lru_cache(maxsize=None)
def _context(bits):
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


class FloatField:
    """Complex numbers with ``bits`` of mantissa and zero tolerance ``eps``."""

    exact = False

    def __init__(self, bits=53, eps=None):
        if not isinstance(bits, int) or bits < 16:
            raise FormalError("BAD_INPUT", f"bits must be an integer >= 16, got {bits!r}")
        self.bits = bits
        self.ctx = _context(bits)
        self.eps = float(eps) if eps is not None else 1e-12 * 2.0 ** (53 - bits)
        self.zero = self.ctx.mpc(0)
        self.one = self.ctx.mpc(1)

    def __eq__(self, other):
        return isinstance(other, FloatField) and (other.bits, other.eps) == (self.bits, self.eps)

    def __hash__(self):
        return hash(("float", self.bits, self.eps))

    def __repr__(self):
        return f"FloatField({self.bits})"

    def join(self, other):
        if isinstance(other, FloatField):
            return self if self.bits <= other.bits else other
        return self

    def coerce(self, x):
        ctx = self.ctx
        if isinstance(x, Cyclo):
            return x.to_complex(ctx)
        if isinstance(x, bool):
            raise FormalError("BAD_INPUT", "booleans are not coefficients")
        if isinstance(x, Fraction):
            return ctx.mpc(ctx.mpf(x.numerator) / x.denominator)
        if isinstance(x, (int, float, complex)):
            return ctx.mpc(x)
        if isinstance(x, str):
            s = x.strip().replace(" ", "")
            try:
                if "/" in s:
                    return self.coerce(Fraction(s))
                return ctx.mpc(complex(s.replace("i", "j"))) if s.endswith(("i", "j")) else ctx.mpc(ctx.mpf(s))
            except (ValueError, TypeError) as exc:
                raise FormalError("BAD_INPUT", f"not a number: {x!r}") from exc
        if isinstance(x, dict):
            return self.decode(x)
        if hasattr(x, "real") and hasattr(x, "imag"):
            return ctx.mpc(ctx.mpf(x.real), ctx.mpf(x.imag))
        raise FormalError("BAD_INPUT", f"not a coefficient: {x!r}")

    def is_zero(self, x):
        return abs(x) <= self.eps

    def eq(self, a, b):
        scale = max(1, abs(a), abs(b))
        return abs(a - b) <= self.eps * scale

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x

    def has_root_of_unity(self, order):
        return True

    def root_of_unity(self, order):
        if not isinstance(order, int) or order < 1:
            raise FormalError("BAD_INPUT", f"order must be a positive integer, got {order!r}")
        return self.ctx.expjpi(self.ctx.mpf(2) / order)

    def mul_order(self, a, bound):
        return _mul_order(self, a, bound)

    def exp(self, x):
        return self.ctx.exp(x)

    def log(self, x):
        return self.ctx.log(x)

    def kth_root(self, x, k):
        if self.is_zero(x):
            return self.zero
        return self.ctx.root(x, k)

    def to_complex(self, x, ctx=None):
        ctx = ctx or self.ctx
        return ctx.mpc(x)

    def encode(self, x):
        x = self.coerce(x)
        digits = int(self.bits * 0.30103) + 3
        return {"re": self.ctx.nstr(x.real, digits), "im": self.ctx.nstr(x.imag, digits),
                "bits": self.bits}

    def decode(self, obj):
        if isinstance(obj, dict):
            if "re" not in obj:
                if "coeffs" in obj:
                    return self.coerce(exact_field(int(obj.get("conductor", 1))).decode(obj))
                raise FormalError("BAD_INPUT", "float coefficient needs 're' and 'im'")
            try:
                return self.ctx.mpc(self.ctx.mpf(str(obj["re"])), self.ctx.mpf(str(obj.get("im", "0"))))
            except (ValueError, TypeError) as exc:
                raise FormalError("BAD_INPUT", f"bad float coefficient {obj!r}") from exc
        return self.coerce(obj)


@lru_cache(maxsize=None)
def exact_field(conductor=1):
    return ExactField(conductor)


@lru_cache(maxsize=None)
def float_field(bits=53, eps=None):
    return FloatField(bits, eps)


QQ = exact_field(1)


def field_of(x):
    """The smallest field among the two backends that holds ``x`` natively."""
    if isinstance(x, (int, Fraction)):
        return QQ
    if isinstance(x, Cyclo):
        return exact_field(x.n)
    ctx = getattr(x, "context", None)
    if ctx is not None and hasattr(ctx, "prec"):
        return float_field(ctx.prec)
    raise FormalError("BAD_INPUT", f"not a coefficient: {x!r}")


def common_field(*values):
    field = QQ
    for v in values:
        field = field.join(field_of(v))
    return field


def root_of_unity(order, field=QQ):
    """Primitive root exp(2*pi*i/order) in ``field``."""
    return field.root_of_unity(order)


def mul_order(a, bound, field=None):
    """Least ``j <= bound`` with ``a**j == 1``, or None."""
    field = field or field_of(a)
    return field.mul_order(field.coerce(a), bound)


def decode_coefficient(obj, field=None):
    """Parse the JSON form of a coefficient, guessing the backend if needed."""
    if field is not None:
        return field.decode(obj)
    if isinstance(obj, dict) and "re" in obj:
        return float_field(int(obj.get("bits", 53))).decode(obj)
    if isinstance(obj, dict):
        return exact_field(int(obj.get("conductor", 1))).decode(obj)
    return QQ.coerce(obj)


def encode_coefficient(x, field=None):
    field = field or field_of(x)
    return field.encode(x)
