"""The group of formal diffeomorphisms of (C, 0) at a fixed truncation."""

from .coefficients import QQ
from .errors import FormalError
from .series import PSeries, compose, identity_series, reversion


class Germ:
    """A truncated germ ``f(y) = a y + f_2 y^2 + ... + O(y^(N+1))`` with ``a != 0``.

    Composition is written ``f @ g`` for ``f o g``; ``f ** n`` is the n-th
    iterate (negative n uses the compositional inverse); ``c * f`` scales the
    values of ``f`` by the constant ``c``.
    """

    __slots__ = ("series",)

    def __init__(self, series, trunc=None, field=None):
        if not isinstance(series, PSeries):
            if trunc is None:
                raise FormalError("BAD_INPUT", "a truncation is needed to build a germ from coefficients")
            series = PSeries(series, trunc, field=field)
        if series.trunc < 1:
            raise FormalError("BAD_INPUT", "germ truncation must be at least 1")
        f = series.field
        if not f.is_zero(series[0]):
            raise FormalError("BAD_INPUT", "a germ must fix 0")
        if f.is_zero(series[1]):
            raise FormalError("BAD_INPUT", "a germ needs an invertible linear coefficient")
        self.series = series

    @classmethod
    def identity(cls, trunc, field=QQ):
        return cls(identity_series(trunc, field))

    @classmethod
    def linear(cls, a, trunc, field=None):
        field = field or QQ.join(_field_of(a))
        return cls(PSeries([0, a], trunc, field=field))

    @property
    def field(self):
        return self.series.field

    @property
    def trunc(self):
        return self.series.trunc

    @property
    def linear_part(self):
        return self.series[1]

    def __getitem__(self, e):
        return self.series[e]

    def coefficients(self):
        return list(self.series.coeffs)

    def is_identity(self):
        f = self.field
        return f.eq(self[1], f.one) and all(f.is_zero(self[e]) for e in range(2, self.trunc + 1))

    def is_linear(self):
        f = self.field
        return all(f.is_zero(self[e]) for e in range(2, self.trunc + 1))

    def truncate(self, n):
        return Germ(self.series.truncate(n))

    def with_field(self, field):
        return Germ(self.series.with_field(field))

    def __matmul__(self, other):
        if not isinstance(other, Germ):
            return NotImplemented
        return Germ(compose(self.series, other.series))

    def inverse(self):
        return Germ(reversion(self.series))

    def __pow__(self, n):
        return iterate(self, n)

    def scale(self, c):
        return Germ(self.series.scale(c))

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if isinstance(other, Germ):
            return self.series == other.series
        return NotImplemented

    __hash__ = None

    def agrees_with(self, other, upto=None):
        return self.series.agrees_with(other.series, upto)

    def __repr__(self):
        return f"Germ({self.series!r})"

    def to_json(self):
        out = self.series.to_json()
        out["kind"] = "germ"
        return out

    @classmethod
    def from_json(cls, obj, field=None):
        if obj.get("kind", "germ") != "germ":
            raise FormalError("BAD_INPUT", f"expected a germ, got kind {obj.get('kind')!r}")
        return cls(PSeries.from_json(obj, field))


def _field_of(x):
    from .coefficients import field_of
    return field_of(x)


def contact_order(f, g):
    """Least ``n`` at which the coefficients of ``f`` and ``g`` differ, or None.

    Both germs are compared up to the smaller of their truncations.
    """
    N = min(f.trunc, g.trunc)
    a, b = f.series._coerce_other(g.series)
    eq = a.field.eq
    for n in range(1, N + 1):
        if not eq(a[n], b[n]):
            return n
    return None


def conjugate(f, h):
    """``h o f o h^-1``."""
    return h @ f @ h.inverse()


def iterate(f, n):
    """The n-fold composite of ``f`` (n may be negative or zero)."""
    if not isinstance(n, int):
        raise FormalError("BAD_INPUT", "iteration count must be an integer")
    if n < 0:
        f, n = f.inverse(), -n
    result = Germ.identity(f.trunc, f.field)
    base = f
    while n:
        if n & 1:
            result = base @ result
        n >>= 1
        if n:
            base = base @ base
    return result


def commutator_is_trivial(f, g):
    return (f @ g).agrees_with(g @ f)
