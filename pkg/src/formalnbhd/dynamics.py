"""Floating-point criteria for convergence questions.

* Koenigs linearization ``h = lim a^-n f^n`` of a hyperbolic germ.
* Brjuno sums ``sum log(q_(n+1)) / q_n`` over continued-fraction denominators.
* Distances ``d_k = dist(k z0, Z + tau Z)`` measuring how well a point of the
  Jacobian is approximated by torsion points.

None of the profiles can certify an asymptotic condition from finitely many
terms; verdicts are labeled as advisory at the horizon.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Any, List, Optional

import mpmath

from .errors import FormalError
from .germs import Germ
from .series import LSeries, reversion

DEFAULT_BITS = 200


def _ctx(bits):
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


# -- continued fractions ---------------------------------------------------------

@dataclass
class CFExpansion:
    """Continued fraction ``alpha = [0; a_1, a_2, ...]`` with denominators ``q_0 = 1, q_1, ...``."""

    alpha: Any
    quotients: List[int]
    denominators: List[int]
    numerators: List[int]
    terminated: bool = False
    bits: int = DEFAULT_BITS

    def verify(self):
        """Recurrence and approximation checks; raises ``CF_INCONSISTENT`` on failure."""
        q = self.denominators
        for n, a in enumerate(self.quotients, start=1):
            prev = q[n - 2] if n >= 2 else 0
            if q[n] != a * q[n - 1] + prev:
                raise FormalError("CF_INCONSISTENT", f"q_{n} breaks the recurrence")
        if any(q[i + 1] <= q[i] for i in range(1, len(q) - 1)):
            raise FormalError("CF_INCONSISTENT", "denominators are not increasing")
        if self.alpha is not None:
            if isinstance(self.alpha, Fraction):
                alpha = self.alpha
                approx = lambda n: Fraction(self.numerators[n], q[n])
                recip = lambda n: Fraction(1, q[n] * q[n + 1])
            else:
                ctx = _ctx(self.bits)
                alpha = _as_mpf(self.alpha, ctx)
                approx = lambda n: ctx.mpf(self.numerators[n]) / q[n]
                recip = lambda n: ctx.mpf(1) / (q[n] * q[n + 1])
            for n in range(len(q) - 1):
                err = abs(alpha - approx(n))
                bound = recip(n)
                # a rational alpha meets the bound with equality at its last step
                last = self.terminated and n == len(q) - 2
                if err > bound or (err == bound and not last):
                    raise FormalError("CF_INCONSISTENT", f"convergent {n} is too far from alpha")
        return True

    def to_json(self):
        return {"kind": "continued_fraction", "quotients": self.quotients,
                "denominators": [str(q) for q in self.denominators], "terminated": self.terminated}


def _as_mpf(alpha, ctx):
    if callable(alpha):
        return ctx.mpf(alpha(ctx))
    if isinstance(alpha, Fraction):
        return ctx.mpf(alpha.numerator) / alpha.denominator
    return ctx.mpf(alpha)


def _convergents(quotients):
    # p_0 / q_0 = 0 / 1 for alpha in (0, 1)
    p = [0]
    q = [1]
    p_prev, q_prev = 1, 0
    for a in quotients:
        p_new = a * p[-1] + p_prev
        q_new = a * q[-1] + q_prev
        p_prev, q_prev = p[-1], q[-1]
        p.append(p_new)
        q.append(q_new)
    return p, q


def from_quotients(quotients, alpha=None):
    """Build the expansion from partial quotients ``a_1, a_2, ...`` (all >= 1)."""
    quotients = [int(a) for a in quotients]
    if any(a < 1 for a in quotients):
        raise FormalError("BAD_INPUT", "partial quotients must be positive integers")
    p, q = _convergents(quotients)
    return CFExpansion(alpha, quotients, q, p)


def _exact_quotients(x, terms):
    quotients = []
    while x and len(quotients) < terms:
        x = 1 / x
        a = floor(x)
        quotients.append(a)
        x -= a
    return quotients, x == 0


def continued_fraction(alpha, terms, bits=DEFAULT_BITS):
    """Expansion of ``alpha`` in (0, 1) with up to ``terms`` partial quotients.

    ``alpha`` may be

    * a Fraction or ``"p/q"`` string: exact, the expansion terminates;
    * a decimal string, read as known to its last digit: only quotients
      shared by both ends of the rounding interval are kept;
    * a callable ``ctx -> value``, re-evaluated with doubled precision
      whenever ``q_n`` exceeds ``2^(bits/4)``.
    """
    if isinstance(alpha, (int, Fraction)) or (isinstance(alpha, str) and "/" in alpha):
        x = Fraction(alpha)
        if not 0 < x < 1:
            raise FormalError("BAD_INPUT", "alpha must lie in (0, 1)")
        quotients, terminated = _exact_quotients(x, terms)
        cf = from_quotients(quotients, x)
        cf.terminated = terminated
        return cf
    if isinstance(alpha, str):
        try:
            x = Fraction(alpha)
        except ValueError as exc:
            raise FormalError("BAD_INPUT", f"not a number: {alpha!r}") from exc
        if not 0 < x < 1:
            raise FormalError("BAD_INPUT", "alpha must lie in (0, 1)")
        digits = len(alpha.strip().partition(".")[2].lower().partition("e")[0])
        half = Fraction(1, 2 * 10 ** digits)
        lo, _ = _exact_quotients(x - half, terms + 1)
        hi, _ = _exact_quotients(x + half, terms + 1)
        known = 0
        # the last shared quotient may still be cut short on one side
        while known < min(len(lo), len(hi)) - 1 and lo[known] == hi[known]:
            known += 1
        if known < terms:
            raise FormalError("PRECISION_EXHAUSTED",
                              f"{digits} digits determine only {known} partial quotients")
        cf = from_quotients(lo[:terms], x)
        cf.bits = max(bits, 4 * digits)
        return cf
    while True:
        ctx = _ctx(bits)
        x = _as_mpf(alpha, ctx)
        if not 0 < x < 1:
            raise FormalError("BAD_INPUT", "alpha must lie in (0, 1)")
        quotients = []
        q_prev, q = 0, 1
        exhausted = False
        while len(quotients) < terms:
            x = 1 / x
            a = int(ctx.floor(x))
            x -= a
            quotients.append(a)
            q_prev, q = q, a * q + q_prev
            if q > 2 ** (bits // 4):
                exhausted = True
                break
        if exhausted and len(quotients) < terms:
            if bits > 1 << 16:
                raise FormalError("PRECISION_EXHAUSTED", "precision limit reached")
            bits *= 2
            continue
        cf = from_quotients(quotients, alpha)
        cf.bits = bits
        return cf


def golden_mean(ctx):
    return (ctx.sqrt(5) - 1) / 2


def quotients_by_rule(rule, terms):
    """Quotients with ``a_(j+1) = rule(q_j)``; e.g. ``rule = lambda q: q``."""
    quotients = []
    q_prev, q = 0, 1
    for _ in range(terms):
        a = max(1, int(rule(q)))
        quotients.append(a)
        q_prev, q = q, a * q + q_prev
    return quotients


# -- Brjuno sums -----------------------------------------------------------------

@dataclass
class BrjunoProfile:
    terms: list
    partial_sums: list
    verdict: str
    horizon: int

    def to_json(self):
        return {"kind": "brjuno_profile", "terms": [mpmath.nstr(t, 17) for t in self.terms],
                "partial_sums": [mpmath.nstr(s, 17) for s in self.partial_sums],
                "verdict": self.verdict, "horizon": self.horizon}


def brjuno_profile(cf, terms=None, bits=64):
    """Partial sums of ``sum_(j >= 0) log(q_(j+1)) / q_j``.

    The verdict is ``advisory-bounded`` when the last terms decay
    geometrically and ``advisory-growing`` otherwise; no finite horizon can
    decide the condition.
    """
    q = cf.denominators
    available = len(q) - 1
    n = available if terms is None else terms
    if n > available:
        raise FormalError("PRECISION_EXHAUSTED", f"only {available} terms are available")
    ctx = _ctx(bits)
    out_terms, sums = [], []
    total = ctx.mpf(0)
    for j in range(n):
        t = ctx.log(q[j + 1]) / q[j]
        total += t
        out_terms.append(t)
        sums.append(total)
    if cf.terminated and n == available:
        verdict = "advisory-finite"
    elif len(out_terms) >= 4 and all(out_terms[i + 1] < out_terms[i] for i in range(n - 3, n - 1)) \
            and out_terms[-1] < ctx.mpf(10) ** -3:
        verdict = "advisory-bounded"
    else:
        verdict = "advisory-growing"
    return BrjunoProfile(out_terms, sums, verdict, n)


# -- Koenigs linearization ---------------------------------------------------------

@dataclass
class KoenigsReport:
    value: Any
    multiplier: Any
    residual: Any
    differences: list
    iterations: int
    converged: bool

    def to_json(self):
        s = lambda z: {"re": mpmath.nstr(mpmath.re(z), 30), "im": mpmath.nstr(mpmath.im(z), 30)}
        return {"kind": "koenigs", "value": s(self.value), "multiplier": s(self.multiplier),
                "residual": mpmath.nstr(self.residual, 10),
                "differences": [mpmath.nstr(d, 10) for d in self.differences],
                "iterations": self.iterations, "converged": self.converged}


def _series_map(series, ctx):
    coeffs = [ctx.mpc(series.field.to_complex(c, ctx)) for c in series.coeffs]

    def f(z):
        acc = ctx.mpc(0)
        for c in reversed(coeffs):
            acc = acc * z + c
        return acc
    return f, coeffs[1]


def koenigs(f, z, iterations=60, bits=DEFAULT_BITS, multiplier=None, tol=None):
    """Evaluate the Koenigs linearizer ``h(z) = lim a^-n f^n(z)``.

    ``f`` is a Germ or power series (evaluated as a polynomial) or a callable
    together with ``multiplier = f'(0)``.  For ``|a| > 1`` a series is
    inverted first.  Raises ``NON_HYPERBOLIC`` when ``|a| = 1`` and
    ``NO_CONVERGENCE`` when the orbit leaves the basin or the differences
    stop decreasing.
    """
    ctx = _ctx(bits)
    tol = ctx.mpf(tol) if tol is not None else ctx.mpf(2) ** (-bits // 2)
    series = f.series if isinstance(f, Germ) else f if isinstance(f, LSeries) else None
    if series is not None:
        a = ctx.mpc(series.field.to_complex(series[1], ctx))
    elif multiplier is None:
        raise FormalError("BAD_INPUT", "a callable map needs its multiplier")
    else:
        a = ctx.mpc(multiplier)
    if abs(abs(a) - 1) <= ctx.mpf(10) ** -12 or a == 0:
        raise FormalError("NON_HYPERBOLIC", "multiplier has modulus 1 (or is 0)")
    if series is not None:
        inverted = abs(a) > 1
        if inverted:
            series = reversion(series)
        fmap, a = _series_map(series, ctx)
    else:
        inverted = False
        fmap = lambda w: ctx.mpc(f(w))
        if abs(a) > 1:
            raise FormalError("BAD_INPUT", "repelling callable maps are not inverted; pass a series")
    z = ctx.mpc(z)
    w = z
    scale = ctx.mpc(1)
    inv_a = 1 / a
    h_prev = z
    diffs = []
    for n in range(1, iterations + 1):
        w = fmap(w)
        scale *= inv_a
        if not ctx.isfinite(abs(w)) or abs(w) > 10 * max(1, abs(z)):
            raise FormalError("NO_CONVERGENCE", "orbit leaves the basin of the fixed point")
        h = scale * w
        diffs.append(abs(h - h_prev))
        h_prev = h
    # residual of the functional equation h(f(z)) = a h(z) with the same n
    h_fz = scale * fmap(w)
    residual = abs(h_fz - a * h_prev)
    tail = diffs[len(diffs) // 2:]
    converged = bool(tail) and tail[-1] <= max(tail[0], tol)
    if not converged:
        raise FormalError("NO_CONVERGENCE", "successive differences do not decrease")
    if inverted:
        # h for f^-1 with multiplier 1/a linearizes f with multiplier a
        a = 1 / a
    return KoenigsReport(h_prev, a, residual, diffs, iterations, converged)


# -- diophantine profile -----------------------------------------------------------

@dataclass
class DiophantineProfile:
    distances: list
    verdict: str
    horizon: int
    first_violation: Optional[int] = None

    def to_json(self):
        return {"kind": "diophantine_profile", "distances": [mpmath.nstr(d, 17) for d in self.distances],
                "verdict": self.verdict, "horizon": self.horizon, "first_violation": self.first_violation}


def lattice_distance(w, tau, ctx=mpmath.mp):
    """``min |w - (m + n tau)|`` over integers ``m, n``."""
    w = ctx.mpc(w)
    tau = ctx.mpc(tau)
    if tau.imag <= 0:
        raise FormalError("BAD_INPUT", "tau must have positive imaginary part")
    reach = 2 + int(ceil(abs(tau) / tau.imag))
    n0 = int(ctx.floor(w.imag / tau.imag))
    best = None
    for n in range(n0 - reach, n0 + reach + 1):
        # best m for this n
        base = w - n * tau
        m_c = int(ctx.nint(base.real))
        for m in (m_c - 1, m_c, m_c + 1):
            d = abs(base - m)
            if best is None or d < best:
                best = d
    return best


def diophantine_profile(tau, z0, K, alpha=2.0, eps=1e-3, bits=100):
    """Distances ``d_k`` of ``k z0`` to the lattice for ``k = 1..K``, and the advisory verdict."""
    if K < 1:
        raise FormalError("BAD_INPUT", "K must be at least 1")
    ctx = _ctx(bits)
    tau = ctx.mpc(tau)
    z0 = ctx.mpc(z0)
    alpha = ctx.mpf(alpha)
    eps = ctx.mpf(eps)
    ds = []
    first = None
    for k in range(1, K + 1):
        d = lattice_distance(k * z0, tau, ctx)
        ds.append(d)
        if first is None and d < eps / ctx.mpf(k) ** alpha:
            first = k
    verdict = "advisory-holds-at-horizon" if first is None else "advisory-violated"
    return DiophantineProfile(ds, verdict, K, first)
