"""Continued fractions, best rational approximation and badness exponents.

Partial quotients of an inexact value are certified by running the Gauss map
on the exact dyadic interval endpoints: a quotient is emitted only while both
endpoints share the same floor, and extraction additionally stops once
``q_k^2 * err > 1/4``, before the interval can flip a quotient.  Exactly
rational inputs expand by the Euclidean algorithm and terminate.

The badness exponent of an irrational is estimated from its convergents,
which witness the minima of ``|q*alpha - p|``: local exponents
``-log(dist_k)/log(q_k)`` are recorded per convergent and the headline
exponent is the least-squares slope of ``-log dist`` against ``log q``
(clamped below by 1), so that the multiplicative constant is absorbed by the
intercept instead of polluting the exponent at small denominators.  The
certificate constant is then recomputed to make
``dist >= c_hat / q^kappa_hat`` literally true for every denominator up to
the certified range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import AllRational, PrecisionExhausted, RationalDetected, ValidationError
from .fixed import FixedReal, parse_real  # noqa: F401  (parse_real is this module's literal grammar)
from .forms import ShiftVector


@dataclass
class CFExpansion:
    """Certified prefix of a continued fraction.

    ``rational`` means the value is exactly rational and the expansion is
    complete; ``exhausted`` means the precision guard stopped extraction
    before ``n_terms`` quotients were produced.
    """

    quotients: list[int]
    rational: bool = False
    exhausted: bool = False


def continued_fraction(alpha: FixedReal, n_terms: int) -> CFExpansion:
    """Partial quotients of alpha, each one certified at the working precision."""
    if n_terms < 1:
        raise ValidationError("need at least one partial quotient")

    if alpha.exact is not None:
        qs: list[int] = []
        x = alpha.exact
        a = math.floor(x)
        qs.append(a)
        r = x - a
        while r != 0 and len(qs) < n_terms:
            x = 1 / r
            a = math.floor(x)
            qs.append(a)
            r = x - a
        return CFExpansion(qs, rational=(r == 0), exhausted=False)

    S = 1 << alpha.F
    err0 = Fraction(alpha.err, S)
    lo = Fraction(alpha.mant - alpha.err, S)
    hi = Fraction(alpha.mant + alpha.err, S)
    qs = []
    q_prev, q_cur = 1, 0  # denominator recurrence seeds q_{-2}, q_{-1}
    while len(qs) < n_terms:
        a = math.floor(lo)
        if math.floor(hi) != a:
            return CFExpansion(qs, exhausted=True)
        q_next = a * q_cur + q_prev
        if len(qs) > 0 and q_next * q_next * err0 > Fraction(1, 4):
            return CFExpansion(qs, exhausted=True)
        qs.append(a)
        q_prev, q_cur = q_cur, q_next
        lo_f, hi_f = lo - a, hi - a
        if lo_f == 0:
            # the interval touches the integer boundary; nothing further is certifiable
            return CFExpansion(qs, exhausted=True)
        lo, hi = 1 / hi_f, 1 / lo_f
    return CFExpansion(qs)


@dataclass(frozen=True)
class Convergent:
    """Best rational approximation p/q with the exact circle distance |q*alpha - p|."""

    p: int
    q: int
    dist: FixedReal

    def __post_init__(self):
        if self.q < 1:
            raise ValidationError("convergent denominator must be positive")
        if math.gcd(abs(self.p), self.q) != 1:
            raise ValidationError("convergent must be in lowest terms")


def convergents(cf: CFExpansion | list[int], alpha: FixedReal) -> list[Convergent]:
    """Convergents of a certified quotient prefix via the standard recurrence."""
    qs = cf.quotients if isinstance(cf, CFExpansion) else list(cf)
    out: list[Convergent] = []
    p_prev, p_cur = 0, 1
    q_prev, q_cur = 1, 0
    for a in qs:
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        dist = abs(alpha.mul_int(q_cur).add_int(-p_cur))
        out.append(Convergent(p_cur, q_cur, dist))
    return out


def _expand_until(alpha: FixedReal, stop_q: int) -> tuple[CFExpansion, list[Convergent]]:
    """Grow the expansion until some convergent denominator exceeds stop_q."""
    n_terms = 32
    while True:
        cf = continued_fraction(alpha, n_terms)
        conv = convergents(cf, alpha)
        if conv and conv[-1].q > stop_q:
            return cf, conv
        if cf.rational or cf.exhausted:
            return cf, conv
        if n_terms > 1 << 20:
            raise PrecisionExhausted("continued fraction did not reach the requested range")
        n_terms *= 2


def convergents_up_to(alpha: FixedReal, q_max: int) -> list[Convergent]:
    """All certified convergents with denominator at most q_max."""
    if q_max < 1:
        raise ValidationError("q_max must be >= 1")
    _, conv = _expand_until(alpha, q_max)
    return [c for c in conv if c.q <= q_max]


def dirichlet_approx(alpha: FixedReal, T: int) -> Convergent:
    """The convergent with the largest denominator q <= T.

    The returned pair satisfies |alpha - p/q| <= 1/(T*q) because the next
    denominator exceeds T (or the expansion terminated exactly).
    """
    if T < 1:
        raise ValidationError("approximation range T must be >= 1")
    cf, conv = _expand_until(alpha, T)
    within = [c for c in conv if c.q <= T]
    if not within:
        raise PrecisionExhausted("no certified convergent with q <= T")
    if conv[-1].q <= T and not cf.rational:
        raise PrecisionExhausted("precision ran out before the denominators passed T")
    return within[-1]


@dataclass
class DiophantineEstimate:
    """Finite-range certificate dist >= c_hat / q^kappa_hat for q <= q_max."""

    kappa_hat: float
    c_hat: float
    q_max: int
    per_convergent: list[tuple[int, float]] = field(default_factory=list)


def estimate_kappa(alpha: FixedReal, q_max: int) -> DiophantineEstimate:
    """Empirical badness exponent of alpha over denominators up to q_max.

    Convergents suffice as sample points since they minimize the circle
    distance among all smaller denominators; a terminating expansion raises
    RationalDetected because rational values admit no such exponent.
    """
    if q_max < 2:
        raise ValidationError("q_max must be >= 2")
    if alpha.exact is not None:
        raise RationalDetected("value is rational; badness exponent undefined")
    cf, conv = _expand_until(alpha, q_max)
    if cf.rational:
        raise RationalDetected("continued fraction terminated")
    if conv[-1].q <= q_max:
        raise PrecisionExhausted("could not certify convergents through q_max")
    all_pts = [(c.q, c.dist.to_float()) for c in conv if c.q <= q_max]
    pts = [(q, d) for q, d in all_pts if q >= 2]
    if not pts:
        raise ValidationError("no convergent with 2 <= q <= q_max")
    local = [(q, -math.log(d) / math.log(q)) for q, d in pts]
    if len(pts) == 1:
        slope = local[0][1]
    else:
        xs = [math.log(q) for q, _ in pts]
        ys = [-math.log(d) for _, d in pts]
        mx = sum(xs) / len(xs)
        my = sum(ys) / len(ys)
        sxx = sum((x - mx) ** 2 for x in xs)
        sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
        slope = sxy / sxx
    kappa_hat = max(1.0, slope)
    # the constant covers every convergent in range, q = 1 included, shaved by
    # one part in 1e12 so float rounding cannot break the certificate
    c_hat = min(d * q**kappa_hat for q, d in all_pts) * (1.0 - 1e-12)
    return DiophantineEstimate(kappa_hat, c_hat, q_max, local)


@dataclass
class DirectionChoice:
    """Best coprime direction (a, c) and the quality of alpha*a^2 + beta*a*c + gamma*c^2."""

    a: int
    c: int
    alpha_tilde: FixedReal
    estimate: DiophantineEstimate


def _direction_candidates(B: int):
    # first nonzero entry positive; (a,c) and (-a,-c) give the same value
    for a in range(0, B + 1):
        lo = 1 if a == 0 else -B
        for c in range(lo, B + 1):
            if a == 0 and c == 0:
                continue
            if math.gcd(a, abs(c)) != 1:
                continue
            yield a, c


def diophantine_direction(xi: ShiftVector, B: int, q_max: int = 10_000) -> DirectionChoice:
    """Scan coprime directions |a|, |c| <= B for the best badness exponent.

    Directions whose combination is detected rational are skipped; if every
    candidate is rational the shift cannot feed the solver and AllRational is
    raised.  Ties in the exponent break by smaller |a| + |c|, then
    lexicographically, so the reduction is order-independent.
    """
    if B < 1:
        raise ValidationError("direction bound must be >= 1")
    best: Optional[tuple[float, int, tuple[int, int], DirectionChoice]] = None
    for a, c in _direction_candidates(B):
        combo = xi.alpha.mul_int(a * a) + xi.beta.mul_int(a * c) + xi.gamma.mul_int(c * c)
        if combo.exact is not None:
            continue
        est = estimate_kappa(combo, q_max)
        key = (est.kappa_hat, abs(a) + abs(c), (a, c))
        if best is None or key < best[:3]:
            best = (*key, DirectionChoice(a, c, combo, est))
    if best is None:
        raise AllRational("every direction produced a rational combination")
    return best[3]
