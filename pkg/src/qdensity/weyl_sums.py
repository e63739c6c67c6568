"""Quadratic torus orbits, hit counting and exponential sums.

Everything phase-like is reduced mod 1 in integer mantissa arithmetic before
any floating-point call: for a polynomial phase at m ~ 1e6 a double loses the
entire fractional part, while mantissa addition mod 2**F is exact, so the only
uncertainty is the propagated input radius.  The hot loops run on raw
mantissas with second-difference recurrences and re-synchronize from the
closed form every 2**16 steps.

Hit tests against a threshold are three-valued: certainly inside, certainly
outside, or ambiguous within the certified radius.  Ambiguity at the working
precision raises instead of guessing; with exact rational data the radius is
zero and boundary ties resolve exactly (a distance equal to the threshold
counts as a hit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionExhausted, ValidationError
from .fixed import DEFAULT_PRECISION, FixedReal, as_fixed

TWO_PI = 2.0 * math.pi
DEFAULT_REDUCTION_TOL = Fraction(1, 1 << 64)
DEFAULT_PHASE_TOL = Fraction(1, 1 << 30)
RESYNC_PERIOD = 1 << 16


@dataclass(frozen=True)
class TorusPoint2:
    """Point of the 2-torus with both coordinates reduced into [0, 1)."""

    x: FixedReal
    y: FixedReal

    @classmethod
    def from_values(cls, x, y, F: int = DEFAULT_PRECISION) -> "TorusPoint2":
        return cls(as_fixed(x, F).frac_part(), as_fixed(y, F).frac_part())


@dataclass(frozen=True)
class WeylSumResult:
    re: float
    im: float
    T: int
    n: int

    def __post_init__(self):
        if self.magnitude() > self.T * (1.0 + 1e-9):
            raise ValidationError("exponential sum cannot exceed its length")

    def magnitude(self) -> float:
        return math.hypot(self.re, self.im)


def phi(alpha: FixedReal, beta: FixedReal, gamma: FixedReal, m: int,
        tol=DEFAULT_REDUCTION_TOL) -> TorusPoint2:
    """Orbit point (2*alpha*m + beta, alpha*m^2 + beta*m + gamma) mod 1.

    Refuses (PrecisionExhausted) when the propagated radius at this m exceeds
    the reduction tolerance.
    """
    x = alpha.mul_int(2 * m) + beta
    y = alpha.mul_int(m * m) + beta.mul_int(m) + gamma
    return TorusPoint2(x.frac_part(tol=tol), y.frac_part(tol=tol))


def torus_dist(u: TorusPoint2, v: TorusPoint2) -> float:
    """Euclidean distance on the 2-torus, each coordinate folded to [-1/2, 1/2]."""
    dx = (u.x - v.x).circle_norm().to_float()
    dy = (u.y - v.y).circle_norm().to_float()
    return math.hypot(dx, dy)


def _fold(x: int, S: int, H: int) -> int:
    return ((x + H) % S) - H


def _threshold_ints(thr_sq: Fraction, S: int) -> tuple[int, int]:
    """(num, den) with dist^2 <= thr_sq  <=>  (dx^2 + dy^2) * den <= num."""
    scaled = thr_sq * S * S
    return scaled.numerator, scaled.denominator


def count_orbit_hits(alpha: FixedReal, beta: FixedReal, gamma: FixedReal,
                     v0: TorusPoint2, T: int, delta: float,
                     tol=DEFAULT_REDUCTION_TOL,
                     return_hits: bool = False):
    """Count 1 <= m <= T with the orbit point within delta of v0 on the torus.

    The comparison is closed (distance exactly delta is a hit) and every
    decision is certified against the propagated radius at m = T.
    """
    if T < 1:
        raise ValidationError("orbit length T must be >= 1")
    if not (0.0 < delta < 0.5):
        raise ValidationError("delta must lie in (0, 1/2)")
    F = alpha.F
    if beta.F != F or gamma.F != F:
        raise ValidationError("orbit parameters must share one precision")
    S = 1 << F
    H = S >> 1
    A, B, C = alpha.mant, beta.mant, gamma.mant
    ea, eb, ec = alpha.err, beta.err, gamma.err

    vx = v0.x.with_precision(F)
    vy = v0.y.with_precision(F)
    VX, VY = vx.mant, vy.mant
    ev = max(vx.err, vy.err)

    # worst-case orbit radius over the whole scan, in ulps; the reference
    # point only shifts the comparison so its radius joins the margins below
    E_orbit = ea * (T * T + 2 * T) + eb * (T + 1) + ec
    if Fraction(E_orbit, S) > Fraction(tol):
        raise PrecisionExhausted(
            f"orbit radius at m={T} exceeds the reduction tolerance; raise the precision"
        )
    E = E_orbit + ev

    num, den = _threshold_ints(Fraction(delta) ** 2, S)
    # margin covers |true^2 - mid^2| for both coordinates at radius E
    margin = 2 * E * S + 2 * E * E
    hit_cut = num - margin * den
    miss_cut = num + margin * den

    thr_sq = Fraction(delta) ** 2
    exacts = (alpha.exact, beta.exact, gamma.exact, vx.exact, vy.exact)
    all_exact = all(e is not None for e in exacts)

    def exact_hit(m: int) -> bool:
        ae, be, ce, vxe, vye = exacts
        rx = (2 * ae * m + be - vxe) % 1
        ry = (ae * m * m + be * m + ce - vye) % 1
        if rx > Fraction(1, 2):
            rx -= 1
        if ry > Fraction(1, 2):
            ry -= 1
        return rx * rx + ry * ry <= thr_sq

    count = 0
    hits: list[int] = []
    x1 = (2 * A + B) % S            # 2*alpha*m + beta at m = 1
    x2 = (A + B + C) % S            # alpha*m^2 + beta*m + gamma at m = 1
    d2 = (3 * A + B) % S            # second coordinate first difference
    step1 = (2 * A) % S
    dd = step1
    m = 1
    while m <= T:
        dx = _fold(x1 - VX, S, H)
        dy = _fold(x2 - VY, S, H)
        lhs = (dx * dx + dy * dy) * den
        if lhs <= hit_cut:
            count += 1
            if return_hits:
                hits.append(m)
        elif lhs > miss_cut:
            pass
        else:
            # near the boundary: redo the margin with the per-m radius
            Em = ea * (m * m + 2 * m) + eb * (m + 1) + ec + ev
            gm = 2 * Em * (abs(dx) + abs(dy)) + 2 * Em * Em
            base = dx * dx + dy * dy
            if (base + gm) * den <= num:
                count += 1
                if return_hits:
                    hits.append(m)
            elif (base - gm) * den > num:
                pass
            elif all_exact:
                if exact_hit(m):
                    count += 1
                    if return_hits:
                        hits.append(m)
            else:
                raise PrecisionExhausted(
                    f"hit test ambiguous at m={m}; raise the precision"
                )
        m += 1
        if m > T:
            break
        if m % RESYNC_PERIOD == 0:
            x1 = (2 * A * m + B) % S
            x2 = (A * m * m + B * m + C) % S
            d2 = (A * (2 * m + 1) + B) % S
        else:
            x1 = (x1 + step1) % S
            x2 = (x2 + d2) % S
            d2 = (d2 + dd) % S
    if return_hits:
        return count, hits
    return count


def _phase_to_float(x: int, F: int) -> float:
    if F > 53:
        return math.ldexp(float(x >> (F - 53)), -53)
    return math.ldexp(float(x), -F)


def weyl_sum(n: int, alpha: FixedReal, beta: FixedReal, T: int,
             phase_tol=DEFAULT_PHASE_TOL) -> WeylSumResult:
    """Sum of e(n*alpha*m^2 + beta*m) for 1 <= m <= T, phases reduced in fixed point."""
    if T < 1:
        raise ValidationError("sum length T must be >= 1")
    alpha, beta = _align(alpha, beta)
    F = alpha.F
    S = 1 << F
    PA = n * alpha.mant
    ea = abs(n) * alpha.err
    PB = beta.mant
    eb = beta.err
    if Fraction(ea * T * T + eb * T, S) > Fraction(phase_tol):
        raise PrecisionExhausted("phase radius at m=T exceeds the phase tolerance")

    re = im = 0.0
    cre = cim = 0.0  # Kahan compensation
    x = (PA + PB) % S           # phase at m = 1
    d = (3 * PA + PB) % S
    dd = (2 * PA) % S
    cos, sin = math.cos, math.sin
    m = 1
    while m <= T:
        ang = TWO_PI * _phase_to_float(x, F)
        t = cos(ang) - cre
        s = re + t
        cre = (s - re) - t
        re = s
        t = sin(ang) - cim
        s = im + t
        cim = (s - im) - t
        im = s
        m += 1
        if m > T:
            break
        if m % RESYNC_PERIOD == 0:
            x = (PA * m * m + PB * m) % S
            d = (PA * (2 * m + 1) + PB) % S
        else:
            x = (x + d) % S
            d = (d + dd) % S
    return WeylSumResult(re, im, T, n)


def _align(a: FixedReal, b: FixedReal) -> tuple[FixedReal, FixedReal]:
    if a.F == b.F:
        return a, b
    F = max(a.F, b.F)
    return a.with_precision(F), b.with_precision(F)


def _sum_min_kernel(step_mant: int, step_err: int, count: int, T_cap: int, F: int) -> float:
    """Sum over m = 1..count of min(1 / ||m*step||, T_cap).

    The circle norm of each multiple is folded from the exact mantissa walk;
    a fold smaller than the accumulated radius is only tolerated when the
    radius is exactly zero (rational step hitting an integer), where the term
    saturates at T_cap.
    """
    S = 1 << F
    H = S >> 1
    total = 0.0
    comp = 0.0
    w = 0
    E = step_err * count
    fS = float(S)
    m = 1
    while m <= count:
        w = (w + step_mant) % S
        r = ((w + H) % S) - H
        ar = -r if r < 0 else r
        if ar <= E:
            if E == 0:
                term = float(T_cap)
            else:
                raise PrecisionExhausted(
                    f"circle norm at m={m} is below the certified radius"
                )
        elif ar * T_cap <= S:
            term = float(T_cap)
        else:
            term = fS / float(ar)
        t = term - comp
        s = total + t
        comp = (s - total) - t
        total = s
        m += 1
    return total


def weyl_differencing_bound(n: int, alpha: FixedReal, T: int,
                            phase_tol=DEFAULT_PHASE_TOL) -> float:
    """T + 2 * sum_{m=1}^{T} min(1/||2*n*m*alpha||, T).

    Classical differencing upper bound for |weyl_sum|^2; independent of the
    linear coefficient.
    """
    if T < 1:
        raise ValidationError("range T must be >= 1")
    F = alpha.F
    step = 2 * n * alpha.mant
    serr = 2 * abs(n) * alpha.err
    if Fraction(serr * T, 1 << F) > Fraction(phase_tol):
        raise PrecisionExhausted("linear phase radius exceeds the phase tolerance")
    return T + 2.0 * _sum_min_kernel(step, serr, T, T, F)


def sum_min(alpha: FixedReal, M: int, T: int, phase_tol=DEFAULT_PHASE_TOL) -> float:
    """Sum over m = 1..M*T of min(1/||m*alpha||, T)."""
    if M < 0:
        raise ValidationError("M must be >= 0")
    if T < 1:
        raise ValidationError("T must be >= 1")
    count = M * T
    if count == 0:
        return 0.0
    if Fraction(alpha.err * count, 1 << alpha.F) > Fraction(phase_tol):
        raise PrecisionExhausted("linear phase radius exceeds the phase tolerance")
    return _sum_min_kernel(alpha.mant, alpha.err, count, T, alpha.F)


def sum_min_explicit_bound(alpha: FixedReal, M: int, T: int) -> float:
    """4*M*T^2/q + 8*(M+1)*T*log(T) with q the best denominator <= T.

    Natural logarithm; the denominator comes from dirichlet_approx so the
    value is reproducible bit for bit.
    """
    from .diophantine import dirichlet_approx

    if T < 2:
        raise ValidationError("T must be >= 2")
    if M < 0:
        raise ValidationError("M must be >= 0")
    q = dirichlet_approx(alpha, T).q
    return 4.0 * M * T * T / q + 8.0 * (M + 1) * T * math.log(T)
