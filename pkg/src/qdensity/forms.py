"""Ternary quadratic forms over the rationals and the standard isotropic form.

Forms are stored as exact rational Gram matrices with the row-vector
convention ``Q(v) = v * gram * v^T`` and ``B(u, v) = u * gram * v^T``; all
matrix actions elsewhere in the package multiply row vectors on the right, so
the identities for the unipotent orbit hold literally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ValidationError
from .fixed import DEFAULT_PRECISION, FixedReal, as_fixed

Gram = tuple[tuple[Fraction, Fraction, Fraction], ...]


def _to_gram(rows) -> Gram:
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise ValidationError("gram matrix must be 3x3")
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _det3(g: Gram) -> Fraction:
    return (
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    )


def _signature(g: Gram) -> tuple[int, int, int]:
    """(positives, negatives, zeros) via rational congruence diagonalization."""
    a = [list(row) for row in g]
    n = 3
    pos = neg = zero = 0
    for step in range(n):
        # find a usable pivot on the diagonal
        piv = next((j for j in range(step, n) if a[j][j] != 0), None)
        if piv is None:
            piv_off = next(
                ((i, j) for i in range(step, n) for j in range(i + 1, n) if a[i][j] != 0),
                None,
            )
            if piv_off is None:
                zero += n - step
                break
            i, j = piv_off
            # v_i += v_j turns the zero diagonal entry into 2*a[i][j]
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        if piv != step:
            a[piv], a[step] = a[step], a[piv]
            for row in a:
                row[piv], row[step] = row[step], row[piv]
        d = a[step][step]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for j in range(step + 1, n):
            f = a[step][j] / d
            if f == 0:
                continue
            for k in range(n):
                a[j][k] -= f * a[step][k]
            for k in range(n):
                a[k][j] -= f * a[k][step]
    return pos, neg, zero


@dataclass(frozen=True)
class TernaryForm:
    """Symmetric rational Gram matrix of a nondegenerate indefinite ternary form."""

    gram: Gram

    @classmethod
    def from_rows(cls, rows, validate: bool = True) -> "TernaryForm":
        g = _to_gram(rows)
        if validate:
            for i in range(3):
                for j in range(3):
                    if g[i][j] != g[j][i]:
                        raise ValidationError("gram matrix must be symmetric")
            if _det3(g) == 0:
                raise ValidationError("gram matrix must be nondegenerate")
            sig = _signature(g)
            if sig not in ((2, 1, 0), (1, 2, 0)):
                raise ValidationError(f"form must be indefinite ternary, signature {sig}")
        return cls(g)

    @classmethod
    def from_coefficients(cls, a11, a22, a33, a12, a13, a23, validate: bool = True) -> "TernaryForm":
        return cls.from_rows(
            [[a11, a12, a13], [a12, a22, a23], [a13, a23, a33]], validate=validate
        )

    @classmethod
    def from_string(cls, text: str, validate: bool = True) -> "TernaryForm":
        """Parse 'a11 a22 a33 a12 a13 a23' with rational entries."""
        parts = text.split()
        if len(parts) != 6:
            raise ValidationError("form literal needs six rational entries")
        vals = [Fraction(p) for p in parts]
        return cls.from_coefficients(*vals, validate=validate)

    def to_string(self) -> str:
        g = self.gram
        order = (g[0][0], g[1][1], g[2][2], g[0][1], g[0][2], g[1][2])
        return " ".join(str(x) for x in order)

    def determinant(self) -> Fraction:
        return _det3(self.gram)

    def signature(self) -> tuple[int, int, int]:
        return _signature(self.gram)

    def evaluate_exact(self, v: Sequence) -> Fraction:
        """Q(v) for a rational triple, exact."""
        x = [Fraction(c) for c in v]
        g = self.gram
        total = Fraction(0)
        for i in range(3):
            total += g[i][i] * x[i] * x[i]
        total += 2 * (g[0][1] * x[0] * x[1] + g[0][2] * x[0] * x[2] + g[1][2] * x[1] * x[2])
        return total


_STANDARD = TernaryForm.from_rows([[0, 0, -2], [0, 1, 0], [-2, 0, 0]])


def standard_form() -> TernaryForm:
    """The isotropic form Q(v1, v2, v3) = v2^2 - 4*v1*v3."""
    return _STANDARD


@dataclass(frozen=True)
class ShiftVector:
    """Real shift (alpha, beta, gamma) at a shared fixed-point precision."""

    alpha: FixedReal
    beta: FixedReal
    gamma: FixedReal

    def __post_init__(self):
        if not (self.alpha.F == self.beta.F == self.gamma.F):
            raise ValidationError("shift components must share one precision")

    @property
    def precision(self) -> int:
        return self.alpha.F

    @classmethod
    def from_values(cls, a, b, c, F: int = DEFAULT_PRECISION) -> "ShiftVector":
        return cls(as_fixed(a, F), as_fixed(b, F), as_fixed(c, F))

    def components(self) -> tuple[FixedReal, FixedReal, FixedReal]:
        return (self.alpha, self.beta, self.gamma)

    def is_rational(self) -> bool:
        return all(x.exact is not None for x in self.components())


def evaluate(form: TernaryForm, v: Sequence, tol=None, F: Optional[int] = None) -> FixedReal:
    """Q(v) for a real triple, with the error bound tracked.

    Raises PrecisionExhausted when ``tol`` is given and the certified radius
    of the result exceeds it.
    """
    if F is None:
        F = next((c.F for c in v if isinstance(c, FixedReal)), DEFAULT_PRECISION)
    x = [as_fixed(c, F) for c in v]
    g = form.gram
    total = FixedReal.zero(F)
    for i in range(3):
        if g[i][i] != 0:
            total = total + (x[i] * x[i]).mul_fraction(g[i][i])
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if g[i][j] != 0:
            total = total + (x[i] * x[j]).mul_fraction(2 * g[i][j])
    total.check_radius(tol)
    return total


def evaluate_shifted(form: TernaryForm, xi: ShiftVector, v: Sequence[int], tol=None) -> FixedReal:
    """Q(v + xi) for an integer triple v."""
    v = tuple(v)
    if any(not isinstance(c, int) for c in v) or len(v) != 3:
        raise ValidationError("shifted evaluation expects an integer triple")
    shifted = (
        xi.alpha.add_int(v[0]),
        xi.beta.add_int(v[1]),
        xi.gamma.add_int(v[2]),
    )
    return evaluate(form, shifted, tol=tol, F=xi.precision)


def _normalize_primitive(v: tuple[int, int, int]) -> tuple[int, int, int]:
    g = math.gcd(math.gcd(abs(v[0]), abs(v[1])), abs(v[2]))
    w = tuple(c // g for c in v)
    lead = next(c for c in w if c != 0)
    if lead < 0:
        w = tuple(-c for c in w)
    return w  # type: ignore[return-value]


def find_isotropic_vector(form: TernaryForm, B: int) -> Optional[tuple[int, int, int]]:
    """Least primitive integer zero of the form in the box max|v_i| <= B.

    Vectors are reduced to primitive with positive leading coordinate and the
    lexicographically least one is returned; ``None`` proves nothing beyond
    the searched box.
    """
    if B < 1:
        raise ValidationError("search box must have B >= 1")
    best: Optional[tuple[int, int, int]] = None
    for v1 in range(-B, B + 1):
        for v2 in range(-B, B + 1):
            for v3 in range(-B, B + 1):
                if v1 == 0 and v2 == 0 and v3 == 0:
                    continue
                if form.evaluate_exact((v1, v2, v3)) == 0:
                    cand = _normalize_primitive((v1, v2, v3))
                    if best is None or cand < best:
                        best = cand
    return best


def verify_equivalence(form_prime: TernaryForm, m: int, M: Sequence[Sequence[int]]) -> bool:
    """Check m*Q'(v) = Q(v M) for all v, i.e. m*gram(Q') == M*gram(Q)*M^T exactly."""
    if m == 0:
        raise ValidationError("scale factor m must be nonzero")
    rows = [[int(x) for x in row] for row in M]
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise ValidationError("equivalence matrix must be 3x3")
    g = _STANDARD.gram
    # rhs = M * G * M^T
    mg = [[sum(rows[i][k] * g[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    rhs = [[sum(mg[i][k] * rows[j][k] for k in range(3)) for j in range(3)] for i in range(3)]
    lhs = [[m * form_prime.gram[i][j] for j in range(3)] for i in range(3)]
    return all(lhs[i][j] == rhs[i][j] for i in range(3) for j in range(3))
