import math
from fractions import Fraction

import mpmath
import pytest

from qdensity import (
    FixedReal,
    ShiftVector,
    TernaryForm,
    ValidationError,
    evaluate,
    evaluate_shifted,
    find_isotropic_vector,
    iota,
    standard_form,
    unipotent,
    verify_equivalence,
    SL2Matrix,
)

STD = standard_form()

# high-precision reference, frozen from a 45-digit evaluation
MINUS_FOUR_SQRT2 = -5.656854249492380195206754896838792314278687


class TestStandardForm:
    @pytest.mark.parametrize(
        "v,expected", [((1, 2, 1), 0), ((0, 1, 0), 1), ((1, 0, -1), 4)]
    )
    def test_known_values(self, v, expected):
        assert STD.evaluate_exact(v) == expected

    def test_gram_layout(self):
        assert STD.gram == (
            (Fraction(0), Fraction(0), Fraction(-2)),
            (Fraction(0), Fraction(1), Fraction(0)),
            (Fraction(-2), Fraction(0), Fraction(0)),
        )

    def test_signature_and_determinant(self):
        assert STD.signature() == (2, 1, 0)
        assert STD.determinant() != 0

    def test_string_roundtrip(self):
        text = STD.to_string()
        assert TernaryForm.from_string(text).gram == STD.gram
        assert text == "0 1 0 0 -2 0"


class TestEvaluate:
    def test_zero_vector(self):
        assert evaluate(STD, (0, 0, 0)).exact == 0

    def test_ones(self):
        assert evaluate(STD, (1, 1, 1)).exact == -3

    def test_sqrt2_direction(self, sqrt2):
        val = evaluate(STD, (sqrt2, 0, 1))
        assert val.to_float() == pytest.approx(MINUS_FOUR_SQRT2, abs=1e-12)
        hi_ref = -4 * mpmath.mpf(2) ** 0.5
        assert val.lo() <= Fraction(str(mpmath.nstr(hi_ref, 30))) <= val.hi() or abs(
            val.to_float() - float(hi_ref)
        ) < 1e-12

    def test_tolerance_refusal(self, sqrt2):
        rough = FixedReal(sqrt2.mant, sqrt2.err + (1 << 250), sqrt2.F, None)
        with pytest.raises(Exception):
            evaluate(STD, (rough, 0, 1), tol=Fraction(1, 1 << 128))


class TestEvaluateShifted:
    def test_zero_shift_reduces_to_plain(self):
        xi = ShiftVector.from_values(0, 0, 0)
        for v in ((1, 2, 1), (3, -1, 2), (0, 5, -5)):
            assert evaluate_shifted(STD, xi, v).exact == STD.evaluate_exact(v)

    def test_beta_direction_ignores_alpha(self, sqrt2):
        xi = ShiftVector.from_values(sqrt2, 0, 0)
        assert evaluate_shifted(STD, xi, (0, 1, 0)).to_float() == pytest.approx(1.0)

    def test_gamma_unit(self, sqrt2):
        xi = ShiftVector.from_values(sqrt2, 0, 0)
        val = evaluate_shifted(STD, xi, (0, 0, 1))
        assert val.to_float() == pytest.approx(MINUS_FOUR_SQRT2, abs=1e-12)

    def test_rejects_non_integer_vector(self, sqrt2):
        xi = ShiftVector.from_values(sqrt2, 0, 0)
        with pytest.raises(ValidationError):
            evaluate_shifted(STD, xi, (0.5, 0, 0))


class TestIsotropicSearch:
    def test_standard_box_one(self):
        assert find_isotropic_vector(STD, 1) == (0, 0, 1)

    def test_definite_form_rejected_at_construction(self):
        with pytest.raises(ValidationError):
            TernaryForm.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    def test_degenerate_probe_unvalidated(self):
        # rank-two probe used only for the search path
        g = TernaryForm.from_rows([[1, 0, 0], [0, 0, 0], [0, 0, -2]], validate=False)
        assert find_isotropic_vector(g, 10) == (0, 1, 0)

    def test_result_is_primitive_zero(self):
        for B in (1, 2, 3):
            w = find_isotropic_vector(STD, B)
            assert STD.evaluate_exact(w) == 0
            assert math.gcd(math.gcd(abs(w[0]), abs(w[1])), abs(w[2])) == 1

    def test_anisotropic_box_returns_none(self):
        # x^2 + y^2 - 3 z^2 has no small nontrivial zero
        g = TernaryForm.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, -3]])
        assert find_isotropic_vector(g, 3) is None


class TestEquivalence:
    def test_identity(self):
        assert verify_equivalence(STD, 1, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    def test_unipotent_is_isometry(self):
        assert verify_equivalence(STD, 1, unipotent(2).rows)

    def test_wrong_scale(self):
        assert not verify_equivalence(STD, 2, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    def test_doubling_matrix(self):
        assert verify_equivalence(STD, 4, [[2, 0, 0], [0, 2, 0], [0, 0, 2]])

    def test_zero_scale_rejected(self):
        with pytest.raises(ValidationError):
            verify_equivalence(STD, 0, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    def test_certified_pairs_satisfy_identity(self):
        # (m, M) passing the verifier satisfy m*Q'(v) = Q(vM) on a grid
        cases = [
            (STD, 1, unipotent(3)),
            (STD, 1, iota(SL2Matrix(2, 1, 1, 1))),
            (STD, 4, None),  # doubling handled separately below
        ]
        for form, m, M in cases[:2]:
            assert verify_equivalence(form, m, M.rows)
            for v1 in range(-6, 7, 3):
                for v2 in range(-6, 7, 3):
                    for v3 in range(-6, 7, 3):
                        vM = M.apply_int((v1, v2, v3))
                        assert m * form.evaluate_exact((v1, v2, v3)) == STD.evaluate_exact(vM)
        two = [[2, 0, 0], [0, 2, 0], [0, 0, 2]]
        assert verify_equivalence(STD, 4, two)
        for v in ((1, 2, 3), (-5, 0, 7)):
            doubled = tuple(2 * c for c in v)
            assert 4 * STD.evaluate_exact(v) == STD.evaluate_exact(doubled)


def test_shift_vector_requires_single_precision(sqrt2):
    with pytest.raises(ValidationError):
        ShiftVector(sqrt2, FixedReal.zero(128), FixedReal.zero(256))
