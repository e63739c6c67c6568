import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdensity import (
    AllRational,
    FixedReal,
    PrecisionExhausted,
    RationalDetected,
    ShiftVector,
    ValidationError,
    continued_fraction,
    convergents,
    convergents_up_to,
    diophantine_direction,
    dirichlet_approx,
    estimate_kappa,
    parse_real,
)


class TestContinuedFraction:
    def test_one_third_terminates(self):
        cf = continued_fraction(parse_real("1/3"), 10)
        assert cf.quotients == [0, 3]
        assert cf.rational and not cf.exhausted

    def test_sqrt2_periodic(self, sqrt2):
        cf = continued_fraction(sqrt2, 41)
        assert cf.quotients[0] == 1
        assert all(a == 2 for a in cf.quotients[1:41])
        assert not cf.rational and not cf.exhausted

    def test_golden_all_ones(self, golden):
        cf = continued_fraction(golden, 40)
        assert cf.quotients == [1] * 40

    def test_low_precision_exhausts_not_lies(self):
        rough = FixedReal.sqrt_int(2, 64)
        cf = continued_fraction(rough, 500)
        assert cf.exhausted
        # whatever prefix came out is correct
        assert cf.quotients[0] == 1 and all(a == 2 for a in cf.quotients[1:])

    def test_negative_value(self):
        cf = continued_fraction(parse_real("-7/3"), 10)
        # -7/3 = -3 + 2/3 = [-3; 1, 2]
        assert cf.quotients == [-3, 1, 2] and cf.rational


class TestConvergents:
    def test_sqrt2_table(self, sqrt2):
        conv = convergents(continued_fraction(sqrt2, 8), sqrt2)
        assert [(c.p, c.q) for c in conv[:5]] == [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]

    def test_golden_fibonacci(self, golden):
        conv = convergents(continued_fraction(golden, 8), golden)
        assert [(c.p, c.q) for c in conv[:5]] == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]

    def test_one_third(self):
        third = parse_real("1/3")
        conv = convergents(continued_fraction(third, 8), third)
        assert [(c.p, c.q) for c in conv] == [(0, 1), (1, 3)]
        assert conv[-1].dist.exact == 0

    def test_distances_strictly_decrease(self, sqrt2, golden):
        for alpha in (sqrt2, golden):
            conv = convergents(continued_fraction(alpha, 20), alpha)
            dists = [c.dist.midpoint() for c in conv]
            assert all(b < a for a, b in zip(dists, dists[1:]))
            qs = [c.q for c in conv]
            assert all(b >= a for a, b in zip(qs, qs[1:]))
            assert all(b > a for a, b in zip(qs[1:], qs[2:]))

    @given(fr=st.fractions(min_value=0, max_value=100, max_denominator=10**9))
    @settings(max_examples=120, deadline=None)
    def test_determinant_identity(self, fr):
        alpha = FixedReal.from_fraction(fr)
        conv = convergents(continued_fraction(alpha, 64), alpha)
        for k in range(1, len(conv)):
            a, b = conv[k - 1], conv[k]
            assert b.p * a.q - a.p * b.q == (-1) ** (k - 1)

    def test_best_approximation_small_scale(self, sqrt2, golden):
        # each convergent beats every smaller denominator, checked brute force
        for alpha in (sqrt2, golden):
            conv = [c for c in convergents_up_to(alpha, 10**4) if c.q >= 2]
            for c in conv:
                dist_c = c.dist.midpoint()
                for q in range(1, c.q):
                    assert alpha.mul_int(q).circle_norm().midpoint() >= dist_c


class TestDirichlet:
    def test_sqrt2_at_ten(self, sqrt2):
        c = dirichlet_approx(sqrt2, 10)
        assert (c.p, c.q) == (7, 5)
        assert abs(math.sqrt(2) - 7 / 5) <= 1 / (10 * 5)

    def test_sqrt2_at_one(self, sqrt2):
        assert (lambda c: (c.p, c.q))(dirichlet_approx(sqrt2, 1)) == (1, 1)

    def test_golden_at_hundred(self, golden):
        c = dirichlet_approx(golden, 100)
        assert (c.p, c.q) == (144, 89)

    def test_inequality_on_grid(self, sqrt2, golden):
        for alpha in (sqrt2, golden):
            for T in (1, 2, 7, 19, 100, 1234, 99991):
                c = dirichlet_approx(alpha, T)
                assert 1 <= c.q <= T
                # |alpha - p/q| <= 1/(T q), certified via the interval bound
                assert c.dist.hi() <= Fraction(1, T)

    def test_rational_input_hits_exact(self):
        half = parse_real("1/2")
        c = dirichlet_approx(half, 100)
        assert (c.p, c.q) == (1, 2) and c.dist.exact == 0

    def test_bad_range(self, sqrt2):
        with pytest.raises(ValidationError):
            dirichlet_approx(sqrt2, 0)


class TestKappaEstimate:
    def test_golden_certificate(self, golden):
        est = estimate_kappa(golden, 10**6)
        assert 1.0 <= est.kappa_hat <= 1.05
        assert est.c_hat > 0 and est.q_max == 10**6
        for c in convergents_up_to(golden, 10**6):
            assert c.dist.to_float() >= est.c_hat / c.q**est.kappa_hat

    def test_sqrt2_certificate(self, sqrt2):
        est = estimate_kappa(sqrt2, 10**6)
        assert 1.0 <= est.kappa_hat <= 1.1
        for c in convergents_up_to(sqrt2, 10**6):
            assert c.dist.to_float() >= est.c_hat / c.q**est.kappa_hat

    def test_quadratic_surds_report_near_one(self):
        for d in (3, 5, 7, 11):
            alpha = FixedReal.sqrt_int(d)
            assert estimate_kappa(alpha, 10**4).kappa_hat <= 1.1

    def test_rational_detected(self):
        with pytest.raises(RationalDetected):
            estimate_kappa(parse_real("1/2"), 100)
        with pytest.raises(RationalDetected):
            estimate_kappa(parse_real("dec:0.5"), 100)

    def test_denominator_growth_consequence(self, sqrt2, golden):
        # q from the best approximation grows like T^(1/kappa) with the
        # certified constant
        for alpha in (sqrt2, golden):
            est = estimate_kappa(alpha, 10**6)
            C = est.c_hat ** (1.0 / est.kappa_hat)
            for i in range(20):
                T = round(10 ** (1 + 4 * i / 19))
                q = dirichlet_approx(alpha, T).q
                assert q >= C * T ** (1.0 / est.kappa_hat) - 1e-9

    def test_local_exponents_recorded(self, golden):
        est = estimate_kappa(golden, 10**4)
        assert all(q >= 2 for q, _ in est.per_convergent)
        assert all(k > 1.0 for _, k in est.per_convergent)


class TestDirectionScan:
    def test_alpha_slot(self, sqrt2):
        choice = diophantine_direction(ShiftVector.from_values(sqrt2, 0, 0), 1)
        assert (choice.a, choice.c) == (1, 0)
        assert abs(choice.alpha_tilde.to_float() - math.sqrt(2)) < 1e-15

    def test_gamma_slot(self, sqrt3):
        choice = diophantine_direction(ShiftVector.from_values(0, 0, sqrt3), 1)
        assert (choice.a, choice.c) == (0, 1)

    def test_all_rational(self):
        xi = ShiftVector.from_values(Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))
        with pytest.raises(AllRational):
            diophantine_direction(xi, 3)

    def test_combination_formula(self, sqrt2, sqrt3):
        xi = ShiftVector.from_values(sqrt2, sqrt3, Fraction(1, 2))
        choice = diophantine_direction(xi, 2)
        a, c = choice.a, choice.c
        expected = a * a * math.sqrt(2) + a * c * math.sqrt(3) + c * c * 0.5
        assert choice.alpha_tilde.to_float() == pytest.approx(expected, rel=1e-12)

    def test_bad_bound(self, sqrt2):
        with pytest.raises(ValidationError):
            diophantine_direction(ShiftVector.from_values(sqrt2, 0, 0), 0)
