"""
Unit tests for the closed-form tail and moment bounds.
"""
import math

import numpy as np
import pytest
from scipy import special

from nc_concentration.exception.custom_exception import (
    DegenerateError,
    DomainError,
    ParameterError,
    PreconditionError,
)
from nc_concentration.model.models import MomentProfile
from nc_concentration.src.bounds.tail_bounds import (
    _pre_chernoff_bound,
    bennett_tail,
    bernstein_tail,
    chernoff_lambda_opt,
    hoeffding_half_width,
    incomplete_gamma_upper_check,
    phi,
    prohorov_tail,
    regularized_upper_gamma,
    rosenthal_bound,
    rosenthal_layer_cake,
    tail_bounds_at,
    tail_grid,
)

BENNETT_S1_R1_T1 = math.exp(-(2 * math.log(2) - 1))


@pytest.mark.unit
class TestPhi:
    """Test the Bennett function."""

    def test_values(self):
        """Test hand-evaluated values."""
        assert phi(0) == 0
        assert phi(math.e - 1) == pytest.approx(1.0, rel=1e-14)
        assert phi(1) == pytest.approx(0.3862943611198906, rel=1e-14)

    def test_series_branch_agrees(self):
        """Test continuity across the small-x series cutoff."""
        for x in (1e-8, 5e-5, 9.99e-5):
            direct = (1 + x) * math.log1p(x) - x
            assert phi(x) == pytest.approx(direct, rel=1e-6)
            assert phi(x) == pytest.approx(x * x / 2 - x**3 / 6, rel=1e-8)

    def test_negative_raises(self):
        """Test the domain check."""
        with pytest.raises(DomainError):
            phi(-0.1)


@pytest.mark.unit
class TestTailBounds:
    """Test Bennett, Bernstein and Prohorov tails."""

    def test_bennett(self, unit_profile):
        """Test Bennett values."""
        assert bennett_tail(unit_profile, 0) == 1.0
        assert bennett_tail(unit_profile, 1) == pytest.approx(0.679449, abs=1e-6)
        assert bennett_tail(unit_profile, 1) == pytest.approx(BENNETT_S1_R1_T1, rel=1e-14)
        assert bennett_tail(MomentProfile(S=4, R=2), 0) == 1.0

    def test_bernstein(self, unit_profile):
        """Test Bernstein values and its ordering against Bennett."""
        assert bernstein_tail(unit_profile, 1) == pytest.approx(math.exp(-3 / 8), rel=1e-14)
        assert bernstein_tail(unit_profile, 0) == 1.0
        assert bernstein_tail(MomentProfile(S=0, R=1), 0) == 1.0
        assert bernstein_tail(unit_profile, 1) >= bennett_tail(unit_profile, 1)

    def test_prohorov(self, unit_profile):
        """Test Prohorov values and its ordering against Bennett."""
        assert prohorov_tail(unit_profile, 0) == 1.0
        expected = math.exp(-0.5 * math.log(0.5 + math.sqrt(1.25)))
        assert prohorov_tail(unit_profile, 1) == pytest.approx(expected, rel=1e-14)
        assert prohorov_tail(unit_profile, 1) == pytest.approx(0.786156, abs=1e-6)
        assert prohorov_tail(unit_profile, 1) >= BENNETT_S1_R1_T1

    def test_degenerate_profile(self):
        """Test that S = 0 is rejected where the bound is 0/0."""
        prof = MomentProfile(S=0, R=1)
        with pytest.raises(DegenerateError):
            bennett_tail(prof, 1)
        with pytest.raises(DegenerateError):
            prohorov_tail(prof, 1)
        with pytest.raises(DegenerateError):
            chernoff_lambda_opt(prof, 1)

    def test_negative_t_raises(self, unit_profile):
        """Test that the evaluators reject t < 0."""
        for fn in (bennett_tail, bernstein_tail, prohorov_tail):
            with pytest.raises(DomainError):
                fn(unit_profile, -1.0)

    @pytest.mark.parametrize("S,R", [(1.0, 1.0), (0.1, 2.0), (25.0, 0.5), (3.0, 3.0)])
    def test_dominance_grid(self, S, R):
        """Test Bennett <= Bernstein and Bennett <= Prohorov on a 1000-point grid."""
        prof = MomentProfile(S=S, R=R)
        grid = tail_grid(prof, np.linspace(0, 10 * S / R, 1000))
        assert np.all(grid["bennett"] <= grid["bernstein"] + 1e-12)
        assert np.all(grid["bennett"] <= grid["prohorov"] + 1e-12)

    @pytest.mark.parametrize("S,R", [(1.0, 1.0), (0.3, 2.0)])
    def test_range_and_strict_decrease(self, S, R):
        """Test values in (0, 1] and strict decrease for t > 0."""
        prof = MomentProfile(S=S, R=R)
        grid = tail_grid(prof, np.linspace(0, 3 * S / R, 200))
        for values in grid.values():
            assert values[0] == 1.0
            assert np.all((values > 0) & (values <= 1))
            assert np.all(np.diff(values) < 0)

    def test_scale_covariance(self, rng):
        """Test bennett(S, R, t) = bennett(c^2 S, c R, c t)."""
        for _ in range(50):
            S, R, t, c = rng.uniform(0.1, 5, size=4)
            base = bennett_tail(MomentProfile(S=S, R=R), t)
            scaled = bennett_tail(MomentProfile(S=c * c * S, R=c * R), c * t)
            assert scaled == pytest.approx(base, rel=1e-10)

    def test_tail_bounds_at_resolves_edge_cases(self):
        """Test t < 0 and S = 0 handling."""
        assert tail_bounds_at(MomentProfile(S=1, R=1), -2) == {"bennett": 1.0, "bernstein": 1.0, "prohorov": 1.0}
        zero = tail_bounds_at(MomentProfile(S=0, R=1), 1)
        assert zero["bennett"] == 0.0
        assert zero["prohorov"] == 0.0
        assert zero["bernstein"] == pytest.approx(math.exp(-1.5))
        assert tail_bounds_at(MomentProfile(S=0, R=1), 0)["bennett"] == 1.0


@pytest.mark.unit
class TestChernoff:
    """Test the optimized Chernoff parameter."""

    def test_values(self, unit_profile):
        """Test hand-evaluated minimizers."""
        assert chernoff_lambda_opt(unit_profile, math.e - 1) == pytest.approx(1.0, rel=1e-14)
        assert chernoff_lambda_opt(unit_profile, 1) == pytest.approx(math.log(2), rel=1e-14)

    def test_round_trip(self):
        """Test that plugging the minimizer in reproduces Bennett."""
        for S, R in ((1.0, 1.0), (0.5, 2.0), (7.0, 0.3)):
            prof = MomentProfile(S=S, R=R)
            for t in np.linspace(0.01, 10 * S / R, 100):
                lam = chernoff_lambda_opt(prof, t)
                assert _pre_chernoff_bound(prof, t, lam) == pytest.approx(bennett_tail(prof, t), rel=1e-12)

    def test_rejects_non_positive_t(self, unit_profile):
        """Test t must be > 0."""
        with pytest.raises(DomainError):
            chernoff_lambda_opt(unit_profile, 0.0)


@pytest.mark.unit
class TestRosenthal:
    """Test the explicit-constant moment bounds."""

    def test_values(self):
        """Test hand-evaluated bounds."""
        assert rosenthal_bound(MomentProfile(S=1, R=1), 2) == pytest.approx(4 * (math.sqrt(2) + 2))
        assert rosenthal_bound(MomentProfile(S=0, R=1), 3) == pytest.approx(12.0)
        assert rosenthal_bound(MomentProfile(S=4, R=1), 4) == pytest.approx(32.0)

    def test_sharp_is_smaller(self, unit_profile):
        """Test the sharper constant never exceeds the plain one."""
        for p in (2, 4, 16):
            assert rosenthal_bound(unit_profile, p, sharp=True) <= rosenthal_bound(unit_profile, p)

    def test_p_below_two_raises(self, unit_profile):
        """Test p < 2 is rejected."""
        with pytest.raises(ParameterError):
            rosenthal_bound(unit_profile, 1.5)

    @pytest.mark.parametrize("p", [2, 3, 8, 40])
    def test_layer_cake_below_sharp(self, unit_profile, p):
        """Test the numerical layer-cake value sits below the sharp closed form."""
        value = rosenthal_layer_cake(unit_profile, p)
        assert 0 < value <= rosenthal_bound(unit_profile, p, sharp=True)


@pytest.mark.unit
class TestIncompleteGamma:
    """Test the upper incomplete Gamma estimate."""

    @pytest.mark.parametrize("alpha,p,gamma_val,bound", [
        (1, 1, math.exp(-1), 2 * math.exp(-1)),
        (2, 2, 3 * math.exp(-2), 4 * math.exp(-2)),
        (3, 4, 13 * math.exp(-4), 32 * math.exp(-4)),
    ])
    def test_examples(self, alpha, p, gamma_val, bound):
        """Test closed-form Gamma(alpha, p) values."""
        g, b = incomplete_gamma_upper_check(alpha, p)
        assert g == pytest.approx(gamma_val, rel=1e-9)
        assert b == pytest.approx(bound, rel=1e-12)

    def test_matches_library(self):
        """Test agreement with the regularized Gamma function and the bound."""
        for alpha in (1.0, 1.5, 4.0, 10.0):
            for p in (2 * alpha - 2 + 0.5, 2 * alpha, 50.0):
                g, b = incomplete_gamma_upper_check(alpha, p)
                expected = float(special.gammaincc(alpha, p) * special.gamma(alpha))
                assert g == pytest.approx(expected, rel=1e-9)
                assert regularized_upper_gamma(alpha, p) == pytest.approx(expected, rel=1e-12)
                assert g <= b

    def test_precondition(self):
        """Test p < 2 alpha - 2 names the failing hypothesis."""
        with pytest.raises(PreconditionError) as exc_info:
            incomplete_gamma_upper_check(5, 3)
        assert exc_info.value.hypothesis == "p >= 2*alpha - 2"

    def test_alpha_below_one(self):
        """Test alpha < 1 is rejected."""
        with pytest.raises(ParameterError):
            incomplete_gamma_upper_check(0.5, 1)


@pytest.mark.unit
class TestHoeffdingHalfWidth:
    """Test the shared two-sided Hoeffding interval width."""

    def test_value(self):
        """Test sqrt(log(2/delta) / (2N)) at N = 100 and 95% confidence."""
        expected = math.sqrt(math.log(2.0 / 0.05) / 200.0)
        assert hoeffding_half_width(100, 0.95) == pytest.approx(expected, rel=1e-12)

    def test_shrinks_with_trials(self):
        """Test quadrupling the trials halves the width."""
        assert hoeffding_half_width(400, 0.99) == pytest.approx(hoeffding_half_width(100, 0.99) / 2, rel=1e-12)

    @pytest.mark.parametrize("trials,confidence", [(0, 0.95), (10, 0.0), (10, 1.0)])
    def test_rejects_bad_arguments(self, trials, confidence):
        """Test zero trials and confidence outside (0, 1) are refused."""
        with pytest.raises(ParameterError):
            hoeffding_half_width(trials, confidence)
