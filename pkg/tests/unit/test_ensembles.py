"""
Unit tests for ensemble generators and the Monte Carlo harness.
"""
import math

import numpy as np
import pytest

from nc_concentration.exception.custom_exception import DominanceViolation, InputError, ParameterError
from nc_concentration.model.models import EnsembleConfig, EnsembleKind
from nc_concentration.src.ensembles.generators import (
    EnsembleSpec,
    _check_sample,
    build_ensemble,
    builtin_names,
    builtin_spec,
    norm_bound_total,
    parse_builtin,
    profile_of,
    resolve_spec,
    sample_matrix,
    sample_sum,
    summand_mean_check,
)
from nc_concentration.src.ensembles.harness import (
    default_t_grid,
    estimate_pnorm,
    estimate_tail,
    estimate_tails,
    hoeffding_half_width,
    trial_spectra,
    verify_dominance,
)
from nc_concentration.utils.config_loader import reset_settings
from nc_concentration.utils.rng import trial_stream


@pytest.mark.unit
class TestBuiltins:
    """Test name parsing and construction of built-in ensembles."""

    def test_parse_builtin(self):
        """Test the name grammar."""
        config = parse_builtin("fourier-d2-n16-lam0.25")
        assert config.kind == EnsembleKind.FOURIER_SELECTOR
        assert (config.dim, config.n_terms, config.lam) == (2, 16, 0.25)
        assert parse_builtin("rademacher-d1-n4").coeff == "identity"
        assert parse_builtin("rademacher-d4-n8").coeff == "random"

    def test_unknown_name(self):
        """Test that malformed names raise."""
        with pytest.raises(ParameterError):
            parse_builtin("gaussian-d4-n8")

    def test_every_builtin_builds(self):
        """Test that all advertised built-ins construct with the right shapes."""
        for name in builtin_names():
            spec = builtin_spec(name)
            config = parse_builtin(name)
            assert spec.dim == config.dim
            assert spec.name == name
            np.testing.assert_allclose(spec.coefficients, np.conj(np.transpose(spec.coefficients, (0, 2, 1))))

    def test_random_coefficients_are_reproducible(self):
        """Test that coefficient matrices depend only on the config."""
        a = builtin_spec("uniform-d4-n8")
        b = builtin_spec("uniform-d4-n8")
        np.testing.assert_array_equal(a.coefficients, b.coefficients)
        c = build_ensemble(EnsembleConfig(kind="bounded-uniform", dim=4, n_terms=8, coeff_seed=7))
        assert not np.array_equal(a.coefficients, c.coefficients)

    def test_renormalize(self):
        """Test that renormalized coefficients have unit operator norm."""
        spec = builtin_spec("rademacher-d4-n8")
        np.testing.assert_allclose(spec.coefficient_norms, 1.0)

    def test_resolve_spec_inputs(self):
        """Test that names, configs and dicts all resolve."""
        by_name = resolve_spec("selector-d4-n8")
        by_dict = resolve_spec({"kind": "selector-diagonal", "dim": 4, "n_terms": 8})
        np.testing.assert_array_equal(by_name.coefficients, by_dict.coefficients)
        with pytest.raises(ParameterError):
            resolve_spec(3.0)

    def test_fourier_support_must_fit(self):
        """Test that a support outside {0..n-1} is rejected."""
        with pytest.raises(ParameterError):
            build_ensemble(EnsembleConfig(kind="fourier-selector", dim=2, n_terms=8, support=[0, 9]))

    def test_vanishing_coefficients(self):
        """Test that an all-zero stack is rejected."""
        with pytest.raises(ParameterError):
            EnsembleSpec.from_coefficients("rademacher-fixed", np.zeros((2, 3, 3)))


@pytest.mark.unit
class TestProfile:
    """Test the analytic moment profile."""

    def test_rademacher_identity(self):
        """Test S = n, R = 1 for identity coefficients."""
        prof = profile_of(builtin_spec("rademacher-d1-n10"))
        assert (prof.S, prof.R, prof.n) == (pytest.approx(10.0), pytest.approx(1.0), 10)

    def test_selector_identity(self):
        """Test S = n/4, R = 1/2 at lam = 1/2."""
        spec = EnsembleSpec.from_coefficients("selector-diagonal", [np.eye(3)] * 8, lam=0.5)
        prof = profile_of(spec)
        assert prof.S == pytest.approx(2.0)
        assert prof.R == pytest.approx(0.5)

    def test_uniform_unnormalized(self):
        """Test the uniform second moment 1/3 with renormalization off."""
        spec = EnsembleSpec.from_coefficients("bounded-uniform", [np.diag([2.0, 0.0])] * 3)
        prof = profile_of(spec)
        assert prof.S == pytest.approx(4.0)
        assert prof.R == pytest.approx(2.0)

    def test_fourier_selector(self):
        """Test sigma^2 = lam(1-lam) s^2 and M = max(lam, 1-lam) s per term."""
        prof = profile_of(builtin_spec("fourier-d2-n16-lam0.25"))
        assert prof.S == pytest.approx(16 * 0.25 * 0.75 * 4)
        assert prof.R == pytest.approx(1.5)


@pytest.mark.unit
class TestSampling:
    """Test single draws of the random sum."""

    def test_selector_rate_one_is_zero(self):
        """Test delta_j - lam vanishes at lam = 1."""
        spec = builtin_spec("selector-d4-n8-lam1")
        np.testing.assert_allclose(sample_matrix(spec, trial_stream(1, 0)), 0.0)

    def test_single_rademacher_term(self):
        """Test that one Rademacher term is +-A with both signs seen."""
        a = np.diag([1.0, -1.0])
        spec = EnsembleSpec.from_coefficients("rademacher-fixed", a)
        seen = set()
        for i in range(64):
            x = sample_sum(spec, trial_stream(3, i)).data
            assert np.allclose(x, a) or np.allclose(x, -a)
            seen.add(bool(np.allclose(x, a)))
        assert seen == {True, False}

    @pytest.mark.parametrize("name", ["rademacher-d4-n8", "uniform-d4-n8", "selector-d8-n8", "fourier-d2-n16"])
    def test_norm_bound(self, name):
        """Test the triangle inequality bound on every sample, with debug checks on."""
        spec = builtin_spec(name)
        bound = norm_bound_total(spec)
        for i in range(50):
            x = sample_matrix(spec, trial_stream(9, i), debug=True)
            assert np.max(np.abs(np.linalg.eigvalsh(x))) <= bound * (1 + 1e-10)

    def test_debug_check_catches_bad_bound(self):
        """Test that a summand above its bound is reported."""
        spec = builtin_spec("rademacher-d4-n8")
        with pytest.raises(InputError):
            _check_sample(spec, np.full(spec.n_terms, 2.0), np.zeros((4, 4)))

    def test_summands_are_centered(self):
        """Test the empirical mean of each coefficient is within 5 standard errors of 0."""
        result = summand_mean_check(builtin_spec("selector-d4-n8"), trials=10_000, seed=2024)
        assert result["passed"]
        assert result["max_z"] <= 5.0


@pytest.mark.unit
class TestTailEstimates:
    """Test Monte Carlo tail estimates."""

    def test_outside_spectrum(self):
        """Test the trivial values below and above every possible eigenvalue."""
        spec = builtin_spec("uniform-d4-n8")
        total = norm_bound_total(spec)
        below, above = estimate_tails(spec, [-total - 1, total + 1], trials=200, seed=5)
        assert below.mean == 1.0
        assert above.mean == 0.0

    def test_four_signs(self):
        """Test P(e1 + ... + e4 >= 4) = 1/16 lies in the Hoeffding interval."""
        est = estimate_tail(builtin_spec("rademacher-d1-n4"), 4.0, trials=4000, seed=11)
        assert est.ci_low <= 1 / 16 <= est.ci_high
        assert est.ci_high - est.mean == pytest.approx(hoeffding_half_width(4000, est.confidence))

    def test_too_few_trials(self):
        """Test the minimum trial count."""
        with pytest.raises(ParameterError):
            estimate_tail(builtin_spec("rademacher-d1-n4"), 1.0, trials=10, seed=0)

    def test_same_seed_same_estimate(self):
        """Test bit-identical results for a fixed seed."""
        spec = builtin_spec("rademacher-d4-n8")
        a = trial_spectra(spec, 150, seed=99)
        b = trial_spectra(spec, 150, seed=99)
        np.testing.assert_array_equal(a, b)

    def test_thread_count_does_not_change_results(self, monkeypatch):
        """Test that one worker and many workers produce identical spectra."""
        spec = builtin_spec("uniform-d4-n8")
        monkeypatch.setenv("NC_THREADS", "1")
        reset_settings()
        serial = trial_spectra(spec, 300, seed=42)
        monkeypatch.setenv("NC_THREADS", "4")
        reset_settings()
        threaded = trial_spectra(spec, 300, seed=42)
        np.testing.assert_array_equal(serial, threaded)

    def test_default_grid(self):
        """Test the default grid spans (0, 3 sqrt(S) + R]."""
        grid = default_t_grid("rademacher-d1-n16", points=8)
        assert len(grid) == 8
        assert grid[0] > 0
        assert grid[-1] == pytest.approx(3 * 4 + 1)


@pytest.mark.unit
class TestMomentEstimates:
    """Test Monte Carlo Schatten moment estimates."""

    def test_selector_rate_one(self):
        """Test that a vanishing sum has zero moment."""
        est = estimate_pnorm(builtin_spec("selector-d4-n8-lam1"), 4, trials=100, seed=0)
        assert est.value == 0.0
        assert est.stderr == 0.0

    @pytest.mark.parametrize("p", [1, 2, 7, math.inf])
    def test_single_sign(self, p):
        """Test |+-1| = 1 in every moment."""
        est = estimate_pnorm(builtin_spec("rademacher-d1-n1"), p, trials=100, seed=3)
        assert est.value == pytest.approx(1.0, rel=1e-12)

    def test_two_signs(self):
        """Test E(e1 + e2)^2 = 2."""
        est = estimate_pnorm(builtin_spec("rademacher-d1-n2"), 2, trials=5000, seed=17)
        assert abs(est.value - math.sqrt(2)) <= 3 * est.stderr

    def test_rejects_small_p(self):
        """Test p < 1 is rejected."""
        with pytest.raises(ParameterError):
            estimate_pnorm(builtin_spec("rademacher-d1-n2"), 0.5, trials=100, seed=0)


@pytest.mark.unit
class TestDominance:
    """Test dominance of the empirical tail by the closed-form bounds."""

    def test_rate_one_selector(self):
        """Test a deterministic zero sum is trivially dominated."""
        report = verify_dominance("selector-d4-n8-lam1", [0.5, 1.0, 2.0], trials=100, seed=1)
        assert report.passed
        assert all(rec.empirical == 0.0 for rec in report.records)

    def test_ten_signs(self):
        """Test the scalar Rademacher tail at t = 10 sits below Bennett."""
        report = verify_dominance("rademacher-d1-n10", [10.0], trials=2000, seed=8)
        record = report.records[0]
        assert record.passed
        assert record.empirical <= 0.01
        assert 2.0**-10 <= record.bounds["bennett"]

    def test_violation_raises_on_request(self, mocker):
        """Test that a forced violation raises DominanceViolation listing the offending points."""
        mocker.patch(
            "nc_concentration.src.ensembles.harness.tail_bounds_at",
            return_value={"bennett": 0.0, "bernstein": 1.0, "prohorov": 1.0},
        )
        report = verify_dominance("rademacher-d1-n4", [-10.0], trials=100, seed=0)
        assert not report.passed
        assert report.violations == [(-10.0, "bennett")]
        with pytest.raises(DominanceViolation) as exc_info:
            verify_dominance("rademacher-d1-n4", [-10.0], trials=100, seed=0, raise_on_violation=True)
        assert exc_info.value.to_record()["violations"] == [{"t": -10.0, "bound": "bennett"}]
