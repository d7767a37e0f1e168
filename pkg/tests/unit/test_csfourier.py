"""
Unit tests for the partial-Fourier model, RIP constants and basis pursuit.
"""
import math

import numpy as np
import pytest

from nc_concentration.exception.custom_exception import (
    BudgetError,
    DegenerateError,
    DimensionError,
    ParameterError,
    PreconditionError,
)
from nc_concentration.model.models import EnsembleConfig, SolverParams
from nc_concentration.src.csfourier import (
    basis_pursuit,
    build_dft,
    candes_tao_gate,
    complex_shrink,
    deviation_norm,
    draw_selectors,
    estimate_invertibility_tail,
    gram_on_support,
    recover_signal,
    recovery_experiment,
    rip_constant_exact,
    rip_constant_sampled,
    rip_sup_deviation,
    sample_size_for_invertibility,
    sample_size_for_rip,
    support_count_bound,
    uniform_failure_bound,
)
from nc_concentration.src.ensembles import build_ensemble
from nc_concentration.utils.rng import named_stream


@pytest.mark.unit
class TestDft:
    """Test the unitary DFT and row selection."""

    def test_small_sizes(self):
        """Test n = 1 and the zero-frequency row at n = 4."""
        np.testing.assert_allclose(build_dft(1).matrix, [[1.0]])
        np.testing.assert_allclose(build_dft(4).matrix[0], [0.5, 0.5, 0.5, 0.5])

    @pytest.mark.parametrize("n", range(1, 129))
    def test_unitary(self, n):
        """Test Y^H Y = I to 1e-10 for every size up to 128."""
        y = build_dft(n).matrix
        np.testing.assert_allclose(y.conj().T @ y, np.eye(n), atol=1e-10)

    def test_rank_one_resolution_of_identity(self):
        """Test sum_w y_w (x) y_w = I at n = 8."""
        y = build_dft(8).matrix
        total = sum(np.outer(y[w].conj(), y[w]) for w in range(8))
        np.testing.assert_allclose(total, np.eye(8), atol=1e-12)

    def test_rejects_bad_size(self):
        """Test n must be a positive integer."""
        with pytest.raises(ParameterError):
            build_dft(0)

    def test_full_selection(self):
        """Test k = n keeps every row."""
        draw = draw_selectors(16, 16, named_stream(1, 0))
        np.testing.assert_array_equal(draw.omega, np.arange(16))

    def test_mean_selection_size(self):
        """Test E|omega| = k over many draws."""
        stream = named_stream(2024, 0)
        sizes = [draw_selectors(100, 25, stream).size for _ in range(10_000)]
        assert abs(np.mean(sizes) - 25) <= 4 * math.sqrt(100 * 0.25 * 0.75 / 10_000)

    def test_rejects_bad_rate(self):
        """Test 0 < k <= n."""
        with pytest.raises(ParameterError):
            draw_selectors(8, 9, named_stream(0, 0))


@pytest.mark.unit
class TestGram:
    """Test support Grams and their deviation from the identity."""

    def test_all_rows(self):
        """Test the full row set gives the identity on any support."""
        dft = build_dft(8)
        g = gram_on_support(dft, range(8), [1, 4, 6])
        np.testing.assert_allclose(g.data, np.eye(3), atol=1e-12)
        assert deviation_norm(dft, range(8), [1, 4, 6], "expected-k", k=8) == pytest.approx(0.0, abs=1e-12)

    def test_single_row(self):
        """Test one row of the n = 2 DFT."""
        dft = build_dft(2)
        assert gram_on_support(dft, [0], [0]).data[0, 0] == pytest.approx(0.5)
        assert deviation_norm(dft, [0], [0], "expected-k", k=1) == pytest.approx(0.0, abs=1e-12)
        assert deviation_norm(dft, [0], [0, 1], "expected-k", k=1) == pytest.approx(1.0)

    def test_positive_semidefinite(self):
        """Test support Grams have non-negative spectrum."""
        dft = build_dft(16)
        stream = named_stream(5, 0)
        for _ in range(20):
            draw = draw_selectors(16, 6, stream)
            g = gram_on_support(dft, draw, [0, 3, 7, 11])
            assert np.linalg.eigvalsh(g.data).min() >= -1e-12

    @pytest.mark.parametrize("s", range(1, 9))
    def test_fourier_summands_have_norm_s(self, s):
        """Test every x_j = n y_j^T (x) y_j^T has operator norm exactly |T|."""
        support = list(range(0, 2 * s, 2))
        spec = build_ensemble(EnsembleConfig(kind="fourier-selector", dim=s, n_terms=16, support=support))
        np.testing.assert_allclose(spec.coefficient_norms, np.full(16, float(s)), rtol=1e-12)

    def test_realized_normalization(self):
        """Test realized-k divides by |omega| and rejects an empty set."""
        dft = build_dft(4)
        assert deviation_norm(dft, [0, 1, 2, 3], [0, 1], "realized-k") == pytest.approx(0.0, abs=1e-12)
        with pytest.raises(DegenerateError):
            deviation_norm(dft, [], [0], "realized-k")

    def test_expected_needs_k(self):
        """Test expected-k needs k when given a plain index list."""
        with pytest.raises(ParameterError):
            deviation_norm(build_dft(4), [0], [0], "expected-k")

    def test_bad_support(self):
        """Test that repeated or out-of-range supports are rejected."""
        dft = build_dft(4)
        with pytest.raises(ParameterError):
            gram_on_support(dft, [0], [1, 1])
        with pytest.raises(ParameterError):
            gram_on_support(dft, [0], [4])


@pytest.mark.unit
class TestInvertibilityTail:
    """Test the single-support invertibility experiment."""

    def test_all_rows_never_deviate(self):
        """Test k = n gives empirical fraction 0."""
        records = estimate_invertibility_tail(16, 16, 2, [0, 1], [0.1, 0.5], trials=50, seed=3, Cconst=1.0)
        assert [r.empirical for r in records] == [0.0, 0.0]
        assert all(r.omega_in_range_frequency == 1.0 for r in records)

    def test_record_shape(self):
        """Test eps = sqrt(s/k), t = t_eps/eps and monotone frequencies."""
        records = estimate_invertibility_tail(16, 8, 2, [0, 1], [0.5, 1.0, 2.0], trials=300, seed=4, Cconst=1.0)
        eps = math.sqrt(2 / 8)
        for r in records:
            assert 0.0 <= r.empirical <= 1.0
            assert r.eps == pytest.approx(eps)
            assert r.t == pytest.approx(r.t_eps / eps)
            assert r.bound == pytest.approx(2 * math.exp(-r.t**2 / (2 * math.e)))
        assert [r.bound_valid for r in records] == [True, True, False]
        freqs = [r.empirical for r in records]
        assert freqs == sorted(freqs, reverse=True)

    def test_support_size_mismatch(self):
        """Test s must equal |T|."""
        with pytest.raises(ParameterError):
            estimate_invertibility_tail(16, 8, 3, [0, 1], 1.0, trials=10, seed=0)


@pytest.mark.unit
class TestRip:
    """Test restricted isometry constants."""

    def test_all_rows(self):
        """Test a unitary row set has Delta = 0 and alpha* = 1."""
        result = rip_constant_exact(build_dft(8), range(8), 3)
        assert result.delta == pytest.approx(0.0, abs=1e-12)
        assert result.alpha_star == pytest.approx(1.0)
        assert result.exact
        assert result.supports_examined == 56

    def test_single_row(self):
        """Test one row of the n = 2 DFT at s = 1 and s = 2."""
        dft = build_dft(2)
        one = rip_constant_exact(dft, [0], 1)
        assert (one.lam_max, one.lam_min) == (pytest.approx(0.5), pytest.approx(0.5))
        assert one.delta == pytest.approx(0.0, abs=1e-12)
        assert one.alpha_star == pytest.approx(2.0)
        two = rip_constant_exact(dft, [0], 2)
        assert two.lam_max == pytest.approx(1.0)
        assert two.lam_min == pytest.approx(0.0, abs=1e-12)
        assert two.delta == pytest.approx(1.0)

    def test_delta_is_the_optimal_deviation(self):
        """Test Delta_s equals the sup deviation at alpha* and beats nearby alpha."""
        dft = build_dft(10)
        omega = draw_selectors(10, 6, named_stream(8, 0))
        result = rip_constant_exact(dft, omega, 2)
        at_star = rip_sup_deviation(dft, omega, 2, result.alpha_star)
        assert at_star == pytest.approx(result.delta, rel=1e-10)
        for alpha in (0.9 * result.alpha_star, 1.1 * result.alpha_star):
            assert rip_sup_deviation(dft, omega, 2, alpha) >= result.delta - 1e-12

    def test_empty_rows(self):
        """Test an empty row set is degenerate."""
        with pytest.raises(DegenerateError):
            rip_constant_exact(build_dft(4), [], 1)

    def test_budget(self):
        """Test the enumeration budget directs to the sampled variant."""
        with pytest.raises(BudgetError) as exc_info:
            rip_constant_exact(build_dft(32), range(16), 4, budget=1000)
        assert "rip_constant_sampled" in exc_info.value.error_message

    def test_sampled_matches_exact_when_exhaustive(self):
        """Test sampling every small support reproduces the exact value."""
        dft = build_dft(6)
        omega = [0, 2, 3]
        exact = rip_constant_exact(dft, omega, 2)
        sampled = rip_constant_sampled(dft, omega, 2, 500, named_stream(1, 1))
        assert not sampled.exact
        assert sampled.delta == pytest.approx(exact.delta, rel=1e-12)

    def test_sampled_is_lower_estimate(self):
        """Test a partial sample never exceeds the exact constant."""
        dft = build_dft(12)
        omega = draw_selectors(12, 6, named_stream(3, 0))
        exact = rip_constant_exact(dft, omega, 3)
        sampled = rip_constant_sampled(dft, omega, 3, 20, named_stream(3, 1))
        assert sampled.delta <= exact.delta + 1e-12
        assert 0.0 <= sampled.delta <= 1.0

    def test_sampled_grows_with_more_supports(self):
        """Test longer runs on one seed extend shorter ones, so Delta never decreases."""
        dft = build_dft(16)
        omega = draw_selectors(16, 8, named_stream(6, 0))
        counts = (1, 2, 5, 10, 40, 200)
        results = [rip_constant_sampled(dft, omega, 3, count, named_stream(6, 1)) for count in counts]
        for shorter, longer in zip(results, results[1:]):
            assert longer.delta >= shorter.delta
            assert longer.lam_max >= shorter.lam_max
            assert longer.lam_min <= shorter.lam_min

    def test_gate_on_drawn_rows_then_recover(self, rng):
        """Test drawn row sets at n = 16 pass the gate when at most two rows are missing and then recover spikes."""
        dft = build_dft(16)
        stream = named_stream(12, 0)
        held = 0
        for _ in range(10):
            omega = draw_selectors(16, 14, stream).omega
            gate = candes_tao_gate(dft, omega, 1)
            if omega.size >= 14:
                assert gate["holds"], gate
            if not gate["holds"]:
                continue
            held += 1
            for position in rng.choice(16, size=3, replace=False):
                f = np.zeros(16, dtype=complex)
                f[position] = rng.standard_normal() + 1j * rng.standard_normal()
                assert recover_signal(dft, omega, f).exact
        assert held >= 1

    def test_gate(self):
        """Test the exact-recovery gate on a full row set."""
        gate = candes_tao_gate(build_dft(8), range(8), 1)
        assert gate["holds"]
        assert gate["value"] == pytest.approx(0.0, abs=1e-10)
        with pytest.raises(ParameterError):
            candes_tao_gate(build_dft(8), range(8), 3)


@pytest.mark.unit
class TestSampleSizes:
    """Test closed-form sample-size and failure formulas."""

    def test_rip_sample_size(self):
        """Test the n-over-s formula at s = 2, n = 64."""
        res = sample_size_for_rip(2, 64, 1.0, 1.0)
        assert res.k == pytest.approx(64 * math.e * math.log(32), rel=1e-12)
        assert res.failure_probability == pytest.approx(4 * math.e**2 * 32.0**-2, rel=1e-12)

    def test_polynomial_variant(self):
        """Test the log n variant uses the larger logarithm."""
        a = sample_size_for_rip(2, 64, 1.0, 1.0)
        b = sample_size_for_rip(2, 64, 1.0, 1.0, variant="polynomial")
        assert b.k > a.k

    def test_rip_precondition(self):
        """Test s <= n/2."""
        with pytest.raises(PreconditionError):
            sample_size_for_rip(40, 64, 1.0, 1.0)

    def test_invertibility_sample_size(self):
        """Test the single-support count and its n^-M failure rate."""
        res = sample_size_for_invertibility(4, 256, 2.0, 1.0)
        assert res.k == pytest.approx(4 * 8 * math.e * (2 * math.log(256) + math.log(4)))
        assert res.failure_probability == pytest.approx(256.0**-2)

    def test_uniform_failure(self):
        """Test the union bound uses the exact support count."""
        res = uniform_failure_bound(16, 2, 20.0, 1.0)
        assert res.support_count == 1 + 16 + 120
        assert res.support_count <= support_count_bound(16, 2)
        assert res.bound == pytest.approx(137 * 2 * math.exp(-400 / (2 * math.e)))
        assert res.sufficient_condition


@pytest.mark.unit
class TestBasisPursuit:
    """Test the l1 solver and recovery experiments."""

    def test_all_rows_returns_inverse(self, rng):
        """Test full measurements determine f."""
        dft = build_dft(8)
        f = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        sol = basis_pursuit(dft, range(8), dft.matrix @ f)
        np.testing.assert_allclose(sol.x, f, atol=1e-8)

    def test_zero_measurement(self):
        """Test b = 0 returns 0."""
        sol = basis_pursuit(build_dft(8), [0, 3, 5], np.zeros(3))
        np.testing.assert_allclose(sol.x, 0.0)
        assert sol.converged

    def test_spike(self):
        """Test exact recovery of a unit spike from full measurements."""
        f = np.zeros(8)
        f[3] = 1.0
        res = recover_signal(build_dft(8), range(8), f)
        assert res.rel_error <= 1e-8
        assert res.exact

    def test_non_convergence_is_flagged(self):
        """Test hitting max_iter returns a flagged, still feasible result."""
        dft = build_dft(16)
        f = np.zeros(16)
        f[[2, 9]] = 1.0
        omega = [0, 1, 4, 7, 11]
        b = dft.rows(omega) @ f
        sol = basis_pursuit(dft, omega, b, SolverParams(max_iter=2))
        assert not sol.converged
        assert sol.iterations == 2
        assert sol.feasibility <= 1e-10

    def test_length_mismatch(self):
        """Test b must match the row count."""
        with pytest.raises(DimensionError):
            basis_pursuit(build_dft(8), [0, 1], np.zeros(3))

    def test_shrink(self):
        """Test the complex soft threshold."""
        out = complex_shrink(np.array([3 + 4j, 0.5, 0.0]), 1.0)
        np.testing.assert_allclose(out, [2.4 + 3.2j, 0.0, 0.0])

    def test_full_rows_always_succeed(self):
        """Test k = n gives success fraction 1."""
        summary = recovery_experiment(16, 2, 16, trials=6, seed=1, amp_law="complex-gaussian")
        assert summary.success_fraction == 1.0
        assert summary.mean_omega_size == 16
        assert len(summary.records) == 6

    def test_invalid_sparsity(self):
        """Test s >= 1 is required."""
        with pytest.raises(ParameterError):
            recovery_experiment(16, 0, 8, trials=1, seed=0)
