"""Predictor tests: streaming recursion, vectorized replay, oracles."""

import numpy as np
import pytest

from rpurn.predictors import (
    ApproxParams,
    PolyaPredictorParams,
    advance,
    initial_state,
    one_step_path,
    predict,
    run_series,
    simulate_series,
)
from rpurn.urns import RPUrnState, predictive_means_path, simulate


def replay(params, bits):
    state = initial_state(params)
    for bit in bits:
        state = advance(state, int(bit))
    return state


class TestParams:
    def test_variant_constraints(self):
        of = ApproxParams.only_fashion(0.4)
        assert of.gamma_star == 1.0 and of.p0 == 0.0
        nf = ApproxParams.no_fashion(0.62)
        assert nf.gamma_star == 0.0 and nf.beta == 0.0
        with pytest.raises(ValueError):
            ApproxParams(p0=0.3, gamma_star=0.5, beta=0.1, variant="only_fashion")
        with pytest.raises(ValueError):
            ApproxParams(p0=0.3, gamma_star=0.5, beta=0.1, variant="no_fashion")

    def test_beta_one_is_a_construction_error(self):
        with pytest.raises(ValueError):
            ApproxParams.complete(0.5, 0.5, 1.0)
        with pytest.raises(ValueError):
            ApproxParams.only_fashion(1.0)

    def test_polya_params_require_interior(self):
        with pytest.raises(ValueError):
            PolyaPredictorParams(a1=2.0, a=2.0)
        with pytest.raises(ValueError):
            PolyaPredictorParams(a1=0.0, a=2.0)


class TestPredictAdvance:
    def test_no_fashion_is_constant(self):
        state = initial_state(ApproxParams.no_fashion(0.62))
        for bit in (1, 0, 1, 1, 0, 0, 0):
            assert predict(state) == pytest.approx(0.62)
            state = advance(state, bit)

    def test_only_fashion_beta_zero_repeats_last(self):
        state = advance(initial_state(ApproxParams.only_fashion(0.0)), 1)
        assert predict(state) == pytest.approx(1.0)
        assert predict(advance(state, 0)) == pytest.approx(0.0)

    def test_complete_hand_value(self):
        params = ApproxParams.complete(0.4, 0.5, 0.9, b_tilde_init=0.8)
        assert predict(initial_state(params)) == pytest.approx(0.6)

    def test_advance_hand_value(self):
        state = initial_state(ApproxParams.only_fashion(0.9))  # btilde starts at 0.5
        assert advance(state, 1).b_tilde == pytest.approx(0.55)

    def test_polya_prior_and_counts(self):
        state = initial_state(PolyaPredictorParams(a1=1.0, a=2.0))
        assert predict(state) == pytest.approx(0.5)
        state = replay(PolyaPredictorParams(a1=1.0, a=2.0), [1, 0, 1])
        assert predict(state) == pytest.approx(0.6)
        assert state.count_ones == 2 and state.n == 3

    def test_bad_observation(self):
        with pytest.raises(ValueError):
            advance(initial_state(ApproxParams.no_fashion(0.5)), 2)

    def test_interval_preservation(self):
        """Forecasts stay inside [0, 1] for random parameters and series."""
        rng = np.random.default_rng(11)
        for _ in range(25):
            params = ApproxParams.complete(
                rng.uniform(), rng.uniform(), rng.uniform(0, 0.999),
                b_tilde_init=rng.uniform(),
            )
            state = initial_state(params)
            for bit in rng.integers(0, 2, size=200):
                value = predict(state)
                assert 0.0 <= value <= 1.0
                assert 0.0 <= state.b_tilde <= 1.0
                state = advance(state, int(bit))


class TestDirectSummationOracle:
    def test_fashion_process_matches_direct_sum(self):
        """btilde_n = beta^n * btilde_0 + (1-beta) * sum beta^(n-h) * xi_h."""
        rng = np.random.default_rng(17)
        for seed in range(5):
            bits = rng.integers(0, 2, size=1000)
            beta = float(rng.uniform(0.0, 0.999))
            b0 = float(rng.uniform())
            params = ApproxParams.only_fashion(beta, b_tilde_init=b0)
            state = initial_state(params)
            for n, bit in enumerate(bits, start=1):
                state = advance(state, int(bit))
                if n % 100:
                    continue
                weights = beta ** (n - np.arange(1, n + 1))
                direct = beta**n * b0 + (1 - beta) * float(weights @ bits[:n])
                assert state.b_tilde == pytest.approx(direct, abs=1e-10)

    def test_exponential_forgetting_of_the_start(self):
        """Two starts differing in btilde_0 close at exactly gamma*beta^n."""
        bits = np.random.default_rng(23).integers(0, 2, size=60)
        pa = ApproxParams.complete(0.3, 0.7, 0.9, b_tilde_init=0.9)
        pb = ApproxParams.complete(0.3, 0.7, 0.9, b_tilde_init=0.2)
        sa, sb = initial_state(pa), initial_state(pb)
        for n, bit in enumerate(bits, start=1):
            sa, sb = advance(sa, int(bit)), advance(sb, int(bit))
            expected = 0.7 * 0.9**n * abs(0.9 - 0.2)
            assert abs(predict(sa) - predict(sb)) == pytest.approx(expected, abs=1e-12)


class TestPathReplay:
    def test_path_matches_streaming(self):
        rng = np.random.default_rng(31)
        bits = rng.integers(0, 2, size=400)
        for params in (
            ApproxParams.complete(0.35, 0.6, 0.95),
            ApproxParams.only_fashion(0.8),
            ApproxParams.no_fashion(0.7),
            PolyaPredictorParams(a1=0.5, a=3.0),
        ):
            path = one_step_path(params, bits)
            state = initial_state(params)
            for n in range(bits.size):
                assert path[n] == pytest.approx(predict(state), abs=1e-12)
                state = advance(state, int(bits[n]))

    def test_run_series_no_fashion_constant(self):
        values = run_series(ApproxParams.no_fashion(0.5), [1, 0, 1, 1, 0], 1)
        np.testing.assert_allclose(values, 0.5)
        assert values.size == 4

    def test_run_series_all_ones_geometric(self):
        """On an all-ones stream the fashion forecast is 1 - 0.5^(n+1)."""
        bits = np.ones(12, dtype=np.uint8)
        values = run_series(ApproxParams.only_fashion(0.5, b_tilde_init=0.5), bits, 1)
        expected = 1.0 - 0.5 ** (np.arange(1, 12) + 1)
        np.testing.assert_allclose(values, expected, atol=1e-12)

    def test_run_series_past_end_is_empty(self):
        assert run_series(ApproxParams.no_fashion(0.5), [1, 0], 5).size == 0

    def test_polya_path_hand_value(self):
        path = one_step_path(PolyaPredictorParams(a1=1.0, a=2.0), [1, 0, 1, 1])
        np.testing.assert_allclose(path, [0.5, 2 / 3, 0.5, 0.6])


class TestSimulateSeries:
    def test_certain_one(self):
        bits = simulate_series(ApproxParams.no_fashion(1.0), 100, 0)
        assert (bits == 1).all()

    def test_determinism(self):
        params = ApproxParams.complete(0.4, 0.6, 0.9)
        np.testing.assert_array_equal(
            simulate_series(params, 1000, 5), simulate_series(params, 1000, 5)
        )

    def test_polya_generator_matches_predictive_law(self):
        """Long-run frequency of a Polya stream stays near its own forecasts."""
        params = PolyaPredictorParams(a1=2.0, a=4.0)
        bits = simulate_series(params, 50_000, 21)
        psi = one_step_path(params, bits)
        gap = abs(bits.sum() - psi.sum())
        assert gap <= 3.0 * np.sqrt((psi * (1 - psi)).sum())


class TestApproximationTracksExactEngine:
    def test_gap_shrinks_for_large_step_counts(self):
        """The approximated forecasts converge to the exact urn's forecasts."""
        alpha, beta = 1.0, 0.99
        state = RPUrnState.initial([1.0, 1.0], alpha=alpha, beta=beta)
        draws = simulate(state, 10_000, 77)
        exact = predictive_means_path(state, draws)[:-1, 0]
        r_star = 2.0 + alpha / (1.0 - beta)
        params = ApproxParams.complete(
            p0=0.5, gamma_star=(r_star - 2.0) / r_star, beta=beta
        )
        bits = (draws == 0).astype(np.uint8)
        approx = one_step_path(params, bits)
        gap = np.abs(exact - approx)
        early = gap[1:100].max()
        late = gap[1000:].max()
        assert late < early
