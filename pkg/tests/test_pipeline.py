"""Fit-eval orchestration tests."""

import numpy as np
import pytest

from rpurn.fitting import SlotScheme, fit_trajectory
from rpurn.metrics import NO_SMOOTH
from rpurn.pipeline import in_sample_path, out_of_sample_path, run_fit_eval
from rpurn.predictors import ApproxParams, simulate_series


@pytest.fixture(scope="module")
def bits():
    return simulate_series(ApproxParams.complete(0.45, 0.6, 0.97), 4000, 31)


class TestOutOfSamplePath:
    def test_each_slot_scored_with_its_own_fit(self, bits):
        scheme = SlotScheme(5, bits.size)
        trajectory = fit_trajectory("no_fashion", bits, scheme)
        psi = out_of_sample_path(trajectory, bits, scheme)
        assert np.isnan(psi[: scheme.slot_len]).all()
        for s, fr in trajectory.per_slot:
            lo, hi = scheme.slot_range(s)
            np.testing.assert_allclose(psi[lo:hi], fr.params.p0)

    def test_in_sample_path_covers_everything(self, bits):
        fr, psi = in_sample_path("no_fashion", bits)
        assert psi.shape == bits.shape
        np.testing.assert_allclose(psi, fr.params.p0)


class TestRunFitEval:
    def test_report_completeness(self, bits):
        scheme = SlotScheme(4, bits.size)
        report, evaluations = run_fit_eval(
            bits, scheme, variants=("no_fashion", "polya"), knot_counts=(3, 5),
        )
        assert set(report.ss_rel_per_model) == {"no_fashion", "polya"}
        assert list(report.mse_table) == [NO_SMOOTH, 3, 5]
        for row in report.mse_table.values():
            assert set(row) == {"no_fashion", "polya"}
        assert set(evaluations) == {"no_fashion", "polya"}

    def test_constant_model_tracks_theoretical_value_on_iid_data(self):
        rng = np.random.default_rng(606)
        iid = (rng.random(30_000) < 0.6).astype(np.uint8)
        scheme = SlotScheme(10, iid.size)
        report, _ = run_fit_eval(iid, scheme, variants=("no_fashion",),
                                 knot_counts=(3,))
        gap = abs(report.ss_rel_per_model["no_fashion"] - report.theoretical_value)
        assert gap < 0.5  # both reduce to near-constant forecasts

    def test_unknown_variant_rejected(self, bits):
        with pytest.raises(ValueError):
            run_fit_eval(bits, SlotScheme(4, bits.size), variants=("bogus",))

    def test_short_series_rejected_with_minimum_in_message(self):
        with pytest.raises(ValueError, match="at least 40"):
            run_fit_eval(np.ones(30, dtype=np.uint8), SlotScheme(20, 30))
