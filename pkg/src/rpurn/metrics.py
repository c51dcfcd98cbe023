"""Prediction-quality metrics for slot-evaluated forecasts.

All metrics score the forecast sequence against the observations over the
evaluated window only: prediction indices ``slot_len .. n_slots*slot_len - 1``
(slots 1 and later).  Slot 0 is training-only and observations beyond
``n_slots * slot_len`` are ignored.

``ss_rel`` is the squared error of the past-majority baseline divided by the
squared error of the model, as a percentage: above 100 means the model beats
always guessing the historically more frequent bit.  The theoretical value
replaces the model with the best constant fixed after seeing the whole
evaluated period, an unattainable-in-advance reference.  Degenerate perfect
prediction (zero denominator) is reported as ``inf`` and serialized as the
string ``"inf"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_binary_series
from .fitting import SlotScheme
from .smoothing import smooth_batch

__all__ = [
    "PredictionRun",
    "EvalReport",
    "majority_value",
    "ss_rel",
    "theoretical_value",
    "mse_smoothed",
]


@dataclass(frozen=True, slots=True)
class PredictionRun:
    """A forecast path aligned to a series: ``psi_hat[n]`` predicts bit ``n``.

    ``psi_hat`` has one entry per observation; entries outside the evaluated
    window may be NaN (slot-0 forecasts never enter any metric).
    """

    series: np.ndarray
    psi_hat: np.ndarray
    scheme: SlotScheme

    def __post_init__(self) -> None:
        xi = check_binary_series(self.series)
        psi = np.asarray(self.psi_hat, dtype=np.float64)
        object.__setattr__(self, "series", xi)
        object.__setattr__(self, "psi_hat", psi)
        if self.scheme.n_obs != xi.size:
            raise ValueError(
                f"scheme expects {self.scheme.n_obs} observations, got {xi.size}"
            )
        if psi.shape != xi.shape:
            raise ValueError("psi_hat must align one-to-one with the series")
        lo, hi = self.scheme.evaluated_range
        window = psi[lo:hi]
        if not np.isfinite(window).all():
            raise ValueError("psi_hat must be finite over the evaluated window")
        if (window < 0.0).any() or (window > 1.0).any():
            raise ValueError("psi_hat must lie in [0, 1] over the evaluated window")


def majority_value(series, scheme: SlotScheme, s: int) -> int:
    """Bit occurring most often before slot ``s`` starts; ties return 1."""
    xi = check_binary_series(series)
    end = scheme.training_end(s)
    ones = int(xi[:end].sum())
    return 1 if 2 * ones >= end else 0


def _baseline_numerator(xi: np.ndarray, scheme: SlotScheme) -> float:
    # (xi - m)^2 over a 0/1 block counts the disagreements with the majority bit
    csum = np.concatenate(([0], np.cumsum(xi, dtype=np.int64)))
    L = scheme.slot_len
    total = 0
    for s in range(1, scheme.n_slots):
        majority = 1 if 2 * csum[s * L] >= s * L else 0
        ones_in_slot = int(csum[(s + 1) * L] - csum[s * L])
        total += (L - ones_in_slot) if majority else ones_in_slot
    return float(total)


def _relative_score(xi: np.ndarray, psi: np.ndarray, scheme: SlotScheme) -> float:
    lo, hi = scheme.evaluated_range
    numerator = _baseline_numerator(xi, scheme)
    residual = xi[lo:hi].astype(np.float64) - psi[lo:hi]
    denominator = float(residual @ residual)
    if denominator == 0.0:
        return math.inf
    return 100.0 * numerator / denominator


def ss_rel(run: PredictionRun) -> float:
    """Relative squared error vs. the past-majority baseline, in percent."""
    return _relative_score(run.series, run.psi_hat, run.scheme)


def theoretical_value(series, scheme: SlotScheme) -> float:
    """``ss_rel`` of the best constant fixed a posteriori, in percent."""
    xi = check_binary_series(series)
    if scheme.n_obs != xi.size:
        raise ValueError(f"scheme expects {scheme.n_obs} observations, got {xi.size}")
    mean = float(xi[scheme.slot_len :].mean())
    psi = np.full(xi.size, mean)
    return _relative_score(xi, psi, scheme)


def mse_smoothed(run: PredictionRun, knot_count: int | None = None) -> float:
    """Mean squared gap between observation and forecast curves.

    With a knot count, both the observed bits and the forecasts over the
    evaluated window are replaced by their natural-cubic-spline smooths
    before averaging; ``None`` compares the raw sequences.
    """
    lo, hi = run.scheme.evaluated_range
    obs = run.series[lo:hi].astype(np.float64)
    pred = run.psi_hat[lo:hi]
    if knot_count is not None:
        obs, pred = (c.values for c in smooth_batch([obs, pred], knot_count))
    gap = obs - pred
    return float(gap @ gap) / gap.size


NO_SMOOTH = "no_smooth"


@dataclass(frozen=True)
class EvalReport:
    """Per-model relative scores plus the smoothed-curve MSE table.

    ``mse_table`` maps a smoothing level (``"no_smooth"`` or an integer knot
    count) to per-model MSE values.  Dict insertion order fixes the row and
    column order of the serialized forms.
    """

    ss_rel_per_model: dict[str, float]
    theoretical_value: float
    mse_table: dict[str | int, dict[str, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for model, value in self.ss_rel_per_model.items():
            if not value > 0.0:
                raise ValueError(f"ss_rel for {model} must be positive, got {value}")
        for level, row in self.mse_table.items():
            for model, value in row.items():
                if value < 0.0:
                    raise ValueError(f"MSE[{level}][{model}] must be >= 0, got {value}")

    @property
    def models(self) -> tuple[str, ...]:
        return tuple(self.ss_rel_per_model)

    def to_csv(self) -> str:
        """Delimited table: models as columns, metrics and knot counts as rows."""
        header = ["metric", *self.models, "theoretical"]
        rows = [header]
        ss_row = ["ss_rel_pct"]
        ss_row += [_fmt_pct(self.ss_rel_per_model[m]) for m in self.models]
        ss_row.append(_fmt_pct(self.theoretical_value))
        rows.append(ss_row)
        for level, by_model in self.mse_table.items():
            label = "mse_no_smooth" if level == NO_SMOOTH else f"mse_k{level}"
            row = [label]
            row += [_fmt_mse(by_model[m]) if m in by_model else "" for m in self.models]
            row.append("")
            rows.append(row)
        return "\n".join(",".join(row) for row in rows) + "\n"

    def to_json(self) -> str:
        payload = {
            "ss_rel_pct": {m: _json_num(v) for m, v in self.ss_rel_per_model.items()},
            "theoretical_value_pct": _json_num(self.theoretical_value),
            "mse": {
                str(level): {m: _json_num(v) for m, v in row.items()}
                for level, row in self.mse_table.items()
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _fmt_pct(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.2f}"


def _fmt_mse(value: float) -> str:
    return f"{value:.6e}"


def _json_num(value: float):
    return "inf" if math.isinf(value) else float(value)
