"""End-to-end fit-and-evaluate protocol over slots.

For every requested model variant the series is fitted once per slot
boundary (training on all earlier slots), each slot is forecast
out-of-sample with the parameters fitted before it, and the assembled
forecast path is scored with ``ss_rel`` and the smoothed-curve MSE table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_binary_series
from .fitting import (
    MODEL_NAMES,
    FitResult,
    ParamTrajectory,
    SlotScheme,
    fit,
    fit_trajectory,
)
from .metrics import NO_SMOOTH, EvalReport, PredictionRun, mse_smoothed, ss_rel, theoretical_value
from .predictors import one_step_path

__all__ = ["DEFAULT_KNOT_COUNTS", "ModelEvaluation", "out_of_sample_path", "run_fit_eval"]

DEFAULT_KNOT_COUNTS = (3, 5, 10, 20, 30, 50)


@dataclass(frozen=True)
class ModelEvaluation:
    variant: str
    trajectory: ParamTrajectory
    psi_hat: np.ndarray
    ss_rel: float
    mse_by_level: dict


def out_of_sample_path(
    trajectory: ParamTrajectory,
    series,
    scheme: SlotScheme,
) -> np.ndarray:
    """Forecasts for slots 1..S-1, each produced with that slot's fit.

    Returns a full-length array; indices before the first evaluated slot are
    NaN since no out-of-sample forecast exists there.
    """
    xi = check_binary_series(series)
    psi = np.full(xi.size, np.nan)
    for s, fr in trajectory.per_slot:
        lo, hi = scheme.slot_range(s)
        psi[lo:hi] = one_step_path(fr.params, xi, lo, hi)
    return psi


def in_sample_path(variant: str, series, *, b_tilde_init: float = 0.5,
                   grid_points: int = 21) -> tuple[FitResult, np.ndarray]:
    """Single fit on the whole series and its forecast path over all indices."""
    xi = check_binary_series(series)
    fr = fit(variant, xi, xi.size, b_tilde_init=b_tilde_init, grid_points=grid_points)
    return fr, one_step_path(fr.params, xi, 0, xi.size)


def run_fit_eval(
    series,
    scheme: SlotScheme,
    variants=MODEL_NAMES,
    knot_counts=DEFAULT_KNOT_COUNTS,
    *,
    b_tilde_init: float = 0.5,
    grid_points: int = 21,
    warm_start: bool = True,
    safeguard_grid_points: int = 3,
) -> tuple[EvalReport, dict[str, ModelEvaluation]]:
    """Fit, forecast and score every requested variant on one series."""
    xi = check_binary_series(series)
    if xi.size < 2 * scheme.n_slots:
        raise ValueError(
            f"need at least {2 * scheme.n_slots} observations for "
            f"{scheme.n_slots} slots, got {xi.size}"
        )
    variants = tuple(variants)
    unknown = [v for v in variants if v not in MODEL_NAMES]
    if unknown or not variants:
        raise ValueError(f"variants must be a nonempty subset of {MODEL_NAMES}")

    evaluations: dict[str, ModelEvaluation] = {}
    for variant in variants:
        trajectory = fit_trajectory(
            variant,
            xi,
            scheme,
            b_tilde_init=b_tilde_init,
            grid_points=grid_points,
            warm_start=warm_start,
            safeguard_grid_points=safeguard_grid_points,
        )
        psi = out_of_sample_path(trajectory, xi, scheme)
        run = PredictionRun(series=xi, psi_hat=psi, scheme=scheme)
        mse_by_level: dict = {NO_SMOOTH: mse_smoothed(run, None)}
        for k in knot_counts:
            mse_by_level[int(k)] = mse_smoothed(run, int(k))
        evaluations[variant] = ModelEvaluation(
            variant=variant,
            trajectory=trajectory,
            psi_hat=psi,
            ss_rel=ss_rel(run),
            mse_by_level=mse_by_level,
        )

    levels = [NO_SMOOTH, *(int(k) for k in knot_counts)]
    report = EvalReport(
        ss_rel_per_model={v: evaluations[v].ss_rel for v in variants},
        theoretical_value=theoretical_value(xi, scheme),
        mse_table={
            level: {v: evaluations[v].mse_by_level[level] for v in variants}
            for level in levels
        },
    )
    return report, evaluations
