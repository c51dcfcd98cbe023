"""Slot-based maximum-likelihood fitting of the one-step-ahead predictors.

The likelihood of a parameter vector over a training prefix of length ``E``
is the Bernoulli one-step-ahead log likelihood

    sum_{n=0}^{E-1}  xi[n] * log(psi_n) + (1 - xi[n]) * log(1 - psi_n)

with ``psi_n`` the forecast emitted after the first ``n`` observations and
clamped to [1e-9, 1 - 1e-9] before the log, so the value is always finite.
Every forecast the streaming predictor emits inside the training window
enters the sum, including the prior forecast ``psi_0``; this makes the
no_fashion maximizer exactly the sample mean of the training bits.

Optimization is a coarse grid over the parameter box followed by
derivative-free Nelder-Mead refinement from the best candidate, stopping
once the log-likelihood improvement drops below 1e-6.  Complete fits are
additionally seeded with the solutions of the nested no_fashion and
only_fashion fits, so the fitted complete likelihood can never fall below
the restricted variants'.  Trajectory fits over consecutive slots reuse the
previous slot's solution as a warm start with a reduced safeguard grid,
which keeps long series tractable without changing any single-fit contract.

Grids are evaluated in row-major order over the axes listed by
``parameter_grid``; ties on the grid are broken by the lowest index.

The standard Polya box is handled through an interior transform: the
optimizer works on ``(log(a), q)`` with ``a1 = clip(q * a, 1e-6, a - 1e-6)``,
which keeps the coupled constraint ``0 < a1 < a`` rectangular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

from ._validation import check_binary_series
from .predictors import ApproxParams, PolyaPredictorParams, one_step_path

__all__ = [
    "MODEL_NAMES",
    "PSI_CLAMP",
    "SlotScheme",
    "FitResult",
    "ParamTrajectory",
    "log_likelihood",
    "fit",
    "fit_trajectory",
    "parameter_grid",
]

MODEL_NAMES = ("complete", "only_fashion", "no_fashion", "polya")

PSI_CLAMP = 1e-9
BETA_MAX = 1.0 - 1e-6
LOG_A_MIN = math.log(1e-3)
LOG_A_MAX = math.log(1e6)
A1_MARGIN = 1e-6
Q_EPS = 1e-6
CONVERGENCE_TOL = 1e-6


@dataclass(frozen=True, slots=True)
class SlotScheme:
    """Partition of a series of ``n_obs`` observations into ``n_slots`` slots.

    Slot ``s`` covers prediction indices ``s * slot_len .. (s+1) * slot_len - 1``
    (the forecast made after ``n`` observations targets observation ``n``);
    observations beyond ``n_slots * slot_len`` are unused.
    """

    n_slots: int
    n_obs: int

    def __post_init__(self) -> None:
        if self.n_slots < 2:
            raise ValueError(f"need at least 2 slots, got {self.n_slots}")
        if self.n_obs // self.n_slots < 1:
            raise ValueError(
                f"{self.n_obs} observations cannot fill {self.n_slots} slots"
            )

    @property
    def slot_len(self) -> int:
        return self.n_obs // self.n_slots

    def training_end(self, s: int) -> int:
        """Number of observations available before slot ``s`` starts."""
        self._check_slot(s)
        return s * self.slot_len

    def slot_range(self, s: int) -> tuple[int, int]:
        """Half-open prediction-index range covered by slot ``s``."""
        self._check_slot(s)
        return s * self.slot_len, (s + 1) * self.slot_len

    @property
    def evaluated_range(self) -> tuple[int, int]:
        """Prediction indices entering any metric: slots 1 .. n_slots-1."""
        return self.slot_len, self.n_slots * self.slot_len

    def _check_slot(self, s: int) -> None:
        if not 1 <= s <= self.n_slots - 1:
            raise ValueError(f"slot index must lie in [1, {self.n_slots - 1}], got {s}")


@dataclass(frozen=True, slots=True)
class FitResult:
    params: ApproxParams | PolyaPredictorParams
    log_likelihood: float
    iterations: int
    converged: bool
    degenerate_data: bool = False


@dataclass(frozen=True, slots=True)
class ParamTrajectory:
    """Per-slot fits ``(s, FitResult)`` for ``s = 1 .. n_slots - 1``."""

    variant: str
    per_slot: tuple[tuple[int, FitResult], ...]

    def __post_init__(self) -> None:
        slots = [s for s, _ in self.per_slot]
        if any(b <= a for a, b in zip(slots, slots[1:])):
            raise ValueError("slot indices must be strictly increasing")

    def result(self, s: int) -> FitResult:
        for slot, fr in self.per_slot:
            if slot == s:
                return fr
        raise KeyError(s)


def _bernoulli_loglik(psi: np.ndarray, miss_shift: np.ndarray) -> float:
    """Sum of log P(observed bit) with forecasts clamped away from 0 and 1.

    ``miss_shift`` is ``1 - xi`` as floats: |psi - (1 - xi)| equals psi for a
    one and 1 - psi for a zero, so a single log pass covers both cases.
    """
    p = np.clip(psi, PSI_CLAMP, 1.0 - PSI_CLAMP)
    np.subtract(p, miss_shift, out=p)
    np.abs(p, out=p)
    np.log(p, out=p)
    return float(p.sum())


def log_likelihood(
    params: ApproxParams | PolyaPredictorParams,
    series,
    start: int = 0,
    stop: int | None = None,
) -> float:
    """Clamped Bernoulli log likelihood over prediction indices [start, stop)."""
    xi = check_binary_series(series)
    stop = xi.size if stop is None else int(stop)
    if start == stop:
        return 0.0
    psi = one_step_path(params, xi, start, stop)
    return _bernoulli_loglik(psi, 1.0 - xi[start:stop].astype(np.float64))


# ---------------------------------------------------------------------------
# Per-variant optimization problems
# ---------------------------------------------------------------------------


def parameter_grid(variant: str, grid_points: int = 21) -> list[np.ndarray]:
    """Coarse-grid axes for each free dimension of a variant's box."""
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    unit = np.linspace(0.0, 1.0, grid_points)
    beta_axis = np.linspace(0.0, BETA_MAX, grid_points)
    if variant == "complete":
        return [unit.copy(), unit.copy(), beta_axis]
    if variant == "only_fashion":
        return [beta_axis]
    if variant == "no_fashion":
        return [unit.copy()]
    if variant == "polya":
        return [
            np.linspace(LOG_A_MIN, LOG_A_MAX, grid_points),
            np.linspace(Q_EPS, 1.0 - Q_EPS, grid_points),
        ]
    raise ValueError(f"unknown variant {variant!r}")


def _decode(variant: str, x: Sequence[float], b_tilde_init: float):
    if variant == "complete":
        return ApproxParams.complete(x[0], x[1], x[2], b_tilde_init)
    if variant == "only_fashion":
        return ApproxParams.only_fashion(x[0], b_tilde_init)
    if variant == "no_fashion":
        return ApproxParams.no_fashion(x[0])
    a = math.exp(x[0])
    a1 = min(max(x[1] * a, A1_MARGIN), a - A1_MARGIN)
    return PolyaPredictorParams(a1=a1, a=a)


def _encode(params: ApproxParams | PolyaPredictorParams) -> np.ndarray:
    if isinstance(params, PolyaPredictorParams):
        return np.array([math.log(params.a), params.a1 / params.a])
    if params.variant == "complete":
        return np.array([params.p0, params.gamma_star, min(params.beta, BETA_MAX)])
    if params.variant == "only_fashion":
        return np.array([min(params.beta, BETA_MAX)])
    return np.array([params.p0])


def _bounds(variant: str) -> list[tuple[float, float]]:
    if variant == "complete":
        return [(0.0, 1.0), (0.0, 1.0), (0.0, BETA_MAX)]
    if variant == "only_fashion":
        return [(0.0, BETA_MAX)]
    if variant == "no_fashion":
        return [(0.0, 1.0)]
    return [(LOG_A_MIN, LOG_A_MAX), (Q_EPS, 1.0 - Q_EPS)]


class _Objective:
    """Fast log-likelihood evaluator over a fixed training prefix."""

    def __init__(self, variant: str, xi: np.ndarray, end: int, b_tilde_init: float):
        self.variant = variant
        self.end = end
        self.b_tilde_init = b_tilde_init
        self.ones = int(xi[:end].sum())
        self.miss_shift = 1.0 - xi[:end].astype(np.float64)
        if variant == "polya":
            self.csum = np.concatenate(
                ([0.0], np.cumsum(xi[: end - 1], dtype=np.float64))
            )
            self.steps = np.arange(end, dtype=np.float64)
        else:
            self.drive = xi[: end - 1].astype(np.float64)

    def fashion_path(self, beta: float) -> np.ndarray:
        b0 = self.b_tilde_init
        if self.end <= 1:
            return np.full(self.end, b0)
        driven, _ = lfilter([1.0 - beta], [1.0, -beta], self.drive, zi=[beta * b0])
        return np.concatenate(([b0], driven))

    def __call__(self, x: np.ndarray) -> float:
        if self.variant == "polya":
            a = math.exp(x[0])
            a1 = min(max(x[1] * a, A1_MARGIN), a - A1_MARGIN)
            psi = (a1 + self.csum) / (a + self.steps)
        else:
            if self.variant == "complete":
                p0, gamma, beta = x[0], x[1], x[2]
            elif self.variant == "only_fashion":
                p0, gamma, beta = 0.0, 1.0, x[0]
            else:
                p0, gamma, beta = x[0], 0.0, 0.0
            psi = (1.0 - gamma) * p0 + gamma * self.fashion_path(beta)
        return _bernoulli_loglik(psi, self.miss_shift)

    # -- batched grid evaluation ------------------------------------------

    def _affine_batch(self, consts: np.ndarray, gains: np.ndarray,
                      bt: np.ndarray) -> np.ndarray:
        """Log likelihoods of psi = const + gain * bt for many (const, gain)."""
        total = np.zeros(consts.size)
        chunk = max(1024, int(4e6 / max(consts.size, 1)))
        for lo in range(0, bt.size, chunk):
            b = bt[lo : lo + chunk][None, :]
            shift = self.miss_shift[lo : lo + chunk][None, :]
            psi = consts[:, None] + gains[:, None] * b
            np.clip(psi, PSI_CLAMP, 1.0 - PSI_CLAMP, out=psi)
            np.subtract(psi, shift, out=psi)
            np.abs(psi, out=psi)
            np.log(psi, out=psi)
            total += psi.sum(axis=1)
        return total

    def grid_values(self, axes: list[np.ndarray]) -> np.ndarray:
        """Log likelihood at every grid point, row-major over ``axes``."""
        if self.variant == "complete":
            p0s, gammas, betas = axes
            pp, gg = np.meshgrid(p0s, gammas, indexing="ij")
            consts = ((1.0 - gg) * pp).ravel()
            gains = gg.ravel()
            values = np.empty((consts.size, betas.size))
            for j, beta in enumerate(betas):
                values[:, j] = self._affine_batch(consts, gains, self.fashion_path(beta))
            return values.ravel()
        if self.variant == "only_fashion":
            return np.array([self(np.array([beta])) for beta in axes[0]])
        if self.variant == "no_fashion":
            n1 = float(self.ones)
            n0 = float(self.end - n1)
            p = np.clip(axes[0], PSI_CLAMP, 1.0 - PSI_CLAMP)
            return n1 * np.log(p) + n0 * np.log(1.0 - p)
        log_as, qs = axes
        la, qq = np.meshgrid(log_as, qs, indexing="ij")
        a_flat = np.exp(la.ravel())
        a1_flat = np.clip(qq.ravel() * a_flat, A1_MARGIN, a_flat - A1_MARGIN)
        total = np.zeros(a_flat.size)
        chunk = max(1024, int(4e6 / max(a_flat.size, 1)))
        for lo in range(0, self.end, chunk):
            c = self.csum[lo : lo + chunk][None, :]
            s = self.steps[lo : lo + chunk][None, :]
            shift = self.miss_shift[lo : lo + chunk][None, :]
            psi = (a1_flat[:, None] + c) / (a_flat[:, None] + s)
            np.clip(psi, PSI_CLAMP, 1.0 - PSI_CLAMP, out=psi)
            np.subtract(psi, shift, out=psi)
            np.abs(psi, out=psi)
            np.log(psi, out=psi)
            total += psi.sum(axis=1)
        return total


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------


def _degenerate_params(variant: str, constant: int, b_tilde_init: float):
    """Boundary-clamped estimate for all-identical training data."""
    if variant == "no_fashion":
        return ApproxParams.no_fashion(float(constant))
    if variant == "only_fashion":
        # beta = 0 repeats the last observation, which is always right here
        return ApproxParams.only_fashion(0.0, b_tilde_init)
    if variant == "complete":
        return ApproxParams.complete(float(constant), 0.0, 0.0, b_tilde_init)
    a = 1e-3
    a1 = a - A1_MARGIN if constant == 1 else A1_MARGIN
    return PolyaPredictorParams(a1=a1, a=a)


def _initial_simplex(x0: np.ndarray, bounds, step_fraction: float) -> np.ndarray:
    """Simplex around ``x0`` with per-coordinate steps inside the box."""
    dim = x0.size
    simplex = np.tile(x0, (dim + 1, 1))
    for i, (lo, hi) in enumerate(bounds):
        step = step_fraction * (hi - lo)
        if x0[i] + step <= hi:
            simplex[i + 1, i] = x0[i] + step
        else:
            simplex[i + 1, i] = x0[i] - step
    return simplex


def fit(
    variant: str,
    series,
    training_end: int,
    *,
    b_tilde_init: float = 0.5,
    grid_points: int = 21,
    extra_starts: Sequence[ApproxParams | PolyaPredictorParams] = (),
    seed_restricted: bool = True,
    refine_step: float = 0.05,
) -> FitResult:
    """Maximum-likelihood fit of one variant on the first ``training_end`` bits.

    ``extra_starts`` adds candidate parameter vectors next to the grid best
    (used by trajectory warm starts).  With ``seed_restricted`` a complete
    fit also evaluates the fitted no_fashion and only_fashion solutions as
    candidates, guaranteeing nested-model dominance.  ``refine_step`` sizes
    the initial simplex as a fraction of each box side; warm starts pass a
    small value so refinement converges in few steps.
    """
    if variant not in MODEL_NAMES:
        raise ValueError(f"unknown variant {variant!r}; expected one of {MODEL_NAMES}")
    xi = check_binary_series(series)
    end = int(training_end)
    if end < 2:
        raise ValueError(f"training_end must be at least 2, got {end}")
    if end > xi.size:
        raise ValueError(f"training_end {end} exceeds series length {xi.size}")

    ones = int(xi[:end].sum())
    if ones in (0, end):
        params = _degenerate_params(variant, 1 if ones else 0, b_tilde_init)
        return FitResult(
            params=params,
            log_likelihood=log_likelihood(params, xi, 0, end),
            iterations=0,
            converged=True,
            degenerate_data=True,
        )

    if variant == "no_fashion":
        params = ApproxParams.no_fashion(ones / end)
        return FitResult(
            params=params,
            log_likelihood=log_likelihood(params, xi, 0, end),
            iterations=0,
            converged=True,
        )

    objective = _Objective(variant, xi, end, b_tilde_init)
    axes = parameter_grid(variant, grid_points)
    grid_vals = objective.grid_values(axes)
    best_flat = int(np.argmax(grid_vals))
    shape = tuple(axis.size for axis in axes)
    best_idx = np.unravel_index(best_flat, shape)
    candidates = [
        (np.array([axes[d][best_idx[d]] for d in range(len(axes))]),
         float(grid_vals[best_flat]))
    ]

    for start_params in extra_starts:
        x = _encode(start_params)
        candidates.append((x, objective(x)))

    if variant == "complete" and seed_restricted:
        for nested in ("no_fashion", "only_fashion"):
            sub = fit(nested, xi, end, b_tilde_init=b_tilde_init,
                      grid_points=grid_points, seed_restricted=False)
            p = sub.params
            x = (np.array([p.p0, 0.0, 0.0]) if nested == "no_fashion"
                 else np.array([0.0, 1.0, min(p.beta, BETA_MAX)]))
            candidates.append((x, objective(x)))

    best_c = 0
    for i in range(1, len(candidates)):
        if candidates[i][1] > candidates[best_c][1]:
            best_c = i
    x0 = candidates[best_c][0]
    bounds = _bounds(variant)
    result = minimize(
        lambda x: -objective(x),
        x0,
        method="Nelder-Mead",
        bounds=bounds,
        options={
            "fatol": CONVERGENCE_TOL,
            "xatol": 1e-4,
            "maxfev": 2000,
            "initial_simplex": _initial_simplex(x0, bounds, refine_step),
        },
    )
    return FitResult(
        params=_decode(variant, result.x, b_tilde_init),
        log_likelihood=-float(result.fun),
        iterations=int(result.nit),
        converged=bool(result.success),
    )


def fit_trajectory(
    variant: str,
    series,
    scheme: SlotScheme,
    *,
    b_tilde_init: float = 0.5,
    grid_points: int = 21,
    warm_start: bool = True,
    safeguard_grid_points: int = 2,
) -> ParamTrajectory:
    """Fit a variant at every slot boundary: slot ``s`` trains on slots 0..s-1.

    The first slot runs the full coarse grid; later slots warm-start from the
    previous solution with a reduced safeguard grid and a tight refinement
    simplex (disable with ``warm_start=False`` to run the full grid at every
    slot).  A slot whose fit fails is recorded as unconverged instead of
    aborting the trajectory.
    """
    xi = check_binary_series(series)
    if scheme.n_obs != xi.size:
        raise ValueError(
            f"scheme expects {scheme.n_obs} observations, series has {xi.size}"
        )
    entries: list[tuple[int, FitResult]] = []
    prev: FitResult | None = None
    for s in range(1, scheme.n_slots):
        end = scheme.training_end(s)
        # a degenerate-data slot restarts the chain: once mixed bits appear
        # the landscape is new and deserves a full grid, not a corner start
        warm = warm_start and prev is not None and not prev.degenerate_data
        try:
            fr = fit(
                variant,
                xi,
                end,
                b_tilde_init=b_tilde_init,
                grid_points=safeguard_grid_points if warm else grid_points,
                extra_starts=(prev.params,) if warm else (),
                seed_restricted=not warm,
                refine_step=0.01 if warm else 0.05,
            )
        except (ValueError, FloatingPointError):
            fallback = (
                prev.params if prev is not None
                else _degenerate_params(variant, 0, b_tilde_init)
            )
            fr = FitResult(
                params=fallback,
                log_likelihood=float("-inf"),
                iterations=0,
                converged=False,
            )
        entries.append((s, fr))
        if fr.converged:
            prev = fr
    return ParamTrajectory(variant=variant, per_slot=tuple(entries))
