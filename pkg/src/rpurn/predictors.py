"""Two-color one-step-ahead predictors for binary sentiment streams.

Large-step approximation of the rescaled urn with two colors:

    psi_n      = (1 - gamma_star) * p0 + gamma_star * btilde_n
    btilde_n+1 = beta * btilde_n + (1 - beta) * xi_n+1

where ``btilde`` (the fashion process) is an exponentially weighted average
of past observations and ``gamma_star`` balances it against the constant
component ``p0``.  Three constraint patterns are supported:

* ``complete``     - p0, gamma_star and beta all free;
* ``only_fashion`` - gamma_star = 1, the forecast is the fashion process;
* ``no_fashion``   - gamma_star = 0, the forecast is the constant p0.

The standard Polya urn admits its own two-parameter predictor

    psi_n = (a1 + sum(xi_1..xi_n)) / (a + n)

where ``a1 = N0_positive / alpha`` and ``a = |N0| / alpha``; the forecast
only depends on the initial composition through these two ratios.

All predictors share a streaming interface (``predict`` / ``advance`` on an
immutable state) plus a vectorized replay (``one_step_path`` / ``run_series``)
that matches the streaming recursion to floating-point accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ._validation import check_binary_series, check_positive, check_unit_interval

__all__ = [
    "APPROX_VARIANTS",
    "ApproxParams",
    "PolyaPredictorParams",
    "PredictorState",
    "initial_state",
    "predict",
    "advance",
    "one_step_path",
    "run_series",
    "simulate_series",
]

APPROX_VARIANTS = ("complete", "only_fashion", "no_fashion")


@dataclass(frozen=True, slots=True)
class ApproxParams:
    """Parameters of the approximated two-color dynamics.

    Use the ``complete`` / ``only_fashion`` / ``no_fashion`` constructors;
    building inconsistent combinations directly raises.  ``beta = 1`` is
    rejected: without decay the fashion process never forgets and the
    approximation does not apply.
    """

    p0: float
    gamma_star: float
    beta: float
    variant: str = "complete"
    b_tilde_init: float = 0.5

    def __post_init__(self) -> None:
        for name in ("p0", "gamma_star", "beta", "b_tilde_init"):
            object.__setattr__(self, name, float(getattr(self, name)))
        check_unit_interval(self.p0, "p0")
        check_unit_interval(self.gamma_star, "gamma_star")
        check_unit_interval(self.beta, "beta", closed_right=False)
        check_unit_interval(self.b_tilde_init, "b_tilde_init")
        if self.variant not in APPROX_VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "only_fashion" and (self.gamma_star != 1.0 or self.p0 != 0.0):
            raise ValueError("only_fashion requires gamma_star=1 and fixes p0=0")
        if self.variant == "no_fashion" and (self.gamma_star != 0.0 or self.beta != 0.0):
            raise ValueError("no_fashion requires gamma_star=0 and fixes beta=0")

    @classmethod
    def complete(cls, p0: float, gamma_star: float, beta: float,
                 b_tilde_init: float = 0.5) -> "ApproxParams":
        return cls(float(p0), float(gamma_star), float(beta), "complete",
                   float(b_tilde_init))

    @classmethod
    def only_fashion(cls, beta: float, b_tilde_init: float = 0.5) -> "ApproxParams":
        return cls(0.0, 1.0, float(beta), "only_fashion", float(b_tilde_init))

    @classmethod
    def no_fashion(cls, p0: float) -> "ApproxParams":
        return cls(float(p0), 0.0, 0.0, "no_fashion", 0.5)


@dataclass(frozen=True, slots=True)
class PolyaPredictorParams:
    """Standard Polya predictor, parameterized by the ratios ``(a1, a)``."""

    a1: float
    a: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a1", float(self.a1))
        object.__setattr__(self, "a", float(self.a))
        check_positive(self.a1, "a1")
        check_positive(self.a, "a")
        if not self.a1 < self.a:
            raise ValueError(f"need 0 < a1 < a, got a1={self.a1}, a={self.a}")


@dataclass(frozen=True, slots=True)
class PredictorState:
    """Streaming predictor state after ``n`` observations.

    ``b_tilde`` is the current fashion value (meaningful for the approximated
    variants only; convexity of the update keeps it inside [0, 1]), while
    ``count_ones`` feeds the Polya predictor.
    """

    params: ApproxParams | PolyaPredictorParams
    b_tilde: float
    count_ones: int = 0
    n: int = 0


def initial_state(params: ApproxParams | PolyaPredictorParams) -> PredictorState:
    b_tilde = params.b_tilde_init if isinstance(params, ApproxParams) else 0.5
    return PredictorState(params=params, b_tilde=b_tilde)


def predict(state: PredictorState) -> float:
    """One-step-ahead probability that the next observation equals 1."""
    p = state.params
    if isinstance(p, ApproxParams):
        return (1.0 - p.gamma_star) * p.p0 + p.gamma_star * state.b_tilde
    return (p.a1 + state.count_ones) / (p.a + state.n)


def advance(state: PredictorState, observation: int) -> PredictorState:
    """Feed one observation (0 or 1) and return the next state."""
    obs = int(observation)
    if obs not in (0, 1):
        raise ValueError(f"observation must be 0 or 1, got {observation}")
    p = state.params
    b_tilde = state.b_tilde
    if isinstance(p, ApproxParams):
        b_tilde = p.beta * b_tilde + (1.0 - p.beta) * obs
    return PredictorState(
        params=p,
        b_tilde=b_tilde,
        count_ones=state.count_ones + obs,
        n=state.n + 1,
    )


def one_step_path(
    params: ApproxParams | PolyaPredictorParams,
    series,
    start: int = 0,
    stop: int | None = None,
) -> np.ndarray:
    """Vectorized one-step-ahead forecasts over a binary series.

    Entry ``j`` of the result is the probability assigned to observation
    ``series[start + j]`` given ``series[:start + j]``, i.e. the prediction
    emitted by the streaming API after ``start + j`` advances.
    """
    xi = check_binary_series(series)
    n = xi.size
    stop = n if stop is None else int(stop)
    start = int(start)
    if not 0 <= start <= stop <= n:
        raise ValueError(f"prediction range [{start}, {stop}) outside series of length {n}")
    if start == stop:
        return np.empty(0, dtype=np.float64)

    if isinstance(params, PolyaPredictorParams):
        # counts of ones among the first j observations, j = start .. stop-1
        csum = np.concatenate(([0.0], np.cumsum(xi[: stop - 1], dtype=np.float64)))
        steps = np.arange(start, stop, dtype=np.float64)
        return (params.a1 + csum[start:stop]) / (params.a + steps)

    bt = _fashion_path(xi, stop, params.beta, params.b_tilde_init)
    return (1.0 - params.gamma_star) * params.p0 + params.gamma_star * bt[start:stop]


def _fashion_path(xi: np.ndarray, stop: int, beta: float, b_init: float) -> np.ndarray:
    """Fashion values driving predictions 0..stop-1 (entry j uses xi[:j])."""
    if stop <= 1:
        return np.full(max(stop, 0), b_init)
    driven, _ = lfilter(
        [1.0 - beta], [1.0, -beta], xi[: stop - 1].astype(np.float64), zi=[beta * b_init]
    )
    return np.concatenate(([b_init], driven))


def run_series(
    params: ApproxParams | PolyaPredictorParams,
    series,
    start_index: int = 1,
) -> np.ndarray:
    """Forecast probabilities for every step from ``start_index`` on.

    Returns the one-step-ahead probability emitted after each of the first
    ``start_index .. N-1`` observations; empty when ``start_index >= N``.
    """
    xi = check_binary_series(series)
    start_index = int(start_index)
    if start_index < 0:
        raise ValueError("start_index must be non-negative")
    if start_index >= xi.size:
        return np.empty(0, dtype=np.float64)
    return one_step_path(params, xi, start_index, xi.size)


def simulate_series(
    params: ApproxParams | PolyaPredictorParams,
    steps: int,
    rng_seed: int,
) -> np.ndarray:
    """Sample a synthetic binary series from a predictor's own law.

    Each bit is Bernoulli with the current one-step-ahead probability, after
    which the state advances on the sampled bit.  Fixed seeds reproduce the
    same series.
    """
    steps = int(steps)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rng = np.random.default_rng(rng_seed)
    uniforms = rng.random(steps)
    out = np.empty(steps, dtype=np.uint8)

    if isinstance(params, ApproxParams):
        const = (1.0 - params.gamma_star) * params.p0
        gamma = params.gamma_star
        beta = params.beta
        bt = params.b_tilde_init
        for i in range(steps):
            bit = 1 if uniforms[i] < const + gamma * bt else 0
            out[i] = bit
            bt = beta * bt + (1.0 - beta) * bit
    else:
        a1 = params.a1
        a = params.a
        ones = 0.0
        for i in range(steps):
            bit = 1 if uniforms[i] * (a + i) < a1 + ones else 0
            out[i] = bit
            ones += bit
    return out
