"""Exact k-color urn engines.

Two reinforcement schemes over a vector of ball masses:

* standard Polya: the drawn color receives ``alpha`` extra balls, so every
  past draw keeps the same weight forever and the composition stabilizes;
* rescaled Polya: the urn splits into a fixed component ``b0`` and a
  reinforced component ``B`` that is scaled by ``beta`` before ``alpha``
  balls of the drawn color are added.  With ``beta < 1`` old draws decay
  geometrically (local reinforcement) and the draw probabilities keep
  fluctuating instead of settling.

States are plain immutable values; update functions return new states.  The
hot path (``rp_update`` / ``polya_update``) assumes its input already
satisfies the state invariants, which the ``initial`` constructors and
``validate`` methods enforce.  Totals are always recomputed from components
rather than carried incrementally, so closed-form cross-checks stay honest
over long runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError

__all__ = [
    "RPUrnState",
    "PolyaUrnState",
    "predictive_means",
    "rp_update",
    "polya_update",
    "total_balls_closed_form",
    "simulate",
    "predictive_means_path",
]


def _as_masses(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise ValueError(f"{name} must be a 1-d vector with at least 2 colors")
    if not np.isfinite(arr).all() or (arr < 0).any():
        raise ValueError(f"{name} entries must be finite and non-negative")
    return arr


@dataclass(frozen=True, slots=True)
class RPUrnState:
    """Rescaled Polya urn: ``counts = b0 + B`` with ``B`` the reinforced part.

    ``beta = 1`` reproduces the standard Polya urn; ``beta = 0`` keeps only
    the most recent draw in the reinforced component.
    """

    b0: np.ndarray
    B: np.ndarray
    alpha: float
    beta: float
    n: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "b0", np.asarray(self.b0, dtype=np.float64))
        object.__setattr__(self, "B", np.asarray(self.B, dtype=np.float64))

    @classmethod
    def initial(cls, b0, B0=None, *, alpha: float, beta: float) -> "RPUrnState":
        """Validated constructor for a fresh urn (``n = 0``)."""
        b0 = _as_masses(b0, "b0")
        B0 = np.zeros_like(b0) if B0 is None else _as_masses(B0, "B0")
        state = cls(b0=b0, B=B0, alpha=float(alpha), beta=float(beta), n=0)
        state.validate()
        return state

    def validate(self) -> None:
        b0 = _as_masses(self.b0, "b0")
        B = _as_masses(self.B, "B")
        if b0.shape != B.shape:
            raise ValueError("b0 and B must have the same number of colors")
        if b0.sum() <= 0.0:
            raise ValueError("the fixed component must have positive total mass")
        if not (np.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.n < 0:
            raise ValueError("step counter must be non-negative")

    @property
    def k(self) -> int:
        return self.b0.shape[0]

    @property
    def counts(self) -> np.ndarray:
        return self.b0 + self.B

    @property
    def total(self) -> float:
        """Total mass ``|b0| + |B|``, recomputed from components."""
        return float(self.b0.sum() + self.B.sum())


@dataclass(frozen=True, slots=True)
class PolyaUrnState:
    """Standard Polya urn: the drawn color gains ``alpha`` balls per step."""

    N: np.ndarray
    alpha: float
    n: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "N", np.asarray(self.N, dtype=np.float64))

    @classmethod
    def initial(cls, N0, *, alpha: float) -> "PolyaUrnState":
        state = cls(N=_as_masses(N0, "N0"), alpha=float(alpha), n=0)
        state.validate()
        return state

    def validate(self) -> None:
        N = _as_masses(self.N, "N")
        if N.sum() <= 0.0:
            raise ValueError("the urn must have positive total mass")
        if not (np.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.n < 0:
            raise ValueError("step counter must be non-negative")

    @property
    def k(self) -> int:
        return self.N.shape[0]

    @property
    def counts(self) -> np.ndarray:
        return self.N

    @property
    def total(self) -> float:
        return float(self.N.sum())


UrnState = RPUrnState | PolyaUrnState


def predictive_means(state: UrnState) -> np.ndarray:
    """Probability vector for the next draw: current counts over total mass."""
    counts = state.counts
    total = counts.sum()
    if not total > 0.0:
        raise NumericError("degenerate urn state: total ball mass is zero")
    return counts / total


def _check_color(color: int, k: int) -> int:
    color = int(color)
    if not 0 <= color < k:
        raise ValueError(f"color must lie in [0, {k}), got {color}")
    return color


def rp_update(state: RPUrnState, color: int) -> RPUrnState:
    """Advance a rescaled urn one step: ``B' = beta * B + alpha * e_color``."""
    B = state.beta * state.B
    B[_check_color(color, B.shape[0])] += state.alpha
    return RPUrnState(state.b0, B, state.alpha, state.beta, state.n + 1)


def polya_update(state: PolyaUrnState, color: int) -> PolyaUrnState:
    """Advance a standard urn one step: add ``alpha`` balls of the drawn color."""
    N = state.N.copy()
    N[_check_color(color, N.shape[0])] += state.alpha
    return PolyaUrnState(N, state.alpha, state.n + 1)


def total_balls_closed_form(
    b0_total: float,
    B0_total: float,
    alpha: float,
    beta: float,
    n: int,
) -> float:
    """Total mass of a rescaled urn after ``n`` steps, in closed form.

    Equals ``|b0| + alpha/(1-beta) + beta**n * (|B0| - alpha/(1-beta))`` and
    tends to the limit ``|b0| + alpha/(1-beta)`` as ``n`` grows.  Only defined
    for ``beta < 1``; at ``beta = 1`` the total grows linearly instead.
    """
    b0_total = float(b0_total)
    B0_total = float(B0_total)
    if not b0_total > 0.0:
        raise ValueError("b0_total must be positive")
    if B0_total < 0.0:
        raise ValueError("B0_total must be non-negative")
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"closed form requires beta in [0, 1), got {beta}")
    if n < 0:
        raise ValueError("n must be non-negative")
    limit = alpha / (1.0 - beta)
    return b0_total + limit + beta**n * (B0_total - limit)


def _updater(state: UrnState):
    return rp_update if isinstance(state, RPUrnState) else polya_update


def simulate(initial: UrnState, steps: int, rng_seed: int) -> np.ndarray:
    """Draw ``steps`` colors from the urn, advancing the state after each draw.

    Each color is sampled by inverse CDF over the current predictive means
    using ``numpy.random.default_rng(rng_seed)``, so equal seeds and states
    reproduce the same outcome sequence.
    """
    initial.validate()
    steps = int(steps)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    update = _updater(initial)
    rng = np.random.default_rng(rng_seed)
    uniforms = rng.random(steps)
    outcomes = np.empty(steps, dtype=np.int64)
    state = initial
    k = state.k
    for i in range(steps):
        cdf = np.cumsum(predictive_means(state))
        color = min(int(np.searchsorted(cdf, uniforms[i], side="right")), k - 1)
        outcomes[i] = color
        state = update(state, color)
    return outcomes


def predictive_means_path(initial: UrnState, outcomes) -> np.ndarray:
    """Replay a given draw sequence and collect the predictive means.

    Returns an array of shape ``(len(outcomes) + 1, k)``; row ``m`` holds the
    predictive means after the first ``m`` draws (row 0 is the initial state).
    """
    initial.validate()
    outcomes = np.asarray(outcomes, dtype=np.int64)
    update = _updater(initial)
    path = np.empty((outcomes.size + 1, initial.k))
    state = initial
    path[0] = predictive_means(state)
    for i, color in enumerate(outcomes):
        state = update(state, int(color))
        path[i + 1] = predictive_means(state)
    return path
