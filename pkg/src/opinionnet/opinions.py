"""Opinion-space math and agent parameters.

Opinions are angles in the closed interval [0, pi] (radians internally;
degrees only at external boundaries). The interval is *not* circular:
0 and pi are maximally distant, and distances are plain absolute
differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

FULL_RANGE = (0.0, math.pi)

# Minimum acceptance probability for rejection sampling before a population
# spec is considered pathological.
MIN_ACCEPTANCE = 0.01


class AgentKind(Enum):
    RIGID = "rigid"
    FLEXIBLE = "flexible"


@dataclass
class AgentParams:
    """Per-agent parameters.

    tolerance          max opinion difference the agent accepts from an
                       influencer (radians, >= 0)
    kind               rigid (low tolerance) or flexible (high tolerance)
    sociability_base   the shared proportionality constant K_C in the
                       sociability index s_i = K_C * w_ii
    self_weight        w_ii in (0, 1); mutable, maintained by the engine
                       from Katz centrality
    """

    tolerance: float
    kind: AgentKind
    sociability_base: float = 100.0
    self_weight: float = 0.5

    def __post_init__(self):
        if self.tolerance < 0:
            raise ValueError(f"tolerance must be >= 0, got {self.tolerance}")
        if not 0.0 < self.self_weight < 1.0:
            raise ValueError(f"self_weight must be in (0, 1), got {self.self_weight}")
        if self.sociability_base <= 0:
            raise ValueError("sociability_base must be positive")


@dataclass
class OpinionState:
    """Belief angles for the whole population at one time step."""

    theta: np.ndarray
    t: int = 0

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        if self.theta.ndim != 1 or self.theta.size == 0:
            raise ValueError("theta must be a non-empty 1-d vector")
        if not np.all(np.isfinite(self.theta)):
            raise ValueError("theta contains non-finite values")
        if np.any(self.theta < 0.0) or np.any(self.theta > math.pi):
            raise ValueError("opinions must lie in [0, pi]")
        if self.t < 0:
            raise ValueError("t must be non-negative")

    @property
    def n(self) -> int:
        return self.theta.size


def within_tolerance(theta_i: float, theta_j: float, tol_i: float) -> bool:
    """True iff j's opinion is acceptable to an agent holding theta_i.

    Plain absolute difference with an inclusive bound; no wrap-around.
    """
    return abs(theta_i - theta_j) <= tol_i


def circular_mean(weights: np.ndarray, angles: np.ndarray) -> float:
    """Weighted circular mean of angles in [0, pi], via atan2.

    atan2 rather than arctan of the sine/cosine ratio: the ratio is
    undefined when the cosine sum vanishes (common around pi/2), while
    atan2 is the unique continuous completion on the half-circle. With
    non-negative weights and angles in [0, pi] the sine sum is >= 0, so
    the result lands in [0, pi] without remapping.
    """
    num = float(np.dot(weights, np.sin(angles)))
    den = float(np.dot(weights, np.cos(angles)))
    return math.atan2(num, den)


def weighted_circular_update(pairs: Iterable[tuple[float, float]]) -> float:
    """Belief update: weighted circular mean over (weight, angle) pairs.

    Raises ValueError on empty input or all-zero weights -- an agent with
    no effective influences must skip its update rather than call this.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("weighted_circular_update needs at least one (weight, angle) pair")
    weights = np.array([w for w, _ in pairs], dtype=float)
    angles = np.array([a for _, a in pairs], dtype=float)
    if np.any(weights < 0):
        raise ValueError("weights must be non-negative")
    if not np.any(weights > 0):
        raise ValueError("at least one weight must be positive")
    return circular_mean(weights, angles)


def truncation_acceptance(mu: float, sigma: float) -> float:
    """Probability mass of Normal(mu, sigma^2) inside [0, pi]."""
    lo = 0.5 * (1.0 + math.erf((0.0 - mu) / (sigma * math.sqrt(2.0))))
    hi = 0.5 * (1.0 + math.erf((math.pi - mu) / (sigma * math.sqrt(2.0))))
    return hi - lo


def sample_truncated_gaussian(
    mu: float, sigma: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """n i.i.d. samples from Normal(mu, sigma^2) truncated to [0, pi].

    Rejection sampling: exact and simple. Refuses configurations whose
    acceptance probability is below MIN_ACCEPTANCE (a spread so large or a
    mean so off-center that the truncated distribution no longer resembles
    the intent).
    """
    if not 0.0 < mu < math.pi:
        raise ValueError(f"mu must be in (0, pi), got {mu}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if n < 1:
        raise ValueError("n must be >= 1")
    acceptance = truncation_acceptance(mu, sigma)
    if acceptance < MIN_ACCEPTANCE:
        raise ValueError(
            f"rejection acceptance {acceptance:.2e} below {MIN_ACCEPTANCE:.0%}: "
            f"mu={mu:.4f}, sigma={sigma:.4f} is a pathological configuration"
        )
    out = np.empty(n, dtype=float)
    filled = 0
    while filled < n:
        # Oversize the batch by the expected rejection rate.
        batch = max(n - filled, int((n - filled) / acceptance) + 8)
        draws = rng.normal(mu, sigma, size=batch)
        keep = draws[(draws >= 0.0) & (draws <= math.pi)]
        take = min(keep.size, n - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return out
