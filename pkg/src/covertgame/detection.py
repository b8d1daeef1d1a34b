"""Energy-detector error model and mixed strategies.

The detector averages the squared magnitudes of n complex baseband samples
and alarms when the average T exceeds a threshold t.  Under circularly
symmetric Gaussian noise of total power s per sample, T follows a
Gamma(n, s/n) law (a chi-squared with 2n degrees of freedom scaled by s/2n),
so both error probabilities reduce to regularized incomplete gamma values:

    false alarm  P_FA(t) = Q(n, n t / s0),   s0 = sigma_w^2 + J
    missed det.  P_M(t)  = 1 - Q(n, n t / s1),  s1 = P + sigma_w^2 + J

The detection-error probability dep = P_FA + P_M is the quantity the
transmitter drives up and the detector drives down.  Because the H1 sample
power strictly dominates the H0 sample power, dep <= 1 for every threshold,
with equality at t = 0 (always alarm) and t -> infinity (never alarm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .specfun import reg_gamma_q, reg_gamma_q_grid

if TYPE_CHECKING:
    from .model import Scenario

__all__ = [
    "MixedStrategy",
    "pfa_cell",
    "pm_cell",
    "dep_cell",
    "pfa",
    "pm",
    "pfa_grid",
    "pm_grid",
    "dep_grid",
]

# Probabilities at or below this floor are treated as zero when reporting
# strategy supports.
SUPPORT_EPS = 1e-9


@dataclass(frozen=True)
class MixedStrategy:
    """A probability vector over a finite, labelled action set.

    ``actions`` are the labels ((power, jam) pairs for the transmitter side,
    threshold values for the detector side); ``probs`` must be nonnegative
    and sum to one within 1e-9.
    """

    actions: tuple
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.actions) != len(self.probs):
            raise ValueError(
                f"{len(self.actions)} actions but {len(self.probs)} probabilities"
            )
        if not self.probs:
            raise ValueError("strategy must have at least one action")
        if min(self.probs) < 0.0:
            raise ValueError(f"negative probability {min(self.probs)}")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def point_mass(cls, actions, index: int) -> "MixedStrategy":
        probs = [0.0] * len(tuple(actions))
        probs[index] = 1.0
        return cls(tuple(actions), tuple(probs))

    @classmethod
    def uniform(cls, actions) -> "MixedStrategy":
        actions = tuple(actions)
        return cls(actions, tuple([1.0 / len(actions)] * len(actions)))

    def support(self, eps: float = SUPPORT_EPS) -> tuple[int, ...]:
        """Indices carrying probability above ``eps``."""
        return tuple(i for i, p in enumerate(self.probs) if p > eps)

    def prob_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)


def pfa_cell(jam: float, thr: float, n: int, sigma_w_sq: float) -> float:
    """False-alarm probability of threshold ``thr`` against jamming ``jam``."""
    return reg_gamma_q(n, n * thr / (sigma_w_sq + jam))


def pm_cell(power: float, jam: float, thr: float, n: int, sigma_w_sq: float) -> float:
    """Miss probability of threshold ``thr`` against transmission (power, jam)."""
    return 1.0 - reg_gamma_q(n, n * thr / (power + sigma_w_sq + jam))


def dep_cell(power: float, jam: float, thr: float, n: int, sigma_w_sq: float) -> float:
    """Detection-error probability P_FA + P_M of a single pure-action cell."""
    return pfa_cell(jam, thr, n, sigma_w_sq) + pm_cell(power, jam, thr, n, sigma_w_sq)


def _strategy_grids(s: "Scenario", joint: "MixedStrategy", thr: "MixedStrategy"):
    actions = tuple(joint.actions)
    thresholds = np.asarray(thr.actions, dtype=float)
    return actions, thresholds


def pfa_grid(s: "Scenario", actions) -> np.ndarray:
    """P_FA for every (action, threshold) cell; shape (len(actions), M).

    The false-alarm value of a cell depends on the action only through its
    jamming power, so distinct jam levels are evaluated once and broadcast.
    """
    thresholds = np.asarray(s.threshold_grid, dtype=float)
    jams = np.asarray([j for _, j in actions], dtype=float)
    unique_jams, inverse = np.unique(jams, return_inverse=True)
    x = s.blocklength_n * thresholds[None, :] / (s.sigma_w_sq_mw + unique_jams[:, None])
    q = reg_gamma_q_grid(s.blocklength_n, x)
    return q[inverse, :]


def pm_grid(s: "Scenario", actions) -> np.ndarray:
    """P_M for every (action, threshold) cell; shape (len(actions), M).

    Distinct actions often share the exact same H1 sample power
    P + sigma_w^2 + J (the grids are decimal), so cells are evaluated once
    per unique scale and broadcast back.  Grouping is on exact float
    equality, which leaves every cell bit-identical to a direct evaluation.
    """
    thresholds = np.asarray(s.threshold_grid, dtype=float)
    scale = np.asarray([p + s.sigma_w_sq_mw + j for p, j in actions], dtype=float)
    unique_scale, inverse = np.unique(scale, return_inverse=True)
    x = s.blocklength_n * thresholds[None, :] / unique_scale[:, None]
    q = reg_gamma_q_grid(s.blocklength_n, x)
    return 1.0 - q[inverse, :]


def dep_grid(s: "Scenario", actions) -> np.ndarray:
    """P_FA + P_M for every (action, threshold) cell; shape (len(actions), M)."""
    return pfa_grid(s, actions) + pm_grid(s, actions)


def pfa(s: "Scenario", joint: "MixedStrategy", thr: "MixedStrategy") -> float:
    """False-alarm probability under mixed transmission and mixed threshold.

    Under the no-transmission hypothesis only the jamming component of the
    joint strategy matters, so this value is invariant to how probability is
    split across powers within each jam level.
    """
    actions, thresholds = _strategy_grids(s, joint, thr)
    jams = np.asarray([j for _, j in actions], dtype=float)
    x = s.blocklength_n * thresholds[None, :] / (s.sigma_w_sq_mw + jams[:, None])
    cells = reg_gamma_q_grid(s.blocklength_n, x)
    return float(joint.prob_array() @ cells @ thr.prob_array())


def pm(s: "Scenario", joint: "MixedStrategy", thr: "MixedStrategy") -> float:
    """Miss probability under mixed transmission and mixed threshold."""
    actions, thresholds = _strategy_grids(s, joint, thr)
    scale = np.asarray([p + s.sigma_w_sq_mw + j for p, j in actions], dtype=float)
    x = s.blocklength_n * thresholds[None, :] / scale[:, None]
    cells = 1.0 - reg_gamma_q_grid(s.blocklength_n, x)
    return float(joint.prob_array() @ cells @ thr.prob_array())
