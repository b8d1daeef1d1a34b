"""Monte Carlo validation of the analytic detection-error model.

Per transmission block the detector's statistic is the average of n squared
complex-sample magnitudes.  With every signal component Gaussian, the exact
law is Gamma(shape n, scale s/n) where s is the total per-sample power, so
the production sampler draws the statistic directly; a per-sample path that
actually averages n squared complex Gaussians is kept alongside it as a
distributional fidelity check.

Streams are counter-based: block simulation is chunked, and the generator
for chunk c is Philox keyed by (seed, c).  Results therefore depend only on
(seed, strategies, blocks), never on how chunks get scheduled, and repeat
runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detection import MixedStrategy
from .model import Scenario

__all__ = [
    "EmpiricalDetection",
    "sample_statistic",
    "sample_statistic_per_sample",
    "estimate_detection",
    "CHUNK_BLOCKS",
]

# Blocks per counter-keyed chunk; fixed, so it is part of the output contract.
CHUNK_BLOCKS = 8192


@dataclass(frozen=True)
class EmpiricalDetection:
    """Empirical error rates with binomial standard errors."""

    pfa_hat: float
    pm_hat: float
    pfa_stderr: float
    pm_stderr: float
    blocks: int
    seed: int

    def consistent_with(self, pfa: float, pm: float, n_sigma: float = 3.0) -> bool:
        """True when analytic values sit within n_sigma standard errors."""
        return (abs(pfa - self.pfa_hat) <= n_sigma * max(self.pfa_stderr, 1e-300)
                and abs(pm - self.pm_hat) <= n_sigma * max(self.pm_stderr, 1e-300))


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    key = np.array([seed, chunk_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_statistic(power: float, jam: float, n: int, sigma_w_sq: float,
                     rng: np.random.Generator, size=None):
    """Draw detector statistics directly from their Gamma(n, s/n) law.

    ``power`` 0 gives the no-transmission hypothesis.
    """
    s = power + sigma_w_sq + jam
    return rng.gamma(shape=n, scale=s / n, size=size)


def sample_statistic_per_sample(power: float, jam: float, n: int, sigma_w_sq: float,
                                rng: np.random.Generator, size: int = 1):
    """Draw the same statistic the long way: average n squared |CN(0, s)|.

    Each complex sample has independent real and imaginary parts of variance
    s/2, so the averaged squared magnitude reproduces Gamma(n, s/n).  Kept
    as the oracle for distributional tests of ``sample_statistic``.
    """
    s = power + sigma_w_sq + jam
    parts = rng.normal(0.0, np.sqrt(s / 2.0), size=(size, n, 2))
    return (parts * parts).sum(axis=2).mean(axis=1)


def estimate_detection(s: Scenario, joint: MixedStrategy, thr: MixedStrategy,
                       blocks: int, seed: int) -> EmpiricalDetection:
    """Simulate ``blocks`` blocks under each hypothesis and tally errors.

    Per block: draw a (power, jam) action from the joint strategy (under the
    no-transmission hypothesis only its jamming component is used), draw a
    threshold from the detector strategy, sample the statistic, and compare.
    The detector alarms strictly above threshold, so the always-alarm
    threshold 0 yields an exact false-alarm rate of 1.

    Standard errors are sqrt(p(1-p)/blocks) on each estimate.
    """
    if blocks < 1:
        raise ValueError(f"blocks must be >= 1, got {blocks}")
    if not 0 <= int(seed) < 2 ** 64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    n = s.blocklength_n
    jam_by_action = np.asarray([j for _, j in joint.actions], dtype=float)
    scale_h0 = (s.sigma_w_sq_mw + jam_by_action) / n
    scale_h1 = (np.asarray([p + j for p, j in joint.actions]) + s.sigma_w_sq_mw) / n
    thr_values = np.asarray(thr.actions, dtype=float)
    joint_p = joint.prob_array()
    thr_p = thr.prob_array()

    false_alarms = 0
    misses = 0
    done = 0
    chunk_index = 0
    while done < blocks:
        count = min(CHUNK_BLOCKS, blocks - done)
        rng = _chunk_rng(int(seed), chunk_index)
        a0 = rng.choice(len(joint_p), size=count, p=joint_p)
        t0 = rng.choice(len(thr_p), size=count, p=thr_p)
        stat0 = rng.gamma(shape=n, scale=scale_h0[a0])
        false_alarms += int((stat0 > thr_values[t0]).sum())
        a1 = rng.choice(len(joint_p), size=count, p=joint_p)
        t1 = rng.choice(len(thr_p), size=count, p=thr_p)
        stat1 = rng.gamma(shape=n, scale=scale_h1[a1])
        misses += int((stat1 < thr_values[t1]).sum())
        done += count
        chunk_index += 1

    pfa_hat = false_alarms / blocks
    pm_hat = misses / blocks
    return EmpiricalDetection(
        pfa_hat=pfa_hat,
        pm_hat=pm_hat,
        pfa_stderr=float(np.sqrt(pfa_hat * (1.0 - pfa_hat) / blocks)),
        pm_stderr=float(np.sqrt(pm_hat * (1.0 - pm_hat) / blocks)),
        blocks=blocks,
        seed=int(seed),
    )
