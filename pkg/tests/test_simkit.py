"""Tests for the Monte Carlo detection simulator."""

import math

import numpy as np
import pytest

from covertgame.detection import MixedStrategy, pfa, pfa_cell, pm, pm_cell
from covertgame.model import Scenario
from covertgame.simkit import (
    estimate_detection,
    sample_statistic,
    sample_statistic_per_sample,
)

from oracles import ks_two_sample


def sim_scenario():
    return Scenario(
        blocklength_n=50,
        sigma_b_sq_mw=1.0,
        sigma_w_sq_mw=1.0,
        delta=0.1,
        alpha=1.0,
        beta=1.5,
        power_grid=(0.2, 0.8),
        jam_grid=(0.0, 0.5),
        threshold_grid=(0.0, 1.2, 1.5),
    )


def test_statistic_moments():
    rng = np.random.default_rng(21)
    draws = sample_statistic(0.3, 0.2, 40, 1.0, rng, size=200000)
    s = 0.3 + 1.0 + 0.2
    assert draws.mean() == pytest.approx(s, rel=0.01)
    assert draws.var() == pytest.approx(s * s / 40.0, rel=0.05)
    assert np.all(draws > 0.0)


def test_gamma_shortcut_matches_per_sample_construction():
    """KS two-sample test at the 1% level between the Gamma(n, s/n) draw and
    the long-form average of n squared complex-Gaussian magnitudes."""
    rng = np.random.default_rng(17)
    fast = sample_statistic(0.4, 0.0, 30, 1.0, rng, size=4000)
    slow = sample_statistic_per_sample(0.4, 0.0, 30, 1.0, rng, size=4000)
    stat, threshold = ks_two_sample(fast, slow)
    assert stat < threshold


def test_estimate_matches_analytic_within_three_sigma():
    s = sim_scenario()
    joint = MixedStrategy(((0.2, 0.0), (0.8, 0.5)), (0.35, 0.65))
    thr = MixedStrategy(s.threshold_grid, (0.0, 0.7, 0.3))
    result = estimate_detection(s, joint, thr, blocks=40000, seed=3)
    assert result.blocks == 40000
    assert result.consistent_with(pfa(s, joint, thr), pm(s, joint, thr))


def test_pure_strategy_against_cell_values():
    s = sim_scenario()
    # Threshold 1.5 sits right at the no-transmission mean 0.5 + 1.0, so
    # both error kinds occur often enough for meaningful standard errors.
    joint = MixedStrategy.point_mass(((0.2, 0.0), (0.8, 0.5)), 1)
    thr = MixedStrategy.point_mass(s.threshold_grid, 2)
    result = estimate_detection(s, joint, thr, blocks=30000, seed=12)
    want_fa = pfa_cell(0.5, 1.5, s.blocklength_n, s.sigma_w_sq_mw)
    want_md = pm_cell(0.8, 0.5, 1.5, s.blocklength_n, s.sigma_w_sq_mw)
    assert result.pfa_stderr > 0.0 and result.pm_stderr > 0.0
    assert abs(result.pfa_hat - want_fa) <= 3.0 * result.pfa_stderr
    assert abs(result.pm_hat - want_md) <= 3.0 * result.pm_stderr


def test_threshold_zero_always_alarms():
    s = sim_scenario()
    joint = MixedStrategy.point_mass(((0.2, 0.0), (0.8, 0.5)), 0)
    thr = MixedStrategy.point_mass(s.threshold_grid, 0)
    result = estimate_detection(s, joint, thr, blocks=5000, seed=1)
    assert result.pfa_hat == 1.0
    assert result.pm_hat == 0.0
    assert result.pfa_stderr == 0.0


def test_reruns_are_bit_identical():
    s = sim_scenario()
    joint = MixedStrategy(((0.2, 0.0), (0.8, 0.5)), (0.5, 0.5))
    thr = MixedStrategy(s.threshold_grid, (0.1, 0.6, 0.3))
    # 20000 blocks spans multiple RNG chunks, so chunk keying is exercised.
    a = estimate_detection(s, joint, thr, blocks=20000, seed=99)
    b = estimate_detection(s, joint, thr, blocks=20000, seed=99)
    assert (a.pfa_hat, a.pm_hat) == (b.pfa_hat, b.pm_hat)
    assert (a.pfa_stderr, a.pm_stderr) == (b.pfa_stderr, b.pm_stderr)
    c = estimate_detection(s, joint, thr, blocks=20000, seed=100)
    assert (a.pfa_hat, a.pm_hat) != (c.pfa_hat, c.pm_hat)


def test_stderr_formula():
    s = sim_scenario()
    joint = MixedStrategy(((0.2, 0.0), (0.8, 0.5)), (0.5, 0.5))
    thr = MixedStrategy(s.threshold_grid, (0.0, 0.5, 0.5))
    result = estimate_detection(s, joint, thr, blocks=7000, seed=5)
    want = math.sqrt(result.pfa_hat * (1.0 - result.pfa_hat) / 7000.0)
    assert result.pfa_stderr == pytest.approx(want, abs=1e-15)
    want = math.sqrt(result.pm_hat * (1.0 - result.pm_hat) / 7000.0)
    assert result.pm_stderr == pytest.approx(want, abs=1e-15)


def test_consistent_with_logic():
    s = sim_scenario()
    joint = MixedStrategy.point_mass(((0.2, 0.0), (0.8, 0.5)), 1)
    thr = MixedStrategy.point_mass(s.threshold_grid, 2)
    result = estimate_detection(s, joint, thr, blocks=10000, seed=8)
    assert result.consistent_with(result.pfa_hat, result.pm_hat)
    off = result.pfa_hat + 10.0 * result.pfa_stderr
    assert not result.consistent_with(off, result.pm_hat)
    # A tighter sigma budget can reject what three sigma accepts.
    edge = result.pfa_hat + 2.0 * result.pfa_stderr
    assert result.consistent_with(edge, result.pm_hat, n_sigma=3.0)
    assert not result.consistent_with(edge, result.pm_hat, n_sigma=1.0)


def test_validation():
    s = sim_scenario()
    joint = MixedStrategy.point_mass(((0.2, 0.0), (0.8, 0.5)), 0)
    thr = MixedStrategy.point_mass(s.threshold_grid, 1)
    with pytest.raises(ValueError, match="blocks"):
        estimate_detection(s, joint, thr, blocks=0, seed=1)
    with pytest.raises(ValueError, match="seed"):
        estimate_detection(s, joint, thr, blocks=10, seed=-1)
    with pytest.raises(ValueError, match="seed"):
        estimate_detection(s, joint, thr, blocks=10, seed=2 ** 64)
