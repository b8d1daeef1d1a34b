"""Tests for detection-error cells, grids, and mixed-strategy error rates."""

import math

import numpy as np
import pytest

from covertgame.detection import (
    MixedStrategy,
    dep_cell,
    dep_grid,
    pfa,
    pfa_cell,
    pfa_grid,
    pm,
    pm_cell,
    pm_grid,
)
from covertgame.model import Scenario, default_scenario, joint_actions

from oracles import gamma_q_reference


def tiny_scenario(jam_grid=(0.0,), alpha=0.0):
    return Scenario(
        blocklength_n=50,
        sigma_b_sq_mw=1.0,
        sigma_w_sq_mw=1.0,
        delta=0.1,
        alpha=alpha,
        beta=1.6,
        power_grid=(0.1, 0.4, 0.9),
        jam_grid=jam_grid,
        threshold_grid=(0.0, 0.8, 1.1, 1.6),
    )


class TestMixedStrategy:
    def test_validation(self):
        with pytest.raises(ValueError, match="probabilities"):
            MixedStrategy(actions=(1, 2), probs=(1.0,))
        with pytest.raises(ValueError, match="negative"):
            MixedStrategy(actions=(1, 2), probs=(1.5, -0.5))
        with pytest.raises(ValueError, match="sum"):
            MixedStrategy(actions=(1, 2), probs=(0.6, 0.6))
        with pytest.raises(ValueError, match="at least one"):
            MixedStrategy(actions=(), probs=())

    def test_constructors(self):
        point = MixedStrategy.point_mass(("a", "b", "c"), 1)
        assert point.probs == (0.0, 1.0, 0.0)
        assert point.support() == (1,)
        unif = MixedStrategy.uniform((1.0, 2.0))
        assert unif.probs == (0.5, 0.5)
        assert unif.support() == (0, 1)

    def test_support_threshold(self):
        mix = MixedStrategy(actions=(1, 2, 3), probs=(1.0 - 1e-10, 1e-10, 0.0))
        assert mix.support() == (0,)
        assert mix.support(eps=0.0) == (0, 1)

    def test_prob_array(self):
        mix = MixedStrategy(actions=(1, 2), probs=(0.3, 0.7))
        assert np.array_equal(mix.prob_array(), np.array([0.3, 0.7]))


def test_pfa_cell_frozen_value():
    # Default scenario, quiet channel, threshold 1.02: Q(200, 204).
    assert pfa_cell(0.0, 1.02, 200, 1.0) == pytest.approx(
        0.3803686104663225, abs=1e-13)


def test_cells_match_reference():
    for power, jam, thr in [(0.1, 0.0, 0.9), (0.5, 0.2, 1.3), (1.0, 1.0, 0.4)]:
        n, sw = 80, 1.0
        want_fa = gamma_q_reference(n, n * thr / (sw + jam))
        want_md = 1.0 - gamma_q_reference(n, n * thr / (power + sw + jam))
        assert abs(pfa_cell(jam, thr, n, sw) - float(want_fa)) <= 1e-12
        assert abs(pm_cell(power, jam, thr, n, sw) - float(want_md)) <= 1e-12
        assert dep_cell(power, jam, thr, n, sw) == pytest.approx(
            float(want_fa + want_md), abs=1e-12)


def test_threshold_zero_always_alarms():
    assert pfa_cell(0.0, 0.0, 200, 1.0) == 1.0
    assert pm_cell(0.5, 0.0, 0.0, 200, 1.0) == 0.0
    assert dep_cell(0.5, 0.0, 0.0, 200, 1.0) == 1.0


def test_dep_never_exceeds_one():
    """The averaged statistic is stochastically larger under transmission,
    so P_FA + P_M <= 1 for every cell (the blind detector attains exactly 1)."""
    s = default_scenario(with_jammer=True)
    rng = np.random.default_rng(11)
    idx = rng.choice(len(joint_actions(s)), size=300, replace=False)
    actions = [joint_actions(s)[i] for i in idx]
    cells = dep_grid(s, actions)
    assert float(cells.max()) <= 1.0 + 1e-12
    assert np.allclose(cells[:, 0], 1.0)


def test_grids_match_scalar_cells():
    s = tiny_scenario(jam_grid=(0.0, 0.3), alpha=1.0)
    actions = joint_actions(s)
    fa = pfa_grid(s, actions)
    md = pm_grid(s, actions)
    both = dep_grid(s, actions)
    assert fa.shape == (6, 4)
    for i, (p, j) in enumerate(actions):
        for m, t in enumerate(s.threshold_grid):
            assert abs(fa[i, m] - pfa_cell(j, t, s.blocklength_n, s.sigma_w_sq_mw)) <= 1e-14
            assert abs(md[i, m] - pm_cell(p, j, t, s.blocklength_n, s.sigma_w_sq_mw)) <= 1e-14
            assert abs(both[i, m] - (fa[i, m] + md[i, m])) <= 1e-15


def test_pfa_grid_shares_rows_across_powers():
    # Cells with equal jamming are bit-identical no matter the transmit power.
    s = tiny_scenario(jam_grid=(0.0, 0.3), alpha=1.0)
    fa = pfa_grid(s, joint_actions(s))
    assert np.array_equal(fa[0], fa[1]) and np.array_equal(fa[1], fa[2])
    assert np.array_equal(fa[3], fa[4]) and np.array_equal(fa[4], fa[5])
    assert not np.array_equal(fa[0], fa[3])


def test_pm_grid_shares_rows_at_equal_total_power():
    # power 0.25 with jam 0.25 and power 0.5 alone put the same total power
    # on the detector (dyadic values, so the float sums agree exactly); their
    # miss rows must come out bit-identical.
    s = Scenario(
        blocklength_n=50, sigma_b_sq_mw=1.0, sigma_w_sq_mw=1.0, delta=0.1,
        alpha=1.0, beta=1.5, power_grid=(0.25, 0.5, 0.75),
        jam_grid=(0.0, 0.25), threshold_grid=(0.0, 0.5, 1.0, 2.0))
    actions = joint_actions(s)
    md = pm_grid(s, actions)
    assert actions[1] == (0.5, 0.0) and actions[3] == (0.25, 0.25)
    assert np.array_equal(md[1], md[3])


def test_monotone_in_threshold():
    s = default_scenario()
    actions = ((0.02, 0.0), (1.0, 0.0))
    fa = pfa_grid(s, actions)
    md = pm_grid(s, actions)
    assert np.all(np.diff(fa, axis=1) <= 1e-12)
    assert np.all(np.diff(md, axis=1) >= -1e-12)


def test_mixed_rates_equal_double_sum():
    s = tiny_scenario(jam_grid=(0.0, 0.3), alpha=1.0)
    actions = joint_actions(s)
    joint = MixedStrategy(actions, (0.1, 0.2, 0.05, 0.15, 0.3, 0.2))
    thr = MixedStrategy(s.threshold_grid, (0.4, 0.1, 0.25, 0.25))
    n, sw = s.blocklength_n, s.sigma_w_sq_mw
    want_fa = math.fsum(
        joint.probs[i] * thr.probs[m] * pfa_cell(j, t, n, sw)
        for i, (_, j) in enumerate(actions)
        for m, t in enumerate(thr.actions))
    want_md = math.fsum(
        joint.probs[i] * thr.probs[m] * pm_cell(p, j, t, n, sw)
        for i, (p, j) in enumerate(actions)
        for m, t in enumerate(thr.actions))
    assert pfa(s, joint, thr) == pytest.approx(want_fa, abs=1e-13)
    assert pm(s, joint, thr) == pytest.approx(want_md, abs=1e-13)


def test_pfa_ignores_power_split():
    """Reshuffling mass across powers inside one jam level cannot move P_FA."""
    s = tiny_scenario(jam_grid=(0.0, 0.3), alpha=1.0)
    actions = joint_actions(s)
    thr = MixedStrategy(s.threshold_grid, (0.0, 0.5, 0.25, 0.25))
    one = MixedStrategy(actions, (0.6, 0.0, 0.0, 0.4, 0.0, 0.0))
    two = MixedStrategy(actions, (0.0, 0.1, 0.5, 0.0, 0.3, 0.1))
    assert pfa(s, one, thr) == pytest.approx(pfa(s, two, thr), abs=1e-15)
    assert pm(s, one, thr) != pytest.approx(pm(s, two, thr), abs=1e-6)
