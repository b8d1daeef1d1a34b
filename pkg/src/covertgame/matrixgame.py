"""Zero-sum matrix game between transmitter(+jammer) and detector.

The row player mixes over surviving (power, jam) actions and receives

    A[r, m] = rate(P_r, J_r) + beta * dep(P_r, J_r, t_m)

against detector threshold t_m; the detector pays that amount.  The value
and a pair of equilibrium mixed strategies come from a single linear
program.  Of the two textbook LP formulations (row player maximizes a
guaranteed payoff U, column player minimizes one) the solver is pointed at
whichever has fewer constraint rows, and the opponent's strategy is read
off the dual multipliers of the covering constraints, so one solve yields
both sides.  Tests re-solve the other orientation and check the duality gap.

Row payoffs differ from pure detection error only by a row-constant rate
offset and the positive factor beta, so the detector's best-response set is
the same whether it minimizes the full payoff or the detection-error term
alone; ``threshold_best_response`` exposes the latter for such checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lpsolve
from .detection import MixedStrategy, dep_grid
from .model import PrunedScenario
from .rate import action_rate

__all__ = [
    "PayoffMatrix",
    "EquilibriumSolution",
    "VerificationReport",
    "GameSolveError",
    "vec_index",
    "build_payoff",
    "solve_game",
    "verify_equilibrium",
    "threshold_best_response",
]

# Default tolerance on equilibrium verification gaps.
VERIFY_TOL = 1e-8


class GameSolveError(RuntimeError):
    """The LP solver failed to return an optimal status for a game LP."""

    def __init__(self, message: str, lp=None, solution=None):
        super().__init__(message)
        self.lp = lp
        self.solution = solution


def vec_index(y: int, power_count: int) -> tuple[int, int]:
    """Unflatten a 1-based joint action index y into 1-based (i, l).

    With I power levels, y = 1..I*L maps to power index i (fastest varying)
    and jam index l: i = I if y mod I == 0 else y mod I, l = ceil(y / I).
    """
    if power_count < 1 or y < 1:
        raise ValueError(f"need y >= 1 and power_count >= 1, got {y}, {power_count}")
    i = y % power_count
    if i == 0:
        i = power_count
    return i, (y + power_count - 1) // power_count


@dataclass(frozen=True)
class PayoffMatrix:
    """Payoff entries plus the action labels and the beta-independent parts.

    ``entries = rate_terms[:, None] + beta * dep_terms``; the two parts are
    kept so beta sweeps can reassemble payoffs without recomputing any
    incomplete-gamma values.
    """

    entries: np.ndarray
    rate_terms: np.ndarray
    dep_terms: np.ndarray
    actions: tuple[tuple[float, float], ...]
    thresholds: tuple[float, ...]
    beta: float

    def __post_init__(self):
        for name in ("entries", "rate_terms", "dep_terms"):
            arr = getattr(self, name)
            arr.flags.writeable = False

    def with_beta(self, beta: float) -> "PayoffMatrix":
        """Reassemble the payoff for a different covertness weight."""
        if not beta > 0.0:
            raise ValueError(f"beta must be positive, got {beta}")
        return PayoffMatrix(
            entries=self.rate_terms[:, None] + beta * self.dep_terms,
            rate_terms=self.rate_terms,
            dep_terms=self.dep_terms,
            actions=self.actions,
            thresholds=self.thresholds,
            beta=beta,
        )


def build_payoff(pruned: PrunedScenario) -> PayoffMatrix:
    """Assemble the payoff matrix for a pruned scenario.

    Every dep cell is evaluated exactly once here; rows follow the pruned
    action order (power fastest within each jam level), columns follow the
    threshold grid.
    """
    s = pruned.scenario
    rates = np.array([action_rate(s, p, j) for p, j in pruned.actions])
    dep = dep_grid(s, pruned.actions)
    return PayoffMatrix(
        entries=rates[:, None] + s.beta * dep,
        rate_terms=rates,
        dep_terms=dep,
        actions=pruned.actions,
        thresholds=s.threshold_grid,
        beta=s.beta,
    )


@dataclass(frozen=True)
class EquilibriumSolution:
    row_strategy: MixedStrategy
    col_strategy: MixedStrategy
    value: float
    row_gap: float
    col_gap: float
    iterations: int = 0


@dataclass(frozen=True)
class VerificationReport:
    row_gap: float
    col_gap: float
    ok: bool


def _clean_probs(raw: np.ndarray, label: str) -> np.ndarray:
    if float(raw.min(initial=0.0)) < -1e-7:
        raise GameSolveError(f"{label} strategy has negative mass {raw.min():.3e}")
    probs = np.clip(raw, 0.0, None)
    total = probs.sum()
    if not math.isfinite(total) or abs(total - 1.0) > 1e-7:
        raise GameSolveError(f"{label} strategy mass {total!r} is not 1")
    return probs / total


def _game_lp(entries: np.ndarray, orientation: str) -> lpsolve.LinearProgram:
    """Build the value LP for one side.

    ``row`` orientation: maximize U subject to (pi^T A)_m >= U for every
    column m.  ``col`` orientation: minimize U subject to (A pi)_r <= U for
    every row r.  Either way the last variable is U and the probability
    simplex closes the constraint list.
    """
    rows, cols = entries.shape
    if orientation == "row":
        k, body = rows, np.hstack([entries.T, -np.ones((cols, 1))])
        kinds = (">=",) * cols + ("=",)
        sense = "max"
    else:
        k, body = cols, np.hstack([entries, -np.ones((rows, 1))])
        kinds = ("<=",) * rows + ("=",)
        sense = "min"
    lhs = np.vstack([body, np.concatenate([np.ones(k), [0.0]])])
    rhs = np.zeros(lhs.shape[0])
    rhs[-1] = 1.0
    objective = np.zeros(k + 1)
    objective[-1] = 1.0
    bounds = tuple([(0.0, 1.0)] * k + [(None, None)])
    return lpsolve.LinearProgram(
        sense=sense, objective=objective, lhs=lhs, rhs=rhs, kinds=kinds, bounds=bounds
    )


def solve_lp_orientation(entries: np.ndarray, orientation: str):
    """Solve one orientation; returns (value, primal probs, dual probs, iters).

    The dual multipliers of the covering constraints, negated, are exactly
    the opponent's equilibrium mixture.
    """
    lp = _game_lp(entries, orientation)
    sol = lpsolve.solve(lp)
    if sol.status != lpsolve.OPTIMAL:
        raise GameSolveError(
            f"game LP ({orientation} orientation) ended with status "
            f"{sol.status}: {sol.message}", lp=lp, solution=sol,
        )
    primal = sol.x[:-1]
    value = float(sol.x[-1])
    dual = -sol.duals[:-1]
    return value, primal, dual, sol.iterations


def solve_game(entries, row_actions=None, col_actions=None) -> EquilibriumSolution:
    """Nash-equilibrium value and mixed strategies of a zero-sum matrix game.

    Args:
        entries: payoff matrix (row player maximizes), a PayoffMatrix or a
            2-d array.
        row_actions / col_actions: optional labels; default to the payoff's
            labels or plain indices.

    Returns:
        EquilibriumSolution with both strategies, the game value, and the
        verification gaps (each must clear VERIFY_TOL, else this raises).
    """
    if isinstance(entries, PayoffMatrix):
        row_actions = entries.actions if row_actions is None else row_actions
        col_actions = entries.thresholds if col_actions is None else col_actions
        entries = entries.entries
    A = np.asarray(entries, dtype=float)
    if A.ndim != 2 or 0 in A.shape:
        raise ValueError(f"payoff matrix must be 2-d and nonempty, got shape {A.shape}")
    rows, cols = A.shape
    if row_actions is None:
        row_actions = tuple(range(rows))
    if col_actions is None:
        col_actions = tuple(range(cols))

    # Point the simplex at the orientation with fewer constraint rows; the
    # other side's strategy comes back through the duals.
    if rows <= cols:
        value, col_raw, row_raw, iters = solve_lp_orientation(A, "col")
    else:
        value, row_raw, col_raw, iters = solve_lp_orientation(A, "row")
    row_strategy = MixedStrategy(tuple(row_actions), tuple(_clean_probs(row_raw, "row")))
    col_strategy = MixedStrategy(tuple(col_actions), tuple(_clean_probs(col_raw, "col")))

    solution = EquilibriumSolution(
        row_strategy=row_strategy,
        col_strategy=col_strategy,
        value=value,
        row_gap=0.0,
        col_gap=0.0,
        iterations=iters,
    )
    report = verify_equilibrium(A, solution, tol=VERIFY_TOL)
    if not report.ok:
        raise GameSolveError(
            f"equilibrium verification failed: row_gap={report.row_gap:.3e} "
            f"col_gap={report.col_gap:.3e}"
        )
    return EquilibriumSolution(
        row_strategy=row_strategy,
        col_strategy=col_strategy,
        value=value,
        row_gap=report.row_gap,
        col_gap=report.col_gap,
        iterations=iters,
    )


def verify_equilibrium(entries, solution: EquilibriumSolution,
                       tol: float = VERIFY_TOL) -> VerificationReport:
    """Measure how far a claimed solution is from a true equilibrium.

    row_gap is the shortfall of the row strategy's guaranteed payoff below
    the claimed value (value - min over pure columns); col_gap is the excess
    of the column strategy's exposure above the value (max over pure rows -
    value).  Both are nonnegative up to roundoff at a true equilibrium whose
    value is exact, and both must stay within ``tol`` for ``ok``.
    """
    if isinstance(entries, PayoffMatrix):
        entries = entries.entries
    A = np.asarray(entries, dtype=float)
    x = solution.row_strategy.prob_array()
    y = solution.col_strategy.prob_array()
    row_guarantee = float((x @ A).min())
    col_exposure = float((A @ y).max())
    row_gap = solution.value - row_guarantee
    col_gap = col_exposure - solution.value
    # The two gaps cannot both go negative by more than roundoff (the row
    # guarantee never exceeds the column exposure), so requiring each to stay
    # below tol catches both bad strategies and a misreported value.
    ok = row_gap <= tol and col_gap <= tol
    return VerificationReport(row_gap=row_gap, col_gap=col_gap, ok=ok)


def threshold_best_response(s, joint: MixedStrategy, tie_tol: float = 1e-12) -> tuple[int, ...]:
    """Detector's pure best responses against a mixed transmission strategy.

    Minimizes the expected detection-error probability alone over the
    threshold grid and returns every index within ``tie_tol`` of the
    minimum.  Because the full game payoff only adds a threshold-independent
    rate term and scales dep by beta > 0, this is also the best-response set
    under the zero-sum payoff.
    """
    cells = dep_grid(s, tuple(joint.actions))
    expected = joint.prob_array() @ cells
    best = float(expected.min())
    return tuple(int(i) for i in np.flatnonzero(expected <= best + tie_tol))
