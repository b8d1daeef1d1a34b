"""Scenario definition, action grids, pruning, and scenario-file I/O.

A Scenario pins down everything the games need: blocklength, noise powers at
the intended receiver and at the detector, the decoding error target, the
jamming coupling coefficient alpha, the covertness weight beta, and the three
action grids (transmit powers, jamming powers, detection thresholds).  All
powers are carried in linear milliwatts internally; decibels appear only in
the presentation helpers.

The no-jammer setting is represented uniformly as ``jam_grid = (0,)``, so a
single code path serves both games.

Scenario files are flat ``key = value`` text.  Values are parsed as decimal
strings (grids as ``start:step:stop`` triples or comma lists) so grids built
from files match grids built in code digit for digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from decimal import Decimal, InvalidOperation

from .rate import action_rate

__all__ = [
    "Scenario",
    "PrunedScenario",
    "ScenarioError",
    "default_scenario",
    "decimal_range",
    "joint_actions",
    "prune_negative_rate",
    "parse_scenario_text",
    "load_scenario",
    "serialize_scenario",
    "apply_overrides",
    "db_to_mw",
    "mw_to_db",
]

# Grid coordinates are snapped to this many decimal places at construction so
# that arithmetic noise cannot make equal grids compare unequal.
_GRID_DECIMALS = 12


class ScenarioError(ValueError):
    """Raised for invalid scenario values or malformed scenario files."""


def db_to_mw(x_db: float) -> float:
    """Convert a dB power (relative to 1 mW) to linear milliwatts."""
    return 10.0 ** (float(x_db) / 10.0)


def mw_to_db(x_mw: float) -> float:
    """Convert linear milliwatts to dB relative to 1 mW."""
    if x_mw <= 0.0:
        raise ScenarioError(f"cannot express nonpositive power {x_mw} mW in dB")
    return 10.0 * math.log10(float(x_mw))


def _as_grid(values, name: str, minimum: float, min_exclusive: bool) -> tuple[float, ...]:
    grid = tuple(round(float(v), _GRID_DECIMALS) for v in values)
    if not grid:
        raise ScenarioError(f"{name} must not be empty")
    for v in grid:
        if min_exclusive and v <= minimum:
            raise ScenarioError(f"{name} entries must be > {minimum}, got {v}")
        if not min_exclusive and v < minimum:
            raise ScenarioError(f"{name} entries must be >= {minimum}, got {v}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ScenarioError(f"{name} must be strictly increasing with no duplicates")
    return grid


@dataclass(frozen=True)
class Scenario:
    """Immutable problem instance for the covert-communication games.

    Attributes:
        blocklength_n: channel uses per transmission block.
        sigma_b_sq_mw: noise power at the intended receiver, mW.
        sigma_w_sq_mw: noise power at the detector, mW.
        delta: decoding error probability target, in (0, 1).
        alpha: jamming coupling at the intended receiver (0 means jamming
            does not reach it).
        beta: weight of the detection-error term in the transmitter payoff.
        power_grid: transmit-power actions, mW, strictly increasing, > 0.
        jam_grid: jamming-power actions, mW, strictly increasing, >= 0;
            the singleton (0,) encodes the game without a jammer.
        threshold_grid: detector threshold actions, mW, strictly increasing,
            >= 0 (the degenerate always-alarm threshold 0 is retained).
    """

    blocklength_n: int
    sigma_b_sq_mw: float
    sigma_w_sq_mw: float
    delta: float
    alpha: float
    beta: float
    power_grid: tuple[float, ...] = field(repr=False)
    jam_grid: tuple[float, ...] = field(repr=False)
    threshold_grid: tuple[float, ...] = field(repr=False)

    def __post_init__(self):
        if not isinstance(self.blocklength_n, int) or self.blocklength_n < 1:
            raise ScenarioError(f"blocklength_n must be a positive integer, got {self.blocklength_n!r}")
        for name in ("sigma_b_sq_mw", "sigma_w_sq_mw"):
            if not getattr(self, name) > 0.0:
                raise ScenarioError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.delta < 1.0:
            raise ScenarioError(f"delta must lie in (0, 1), got {self.delta}")
        if self.alpha < 0.0:
            raise ScenarioError(f"alpha must be nonnegative, got {self.alpha}")
        if not self.beta > 0.0:
            raise ScenarioError(f"beta must be positive, got {self.beta}")
        object.__setattr__(self, "power_grid", _as_grid(self.power_grid, "power_grid", 0.0, True))
        object.__setattr__(self, "jam_grid", _as_grid(self.jam_grid, "jam_grid", 0.0, False))
        object.__setattr__(self, "threshold_grid",
                           _as_grid(self.threshold_grid, "threshold_grid", 0.0, False))

    @property
    def with_jammer(self) -> bool:
        return self.jam_grid != (0.0,)


def decimal_range(start: str, step: str, stop: str) -> tuple[float, ...]:
    """Inclusive arithmetic grid computed in decimal, returned as floats.

    Endpoints and step are decimal strings, so e.g. ("0", "0.01", "3.00")
    yields exactly 301 points with no binary drift deciding inclusion of the
    last one.
    """
    d_start, d_step, d_stop = Decimal(start), Decimal(step), Decimal(stop)
    if d_step <= 0:
        raise ScenarioError(f"grid step must be positive, got {step}")
    values = []
    k = 0
    while True:
        v = d_start + k * d_step
        if v > d_stop:
            break
        values.append(float(v))
        k += 1
    if not values:
        raise ScenarioError(f"empty grid from {start}:{step}:{stop}")
    return tuple(values)


def default_scenario(with_jammer: bool = False) -> Scenario:
    """Reference configuration used throughout the studies.

    Blocklength 200, both noise powers at 0 dB (1 mW), delta = 0.1, transmit
    powers 0.01 to 1.00 mW in 0.01 steps, thresholds 0 to 3.00 mW in 0.01
    steps.  With a jammer: jamming powers 0 to 1.00 mW in 0.01 steps,
    alpha = 1 and beta = 1.5; without: beta = 1.6 and no jamming.
    """
    return Scenario(
        blocklength_n=200,
        sigma_b_sq_mw=1.0,
        sigma_w_sq_mw=1.0,
        delta=0.1,
        alpha=1.0 if with_jammer else 0.0,
        beta=1.5 if with_jammer else 1.6,
        power_grid=decimal_range("0.01", "0.01", "1.00"),
        jam_grid=decimal_range("0", "0.01", "1.00") if with_jammer else (0.0,),
        threshold_grid=decimal_range("0", "0.01", "3.00"),
    )


def joint_actions(s: Scenario) -> tuple[tuple[float, float], ...]:
    """All (power, jam) pairs in column-major order: power varies fastest.

    The flattened index y of pair (i, l) is y = l * I + i with I power levels,
    matching the unflattening rule in ``matrixgame.vec_index``.
    """
    return tuple((p, j) for j in s.jam_grid for p in s.power_grid)


@dataclass(frozen=True)
class PrunedScenario:
    """A scenario together with its surviving joint actions.

    Pairs whose achievable rate is strictly negative are dropped; zero-rate
    actions stay.  In the jammer game the survivors are generally not a
    product grid (high jamming kills low powers first), which is why the
    action list is explicit.
    """

    scenario: Scenario
    actions: tuple[tuple[float, float], ...]

    @property
    def thresholds(self) -> tuple[float, ...]:
        return self.scenario.threshold_grid

    @property
    def powers(self) -> tuple[float, ...]:
        """Distinct surviving power levels, ascending."""
        return tuple(sorted({p for p, _ in self.actions}))


def prune_negative_rate(s: Scenario) -> PrunedScenario:
    """Drop every (power, jam) action whose rate is strictly negative."""
    survivors = tuple(
        (p, j) for (p, j) in joint_actions(s) if action_rate(s, p, j) >= 0.0
    )
    if not survivors:
        raise ScenarioError(
            "pruning removed every action; all configured powers give negative rate"
        )
    return PrunedScenario(scenario=s, actions=survivors)


# ---------------------------------------------------------------------------
# Scenario files: flat key = value text with decimal-string grids.
# ---------------------------------------------------------------------------

_SCALAR_KEYS = ("blocklength_n", "sigma_b_sq_mw", "sigma_w_sq_mw", "delta", "alpha", "beta")
_GRID_KEYS = ("power_grid", "jam_grid", "threshold_grid")
_ALL_KEYS = _SCALAR_KEYS + _GRID_KEYS
_OPTIONAL = {"alpha": 0.0, "jam_grid": (0.0,)}


def _parse_decimal(text: str, key: str) -> float:
    try:
        return float(Decimal(text))
    except InvalidOperation:
        raise ScenarioError(f"{key}: not a decimal number: {text!r}") from None


def _parse_grid(text: str, key: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 3:
            raise ScenarioError(f"{key}: grid triple must be start:step:stop, got {text!r}")
        for p in parts:
            _parse_decimal(p, key)
        return decimal_range(*parts)
    return tuple(_parse_decimal(p.strip(), key) for p in text.split(",") if p.strip())


def parse_scenario_text(text: str) -> Scenario:
    """Parse scenario-file content.  Unknown or repeated keys are rejected."""
    seen: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _ALL_KEYS:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ScenarioError(f"line {lineno}: empty value for {key!r}")
        seen[key] = value
    missing = [k for k in _ALL_KEYS if k not in seen and k not in _OPTIONAL]
    if missing:
        raise ScenarioError(f"missing required keys: {', '.join(missing)}")

    kwargs: dict = {}
    for key in _SCALAR_KEYS:
        if key not in seen:
            kwargs[key] = _OPTIONAL[key]
        elif key == "blocklength_n":
            try:
                kwargs[key] = int(seen[key], 10)
            except ValueError:
                raise ScenarioError(f"blocklength_n must be an integer, got {seen[key]!r}") from None
        else:
            kwargs[key] = _parse_decimal(seen[key], key)
    for key in _GRID_KEYS:
        kwargs[key] = _parse_grid(seen[key], key) if key in seen else _OPTIONAL[key]
    return Scenario(**kwargs)


def load_scenario(path) -> Scenario:
    """Read a scenario file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario_text(fh.read())


def serialize_scenario(s: Scenario) -> str:
    """Render a Scenario back to file syntax (grids as explicit lists)."""
    lines = []
    for f in fields(s):
        value = getattr(s, f.name)
        if isinstance(value, tuple):
            lines.append(f"{f.name} = {', '.join(repr(v) for v in value)}")
        else:
            lines.append(f"{f.name} = {value!r}")
    return "\n".join(lines) + "\n"


def apply_overrides(s: Scenario, overrides: dict[str, str]) -> Scenario:
    """Apply key=value overrides (scenario-file syntax) to a Scenario."""
    kwargs: dict = {}
    for key, value in overrides.items():
        if key not in _ALL_KEYS:
            raise ScenarioError(f"unknown scenario key {key!r}")
        if key == "blocklength_n":
            try:
                kwargs[key] = int(value, 10)
            except ValueError:
                raise ScenarioError(f"blocklength_n must be an integer, got {value!r}") from None
        elif key in _GRID_KEYS:
            kwargs[key] = _parse_grid(value, key)
        else:
            kwargs[key] = _parse_decimal(value, key)
    return replace(s, **kwargs)
