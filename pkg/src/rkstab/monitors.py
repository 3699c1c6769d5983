"""Stability criteria and their pass/fail logic on instrumented RK steps.

Three monitors: quadratic energy decay, total-variation non-increase, and
strict positivity of density and internal energy.  Each is applied to three
families of states from a single step: the stage solutions plus the step
result (the "step" criterion), and the shifted Euler states
q^n + dt * R^j (the "shifted" criterion).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .fields import Periodic

__all__ = [
    "Monitor",
    "MonitorVerdict",
    "evaluate_functional",
    "euler_state_floor",
    "bind_scale",
    "check_step_criterion",
    "check_shifted_criterion",
    "positivity_of_trace",
]

MONITOR_KINDS = ("energy", "tv", "positivity")


@dataclass(frozen=True)
class Monitor:
    """A stability criterion with its comparison slack.

    For energy/tv, a candidate passes when G(candidate) - G(reference) does
    not exceed ``tolerance * scale``; ``scale`` is set to max(1, G(q^0)) at
    the start of a run so the roundoff slack tracks problem magnitude.
    Positivity ignores the tolerance entirely: a sign is a sign.
    """

    kind: str
    tolerance: float = 1e-12
    tv_wrap: bool | None = None  # None: follow the grid's boundary type
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in MONITOR_KINDS:
            raise ValueError(f"unknown monitor kind {self.kind!r}")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")

    @property
    def slack(self) -> float:
        return self.tolerance * self.scale


@dataclass(frozen=True)
class MonitorVerdict:
    """Outcome for one monitored state.

    ``delta`` is G(candidate) - G(reference) for energy/tv and the state
    floor min(rho, rho*e) for positivity.  ``where`` is "stage", "shifted"
    or "step"; ``index`` is the 0-based stage index when applicable.
    """

    passed: bool
    delta: float
    where: str
    index: int | None = None


def _tv_arr(q: np.ndarray, wrap: bool) -> float:
    tv = float(np.sum(np.abs(np.diff(q))))
    if wrap:
        tv += abs(float(q[0] - q[-1]))
    return tv


def evaluate_functional(monitor: Monitor, state: np.ndarray, grid) -> float:
    """G(state) for the energy and tv monitors (positivity has no scalar G)."""
    if monitor.kind == "energy":
        return 0.5 * float(state @ state)
    if monitor.kind == "tv":
        wrap = monitor.tv_wrap
        if wrap is None:
            wrap = isinstance(grid.boundary, Periodic)
        return _tv_arr(state, wrap)
    raise ValueError("positivity monitor does not define a scalar functional")


def euler_state_floor(U: np.ndarray) -> float:
    """min over cells of (rho, rho*e); only min(rho) when any rho <= 0.

    Positive return means the state is admissible.  NaN anywhere yields a
    non-passing value.
    """
    rho = U[0]
    min_rho = float(np.min(rho))
    if not min_rho > 0.0:
        return min_rho
    rhoe = U[2] - 0.5 * U[1] * U[1] / rho
    return min(min_rho, float(np.min(rhoe)))


def bind_scale(monitor: Monitor, g0: float) -> Monitor:
    """Attach the run's reference magnitude max(1, |G(q^0)|) to the slack."""
    return replace(monitor, scale=max(1.0, abs(g0)))


def _convex_verdicts(monitor: Monitor, trace, states) -> list[MonitorVerdict]:
    g_n = evaluate_functional(monitor, trace.q_n, trace.grid)
    slack = monitor.slack
    verdicts = []
    for where, index, state in states:
        delta = evaluate_functional(monitor, state, trace.grid) - g_n
        verdicts.append(MonitorVerdict(bool(delta <= slack), delta, where, index))
    return verdicts


def _positivity_verdicts(states) -> list[MonitorVerdict]:
    verdicts = []
    for where, index, state in states:
        floor = euler_state_floor(state)
        verdicts.append(MonitorVerdict(bool(floor > 0.0), floor, where, index))
    return verdicts


def _step_states(trace):
    states = [("stage", i, q) for i, q in enumerate(trace.stage_solutions)]
    states.append(("step", None, trace.q_rk))
    return states


def _shifted_states(trace):
    return [("shifted", j, q) for j, q in enumerate(trace.shifted_states)]


def check_step_criterion(monitor: Monitor, trace) -> list[MonitorVerdict]:
    """Verdicts for every stage solution plus the step solution.

    All of them passing (within slack) is the per-step requirement behind
    the practical coefficient c^p.
    """
    states = _step_states(trace)
    if monitor.kind == "positivity":
        return _positivity_verdicts(states)
    return _convex_verdicts(monitor, trace, states)


def check_shifted_criterion(monitor: Monitor, trace) -> list[MonitorVerdict]:
    """Verdicts for the shifted Euler states q^n + dt*R^j, j = 1..s.

    All of them passing is the per-step requirement behind c^s.
    """
    states = _shifted_states(trace)
    if monitor.kind == "positivity":
        return _positivity_verdicts(states)
    return _convex_verdicts(monitor, trace, states)


def positivity_of_trace(trace) -> list[MonitorVerdict]:
    """Strict positivity of every state in the trace: stages, step, shifted."""
    return _positivity_verdicts(_step_states(trace) + _shifted_states(trace))
