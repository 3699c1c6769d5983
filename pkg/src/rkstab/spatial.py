"""Semi-discrete right-hand sides for the model problems.

Four schemes: an energy-dissipative flux for Burgers, first-order upwind for
Burgers, minmod MUSCL with a Godunov flux for Burgers, and (local)
Lax-Friedrichs for the 1D Euler equations.  Each scheme carries the step
size dt_FE below which a single forward Euler step is guaranteed (or, for
the dissipative flux, reported) to preserve its stability property.

The public operations work on field objects; the ``*_array`` kernels they
wrap operate on bare numpy arrays and are what the time integrator drives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import (
    Dirichlet,
    EulerField,
    Grid1D,
    NonPhysicalStateError,
    Outflow,
    Periodic,
    ScalarField,
    internal_energy_density,
)

__all__ = [
    "UnsupportedBoundaryError",
    "DissipativeBurgers",
    "UpwindBurgers",
    "MusclBurgers",
    "LaxFriedrichsEuler",
    "minmod",
    "godunov_flux_burgers",
    "lax_friedrichs_flux_euler",
    "rhs_dissipative_burgers",
    "rhs_upwind_burgers",
    "rhs_muscl_burgers",
    "rhs_llf_euler",
    "dt_fe",
]


class UnsupportedBoundaryError(ValueError):
    """The scheme does not implement the grid's boundary treatment."""


# ---------------------------------------------------------------------------
# scheme descriptors

@dataclass(frozen=True)
class DissipativeBurgers:
    """Energy-dissipative Burgers flux with viscosity-like parameter mu."""

    mu: float = 1e-3
    is_euler = False

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be non-negative")

    def rhs_array(self, q: np.ndarray, grid: Grid1D) -> np.ndarray:
        _require_periodic(grid, "dissipative Burgers")
        return _dissipative_rhs(q, grid.dx, self.mu)

    def dt_fe_array(self, q: np.ndarray, grid: Grid1D) -> float:
        return 0.006 * grid.dx


@dataclass(frozen=True)
class UpwindBurgers:
    """First-order upwind Burgers scheme; TVD for data in [0, 1] up to dt = dx."""

    is_euler = False

    def rhs_array(self, q: np.ndarray, grid: Grid1D) -> np.ndarray:
        _require_periodic(grid, "upwind Burgers")
        return _upwind_rhs(q, grid.dx)

    def dt_fe_array(self, q: np.ndarray, grid: Grid1D) -> float:
        return grid.dx


@dataclass(frozen=True)
class MusclBurgers:
    """Second-order minmod MUSCL reconstruction with the Godunov flux."""

    is_euler = False

    def rhs_array(self, q: np.ndarray, grid: Grid1D) -> np.ndarray:
        return _muscl_rhs(q, grid.dx, grid.boundary)

    def dt_fe_array(self, q: np.ndarray, grid: Grid1D) -> float:
        peak = float(np.max(np.abs(q)))
        if peak == 0.0:
            return math.inf
        return grid.dx / (2.0 * peak)


@dataclass(frozen=True)
class LaxFriedrichsEuler:
    """(Local) Lax-Friedrichs discretization of the 1D Euler equations.

    ``local=True`` uses per-interface wavespeeds; ``local=False`` applies the
    global maximum wavespeed at every interface.
    """

    gamma: float = 5.0 / 3.0
    local: bool = True
    is_euler = True

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")

    def rhs_array(self, U: np.ndarray, grid: Grid1D) -> np.ndarray:
        R, _ = _llf_rhs(U, grid.dx, self.gamma, grid.boundary, self.local)
        return R

    def dt_fe_array(self, U: np.ndarray, grid: Grid1D) -> float:
        a_max = _max_wavespeed(U, self.gamma)
        if a_max == 0.0:
            return math.inf
        return grid.dx / a_max


SchemeSpec = DissipativeBurgers | UpwindBurgers | MusclBurgers | LaxFriedrichsEuler


def _require_periodic(grid: Grid1D, what: str) -> None:
    if not isinstance(grid.boundary, Periodic):
        raise UnsupportedBoundaryError(f"{what} requires a periodic grid")


# ---------------------------------------------------------------------------
# Burgers kernels

def _dissipative_rhs(q: np.ndarray, dx: float, mu: float) -> np.ndarray:
    qr = np.roll(q, -1)
    # F[i] is the flux through interface i+1/2
    F = (q * q + q * qr + qr * qr) / 6.0 - mu * (qr - q)
    return -(F - np.roll(F, 1)) / dx


def _upwind_rhs(q: np.ndarray, dx: float) -> np.ndarray:
    f = 0.5 * q * q
    return -(f - np.roll(f, 1)) / dx


def minmod(a: float, b: float) -> float:
    """(sign(a) + sign(b))/2 * min(|a|, |b|), with sign(0) = 0."""
    return 0.5 * (np.sign(a) + np.sign(b)) * min(abs(a), abs(b))


def _minmod_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 0.5 * (np.sign(a) + np.sign(b)) * np.minimum(np.abs(a), np.abs(b))


def godunov_flux_burgers(q_minus: float, q_plus: float) -> float:
    """Exact Riemann flux of f(q) = q^2/2 for left/right interface states.

    For q_minus <= q_plus the flux is the minimum of f over the interval
    (zero when it straddles the sonic point q = 0), otherwise the maximum of
    the endpoint values.
    """
    fm = 0.5 * q_minus * q_minus
    fp = 0.5 * q_plus * q_plus
    if q_minus <= q_plus:
        if q_minus <= 0.0 <= q_plus:
            return 0.0
        return min(fm, fp)
    return max(fm, fp)


def _godunov_arr(qm: np.ndarray, qp: np.ndarray) -> np.ndarray:
    fm = 0.5 * qm * qm
    fp = 0.5 * qp * qp
    return np.where(
        qm <= qp,
        np.where((qm <= 0.0) & (qp >= 0.0), 0.0, np.minimum(fm, fp)),
        np.maximum(fm, fp),
    )


def _extend_scalar(q: np.ndarray, boundary, width: int) -> np.ndarray:
    if isinstance(boundary, Periodic):
        return np.concatenate([q[-width:], q, q[:width]])
    if isinstance(boundary, Dirichlet):
        left = np.full(width, float(boundary.left))
        right = np.full(width, float(boundary.right))
        return np.concatenate([left, q, right])
    raise UnsupportedBoundaryError(
        "MUSCL Burgers supports periodic or dirichlet boundaries only"
    )


def _muscl_rhs(q: np.ndarray, dx: float, boundary) -> np.ndarray:
    n = q.size
    qe = _extend_scalar(q, boundary, 2)  # two ghost cells per side
    dq = np.diff(qe)
    # slope of extended cell k+1 is slo[k], k = 0 .. n+1
    slo = _minmod_arr(dq[1:], dq[:-1])
    qm = qe[1:-2] + 0.5 * slo[:-1]  # q^- at interfaces -1/2 .. n-1/2
    qp = qe[2:-1] - 0.5 * slo[1:]  # q^+ at the same interfaces
    f = _godunov_arr(qm, qp)
    assert f.size == n + 1
    return -(f[1:] - f[:-1]) / dx


# ---------------------------------------------------------------------------
# Euler kernels

def _primitive_parts(U: np.ndarray, gamma: float):
    rho, m, E = U
    u = m / rho
    p = (gamma - 1.0) * (E - 0.5 * m * u)
    return u, p


def _max_wavespeed(U: np.ndarray, gamma: float) -> float:
    rho = U[0]
    u, p = _primitive_parts(U, gamma)
    return float(np.max(np.abs(u) + np.sqrt(gamma * p / rho)))


def lax_friedrichs_flux_euler(left, right, gamma: float):
    """Lax-Friedrichs interface flux and the interface wavespeed.

    h(l, r) = (f(l) + f(r) - a*(r - l)) / 2 with a the larger of the two
    one-sided maximal signal speeds |u| + sqrt(gamma p / rho).
    """
    parts = []
    for side, state in (("left", left), ("right", right)):
        rho, m, E = state
        if not rho > 0.0:
            raise NonPhysicalStateError(f"{side} state has non-positive density")
        u = m / rho
        p = (gamma - 1.0) * internal_energy_density(rho, m, E)
        if p < 0.0:
            raise NonPhysicalStateError(f"{side} state has negative pressure")
        flux = np.array([m, m * u + p, u * (E + p)])
        parts.append((flux, abs(u) + math.sqrt(gamma * p / rho)))
    (f_l, a_l), (f_r, a_r) = parts
    a = max(a_l, a_r)
    l_arr = np.asarray(left, dtype=float)
    r_arr = np.asarray(right, dtype=float)
    return 0.5 * (f_l + f_r - a * (r_arr - l_arr)), a


def _extend_euler(U: np.ndarray, boundary) -> np.ndarray:
    if isinstance(boundary, Outflow):
        return np.pad(U, ((0, 0), (1, 1)), mode="edge")
    if isinstance(boundary, Periodic):
        return np.pad(U, ((0, 0), (1, 1)), mode="wrap")
    raise UnsupportedBoundaryError(
        "Lax-Friedrichs Euler supports outflow or periodic boundaries only"
    )


def _check_admissible(U: np.ndarray) -> None:
    rho, m, E = U
    bad_rho = ~(rho > 0.0)
    if bad_rho.any():
        raise NonPhysicalStateError(
            "non-positive density in Euler state", cell=int(np.argmax(bad_rho))
        )
    rhoe = internal_energy_density(rho, m, E)
    bad_e = ~(rhoe > 0.0)
    if bad_e.any():
        raise NonPhysicalStateError(
            "non-positive internal energy in Euler state", cell=int(np.argmax(bad_e))
        )


def _llf_rhs(U: np.ndarray, dx: float, gamma: float, boundary, local: bool):
    _check_admissible(U)
    Ue = _extend_euler(U, boundary)
    rho, m, E = Ue
    u = m / rho
    p = (gamma - 1.0) * (E - 0.5 * m * u)
    speed = np.abs(u) + np.sqrt(gamma * p / rho)
    flux = np.stack([m, m * u + p, u * (E + p)])
    a_max = float(np.max(speed))
    if local:
        a_ifc = np.maximum(speed[:-1], speed[1:])
    else:
        a_ifc = a_max
    h = 0.5 * (flux[:, :-1] + flux[:, 1:] - a_ifc * (Ue[:, 1:] - Ue[:, :-1]))
    R = -(h[:, 1:] - h[:, :-1]) / dx
    return R, a_max


# ---------------------------------------------------------------------------
# field-level operations

def rhs_dissipative_burgers(f: ScalarField, mu: float) -> ScalarField:
    """RHS of the energy-dissipative Burgers discretization (periodic only)."""
    _require_periodic(f.grid, "dissipative Burgers")
    return ScalarField(f.grid, _dissipative_rhs(f.q, f.grid.dx, mu))


def rhs_upwind_burgers(f: ScalarField) -> ScalarField:
    """RHS of the first-order upwind Burgers discretization (periodic only)."""
    _require_periodic(f.grid, "upwind Burgers")
    return ScalarField(f.grid, _upwind_rhs(f.q, f.grid.dx))


def rhs_muscl_burgers(f: ScalarField) -> ScalarField:
    """RHS of the minmod MUSCL Burgers discretization.

    Dirichlet grids use two ghost cells per side frozen at the boundary
    states; outflow is not supported.
    """
    return ScalarField(f.grid, _muscl_rhs(f.q, f.grid.dx, f.grid.boundary))


def rhs_llf_euler(f: EulerField, local: bool = True):
    """RHS of the Lax-Friedrichs Euler discretization plus max wavespeed.

    The input field must be admissible; a non-positive density or internal
    energy raises :class:`NonPhysicalStateError` naming the first bad cell
    (limit searches treat that as a stability failure of the probed step).
    """
    R, a_max = _llf_rhs(f.stack(), f.grid.dx, f.gamma, f.grid.boundary, local)
    rhs_field = EulerField.from_stack(f.grid, R, f.gamma)
    return rhs_field, a_max


def dt_fe(scheme: SchemeSpec, f) -> float:
    """Forward-Euler stability step bound of ``scheme`` on the current field.

    Constant for the two fixed-rule Burgers schemes, adaptive (evaluated on
    the current data) for MUSCL and Lax-Friedrichs Euler.  Quiescent Euler
    flow (zero maximal wavespeed) yields +inf.
    """
    state = f.stack() if isinstance(f, EulerField) else f.q
    return scheme.dt_fe_array(state, f.grid)
