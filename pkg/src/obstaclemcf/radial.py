"""Monotone upwind solver for the radial reduction

    u_t = (N-1) u_r / r + A |u_r|,    psi_minus <= u <= psi_plus,

on [0, r_max] with r = support radius an interior node.  Transport uses the
forward difference (the characteristic carries data inward), the gradient
term the Godunov flux A*max(D+u, -D-u, 0), and each Euler step ends with a
flush of subnormal-bound magnitudes to zero followed by an obstacle clamp
(vanishing profiles decay geometrically, and letting them coast through the
denormal float range stalls the hardware; see _kernels.SUBNORMAL_FLUSH).  At the origin the transport term is replaced by its smooth
radial limit (N-1)*2*(u_1 - u_0)/h^2 and the gradient flux by A*max(D+u, 0)
(the mirror image of D-u under u_r(0) = 0); the last node uses one-sided
differences.

With the default CFL safety factor (0.5) every update coefficient is
nonnegative, so the step is a composition of float-monotone operations:
pointwise-ordered states stay ordered exactly, not just to truncation order.

The predicted large-time profile: zero when the support radius R is at or
below the critical radius (N-1)/A, otherwise the capped cone at level
B = max of the initial data over the annulus [(N-1)/A, R].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import _kernels
from .errors import NumericalFailure, ParameterError, UsageError
from .geometry import Field, FlowParams, ObstacleSpec, RadialGrid, lipschitz_constant, psi_c
from .trajectory import RADIAL_COLUMNS, DiagnosticSeries, Trajectory

Profile = Union[Callable[[np.ndarray], np.ndarray], Field]


@dataclass(frozen=True)
class SchemeParams:
    """Time-stepping controls shared by both solvers.

    dt is derived, never set directly: dt = cfl_safety * h / (max over nodes
    of (N-1)/max(r, h) + A) for the radial scheme, and the parabolic/advective
    bound for the planar one.  steady_tol is a sup-change-per-unit-time
    threshold (0 disables early stopping).
    """

    cfl_safety: float = 0.5
    snapshot_interval: float = 0.5
    horizon: float = 30.0
    steady_tol: float = 1e-5
    steady_patience: int = 3

    def __post_init__(self):
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ParameterError(f"cfl_safety must be in (0, 1], got {self.cfl_safety}")
        if not (self.snapshot_interval > 0):
            raise ParameterError(f"snapshot_interval must be > 0, got {self.snapshot_interval}")
        if self.horizon < self.snapshot_interval:
            raise ParameterError("horizon shorter than one snapshot interval")
        if self.steady_tol < 0:
            raise ParameterError(f"steady_tol must be >= 0, got {self.steady_tol}")
        if self.steady_patience < 1:
            raise ParameterError(f"steady_patience must be >= 1, got {self.steady_patience}")


def cfl_dt_radial(grid: RadialGrid, flow: FlowParams, cfl_safety: float = 0.5) -> float:
    """Largest admissible Euler step for the radial scheme."""
    r = grid.nodes
    denom = float(np.max((flow.dimension - 1) / np.maximum(r, grid.h) + flow.driving_force))
    return cfl_safety * grid.h / denom


def _sample(grid: RadialGrid, initial: Profile) -> np.ndarray:
    if isinstance(initial, Field):
        if initial.grid != grid:
            raise ParameterError("initial field lives on a different grid")
        return initial.values.copy()
    return np.asarray(initial(grid.nodes), dtype=np.float64).copy()


@dataclass
class RadialState:
    grid: RadialGrid
    values: np.ndarray
    obstacles: ObstacleSpec
    flow: FlowParams
    time: float = 0.0

    @classmethod
    def create(
        cls,
        grid: RadialGrid,
        initial: Profile,
        obstacles: ObstacleSpec,
        flow: FlowParams,
    ) -> "RadialState":
        """Build and admissibility-check a starting state: values between the
        obstacles and zero beyond the support radius."""
        v = _sample(grid, initial)
        lo, hi = obstacles.sample(grid)
        if np.any(v < lo - 1e-12) or np.any(v > hi + 1e-12):
            raise ParameterError("initial data escapes the obstacle band")
        outside = grid.nodes >= obstacles.support_radius - 1e-12
        if np.any(np.abs(v[outside]) > 1e-12):
            raise ParameterError("initial data must vanish at and beyond the support radius")
        if not np.all(np.isfinite(v)):
            raise ParameterError("initial data contains non-finite values")
        return cls(grid, np.clip(v, lo, hi), obstacles, flow)

    def field(self) -> Field:
        return Field(self.grid, self.values.copy())


def radial_rhs(state: RadialState) -> np.ndarray:
    """The discrete operator at every node (vectorized reference version;
    the evolution loop runs the identical arithmetic compiled).

    Godunov flux of the full Hamiltonian phi(r, p) = (N-1)p/r + A|p| over
    the one-sided slope interval: phi is convex in p, so the extreme is an
    endpoint value — max at a valley, min at a peak — with the corner value
    phi(0) = 0 joining the min when the slopes straddle zero.
    """
    u = state.values
    inv_h = 1.0 / state.grid.h
    r = state.grid.nodes
    n1 = float(state.flow.dimension - 1)
    A = state.flow.driving_force
    rhs = np.empty_like(u)

    diffs = (u[1:] - u[:-1]) * inv_h  # D+ at nodes 0..n-2
    d10 = diffs[0]
    rhs[0] = n1 * 2.0 * d10 * inv_h + A * max(d10, 0.0)
    dp = diffs[1:]  # D+ at nodes 1..n-2
    dm = diffs[:-1]  # D- at nodes 1..n-2
    c = n1 * (1.0 / r[1:-1])
    fm = c * dm + A * np.abs(dm)
    fp = c * dp + A * np.abs(dp)
    valley = dm <= dp
    g = np.where(valley, np.maximum(fm, fp), np.minimum(fm, fp))
    g = np.where(~valley & (dp <= 0.0) & (0.0 <= dm) & (g > 0.0), 0.0, g)
    rhs[1:-1] = g
    dlast = diffs[-1]
    rhs[-1] = n1 * (1.0 / r[-1]) * dlast + A * abs(dlast)
    return rhs


def step_radial(state: RadialState, dt: float) -> RadialState:
    """One Euler step + subnormal flush + clamp, returning a new state.

    dt must respect the CFL bound (checked at safety factor 1; the exact
    comparison property additionally wants the default 0.5).  The flush
    mirrors the compiled loop bitwise: see _kernels.SUBNORMAL_FLUSH."""
    if dt <= 0 or dt > cfl_dt_radial(state.grid, state.flow, 1.0) * (1 + 1e-12):
        raise ParameterError(
            f"dt={dt} violates the CFL bound {cfl_dt_radial(state.grid, state.flow, 1.0)}"
        )
    lo, hi = state.obstacles.sample(state.grid)
    v = state.values + dt * radial_rhs(state)
    v[np.abs(v) < _kernels.SUBNORMAL_FLUSH] = 0.0
    v = np.clip(v, lo, hi)
    return RadialState(state.grid, v, state.obstacles, state.flow, state.time + dt)


def evolve_radial(
    state: RadialState,
    scheme: SchemeParams,
    prediction: Field | None = None,
) -> Trajectory:
    """March to the horizon (or steady state), recording snapshots and the
    radial diagnostic columns."""
    grid, flow = state.grid, state.flow
    dt_max = cfl_dt_radial(grid, flow, scheme.cfl_safety)
    steps = max(1, math.ceil(scheme.snapshot_interval / dt_max - 1e-12))
    dt = scheme.snapshot_interval / steps
    n_snapshots = math.floor(scheme.horizon / scheme.snapshot_interval + 1e-9)

    lo, hi = state.obstacles.sample(grid)
    inv_r = np.zeros_like(grid.nodes)
    inv_r[1:] = 1.0 / grid.nodes[1:]
    u = np.clip(state.values.astype(np.float64, copy=True), lo, hi)
    un = u.copy()

    diag = DiagnosticSeries(RADIAL_COLUMNS)

    def measure(t: float, fld: Field, prev: Field | None):
        entries = {"t": t, "lipschitz": lipschitz_constant(fld)}
        if prev is not None:
            entries["sup_change"] = float(np.max(np.abs(fld.values - prev.values)))
        if prediction is not None:
            entries["sup_dist_to_prediction"] = float(np.max(np.abs(fld.values - prediction.values)))
        diag.append(**entries)

    fields = [Field(grid, u)]
    times = [state.time]
    measure(state.time, fields[0], None)

    stopped = False
    streak = 0
    for k in range(1, n_snapshots + 1):
        ret = _kernels.radial_advance(
            u, un, lo, hi, inv_r, float(flow.dimension - 1), flow.driving_force, dt, 1.0 / grid.h, steps
        )
        u, un = ret, (un if ret is u else u)
        t = state.time + k * scheme.snapshot_interval
        if not np.all(np.isfinite(u)):
            raise NumericalFailure(t)
        snap = Field(grid, u)  # Field copies the (writeable) buffer
        measure(t, snap, fields[-1])
        fields.append(snap)
        times.append(t)

        if scheme.steady_tol > 0:
            rate = diag.rows[-1][RADIAL_COLUMNS.index("sup_change")] / scheme.snapshot_interval
            streak = streak + 1 if rate < scheme.steady_tol else 0
            if streak >= scheme.steady_patience:
                stopped = True
                break

    return Trajectory(fields, times, dt, steps, diag, stopped_early=stopped)


def _as_profile(u0: Profile) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(u0, Field):
        if not isinstance(u0.grid, RadialGrid):
            raise UsageError("expected a radial profile")
        nodes, vals = u0.grid.nodes, u0.values
        return lambda r: np.interp(r, nodes, vals)
    return u0


def compute_B(u0: Profile, flow: FlowParams, obstacles: ObstacleSpec, spacing: float) -> float:
    """Max of the initial data over the annulus [critical radius, R], by dense
    sampling at spacing/4 plus exact endpoints."""
    rc = flow.critical_radius
    R = obstacles.support_radius
    if R <= rc:
        raise ParameterError(
            f"the annulus [critical radius {rc}, support radius {R}] is empty; "
            "the vanishing-limit case applies instead"
        )
    profile = _as_profile(u0)
    n = max(2, math.ceil((R - rc) / (spacing / 4.0)))
    pts = np.linspace(rc, R, n + 1)
    return float(np.max(profile(pts)))


def predicted_limit(
    u0: Profile, obstacles: ObstacleSpec, flow: FlowParams, grid: RadialGrid
) -> Field:
    """The large-time profile: zero at/below the critical radius, else the
    capped cone at the annulus maximum of the initial data."""
    if isinstance(u0, Field) and not isinstance(u0.grid, RadialGrid):
        raise UsageError("predicted_limit expects radial initial data")
    rc = flow.critical_radius
    R = obstacles.support_radius
    if R <= rc:
        return Field(grid, np.zeros(grid.cells + 1))
    B = compute_B(u0, flow, obstacles, grid.h)
    return Field(grid, psi_c(grid.nodes, B, obstacles.cone_slope, R))
