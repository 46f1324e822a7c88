"""Trajectory measurements: Lipschitz constants, the Lyapunov functional,
sup-distances, and the time-monotonicity audit for radii beyond the critical
radius.

The Lyapunov value of a planar field u is the discrete analogue of

    I(u) = integral of sqrt(eps^2 + |Du|^2)  -  A * integral of u,

with the gradient taken by the same central differences the grid solver uses
(one-sided at the box edge) and the integrals by trapezoidal weights, so that
constants and linear fields integrate exactly.  Along the eps-regularized
flow this quantity must not increase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, ParameterError, UsageError
from .geometry import BoxGrid, Field, FlowParams, ObstacleSpec, RadialGrid, lipschitz_constant
from .trajectory import Trajectory

__all__ = [
    "lyapunov",
    "time_lipschitz",
    "sup_distance",
    "second_difference_sup",
    "boundary_quotient",
    "monotonicity_report",
    "RadiusMonotonicity",
    "lipschitz_constant",
]


def _trapezoid_weights(shape: tuple[int, ...]) -> np.ndarray:
    w = np.ones(shape)
    for ax, m in enumerate(shape):
        edge = np.ones(m)
        edge[0] = edge[-1] = 0.5
        w *= edge.reshape([-1 if a == ax else 1 for a in range(len(shape))])
    return w


def lyapunov(field: Field, epsilon: float, driving_force: float) -> float:
    """Discrete surface-energy-minus-volume value (see module docstring)."""
    if epsilon <= 0:
        raise ParameterError(f"lyapunov needs epsilon > 0, got {epsilon}")
    if not isinstance(field.grid, BoxGrid):
        raise UsageError("lyapunov is defined for box fields")
    h = field.grid.h
    grads = np.gradient(field.values, h, edge_order=1)
    density = np.sqrt(epsilon * epsilon + sum(g * g for g in grads))
    w = _trapezoid_weights(field.values.shape)
    cell = h ** field.grid.dimension
    return float(np.sum(w * density) * cell - driving_force * np.sum(w * field.values) * cell)


def sup_distance(a: Field, b: Field) -> float:
    if a.grid != b.grid:
        raise GridMismatchError(f"sup_distance across different grids: {a.grid} vs {b.grid}")
    return float(np.max(np.abs(a.values - b.values)))


def time_lipschitz(traj: Trajectory) -> float:
    """Max over snapshot pairs of sup |u(., t) - u(., s)| / |t - s|."""
    if len(traj.fields) < 2:
        raise UsageError("time_lipschitz needs at least two snapshots")
    worst = 0.0
    for i in range(len(traj.fields)):
        for j in range(i + 1, len(traj.fields)):
            gap = traj.times[j] - traj.times[i]
            diff = float(np.max(np.abs(traj.fields[j].values - traj.fields[i].values)))
            worst = max(worst, diff / gap)
    return worst


def second_difference_sup(field: Field) -> float:
    """Discrete sup |D^2 u| via second central differences, axis by axis."""
    v = field.values
    h2 = field.grid.h ** 2
    if isinstance(field.grid, RadialGrid):
        return float(np.max(np.abs(np.diff(v, 2))) / h2) if v.size > 2 else 0.0
    worst = 0.0
    for ax in range(v.ndim):
        if v.shape[ax] > 2:
            worst = max(worst, float(np.max(np.abs(np.diff(v, 2, axis=ax)))))
    return worst / h2


def boundary_quotient(values: np.ndarray, pinned: np.ndarray, h: float) -> float:
    """Largest difference quotient u/h over free nodes that touch a pinned
    node along some axis (the pinned value being 0 by the Dirichlet invariant)."""
    free = ~pinned
    worst = -math.inf
    for ax in range(values.ndim):
        for shift in (1, -1):
            near = free & np.roll(pinned, shift, axis=ax)
            if near.any():
                worst = max(worst, float(values[near].max()))
    if not math.isfinite(worst):
        raise UsageError("no free node is adjacent to a pinned node")
    return worst / h


@dataclass(frozen=True)
class RadiusMonotonicity:
    radius: float
    checked: bool          # False when the critical-radius hypothesis fails
    passed: bool
    worst_increment: float  # most negative snapshot-to-snapshot change while detached
    note: str = ""


def monotonicity_report(
    traj: Trajectory,
    radii: list[float],
    flow: FlowParams,
    obstacles: ObstacleSpec,
    per_step_tol: float = 1e-9,
) -> list[RadiusMonotonicity]:
    """Audit u(r, .) for non-decrease in time at each requested radius.

    Only snapshot pairs whose start value sits strictly between the obstacles
    count (on an obstacle the flow may be held, and the one-sided motion law
    says nothing).  Radii at or below the critical radius are skipped, not
    failed: the monotonicity statement assumes curvature is dominated there.
    """
    if not isinstance(traj.grid, RadialGrid):
        raise UsageError("monotonicity_report expects a radial trajectory")
    grid = traj.grid
    rc = flow.critical_radius
    tol = per_step_tol * traj.steps_per_snapshot
    out = []
    for radius in radii:
        if radius <= rc:
            out.append(
                RadiusMonotonicity(radius, checked=False, passed=True, worst_increment=0.0,
                                   note=f"skipped: radius <= critical radius {rc}")
            )
            continue
        i = round(radius / grid.h)
        if not (0 <= i <= grid.cells and abs(i * grid.h - radius) <= 1e-9 * max(1.0, radius)):
            out.append(
                RadiusMonotonicity(radius, checked=False, passed=True, worst_increment=0.0,
                                   note="skipped: radius is not a grid node")
            )
            continue
        lo = float(obstacles.lower(radius))
        hi = float(obstacles.upper(radius))
        worst = 0.0
        for k in range(len(traj.fields) - 1):
            a = float(traj.fields[k].values[i])
            if not (lo < a < hi):
                continue
            b = float(traj.fields[k + 1].values[i])
            worst = min(worst, b - a)
        out.append(RadiusMonotonicity(radius, checked=True, passed=worst >= -tol, worst_increment=worst))
    return out
