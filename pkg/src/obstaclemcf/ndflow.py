"""Full N-dimensional solver on a centered box.

The operator is the level-set curvature flow with a constant driving force,

    u_t = trace((I - p (x) p / |p|^2) X) + A |p|,   p = Du, X = D^2 u,

discretized with central differences for both p and X.  Degenerate gradients
never hit a special case: for |p| at or below `gradient_floor` the operator
switches to the graph form with regularization width equal to the floor,
which is also the form used for any positive `epsilon`:

    u_t = trace(X) - p.X.p / (e^2 + |p|^2) + A sqrt(e^2 + |p|^2).

Two boundary modes: OBSTACLE clamps into the (optionally smoothed) obstacle
band every step and freezes the box edge; DIRICHLET_ZERO pins every node with
|x| >= support_radius to zero, for the boundary-steepening experiment.

The 2D path runs in the compiled kernel; other dimensions use a vectorized
numpy sweep with the same expression grouping, so a single compiled step and
a single numpy step agree bitwise on shared inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from . import _kernels
from .diagnostics import boundary_quotient, lyapunov
from .errors import GridMismatchError, NumericalFailure, ParameterError, UsageError
from .geometry import (
    BoxGrid,
    Field,
    FlowParams,
    ObstacleSpec,
    SmoothedObstacles,
    lipschitz_constant,
)
from .radial import SchemeParams
from .trajectory import ND_COLUMNS, DiagnosticSeries, Trajectory

__all__ = [
    "BoundaryMode",
    "NdState",
    "cfl_dt_nd",
    "levelset_operator",
    "step_nd",
    "evolve_nd",
]

_BAND_TOL = 1e-12


class BoundaryMode(enum.Enum):
    OBSTACLE = "obstacle"
    DIRICHLET_ZERO = "dirichlet-zero"


def cfl_dt_nd(grid: BoxGrid, flow: FlowParams, safety: float = 1.0) -> float:
    """Largest stable step: parabolic h^2 bound and advective h bound."""
    if not (0 < safety <= 1):
        raise ParameterError(f"safety must be in (0, 1], got {safety}")
    h = grid.h
    nd = grid.dimension
    a = flow.driving_force
    parabolic = h * h / (2.0 * nd * (1.0 + a))
    advective = h / (a * math.sqrt(nd)) if a > 0 else math.inf
    return safety * min(parabolic, advective)


@dataclass(frozen=True, eq=False)
class NdState:
    """Box field plus everything the stepper needs to enforce its mode."""

    grid: BoxGrid
    values: np.ndarray
    flow: FlowParams
    mode: BoundaryMode
    obstacles: ObstacleSpec | None
    epsilon: float
    gradient_floor: float
    support_radius: float
    time: float = 0.0

    @classmethod
    def create(
        cls,
        grid: BoxGrid,
        values: np.ndarray | Field,
        flow: FlowParams,
        obstacles: ObstacleSpec | None = None,
        *,
        mode: BoundaryMode = BoundaryMode.OBSTACLE,
        epsilon: float = 0.0,
        gradient_floor: float | None = None,
        support_radius: float | None = None,
        time: float = 0.0,
    ) -> "NdState":
        if isinstance(values, Field):
            if values.grid != grid:
                raise GridMismatchError("initial field lives on a different grid")
            values = values.values
        v = np.array(values, dtype=np.float64)
        if v.shape != grid.shape:
            raise GridMismatchError(f"values shape {v.shape} does not match grid shape {grid.shape}")
        if grid.dimension != flow.dimension:
            raise ParameterError(
                f"grid dimension {grid.dimension} != flow dimension {flow.dimension}"
            )
        if epsilon < 0:
            raise ParameterError(f"epsilon must be >= 0, got {epsilon}")
        if not np.all(np.isfinite(v)):
            raise ParameterError("initial values must be finite")

        if gradient_floor is None:
            scale = obstacles.cone_slope if obstacles is not None else 1.0
            gradient_floor = 1e-8 * scale
        if not (gradient_floor > 0):
            raise ParameterError(f"gradient_floor must be > 0, got {gradient_floor}")

        if mode is BoundaryMode.OBSTACLE:
            if obstacles is None:
                raise UsageError("OBSTACLE mode needs an obstacle pair")
            if support_radius is None:
                support_radius = obstacles.support_radius
            bounds = obstacles.smoothed(epsilon) if epsilon > 0 else obstacles
            lo, hi = bounds.sample(grid)
            gap = max(float(np.max(lo - v)), float(np.max(v - hi)))
            if gap > _BAND_TOL:
                raise ParameterError(
                    f"initial values leave the obstacle band by {gap:.3e} (tolerance {_BAND_TOL:.0e})"
                )
            v = np.minimum(np.maximum(v, lo), hi)
        else:
            if obstacles is not None:
                raise UsageError("DIRICHLET_ZERO mode does not enforce obstacles; pass none")
            if support_radius is None:
                raise ParameterError("DIRICHLET_ZERO mode needs support_radius for the zero ring")
            if not (0 < support_radius):
                raise ParameterError(f"support_radius must be > 0, got {support_radius}")
            pinned = grid.radii >= support_radius
            edge = np.ones(grid.shape, dtype=bool)
            edge[(slice(1, -1),) * grid.dimension] = False
            if not np.all(pinned[edge]):
                raise ParameterError(
                    "box boundary must lie in the zero ring: increase half_width beyond support_radius"
                )
            worst = float(np.max(np.abs(v[pinned]))) if pinned.any() else 0.0
            if worst > _BAND_TOL:
                raise ParameterError(
                    f"initial values reach {worst:.3e} on the zero ring (tolerance {_BAND_TOL:.0e})"
                )
            v = np.where(pinned, 0.0, v)

        v.flags.writeable = False
        return cls(
            grid=grid,
            values=v,
            flow=flow,
            mode=mode,
            obstacles=obstacles,
            epsilon=float(epsilon),
            gradient_floor=float(gradient_floor),
            support_radius=float(support_radius),
            time=float(time),
        )

    def field(self) -> Field:
        return Field(self.grid, self.values)

    @cached_property
    def bounds(self) -> tuple[np.ndarray, np.ndarray] | None:
        """(lower, upper) node samples in OBSTACLE mode, None otherwise."""
        if self.mode is not BoundaryMode.OBSTACLE:
            return None
        pair = self.obstacles.smoothed(self.epsilon) if self.epsilon > 0 else self.obstacles
        lo, hi = pair.sample(self.grid)
        lo.flags.writeable = False
        hi.flags.writeable = False
        return lo, hi

    @cached_property
    def pinned(self) -> np.ndarray | None:
        """Zero-ring mask in DIRICHLET_ZERO mode, None otherwise."""
        if self.mode is not BoundaryMode.DIRICHLET_ZERO:
            return None
        mask = self.grid.radii >= self.support_radius
        mask.flags.writeable = False
        return mask

    @cached_property
    def row_spans(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-row update spans [j0, j1) for the planar kernel (2D only)."""
        if self.grid.dimension != 2:
            raise UsageError("row spans exist only on planar grids")
        m = self.grid.nodes_per_axis
        j0 = np.zeros(m, dtype=np.int64)
        j1 = np.zeros(m, dtype=np.int64)
        if self.mode is BoundaryMode.OBSTACLE:
            j0[1 : m - 1] = 1
            j1[1 : m - 1] = m - 1
        else:
            free = ~self.pinned
            for i in range(m):
                js = np.flatnonzero(free[i])
                if js.size:
                    j0[i] = js[0]
                    j1[i] = js[-1] + 1
        j0.flags.writeable = False
        j1.flags.writeable = False
        return j0, j1


def _gradient_scale(epsilon: float, gradient_floor: float, squared_gradient):
    """Squared regularization width e^2 for the operator's Q = e^2 + |p|^2."""
    if epsilon > 0:
        return epsilon * epsilon
    f2 = gradient_floor * gradient_floor
    return np.where(squared_gradient > f2, 0.0, f2)


def levelset_operator(
    field: Field,
    node: tuple[int, ...],
    flow: FlowParams,
    epsilon: float = 0.0,
    gradient_floor: float = 1e-8,
) -> float:
    """Spatial operator value at one interior node of a box field."""
    grid = field.grid
    if not isinstance(grid, BoxGrid):
        raise UsageError("levelset_operator expects a box field")
    nd = grid.dimension
    node = tuple(int(k) for k in node)
    if len(node) != nd:
        raise UsageError(f"node index must have {nd} components, got {len(node)}")
    m = grid.nodes_per_axis
    if any(k <= 0 or k >= m - 1 for k in node):
        raise UsageError("boundary nodes have no full stencil; the mode logic owns them")
    if epsilon < 0:
        raise ParameterError(f"epsilon must be >= 0, got {epsilon}")
    if not (gradient_floor > 0):
        raise ParameterError(f"gradient_floor must be > 0, got {gradient_floor}")

    u = field.values

    def at(*offset: int) -> float:
        return u[tuple(k + o for k, o in zip(node, offset))]

    h = grid.h
    center = u[node]
    p = np.zeros(nd)
    hess = np.zeros((nd, nd))
    for a in range(nd):
        ea = [0] * nd
        ea[a] = 1
        up = at(*ea)
        ea[a] = -1
        dn = at(*ea)
        p[a] = (up - dn) / (2.0 * h)
        hess[a, a] = ((up + dn) - 2.0 * center) / (h * h)
        for b in range(a):
            off = [0] * nd
            off[a], off[b] = 1, 1
            pp = at(*off)
            off[b] = -1
            pm = at(*off)
            off[a], off[b] = -1, 1
            mp = at(*off)
            off[b] = -1
            mm = at(*off)
            # diagonal pairs first: under a quarter turn the two pairs swap,
            # so this grouping maps to its exact negation (see planar kernel)
            hess[a, b] = hess[b, a] = ((pp + mm) - (pm + mp)) / (4.0 * h * h)

    q2 = float(p @ p)
    qq = float(_gradient_scale(epsilon, gradient_floor, q2)) + q2
    return float(np.trace(hess) - (p @ hess @ p) / qq + flow.driving_force * math.sqrt(qq))


def _interior_operator(values: np.ndarray, h: float, driving_force: float,
                       epsilon: float, gradient_floor: float) -> np.ndarray:
    """Vectorized operator on the full interior block (any dimension >= 2).

    Accumulation order mirrors the compiled planar kernel so a numpy step and
    a kernel step round identically.
    """
    nd = values.ndim
    inv2h = 1.0 / (2.0 * h)
    invh2 = 1.0 / (h * h)
    inv4h2 = 1.0 / (4.0 * h * h)

    def block(shifts: dict[int, int]) -> np.ndarray:
        idx = tuple(
            slice(1 + shifts.get(a, 0), values.shape[a] - 1 + shifts.get(a, 0))
            for a in range(nd)
        )
        return values[idx]

    center = block({})
    grads = []
    seconds = []
    for a in range(nd):
        up = block({a: 1})
        dn = block({a: -1})
        grads.append((up - dn) * inv2h)
        seconds.append(((up + dn) - 2.0 * center) * invh2)

    trace = seconds[0]
    quad = (grads[0] * grads[0]) * seconds[0]
    q2 = grads[0] * grads[0]
    for a in range(1, nd):
        trace = trace + seconds[a]
        quad = quad + (grads[a] * grads[a]) * seconds[a]
        q2 = q2 + grads[a] * grads[a]
    for a in range(nd):
        for b in range(a + 1, nd):
            cross = ((block({a: 1, b: 1}) + block({a: -1, b: -1}))
                     - (block({a: 1, b: -1}) + block({a: -1, b: 1}))) * inv4h2
            quad = quad + 2.0 * (grads[a] * grads[b]) * cross

    qq = _gradient_scale(epsilon, gradient_floor, q2) + q2
    return trace - quad / qq + driving_force * np.sqrt(qq)


def _enforce_mode(state: NdState, values: np.ndarray) -> np.ndarray:
    if state.mode is BoundaryMode.OBSTACLE:
        lo, hi = state.bounds
        return np.minimum(np.maximum(values, lo), hi)
    return np.where(state.pinned, 0.0, values)


def step_nd(state: NdState, dt: float) -> NdState:
    """One explicit Euler step plus mode enforcement (reference numpy path)."""
    limit = cfl_dt_nd(state.grid, state.flow)
    if not (0 < dt <= limit * (1.0 + 1e-12)):
        raise ParameterError(f"dt={dt} outside the stable range (0, {limit:.6e}]")
    u = state.values
    core = (slice(1, -1),) * state.grid.dimension
    new = u.copy()
    new[core] = u[core] + dt * _interior_operator(
        u, state.grid.h, state.flow.driving_force, state.epsilon, state.gradient_floor
    )
    new = _enforce_mode(state, new)
    new.flags.writeable = False
    return replace(state, values=new, time=state.time + dt)


def _advance_chunk(state: NdState, u: np.ndarray, un: np.ndarray, dt: float,
                   nsteps: int) -> np.ndarray:
    """Advance `nsteps` Euler steps in place over the (u, un) buffer pair."""
    if state.grid.dimension == 2:
        j0, j1 = state.row_spans
        if state.mode is BoundaryMode.OBSTACLE:
            lo, hi = state.bounds
            clamp = True
        else:
            lo = hi = np.zeros((1, 1))
            clamp = False
        un[:] = u
        h = state.grid.h
        return _kernels.planar_advance(
            u, un, lo, hi, j0, j1,
            1.0 / (2.0 * h), 1.0 / (h * h), 1.0 / (4.0 * h * h),
            state.flow.driving_force, state.epsilon, state.gradient_floor,
            dt, nsteps, clamp,
        )
    core = (slice(1, -1),) * state.grid.dimension
    for _ in range(nsteps):
        un[:] = u
        un[core] = u[core] + dt * _interior_operator(
            u, state.grid.h, state.flow.driving_force, state.epsilon, state.gradient_floor
        )
        un[:] = _enforce_mode(state, un)
        u, un = un, u
    return u


def evolve_nd(state: NdState, scheme: SchemeParams, prediction: Field | None = None) -> Trajectory:
    """March to the horizon, snapshotting every scheme.snapshot_interval.

    Diagnostics per snapshot: Lipschitz constant always; the Lyapunov value
    when epsilon > 0; the boundary difference quotient in DIRICHLET_ZERO
    mode.  `prediction` is accepted for interface parity with the radial
    solver and reported through Trajectory consumers, not as a column here.
    """
    if prediction is not None and prediction.grid != state.grid:
        raise GridMismatchError("prediction lives on a different grid")
    dt_max = cfl_dt_nd(state.grid, state.flow, scheme.cfl_safety)
    interval = scheme.snapshot_interval
    steps = max(1, math.ceil(interval / dt_max - 1e-12))
    dt = interval / steps
    n_snapshots = int(math.floor(scheme.horizon / interval + 1e-9))
    if n_snapshots < 1:
        raise ParameterError("horizon shorter than one snapshot interval")

    u = state.values.copy()
    un = u.copy()
    diag = DiagnosticSeries(ND_COLUMNS)

    def measure(t: float, fld: Field):
        entries = {"t": t, "lipschitz": lipschitz_constant(fld)}
        if state.epsilon > 0:
            entries["lyapunov"] = lyapunov(fld, state.epsilon, state.flow.driving_force)
        if state.mode is BoundaryMode.DIRICHLET_ZERO:
            entries["boundary_quotient"] = boundary_quotient(
                fld.values, state.pinned, state.grid.h
            )
        diag.append(**entries)

    fields = [Field(state.grid, u)]
    times = [state.time]
    measure(state.time, fields[0])

    stopped = False
    streak = 0
    for k in range(1, n_snapshots + 1):
        ret = _advance_chunk(state, u, un, dt, steps)
        u, un = ret, (un if ret is u else u)
        t = state.time + k * interval
        if not np.all(np.isfinite(u)):
            raise NumericalFailure(t)
        snap = Field(state.grid, u)
        measure(t, snap)
        sup_change = float(np.max(np.abs(snap.values - fields[-1].values)))
        fields.append(snap)
        times.append(t)

        if scheme.steady_tol > 0:
            streak = streak + 1 if sup_change / interval < scheme.steady_tol else 0
            if streak >= scheme.steady_patience:
                stopped = True
                break

    return Trajectory(fields, times, dt, steps, diag, stopped_early=stopped)
