"""Domains, grids, fields and obstacle profiles.

Everything downstream works on the ball Omega = B_R(0) in R^N.  The upper
obstacle is the cone supported on the closed ball,

    psi_plus(x) = slope * (R - |x|)   for |x| <= R,      0 outside,

i.e. slope times the distance to the boundary, extended by zero.  The lower
obstacle is a scaled reflection  psi_minus = -lower_scale * psi_plus  (the
symmetric choice lower_scale = 1 is the default).  Admissible fields live in
the band  psi_minus <= u <= psi_plus,  vanish outside the closed ball and are
Lipschitz with a constant shared by the obstacles.

Radial profiles are stored on uniform node grids {i*h : 0 <= i <= cells} with
r = r_max a node; full-dimensional fields live on uniform tensor grids over a
centered box.  Snapshot files are plain text: a `# t=<time> h=<spacing>`
header followed by one `r value` (radial) or `x y value` (planar) row per
node, written with 16 significant digits so that write -> read round-trips
are exact at float64 resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .errors import GridMismatchError, ParameterError


@dataclass(frozen=True)
class FlowParams:
    """Driving force A > 0 and ambient dimension N >= 2 of the flow
    u_t = |Du| div(Du/|Du|) + A |Du|."""

    driving_force: float
    dimension: int = 2

    def __post_init__(self):
        if not (self.driving_force > 0):
            raise ParameterError(f"driving_force must be > 0, got {self.driving_force}")
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise ParameterError(f"dimension must be an integer >= 2, got {self.dimension}")

    @property
    def critical_radius(self) -> float:
        """Radius (N-1)/A at which curvature and forcing balance on a sphere."""
        return (self.dimension - 1) / self.driving_force


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial node grid on [0, r_max] with `cells` intervals."""

    r_max: float
    cells: int

    def __post_init__(self):
        if not (self.r_max > 0):
            raise ParameterError(f"r_max must be > 0, got {self.r_max}")
        if self.cells < 1:
            raise ParameterError(f"cells must be >= 1, got {self.cells}")

    @property
    def h(self) -> float:
        return self.r_max / self.cells

    @cached_property
    def nodes(self) -> np.ndarray:
        r = np.linspace(0.0, self.r_max, self.cells + 1)
        r.flags.writeable = False
        return r

    def contains_radius(self, radius: float, tol: float = 1e-9) -> bool:
        """True if `radius` coincides with a grid node (up to tol*h)."""
        k = round(radius / self.h)
        return 0 <= k <= self.cells and abs(k * self.h - radius) <= tol * self.h


@dataclass(frozen=True)
class BoxGrid:
    """Uniform tensor grid on the centered box [-half_width, half_width]^N."""

    half_width: float
    nodes_per_axis: int
    dimension: int = 2

    def __post_init__(self):
        if not (self.half_width > 0):
            raise ParameterError(f"half_width must be > 0, got {self.half_width}")
        if self.nodes_per_axis < 3:
            raise ParameterError(f"nodes_per_axis must be >= 3, got {self.nodes_per_axis}")
        if self.dimension < 2:
            raise ParameterError(f"dimension must be >= 2, got {self.dimension}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / (self.nodes_per_axis - 1)

    @cached_property
    def axis(self) -> np.ndarray:
        # Built mirror-symmetrically so that x[m-1-i] == -x[i] holds bitwise;
        # quarter-turn equivariance of the solver relies on this, and plain
        # linspace over [-hw, hw] does not guarantee it.
        m = self.nodes_per_axis
        hw = self.half_width
        k = m // 2
        if m % 2:
            right = np.linspace(0.0, hw, k + 1)
            x = np.concatenate((-right[:0:-1], right))
        else:
            right = (np.arange(k) + 0.5) * (2.0 * hw / (m - 1))
            right[-1] = hw
            x = np.concatenate((-right[::-1], right))
        x.flags.writeable = False
        return x

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.nodes_per_axis,) * self.dimension

    @cached_property
    def radii(self) -> np.ndarray:
        """|x| at every node, shape == self.shape."""
        axes = np.meshgrid(*([self.axis] * self.dimension), indexing="ij")
        rr = np.sqrt(sum(a * a for a in axes))
        rr.flags.writeable = False
        return rr


Grid = Union[RadialGrid, BoxGrid]


@dataclass(frozen=True, eq=False)
class Field:
    """Scalar values attached to the nodes of a grid.  Values are read-only;
    use with_values() to derive a new field."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        expected = (self.grid.cells + 1,) if isinstance(self.grid, RadialGrid) else self.grid.shape
        if v.shape != expected:
            raise GridMismatchError(f"values shape {v.shape} does not match grid shape {expected}")
        if v is self.values and v.flags.writeable:
            v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)


def psi_plus(r, cone_slope: float, support_radius: float):
    """Upper obstacle profile slope*(R - r)^+ as a function of the radius."""
    if not (cone_slope > 0):
        raise ParameterError(f"cone_slope must be > 0, got {cone_slope}")
    if not (support_radius > 0):
        raise ParameterError(f"support_radius must be > 0, got {support_radius}")
    r = np.asarray(r, dtype=np.float64)
    return np.maximum(cone_slope * (support_radius - r), 0.0)


def psi_c(r, level: float, cone_slope: float, support_radius: float):
    """Truncated cone min(psi_plus, level); the stationary-profile family."""
    if level < 0:
        raise ParameterError(f"level must be >= 0, got {level}")
    return np.minimum(psi_plus(r, cone_slope, support_radius), level)


@dataclass(frozen=True)
class ObstacleSpec:
    """Cone obstacle pair: upper = cone_slope*(R-|x|)^+, lower = -lower_scale*upper.

    `lipschitz` is the Lipschitz budget shared by obstacles and initial data;
    it must dominate both obstacle slopes.
    """

    support_radius: float
    cone_slope: float
    lipschitz: float
    lower_scale: float = 1.0

    def __post_init__(self):
        if not (self.support_radius > 0):
            raise ParameterError(f"support_radius must be > 0, got {self.support_radius}")
        if not (self.cone_slope > 0):
            raise ParameterError(f"cone_slope must be > 0, got {self.cone_slope}")
        if not (self.lower_scale > 0):
            raise ParameterError(f"lower_scale must be > 0, got {self.lower_scale}")
        needed = self.cone_slope * max(1.0, self.lower_scale)
        if self.lipschitz < needed:
            raise ParameterError(
                f"lipschitz budget {self.lipschitz} below the obstacle slopes (need >= {needed})"
            )

    def upper(self, r):
        return psi_plus(r, self.cone_slope, self.support_radius)

    def lower(self, r):
        return -self.lower_scale * self.upper(r)

    def sample(self, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
        """(lower, upper) node samples on `grid`."""
        rr = grid.nodes if isinstance(grid, RadialGrid) else grid.radii
        hi = self.upper(rr)
        return -self.lower_scale * hi, hi

    def smoothed(self, epsilon: float) -> "SmoothedObstacles":
        return SmoothedObstacles(self, epsilon)


def _smooth_abs(s, w: float):
    """C^1 regularization of |s|: quadratic cap (s^2+w^2)/(2w) on |s|<w.

    Slope stays in [-1,1] and the value exceeds |s| by at most w/2.
    """
    s = np.asarray(s, dtype=np.float64)
    a = np.abs(s)
    return np.where(a >= w, a, (s * s + w * w) / (2.0 * w))


def _smooth_hinge(s, w: float):
    """C^1 regularization of max(s, 0) = (s + |s|)/2, off by at most w/4."""
    return 0.5 * (np.asarray(s, dtype=np.float64) + _smooth_abs(s, w))


@dataclass(frozen=True)
class SmoothedObstacles:
    """C^1 obstacle pair within O(epsilon) of the cone pair.

    Two-stage smoothing with half-width epsilon/2: first the radius kink at the
    origin, then the hinge at the support edge, so the support stays inside the
    ball of radius R + epsilon/2 and the radial slope never exceeds cone_slope.
    """

    base: ObstacleSpec
    epsilon: float

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")

    def upper(self, r):
        w = 0.5 * self.epsilon
        rr = _smooth_abs(r, w)
        return self.base.cone_slope * _smooth_hinge(self.base.support_radius - rr, w)

    def lower(self, r):
        return -self.base.lower_scale * self.upper(r)

    def sample(self, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
        rr = grid.nodes if isinstance(grid, RadialGrid) else grid.radii
        hi = self.upper(rr)
        return -self.base.lower_scale * hi, hi


def clamp_to_obstacles(field: Field, obstacles: ObstacleSpec | SmoothedObstacles) -> Field:
    """Pointwise median of (lower, value, upper) on the field's grid."""
    lo, hi = obstacles.sample(field.grid)
    return field.with_values(np.minimum(np.maximum(field.values, lo), hi))


def lipschitz_constant(field: Field) -> float:
    """Largest grid difference quotient, axis by axis (radial: along r)."""
    v = field.values
    h = field.grid.h
    if isinstance(field.grid, RadialGrid):
        return float(np.max(np.abs(np.diff(v))) / h) if v.size > 1 else 0.0
    worst = 0.0
    for ax in range(v.ndim):
        worst = max(worst, float(np.max(np.abs(np.diff(v, axis=ax)))))
    return worst / h


def sample_profile(profile: Field, radii: np.ndarray) -> np.ndarray:
    """Linear interpolation of a radial profile at arbitrary radii.

    Radii beyond the grid take the last nodal value (profiles of interest
    vanish there anyway).
    """
    if not isinstance(profile.grid, RadialGrid):
        raise GridMismatchError("sample_profile expects a radial field")
    return np.interp(radii, profile.grid.nodes, profile.values)


def write_field(field: Field, time: float, path: str | Path) -> None:
    """Write one snapshot file (16-significant-digit text, see module docstring)."""
    path = Path(path)
    g = field.grid
    with path.open("w") as fh:
        fh.write(f"# t={time:.16e} h={g.h:.16e}\n")
        if isinstance(g, RadialGrid):
            for r, v in zip(g.nodes, field.values):
                fh.write(f"{r:.16e} {v:.16e}\n")
        elif g.dimension == 2:
            ax = g.axis
            vals = field.values
            for i in range(g.nodes_per_axis):
                xi = ax[i]
                row = vals[i]
                for j in range(g.nodes_per_axis):
                    fh.write(f"{xi:.16e} {ax[j]:.16e} {row[j]:.16e}\n")
        else:
            raise ParameterError("snapshot files support radial and planar grids only")


def read_field(path: str | Path) -> tuple[Field, float]:
    """Inverse of write_field: reconstruct (field, time) from a snapshot file."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
        body = np.loadtxt(fh, ndmin=2)
    if not header.startswith("#"):
        raise ParameterError(f"{path}: missing snapshot header")
    meta = dict(tok.split("=", 1) for tok in header[1:].split() if "=" in tok)
    try:
        time = float(meta["t"])
        h = float(meta["h"])
    except (KeyError, ValueError) as exc:
        raise ParameterError(f"{path}: malformed snapshot header {header!r}") from exc

    if body.shape[1] == 2:
        cells = body.shape[0] - 1
        grid = RadialGrid(r_max=h * cells, cells=cells)
        if not np.allclose(grid.nodes, body[:, 0], atol=1e-12 * max(1.0, grid.r_max), rtol=0.0):
            raise ParameterError(f"{path}: radial coordinates are not the uniform grid")
        return Field(grid, body[:, 1]), time
    if body.shape[1] == 3:
        m = math.isqrt(body.shape[0])
        if m * m != body.shape[0]:
            raise ParameterError(f"{path}: planar snapshot with non-square node count")
        half_width = float(body[:, 0].max())
        grid = BoxGrid(half_width=half_width, nodes_per_axis=m, dimension=2)
        return Field(grid, body[:, 2].reshape(m, m)), time
    raise ParameterError(f"{path}: unsupported column count {body.shape[1]}")


def make_initial(grid: Grid, profile: Callable[[np.ndarray], np.ndarray]) -> Field:
    """Sample a radius -> value profile on a grid of either kind."""
    rr = grid.nodes if isinstance(grid, RadialGrid) else grid.radii
    return Field(grid, np.asarray(profile(rr), dtype=np.float64))
