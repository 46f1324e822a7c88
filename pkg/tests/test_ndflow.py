import numpy as np
import pytest

from obstaclemcf.errors import GridMismatchError, ParameterError, UsageError
from obstaclemcf.geometry import (
    BoxGrid,
    Field,
    FlowParams,
    ObstacleSpec,
    psi_c,
    psi_plus,
)
from obstaclemcf.ndflow import (
    BoundaryMode,
    NdState,
    cfl_dt_nd,
    evolve_nd,
    levelset_operator,
    step_nd,
)
from obstaclemcf.radial import SchemeParams

FLOW = FlowParams(driving_force=2.0, dimension=2)
OBS = ObstacleSpec(support_radius=2.0, cone_slope=1.0, lipschitz=1.0)


# --- the spatial operator, node by node ------------------------------------


def test_operator_on_linear_ramp_is_pure_advection():
    # u = x: zero curvature, |Du| = 1, so the operator is exactly A
    g = BoxGrid(half_width=2.0, nodes_per_axis=17)
    f = Field(g, np.broadcast_to(g.axis[:, None], g.shape).copy())
    for node in [(8, 8), (3, 12), (12, 3)]:
        assert levelset_operator(f, node, FLOW) == 2.0


def test_operator_on_paraboloid():
    # u = (x^2+y^2)/2 at (1, 0): central differences are exact on quadratics,
    # gradient (1,0), Hessian I: curvature term 2 - 1 = 1, advection A
    g = BoxGrid(half_width=2.0, nodes_per_axis=17)
    f = Field(g, 0.5 * g.radii**2)
    i = int(np.argmin(np.abs(g.axis - 1.0)))
    j = int(np.argmin(np.abs(g.axis)))
    assert g.axis[i] == 1.0 and g.axis[j] == 0.0
    assert levelset_operator(f, (i, j), FLOW) == pytest.approx(1.0 + 2.0, abs=1e-13)


def test_operator_on_flat_field_regularized():
    # u == 0 with epsilon = 0.1: only the forcing survives, A*epsilon
    g = BoxGrid(half_width=1.0, nodes_per_axis=9)
    f = Field(g, np.zeros(g.shape))
    assert levelset_operator(f, (4, 4), FLOW, epsilon=0.1) == pytest.approx(0.2, abs=1e-16)
    # with epsilon = 0 the gradient floor takes over as the regularizer
    tiny = levelset_operator(f, (4, 4), FLOW, epsilon=0.0, gradient_floor=1e-8)
    assert tiny == pytest.approx(2.0 * 1e-8, abs=1e-20)


def test_operator_node_validation():
    g = BoxGrid(half_width=1.0, nodes_per_axis=9)
    f = Field(g, np.zeros(g.shape))
    for node in [(0, 4), (4, 8), (8, 8)]:
        with pytest.raises(UsageError):
            levelset_operator(f, node, FLOW)
    with pytest.raises(UsageError):
        levelset_operator(f, (4,), FLOW)
    with pytest.raises(ParameterError):
        levelset_operator(f, (4, 4), FLOW, epsilon=-0.1)
    with pytest.raises(ParameterError):
        levelset_operator(f, (4, 4), FLOW, gradient_floor=0.0)


# --- state construction ------------------------------------------------------


def cone_state(m=33, half_width=2.5, eps=0.0, flow=FLOW):
    g = BoxGrid(half_width=half_width, nodes_per_axis=m)
    u0 = psi_plus(g.radii, 1.0, 2.0)
    return NdState.create(g, u0, flow, OBS, mode=BoundaryMode.OBSTACLE, epsilon=eps)


def test_create_validations():
    g = BoxGrid(half_width=2.5, nodes_per_axis=17)
    zeros = np.zeros(g.shape)
    with pytest.raises(UsageError):
        NdState.create(g, zeros, FLOW, None, mode=BoundaryMode.OBSTACLE)
    with pytest.raises(UsageError):
        NdState.create(g, zeros, FLOW, OBS, mode=BoundaryMode.DIRICHLET_ZERO,
                       support_radius=2.0)
    with pytest.raises(ParameterError):
        NdState.create(g, zeros, FLOW, None, mode=BoundaryMode.DIRICHLET_ZERO)
    with pytest.raises(GridMismatchError):
        NdState.create(g, np.zeros((5, 5)), FLOW, OBS)
    with pytest.raises(ParameterError):
        NdState.create(g, zeros + np.inf, FLOW, OBS)
    with pytest.raises(ParameterError):
        NdState.create(g, psi_plus(g.radii, 1.0, 2.0) + 1.0, FLOW, OBS)
    # box too small to contain the zero ring
    small = BoxGrid(half_width=1.5, nodes_per_axis=17)
    with pytest.raises(ParameterError):
        NdState.create(small, np.zeros(small.shape), FLOW, None,
                       mode=BoundaryMode.DIRICHLET_ZERO, support_radius=2.0)


def test_dirichlet_ring_is_pinned():
    g = BoxGrid(half_width=2.5, nodes_per_axis=41)
    u0 = np.where(g.radii < 2.0, 0.5 * psi_plus(g.radii, 1.0, 2.0), 0.0)
    st = NdState.create(g, u0, FLOW, None, mode=BoundaryMode.DIRICHLET_ZERO,
                        support_radius=2.0)
    dt = cfl_dt_nd(g, FLOW, 0.5)
    s = st
    for _ in range(5):
        s = step_nd(s, dt)
    assert np.all(s.values[st.pinned] == 0.0)
    assert np.any(s.values != st.values)  # something moved inside


def test_step_dt_validation():
    st = cone_state(m=17)
    with pytest.raises(ParameterError):
        step_nd(st, 0.0)
    with pytest.raises(ParameterError):
        step_nd(st, 2.0 * cfl_dt_nd(st.grid, st.flow))


def test_constant_field_drift_bounded_by_regularization():
    # a constant sheet inside the obstacle band only feels A*e per unit time,
    # where e is the active regularization width
    g = BoxGrid(half_width=1.0, nodes_per_axis=17)
    u0 = np.full(g.shape, 0.3)
    dt = cfl_dt_nd(g, FLOW, 0.5)

    eps = 0.1
    st = NdState.create(g, u0, FLOW, OBS, mode=BoundaryMode.OBSTACLE, epsilon=eps)
    stepped = step_nd(st, dt)
    drift = stepped.values[1:-1, 1:-1] - 0.3
    assert np.max(np.abs(drift - FLOW.driving_force * eps * dt)) <= 1e-15
    assert np.ptp(drift) == 0.0  # strictly uniform

    bare = NdState.create(g, u0, FLOW, OBS, mode=BoundaryMode.OBSTACLE, epsilon=0.0)
    stepped0 = step_nd(bare, dt)
    floor_drift = np.max(np.abs(stepped0.values[1:-1, 1:-1] - 0.3))
    assert floor_drift <= 2.0 * FLOW.driving_force * bare.gradient_floor * dt


def test_obstacle_band_is_enforced():
    st = cone_state(m=33)
    lo, hi = st.bounds
    s = st
    dt = cfl_dt_nd(st.grid, st.flow, 0.5)
    for _ in range(20):
        s = step_nd(s, dt)
        assert np.all(s.values <= hi + 1e-15) and np.all(s.values >= lo - 1e-15)


def test_quarter_turn_equivariance_is_bitwise():
    """Rotating the data 90 degrees and evolving must equal evolving and then
    rotating, to the last bit; the mirror-symmetric axis makes this possible."""
    g = BoxGrid(half_width=2.5, nodes_per_axis=33)
    rng = np.random.default_rng(7)
    lo, hi = OBS.sample(g)
    u0 = lo + rng.uniform(0.0, 1.0, g.shape) * (hi - lo)

    def advance(values):
        st = NdState.create(g, values, FLOW, OBS, mode=BoundaryMode.OBSTACLE)
        s = st
        dt = cfl_dt_nd(g, FLOW, 0.5)
        for _ in range(4):
            s = step_nd(s, dt)
        return s.values

    np.testing.assert_array_equal(advance(np.rot90(u0).copy()), np.rot90(advance(u0)))


def test_compiled_kernel_matches_reference_step_bitwise():
    g = BoxGrid(half_width=2.5, nodes_per_axis=33)
    rng = np.random.default_rng(13)
    lo, hi = OBS.sample(g)
    u0 = lo + rng.uniform(0.0, 1.0, g.shape) * (hi - lo)
    st = NdState.create(g, u0, FLOW, OBS, mode=BoundaryMode.OBSTACLE)

    interval = 0.01
    dt_max = cfl_dt_nd(g, FLOW, 0.5)
    steps = int(np.ceil(interval / dt_max - 1e-12))
    dt = interval / steps

    s = st
    for _ in range(steps):
        s = step_nd(s, dt)  # numpy reference path

    traj = evolve_nd(st, SchemeParams(snapshot_interval=interval, horizon=interval,
                                      cfl_safety=0.5, steady_tol=0.0))
    np.testing.assert_array_equal(traj.final.values, s.values)


def test_ordered_smooth_pairs_stay_ordered():
    # the central scheme is not monotone, but on smooth ordered data the
    # ordering survives at desk scale
    g = BoxGrid(half_width=2.5, nodes_per_axis=33)
    low0 = psi_c(g.radii, 0.8, 1.0, 2.0) - 0.3 * psi_c(g.radii, 0.4, 1.0, 2.0)
    high0 = psi_c(g.radii, 1.0, 1.0, 2.0)
    assert np.all(low0 <= high0)
    scheme = SchemeParams(snapshot_interval=0.25, horizon=1.0, cfl_safety=0.5,
                          steady_tol=0.0)
    low = evolve_nd(NdState.create(g, low0, FLOW, OBS), scheme)
    high = evolve_nd(NdState.create(g, high0, FLOW, OBS), scheme)
    for fl, fh in zip(low.fields, high.fields):
        assert np.max(fl.values - fh.values) <= 1e-10


def test_three_dimensional_smoke():
    flow3 = FlowParams(driving_force=2.0, dimension=3)
    g = BoxGrid(half_width=2.5, nodes_per_axis=13, dimension=3)
    st = NdState.create(g, psi_plus(g.radii, 1.0, 2.0), flow3, OBS,
                        mode=BoundaryMode.OBSTACLE)
    traj = evolve_nd(st, SchemeParams(snapshot_interval=0.1, horizon=0.2,
                                      cfl_safety=0.5, steady_tol=0.0))
    lo, hi = st.bounds
    assert np.all(traj.final.values <= hi + 1e-15)
    assert np.all(traj.final.values >= lo - 1e-15)
    assert np.all(np.isfinite(traj.final.values))


def test_dirichlet_diagnostics_include_boundary_quotient():
    g = BoxGrid(half_width=2.5, nodes_per_axis=33)
    u0 = np.where(g.radii < 2.0, psi_c(g.radii, 0.5, 1.0, 2.0), 0.0)
    st = NdState.create(g, u0, FLOW, None, mode=BoundaryMode.DIRICHLET_ZERO,
                        support_radius=2.0)
    traj = evolve_nd(st, SchemeParams(snapshot_interval=0.1, horizon=0.3,
                                      cfl_safety=0.5, steady_tol=0.0))
    q = traj.diagnostics.column("boundary_quotient")
    assert q.shape == (4,) and np.all(q >= 0.0)


def test_selected_plateau_reached_on_fine_grid():
    """Full-size obstacle run onto the capped cone.  This is the package's
    slowest test (a few minutes): 256 nodes per axis marched to steady state,
    then compared against the exact truncated cone."""
    g = BoxGrid(half_width=2.5, nodes_per_axis=256)
    st = NdState.create(g, psi_plus(g.radii, 1.0, 2.0), FLOW, OBS,
                        mode=BoundaryMode.OBSTACLE, epsilon=0.0)
    traj = evolve_nd(st, SchemeParams(snapshot_interval=1.0, horizon=12.0,
                                      steady_tol=1e-5))
    target = psi_c(g.radii, 1.5, 1.0, 2.0)
    assert float(np.max(np.abs(traj.final.values - target))) <= 0.03
