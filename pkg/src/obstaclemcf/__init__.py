"""Obstacle-constrained level-set curvature flow with a constant driving
force: radial and planar solvers, explicit comparison candidates with a
viscosity-sign checker, and a scenario catalog with reproduction suites.
"""

from .candidates import (
    CandidateFamily,
    CandidateTag,
    KinkDescriptor,
    Mode,
    applicable_modes,
    boundary_steepening_example,
    decay_rate_bounds,
    domain_radius,
    limit_plateau_wedge,
    lower_climbing_plateau,
    lower_rising_cone,
    stationary_capped_cone,
    upper_flattening_tip,
    upper_settling_plateau,
    validate_params,
    vanishing_cone_rate_interval,
)
from .catalog import Scenario, catalog, expected_outcome, gate_hypotheses, scenario
from .checker import SamplingSpec, VerificationReport, residual_smooth, verify_candidate
from .config import (
    EvolveConfig,
    ScenarioConfig,
    VerifyConfig,
    build_candidate,
    build_flow,
    build_obstacles,
    parse_config,
    render_config,
)
from .diagnostics import (
    boundary_quotient,
    lyapunov,
    monotonicity_report,
    second_difference_sup,
    sup_distance,
    time_lipschitz,
)
from .errors import (
    ConfigError,
    GridMismatchError,
    NumericalFailure,
    ObstacleFlowError,
    ParameterError,
    UsageError,
)
from .geometry import (
    BoxGrid,
    Field,
    FlowParams,
    ObstacleSpec,
    RadialGrid,
    clamp_to_obstacles,
    lipschitz_constant,
    make_initial,
    psi_c,
    psi_plus,
    read_field,
    write_field,
)
from .ndflow import BoundaryMode, NdState, cfl_dt_nd, evolve_nd, levelset_operator, step_nd
from .radial import (
    RadialState,
    SchemeParams,
    cfl_dt_radial,
    compute_B,
    evolve_radial,
    predicted_limit,
    step_radial,
)
from .runner import RunReport, emit_plot_script, run_config, run_converge, run_repro, run_scenario
from .trajectory import DiagnosticSeries, Trajectory

__version__ = "0.3.0"
