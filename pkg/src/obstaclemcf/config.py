"""Flat `key = value` scenario configs.

Two kinds, discriminated by the required `kind` key:

  kind = evolve   -- a solver run (also consumed by the `converge` command)
  kind = verify   -- a candidate sub/supersolution verification

Everything is one flat namespace: `#` comments and blank lines are skipped,
each other line must read `key = value`.  parse_config collects *every*
violation (unknown keys, unparsable values, missing requirements, failed
cross-constraints) before raising, so a bad file reports all of its problems
in one pass.  render_config is the exact inverse: floats are written with
repr so that parse(render(cfg)) == cfg.

Optional float fields left at None mean "derive the default at run time"
(e.g. the Lipschitz budget from the obstacle slopes) and are omitted by
render_config.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as _dc_fields
from pathlib import Path
from typing import Callable, Union

from . import candidates as cand
from .errors import ConfigError, ParameterError
from .geometry import FlowParams, ObstacleSpec

__all__ = [
    "EvolveConfig",
    "VerifyConfig",
    "ScenarioConfig",
    "parse_config",
    "render_config",
    "build_flow",
    "build_obstacles",
    "build_candidate",
    "NAMED_INITIALS",
]

_SOLVERS = ("radial", "nd")
_MODES = ("obstacle", "dirichlet-zero")
_VERIFY_MODES = ("auto", "sub", "super", "both")

#: Named analytic initial profiles (prefix forms take a `:<number>` suffix).
NAMED_INITIALS = ("zero", "upper-obstacle", "capped-cone", "steepening-wedge", "two-bumps")


@dataclass(frozen=True)
class EvolveConfig:
    """One solver run: geometry, scheme, initial data, and enabled checks."""

    solver: str
    driving_force: float
    dimension: int = 2
    mode: str = "obstacle"
    support_radius: float = 2.0
    cone_slope: float = 1.0
    lower_scale: float = 1.0
    lipschitz: float | None = None
    initial: str = "upper-obstacle"
    radial_extent: float = 2.5
    radial_cells: int = 1000
    half_width: float = 2.5
    nodes_per_axis: int = 129
    epsilon: float = 0.0
    gradient_floor: float | None = None
    cfl_safety: float = 0.5
    snapshot_interval: float = 0.5
    horizon: float = 30.0
    steady_tol: float = 1e-5
    steady_patience: int = 3
    check_limit: bool = False
    limit_tolerance: float = 0.02
    check_stationary_factor: float = 0.0
    check_monotone_radii: tuple[float, ...] = ()
    monotone_step_tol: float = 1e-9
    check_lipschitz_factor: float = 0.0
    check_temporal_bound: bool = False
    lyapunov_descent_tol: float = 0.0
    check_confinement: bool = False
    check_blowup: bool = False
    blowup_time: float = 12.0
    blowup_factor: float = 0.5
    converge_levels: int = 3
    out_dir: str = "runs"


@dataclass(frozen=True)
class VerifyConfig:
    """One candidate verification: the family, its parameters, the sweep."""

    candidate: str
    driving_force: float
    dimension: int = 2
    mode: str = "auto"
    support_radius: float | None = None
    cone_slope: float | None = None
    lower_scale: float = 1.0
    lipschitz: float | None = None
    level: float | None = None
    decay_rate: float | None = None
    margin: float | None = None
    plateau: float | None = None
    plateau_radius: float | None = None
    inner_decay_rate: float | None = None
    skirt_decay_rate: float | None = None
    radial_points: int = 10_000
    time_points: int = 24
    sample_horizon: float = 20.0
    kink_samples: int = 256
    out_dir: str = "runs"


ScenarioConfig = Union[EvolveConfig, VerifyConfig]

_CANDIDATE_PARAMS: dict[str, tuple[str, ...]] = {
    "stationary-capped-cone": ("level",),
    "lower-rising-cone": ("decay_rate",),
    "upper-flattening-tip": ("decay_rate", "margin"),
    "upper-settling-plateau": ("decay_rate", "margin", "plateau"),
    "lower-climbing-plateau": (
        "inner_decay_rate",
        "skirt_decay_rate",
        "plateau_radius",
        "plateau",
    ),
    "limit-plateau-wedge": ("plateau", "plateau_radius"),
    "boundary-steepening-example": (),
}
_ALL_CANDIDATE_PARAMS = (
    "level",
    "decay_rate",
    "margin",
    "plateau",
    "plateau_radius",
    "inner_decay_rate",
    "skirt_decay_rate",
)

_CANDIDATE_BUILDERS: dict[str, Callable[..., cand.CandidateFamily]] = {
    "stationary-capped-cone": cand.stationary_capped_cone,
    "lower-rising-cone": cand.lower_rising_cone,
    "upper-flattening-tip": cand.upper_flattening_tip,
    "upper-settling-plateau": cand.upper_settling_plateau,
    "lower-climbing-plateau": cand.lower_climbing_plateau,
    "limit-plateau-wedge": cand.limit_plateau_wedge,
}


# ---------------------------------------------------------------------------
# value conversion


def _to_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _to_float_tuple(raw: str) -> tuple[float, ...]:
    raw = raw.strip()
    if not raw:
        return ()
    return tuple(float(tok) for tok in raw.split(","))


def _converter(field_type: str) -> Callable[[str], object]:
    return {
        "str": str,
        "int": int,
        "float": float,
        "float | None": float,
        "bool": _to_bool,
        "tuple[float, ...]": _to_float_tuple,
    }[field_type]


def _field_table(cls) -> dict[str, Callable[[str], object]]:
    return {f.name: _converter(f.type) for f in _dc_fields(cls)}


_EVOLVE_FIELDS = _field_table(EvolveConfig)
_VERIFY_FIELDS = _field_table(VerifyConfig)
_REQUIRED = {"evolve": ("solver", "driving_force"), "verify": ("candidate", "driving_force")}


# ---------------------------------------------------------------------------
# parsing


def _tokenize(text: str, violations: list[str]) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            violations.append(f"line {lineno}: expected `key = value`, got {stripped!r}")
            continue
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in pairs:
            violations.append(f"{key}: duplicate key (line {lineno})")
            continue
        pairs[key] = value.strip()
    return pairs


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate one scenario; raises ConfigError listing
    every violation found (never just the first)."""
    violations: list[str] = []
    pairs = _tokenize(text, violations)

    kind = pairs.pop("kind", None)
    if kind not in ("evolve", "verify"):
        violations.append(f"kind: must be `evolve` or `verify`, got {kind!r}")
        raise ConfigError(violations)

    table = _EVOLVE_FIELDS if kind == "evolve" else _VERIFY_FIELDS
    kwargs: dict[str, object] = {}
    for key, raw in pairs.items():
        if key not in table:
            violations.append(f"{key}: unknown key for kind={kind}")
            continue
        try:
            kwargs[key] = table[key](raw)
        except ValueError as exc:
            violations.append(f"{key}: {exc}")

    for key in _REQUIRED[kind]:
        if key not in kwargs:
            violations.append(f"{key}: required for kind={kind}")
            kwargs[key] = {"str": "", "float": 1.0}[_EVOLVE_FIELDS_TYPE.get(key, "str")]

    cls = EvolveConfig if kind == "evolve" else VerifyConfig
    cfg = cls(**kwargs)
    violations.extend(_validate_evolve(cfg) if kind == "evolve" else _validate_verify(cfg))
    if violations:
        raise ConfigError(violations)
    return cfg


_EVOLVE_FIELDS_TYPE = {f.name: f.type for f in _dc_fields(EvolveConfig)}
_EVOLVE_FIELDS_TYPE.update({f.name: f.type for f in _dc_fields(VerifyConfig)})


def render_config(cfg: ScenarioConfig) -> str:
    """Inverse of parse_config; omits None-valued (derive-at-run-time) keys."""
    kind = "evolve" if isinstance(cfg, EvolveConfig) else "verify"
    lines = [f"kind = {kind}"]
    for f in _dc_fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, tuple):
            text = ",".join(repr(v) for v in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# cross-constraint validation


def _validate_initial(cfg: EvolveConfig) -> list[str]:
    out: list[str] = []
    name, _, arg = cfg.initial.partition(":")
    if name not in NAMED_INITIALS and name != "file":
        known = ", ".join(NAMED_INITIALS + ("file",))
        out.append(f"initial: unknown form {cfg.initial!r} (known: {known})")
        return out
    if name == "capped-cone":
        try:
            level = float(arg)
            if level < 0:
                out.append("initial: capped-cone level must be >= 0")
        except ValueError:
            out.append("initial: capped-cone needs a numeric level, e.g. capped-cone:1.5")
    elif name == "file":
        if not arg:
            out.append("initial: file form needs a path, e.g. file:snap.dat")
        elif not Path(arg).exists():
            out.append(f"initial: snapshot file {arg!r} does not exist")
    elif arg:
        out.append(f"initial: {name} takes no argument, got {cfg.initial!r}")
    if name == "two-bumps" and cfg.solver == "radial":
        out.append("initial: two-bumps is non-radial; the nd solver is required")
    return out


def _validate_evolve(cfg: EvolveConfig) -> list[str]:
    out: list[str] = []
    if cfg.solver not in _SOLVERS:
        out.append(f"solver: must be one of {_SOLVERS}, got {cfg.solver!r}")
        return out

    if not cfg.driving_force > 0:
        out.append("driving_force: must be positive")
    if cfg.dimension < 2:
        out.append("dimension: must be >= 2")
    if cfg.solver == "nd" and cfg.dimension > 3:
        out.append("dimension: the nd solver supports 2 or 3 (memory)")
    if cfg.mode not in _MODES:
        out.append(f"mode: must be one of {_MODES}, got {cfg.mode!r}")
    if cfg.solver == "radial" and cfg.mode == "dirichlet-zero":
        out.append("mode: dirichlet-zero needs the nd solver")
    if cfg.epsilon < 0:
        out.append("epsilon: must be >= 0")
    if cfg.solver == "radial" and cfg.epsilon > 0:
        out.append("epsilon: regularization applies to the nd solver only")
    if cfg.gradient_floor is not None and not cfg.gradient_floor > 0:
        out.append("gradient_floor: must be > 0 when given")

    if not cfg.support_radius > 0:
        out.append("support_radius: must be positive")
    if cfg.mode == "obstacle":
        try:
            build_obstacles(cfg)
        except ParameterError as exc:
            out.append(f"obstacles: {exc}")
    elif cfg.support_radius >= cfg.half_width:
        out.append("half_width: must exceed support_radius so the zero ring reaches the box edge")

    out.extend(_validate_initial(cfg))

    if cfg.radial_cells < 1:
        out.append("radial_cells: must be >= 1")
    if not cfg.radial_extent > 0:
        out.append("radial_extent: must be positive")
    if cfg.nodes_per_axis < 3:
        out.append("nodes_per_axis: must be >= 3")
    if not cfg.half_width > 0:
        out.append("half_width: must be positive")

    if not 0 < cfg.cfl_safety <= 1:
        out.append("cfl_safety: must be in (0, 1]")
    if not cfg.snapshot_interval > 0:
        out.append("snapshot_interval: must be positive")
    elif cfg.horizon < cfg.snapshot_interval:
        out.append("horizon: must cover at least one snapshot_interval")
    if cfg.steady_tol < 0:
        out.append("steady_tol: must be >= 0")
    if cfg.steady_patience < 1:
        out.append("steady_patience: must be >= 1")

    if cfg.check_limit and not cfg.limit_tolerance > 0:
        out.append("limit_tolerance: must be positive when check_limit is on")
    if cfg.check_limit and cfg.initial.partition(":")[0] == "two-bumps":
        out.append("check_limit: needs a radially symmetric initial profile")
    if cfg.check_limit and cfg.mode != "obstacle":
        out.append("check_limit: the limit profile is an obstacle-problem statement")
    if cfg.check_stationary_factor < 0:
        out.append("check_stationary_factor: must be >= 0 (0 disables)")
    if cfg.check_monotone_radii:
        if cfg.solver != "radial":
            out.append("check_monotone_radii: the monotonicity audit is radial-only")
        if any(r <= 0 for r in cfg.check_monotone_radii):
            out.append("check_monotone_radii: radii must be positive")
    if not cfg.monotone_step_tol > 0:
        out.append("monotone_step_tol: must be positive")
    if cfg.check_lipschitz_factor < 0:
        out.append("check_lipschitz_factor: must be >= 0 (0 disables)")
    if cfg.check_temporal_bound and cfg.solver != "radial":
        out.append("check_temporal_bound: defined for radial runs")
    if cfg.lyapunov_descent_tol < 0:
        out.append("lyapunov_descent_tol: must be >= 0 (0 disables)")
    if cfg.lyapunov_descent_tol > 0 and (cfg.solver != "nd" or not cfg.epsilon > 0):
        out.append("lyapunov_descent_tol: needs the nd solver with epsilon > 0")
    if cfg.check_blowup:
        if cfg.mode != "dirichlet-zero":
            out.append("check_blowup: needs mode = dirichlet-zero")
        if not 0 < cfg.blowup_time <= cfg.horizon:
            out.append("blowup_time: must lie in (0, horizon]")
        if not 0 < cfg.blowup_factor <= 1:
            out.append("blowup_factor: must be in (0, 1]")
        if (
            cfg.initial != "steepening-wedge"
            or cfg.driving_force != 1.0
            or cfg.dimension != 2
            or cfg.support_radius != 2.0
        ):
            out.append(
                "check_blowup: the growth threshold is calibrated for "
                "initial = steepening-wedge with driving_force = 1.0, "
                "dimension = 2, support_radius = 2.0"
            )
    if cfg.check_confinement and cfg.mode != "obstacle":
        out.append("check_confinement: the band invariant needs mode = obstacle")
    if cfg.converge_levels < 1:
        out.append("converge_levels: must be >= 1")
    return out


def _validate_verify(cfg: VerifyConfig) -> list[str]:
    out: list[str] = []
    if cfg.candidate not in _CANDIDATE_PARAMS:
        known = ", ".join(sorted(_CANDIDATE_PARAMS))
        out.append(f"candidate: unknown family {cfg.candidate!r} (known: {known})")
        return out
    if cfg.mode not in _VERIFY_MODES:
        out.append(f"mode: must be one of {_VERIFY_MODES}, got {cfg.mode!r}")
    if not cfg.driving_force > 0:
        out.append("driving_force: must be positive")
    if cfg.dimension < 2:
        out.append("dimension: must be >= 2")

    needed = _CANDIDATE_PARAMS[cfg.candidate]
    for name in needed:
        if getattr(cfg, name) is None:
            out.append(f"{name}: required for {cfg.candidate}")
    for name in _ALL_CANDIDATE_PARAMS:
        if name not in needed and getattr(cfg, name) is not None:
            out.append(f"{name}: not a parameter of {cfg.candidate}")

    fixed = cfg.candidate == "boundary-steepening-example"
    if fixed:
        if cfg.driving_force != 1.0:
            out.append("driving_force: boundary-steepening-example is fixed at driving_force = 1.0")
        if cfg.dimension != 2:
            out.append("dimension: boundary-steepening-example is fixed at dimension = 2")
        for name in ("support_radius", "cone_slope", "lipschitz"):
            if getattr(cfg, name) is not None:
                out.append(f"{name}: boundary-steepening-example carries no obstacle data")
    else:
        if cfg.support_radius is None:
            out.append(f"support_radius: required for {cfg.candidate}")
        if cfg.cone_slope is None:
            out.append(f"cone_slope: required for {cfg.candidate}")

    if cfg.radial_points < 16:
        out.append("radial_points: must be >= 16")
    if cfg.time_points < 2:
        out.append("time_points: must be >= 2")
    if not cfg.sample_horizon > 0:
        out.append("sample_horizon: must be positive")
    if cfg.kink_samples < 64:
        out.append("kink_samples: must be >= 64 for a trustworthy corner sweep")

    if not out:
        try:
            family = build_candidate(cfg)
        except ParameterError as exc:
            out.append(f"candidate: {exc}")
        else:
            out.extend(cand.validate_params(family))
    return out


# ---------------------------------------------------------------------------
# object builders


def build_flow(cfg: ScenarioConfig) -> FlowParams:
    return FlowParams(driving_force=cfg.driving_force, dimension=cfg.dimension)


def build_obstacles(cfg: ScenarioConfig) -> ObstacleSpec:
    """Obstacle pair from a config, deriving the Lipschitz budget if unset."""
    slope = cfg.cone_slope
    radius = cfg.support_radius
    if slope is None or radius is None:
        raise ParameterError("cone_slope and support_radius are needed to build obstacles")
    budget = cfg.lipschitz
    if budget is None:
        budget = slope * max(1.0, cfg.lower_scale)
    return ObstacleSpec(
        support_radius=radius,
        cone_slope=slope,
        lipschitz=budget,
        lower_scale=cfg.lower_scale,
    )


def build_candidate(cfg: VerifyConfig) -> cand.CandidateFamily:
    """Construct the configured family (parameters unvalidated; run
    candidates.validate_params for the admissibility verdicts)."""
    if cfg.candidate == "boundary-steepening-example":
        return cand.boundary_steepening_example()
    builder = _CANDIDATE_BUILDERS[cfg.candidate]
    params = {name: getattr(cfg, name) for name in _CANDIDATE_PARAMS[cfg.candidate]}
    return builder(build_flow(cfg), build_obstacles(cfg), **params)
