"""Named scenario catalog: the canned runs behind `repro`.

Each entry binds a config file shipped with the package to a one-line claim
and an outcome kind:

  limit        -- the run must land on the predicted large-time profile
  stationary   -- the initial profile must not drift
  growth       -- the boundary difference quotient must grow past a threshold
  verify       -- an analytic candidate must pass sub/supersolution checks
  exploratory  -- nothing asserted beyond invariants (confinement, budget)

Expected profiles are always materialized from predicted_limit or from the
analytic candidates — the catalog holds no hand-typed field values.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from . import candidates as cand
from .config import EvolveConfig, ScenarioConfig, build_flow, build_obstacles, parse_config
from .errors import ParameterError, UsageError
from .geometry import Field, RadialGrid, psi_c
from .radial import predicted_limit

__all__ = [
    "Scenario",
    "Expected",
    "catalog",
    "scenario",
    "expected_outcome",
    "gate_hypotheses",
    "initial_profile",
    "SUITES",
]

#: name -> (kind, claim)
_ENTRIES: dict[str, tuple[str, str]] = {
    "thm13-case1": (
        "limit",
        "Below the critical threshold the profile between reflected cones settles uniformly to zero.",
    ),
    "thm13-case2": (
        "limit",
        "Above the critical threshold the profile settles onto the capped cone at the annulus "
        "maximum of the initial data.",
    ),
    "thm13-equality": (
        "limit",
        "At the critical threshold the vanishing limit still holds, with no rate: long horizon, "
        "looser tolerance.",
    ),
    "stationary-c00": ("stationary", "The capped cone at level 0.0 is a fixed point."),
    "stationary-c05": ("stationary", "The capped cone at level 0.5 is a fixed point."),
    "stationary-c10": ("stationary", "The capped cone at level 1.0 is a fixed point."),
    "stationary-c15": ("stationary", "The capped cone at level 1.5 is a fixed point."),
    "appendix-blowup": (
        "growth",
        "On the zero-Dirichlet disk the boundary difference quotient grows exponentially; no "
        "Lipschitz-preserving solution attains the boundary data classically.",
    ),
    "merging-fronts": (
        "exploratory",
        "Two off-center bumps evolve inside the band; only confinement and the Lipschitz budget "
        "are asserted (the non-radial limit is open).",
    ),
    "candidate-capped-cone": ("verify", "The capped cone verifies as both sub- and supersolution."),
    "candidate-rising-cone": ("verify", "The rising negative cone verifies as a subsolution."),
    "candidate-flattening-tip": ("verify", "The flattening-tip barrier verifies as a supersolution."),
    "candidate-settling-plateau": (
        "verify",
        "The settling-plateau barrier verifies as a supersolution.",
    ),
    "candidate-climbing-plateau": (
        "verify",
        "The climbing-plateau barrier verifies as a subsolution.",
    ),
    "candidate-plateau-wedge": ("verify", "The limiting plateau wedge verifies as a subsolution."),
    "candidate-steepening": (
        "verify",
        "The fixed moving-interface example verifies as a subsolution.",
    ),
}

#: suite name -> scenario names, in execution order
SUITES: dict[str, tuple[str, ...]] = {
    "thm13-case1": ("thm13-case1",),
    "thm13-case2": ("thm13-case2",),
    "thm13-equality": ("thm13-equality",),
    "stationary-family": (
        "stationary-c00",
        "stationary-c05",
        "stationary-c10",
        "stationary-c15",
    ),
    "appendix-blowup": ("appendix-blowup",),
    "candidates-all": (
        "candidate-capped-cone",
        "candidate-rising-cone",
        "candidate-flattening-tip",
        "candidate-settling-plateau",
        "candidate-climbing-plateau",
        "candidate-plateau-wedge",
        "candidate-steepening",
    ),
}


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    claim: str
    config: ScenarioConfig


@dataclass(frozen=True)
class Expected:
    """Materialized expectation: a profile to hit, or a property to check."""

    kind: str
    profile: Field | None
    note: str


def _load(name: str) -> Scenario:
    kind, claim = _ENTRIES[name]
    text = resources.files("obstaclemcf.scenarios").joinpath(f"{name}.cfg").read_text()
    return Scenario(name=name, kind=kind, claim=claim, config=parse_config(text))


def catalog() -> dict[str, Scenario]:
    """All shipped scenarios, keyed by name."""
    return {name: _load(name) for name in _ENTRIES}


def scenario(name: str) -> Scenario:
    if name not in _ENTRIES:
        known = ", ".join(sorted(_ENTRIES))
        raise UsageError(f"unknown scenario {name!r} (known: {known})")
    return _load(name)


def initial_profile(cfg: EvolveConfig):
    """The named initial data as a radius -> value callable (radial forms only)."""
    name, _, arg = cfg.initial.partition(":")
    if name == "zero":
        return lambda r: 0.0 * r
    if name == "upper-obstacle":
        return lambda r: build_obstacles(cfg).upper(r)
    if name == "capped-cone":
        level = float(arg)
        return lambda r: psi_c(r, level, cfg.cone_slope, cfg.support_radius)
    if name == "steepening-wedge":
        family = cand.boundary_steepening_example()
        return lambda r: cand.evaluate(family, r, 0.0)
    raise UsageError(f"initial form {cfg.initial!r} is not a radial profile")


def gate_hypotheses(scn: Scenario) -> list[str]:
    """Violated run hypotheses (empty list means the scenario may run).

    The gate refuses to execute a scenario whose claimed outcome rests on
    hypotheses its config breaks, naming each violated hypothesis.
    """
    out: list[str] = []
    cfg = scn.config
    if scn.kind == "limit":
        if cfg.lower_scale != 1.0:
            out.append(
                "limit claims need the reflected-cone obstacle pair (lower_scale = 1), "
                f"got lower_scale = {cfg.lower_scale}"
            )
        if not cfg.check_limit:
            out.append("limit scenarios must enable check_limit")
        name = cfg.initial.partition(":")[0]
        if name not in ("zero", "upper-obstacle", "capped-cone", "steepening-wedge", "file"):
            out.append(f"limit claims need radially symmetric initial data, got {cfg.initial!r}")
    elif scn.kind == "stationary":
        name, _, arg = cfg.initial.partition(":")
        if name != "capped-cone":
            out.append(f"stationarity is claimed for capped cones only, got {cfg.initial!r}")
        else:
            family = cand.stationary_capped_cone(
                build_flow(cfg), build_obstacles(cfg), float(arg)
            )
            out.extend(cand.validate_params(family))
        if cfg.check_stationary_factor <= 0:
            out.append("stationary scenarios must enable check_stationary_factor")
    elif scn.kind == "growth":
        if cfg.steady_tol > 0:
            out.append("growth runs must not stop early: set steady_tol = 0")
        if not cfg.check_blowup:
            out.append("growth scenarios must enable check_blowup")
    return out


def expected_outcome(scn: Scenario) -> Expected:
    """Materialize what the scenario asserts; rejects a scenario whose
    hypotheses fail, naming the violated hypothesis."""
    gate = gate_hypotheses(scn)
    if gate:
        raise ParameterError("; ".join(gate))
    cfg = scn.config
    if scn.kind == "limit":
        grid = RadialGrid(r_max=cfg.radial_extent, cells=cfg.radial_cells)
        profile = predicted_limit(
            initial_profile(cfg), build_obstacles(cfg), build_flow(cfg), grid
        )
        return Expected("limit", profile, "large-time profile from the annulus maximum")
    if scn.kind == "stationary":
        grid = RadialGrid(r_max=cfg.radial_extent, cells=cfg.radial_cells)
        values = initial_profile(cfg)(grid.nodes)
        return Expected("stationary", Field(grid, values), "the initial profile itself")
    if scn.kind == "growth":
        return Expected("growth", None, "boundary difference quotient grows past the threshold")
    if scn.kind == "verify":
        return Expected("verify", None, "signed residuals and corner tests pass")
    return Expected("exploratory", None, "no asserted outcome; invariants only")
