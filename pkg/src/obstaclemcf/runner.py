"""Run orchestration: execute one scenario config end to end, collect check
verdicts into a line-oriented report, persist snapshots/diagnostics, and emit
a gnuplot script for the run.

Report format (deterministic; safe to diff between runs):

    scenario: <name>
    kind: <kind>
    claim: <one line>                      # catalog scenarios only
    final_time: <%.16e>                    # evolve runs only
    check <name> <pass|fail> measured=<%.16e> bound=<%.16e>[ note=<text>]
    artifact <label> <relative path>
    verdict: <pass|fail>

Every enabled check contributes exactly one `check` line.  Wall-clock timing
never enters the report (reports are diffed); it is printed to stdout unless
quiet.
"""

from __future__ import annotations

import dataclasses
import math
import os
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import candidates as cand
from .catalog import SUITES, Scenario, gate_hypotheses, initial_profile, scenario
from .checker import SamplingSpec, verify_candidate
from .config import (
    EvolveConfig,
    ScenarioConfig,
    VerifyConfig,
    build_candidate,
    build_flow,
    build_obstacles,
    render_config,
)
from .diagnostics import (
    monotonicity_report,
    second_difference_sup,
    sup_distance,
    time_lipschitz,
)
from .errors import UsageError
from .geometry import (
    BoxGrid,
    Field,
    RadialGrid,
    lipschitz_constant,
    make_initial,
    psi_c,
    read_field,
    write_field,
)
from .ndflow import BoundaryMode, NdState, evolve_nd
from .radial import RadialState, SchemeParams, compute_B, evolve_radial, predicted_limit
from .trajectory import Trajectory

__all__ = [
    "CheckResult",
    "RunReport",
    "run_scenario",
    "run_config",
    "run_converge",
    "run_repro",
    "emit_plot_script",
    "DEFAULT_SNAPSHOT_CAP",
]

DEFAULT_SNAPSHOT_CAP = 12

#: slack for "non-decreasing" series checks (absolute, per comparison)
_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    bound: float
    note: str = ""

    def line(self) -> str:
        verdict = "pass" if self.passed else "fail"
        text = f"check {self.name} {verdict} measured={self.measured:.16e} bound={self.bound:.16e}"
        if self.note:
            text += f" note={self.note}"
        return text


@dataclass
class RunReport:
    scenario: str
    kind: str = "adhoc"
    claim: str = ""
    final_time: float | None = None
    checks: list[CheckResult] = field(default_factory=list)
    artifacts: list[tuple[str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self) -> str:
        lines = [f"scenario: {self.scenario}", f"kind: {self.kind}"]
        if self.claim:
            lines.append(f"claim: {self.claim}")
        if self.final_time is not None:
            lines.append(f"final_time: {self.final_time:.16e}")
        lines.extend(c.line() for c in self.checks)
        lines.extend(f"artifact {label} {path}" for label, path in self.artifacts)
        lines.append(f"verdict: {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"


def _say(quiet: bool, text: str) -> None:
    if not quiet:
        print(text)


# ---------------------------------------------------------------------------
# initial data


def _two_bumps(grid: BoxGrid, cfg: EvolveConfig) -> np.ndarray:
    """Two smooth off-center bumps, scaled into the obstacle band."""
    if grid.dimension != 2:
        raise UsageError("two-bumps is a planar initial form")
    radius = cfg.support_radius
    center = 0.45 * radius
    width = 0.4 * radius
    height = 0.25 * radius * cfg.cone_slope
    x = grid.axis[:, None]
    y = grid.axis[None, :]

    def bump(cx: float) -> np.ndarray:
        q = ((x - cx) ** 2 + y**2) / (width * width)
        return height * np.clip(1.0 - q, 0.0, None) ** 2

    values = bump(center) + bump(-center)
    lo, hi = build_obstacles(cfg).sample(grid)
    return np.minimum(np.maximum(values, lo), hi)


def _initial_field(cfg: EvolveConfig, grid) -> Field:
    name, _, arg = cfg.initial.partition(":")
    if name == "file":
        fld, _ = read_field(arg)
        return fld
    if name == "two-bumps":
        return Field(grid, _two_bumps(grid, cfg))
    return make_initial(grid, initial_profile(cfg))


def _nd_limit_profile(cfg: EvolveConfig, grid: BoxGrid) -> Field:
    """Large-time profile sampled on the box (radial initial data only)."""
    flow = build_flow(cfg)
    obstacles = build_obstacles(cfg)
    if obstacles.support_radius <= flow.critical_radius:
        return Field(grid, np.zeros(grid.shape))
    plateau = compute_B(initial_profile(cfg), flow, obstacles, grid.h)
    return Field(grid, psi_c(grid.radii, plateau, obstacles.cone_slope, obstacles.support_radius))


# ---------------------------------------------------------------------------
# check evaluation


def _series_checks(cfg: EvolveConfig, traj: Trajectory, initial: Field,
                   prediction: Field | None, budget: float) -> list[CheckResult]:
    checks: list[CheckResult] = []
    flow = build_flow(cfg)

    if cfg.check_limit:
        dist = sup_distance(traj.final, prediction)
        checks.append(CheckResult("limit_distance", dist <= cfg.limit_tolerance,
                                  dist, cfg.limit_tolerance))
    if cfg.check_stationary_factor > 0:
        drift = sup_distance(traj.final, initial)
        bound = cfg.check_stationary_factor * traj.grid.h
        checks.append(CheckResult("stationary_drift", drift <= bound, drift, bound))
    if cfg.check_monotone_radii:
        reports = monotonicity_report(
            traj, list(cfg.check_monotone_radii), flow, build_obstacles(cfg),
            per_step_tol=cfg.monotone_step_tol,
        )
        for rep in reports:
            name = f"monotone_r{rep.radius:g}"
            if not rep.checked:
                checks.append(CheckResult(name, True, math.nan, 0.0,
                                          note=f"skipped: {rep.note}"))
            else:
                checks.append(CheckResult(name, rep.passed, rep.worst_increment, 0.0,
                                          note=rep.note))
    if cfg.check_lipschitz_factor > 0:
        worst = float(np.nanmax(traj.diagnostics.column("lipschitz")))
        bound = cfg.check_lipschitz_factor * budget
        checks.append(CheckResult("lipschitz_budget", worst <= bound, worst, bound))
    if cfg.check_temporal_bound:
        quotient = time_lipschitz(traj)
        bound = 2.0 * second_difference_sup(initial) + flow.driving_force * budget + 1.0
        checks.append(CheckResult("temporal_quotient", quotient <= bound, quotient, bound))
    if cfg.lyapunov_descent_tol > 0:
        series = traj.diagnostics.column("lyapunov")
        times = traj.diagnostics.column("t")
        rates = np.diff(series) / np.diff(times)
        worst = float(np.max(rates)) if rates.size else 0.0
        checks.append(CheckResult("lyapunov_descent", worst <= cfg.lyapunov_descent_tol,
                                  worst, cfg.lyapunov_descent_tol))
    if cfg.check_confinement:
        lo, hi = build_obstacles(cfg).sample(traj.grid)
        worst = max(
            max(float(np.max(lo - f.values)), float(np.max(f.values - hi)))
            for f in traj.fields
        )
        checks.append(CheckResult("confinement", worst <= 0.0, worst, 0.0))
    if cfg.check_blowup:
        times = traj.diagnostics.column("t")
        series = traj.diagnostics.column("boundary_quotient")
        increments = np.diff(series)
        worst_inc = float(np.min(increments)) if increments.size else 0.0
        checks.append(CheckResult("blowup_monotone", worst_inc >= -_MONOTONE_SLACK,
                                  worst_inc, -_MONOTONE_SLACK))
        k = int(np.argmin(np.abs(times - cfg.blowup_time)))
        example = cand.boundary_steepening_example()
        edge = cand.domain_radius(example)
        steep = abs(float(cand.radial_slope(example, edge - 1e-9, float(times[k]))))
        threshold = cfg.blowup_factor * steep
        quot = float(series[k])
        hit_time = abs(float(times[k]) - cfg.blowup_time) <= 1e-9
        checks.append(CheckResult(
            "blowup_threshold", hit_time and quot > threshold, quot, threshold,
            note="" if hit_time else f"nearest snapshot t={times[k]:g} missed blowup_time",
        ))
    return checks


# ---------------------------------------------------------------------------
# evolve / verify / converge


def _scheme(cfg: EvolveConfig) -> SchemeParams:
    return SchemeParams(
        cfl_safety=cfg.cfl_safety,
        snapshot_interval=cfg.snapshot_interval,
        horizon=cfg.horizon,
        steady_tol=cfg.steady_tol,
        steady_patience=cfg.steady_patience,
    )


def _evolve_once(cfg: EvolveConfig) -> tuple[Trajectory, Field, Field | None, float]:
    """Run the configured evolution; returns (trajectory, initial field,
    prediction or None, Lipschitz budget)."""
    flow = build_flow(cfg)
    if cfg.solver == "radial":
        grid = RadialGrid(r_max=cfg.radial_extent, cells=cfg.radial_cells)
        obstacles = build_obstacles(cfg)
        initial = _initial_field(cfg, grid)
        prediction = (
            predicted_limit(initial_profile(cfg), obstacles, flow, grid)
            if cfg.check_limit else None
        )
        state = RadialState.create(grid, initial, obstacles, flow)
        traj = evolve_radial(state, _scheme(cfg), prediction=prediction)
        budget = obstacles.lipschitz
    else:
        grid = BoxGrid(half_width=cfg.half_width, nodes_per_axis=cfg.nodes_per_axis,
                       dimension=cfg.dimension)
        initial = _initial_field(cfg, grid)
        if cfg.mode == "obstacle":
            obstacles = build_obstacles(cfg)
            state = NdState.create(
                grid, initial, flow, obstacles,
                mode=BoundaryMode.OBSTACLE, epsilon=cfg.epsilon,
                gradient_floor=cfg.gradient_floor,
            )
            budget = obstacles.lipschitz
        else:
            state = NdState.create(
                grid, initial, flow, None,
                mode=BoundaryMode.DIRICHLET_ZERO, epsilon=cfg.epsilon,
                gradient_floor=cfg.gradient_floor, support_radius=cfg.support_radius,
            )
            budget = lipschitz_constant(initial)
        prediction = _nd_limit_profile(cfg, grid) if cfg.check_limit else None
        traj = evolve_nd(state, _scheme(cfg), prediction=prediction)
    return traj, traj.fields[0], prediction, budget


def _persist_evolve(cfg: EvolveConfig, traj: Trajectory, prediction: Field | None,
                    run_dir: Path, out_root: Path, snapshots_cap: int,
                    report: RunReport) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)

    def rel(p: Path) -> str:
        return os.fspath(p.relative_to(out_root))

    snap_paths = traj.write_snapshots(run_dir, snapshots_cap)
    for p in snap_paths:
        report.artifacts.append(("snapshot", rel(p)))

    diag_path = run_dir / "diagnostics.dat"
    traj.diagnostics.write(diag_path)
    report.artifacts.append(("diagnostics", rel(diag_path)))

    overlays: dict[str, Path] = {}
    if prediction is not None:
        pred_path = run_dir / "prediction.dat"
        write_field(prediction, traj.final_time, pred_path)
        report.artifacts.append(("prediction", rel(pred_path)))
        overlays["predicted limit"] = pred_path
    if cfg.mode == "obstacle" and isinstance(traj.grid, RadialGrid):
        obstacles = build_obstacles(cfg)
        lo, hi = obstacles.sample(traj.grid)
        for label, vals in (("lower-obstacle", lo), ("upper-obstacle", hi)):
            path = run_dir / f"{label}.dat"
            write_field(Field(traj.grid, vals), 0.0, path)
            report.artifacts.append((label, rel(path)))
            overlays[label.replace("-", " ")] = path

    kind = "blowup" if cfg.check_blowup else "profiles"
    script = emit_plot_script(
        snap_paths, run_dir / "plot.gp", kind=kind,
        overlays=overlays or None, diagnostics=diag_path,
    )
    report.artifacts.append(("plot-script", rel(script)))


def run_config(cfg: ScenarioConfig, name: str, out_dir: str | Path,
               snapshots_cap: int = DEFAULT_SNAPSHOT_CAP, quiet: bool = False,
               kind: str = "adhoc", claim: str = "") -> RunReport:
    """Execute one parsed config (evolve or verify) and write its artifacts
    under `<out_dir>/<name>/`."""
    out_root = Path(out_dir)
    run_dir = out_root / name
    report = RunReport(scenario=name, kind=kind, claim=claim)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.cfg").write_text(render_config(cfg))
    report.artifacts.append(("config", os.fspath((run_dir / "config.cfg").relative_to(out_root))))

    start = _time.perf_counter()
    if isinstance(cfg, EvolveConfig):
        traj, initial, prediction, budget = _evolve_once(cfg)
        report.final_time = traj.final_time
        report.checks.extend(_series_checks(cfg, traj, initial, prediction, budget))
        _persist_evolve(cfg, traj, prediction, run_dir, out_root, snapshots_cap, report)
    else:
        report.checks.extend(_verify_checks(cfg, run_dir, out_root, report))
    elapsed = _time.perf_counter() - start

    report_path = run_dir / "report.txt"
    report_path.write_text(report.to_text())
    report.artifacts.append(("report", os.fspath(report_path.relative_to(out_root))))

    _say(quiet, f"{name}: {'pass' if report.passed else 'FAIL'} ({elapsed:.1f}s)")
    return report


def _verify_checks(cfg: VerifyConfig, run_dir: Path, out_root: Path,
                   report: RunReport) -> list[CheckResult]:
    family = build_candidate(cfg)
    if cfg.mode == "auto":
        modes = cand.applicable_modes(family)
    elif cfg.mode == "both":
        modes = (cand.Mode.SUB, cand.Mode.SUPER)
    else:
        modes = (cand.Mode.SUB if cfg.mode == "sub" else cand.Mode.SUPER,)
    spec = SamplingSpec(
        radial_points=cfg.radial_points,
        time_points=cfg.time_points,
        horizon=cfg.sample_horizon,
        kink_samples=cfg.kink_samples,
    )
    run_dir.mkdir(parents=True, exist_ok=True)
    checks = []
    for mode in modes:
        result = verify_candidate(family, mode, spec)
        label = mode.name.lower()
        path = run_dir / f"verification-{label}.txt"
        path.write_text(result.to_text())
        report.artifacts.append((f"verification-{label}", os.fspath(path.relative_to(out_root))))
        checks.append(CheckResult(
            f"verify_{label}", result.passed, result.worst_residual, spec.slack,
            note=f"samples={result.samples_checked}",
        ))
    return checks


def run_converge(cfg: EvolveConfig, name: str, out_dir: str | Path,
                 snapshots_cap: int = DEFAULT_SNAPSHOT_CAP,
                 quiet: bool = False) -> RunReport:
    """Refinement study: run the scenario at `converge_levels` grids, each
    halving h, and check that the final-time gap between consecutive levels
    shrinks.  Grids are nested, so fields are compared on shared nodes."""
    out_root = Path(out_dir)
    report = RunReport(scenario=name, kind="converge")
    finals: list[Field] = []
    levels: list[EvolveConfig] = []
    for k in range(cfg.converge_levels):
        if cfg.solver == "radial":
            level = dataclasses.replace(cfg, radial_cells=cfg.radial_cells * 2**k)
        else:
            level = dataclasses.replace(cfg, nodes_per_axis=(cfg.nodes_per_axis - 1) * 2**k + 1)
        levels.append(level)

    start = _time.perf_counter()
    gaps: list[float] = []
    for k, level in enumerate(levels):
        traj, _, _, _ = _evolve_once(level)
        finals.append(traj.final)
        report.final_time = traj.final_time
        h = traj.grid.h
        _say(quiet, f"{name}: level {k} h={h:.6g} done")
        if k > 0:
            fine = finals[k].values
            sub = fine[(slice(None, None, 2),) * fine.ndim]
            gap = float(np.max(np.abs(sub - finals[k - 1].values)))
            gaps.append(gap)
            report.checks.append(CheckResult(
                f"gap_level{k}", True, gap, math.inf,
                note=f"h={h:.6g} vs h={2 * h:.6g}",
            ))
    for k in range(1, len(gaps)):
        rate = math.log2(gaps[k - 1] / gaps[k]) if gaps[k] > 0 else math.inf
        report.checks.append(CheckResult(
            f"gap_shrinks_level{k + 1}", gaps[k] < gaps[k - 1], gaps[k], gaps[k - 1],
            note=f"observed_order={rate:.2f}",
        ))
    elapsed = _time.perf_counter() - start

    run_dir = out_root / name
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "report.txt").write_text(report.to_text())
    report.artifacts.append(("report", os.fspath((run_dir / "report.txt").relative_to(out_root))))
    _say(quiet, f"{name}: {'pass' if report.passed else 'FAIL'} ({elapsed:.1f}s)")
    return report


# ---------------------------------------------------------------------------
# catalog scenarios and repro suites


def run_scenario(scn: Scenario, out_dir: str | Path,
                 snapshots_cap: int = DEFAULT_SNAPSHOT_CAP,
                 quiet: bool = False) -> RunReport:
    """Gate the scenario's hypotheses, then execute it."""
    gate = gate_hypotheses(scn)
    if gate:
        report = RunReport(scenario=scn.name, kind=scn.kind, claim=scn.claim)
        for k, violation in enumerate(gate):
            report.checks.append(CheckResult(
                f"hypothesis_gate_{k}", False, math.nan, math.nan, note=violation,
            ))
        out_root = Path(out_dir)
        run_dir = out_root / scn.name
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / "report.txt").write_text(report.to_text())
        report.artifacts.append(
            ("report", os.fspath((run_dir / "report.txt").relative_to(out_root)))
        )
        _say(quiet, f"{scn.name}: GATED ({'; '.join(gate)})")
        return report
    return run_config(scn.config, scn.name, out_dir, snapshots_cap, quiet,
                      kind=scn.kind, claim=scn.claim)


_REJECTION_PROBES: tuple[tuple[str, str], ...] = (
    ("candidate-rising-cone", "decay_rate"),
    ("candidate-flattening-tip", "decay_rate"),
    ("candidate-settling-plateau", "decay_rate"),
    ("candidate-climbing-plateau", "inner_decay_rate"),
    ("candidate-climbing-plateau", "skirt_decay_rate"),
)


def _probe_report(out_dir: str | Path, quiet: bool) -> RunReport:
    """Push each decay rate to 1.1x its admissible endpoint and demand that
    both the validator and the verification entry point reject it."""
    report = RunReport(scenario="rejection-probes", kind="verify",
                       claim="Rates just outside their admissible intervals must be rejected.")
    spec = SamplingSpec(radial_points=512, time_points=6, horizon=5.0)
    for scenario_name, param in _REJECTION_PROBES:
        family = build_candidate(scenario(scenario_name).config)
        bound = cand.decay_rate_bounds(family)[param]
        probe = cand.with_rate(family, param, 1.1 * bound)
        flagged = bool(cand.validate_params(probe))
        refused = False
        try:
            verify_candidate(probe, cand.applicable_modes(probe)[0], spec)
        except UsageError:
            refused = True
        report.checks.append(CheckResult(
            f"reject_{scenario_name.removeprefix('candidate-')}_{param}",
            flagged and refused, 1.1 * bound, bound,
            note="validator and verifier both refused" if flagged and refused
            else f"flagged={flagged} refused={refused}",
        ))
    out_root = Path(out_dir)
    run_dir = out_root / "rejection-probes"
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "report.txt").write_text(report.to_text())
    report.artifacts.append(("report", os.fspath((run_dir / "report.txt").relative_to(out_root))))
    _say(quiet, f"rejection-probes: {'pass' if report.passed else 'FAIL'}")
    return report


def run_repro(suite: str, out_dir: str | Path,
              snapshots_cap: int = DEFAULT_SNAPSHOT_CAP,
              quiet: bool = False) -> list[RunReport]:
    """Execute a canned suite; scenario evolutions run concurrently (one per
    worker), report assembly stays in catalog order."""
    if suite not in SUITES:
        known = ", ".join(sorted(SUITES))
        raise UsageError(f"unknown suite {suite!r} (known: {known})")
    scenarios = [scenario(name) for name in SUITES[suite]]
    workers = max(1, min(len(scenarios), os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run_scenario, scn, out_dir, snapshots_cap, quiet)
            for scn in scenarios
        ]
        reports = [f.result() for f in futures]
    if suite == "candidates-all":
        reports.append(_probe_report(out_dir, quiet))
    return reports


# ---------------------------------------------------------------------------
# plot scripts


def emit_plot_script(snapshot_paths: list[str | Path], out_path: str | Path,
                     kind: str = "profiles",
                     overlays: dict[str, Path] | None = None,
                     diagnostics: str | Path | None = None) -> Path:
    """Write a self-contained gnuplot command file next to the data.

    kind="profiles": radial profiles at the snapshot times, overlaid with any
    reference curves (obstacles, predicted limit).  kind="blowup": boundary
    difference quotient against time on a log scale, from the diagnostics
    series file.
    """
    out_path = Path(out_path)
    paths = [Path(p) for p in snapshot_paths]
    if not paths:
        raise UsageError("no snapshot files given")
    missing = [p for p in paths if not p.exists()]
    if missing:
        raise UsageError(f"snapshot files do not exist: {missing}")
    if kind not in ("profiles", "blowup"):
        raise UsageError(f"unknown plot kind {kind!r}")

    def ref(p: Path) -> str:
        try:
            return os.fspath(p.relative_to(out_path.parent))
        except ValueError:
            return os.fspath(p)

    lines = [
        "# gnuplot command file (generated)",
        "set terminal pngcairo size 960,640",
        "set key outside right",
        "set grid",
    ]
    if kind == "blowup":
        if diagnostics is None:
            raise UsageError("blowup plots need the diagnostics series file")
        diag = Path(diagnostics)
        if not diag.exists():
            raise UsageError(f"diagnostics file does not exist: {diag}")
        lines += [
            f"set output '{out_path.stem}.png'",
            "set xlabel 't'",
            "set ylabel 'boundary difference quotient'",
            "set logscale y",
            f"plot '{ref(diag)}' using 1:3 with linespoints title 'quotient'",
        ]
    else:
        lines += [
            f"set output '{out_path.stem}.png'",
            "set xlabel 'r'",
            "set ylabel 'u'",
        ]
        plot_terms = []
        for label, path in (overlays or {}).items():
            plot_terms.append(
                f"'{ref(Path(path))}' using 1:2 with lines dt 2 lw 2 title '{label}'"
            )
        for p in paths:
            with open(p) as fh:
                header = fh.readline()
            t_token = header.split("t=")[1].split()[0] if "t=" in header else "?"
            label = f"t={float(t_token):g}" if t_token != "?" else p.stem
            plot_terms.append(f"'{ref(p)}' using 1:2 with lines title '{label}'")
        lines.append("plot \\")
        lines.append(", \\\n".join("  " + term for term in plot_terms))
    out_path.write_text("\n".join(lines) + "\n")
    return out_path
