"""Pointwise sub/supersolution verification for the candidate profiles.

On smooth pieces of a radial profile the operator reduces to

    residual(r, t) = phi_t - (N-1) phi_r / r - A |phi_r|,

which must stay <= 0 (SUB) or >= 0 (SUPER) up to a tiny slack.  At a kink of
radius rho with one-sided slopes (a, b) the profile is probed over every
admissible test slope s between them:

    phi_t(s) - (N-1) s / rho - A |s|,

with phi_t(s) = 0 for a kink at rest and -velocity*s for the one moving-kink
form this harness supports (the fixed boundary-steepening example).  Where the
profile sits on an obstacle the inequality is not required — a subsolution
sample is exempt when the value has dropped to the lower obstacle, a
supersolution sample when it has risen to the upper one.

Sampling: a uniform radial grid, clusters of extra points hugging each kink
and the critical radius, and log-spaced times (plus t=0) up to the check
horizon.  The worst surviving residual is then polished by a golden-section
pass inside its smooth piece, so the reported extremum is trustworthy to
roughly 1e-8 rather than one grid spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .candidates import (
    CandidateFamily,
    CandidateTag,
    KinkDescriptor,
    Mode,
    domain_radius,
    evaluate,
    kink_set,
    radial_slope,
    time_slope,
    validate_params,
)
from .errors import UsageError


@dataclass(frozen=True)
class SamplingSpec:
    """Resolution of the verification sweep."""

    radial_points: int = 10_000
    time_points: int = 24
    horizon: float = 20.0
    kink_samples: int = 256
    kink_margin: float = 1e-9
    slack: float = 1e-10
    contact_tol: float = 1e-12
    polish_iters: int = 80

    def times(self) -> np.ndarray:
        if self.time_points < 2:
            return np.array([0.0])
        spread = np.logspace(-3.0, math.log10(self.horizon), self.time_points - 1)
        return np.concatenate(([0.0], spread))


@dataclass(frozen=True)
class KinkCheckResult:
    kink: KinkDescriptor
    time: float
    worst: float
    worst_slope: float
    passed: bool
    exempt: bool = False
    unsupported: bool = False


@dataclass(frozen=True)
class SampleFailure:
    mode: Mode
    radius: float
    time: float
    residual: float


@dataclass(frozen=True)
class VerificationReport:
    tag: CandidateTag
    mode: Mode
    passed: bool
    worst_residual: float
    worst_radius: float
    worst_time: float
    samples_checked: int
    samples_exempt: int
    kink_results: tuple[KinkCheckResult, ...]
    failures: tuple[SampleFailure, ...]
    failure_cap = 50

    def to_text(self) -> str:
        lines = [
            f"candidate: {self.tag.value}",
            f"mode: {self.mode.value}",
            f"verdict: {'PASS' if self.passed else 'FAIL'}",
            f"worst_residual: {self.worst_residual:.6e} at r={self.worst_radius:.9g} t={self.worst_time:.9g}",
            f"samples: {self.samples_checked} checked, {self.samples_exempt} exempt",
        ]
        n_exempt = sum(1 for k in self.kink_results if k.exempt)
        n_unsup = sum(1 for k in self.kink_results if k.unsupported)
        n_fail = sum(1 for k in self.kink_results if not (k.passed or k.exempt))
        lines.append(
            f"kinks: {len(self.kink_results)} checks, {n_exempt} exempt, "
            f"{n_fail} failed, {n_unsup} unsupported"
        )
        for k in self.kink_results:
            if k.exempt or k.passed:
                continue
            status = "UNSUPPORTED" if k.unsupported else "FAIL"
            lines.append(
                f"kink {status} r={k.kink.radius:.9g} t={k.time:.9g} "
                f"worst={k.worst:.6e} at s={k.worst_slope:.9g}"
            )
        for f in self.failures[: self.failure_cap]:
            lines.append(f"FAIL {f.mode.value} r={f.radius:.9g} t={f.time:.9g} residual={f.residual:.6e}")
        if len(self.failures) > self.failure_cap:
            lines.append(f"... {len(self.failures) - self.failure_cap} more failing samples")
        return "\n".join(lines) + "\n"


def residual_smooth(family: CandidateFamily, r, t: float, kink_margin: float = 1e-9) -> np.ndarray:
    """Smooth-piece residual phi_t - (N-1) phi_r / r - A |phi_r|.

    Queries must keep a margin from every kink radius (and from r=0), where
    one-sided slopes would silently produce nonsense; violations raise.
    """
    r = np.atleast_1d(np.asarray(r, dtype=np.float64))
    if np.any(r <= 0):
        raise UsageError("residual_smooth needs r > 0")
    for k in kink_set(family, t):
        if np.any(np.abs(r - k.radius) < kink_margin):
            raise UsageError(
                f"residual query within {kink_margin} of the kink at r={k.radius:.12g} (t={t})"
            )
    A = family.flow.driving_force
    n1 = family.flow.dimension - 1
    dr = radial_slope(family, r, t)
    dt = time_slope(family, r, t)
    return dt - n1 * dr / r - A * np.abs(dr)


def check_kink(
    family: CandidateFamily,
    kink: KinkDescriptor,
    mode: Mode,
    t: float,
    sampling: SamplingSpec = SamplingSpec(),
) -> KinkCheckResult:
    """Probe one kink over all admissible test slopes.

    Raises UsageError when the requested mode contradicts the slope order
    (concave corners admit only the SUB test, convex only the SUPER one).
    """
    a, b = kink.left_slope, kink.right_slope
    if mode is not kink.mode:
        order = "left > right" if a > b else "left < right"
        raise UsageError(
            f"kink at r={kink.radius:.9g} has {order} slopes and admits only the "
            f"{kink.mode.value} test, not {mode.value}"
        )
    ob = family.obstacles
    if ob is not None:
        if mode is Mode.SUB and kink.value <= float(ob.lower(kink.radius)) + sampling.contact_tol:
            return KinkCheckResult(kink, t, 0.0, 0.0, passed=True, exempt=True)
        if mode is Mode.SUPER and kink.value >= float(ob.upper(kink.radius)) - sampling.contact_tol:
            return KinkCheckResult(kink, t, 0.0, 0.0, passed=True, exempt=True)
    if kink.velocity != 0.0 and family.tag is not CandidateTag.BOUNDARY_STEEPENING_EXAMPLE:
        return KinkCheckResult(kink, t, math.nan, math.nan, passed=False, unsupported=True)

    s = np.linspace(min(a, b), max(a, b), max(sampling.kink_samples, 64))
    phi_t = -kink.velocity * s
    expr = phi_t - (family.flow.dimension - 1) * s / kink.radius - family.flow.driving_force * np.abs(s)
    if mode is Mode.SUB:
        i = int(np.argmax(expr))
        return KinkCheckResult(kink, t, float(expr[i]), float(s[i]), passed=expr[i] <= sampling.slack)
    i = int(np.argmin(expr))
    return KinkCheckResult(kink, t, float(expr[i]), float(s[i]), passed=expr[i] >= -sampling.slack)


def _sample_radii(family: CandidateFamily, t: float, sampling: SamplingSpec) -> np.ndarray:
    """Base grid plus clusters hugging each kink and the critical radius."""
    r_dom = domain_radius(family)
    r_hi = r_dom if family.obstacles is None else 1.05 * r_dom
    base = np.linspace(0.0, r_hi, sampling.radial_points + 1)[1:]
    if family.obstacles is None:
        base = base[base < r_dom]  # open ball; the rim is boundary data

    extras = [np.array([])]
    offsets = sampling.kink_margin * np.array([2.0, 8.0, 32.0, 1e3, 1e5, 1e7])
    anchors = [k.radius for k in kink_set(family, t)]
    rc = family.flow.critical_radius
    if rc < r_hi:
        anchors.append(rc)
    for rho in anchors:
        extras.append(rho + offsets)
        extras.append(rho - offsets)
    r = np.unique(np.concatenate([base] + extras))
    r = r[(r > 0) & (r <= r_hi)]
    if family.obstacles is None:
        r = r[r < r_dom]
    # keep the kink margin
    for k in kink_set(family, t):
        r = r[np.abs(r - k.radius) >= sampling.kink_margin]
    return r


def _exempt_mask(family: CandidateFamily, r: np.ndarray, values: np.ndarray, mode: Mode, tol: float):
    ob = family.obstacles
    if ob is None:
        return np.zeros_like(values, dtype=bool)
    if mode is Mode.SUB:
        return values <= ob.lower(r) + tol
    return values >= ob.upper(r) - tol


def _polish(family, mode, r_star, t_star, r_lo, r_hi, iters) -> tuple[float, float]:
    """Golden-section sharpening of the worst smooth residual inside one piece."""
    sign = 1.0 if mode is Mode.SUB else -1.0

    def f(r: float) -> float:
        return sign * np.asarray(residual_smooth(family, r, t_star, kink_margin=0.0)).item()

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = r_lo, r_hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    r_best = c if fc > fd else d
    best = max(fc, fd)
    # never report a value worse than the sampled one
    return r_best, sign * best


def verify_candidate(
    family: CandidateFamily,
    mode: Mode,
    sampling: SamplingSpec = SamplingSpec(),
) -> VerificationReport:
    """Full sweep: validation gate, smooth residuals, kink probes, polish.

    Families that fail validate_params() are refused outright (UsageError);
    a verification run only means something for parameter choices inside the
    admissible region.
    """
    violations = validate_params(family)
    if violations:
        raise UsageError(
            f"{family.tag.value} failed validation: " + "; ".join(violations)
        )

    slack = sampling.slack
    worst = -math.inf  # in "signed badness": higher is worse for both modes
    worst_r = math.nan
    worst_t = math.nan
    checked = 0
    exempt = 0
    failures: list[SampleFailure] = []
    kink_results: list[KinkCheckResult] = []
    sign = 1.0 if mode is Mode.SUB else -1.0

    for t in sampling.times():
        t = float(t)
        r = _sample_radii(family, t, sampling)
        res = residual_smooth(family, r, t, kink_margin=sampling.kink_margin * 0.5)
        vals = evaluate(family, r, t)
        mask = _exempt_mask(family, r, vals, mode, sampling.contact_tol)
        exempt += int(mask.sum())
        keep = ~mask
        checked += int(keep.sum())
        if keep.any():
            signed = sign * res[keep]
            j = int(np.argmax(signed))
            if signed[j] > worst:
                worst = float(signed[j])
                worst_r = float(r[keep][j])
                worst_t = t
            bad = signed > slack
            if bad.any():
                rr, tres = r[keep][bad], res[keep][bad]
                for radius, value in zip(rr, tres):
                    failures.append(SampleFailure(mode, float(radius), t, float(value)))

        for k in kink_set(family, t):
            if k.mode is not mode:
                continue
            kink_results.append(check_kink(family, k, mode, t, sampling))

    if math.isfinite(worst):
        # polish within the smooth piece around the worst sample
        kinks = [k.radius for k in kink_set(family, worst_t)]
        below = max([0.0] + [x for x in kinks if x < worst_r])
        above = min([domain_radius(family) * 1.05] + [x for x in kinks if x > worst_r])
        h_loc = domain_radius(family) / sampling.radial_points
        lo = max(worst_r - h_loc, below + sampling.kink_margin, 1e-12)
        hi = min(worst_r + h_loc, above - sampling.kink_margin)
        if lo < hi:
            r_pol, res_pol = _polish(family, mode, worst_r, worst_t, lo, hi, sampling.polish_iters)
            if sign * res_pol > worst:
                worst = sign * res_pol
                worst_r = r_pol
                if sign * res_pol > slack:
                    failures.append(SampleFailure(mode, r_pol, worst_t, res_pol))

    smooth_ok = worst <= slack if math.isfinite(worst) else True
    kinks_ok = all(k.passed or k.exempt for k in kink_results)
    worst_residual = sign * worst if math.isfinite(worst) else math.nan
    return VerificationReport(
        tag=family.tag,
        mode=mode,
        passed=smooth_ok and kinks_ok,
        worst_residual=worst_residual,
        worst_radius=worst_r,
        worst_time=worst_t,
        samples_checked=checked,
        samples_exempt=exempt,
        kink_results=tuple(kink_results),
        failures=tuple(failures),
    )
