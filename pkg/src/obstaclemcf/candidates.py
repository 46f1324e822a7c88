"""Closed-form radial comparison profiles and their admissibility bounds.

Each family below is a piecewise-linear-in-r profile phi(r, t) built from the
obstacle cone geometry (slope lam, support radius R, Lipschitz budget L,
driving force A, dimension N).  Away from its kinks a profile is meant to
satisfy, in the pointwise sense,

    phi_t - (N-1) phi_r / r - A |phi_r|  <= 0   (subsolution side), or >= 0,

and at a kink radius rho with one-sided slopes (a, b) the corresponding
one-parameter inequality over test slopes s between b and a.  Only concave
corners (a > b) admit smooth functions touching from above, so they matter
for the subsolution test; convex corners (a < b) matter for the supersolution
test.  kink_set() records each kink's radius, one-sided slopes, the test mode
it is subject to, the profile value there (used for obstacle-contact
exemptions) and the kink velocity (nonzero only for the moving-interface
example).

Decay-rate upper bounds collected here are the sufficient intervals under
which the sign conditions hold for all r and t; validate_params() enforces
them and verify (in the checker module) refuses families that fail
validation.  The bounds need not be sharp: a rate just past an endpoint can
still produce sign-correct residuals, which is why rejection happens at
validation time rather than by hunting for a sign change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Mapping

import numpy as np

from .errors import ParameterError, UsageError
from .geometry import FlowParams, ObstacleSpec, psi_c, psi_plus


class Mode(Enum):
    """Which one-sided comparison a profile is tested for."""

    SUB = "sub"
    SUPER = "super"


class CandidateTag(Enum):
    STATIONARY_CAPPED_CONE = "stationary-capped-cone"
    LOWER_RISING_CONE = "lower-rising-cone"
    UPPER_FLATTENING_TIP = "upper-flattening-tip"
    UPPER_SETTLING_PLATEAU = "upper-settling-plateau"
    LOWER_CLIMBING_PLATEAU = "lower-climbing-plateau"
    LIMIT_PLATEAU_WEDGE = "limit-plateau-wedge"
    BOUNDARY_STEEPENING_EXAMPLE = "boundary-steepening-example"


@dataclass(frozen=True)
class KinkDescriptor:
    """One profile corner at a fixed time.

    left_slope/right_slope are the one-sided radial slopes (a, b); `mode` is
    the test the corner is subject to (SUB for concave corners a > b, SUPER
    for convex ones).  `value` is phi at the corner, `velocity` the corner
    speed d(radius)/dt.
    """

    radius: float
    left_slope: float
    right_slope: float
    mode: Mode
    value: float
    velocity: float = 0.0


@dataclass(frozen=True)
class CandidateFamily:
    """A tagged profile with its parameters and ambient data.

    `obstacles` is None only for the fixed moving-interface example, which
    runs without obstacles on the ball of radius 2.  Construction does not
    validate; call validate_params() (verify does so and refuses families
    with violations).
    """

    tag: CandidateTag
    flow: FlowParams
    obstacles: ObstacleSpec | None
    params: Mapping[str, float] = field(default_factory=dict)


# --- constructors ---------------------------------------------------------


def stationary_capped_cone(flow: FlowParams, obstacles: ObstacleSpec, level: float) -> CandidateFamily:
    return CandidateFamily(CandidateTag.STATIONARY_CAPPED_CONE, flow, obstacles, {"level": level})


def lower_rising_cone(flow: FlowParams, obstacles: ObstacleSpec, decay_rate: float) -> CandidateFamily:
    return CandidateFamily(CandidateTag.LOWER_RISING_CONE, flow, obstacles, {"decay_rate": decay_rate})


def upper_flattening_tip(
    flow: FlowParams, obstacles: ObstacleSpec, decay_rate: float, margin: float
) -> CandidateFamily:
    return CandidateFamily(
        CandidateTag.UPPER_FLATTENING_TIP, flow, obstacles,
        {"decay_rate": decay_rate, "margin": margin},
    )


def upper_settling_plateau(
    flow: FlowParams, obstacles: ObstacleSpec, decay_rate: float, margin: float, plateau: float
) -> CandidateFamily:
    return CandidateFamily(
        CandidateTag.UPPER_SETTLING_PLATEAU, flow, obstacles,
        {"decay_rate": decay_rate, "margin": margin, "plateau": plateau},
    )


def lower_climbing_plateau(
    flow: FlowParams,
    obstacles: ObstacleSpec,
    inner_decay_rate: float,
    skirt_decay_rate: float,
    plateau_radius: float,
    plateau: float,
) -> CandidateFamily:
    return CandidateFamily(
        CandidateTag.LOWER_CLIMBING_PLATEAU, flow, obstacles,
        {
            "inner_decay_rate": inner_decay_rate,
            "skirt_decay_rate": skirt_decay_rate,
            "plateau_radius": plateau_radius,
            "plateau": plateau,
        },
    )


def limit_plateau_wedge(
    flow: FlowParams, obstacles: ObstacleSpec, plateau: float, plateau_radius: float
) -> CandidateFamily:
    return CandidateFamily(
        CandidateTag.LIMIT_PLATEAU_WEDGE, flow, obstacles,
        {"plateau": plateau, "plateau_radius": plateau_radius},
    )


def boundary_steepening_example() -> CandidateFamily:
    """Fixed planar example (driving force 1) whose boundary slope grows like
    2 e^{t/6} while the flat region's edge moves outward."""
    return CandidateFamily(
        CandidateTag.BOUNDARY_STEEPENING_EXAMPLE,
        FlowParams(driving_force=1.0, dimension=2),
        None,
        {},
    )


def applicable_modes(family: CandidateFamily) -> tuple[Mode, ...]:
    """The comparison sides a family is designed to satisfy."""
    t = family.tag
    if t is CandidateTag.STATIONARY_CAPPED_CONE:
        return (Mode.SUB, Mode.SUPER)
    if t in (CandidateTag.UPPER_FLATTENING_TIP, CandidateTag.UPPER_SETTLING_PLATEAU):
        return (Mode.SUPER,)
    return (Mode.SUB,)


def domain_radius(family: CandidateFamily) -> float:
    """Radius of the ball the profile lives on."""
    if family.obstacles is not None:
        return family.obstacles.support_radius
    return 2.0  # the fixed example's ball


def vanishing_cone_rate_interval(flow: FlowParams, support_radius: float) -> tuple[float, float]:
    """Admissible decay-rate interval (0, hi) for a positive cone shrinking to
    zero — defined only below the critical radius, where curvature wins."""
    rc = flow.critical_radius
    if support_radius >= rc:
        raise ParameterError(
            f"a shrinking positive cone needs support_radius < critical radius {rc}, "
            f"got {support_radius}"
        )
    hi = ((flow.dimension - 1) / support_radius - flow.driving_force) / support_radius
    return (0.0, hi)


# --- shared helpers -------------------------------------------------------

_SLOPE_TIE = 1e-14  # below this slope gap a corner is not a kink


def _ctx(family: CandidateFamily):
    ob = family.obstacles
    if ob is None:
        raise UsageError(f"{family.tag.value} carries no obstacle data")
    return (
        ob.cone_slope,
        ob.support_radius,
        ob.lipschitz,
        ob.lower_scale * ob.cone_slope,  # lower obstacle slope magnitude
        family.flow.driving_force,
        family.flow.dimension,
    )


def _rate_violation(name: str, value: float, hi: float) -> str | None:
    if not (value > 0):
        return f"{name} must be > 0, got {value}"
    if not (value < hi):
        return f"{name}={value} outside the admissible interval (0, {hi})"
    return None


def _as_r(r) -> np.ndarray:
    return np.asarray(r, dtype=np.float64)


# --- stationary capped cone ------------------------------------------------


def _cc_validate(f: CandidateFamily) -> list[str]:
    lam, R, L, _, A, N = _ctx(f)
    rc = f.flow.critical_radius
    C = f.params["level"]
    v: list[str] = []
    if C < 0:
        v.append(f"level must be >= 0, got {C}")
        return v
    hi = lam * (R - rc)
    if C > max(hi, 0.0):
        alt = lam * rc
        if hi < 0:
            v.append(
                f"support radius {R} is at or below the critical radius {rc}: "
                f"only level 0 is stationary, got {C}"
            )
        else:
            v.append(
                f"level {C} exceeds the stationary cap {hi} = cone_slope*(support_radius"
                f" - critical_radius); the plateau edge must sit outside the critical"
                f" radius {rc}.  (The cap cone_slope*critical_radius = {alt} quoted in"
                f" some summaries does not guarantee that and is not used.)"
            )
    return v


def _cc_eval(f, r, t):
    lam, R, *_ = _ctx(f)
    return psi_c(_as_r(r), f.params["level"], lam, R)


def _cc_slope(f, r, t):
    lam, R, *_ = _ctx(f)
    r = _as_r(r)
    r0 = R - f.params["level"] / lam
    return np.where((r > r0) & (r < R), -lam, 0.0)


def _cc_tslope(f, r, t):
    return np.zeros_like(_as_r(r))


def _cc_kinks(f, t):
    lam, R, *_ = _ctx(f)
    C = f.params["level"]
    if C <= 0:
        return []
    r0 = R - C / lam
    if r0 <= 0:
        return []
    return [KinkDescriptor(r0, 0.0, -lam, Mode.SUB, value=C)]


# --- lower rising cone ------------------------------------------------------


def _lrc_validate(f) -> list[str]:
    lam, R, L, lo_slope, A, N = _ctx(f)
    hi = ((N - 1) / R + A) / R
    bad = _rate_violation("decay_rate", f.params["decay_rate"], hi)
    return [bad] if bad else []


def _lrc_coeff(f, t: float) -> float:
    """Slope magnitude of the active branch: the rising cone until it meets
    the lower obstacle's slope."""
    _, _, L, lo_slope, _, _ = _ctx(f)
    return min(L * math.exp(-f.params["decay_rate"] * t), lo_slope)


def _lrc_eval(f, r, t):
    _, R, *_ = _ctx(f)
    return -_lrc_coeff(f, t) * np.maximum(R - _as_r(r), 0.0)


def _lrc_slope(f, r, t):
    _, R, *_ = _ctx(f)
    r = _as_r(r)
    return np.where(r < R, _lrc_coeff(f, t), 0.0)


def _lrc_tslope(f, r, t):
    _, R, L, lo_slope, _, _ = _ctx(f)
    g = f.params["decay_rate"]
    r = _as_r(r)
    moving = L * math.exp(-g * t)
    if moving <= lo_slope:  # detached from the lower obstacle
        return np.where(r < R, g * moving * (R - r), 0.0)
    return np.zeros_like(r)


def _lrc_kinks(f, t):
    return []  # apex aside, the only corner sits at r = R on both obstacles


# --- upper flattening tip ---------------------------------------------------


def _ft_tip_radius(f) -> float:
    return f.flow.critical_radius - f.params["margin"]


def _ft_validate(f) -> list[str]:
    lam, R, L, _, A, N = _ctx(f)
    rc = f.flow.critical_radius
    eps = f.params["margin"]
    v: list[str] = []
    if not (0 < eps < rc):
        v.append(f"margin must lie in (0, critical radius {rc}), got {eps}")
        return v
    rho = rc - eps
    if rho > R:
        v.append(
            f"flat-tip radius {rho} = critical_radius - margin exceeds the support radius {R}"
        )
        return v
    hi = (A / (N - 1)) * ((N - 1) / rho - A)
    bad = _rate_violation("decay_rate", f.params["decay_rate"], hi)
    if bad:
        v.append(bad)
    return v


def _ft_eval(f, r, t):
    lam, R, *_ = _ctx(f)
    rho = _ft_tip_radius(f)
    r = _as_r(r)
    inner = lam * math.exp(-f.params["decay_rate"] * t) * (rho - r) + lam * (R - rho)
    return np.where(r <= rho, inner, psi_plus(r, lam, R))


def _ft_slope(f, r, t):
    lam, R, *_ = _ctx(f)
    rho = _ft_tip_radius(f)
    r = _as_r(r)
    inner = -lam * math.exp(-f.params["decay_rate"] * t)
    return np.where(r <= rho, inner, np.where(r < R, -lam, 0.0))


def _ft_tslope(f, r, t):
    lam, *_ = _ctx(f)
    mu = f.params["decay_rate"]
    rho = _ft_tip_radius(f)
    r = _as_r(r)
    return np.where(r <= rho, -mu * lam * math.exp(-mu * t) * (rho - r), 0.0)


def _ft_kinks(f, t):
    lam, R, *_ = _ctx(f)
    rho = _ft_tip_radius(f)
    a = -lam * math.exp(-f.params["decay_rate"] * t)
    b = -lam
    if a - b <= _SLOPE_TIE * lam:
        return []
    return [KinkDescriptor(rho, a, b, Mode.SUB, value=lam * (R - rho))]


# --- upper settling plateau -------------------------------------------------


def _sp_corner(f) -> float:
    _, _, L, *_ = _ctx(f)
    return f.flow.critical_radius - f.params["margin"] / L


def _sp_validate(f) -> list[str]:
    lam, R, L, _, A, N = _ctx(f)
    eps, B = f.params["margin"], f.params["plateau"]
    v: list[str] = []
    if not (eps > 0):
        v.append(f"margin must be > 0, got {eps}")
    if B < 0:
        v.append(f"plateau must be >= 0, got {B}")
    if v:
        return v
    r1 = _sp_corner(f)
    if not (r1 > 0):
        v.append(
            f"margin {eps} too large: corner radius critical_radius - margin/lipschitz = {r1} <= 0"
        )
        return v
    if B + eps > lam * (R - r1):
        v.append(
            f"raised plateau {B + eps} pokes above the obstacle cone at its corner "
            f"radius {r1} (cap there is {lam * (R - r1)})"
        )
    if B + eps + L * r1 > lam * R:
        v.append(
            f"raised plateau's center value {B + eps + L * r1} exceeds the obstacle "
            f"peak {lam * R}"
        )
    hi = (A / (N - 1)) * ((N - 1) / r1 - A)
    bad = _rate_violation("decay_rate", f.params["decay_rate"], hi)
    if bad:
        v.append(bad)
    return v


def _sp_eval(f, r, t):
    lam, R, L, *_ = _ctx(f)
    eps, B = f.params["margin"], f.params["plateau"]
    r1 = _sp_corner(f)
    r = _as_r(r)
    inner = L * math.exp(-f.params["decay_rate"] * t) * (r1 - r) + B + eps
    return np.where(r <= r1, inner, np.minimum(B + eps, psi_plus(r, lam, R)))


def _sp_slope(f, r, t):
    lam, R, L, *_ = _ctx(f)
    eps, B = f.params["margin"], f.params["plateau"]
    r1 = _sp_corner(f)
    r2 = R - (B + eps) / lam  # where the flat cap meets the cone
    r = _as_r(r)
    return np.where(
        r <= r1,
        -L * math.exp(-f.params["decay_rate"] * t),
        np.where(r < r2, 0.0, np.where(r < R, -lam, 0.0)),
    )


def _sp_tslope(f, r, t):
    _, _, L, *_ = _ctx(f)
    nu = f.params["decay_rate"]
    r1 = _sp_corner(f)
    r = _as_r(r)
    return np.where(r <= r1, -nu * L * math.exp(-nu * t) * (r1 - r), 0.0)


def _sp_kinks(f, t):
    lam, R, L, *_ = _ctx(f)
    eps, B = f.params["margin"], f.params["plateau"]
    r1 = _sp_corner(f)
    r2 = R - (B + eps) / lam
    kinks = []
    a = -L * math.exp(-f.params["decay_rate"] * t)
    b = 0.0 if r1 < r2 else -lam
    if abs(a - b) > _SLOPE_TIE * L:
        mode = Mode.SUB if a > b else Mode.SUPER
        kinks.append(KinkDescriptor(r1, a, b, mode, value=B + eps))
    if r1 < r2 < R:
        kinks.append(KinkDescriptor(r2, 0.0, -lam, Mode.SUB, value=B + eps))
    return kinks


# --- lower climbing plateau -------------------------------------------------


def _lcp_validate(f) -> list[str]:
    lam, R, L, lo_slope, A, N = _ctx(f)
    rc = f.flow.critical_radius
    nu_in, nu_sk = f.params["inner_decay_rate"], f.params["skirt_decay_rate"]
    r0, B = f.params["plateau_radius"], f.params["plateau"]
    v: list[str] = []
    if not (rc <= r0 <= R):
        v.append(f"plateau_radius {r0} outside [critical radius {rc}, support radius {R}]")
    if B < 0:
        v.append(f"plateau must be >= 0, got {B}")
    elif rc <= r0 <= R and B > lam * (R - r0):
        v.append(f"plateau {B} above the obstacle cone value {lam * (R - r0)} at radius {r0}")
    if r0 > 0:
        hi_in = (N - 1 + A * r0) / (r0 * r0)
        bad = _rate_violation("inner_decay_rate", nu_in, hi_in)
        if bad:
            v.append(bad)
    hi_sk = ((N - 1) / R + A) / R
    bad = _rate_violation("skirt_decay_rate", nu_sk, hi_sk)
    if bad:
        v.append(bad)
    return v


def _lcp_branches(f, t: float):
    """Coefficients of the active linear branches (see kink discussion)."""
    lam, R, L, lo_slope, _, _ = _ctx(f)
    r0, B = f.params["plateau_radius"], f.params["plateau"]
    a_in = L * math.exp(-f.params["inner_decay_rate"] * t)  # rising inner slope
    k_sk = min(L * math.exp(-f.params["skirt_decay_rate"] * t), lo_slope)  # skirt slope
    return r0, B, a_in, k_sk, lo_slope, L, R


def _lcp_eval(f, r, t):
    r0, B, a_in, k_sk, lo_slope, L, R = _lcp_branches(f, t)
    r = _as_r(r)
    inner = np.maximum(-a_in * (r0 - r) + B, -lo_slope * (R - r))
    outer = np.maximum(L * (r0 - r) + B, k_sk * (r - R))
    return np.where(r <= r0, inner, np.where(r <= R, outer, 0.0))


def _lcp_slope(f, r, t):
    r0, B, a_in, k_sk, lo_slope, L, R = _lcp_branches(f, t)
    r = _as_r(r)
    inner_active = -a_in * (r0 - r) + B >= -lo_slope * (R - r)
    outer_active = L * (r0 - r) + B >= k_sk * (r - R)
    return np.where(
        r <= r0,
        np.where(inner_active, a_in, lo_slope),
        np.where(r <= R, np.where(outer_active, -L, k_sk), 0.0),
    )


def _lcp_tslope(f, r, t):
    r0, B, a_in, k_sk, lo_slope, L, R = _lcp_branches(f, t)
    nu_in, nu_sk = f.params["inner_decay_rate"], f.params["skirt_decay_rate"]
    r = _as_r(r)
    inner_active = -a_in * (r0 - r) + B >= -lo_slope * (R - r)
    outer_active = L * (r0 - r) + B >= k_sk * (r - R)
    skirt_moving = L * math.exp(-nu_sk * t) <= lo_slope
    skirt_rate = nu_sk * k_sk * (R - r) if skirt_moving else np.zeros_like(r)
    return np.where(
        r <= r0,
        np.where(inner_active, nu_in * a_in * (r0 - r), 0.0),
        np.where(r <= R, np.where(outer_active, 0.0, skirt_rate), 0.0),
    )


def _lcp_kinks(f, t):
    r0, B, a_in, k_sk, lo_slope, L, R = _lcp_branches(f, t)
    nu_in, nu_sk = f.params["inner_decay_rate"], f.params["skirt_decay_rate"]
    kinks = [KinkDescriptor(r0, a_in, -L, Mode.SUB, value=B)]

    # inner segment: rising cone may cross the lower obstacle (convex corner)
    if abs(a_in - lo_slope) > _SLOPE_TIE:
        ry = (a_in * r0 - B - lo_slope * R) / (a_in - lo_slope)
        if 0.0 < ry < r0:
            vy = -lo_slope * (R - ry)
            vel = -nu_in * a_in * (B + lo_slope * (R - r0)) / (a_in - lo_slope) ** 2
            lo_s, hi_s = sorted((a_in, lo_slope))
            kinks.append(KinkDescriptor(ry, lo_s, hi_s, Mode.SUPER, value=vy, velocity=vel))

    # outer segment: descending wedge meets the rising skirt (convex corner)
    rx = (L * r0 + B + k_sk * R) / (L + k_sk)
    if r0 < rx < R:
        vx = k_sk * (rx - R)
        moving = L * math.exp(-nu_sk * t) <= lo_slope
        vel = -nu_sk * k_sk * (L * (R - r0) - B) / (L + k_sk) ** 2 if moving else 0.0
        kinks.append(KinkDescriptor(rx, -L, k_sk, Mode.SUPER, value=vx, velocity=vel))
    return kinks


# --- limit plateau wedge ----------------------------------------------------


def _pw_validate(f) -> list[str]:
    lam, R, L, _, A, N = _ctx(f)
    rc = f.flow.critical_radius
    r0, B = f.params["plateau_radius"], f.params["plateau"]
    v: list[str] = []
    if not (rc <= r0 <= R):
        v.append(f"plateau_radius {r0} outside [critical radius {rc}, support radius {R}]")
    if B < 0:
        v.append(f"plateau must be >= 0, got {B}")
    elif rc <= r0 <= R and B > lam * (R - r0):
        v.append(f"plateau {B} above the obstacle cone value {lam * (R - r0)} at radius {r0}")
    return v


def _pw_eval(f, r, t):
    _, _, L, *_ = _ctx(f)
    r0, B = f.params["plateau_radius"], f.params["plateau"]
    r = _as_r(r)
    return np.minimum(B, np.maximum(L * (r0 - r) + B, 0.0))


def _pw_slope(f, r, t):
    _, _, L, *_ = _ctx(f)
    r0, B = f.params["plateau_radius"], f.params["plateau"]
    r = _as_r(r)
    return np.where((r > r0) & (r < r0 + B / L), -L, 0.0)


def _pw_tslope(f, r, t):
    return np.zeros_like(_as_r(r))


def _pw_kinks(f, t):
    _, R, L, *_ = _ctx(f)
    r0, B = f.params["plateau_radius"], f.params["plateau"]
    if B <= 0:
        return []
    kinks = [KinkDescriptor(r0, 0.0, -L, Mode.SUB, value=B)]
    edge = r0 + B / L
    if edge < R:
        kinks.append(KinkDescriptor(edge, -L, 0.0, Mode.SUPER, value=0.0))
    return kinks


# --- fixed moving-interface example ----------------------------------------


def _bse_validate(f) -> list[str]:
    v: list[str] = []
    if f.flow.driving_force != 1.0 or f.flow.dimension != 2:
        v.append(
            "the moving-interface example is defined for driving_force=1, dimension=2, "
            f"got driving_force={f.flow.driving_force}, dimension={f.flow.dimension}"
        )
    if f.obstacles is not None:
        v.append("the moving-interface example runs without obstacles (values pinned outside radius 2)")
    if f.params:
        v.append(f"the moving-interface example takes no parameters, got {sorted(f.params)}")
    return v


def _bse_edge(t: float) -> float:
    return 2.0 - 0.5 * math.exp(-t / 6.0)


def _bse_eval(f, r, t):
    r = _as_r(r)
    edge = _bse_edge(t)
    steep = 2.0 * math.exp(t / 6.0) * (2.0 - r)
    return np.where(r <= edge, 1.0, np.where(r <= 2.0, steep, 0.0))


def _bse_slope(f, r, t):
    r = _as_r(r)
    edge = _bse_edge(t)
    return np.where((r > edge) & (r < 2.0), -2.0 * math.exp(t / 6.0), 0.0)


def _bse_tslope(f, r, t):
    r = _as_r(r)
    edge = _bse_edge(t)
    rate = math.exp(t / 6.0) / 3.0 * (2.0 - r)
    return np.where((r > edge) & (r < 2.0), rate, 0.0)


def _bse_kinks(f, t):
    edge = _bse_edge(t)
    return [
        KinkDescriptor(
            edge,
            0.0,
            -2.0 * math.exp(t / 6.0),
            Mode.SUB,
            value=1.0,
            velocity=math.exp(-t / 6.0) / 12.0,
        )
    ]


# --- dispatch ---------------------------------------------------------------

_IMPL: dict[CandidateTag, tuple] = {
    CandidateTag.STATIONARY_CAPPED_CONE: (_cc_validate, _cc_eval, _cc_slope, _cc_tslope, _cc_kinks),
    CandidateTag.LOWER_RISING_CONE: (_lrc_validate, _lrc_eval, _lrc_slope, _lrc_tslope, _lrc_kinks),
    CandidateTag.UPPER_FLATTENING_TIP: (_ft_validate, _ft_eval, _ft_slope, _ft_tslope, _ft_kinks),
    CandidateTag.UPPER_SETTLING_PLATEAU: (_sp_validate, _sp_eval, _sp_slope, _sp_tslope, _sp_kinks),
    CandidateTag.LOWER_CLIMBING_PLATEAU: (_lcp_validate, _lcp_eval, _lcp_slope, _lcp_tslope, _lcp_kinks),
    CandidateTag.LIMIT_PLATEAU_WEDGE: (_pw_validate, _pw_eval, _pw_slope, _pw_tslope, _pw_kinks),
    CandidateTag.BOUNDARY_STEEPENING_EXAMPLE: (_bse_validate, _bse_eval, _bse_slope, _bse_tslope, _bse_kinks),
}


def validate_params(family: CandidateFamily) -> list[str]:
    """All violated admissibility conditions (empty list means valid).

    Beyond the per-family bounds this also checks that obstacle data is
    present (or absent) as the family requires.
    """
    needs_obstacles = family.tag is not CandidateTag.BOUNDARY_STEEPENING_EXAMPLE
    if needs_obstacles and family.obstacles is None:
        return [f"{family.tag.value} needs obstacle data"]
    return _IMPL[family.tag][0](family)


def evaluate(family: CandidateFamily, r, t: float) -> np.ndarray:
    """Profile value phi(r, t); vectorized over r."""
    return _IMPL[family.tag][1](family, r, float(t))


def radial_slope(family: CandidateFamily, r, t: float) -> np.ndarray:
    """d(phi)/dr on the smooth pieces; one-sided at piece boundaries,
    meaningless exactly at a kink."""
    return _IMPL[family.tag][2](family, r, float(t))


def time_slope(family: CandidateFamily, r, t: float) -> np.ndarray:
    """d(phi)/dt away from kinks (at obstacle-contact switches: the branch
    taking over)."""
    return _IMPL[family.tag][3](family, r, float(t))


def kink_set(family: CandidateFamily, t: float) -> list[KinkDescriptor]:
    """Interior corners at time t, sorted by radius.

    Corners where the profile touches both obstacles at once (e.g. the
    support edge when the lower obstacle is the reflected cone) carry no
    admissible test point and are omitted; the cone apex at r=0 likewise.
    """
    kinks = _IMPL[family.tag][4](family, float(t))
    if family.obstacles is not None:
        kept = []
        for k in kinks:
            lo = float(family.obstacles.lower(k.radius))
            hi = float(family.obstacles.upper(k.radius))
            both = k.value >= hi - 1e-12 and k.value <= lo + 1e-12
            if not both:
                kept.append(k)
        kinks = kept
    return sorted(kinks, key=lambda k: k.radius)


def decay_rate_bounds(family: CandidateFamily) -> dict[str, float]:
    """Upper endpoints of the open admissibility intervals for each decay-rate
    parameter of this family (empty for rate-free families)."""
    tag = family.tag
    if tag is CandidateTag.LOWER_RISING_CONE:
        lam, R, L, _, A, N = _ctx(family)
        return {"decay_rate": ((N - 1) / R + A) / R}
    if tag is CandidateTag.UPPER_FLATTENING_TIP:
        _, _, _, _, A, N = _ctx(family)
        rho = _ft_tip_radius(family)
        return {"decay_rate": (A / (N - 1)) * ((N - 1) / rho - A)}
    if tag is CandidateTag.UPPER_SETTLING_PLATEAU:
        _, _, _, _, A, N = _ctx(family)
        r1 = _sp_corner(family)
        return {"decay_rate": (A / (N - 1)) * ((N - 1) / r1 - A)}
    if tag is CandidateTag.LOWER_CLIMBING_PLATEAU:
        lam, R, L, _, A, N = _ctx(family)
        r0 = family.params["plateau_radius"]
        return {
            "inner_decay_rate": (N - 1 + A * r0) / (r0 * r0),
            "skirt_decay_rate": ((N - 1) / R + A) / R,
        }
    return {}


def with_rate(family: CandidateFamily, name: str, value: float) -> CandidateFamily:
    """Copy of `family` with one named parameter replaced."""
    if name not in family.params:
        raise UsageError(f"{family.tag.value} has no parameter {name!r}")
    params = dict(family.params)
    params[name] = value
    return replace(family, params=params)
