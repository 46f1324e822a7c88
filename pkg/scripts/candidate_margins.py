"""Margin study for the one-sided comparison profiles.

Each decay-rate parameter lives in an open interval (0, bound): the bound is
sufficient for the one-sided differential inequality, not sharp.  This
script sweeps every rate across its interval, runs the verifier at each
sample, and prints the worst residual margin -- how far the profile stays on
the correct side of the equation.  Margins should shrink toward zero as a
rate approaches its bound; samples past the bound are refused outright by
parameter validation.
"""

import numpy as np

from obstaclemcf.candidates import (
    applicable_modes,
    decay_rate_bounds,
    lower_climbing_plateau,
    lower_rising_cone,
    upper_flattening_tip,
    upper_settling_plateau,
    with_rate,
)
from obstaclemcf.checker import SamplingSpec, verify_candidate
from obstaclemcf.errors import UsageError
from obstaclemcf.geometry import FlowParams, ObstacleSpec

FLOW = FlowParams(driving_force=2.0, dimension=2)
OBSTACLES = ObstacleSpec(support_radius=2.0, cone_slope=1.0, lipschitz=1.0)
SAMPLING = SamplingSpec(radial_points=512, time_points=8, horizon=5.0)
FRACTIONS = np.linspace(0.15, 1.15, 11)  # last two samples step past the bound


def families():
    yield lower_rising_cone(FLOW, OBSTACLES, decay_rate=0.5)
    yield upper_flattening_tip(FLOW, OBSTACLES, decay_rate=0.5, margin=0.1)
    yield upper_settling_plateau(FLOW, OBSTACLES, decay_rate=0.5, margin=0.1, plateau=1.0)
    yield lower_climbing_plateau(
        FLOW, OBSTACLES,
        inner_decay_rate=2.0, skirt_decay_rate=0.5,
        plateau_radius=1.0, plateau=1.0,
    )


def sweep(family, rate_name: str, bound: float) -> None:
    mode = applicable_modes(family)[0]
    print(f"\n{family.tag.value} / {rate_name} (bound {bound:.6f}, mode {mode.value})")
    print(f"  {'rate':>10} {'rate/bound':>10} {'worst residual':>16}  status")
    for frac in FRACTIONS:
        probe = with_rate(family, rate_name, float(frac * bound))
        try:
            report = verify_candidate(probe, mode, sampling=SAMPLING)
        except UsageError as exc:
            print(f"  {frac * bound:>10.6f} {frac:>10.2f} {'-':>16}  rejected ({exc})")
            continue
        status = "ok" if report.passed else "RESIDUAL VIOLATION"
        print(f"  {frac * bound:>10.6f} {frac:>10.2f} {report.worst_residual:>16.6e}  {status}")


def main() -> None:
    print(f"# A={FLOW.driving_force}, N={FLOW.dimension}, R={OBSTACLES.support_radius}, "
          f"{SAMPLING.radial_points}x{SAMPLING.time_points} samples to t={SAMPLING.horizon}")
    for family in families():
        for rate_name, bound in decay_rate_bounds(family).items():
            sweep(family, rate_name, bound)


if __name__ == "__main__":
    main()
