import math

import numpy as np
import pytest

from obstaclemcf.candidates import (
    CandidateTag,
    Mode,
    applicable_modes,
    boundary_steepening_example,
    decay_rate_bounds,
    domain_radius,
    evaluate,
    kink_set,
    limit_plateau_wedge,
    lower_climbing_plateau,
    lower_rising_cone,
    stationary_capped_cone,
    time_slope,
    upper_flattening_tip,
    upper_settling_plateau,
    validate_params,
    radial_slope,
    with_rate,
)
from obstaclemcf.errors import UsageError
from obstaclemcf.geometry import FlowParams, ObstacleSpec

FLOW = FlowParams(driving_force=2.0, dimension=2)
OBS = ObstacleSpec(support_radius=2.0, cone_slope=1.0, lipschitz=1.0)


def canonical_families():
    return [
        stationary_capped_cone(FLOW, OBS, level=1.0),
        lower_rising_cone(FLOW, OBS, decay_rate=0.5),
        upper_flattening_tip(FLOW, OBS, decay_rate=0.5, margin=0.1),
        upper_settling_plateau(FLOW, OBS, decay_rate=0.5, margin=0.1, plateau=1.0),
        lower_climbing_plateau(
            FLOW, OBS, inner_decay_rate=2.0, skirt_decay_rate=0.5,
            plateau_radius=1.0, plateau=1.0,
        ),
        limit_plateau_wedge(FLOW, OBS, plateau=1.0, plateau_radius=1.0),
        boundary_steepening_example(),
    ]


def test_all_canonical_families_validate():
    for fam in canonical_families():
        assert validate_params(fam) == [], fam.tag


def test_applicable_modes():
    modes = {fam.tag: applicable_modes(fam) for fam in canonical_families()}
    assert modes[CandidateTag.STATIONARY_CAPPED_CONE] == (Mode.SUB, Mode.SUPER)
    assert modes[CandidateTag.LOWER_RISING_CONE] == (Mode.SUB,)
    assert modes[CandidateTag.UPPER_FLATTENING_TIP] == (Mode.SUPER,)
    assert modes[CandidateTag.UPPER_SETTLING_PLATEAU] == (Mode.SUPER,)
    assert modes[CandidateTag.LOWER_CLIMBING_PLATEAU] == (Mode.SUB,)
    assert modes[CandidateTag.LIMIT_PLATEAU_WEDGE] == (Mode.SUB,)
    assert modes[CandidateTag.BOUNDARY_STEEPENING_EXAMPLE] == (Mode.SUB,)


def test_rate_bounds_match_hand_formulas():
    # N=2, A=2, R=2: climbing-rim bound ((N-1)/R + A)/R = 1.25
    rc = lower_rising_cone(FLOW, OBS, decay_rate=0.5)
    assert decay_rate_bounds(rc) == {"decay_rate": pytest.approx(1.25)}

    # tip radius = critical radius - margin = 0.5 - 0.1 = 0.4,
    # bound = (A/(N-1)) ((N-1)/rho - A) = 2 (2.5 - 2) = 1
    ft = upper_flattening_tip(FLOW, OBS, decay_rate=0.5, margin=0.1)
    assert decay_rate_bounds(ft) == {"decay_rate": pytest.approx(1.0)}

    cp = lower_climbing_plateau(
        FLOW, OBS, inner_decay_rate=2.0, skirt_decay_rate=0.5,
        plateau_radius=1.0, plateau=1.0,
    )
    bounds = decay_rate_bounds(cp)
    assert bounds["inner_decay_rate"] == pytest.approx(3.0)  # (N-1 + A r0)/r0^2
    assert bounds["skirt_decay_rate"] == pytest.approx(1.25)

    # rate-free families expose no bounds
    assert decay_rate_bounds(stationary_capped_cone(FLOW, OBS, 1.0)) == {}
    assert decay_rate_bounds(boundary_steepening_example()) == {}


def test_validate_rejects_out_of_interval_rates():
    for fam in canonical_families():
        for name, bound in decay_rate_bounds(fam).items():
            bad = with_rate(fam, name, 1.1 * bound)
            violations = validate_params(bad)
            assert violations, (fam.tag, name)
            assert any(name in v for v in violations)


def test_capped_cone_level_cap_is_sharp():
    # stationarity needs the plateau corner at or outside the critical radius:
    # level <= slope*(R - (N-1)/A) = 1.5 here, inclusively.
    ok = stationary_capped_cone(FLOW, OBS, level=1.5)
    assert validate_params(ok) == []
    bad = stationary_capped_cone(FLOW, OBS, level=1.5 + 1e-6)
    assert validate_params(bad)


def test_steepening_example_is_rigid():
    fam = boundary_steepening_example()
    assert validate_params(fam) == []
    wrong_flow = fam.__class__(fam.tag, FLOW, None, {})
    assert validate_params(wrong_flow)
    with_obs = fam.__class__(fam.tag, fam.flow, OBS, {})
    assert validate_params(with_obs)


def test_with_rate_unknown_parameter():
    fam = lower_rising_cone(FLOW, OBS, decay_rate=0.5)
    with pytest.raises(UsageError):
        with_rate(fam, "no_such_rate", 1.0)


def test_capped_cone_shape():
    fam = stationary_capped_cone(FLOW, OBS, level=1.0)
    r = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 2.5])
    np.testing.assert_allclose(evaluate(fam, r, 0.0), [1.0, 1.0, 1.0, 0.5, 0.0, 0.0])
    np.testing.assert_allclose(evaluate(fam, r, 7.0), evaluate(fam, r, 0.0))  # stationary
    np.testing.assert_allclose(time_slope(fam, r, 1.0), 0.0)
    slopes = radial_slope(fam, np.array([0.5, 1.5]), 0.0)
    np.testing.assert_allclose(slopes, [0.0, -1.0])


def test_rising_cone_rises_to_zero():
    fam = lower_rising_cone(FLOW, OBS, decay_rate=0.5)
    r = np.array([0.0, 1.0, 2.0])
    v0 = evaluate(fam, r, 0.0)
    v3 = evaluate(fam, r, 3.0)
    assert np.all(v0 <= 0.0)
    np.testing.assert_allclose(v0[2], 0.0, atol=1e-15)
    assert np.all(v3 >= v0)  # decays toward zero from below
    np.testing.assert_allclose(v3, v0 * math.exp(-0.5 * 3.0))
    assert np.all(time_slope(fam, np.array([0.5, 1.5]), 1.0) >= 0.0)


def test_kink_sets():
    cone = stationary_capped_cone(FLOW, OBS, level=1.0)
    kinks = kink_set(cone, 0.0)
    # only the plateau corner at R - level/slope counts: the support-edge corner
    # sits on the obstacle, where the one-sided test is exempt by contact
    assert [k.radius for k in kinks] == [1.0]
    corner = kinks[0]
    assert corner.left_slope == pytest.approx(0.0)
    assert corner.right_slope == pytest.approx(-1.0)
    assert corner.mode is Mode.SUB  # concave corner
    assert corner.velocity == 0.0


def test_steepening_kink_moves():
    fam = boundary_steepening_example()
    kinks = kink_set(fam, 0.0)
    moving = [k for k in kinks if k.velocity != 0.0]
    assert len(moving) == 1
    k = moving[0]
    assert k.radius == pytest.approx(1.5)  # 2 - 0.5 e^0
    assert k.value == pytest.approx(1.0)
    assert k.velocity == pytest.approx(1.0 / 12.0)
    assert k.right_slope == pytest.approx(-2.0)
    # the wedge front keeps height 1 while the collar steepens
    later = [k for k in kink_set(fam, 6.0) if k.velocity != 0.0][0]
    assert later.radius == pytest.approx(2.0 - 0.5 / math.e)
    assert later.right_slope == pytest.approx(-2.0 * math.e)


def test_domain_radius():
    assert domain_radius(stationary_capped_cone(FLOW, OBS, 1.0)) == 2.0
    assert domain_radius(boundary_steepening_example()) == 2.0


def test_plateau_wedge_needs_wide_support():
    # the wedge exists only when the plateau fits between critical radius and R
    fam = limit_plateau_wedge(FLOW, OBS, plateau=10.0, plateau_radius=1.0)
    assert validate_params(fam)
