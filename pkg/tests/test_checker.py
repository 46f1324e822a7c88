"""The verifier must (a) accept every canonical profile, (b) refuse invalid
parameters before sampling, and (c) genuinely detect sign changes -- the last
point exercised at the sharp thresholds, not just the sufficient bounds."""

import math

import numpy as np
import pytest

from obstaclemcf.candidates import (
    Mode,
    boundary_steepening_example,
    kink_set,
    limit_plateau_wedge,
    lower_climbing_plateau,
    lower_rising_cone,
    stationary_capped_cone,
    upper_flattening_tip,
    upper_settling_plateau,
    with_rate,
)
from obstaclemcf.checker import (
    SamplingSpec,
    check_kink,
    residual_smooth,
    verify_candidate,
)
from obstaclemcf.errors import UsageError
from obstaclemcf.geometry import FlowParams, ObstacleSpec

FLOW = FlowParams(driving_force=2.0, dimension=2)
OBS = ObstacleSpec(support_radius=2.0, cone_slope=1.0, lipschitz=1.0)
FAST = SamplingSpec(radial_points=800, time_points=8, horizon=5.0)


class TestSmoothResidual:
    def test_capped_cone_oracle_values(self):
        # residual = phi_t - (N-1) phi_r / r - A |phi_r|;
        # on the cone flank phi_r = -1: residual = (N-1)/r - A
        fam = stationary_capped_cone(FLOW, OBS, level=1.0)
        assert residual_smooth(fam, 2.0 - 1e-9, 0.0) == pytest.approx(-1.5, abs=1e-6)
        assert residual_smooth(fam, 1.5, 0.0) == pytest.approx(1 / 1.5 - 2.0)
        # on the plateau everything vanishes
        assert residual_smooth(fam, 0.25, 3.0) == pytest.approx(0.0, abs=1e-15)

    def test_cone_flank_residual_is_negative_up_to_critical_radius(self):
        fam = stationary_capped_cone(FLOW, OBS, level=1.5)
        r = np.linspace(0.55, 1.99, 200)  # flank starts at the corner 0.5
        res = residual_smooth(fam, r, 1.0)
        assert np.all(res <= 0.0)

    def test_kink_radius_is_refused(self):
        fam = stationary_capped_cone(FLOW, OBS, level=1.0)
        with pytest.raises(UsageError):
            residual_smooth(fam, 1.0, 0.0)  # exactly the plateau corner


class TestSharpThresholds:
    """The sufficient rate intervals are not sharp; the sampler must stay
    quiet inside the sharp region and flag a genuine sign flip outside it."""

    FLOW1 = FlowParams(driving_force=1.0, dimension=2)
    GAMMA_STAR = (2.0 + math.sqrt(3.0)) / 2.0  # root of 2g - 2 sqrt(g) - 1

    def _rising(self, rate):
        return lower_rising_cone(self.FLOW1, OBS, decay_rate=rate)

    def test_residual_quiet_below_sharp_rate(self):
        r = np.linspace(1e-3, 2.0 - 1e-6, 4000)
        res = residual_smooth(self._rising(self.GAMMA_STAR - 0.07), r, 0.0)
        assert np.max(res) <= 1e-12

    def test_residual_flips_past_sharp_rate(self):
        r = np.linspace(1e-3, 2.0 - 1e-6, 4000)
        res = residual_smooth(self._rising(1.9), r, 0.0)
        worst = r[np.argmax(res)]
        assert np.max(res) > 0.0
        assert worst == pytest.approx(math.sqrt(1.0 / 1.9), abs=0.01)

    def test_capped_cone_kink_flips_past_level_cap(self):
        # the plateau corner must sit at or beyond the critical radius; the
        # level cap slope*(R - (N-1)/A) is sharp, so nudging past it produces
        # a real kink violation, not merely a validation refusal
        bad = stationary_capped_cone(FLOW, OBS, level=1.5 + 1e-3)
        (kink,) = kink_set(bad, 0.0)
        assert kink.radius < FLOW.critical_radius
        result = check_kink(bad, kink, t=0.0, mode=Mode.SUB)
        assert not result.passed


class TestVerifyCandidate:
    def test_capped_cone_passes_both_modes(self):
        fam = stationary_capped_cone(FLOW, OBS, level=1.0)
        for mode in (Mode.SUB, Mode.SUPER):
            report = verify_candidate(fam, mode, sampling=FAST)
            assert report.passed, report.to_text()
            assert report.samples_checked > 0

    def test_degenerate_level_zero_cone(self):
        fam = stationary_capped_cone(FLOW, OBS, level=0.0)
        for mode in (Mode.SUB, Mode.SUPER):
            assert verify_candidate(fam, mode, sampling=FAST).passed

    @pytest.mark.parametrize(
        "factory,mode",
        [
            (lambda: lower_rising_cone(FLOW, OBS, 0.5), Mode.SUB),
            (lambda: upper_flattening_tip(FLOW, OBS, 0.5, 0.1), Mode.SUPER),
            (lambda: upper_settling_plateau(FLOW, OBS, 0.5, 0.1, 1.0), Mode.SUPER),
            (
                lambda: lower_climbing_plateau(FLOW, OBS, 2.0, 0.5, 1.0, 1.0),
                Mode.SUB,
            ),
            (lambda: limit_plateau_wedge(FLOW, OBS, 1.0, 1.0), Mode.SUB),
            (boundary_steepening_example, Mode.SUB),
        ],
    )
    def test_canonical_families_pass(self, factory, mode):
        report = verify_candidate(factory(), mode, sampling=FAST)
        assert report.passed, report.to_text()

    def test_invalid_parameters_refused_before_sampling(self):
        fam = lower_rising_cone(FLOW, OBS, decay_rate=1.1 * 1.25)
        with pytest.raises(UsageError) as exc:
            verify_candidate(fam, Mode.SUB, sampling=FAST)
        assert "decay_rate" in str(exc.value)

    def test_one_sided_profile_fails_the_other_side(self):
        # the rising cone is a strict subsolution once detached, so measuring
        # it against the SUPER inequality must report genuine failures
        fam = lower_rising_cone(FLOW, OBS, decay_rate=0.5)
        report = verify_candidate(fam, Mode.SUPER, sampling=FAST)
        assert not report.passed
        assert report.failures

    def test_polished_extremum_matches_analytic(self):
        # the rising cone's interior residual max sits at r* = sqrt((N-1)/rate)
        # once r* < R; compare the sampler's polished location against it
        flow = FlowParams(driving_force=1.0, dimension=2)
        fam = lower_rising_cone(flow, OBS, decay_rate=0.7)
        report = verify_candidate(fam, Mode.SUB, sampling=FAST)
        assert report.passed
        r_star = math.sqrt(1.0 / 0.7)
        # the residual is quadratically flat at its max, so the polished
        # location is only sqrt(machine-eps) sharp; the value is far sharper
        assert report.worst_radius == pytest.approx(r_star, abs=1e-6)
        # residual = L e^{-rate t} [rate (R-r) - (N-1)/r - A]: negative, and
        # decaying toward zero, so the sweep's max sits at the horizon end
        assert report.worst_time == pytest.approx(FAST.horizon)
        analytic = math.exp(-0.7 * FAST.horizon) * (0.7 * (2.0 - r_star) - 1.0 / r_star - 1.0)
        assert report.worst_residual == pytest.approx(analytic, abs=1e-10)

    def test_report_text_shape(self):
        fam = stationary_capped_cone(FLOW, OBS, level=1.0)
        text = verify_candidate(fam, Mode.SUB, sampling=FAST).to_text()
        assert "verdict: PASS" in text
        assert "worst_residual:" in text


class TestKinkCheck:
    def test_contradictory_mode_is_a_usage_error(self):
        fam = stationary_capped_cone(FLOW, OBS, level=1.0)
        (kink,) = kink_set(fam, 0.0)  # concave corner: SUB territory
        with pytest.raises(UsageError):
            check_kink(fam, kink, t=0.0, mode=Mode.SUPER)

    def test_stationary_corner_passes(self):
        fam = stationary_capped_cone(FLOW, OBS, level=1.0)
        (kink,) = kink_set(fam, 0.0)
        result = check_kink(fam, kink, t=0.0, mode=Mode.SUB)
        assert result.passed
        assert result.worst <= 1e-12
