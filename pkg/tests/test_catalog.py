"""The shipped scenario catalog: every entry parses, the suites resolve, the
hypothesis gate names what it refuses, and expectations materialize."""

import dataclasses

import numpy as np
import pytest

from obstaclemcf.catalog import (
    SUITES,
    Scenario,
    catalog,
    expected_outcome,
    gate_hypotheses,
    initial_profile,
    scenario,
)
from obstaclemcf.config import EvolveConfig, VerifyConfig
from obstaclemcf.errors import ParameterError, UsageError


class TestCatalogLoads:
    def test_all_sixteen_scenarios_parse(self):
        entries = catalog()
        assert len(entries) == 16
        for name, scn in entries.items():
            assert scn.name == name
            assert scn.kind in ("limit", "stationary", "growth", "verify", "exploratory")
            assert scn.claim

    def test_kinds_match_config_types(self):
        for scn in catalog().values():
            if scn.kind == "verify":
                assert isinstance(scn.config, VerifyConfig)
            else:
                assert isinstance(scn.config, EvolveConfig)

    def test_suites_reference_only_real_scenarios(self):
        names = set(catalog())
        for members in SUITES.values():
            assert set(members) <= names

    def test_every_candidate_family_appears_in_the_verify_suite(self):
        members = [scenario(n).config.candidate for n in SUITES["candidates-all"]]
        assert len(members) == 7 and len(set(members)) == 7

    def test_unknown_names_list_the_catalog(self):
        with pytest.raises(UsageError) as exc:
            scenario("thm13-case9")
        assert "known:" in str(exc.value)


class TestInitialProfiles:
    def test_named_profiles_evaluate_on_arrays(self):
        cfg = scenario("thm13-case2").config
        r = np.linspace(0.0, cfg.radial_extent, 7)
        values = initial_profile(cfg)(r)
        assert values.shape == r.shape and np.all(np.isfinite(values))

    def test_non_radial_forms_are_refused(self):
        cfg = dataclasses.replace(
            scenario("merging-fronts").config, initial="two-bumps"
        )
        with pytest.raises(UsageError):
            initial_profile(cfg)


class TestHypothesisGate:
    def test_shipped_scenarios_all_pass_their_gates(self):
        for scn in catalog().values():
            assert gate_hypotheses(scn) == []

    def test_limit_claim_requires_reflected_cones(self):
        scn = scenario("thm13-case2")
        broken = Scenario(
            scn.name, scn.kind, scn.claim,
            dataclasses.replace(scn.config, lower_scale=2.0),
        )
        gate = gate_hypotheses(broken)
        assert any("lower_scale" in g for g in gate)
        with pytest.raises(ParameterError):
            expected_outcome(broken)

    def test_growth_runs_must_not_stop_early(self):
        scn = scenario("appendix-blowup")
        broken = Scenario(
            scn.name, scn.kind, scn.claim,
            dataclasses.replace(scn.config, steady_tol=1e-6),
        )
        assert any("steady_tol" in g for g in gate_hypotheses(broken))

    def test_stationary_gate_revalidates_the_cap(self):
        scn = scenario("stationary-c10")
        # push the cap past the admissible level: slope * (R - rc) = 1.5
        broken = Scenario(
            scn.name, scn.kind, scn.claim,
            dataclasses.replace(scn.config, initial="capped-cone:1.6"),
        )
        assert gate_hypotheses(broken)


class TestExpectedOutcomes:
    def test_limit_expectation_is_a_profile_on_the_run_grid(self):
        scn = scenario("thm13-case2")
        exp = expected_outcome(scn)
        assert exp.kind == "limit" and exp.profile is not None
        assert exp.profile.grid.cells == scn.config.radial_cells

    def test_subcritical_limit_is_identically_zero(self):
        exp = expected_outcome(scenario("thm13-case1"))
        np.testing.assert_array_equal(exp.profile.values, 0.0)

    def test_stationary_expectation_equals_the_initial_cone(self):
        scn = scenario("stationary-c05")
        exp = expected_outcome(scn)
        r = exp.profile.grid.nodes
        np.testing.assert_array_equal(exp.profile.values, initial_profile(scn.config)(r))

    def test_growth_and_verify_expectations_carry_no_profile(self):
        assert expected_outcome(scenario("appendix-blowup")).profile is None
        assert expected_outcome(scenario("candidate-rising-cone")).profile is None
