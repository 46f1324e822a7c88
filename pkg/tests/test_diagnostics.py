"""Trajectory measurement oracles: Lyapunov values on fields we can integrate
by hand, sup/time-Lipschitz bookkeeping, the boundary difference quotient, and
the skip/pass taxonomy of the radial monotonicity audit."""

import math

import numpy as np
import pytest

from obstaclemcf.diagnostics import (
    boundary_quotient,
    lyapunov,
    monotonicity_report,
    second_difference_sup,
    sup_distance,
    time_lipschitz,
)
from obstaclemcf.errors import GridMismatchError, ParameterError, UsageError
from obstaclemcf.geometry import BoxGrid, Field, FlowParams, ObstacleSpec, RadialGrid
from obstaclemcf.trajectory import RADIAL_COLUMNS, DiagnosticSeries, Trajectory

# h = 4/16 = 0.25 exactly, so trapezoid sums below are exact dyadic arithmetic
GRID = BoxGrid(half_width=2.0, nodes_per_axis=17)


class TestLyapunov:
    def test_constant_sheet_balances_exactly(self):
        # density integral: 0.5 * (2W)^2 = 8; volume term: 2.0 * 0.25 * 16 = 8
        u = Field(GRID, np.full(GRID.shape, 0.25))
        assert lyapunov(u, epsilon=0.5, driving_force=2.0) == 0.0

    def test_plane_has_constant_density_and_no_volume(self):
        # |Du| = 0.75 everywhere (one-sided edges included); the volume term
        # cancels by symmetry of the axis about 0
        x = GRID.axis
        u = Field(GRID, np.broadcast_to(0.75 * x[:, None], GRID.shape).copy())
        want = 16.0 * math.sqrt(0.5**2 + 0.75**2)
        assert lyapunov(u, epsilon=0.5, driving_force=2.0) == pytest.approx(want, rel=1e-13)

    def test_rejects_nonpositive_epsilon(self):
        u = Field(GRID, np.zeros(GRID.shape))
        with pytest.raises(ParameterError):
            lyapunov(u, epsilon=0.0, driving_force=1.0)

    def test_rejects_radial_fields(self):
        g = RadialGrid(2.0, 8)
        u = Field(g, np.zeros(g.cells + 1))
        with pytest.raises(UsageError):
            lyapunov(u, epsilon=0.5, driving_force=1.0)


class TestSupDistance:
    def test_reports_largest_pointwise_gap(self):
        a = np.zeros(GRID.shape)
        b = a.copy()
        b[5, 11] = -0.375
        assert sup_distance(Field(GRID, a), Field(GRID, b)) == 0.375

    def test_refuses_mismatched_grids(self):
        other = BoxGrid(half_width=2.0, nodes_per_axis=33)
        with pytest.raises(GridMismatchError):
            sup_distance(Field(GRID, np.zeros(GRID.shape)), Field(other, np.zeros(other.shape)))


def _radial_traj(columns_of_values, times, steps_per_snapshot=1):
    grid = RadialGrid(2.0, 8)
    fields = [Field(grid, np.asarray(v, dtype=float)) for v in columns_of_values]
    return Trajectory(
        fields=fields,
        times=list(times),
        dt=times[1] - times[0] if len(times) > 1 else 0.1,
        steps_per_snapshot=steps_per_snapshot,
        diagnostics=DiagnosticSeries(RADIAL_COLUMNS),
    )


class TestTimeLipschitz:
    def test_worst_pair_wins(self):
        base = np.zeros(9)
        bump = base.copy()
        bump[4] = 0.3
        flat = base.copy()
        flat[4] = 0.32
        # pairs: (0, 0.5): 0.6   (0, 1.5): ~0.213   (0.5, 1.5): 0.02
        traj = _radial_traj([base, bump, flat], [0.0, 0.5, 1.5])
        assert time_lipschitz(traj) == pytest.approx(0.6)

    def test_needs_two_snapshots(self):
        with pytest.raises(UsageError):
            time_lipschitz(_radial_traj([np.zeros(9)], [0.0]))


class TestSecondDifferenceSup:
    def test_radial_parabola_curvature_is_exact(self):
        g = RadialGrid(2.0, 8)
        u = Field(g, g.nodes ** 2)
        assert second_difference_sup(u) == 2.0

    def test_box_paraboloid_curvature_is_exact(self):
        x = GRID.axis
        u = Field(GRID, x[:, None] ** 2 + x[None, :] ** 2)
        assert second_difference_sup(u) == 2.0

    def test_short_radial_field_has_no_interior(self):
        g = RadialGrid(1.0, 1)
        u = Field(g, np.array([0.0, 1.0]))
        assert second_difference_sup(u) == 0.0


class TestBoundaryQuotient:
    def test_reads_free_nodes_next_to_the_pinned_ring(self):
        values = np.zeros((5, 5))
        pinned = np.zeros((5, 5), dtype=bool)
        pinned[0, :] = pinned[-1, :] = pinned[:, 0] = pinned[:, -1] = True
        values[1, 2] = 0.35   # adjacent to the pinned row
        values[2, 2] = 9.0    # interior-interior: must not count
        assert boundary_quotient(values, pinned, h=0.1) == pytest.approx(3.5)

    def test_no_pinned_neighbours_is_a_usage_error(self):
        with pytest.raises(UsageError):
            boundary_quotient(np.zeros((4, 4)), np.zeros((4, 4), dtype=bool), h=0.1)


class TestMonotonicityReport:
    FLOW = FlowParams(driving_force=2.0, dimension=2)  # critical radius 0.5
    OBS = ObstacleSpec(support_radius=2.0, cone_slope=1.0, lipschitz=1.0)

    def _report(self, radii, values_at_node):
        """Three snapshots; node values given per snapshot as full arrays."""
        traj = _radial_traj(values_at_node, [0.0, 1.0, 2.0])
        return monotonicity_report(traj, radii, self.FLOW, self.OBS)

    def test_detached_rise_passes_and_obstacle_contact_is_ignored(self):
        # node i=3 is r=0.75: 0.1 -> 0.5 -> 1.25 (hits the upper obstacle);
        # the last pair starts strictly inside so both pairs count
        vals = []
        for a in (0.1, 0.5, 1.25):
            v = np.zeros(9)
            v[3] = a
            vals.append(v)
        (entry,) = self._report([0.75], vals)
        assert entry.checked and entry.passed
        assert entry.worst_increment == 0.0

    def test_decrease_while_detached_fails(self):
        vals = []
        for a in (0.1, -0.2, -0.2):
            v = np.zeros(9)
            v[5] = a
            vals.append(v)
        (entry,) = self._report([1.25], vals)
        assert entry.checked and not entry.passed
        assert entry.worst_increment == pytest.approx(-0.3)

    def test_decrease_after_touching_the_obstacle_does_not_count(self):
        # start of the falling pair sits exactly on the upper obstacle, which
        # the one-sided motion law says nothing about
        vals = []
        for a in (0.5, 1.25, 1.0):
            v = np.zeros(9)
            v[3] = a
            vals.append(v)
        (entry,) = self._report([0.75], vals)
        assert entry.checked and entry.passed

    def test_radii_below_critical_are_skipped_not_failed(self):
        vals = [np.zeros(9) for _ in range(3)]
        vals[1][1] = -1.0  # a decrease at r=0.25, inside the critical radius
        (entry,) = self._report([0.25], vals)
        assert not entry.checked and entry.passed
        assert "critical radius" in entry.note

    def test_off_node_radii_are_skipped_with_a_note(self):
        (entry,) = self._report([0.8], [np.zeros(9)] * 3)
        assert not entry.checked and entry.passed
        assert "not a grid node" in entry.note

    def test_box_trajectories_are_refused(self):
        traj = Trajectory(
            fields=[Field(GRID, np.zeros(GRID.shape))] * 2,
            times=[0.0, 1.0],
            dt=1.0,
            steps_per_snapshot=1,
            diagnostics=DiagnosticSeries(RADIAL_COLUMNS),
        )
        with pytest.raises(UsageError):
            monotonicity_report(traj, [0.75], self.FLOW, self.OBS)


class TestDiagnosticSeries:
    def test_missing_columns_become_nan_and_order_is_enforced(self):
        s = DiagnosticSeries(("t", "lipschitz"))
        s.append(t=0.0, lipschitz=1.0)
        s.append(t=0.5)
        assert math.isnan(s.column("lipschitz")[1])
        with pytest.raises(UsageError):
            s.append(t=0.5, lipschitz=1.0)

    def test_round_trips_through_its_file_format(self, tmp_path):
        s = DiagnosticSeries(("t", "lyapunov"))
        s.append(t=0.0, lyapunov=1.25)
        s.append(t=1.0, lyapunov=-0.5)
        path = tmp_path / "series.dat"
        s.write(path)
        header, *rows = path.read_text().splitlines()
        assert header == "# t lyapunov"
        parsed = np.array([[float(x) for x in r.split()] for r in rows])
        np.testing.assert_array_equal(parsed[:, 1], [1.25, -0.5])


class TestSnapshotSelection:
    def test_cap_keeps_first_and_last(self):
        traj = _radial_traj([np.zeros(9)] * 6, [0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
        picks = traj.snapshot_indices(3)
        assert picks[0] == 0 and picks[-1] == 5 and len(picks) == 3

    def test_cap_of_one_is_refused(self):
        traj = _radial_traj([np.zeros(9)] * 3, [0.0, 1.0, 2.0])
        with pytest.raises(UsageError):
            traj.snapshot_indices(1)

    def test_no_cap_keeps_everything(self):
        traj = _radial_traj([np.zeros(9)] * 4, [0.0, 1.0, 2.0, 3.0])
        assert traj.snapshot_indices(None) == [0, 1, 2, 3]
