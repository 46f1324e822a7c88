"""Snapshot trajectories and their per-snapshot diagnostic series.

A trajectory is the list of fields an evolution emitted at its snapshot
times, plus bookkeeping (step size, steps per snapshot interval, whether the
run stopped early on steady state).  The diagnostic series carries one row
per snapshot; which columns are meaningful depends on the solver:

    radial runs:  t  lipschitz  sup_change  sup_dist_to_prediction
    nd runs:      t  lyapunov  boundary_quotient  lipschitz

Missing columns are written as nan so the files stay rectangular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import UsageError
from .geometry import Field, Grid, write_field

RADIAL_COLUMNS = ("t", "lipschitz", "sup_change", "sup_dist_to_prediction")
ND_COLUMNS = ("t", "lyapunov", "boundary_quotient", "lipschitz")


@dataclass
class DiagnosticSeries:
    """Per-snapshot measurements, column-major."""

    columns: tuple[str, ...]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def append(self, **entries: float) -> None:
        row = tuple(float(entries.get(c, math.nan)) for c in self.columns)
        if self.rows and not row[0] > self.rows[-1][0]:
            raise UsageError(f"diagnostic timestamps must increase, got {row[0]} after {self.rows[-1][0]}")
        self.rows.append(row)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def write(self, path: str | Path) -> None:
        with Path(path).open("w") as fh:
            fh.write("# " + " ".join(self.columns) + "\n")
            for row in self.rows:
                fh.write(" ".join(f"{x:.16e}" for x in row) + "\n")


@dataclass
class Trajectory:
    fields: list[Field]
    times: list[float]
    dt: float
    steps_per_snapshot: int
    diagnostics: DiagnosticSeries
    stopped_early: bool = False

    @property
    def grid(self) -> Grid:
        return self.fields[0].grid

    @property
    def final(self) -> Field:
        return self.fields[-1]

    @property
    def final_time(self) -> float:
        return self.times[-1]

    def snapshot_indices(self, cap: int | None) -> list[int]:
        """Which snapshots to persist: all, or `cap` of them keeping first and last."""
        n = len(self.fields)
        if cap is None or cap >= n:
            return list(range(n))
        if cap < 2:
            raise UsageError("snapshot cap must be at least 2 (first and last)")
        picks = np.unique(np.round(np.linspace(0, n - 1, cap)).astype(int))
        return [int(i) for i in picks]

    def write_snapshots(self, out_dir: str | Path, cap: int | None = None) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for i in self.snapshot_indices(cap):
            p = out_dir / f"snapshot_{i:04d}.dat"
            write_field(self.fields[i], self.times[i], p)
            paths.append(p)
        return paths
