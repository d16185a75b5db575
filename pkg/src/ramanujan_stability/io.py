"""CSV readers and writers for sequences and trajectories.

Floats are written with 17 significant digits so they round-trip exactly;
files are UTF-8 with LF line endings.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import IO, Union

import numpy as np

from .simulators import DiscreteTrajectory, HybridTrajectory, Trace
from .space import FiniteSequence

PathOrFile = Union[str, Path, IO[str]]


def fmt(value: float) -> str:
    return format(float(value), ".17g")


class _Sink:
    def __init__(self, target: PathOrFile):
        self.target = target
        self.fh = None

    def __enter__(self) -> IO[str]:
        if hasattr(self.target, "write"):
            return self.target
        self.fh = open(self.target, "w", encoding="utf-8", newline="")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not None:
            self.fh.close()


def _source_text(source: PathOrFile) -> str:
    if hasattr(source, "read"):
        return source.read()
    return Path(source).read_text(encoding="utf-8")


def _writer(fh: IO[str]):
    return csv.writer(fh, lineterminator="\n")


def read_sequence_csv(source: PathOrFile) -> FiniteSequence:
    """Parse an ``n,value`` CSV; missing indices are zero."""
    reader = csv.reader(io.StringIO(_source_text(source)))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["n", "value"]:
        raise ValueError("sequence CSV must start with header 'n,value'")
    entries = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ValueError(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            n = int(row[0])
            v = float(row[1])
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {row!r}") from None
        if n in entries:
            raise ValueError(f"line {lineno}: duplicate index {n}")
        entries[n] = v
    return FiniteSequence.from_mapping(entries)


def write_sequence_csv(seq: FiniteSequence, target: PathOrFile) -> None:
    with _Sink(target) as fh:
        w = _writer(fh)
        w.writerow(["n", "value"])
        for n, v in zip(seq.indices.tolist(), seq.values.tolist()):
            w.writerow([n, fmt(v)])


def write_discrete_csv(traj: DiscreteTrajectory, euclid: Trace, ramanujan: Trace, target: PathOrFile) -> None:
    n = traj.states.shape[1]
    with _Sink(target) as fh:
        w = _writer(fh)
        w.writerow(["k", *[f"x{i + 1}" for i in range(n)], "euclid", "ramanujan", "clamped"])
        for k in range(traj.states.shape[0]):
            w.writerow(
                [
                    k,
                    *[fmt(v) for v in traj.states[k]],
                    fmt(euclid.value[k]),
                    fmt(ramanujan.value[k]),
                    int(ramanujan.clamped[k]),
                ]
            )


def write_hybrid_csv(traj: HybridTrajectory, euclid: Trace, ramanujan: Trace, target: PathOrFile) -> None:
    with _Sink(target) as fh:
        w = _writer(fh)
        w.writerow(["t", "j", "x1", "x2", "euclid", "ramanujan", "clamped"])
        for i in range(traj.t.size):
            w.writerow(
                [
                    fmt(traj.t[i]),
                    int(traj.j[i]),
                    fmt(traj.states[i, 0]),
                    fmt(traj.states[i, 1]),
                    fmt(euclid.value[i]),
                    fmt(ramanujan.value[i]),
                    int(ramanujan.clamped[i]),
                ]
            )


def write_events_csv(traj: HybridTrajectory, target: PathOrFile) -> None:
    from .simulators import oscillator_energy

    with _Sink(target) as fh:
        w = _writer(fh)
        w.writerow(["t", "x1_pre", "x2_pre", "x1_post", "x2_post", "dV"])
        for ev in traj.events:
            dv = oscillator_energy(ev.x_after)[0] - oscillator_energy(ev.x_before)[0]
            w.writerow(
                [fmt(ev.t), *[fmt(v) for v in ev.x_before], *[fmt(v) for v in ev.x_after], fmt(dv)]
            )


def read_table_csv(source: PathOrFile) -> tuple[list[str], np.ndarray]:
    """Read any numeric CSV emitted here: ``(header, float matrix)``."""
    rows = list(csv.reader(io.StringIO(_source_text(source))))
    if not rows:
        raise ValueError("empty CSV")
    header, body = rows[0], [r for r in rows[1:] if r]
    data = np.array([[float(c) for c in r] for r in body], dtype=float).reshape(len(body), len(header))
    return header, data


def read_discrete_csv(source: PathOrFile) -> tuple[DiscreteTrajectory, np.ndarray, np.ndarray, np.ndarray]:
    """Return the trajectory plus the stored euclid, ramanujan and clamped columns.

    Disturbances are not stored in the CSV; they come back as NaN.
    """
    header, data = read_table_csv(source)
    if header[0] != "k" or header[-3:] != ["euclid", "ramanujan", "clamped"]:
        raise ValueError("not a discrete trajectory CSV")
    states = data[:, 1:-3]
    traj = DiscreteTrajectory(states, np.full_like(states, np.nan))
    return traj, data[:, -3], data[:, -2], data[:, -1].astype(bool)
