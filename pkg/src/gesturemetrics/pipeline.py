"""Pose-stream processing and dataset file IO.

CSV formats
-----------
Pose stream: comment header ``#rate_hz=...``, a column header
``timestamp,HeadYaw,...,RHandOpen`` and one pose per row.

Gesture dataset: comment header ``#mu=...``, ``#dt=...``, ``#source=...``,
a column header ``HeadYaw[0],...,RHandOpen[mu-1]`` and one flattened unit
of movement per row. Values are written with ``repr`` so a save/load round
trip is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, StructuralError
from .model import (
    JOINT_NAMES,
    N_JOINTS,
    GestureDataset,
    Pose,
    UnitOfMovement,
    column_labels,
    flatten_window,
)


@dataclass
class PoseStream:
    """A timestamped pose sequence at a (nominal) native rate."""

    poses: list
    native_rate_hz: float

    def __post_init__(self):
        if not self.poses:
            raise StructuralError("pose stream must be non-empty")
        ts = [p.timestamp for p in self.poses]
        if any(t is None for t in ts):
            raise StructuralError("stream poses must be timestamped")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise StructuralError("timestamps must be strictly increasing")

    def __len__(self):
        return len(self.poses)

    def values(self):
        return np.array([p.values for p in self.poses], dtype=float)

    def timestamps(self):
        return np.array([p.timestamp for p in self.poses], dtype=float)


def resample(stream, target_hz):
    """Linearly resample a stream to a uniform grid at ``target_hz``.

    The grid starts at the first timestamp and ends at or before the last;
    endpoints of the source are preserved when they fall on the grid.
    """
    if not target_hz > 0:
        raise StructuralError("target rate must be positive")
    ts = stream.timestamps()
    if len(ts) == 1:
        raise StructuralError("cannot resample a single-pose stream")
    dt = 1.0 / target_hz
    n_out = int(np.floor((ts[-1] - ts[0]) / dt + 1e-9)) + 1
    grid = ts[0] + dt * np.arange(n_out)
    vals = stream.values()
    out_vals = np.column_stack([np.interp(grid, ts, vals[:, j]) for j in range(N_JOINTS)])
    poses = [
        Pose(values=tuple(row.tolist()), timestamp=float(t))
        for t, row in zip(grid, out_vals)
    ]
    return PoseStream(poses=poses, native_rate_hz=float(target_hz))


def match_lengths(a, b):
    """Truncate the longer stream's trailing poses so lengths match."""
    n = min(len(a), len(b))
    return (
        PoseStream(poses=a.poses[:n], native_rate_hz=a.native_rate_hz),
        PoseStream(poses=b.poses[:n], native_rate_hz=b.native_rate_hz),
    )


def window(stream, mu, stride=None, source_tag=""):
    """Cut the stream into units of movement of ``mu`` poses.

    Default stride equals mu (non-overlapping windows, floor(K/mu) units);
    a trailing remainder shorter than mu is dropped.
    """
    if mu <= 0:
        raise StructuralError("mu must be positive")
    if stride is None:
        stride = mu
    if stride <= 0:
        raise StructuralError("stride must be positive")
    if len(stream) < mu:
        raise StructuralError(f"stream of {len(stream)} poses is shorter than mu={mu}")
    dt = 1.0 / stream.native_rate_hz
    units = []
    for start in range(0, len(stream) - mu + 1, stride):
        units.append(flatten_window(stream.poses[start:start + mu], dt))
    return GestureDataset(units=units, source_tag=source_tag,
                          sample_rate_hz=stream.native_rate_hz)


def _parse_meta(lines):
    meta = {}
    consumed = 0
    for line in lines:
        if not line.startswith("#"):
            break
        consumed += 1
        body = line[1:].strip()
        if "=" in body:
            key, _, val = body.partition("=")
            meta[key.strip()] = val.strip()
    return meta, consumed


def save_dataset(ds, path):
    with open(path, "w") as fh:
        fh.write(f"#mu={ds.mu}\n")
        fh.write(f"#dt={ds.dt!r}\n")
        fh.write(f"#rate_hz={ds.sample_rate_hz!r}\n")
        fh.write(f"#source={ds.source_tag}\n")
        fh.write(",".join(column_labels(ds.mu)) + "\n")
        for um in ds.units:
            fh.write(",".join(repr(float(v)) for v in um.flat) + "\n")


def load_dataset(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    meta, consumed = _parse_meta(lines)
    try:
        mu = int(meta["mu"])
        dt = float(meta["dt"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"missing or invalid #mu/#dt header: {exc}") from exc
    rate = float(meta.get("rate_hz", 1.0 / dt))
    source = meta.get("source", "")
    body = lines[consumed:]
    if not body:
        raise ParseError("dataset file has no header row", consumed + 1)
    header = body[0].split(",")
    if header != column_labels(mu):
        raise ParseError(
            f"header row does not match the mu={mu} column layout", consumed + 1)
    units = []
    for offset, line in enumerate(body[1:], start=consumed + 2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != N_JOINTS * mu:
            raise ParseError(
                f"expected {N_JOINTS * mu} columns, got {len(cells)}", offset)
        try:
            flat = tuple(float(c) for c in cells)
        except ValueError as exc:
            raise ParseError(f"non-numeric cell: {exc}", offset) from exc
        units.append(UnitOfMovement(mu=mu, flat=flat, dt=dt))
    if not units:
        raise ParseError("dataset file contains no data rows")
    return GestureDataset(units=units, source_tag=source, sample_rate_hz=rate)


def save_stream(stream, path):
    with open(path, "w") as fh:
        fh.write(f"#rate_hz={stream.native_rate_hz!r}\n")
        fh.write("timestamp," + ",".join(JOINT_NAMES) + "\n")
        for pose in stream.poses:
            fh.write(repr(float(pose.timestamp)) + ","
                     + ",".join(repr(float(v)) for v in pose.values) + "\n")


def load_stream(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    meta, consumed = _parse_meta(lines)
    try:
        rate = float(meta["rate_hz"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"missing or invalid #rate_hz header: {exc}") from exc
    body = lines[consumed:]
    if not body or body[0].split(",") != ["timestamp", *JOINT_NAMES]:
        raise ParseError("stream file header row is malformed", consumed + 1)
    poses = []
    for offset, line in enumerate(body[1:], start=consumed + 2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != N_JOINTS + 1:
            raise ParseError(f"expected {N_JOINTS + 1} columns, got {len(cells)}", offset)
        try:
            nums = [float(c) for c in cells]
        except ValueError as exc:
            raise ParseError(f"non-numeric cell: {exc}", offset) from exc
        poses.append(Pose(values=tuple(nums[1:]), timestamp=nums[0]))
    if not poses:
        raise ParseError("stream file contains no poses")
    return PoseStream(poses=poses, native_rate_hz=rate)
