"""Joint-space data model: robot profile, poses, units of movement, datasets.

Every downstream metric works on the same 14-joint upper-body pose vector.
The joint order is fixed once here and reused for CSV columns, flattened
unit-of-movement vectors and GMM feature dimensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

from .errors import StructuralError

N_JOINTS = 14

JOINT_NAMES = (
    "HeadYaw",
    "HeadPitch",
    "LShoulderPitch",
    "LShoulderRoll",
    "LElbowYaw",
    "LElbowRoll",
    "LWristYaw",
    "LHandOpen",
    "RShoulderPitch",
    "RShoulderRoll",
    "RElbowYaw",
    "RElbowRoll",
    "RWristYaw",
    "RHandOpen",
)

HAND_OPEN_JOINTS = ("LHandOpen", "RHandOpen")


@dataclass(frozen=True)
class RobotProfile:
    """Joint limits and link lengths of the target robot.

    Limits are radians except the two HandOpen joints which live in [0, 1].
    Link lengths (meters) feed the forward-kinematics chain used by the
    motion metrics.
    """

    joint_names: tuple = JOINT_NAMES
    joint_limits: tuple = ()
    upper_arm_length: float = 0.1812
    forearm_length: float = 0.15
    shoulder_offset: float = 0.1497
    name: str = "unnamed"

    def __post_init__(self):
        if tuple(self.joint_names) != JOINT_NAMES:
            raise StructuralError(
                "profile must declare the canonical 14 joints in canonical order"
            )
        if len(self.joint_limits) != N_JOINTS:
            raise StructuralError("profile needs one [min, max] pair per joint")
        for name, (lo, hi) in zip(self.joint_names, self.joint_limits):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise StructuralError(f"empty or invalid limit interval for {name}")
            if name in HAND_OPEN_JOINTS and (lo, hi) != (0.0, 1.0):
                raise StructuralError(f"{name} limits must be [0, 1]")
        for length in (self.upper_arm_length, self.forearm_length, self.shoulder_offset):
            if not (np.isfinite(length) and length > 0):
                raise StructuralError("link lengths must be strictly positive")

    def limits_array(self):
        return np.asarray(self.joint_limits, dtype=float)

    @classmethod
    def from_dict(cls, doc):
        joints = doc["joints"]
        if set(joints) != set(JOINT_NAMES):
            missing = set(JOINT_NAMES) - set(joints)
            extra = set(joints) - set(JOINT_NAMES)
            raise StructuralError(f"bad joint set (missing={sorted(missing)}, extra={sorted(extra)})")
        links = doc["link_lengths"]
        return cls(
            joint_limits=tuple((float(lo), float(hi)) for lo, hi in
                               (joints[name] for name in JOINT_NAMES)),
            upper_arm_length=float(links["upper_arm"]),
            forearm_length=float(links["forearm"]),
            shoulder_offset=float(links["shoulder_offset"]),
            name=doc.get("name", "unnamed"),
        )

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def default(cls):
        text = resources.files("gesturemetrics.profiles").joinpath("pepper.json").read_text()
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Pose:
    """One frame of 14 joint values, optionally timestamped.

    ``n_clamped`` records how many values were pulled back inside their
    limits by :func:`validate_pose`; out-of-range capture noise is clamped,
    never rejected.
    """

    values: tuple
    timestamp: float | None = None
    n_clamped: int = 0

    def __post_init__(self):
        if len(self.values) != N_JOINTS:
            raise StructuralError(f"pose needs {N_JOINTS} values, got {len(self.values)}")

    @property
    def clamped(self):
        return self.n_clamped > 0

    def array(self):
        return np.asarray(self.values, dtype=float)


def validate_pose(pose, profile):
    """Clamp every joint value into its profile interval.

    Idempotent; the returned pose records the number of clamped joints.
    """
    limits = profile.limits_array()
    vals = pose.array()
    clipped = np.clip(vals, limits[:, 0], limits[:, 1])
    n_clamped = int(np.count_nonzero(clipped != vals))
    return replace(pose, values=tuple(clipped.tolist()), n_clamped=n_clamped)


@dataclass(frozen=True)
class UnitOfMovement:
    """mu consecutive poses flattened to a single 14*mu vector.

    Layout: all 14 joints of pose t, then all 14 joints of pose t+dt, ...
    """

    mu: int
    flat: tuple
    dt: float

    def __post_init__(self):
        if self.mu < 1:
            raise StructuralError("mu must be a positive integer")
        if len(self.flat) != N_JOINTS * self.mu:
            raise StructuralError(
                f"flat vector must have {N_JOINTS * self.mu} entries, got {len(self.flat)}"
            )
        if not self.dt > 0:
            raise StructuralError("dt must be positive")

    def array(self):
        return np.asarray(self.flat, dtype=float)


def flatten_window(poses, dt):
    """Join a window of poses into one UnitOfMovement (joint-major per frame)."""
    poses = list(poses)
    if not poses:
        raise StructuralError("cannot flatten an empty pose window")
    flat = []
    for pose in poses:
        flat.extend(pose.values)
    return UnitOfMovement(mu=len(poses), flat=tuple(flat), dt=dt)


def unflatten(um):
    """Inverse of :func:`flatten_window`; timestamps are rebuilt from dt."""
    vals = um.array().reshape(um.mu, N_JOINTS)
    return [
        Pose(values=tuple(row.tolist()), timestamp=i * um.dt)
        for i, row in enumerate(vals)
    ]


def column_labels(mu):
    """Column names of the flattened layout: ``Joint[k]`` for frame offset k."""
    return [f"{name}[{k}]" for k in range(mu) for name in JOINT_NAMES]


@dataclass
class GestureDataset:
    """A homogeneous collection of units of movement plus provenance."""

    units: list
    source_tag: str = ""
    sample_rate_hz: float = 0.0

    def __post_init__(self):
        if not self.units:
            raise StructuralError("dataset needs at least one unit of movement")
        mu, dt = self.units[0].mu, self.units[0].dt
        for um in self.units:
            if um.mu != mu or um.dt != dt:
                raise StructuralError("all units must share the same mu and dt")
        self.mu = mu
        self.dt = dt
        if not self.sample_rate_hz:
            self.sample_rate_hz = 1.0 / dt

    def __len__(self):
        return len(self.units)


def as_matrix(ds):
    """Stack a dataset into the N x (14*mu) analysis matrix."""
    return np.vstack([um.array() for um in ds.units])


def dataset_from_matrix(matrix, dt, source_tag=""):
    """Build a dataset from an N x (14*mu) array (row = one flat unit)."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] % N_JOINTS != 0:
        raise StructuralError("matrix width must be a multiple of 14")
    mu = matrix.shape[1] // N_JOINTS
    units = [UnitOfMovement(mu=mu, flat=tuple(row.tolist()), dt=dt) for row in matrix]
    return GestureDataset(units=units, source_tag=source_tag)
