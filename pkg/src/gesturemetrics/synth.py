"""Synthetic scripted-animation gesture corpus.

Parametric sinusoidal beat gestures stand in for an animation-library
recording: every joint oscillates around a rest value with randomized
amplitude, frequency and phase, clamped into the robot's limits. This
gives the toolkit a self-contained reference corpus for training the
feature-extraction mixture and for end-to-end experiments.
"""

from __future__ import annotations

import numpy as np

from .errors import StructuralError
from .model import JOINT_NAMES, N_JOINTS, Pose, RobotProfile, validate_pose
from .pipeline import PoseStream, window


def beat_gesture_stream(n_poses, rate_hz=4.0, seed=0, profile=None,
                        amplitude=0.3, n_harmonics=3):
    """Generate a pose stream of sinusoidal beat gestures.

    ``amplitude`` is the fraction of each joint's half-range used by the
    oscillation; each joint mixes ``n_harmonics`` randomized sinusoids.
    Deterministic given the seed.
    """
    if n_poses < 1:
        raise StructuralError("need at least one pose")
    if not rate_hz > 0:
        raise StructuralError("rate must be positive")
    profile = profile or RobotProfile.default()
    rng = np.random.Generator(np.random.Philox(seed))
    limits = profile.limits_array()
    center = limits.mean(axis=1)
    half_range = (limits[:, 1] - limits[:, 0]) / 2.0

    t = np.arange(n_poses) / rate_hz
    values = np.tile(center, (n_poses, 1))
    for j in range(N_JOINTS):
        for _ in range(n_harmonics):
            freq = rng.uniform(0.2, 1.5)       # beat-gesture band, Hz
            phase = rng.uniform(0.0, 2.0 * np.pi)
            amp = amplitude * half_range[j] * rng.uniform(0.3, 1.0)
            values[:, j] += amp * np.sin(2.0 * np.pi * freq * t + phase)

    poses = []
    for i in range(n_poses):
        pose = Pose(values=tuple(values[i].tolist()), timestamp=float(t[i]))
        poses.append(validate_pose(pose, profile))
    return PoseStream(poses=poses, native_rate_hz=float(rate_hz))


def beat_gesture_corpus(n_poses, mu, rate_hz=4.0, seed=0, profile=None,
                        amplitude=0.3, source_tag="synthetic-beats"):
    """Windowed synthetic corpus: ``floor(n_poses / mu)`` units of movement."""
    stream = beat_gesture_stream(n_poses, rate_hz=rate_hz, seed=seed,
                                 profile=profile, amplitude=amplitude)
    return window(stream, mu, source_tag=source_tag)
