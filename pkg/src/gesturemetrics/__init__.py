"""Gesture retargeting and quantitative evaluation of gesture generators.

Library layers:

- ``model``: 14-joint pose model, units of movement, robot profile
- ``mapping``: OpenNI/OpenPose skeleton-to-joint retargeting
- ``pipeline``: resampling, windowing, CSV IO
- ``pcoa``: correlation-distance PCoA fidelity analysis
- ``procrustes``: originality statistic
- ``motion``: forward kinematics, jerk and path-length statistics
- ``gmm``: tied-covariance mixture (feature extractor and generator)
- ``fgd``: Fréchet gesture distance
- ``report`` / ``cli``: joint evaluation and command-line entry points
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    JOINT_NAMES,
    N_JOINTS,
    GestureDataset,
    Pose,
    RobotProfile,
    UnitOfMovement,
    as_matrix,
    flatten_window,
    unflatten,
    validate_pose,
)
