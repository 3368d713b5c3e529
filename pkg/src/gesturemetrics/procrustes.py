"""Orthogonal Procrustes statistic between two coordinate configurations.

The statistic is the residual sum of squares ss = ||A - s B Q||_F^2
minimized over orthogonal Q and positive scale s; larger ss means the two
configurations (here: joints along the unit of movement, embedded by PCoA)
differ more, i.e. the generator is more original. ss is normalized by
14*mu to stay commeasurable across unit-of-movement lengths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, StructuralError
from .model import N_JOINTS

SCALE_EPS = 1e-12
CENTER_TOL = 1e-6


@dataclass
class ProcrustesResult:
    ss: float
    scale: float
    rotation: np.ndarray
    ss_normalized: float
    anti_correlated: bool = False

    def to_dict(self):
        return {
            "ss": self.ss,
            "scale": self.scale,
            "ss_normalized": self.ss_normalized,
            "anti_correlated": self.anti_correlated,
        }


def procrustes(y_o, y_g, mu, allow_reflections=True):
    """Align ``y_g`` onto ``y_o`` by scale and orthogonal rotation.

    Both configurations must be column-centered already (PCoA output is);
    this is asserted rather than silently re-centered. With
    ``allow_reflections=False`` Q is restricted to proper rotations.
    """
    y_o = np.asarray(y_o, dtype=float)
    y_g = np.asarray(y_g, dtype=float)
    if y_o.shape != y_g.shape:
        raise StructuralError("configurations must have identical shapes")
    norm_g2 = float(np.sum(y_g ** 2))
    if norm_g2 <= 0:
        raise DegenerateGeometryError("all-zero configuration: scale undefined")
    for name, mat in (("first", y_o), ("second", y_g)):
        spread = np.max(np.abs(mat)) or 1.0
        if np.max(np.abs(mat.mean(axis=0))) > CENTER_TOL * spread:
            raise StructuralError(f"{name} configuration is not column-centered")

    u, sigma, vt = np.linalg.svd(y_g.T @ y_o)
    q = u @ vt
    trace = float(np.sum(sigma))
    if not allow_reflections and np.linalg.det(q) < 0:
        flip = np.ones(len(sigma))
        flip[-1] = -1.0
        q = (u * flip) @ vt
        trace = float(np.sum(sigma * flip))

    anti_correlated = trace <= 0
    if anti_correlated:
        scale = SCALE_EPS  # best positive scale collapses toward zero
    else:
        scale = trace / norm_g2
    ss = float(np.sum((y_o - scale * y_g @ q) ** 2))
    return ProcrustesResult(
        ss=ss,
        scale=float(scale),
        rotation=q,
        ss_normalized=ss / (N_JOINTS * mu),
        anti_correlated=anti_correlated,
    )
