"""Fidelity analysis: correlation distances, PCoA, spectra and R2 recovery.

The analysis treats the columns of the N x (14*mu) dataset matrix (each
column is one joint at one time offset within the unit of movement) as the
units of a distance matrix. Correlation distance here is d = sqrt(1 - r)
with r the Pearson correlation; this choice is Euclidean-embeddable and
keeps the PCoA spectrum essentially non-negative, and all absolute
eigenvalues quoted anywhere depend on it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometryError, StructuralError
from .model import column_labels

EIG_TOL = 1e-10


@dataclass
class DistanceMatrix:
    """Symmetric non-negative distances with zero diagonal."""

    d: np.ndarray
    labels: list = field(default_factory=list)

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise StructuralError("distance matrix must be square")
        if not np.allclose(d, d.T, atol=1e-12):
            raise StructuralError("distance matrix must be symmetric")
        if np.any(np.diag(d) != 0):
            raise StructuralError("distance matrix diagonal must be zero")
        if np.any(d < 0):
            raise StructuralError("distances must be non-negative")
        self.d = d
        if not self.labels:
            self.labels = [str(i) for i in range(d.shape[0])]

    @property
    def n(self):
        return self.d.shape[0]


@dataclass
class PcoaResult:
    """Principal coordinates with their eigenvalue spectrum.

    Column j of ``coordinates`` has squared norm ``eigenvalues[j]``.
    Numerical negative eigenvalues are dropped; their absolute mass is
    reported, not silently discarded.
    """

    coordinates: np.ndarray
    eigenvalues: np.ndarray
    dropped_negative_mass: float


def correlation_distance(data, labels=None):
    """Pairwise sqrt(1 - Pearson r) distances between data columns.

    Zero-variance columns get r = 0 (d = 1) against everything else, with
    a warning naming them.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise StructuralError("expected an N x p data matrix")
    n_rows, n_cols = data.shape
    if n_rows < 3:
        raise StructuralError("need at least 3 samples for correlations")
    if labels is None:
        labels = [str(i) for i in range(n_cols)]
    std = data.std(axis=0)
    dead = np.flatnonzero(std == 0)
    if dead.size:
        warnings.warn(
            "zero-variance columns treated as uncorrelated (d=1): "
            + ", ".join(labels[i] for i in dead))
    safe = data.copy()
    # give dead columns unit variance noisefree placeholder; their r is forced to 0 below
    safe[:, dead] += np.arange(n_rows)[:, None] * 1.0
    r = np.corrcoef(safe, rowvar=False)
    r[dead, :] = 0.0
    r[:, dead] = 0.0
    np.fill_diagonal(r, 1.0)
    d = np.sqrt(np.clip(1.0 - r, 0.0, None))
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d=d, labels=list(labels))


def geometric_variability(dm):
    """V = sum d_ij^2 / (2 n^2), the dispersion of the distance matrix."""
    d = dm.d
    return float(np.sum(d ** 2) / (2.0 * dm.n ** 2))


def scale_to_unit_geometric_variability(dm):
    """Rescale distances so the geometric variability equals 1 (idempotent)."""
    v = geometric_variability(dm)
    if v <= 0:
        raise DegenerateGeometryError("all-zero distance matrix cannot be scaled")
    return DistanceMatrix(d=dm.d / np.sqrt(v), labels=list(dm.labels))


def pcoa(dm, eig_tol=EIG_TOL):
    """Principal Coordinate Analysis of a distance matrix.

    Double-centers the squared distances into the Gram matrix
    B = -0.5 * (I - 11'/n) D2 (I - 11'/n), takes its symmetric
    eigendecomposition, keeps eigenpairs above ``eig_tol * lambda_max``
    and scales eigenvectors by sqrt(lambda). For Euclidean-embeddable
    distances the row distances of the result reproduce the input.
    """
    d = dm.d
    n = dm.n
    if n < 2:
        raise StructuralError("need at least 2 units")
    d2 = d ** 2
    centerer = np.eye(n) - np.ones((n, n)) / n
    gram = -0.5 * centerer @ d2 @ centerer
    gram = (gram + gram.T) / 2.0
    evals, evecs = np.linalg.eigh(gram)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    dropped = float(np.sum(np.abs(evals[evals < 0])))
    cutoff = eig_tol * max(evals[0], 0.0) if evals.size else 0.0
    keep = evals > cutoff
    evals, evecs = evals[keep], evecs[:, keep]
    # deterministic sign: largest-magnitude component of each axis positive
    for j in range(evecs.shape[1]):
        pivot = np.argmax(np.abs(evecs[:, j]))
        if evecs[pivot, j] < 0:
            evecs[:, j] = -evecs[:, j]
    coords = evecs * np.sqrt(evals)
    return PcoaResult(coordinates=coords, eigenvalues=evals,
                      dropped_negative_mass=dropped)


def explained_variance(result, dims):
    """Percentage of positive eigenvalue mass carried by the first dims axes."""
    lam = result.eigenvalues
    if dims > lam.size:
        raise StructuralError(f"only {lam.size} dimensions retained")
    total = float(np.sum(lam))
    return 100.0 * float(np.sum(lam[:dims])) / total


def r2_recovery(y_o, y_g):
    """Determination coefficients of each original coordinate regressed on
    all generated coordinates (ordinary least squares with intercept).

    Rank-deficient predictors fall back to the minimum-norm solution;
    the returned flag records that condition.
    """
    y_o = np.asarray(y_o, dtype=float)
    y_g = np.asarray(y_g, dtype=float)
    if y_o.shape[0] != y_g.shape[0]:
        raise StructuralError("configurations must have the same number of rows")
    n = y_o.shape[0]
    design = np.column_stack([np.ones(n), y_g])
    rank_deficient = bool(np.linalg.matrix_rank(design) < design.shape[1])
    coef, _, _, _ = np.linalg.lstsq(design, y_o, rcond=None)
    resid = y_o - design @ coef
    ssr = np.sum(resid ** 2, axis=0)
    sst = np.sum((y_o - y_o.mean(axis=0)) ** 2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(sst > 0, 1.0 - ssr / sst, np.where(ssr <= 1e-24, 1.0, 0.0))
    return np.clip(r2, 0.0, 1.0), rank_deficient


@dataclass
class FidelityReport:
    """Side-by-side structure comparison of two datasets."""

    eigen_spectrum_original: list
    eigen_spectrum_generated: list
    r2: list
    explained_variance_original_pct: float
    explained_variance_generated_pct: float
    dims: int
    rank_deficient: bool = False

    def to_dict(self):
        return {
            "eigen_spectrum_original": self.eigen_spectrum_original,
            "eigen_spectrum_generated": self.eigen_spectrum_generated,
            "r2": self.r2,
            "explained_variance_original_pct": self.explained_variance_original_pct,
            "explained_variance_generated_pct": self.explained_variance_generated_pct,
            "dims": self.dims,
            "rank_deficient": self.rank_deficient,
        }


def analyze_dataset_structure(matrix, mu):
    """Correlation-distance -> unit variability -> PCoA for one dataset."""
    dm = correlation_distance(matrix, labels=column_labels(mu))
    dm = scale_to_unit_geometric_variability(dm)
    return pcoa(dm)


def fidelity_report(matrix_original, matrix_generated, mu, dims=10, spectrum_len=28):
    """Full fidelity analysis between an original and a generated dataset.

    Both matrices must be N x (14*mu). ``dims`` principal coordinates feed
    the regressions; spectra are zero-padded to ``spectrum_len`` entries.
    """
    res_o = analyze_dataset_structure(matrix_original, mu)
    res_g = analyze_dataset_structure(matrix_generated, mu)
    dims_avail = min(dims, res_o.eigenvalues.size, res_g.eigenvalues.size)
    r2, rank_deficient = r2_recovery(
        res_o.coordinates[:, :dims_avail], res_g.coordinates[:, :dims_avail])

    def spectrum(res):
        lam = res.eigenvalues[:spectrum_len]
        return np.pad(lam, (0, spectrum_len - lam.size)).tolist()

    return FidelityReport(
        eigen_spectrum_original=spectrum(res_o),
        eigen_spectrum_generated=spectrum(res_g),
        r2=r2.tolist(),
        explained_variance_original_pct=explained_variance(res_o, dims_avail),
        explained_variance_generated_pct=explained_variance(res_g, dims_avail),
        dims=dims_avail,
        rank_deficient=rank_deficient,
    ), res_o, res_g
