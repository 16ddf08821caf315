"""Weighted (generalized) cosine similarity ``x'Sy / sqrt(x'Sx * y'Sy)``.

The quantity is a genuine cosine only when ``S`` defines an inner product,
i.e. when ``S`` is positive definite. :func:`psd_check` reports how far a
matrix is from that condition; callers decide what to do with the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CatalogMismatch, DegenerateNorm, NonFinite
from .model import SYMMETRY_TOL, DenseProfileVector, SimilarityMatrix

DEFAULT_PSD_TOL = 1e-10

NON_PD_WARNING = "non-PD matrix: values are not a valid inner-product similarity"


@dataclass(frozen=True)
class PsdReport:
    n: int
    is_symmetric: bool
    min_eigenvalue: float
    max_eigenvalue: float
    is_positive_definite: bool
    is_positive_semidefinite: bool
    tolerance: float


def _row_dots(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(row) for row in s * v])


def _quadratic_parts(s: SimilarityMatrix, x: DenseProfileVector, y: DenseProfileVector):
    if s.catalog != x.catalog or s.catalog != y.catalog:
        raise CatalogMismatch("similarity matrix and profiles use different catalogs")
    sy = _row_dots(s.values, y.values)
    sx = _row_dots(s.values, x.values)
    xsy = math.fsum(x.values * sy)
    xsx = math.fsum(x.values * sx)
    ysy = math.fsum(y.values * sy)
    return xsy, xsx, ysy


def weighted_cosine(s: SimilarityMatrix, x: DenseProfileVector, y: DenseProfileVector) -> float:
    xsy, xsx, ysy = _quadratic_parts(s, x, y)
    if not xsx > 0 or not ysy > 0:
        raise DegenerateNorm(
            f"quadratic form is not positive for {x.entity_id or 'x'} / {y.entity_id or 'y'}"
            f" (x'Sx={xsx:g}, y'Sy={ysy:g})"
        )
    return xsy / (math.sqrt(xsx) * math.sqrt(ysy))


def weighted_cosine_dissimilarity(
    s: SimilarityMatrix, x: DenseProfileVector, y: DenseProfileVector
) -> float:
    return 1.0 - weighted_cosine(s, x, y)


def psd_check(s: SimilarityMatrix | np.ndarray, tol: float = DEFAULT_PSD_TOL) -> PsdReport:
    """Eigenvalue-based definiteness report for a (nominally symmetric) matrix.

    Thresholds are relative: ``tol * max(1, |lambda_max|)``. Raw arrays are
    accepted so that matrices failing the :class:`SimilarityMatrix` range
    checks can still be diagnosed.
    """
    a = np.asarray(s.values if isinstance(s, SimilarityMatrix) else s, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix contains non-finite entries")
    is_sym = bool(np.max(np.abs(a - a.T), initial=0.0) <= SYMMETRY_TOL)
    eig = np.linalg.eigvalsh((a + a.T) / 2)
    lo, hi = float(eig[0]), float(eig[-1])
    margin = tol * max(1.0, abs(hi))
    return PsdReport(
        n=a.shape[0],
        is_symmetric=is_sym,
        min_eigenvalue=lo,
        max_eigenvalue=hi,
        is_positive_definite=lo > margin,
        is_positive_semidefinite=lo >= -margin,
        tolerance=tol,
    )
