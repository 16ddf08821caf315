"""Barycenters: profile centroids on the 2D base map, and the general
weighted barycenter of a finite set of points."""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np

from .errors import CatalogMismatch, EmptyInput, LengthMismatch, NonPositiveWeight, ZeroTotal
from .model import BaseMap, DenseProfileVector


class Point2D(NamedTuple):
    c1: float
    c2: float


def barycenter_2d(m: DenseProfileVector, base_map: BaseMap) -> Point2D:
    """Publication-weighted centroid of a profile on the base map.

    Categories with zero publications simply contribute nothing. The sums run
    in catalog order through ``math.fsum`` so the result does not depend on
    platform summation order.
    """
    if m.catalog != base_map.catalog:
        raise CatalogMismatch("profile and base map use different catalogs")
    total = m.total
    if not total > 0:
        raise ZeroTotal(f"profile {m.entity_id!r} has zero total")
    w = m.values
    c1 = math.fsum(w * base_map.coords[:, 0]) / total
    c2 = math.fsum(w * base_map.coords[:, 1]) / total
    return Point2D(c1, c2)


def generalized_barycenter(weights: Sequence[float], points: Sequence[Sequence[float]]) -> np.ndarray:
    """Weighted mean ``(1/T) * sum(w_n * X_n)`` of points in any dimension.

    All weights must be strictly positive; with unit weights this is the
    plain centroid of the points.
    """
    if len(weights) == 0 or len(points) == 0:
        raise EmptyInput("need at least one point")
    if len(weights) != len(points):
        raise LengthMismatch(f"{len(weights)} weights for {len(points)} points")
    w = np.asarray(weights, dtype=float)
    if np.any(~(w > 0)):
        raise NonPositiveWeight("barycenter weights must be strictly positive")
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise LengthMismatch(f"points have mixed dimensions {sorted(dims)}")
    x = np.asarray(points, dtype=float)
    total = math.fsum(w)
    return np.array([math.fsum(w * x[:, k]) / total for k in range(x.shape[1])])
