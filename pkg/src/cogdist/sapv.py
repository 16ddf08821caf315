"""Similarity-adapted publication vectors.

A profile ``M`` is smeared over related categories by the similarity matrix,
``S @ M``, and then normalized. The supported normalization is by the L1 norm
of ``S @ M`` itself, which makes the vector scale-invariant and a proper
distribution over categories. :func:`sapv_legacy` divides by the publication
total ``T`` instead; it is kept only for comparison with older results.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CatalogMismatch, ZeroTotal
from .model import CategoryCatalog, DenseProfileVector, SimilarityMatrix


class Normalization(enum.Enum):
    UNNORMALIZED = "unnormalized"
    LEGACY_BY_T = "legacy_by_t"
    L1 = "l1"


@dataclass(frozen=True, eq=False)
class SapvVector:
    catalog: CategoryCatalog
    values: np.ndarray
    normalization: Normalization

    def __post_init__(self):
        self.values.setflags(write=False)


def _check(s: SimilarityMatrix, m: DenseProfileVector) -> None:
    if s.catalog != m.catalog:
        raise CatalogMismatch("similarity matrix and profile use different catalogs")
    if not m.total > 0:
        raise ZeroTotal(f"profile {m.entity_id!r} has zero total")


def _smear(s: SimilarityMatrix, m: DenseProfileVector) -> np.ndarray:
    # row k of S dotted with M; S is symmetric so this equals column k too
    prods = s.values * m.values
    return np.array([math.fsum(row) for row in prods])


def similarity_adapted(s: SimilarityMatrix, m: DenseProfileVector) -> SapvVector:
    """The raw product ``S @ M``, exposed for diagnostics."""
    _check(s, m)
    return SapvVector(m.catalog, _smear(s, m), Normalization.UNNORMALIZED)


def sapv_l1(s: SimilarityMatrix, m: DenseProfileVector) -> SapvVector:
    """``S @ M`` divided by its own coordinate sum; entries sum to 1."""
    _check(s, m)
    raw = _smear(s, m)
    assert np.all(raw >= 0), "S @ M must be nonnegative"
    denom = math.fsum(raw)
    assert denom > 0
    return SapvVector(m.catalog, raw / denom, Normalization.L1)


def sapv_legacy(s: SimilarityMatrix, m: DenseProfileVector) -> SapvVector:
    """Deprecated: ``S @ M`` divided by the publication total ``T``.

    The result does not sum to one, so distances between such vectors mix
    profile shape with how much mass ``S`` spreads around. Use
    :func:`sapv_l1`; this variant exists for regression and correlation
    studies against results produced the old way.
    """
    _check(s, m)
    return SapvVector(m.catalog, _smear(s, m) / m.total, Normalization.LEGACY_BY_T)
