"""Core domain types: category catalog, publication profiles, similarity
matrix, base map, and the dense alignment of sparse profiles."""

from __future__ import annotations

import enum
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import (
    AllCountsDropped,
    CatalogMismatch,
    EmptyList,
    EmptyProfile,
    InvalidCatalog,
    InvalidMatrix,
    InvalidProfile,
    UnknownCategory,
)

log = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9
RANGE_TOL = 1e-9


class EntityKind(enum.Enum):
    RESEARCH_GROUP = "group"
    PANEL_MEMBER = "panel_member"
    AGGREGATE_PANEL = "aggregate_panel"
    AGGREGATE_GROUPS = "aggregate_groups"

    @property
    def is_aggregate(self) -> bool:
        return self in (EntityKind.AGGREGATE_PANEL, EntityKind.AGGREGATE_GROUPS)


class AlignmentPolicy(enum.Enum):
    STRICT = "strict"
    DROP_UNKNOWN = "drop"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CategoryCatalog:
    """Ordered, duplicate-free list of subject-category labels."""

    labels: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        if not labels:
            raise InvalidCatalog("catalog must hold at least one category")
        index: dict[str, int] = {}
        for i, label in enumerate(labels):
            if not isinstance(label, str) or not label:
                raise InvalidCatalog(f"empty or non-string label at position {i}")
            if label in index:
                raise InvalidCatalog(f"duplicate label {label!r}")
            index[label] = i
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "index", MappingProxyType(index))

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CategoryCatalog):
            return NotImplemented
        return self is other or self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)


@dataclass(frozen=True)
class PublicationProfile:
    """Sparse category counts for one entity.

    Counts are nonnegative reals so that fractional counting schemes fit the
    same pipeline; whole-publication counts are the common case.
    """

    entity_id: str
    kind: EntityKind
    counts: Mapping[str, float]

    def __post_init__(self):
        counts = {}
        for cat, value in dict(self.counts).items():
            value = float(value)
            if not math.isfinite(value) or value < 0:
                raise InvalidProfile(
                    f"{self.entity_id}: count for {cat!r} must be finite and >= 0, got {value}"
                )
            counts[cat] = value
        object.__setattr__(self, "counts", MappingProxyType(counts))

    @property
    def total(self) -> float:
        return math.fsum(self.counts.values())


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Dense symmetric N x N category similarity matrix with unit diagonal.

    ``validate=False`` skips the symmetry/range/diagonal checks; it exists
    for diagnostics on raw matrices (e.g. the PSD report) and must not be
    used for production inputs.
    """

    catalog: CategoryCatalog
    values: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        n = len(self.catalog)
        if values.shape != (n, n):
            raise InvalidMatrix(f"expected shape {(n, n)}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidMatrix("matrix contains non-finite entries")
        if self.validate:
            asym = np.max(np.abs(values - values.T))
            if asym > SYMMETRY_TOL:
                raise InvalidMatrix(f"matrix is not symmetric (max |s_ij - s_ji| = {asym:g})")
            if values.min() < 0 or values.max() > 1 + RANGE_TOL:
                raise InvalidMatrix("similarities must lie in [0, 1]")
            if np.max(np.abs(np.diag(values) - 1.0)) > RANGE_TOL:
                raise InvalidMatrix("diagonal must be 1")
        object.__setattr__(self, "values", _readonly(values))

    @classmethod
    def identity(cls, catalog: CategoryCatalog) -> SimilarityMatrix:
        return cls(catalog, np.eye(len(catalog)))


@dataclass(frozen=True, eq=False)
class BaseMap:
    """2D coordinates of every catalog category on the base map."""

    catalog: CategoryCatalog
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float)
        if coords.shape != (len(self.catalog), 2):
            raise InvalidMatrix(
                f"expected {len(self.catalog)} coordinate pairs, got shape {coords.shape}"
            )
        if not np.all(np.isfinite(coords)):
            raise InvalidMatrix("base map coordinates must be finite")
        object.__setattr__(self, "coords", _readonly(coords))


@dataclass(frozen=True)
class DroppedCategory:
    """Audit record for a count discarded under ``AlignmentPolicy.DROP_UNKNOWN``."""

    entity_id: str
    category: str
    count: float


@dataclass(frozen=True, eq=False)
class DenseProfileVector:
    catalog: CategoryCatalog
    values: np.ndarray
    entity_id: str = ""
    dropped: tuple[DroppedCategory, ...] = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.catalog),):
            raise CatalogMismatch(
                f"vector length {values.shape} does not match catalog size {len(self.catalog)}"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidMatrix("profile vector entries must be finite and >= 0")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def total(self) -> float:
        return math.fsum(self.values)

    def scaled(self, c: float) -> DenseProfileVector:
        return DenseProfileVector(self.catalog, self.values * c, self.entity_id)


def dense(catalog: CategoryCatalog, values: Iterable[float], entity_id: str = "") -> DenseProfileVector:
    """Shorthand for building a dense vector directly from numbers."""
    return DenseProfileVector(catalog, np.asarray(list(values), dtype=float), entity_id)


def align_profile(
    profile: PublicationProfile,
    catalog: CategoryCatalog,
    policy: AlignmentPolicy = AlignmentPolicy.STRICT,
) -> DenseProfileVector:
    """Place sparse counts at their catalog positions.

    Under ``DROP_UNKNOWN`` categories missing from the catalog are skipped;
    each one is logged and listed in the result's ``dropped`` field.
    """
    if not any(v > 0 for v in profile.counts.values()):
        raise EmptyProfile(f"profile {profile.entity_id!r} has no positive counts")
    values = np.zeros(len(catalog))
    dropped = []
    for cat, count in profile.counts.items():
        pos = catalog.index.get(cat)
        if pos is None:
            if policy is AlignmentPolicy.STRICT:
                raise UnknownCategory(cat)
            dropped.append(DroppedCategory(profile.entity_id, cat, count))
            log.warning("%s: dropped %g publications in unknown category %r",
                        profile.entity_id, count, cat)
            continue
        values[pos] += count
    if not np.any(values > 0):
        raise AllCountsDropped(
            f"profile {profile.entity_id!r}: no counts left after dropping unknown categories"
        )
    return DenseProfileVector(catalog, values, profile.entity_id, tuple(dropped))


def aggregate_profiles(
    profiles: Sequence[PublicationProfile], entity_id: str, kind: EntityKind
) -> PublicationProfile:
    """Category-wise sum of raw counts (no normalization)."""
    if not profiles:
        raise EmptyList("cannot aggregate an empty list of profiles")
    parts: dict[str, list[float]] = {}
    for p in profiles:
        for cat, value in p.counts.items():
            parts.setdefault(cat, []).append(value)
    # fsum plus sorted keys keeps the result independent of input order
    counts = {cat: math.fsum(parts[cat]) for cat in sorted(parts)}
    return PublicationProfile(entity_id, kind, counts)
