"""Evaluation protocol: pairwise distance tables, assessor rankings, 3/2/1
scoring against designated main assessors, and cross-method correlations."""

from __future__ import annotations

import enum
import itertools
import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from scipy.stats import rankdata

from .barycenter import barycenter_2d
from .errors import (
    ComputationError,
    LengthMismatch,
    MissingPair,
    PairSetMismatch,
    TooFewPairs,
    UnknownAssessor,
    UnknownGroup,
    ZeroVariance,
)
from .ingest import AssignmentTable
from .model import (
    AlignmentPolicy,
    BaseMap,
    CategoryCatalog,
    DenseProfileVector,
    EntityKind,
    PublicationProfile,
    SimilarityMatrix,
    align_profile,
)
from .sapv import sapv_l1, sapv_legacy
from .wcs import DEFAULT_PSD_TOL, NON_PD_WARNING, psd_check, weighted_cosine_dissimilarity


class Method(enum.Enum):
    BARYCENTER_2D = "barycenter"
    SAPV_L1 = "sapv"
    SAPV_LEGACY = "sapv-legacy"
    WCD = "wcd"


class Semantics(enum.Enum):
    DISTANCE = "distance"
    DISSIMILARITY = "dissimilarity"


SCORE_POINTS = {1: 3, 2: 2, 3: 1}


def euclidean_distance(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"vectors of length {a.shape} and {b.shape}")
    d = a - b
    return math.sqrt(math.fsum(d * d))


@dataclass(frozen=True, eq=False)
class MethodResult:
    """Values for every (group, member) pair under one method.

    ``groups`` are the row entities (research groups and the groups
    aggregate), ``members`` the column entities (panel members and the panel
    aggregate). Lookups via :meth:`value` accept either argument order.
    """

    method: Method
    semantics: Semantics
    groups: tuple[str, ...]
    members: tuple[str, ...]
    entries: Mapping[tuple[str, str], float]
    kinds: Mapping[str, EntityKind] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))
        object.__setattr__(self, "kinds", MappingProxyType(dict(self.kinds)))

    def value(self, a: str, b: str) -> float:
        try:
            return self.entries[(a, b)]
        except KeyError:
            pass
        try:
            return self.entries[(b, a)]
        except KeyError:
            raise MissingPair(f"{self.method.value}: no value for ({a}, {b})") from None

    def is_aggregate(self, entity: str) -> bool:
        kind = self.kinds.get(entity)
        return kind is not None and kind.is_aggregate

    def individual_pairs(self) -> list[tuple[str, str]]:
        """(group, member) pairs with neither side an aggregate, in table order."""
        return [
            (g, m)
            for g in self.groups
            for m in self.members
            if not self.is_aggregate(g) and not self.is_aggregate(m)
        ]


def distance_table(
    method: Method,
    groups: Sequence[PublicationProfile],
    members: Sequence[PublicationProfile],
    catalog: CategoryCatalog,
    *,
    base_map: BaseMap | None = None,
    similarity: SimilarityMatrix | None = None,
    policy: AlignmentPolicy = AlignmentPolicy.STRICT,
    psd_tol: float = DEFAULT_PSD_TOL,
) -> MethodResult:
    """Compute ``method`` for every group x member pair.

    Barycenter and SAPV variants give Euclidean distances between the
    entities' representations; WCD gives ``1 - weighted cosine`` on the raw
    aligned counts. A WCD table built on a matrix that is not positive
    definite carries a warning instead of failing.
    """
    if method is Method.BARYCENTER_2D and base_map is None:
        raise ValueError("barycenter method needs a base map")
    if method is not Method.BARYCENTER_2D and similarity is None:
        raise ValueError(f"{method.value} method needs a similarity matrix")

    aligned: dict[str, DenseProfileVector] = {}
    kinds: dict[str, EntityKind] = {}
    for p in itertools.chain(groups, members):
        if p.entity_id in aligned:
            raise ValueError(f"entity id {p.entity_id!r} appears more than once")
        aligned[p.entity_id] = align_profile(p, catalog, policy)
        kinds[p.entity_id] = p.kind

    warnings: list[str] = []
    if method is Method.WCD:
        if not psd_check(similarity, psd_tol).is_positive_definite:
            warnings.append(NON_PD_WARNING)

        def pair_value(g: str, m: str) -> float:
            return weighted_cosine_dissimilarity(similarity, aligned[g], aligned[m])
    else:
        rep: Callable[[DenseProfileVector], Sequence[float]]
        if method is Method.BARYCENTER_2D:
            rep = lambda v: barycenter_2d(v, base_map)  # noqa: E731
        elif method is Method.SAPV_L1:
            rep = lambda v: sapv_l1(similarity, v).values  # noqa: E731
        else:
            rep = lambda v: sapv_legacy(similarity, v).values  # noqa: E731
        reps = {eid: rep(v) for eid, v in aligned.items()}

        def pair_value(g: str, m: str) -> float:
            return euclidean_distance(reps[g], reps[m])

    entries = {}
    for g in groups:
        for m in members:
            try:
                entries[(g.entity_id, m.entity_id)] = pair_value(g.entity_id, m.entity_id)
            except ComputationError as exc:
                raise type(exc)(f"{method.value} ({g.entity_id}, {m.entity_id}): {exc}") from exc
    return MethodResult(
        method=method,
        semantics=Semantics.DISSIMILARITY if method is Method.WCD else Semantics.DISTANCE,
        groups=tuple(g.entity_id for g in groups),
        members=tuple(m.entity_id for m in members),
        entries=entries,
        kinds=kinds,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class RankEntry:
    member: str
    value: float
    rank: int


@dataclass(frozen=True)
class RankingTable:
    method: Method | None
    members: tuple[str, ...]
    rankings: Mapping[str, tuple[RankEntry, ...]]


def rank_members(
    result: MethodResult, groups: Iterable[str], members: Iterable[str], k: int = 3
) -> RankingTable:
    """Top-``k`` closest members per group; ties go to the smaller member id."""
    members = tuple(members)
    rankings = {}
    for g in groups:
        scored = sorted(((result.value(g, m), m) for m in members))
        rankings[g] = tuple(
            RankEntry(member, value, rank)
            for rank, (value, member) in enumerate(scored[:k], start=1)
        )
    return RankingTable(result.method, members, rankings)


@dataclass(frozen=True)
class ScoreCard:
    method: Method | None
    chosen: Mapping[str, str]  # contested group -> assessor used in this variant
    points: Mapping[str, int]
    total: int


def assessor_score(rankings: RankingTable, assignments: AssignmentTable) -> list[ScoreCard]:
    """Award 3/2/1 points when the main assessor is ranked 1st/2nd/3rd.

    One card is returned per way of resolving contested groups (groups with
    several assigned assessors); uncontested tables give a single card.
    """
    by_group = assignments.by_group()
    for group, assessors in by_group.items():
        if group not in rankings.rankings:
            raise UnknownGroup(group)
        for a in assessors:
            if a not in rankings.members:
                raise UnknownAssessor(f"{a} (assigned to {group})")

    def points_for(group: str, assessor: str) -> int:
        for entry in rankings.rankings[group]:
            if entry.member == assessor:
                return SCORE_POINTS.get(entry.rank, 0)
        return 0

    contested = [g for g, a in by_group.items() if len(a) > 1]
    cards = []
    for choice in itertools.product(*(by_group[g] for g in contested)):
        chosen = dict(zip(contested, choice))
        points = {
            g: points_for(g, chosen.get(g, assessors[0])) for g, assessors in by_group.items()
        }
        cards.append(ScoreCard(rankings.method, chosen, points, sum(points.values())))
    return cards


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"samples of shape {x.shape} and {y.shape}")
    if len(x) < 2:
        raise LengthMismatch("need at least two observations")
    dx = x - math.fsum(x) / len(x)
    dy = y - math.fsum(y) / len(y)
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if sxx == 0 or syy == 0:
        raise ZeroVariance("one of the samples is constant")
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def midranks(x: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the average of their positions."""
    return rankdata(np.asarray(x, dtype=float), method="average")


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise LengthMismatch(f"samples of length {len(x)} and {len(y)}")
    if len(x) < 2:
        raise LengthMismatch("need at least two observations")
    return pearson(midranks(x), midranks(y))


@dataclass(frozen=True)
class Correlation:
    pearson: float
    spearman: float
    n_pairs: int
    pearson_filtered: float
    spearman_filtered: float
    n_pairs_filtered: int


@dataclass(frozen=True)
class CorrelationReport:
    methods: tuple[str, ...]
    excluded: tuple[str, ...]
    pairs: Mapping[tuple[str, str], Correlation]

    def get(self, a: str, b: str) -> Correlation:
        try:
            return self.pairs[(a, b)]
        except KeyError:
            return self.pairs[(b, a)]


def _common_pairs(a: MethodResult, b: MethodResult) -> list[tuple[str, str]]:
    pa, pb = a.individual_pairs(), b.individual_pairs()
    if set(pa) != set(pb):
        raise PairSetMismatch(f"{a.method.value} and {b.method.value} cover different pairs")
    return sorted(pa)


def _touches(pair: tuple[str, str], exclude: frozenset[str]) -> bool:
    return pair[0] in exclude or pair[1] in exclude


def _correlate(a: MethodResult, b: MethodResult, exclude: frozenset[str]) -> Correlation:
    pairs = _common_pairs(a, b)
    kept = [p for p in pairs if not _touches(p, exclude)]
    for label, subset in (("all pairs", pairs), ("after exclusion", kept)):
        if len(subset) < 3:
            raise TooFewPairs(
                f"{a.method.value} vs {b.method.value}: {len(subset)} pairs {label}"
            )

    def both(subset):
        va = [a.entries[p] for p in subset]
        vb = [b.entries[p] for p in subset]
        return pearson(va, vb), spearman(va, vb)

    r, rho = both(pairs)
    r_f, rho_f = both(kept) if len(kept) < len(pairs) else (r, rho)
    return Correlation(r, rho, len(pairs), r_f, rho_f, len(kept))


def correlation_report(
    results: Sequence[MethodResult], exclude: Iterable[str] = ()
) -> CorrelationReport:
    """Pearson and Spearman for every method pair, with and without ``exclude``.

    Only pairs between individual groups and individual members enter; the
    aggregates are left out. Results are keyed by position label so the same
    method may be listed twice (it then correlates perfectly with itself).
    """
    exclude = frozenset(exclude)
    labels = _labels(results)
    out = {}
    for i, j in itertools.combinations_with_replacement(range(len(results)), 2):
        out[(labels[i], labels[j])] = _correlate(results[i], results[j], exclude)
    return CorrelationReport(tuple(labels), tuple(sorted(exclude)), out)


def _labels(results: Sequence[MethodResult]) -> list[str]:
    labels = []
    for r in results:
        base = r.method.value
        label, n = base, 2
        while label in labels:
            label, n = f"{base}.{n}", n + 1
        labels.append(label)
    return labels


@dataclass(frozen=True)
class ScatterRow:
    group: str
    member: str
    value_a: float
    value_b: float
    excluded: bool


def scatter_data(
    result_a: MethodResult, result_b: MethodResult, exclude: Iterable[str] = ()
) -> list[ScatterRow]:
    exclude = frozenset(exclude)
    return [
        ScatterRow(g, m, result_a.entries[(g, m)], result_b.entries[(g, m)], _touches((g, m), exclude))
        for g, m in _common_pairs(result_a, result_b)
    ]
