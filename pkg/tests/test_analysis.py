import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cogdist.analysis import (
    Method,
    MethodResult,
    Semantics,
    assessor_score,
    correlation_report,
    distance_table,
    euclidean_distance,
    midranks,
    pearson,
    rank_members,
    scatter_data,
    spearman,
)
from cogdist.errors import (
    LengthMismatch,
    MissingPair,
    PairSetMismatch,
    TooFewPairs,
    UnknownAssessor,
    UnknownGroup,
    ZeroVariance,
)
from cogdist.ingest import Assignment, AssignmentTable
from cogdist.model import BaseMap, CategoryCatalog, EntityKind, PublicationProfile, SimilarityMatrix
from cogdist.wcs import NON_PD_WARNING

G, PM = EntityKind.RESEARCH_GROUP, EntityKind.PANEL_MEMBER


def result(values, method=Method.SAPV_L1):
    """MethodResult from {(group, member): value}."""
    groups = tuple(dict.fromkeys(g for g, _ in values))
    members = tuple(dict.fromkeys(m for _, m in values))
    kinds = {**{g: G for g in groups}, **{m: PM for m in members}}
    return MethodResult(method, Semantics.DISTANCE, groups, members, values, kinds)


def table(assignments):
    return AssignmentTable(tuple(Assignment(g, a) for g, a in assignments))


# reference implementations ----------------------------------------------


def pearson_oracle(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return cov / math.sqrt(sum((a - mx) ** 2 for a in x) * sum((b - my) ** 2 for b in y))


def midrank_oracle(x):
    """Average of the 1-based positions occupied by each value."""
    return [
        sum(i + 1 for i, v in enumerate(sorted(x)) if v == a) / sum(1 for v in x if v == a)
        for a in x
    ]


def spearman_no_ties_oracle(x, y):
    """1 - 6 sum d^2 / (n (n^2 - 1)), with ranks found by brute-force permutation search."""
    n = len(x)

    def ranks(v):
        for perm in itertools.permutations(range(n)):
            if all(v[perm[i]] < v[perm[i + 1]] for i in range(n - 1)):
                r = [0] * n
                for pos, idx in enumerate(perm):
                    r[idx] = pos + 1
                return r
        raise AssertionError("ties")

    rx, ry = ranks(x), ranks(y)
    d2 = sum((a - b) ** 2 for a, b in zip(rx, ry))
    return 1 - 6 * d2 / (n * (n * n - 1))


class TestEuclidean:
    def test_examples(self):
        assert euclidean_distance([1, 2], [1, 2]) == 0
        assert euclidean_distance([0, 0], [3, 4]) == 5
        assert euclidean_distance([1, 0, 0], [0, 1, 0]) == pytest.approx(1.4142135623730950488, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            euclidean_distance([1], [1, 2])

    @given(st.integers(1, 10).flatmap(
        lambda n: st.tuples(*[st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n)] * 3)))
    def test_metric_axioms(self, vecs):
        a, b, c = vecs
        dab = euclidean_distance(a, b)
        assert dab >= 0
        assert dab == euclidean_distance(b, a)
        assert euclidean_distance(a, a) <= 1e-12
        assert euclidean_distance(a, c) <= dab + euclidean_distance(b, c) + 1e-9


def _profiles():
    cat = CategoryCatalog(["A", "B", "C"])
    groups = [PublicationProfile("G1", G, {"A": 1}), PublicationProfile("G2", G, {"B": 1})]
    members = [PublicationProfile("PM1", PM, {"A": 1}), PublicationProfile("PM2", PM, {"A": 3})]
    return cat, groups, members


class TestDistanceTable:
    def test_toy_identity(self):
        cat, groups, members = _profiles()
        s = SimilarityMatrix.identity(cat)
        sapv = distance_table(Method.SAPV_L1, groups, members, cat, similarity=s)
        wcd = distance_table(Method.WCD, groups, members, cat, similarity=s)
        assert sapv.value("G2", "PM1") == pytest.approx(math.sqrt(2), abs=1e-15)
        assert wcd.value("G2", "PM1") == 1.0
        # identical and scaled profiles sit at distance zero
        for r in (sapv, wcd):
            assert r.value("G1", "PM1") == pytest.approx(0, abs=1e-12)
            assert r.value("PM2", "G1") == pytest.approx(0, abs=1e-12)
        assert wcd.semantics is Semantics.DISSIMILARITY and not wcd.warnings

    def test_barycenter_scaled(self):
        cat, groups, members = _profiles()
        bm = BaseMap(cat, [(0, 0), (3, 4), (1, 1)])
        r = distance_table(Method.BARYCENTER_2D, groups, members, cat, base_map=bm)
        assert r.value("G1", "PM2") == 0
        assert r.value("G2", "PM1") == 5

    def test_legacy(self, worked_s, cat4):
        g = [PublicationProfile("G", G, {"A": 4, "B": 1})]
        m = [PublicationProfile("M", PM, {"A": 8, "B": 2})]
        r = distance_table(Method.SAPV_LEGACY, g, m, cat4, similarity=worked_s)
        assert r.value("G", "M") == pytest.approx(0, abs=1e-12)

    def test_non_pd_flag(self):
        cat = CategoryCatalog(["A", "B", "C"])
        s = SimilarityMatrix(cat, np.ones((3, 3)))
        groups = [PublicationProfile("G1", G, {"A": 1})]
        members = [PublicationProfile("PM1", PM, {"B": 1})]
        r = distance_table(Method.WCD, groups, members, cat, similarity=s)
        assert r.warnings == (NON_PD_WARNING,)

    def test_missing_inputs(self):
        cat, groups, members = _profiles()
        with pytest.raises(ValueError):
            distance_table(Method.BARYCENTER_2D, groups, members, cat)
        with pytest.raises(ValueError):
            distance_table(Method.WCD, groups, members, cat)

    def test_missing_pair(self):
        with pytest.raises(MissingPair):
            result({("G1", "PM1"): 0.1}).value("G1", "PM9")


class TestRanking:
    def test_sort(self):
        r = result({("G", "PM1"): 0.5, ("G", "PM2"): 0.1, ("G", "PM3"): 0.3})
        t = rank_members(r, ["G"], ["PM1", "PM2", "PM3"])
        assert [(e.member, e.rank) for e in t.rankings["G"]] == [("PM2", 1), ("PM3", 2), ("PM1", 3)]

    def test_tie_break(self):
        r = result({("G", "PM2"): 0.2, ("G", "PM1"): 0.2})
        assert [e.member for e in rank_members(r, ["G"], ["PM2", "PM1"]).rankings["G"]] == ["PM1", "PM2"]

    def test_truncation_without_padding(self):
        r = result({("G", "PM1"): 0.2, ("G", "PM2"): 0.1})
        assert len(rank_members(r, ["G"], ["PM1", "PM2"], k=3).rankings["G"]) == 2

    # grid values keep 2v + 1 and v**3 strictly increasing in floating point
    @given(st.lists(st.integers(0, 1000).map(lambda i: i / 100), min_size=1, max_size=8))
    def test_monotone_rescaling(self, values):
        members = [f"PM{i}" for i in range(len(values))]
        base = result({("G", m): v for m, v in zip(members, values)})
        expected = rank_members(base, ["G"], members).rankings["G"]
        for f in (lambda v: 2 * v + 1, lambda v: v**3):
            moved = result({("G", m): f(v) for m, v in zip(members, values)})
            got = rank_members(moved, ["G"], members).rankings["G"]
            assert [e.member for e in got] == [e.member for e in expected]


def _ranked(order_by_group):
    """RankingTable where each group ranks the given members first, in order."""
    members = ["PM1", "PM2", "PM3", "PM4", "PM5"]
    values = {}
    for g, order in order_by_group.items():
        rest = [m for m in members if m not in order]
        for i, m in enumerate(order + rest):
            values[(g, m)] = 0.1 * (i + 1)
    r = result(values)
    return rank_members(r, list(order_by_group), members)


class TestScoring:
    def test_all_first(self):
        groups = {f"G{i}": ["PM1", "PM2", "PM3"] for i in range(5)}
        cards = assessor_score(_ranked(groups), table((g, "PM1") for g in groups))
        assert len(cards) == 1 and cards[0].total == 15

    def test_never_ranked(self):
        groups = {f"G{i}": ["PM1", "PM2", "PM3"] for i in range(5)}
        assert assessor_score(_ranked(groups), table((g, "PM5") for g in groups))[0].total == 0

    def test_mixed(self):
        rt = _ranked({"G1": ["PM1", "PM2", "PM3"], "G2": ["PM2", "PM3", "PM1"], "G3": ["PM2", "PM3", "PM4"]})
        card = assessor_score(rt, table([("G1", "PM1"), ("G2", "PM1"), ("G3", "PM1")]))[0]
        assert dict(card.points) == {"G1": 3, "G2": 1, "G3": 0}
        assert card.total == 4

    def test_contested(self):
        rt = _ranked({"C": ["PM5", "PM3", "PM4"], "D": ["PM1", "PM2", "PM3"]})
        cards = assessor_score(rt, table([("C", "PM4"), ("C", "PM3"), ("D", "PM1")]))
        assert [(dict(c.chosen), c.total) for c in cards] == [({"C": "PM4"}, 4), ({"C": "PM3"}, 5)]

    def test_row_order_invariant(self):
        rt = _ranked({"G1": ["PM1", "PM2", "PM3"], "G2": ["PM2", "PM1", "PM3"], "G3": ["PM3", "PM2", "PM1"]})
        rows = [("G1", "PM1"), ("G2", "PM1"), ("G3", "PM1")]
        totals = {assessor_score(rt, table(p))[0].total for p in itertools.permutations(rows)}
        assert totals == {6}

    def test_unknown(self):
        rt = _ranked({"G1": ["PM1", "PM2", "PM3"]})
        with pytest.raises(UnknownGroup):
            assessor_score(rt, table([("G9", "PM1")]))
        with pytest.raises(UnknownAssessor):
            assessor_score(rt, table([("G1", "PM9")]))


class TestCorrelation:
    def test_examples(self):
        x = [1.0, 2.0, 3.0, 4.0]
        assert pearson(x, [2 * v + 3 for v in x]) == pytest.approx(1.0, abs=1e-15)
        assert pearson(x, [-v for v in x]) == pytest.approx(-1.0, abs=1e-15)
        assert pearson(x, [2, 1, 4, 3]) == pytest.approx(0.6, abs=1e-15)
        assert spearman(x, [v**3 for v in x]) == pytest.approx(1.0, abs=1e-15)
        assert spearman(x, x[::-1]) == pytest.approx(-1.0, abs=1e-15)

    def test_midranks(self):
        np.testing.assert_array_equal(midranks([1, 2, 2, 4]), [1, 2.5, 2.5, 4])
        assert spearman([1, 2, 2, 4], [1, 3, 2, 4]) == pytest.approx(0.94868329805051379960, abs=1e-15)

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            pearson([1, 2], [1, 2, 3])
        with pytest.raises(LengthMismatch):
            spearman([1], [1])
        with pytest.raises(ZeroVariance):
            pearson([1, 1, 1], [1, 2, 3])

    @settings(max_examples=300)
    @given(st.integers(3, 20).flatmap(lambda n: st.tuples(
        st.lists(st.integers(0, 6), min_size=n, max_size=n),
        st.lists(st.integers(-10**6, 10**6).map(lambda i: i / 1e4), min_size=n, max_size=n))))
    def test_against_oracles(self, xy):
        x, y = xy
        if len(set(x)) < 2 or len(set(y)) < 2:
            return
        assert pearson(x, y) == pytest.approx(pearson_oracle(x, y), abs=1e-12)
        np.testing.assert_array_equal(midranks(x), midrank_oracle(x))
        assert spearman(x, y) == pytest.approx(pearson_oracle(midrank_oracle(x), midrank_oracle(y)), abs=1e-12)

    @given(st.integers(3, 6).flatmap(lambda n: st.tuples(
        st.lists(st.integers(0, 1000), min_size=n, max_size=n, unique=True),
        st.lists(st.integers(0, 1000), min_size=n, max_size=n, unique=True))))
    def test_permutation_oracle_without_ties(self, xy):
        x, y = xy
        assert spearman(x, y) == pytest.approx(spearman_no_ties_oracle(x, y), abs=1e-12)


def planted_outliers():
    """Two methods that agree on well-behaved pairs but disagree wildly on
    every pair touching G3 or PM3."""
    groups, members = ["G1", "G2", "G3"], ["PM1", "PM2", "PM3"]
    a, b = {}, {}
    for i, g in enumerate(groups):
        for j, m in enumerate(members):
            base = 0.1 * (i + 1) + 0.03 * j
            a[(g, m)] = base
            b[(g, m)] = 2 * base + 0.01 * ((i + j) % 2)
            if g == "G3" or m == "PM3":
                b[(g, m)] = 0.05 if (i + j) % 2 else 3.0
    return result(a, Method.BARYCENTER_2D), result(b, Method.SAPV_L1)


class TestCorrelationReport:
    def test_self_pair(self):
        a, _ = planted_outliers()
        rep = correlation_report([a, a])
        c = rep.get("barycenter", "barycenter.2")
        assert c.pearson == pytest.approx(1.0, abs=1e-15) and c.spearman == pytest.approx(1.0, abs=1e-15)

    def test_affine(self):
        a, _ = planted_outliers()
        b = result({k: 2 * v + 1 for k, v in a.entries.items()}, Method.WCD)
        c = correlation_report([a, b]).get("barycenter", "wcd")
        assert c.pearson == pytest.approx(1.0, abs=1e-12) and c.spearman == pytest.approx(1.0, abs=1e-12)

    def test_exclusion_raises_r(self):
        a, b = planted_outliers()
        rep = correlation_report([a, b], exclude={"G3", "PM3"})
        c = rep.get("sapv", "barycenter")
        assert c.pearson < 0.5 < 0.9 < c.pearson_filtered
        assert c.n_pairs == 9 and c.n_pairs_filtered == 4
        kept = [p for p in sorted(a.entries) if "G3" not in p and "PM3" not in p]
        assert c.pearson_filtered == pytest.approx(
            pearson_oracle([a.entries[p] for p in kept], [b.entries[p] for p in kept]), abs=1e-12
        )
        assert c.pearson == pytest.approx(
            pearson_oracle([a.entries[p] for p in sorted(a.entries)], [b.entries[p] for p in sorted(a.entries)]),
            abs=1e-12,
        )

    def test_no_exclusion_reproduces_full(self):
        a, b = planted_outliers()
        c = correlation_report([a, b]).get("barycenter", "sapv")
        assert (c.pearson_filtered, c.spearman_filtered) == (c.pearson, c.spearman)

    def test_symmetric_in_method_order(self):
        a, b = planted_outliers()
        x = correlation_report([a, b], {"G3"}).get("barycenter", "sapv")
        y = correlation_report([b, a], {"G3"}).get("barycenter", "sapv")
        assert x == y

    def test_aggregates_left_out(self):
        a, b = planted_outliers()
        entries = dict(a.entries)
        entries.update({("Groups", m): 9.0 for m in a.members})
        kinds = {**a.kinds, "Groups": EntityKind.AGGREGATE_GROUPS}
        agg = MethodResult(a.method, a.semantics, a.groups + ("Groups",), a.members, entries, kinds)
        assert correlation_report([agg, b]).get("barycenter", "sapv") == correlation_report([a, b]).get(
            "barycenter", "sapv"
        )

    def test_too_few(self):
        a, b = planted_outliers()
        with pytest.raises(TooFewPairs):
            correlation_report([a, b], exclude={"G1", "G2", "PM1"})

    def test_pair_set_mismatch(self):
        a, _ = planted_outliers()
        other = result({("X", "Y"): 1.0, ("X", "Z"): 2.0, ("W", "Y"): 3.0})
        with pytest.raises(PairSetMismatch):
            correlation_report([a, other])


class TestScatter:
    def test_flags(self):
        a, b = planted_outliers()
        rows = scatter_data(a, b, {"G1"})
        assert len(rows) == 9
        assert all(r.excluded == (r.group == "G1") for r in rows)
        assert not any(r.excluded for r in scatter_data(a, b))

    def test_two_pairs(self):
        a = result({("G", "PM1"): 0.1, ("G", "PM2"): 0.2})
        rows = scatter_data(a, a)
        assert [(r.group, r.member, r.excluded) for r in rows] == [("G", "PM1", False), ("G", "PM2", False)]
