"""Command-line front end.

Exit codes: 0 success, 2 input or parse error, 3 matrix not positive
definite (``check`` only), 4 computation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    Method,
    MethodResult,
    assessor_score,
    correlation_report,
    distance_table,
    rank_members,
    scatter_data,
)
from .errors import ComputationError, InputError
from .ingest import parse_assignments_csv, parse_pajek, parse_profiles_csv, to_model
from .model import (
    AlignmentPolicy,
    BaseMap,
    CategoryCatalog,
    EntityKind,
    PublicationProfile,
    SimilarityMatrix,
    aggregate_profiles,
)
from .wcs import DEFAULT_PSD_TOL, psd_check

log = logging.getLogger("cogdist")

EXIT_OK, EXIT_INPUT, EXIT_NOT_PD, EXIT_COMPUTE = 0, 2, 3, 4
SCHEMA_VERSION = "1"
GROUPS_AGGREGATE, PANEL_AGGREGATE = "Groups", "Panel"


@dataclass
class RunConfig:
    map_path: Path | None = None
    profiles_path: Path | None = None
    assignments_path: Path | None = None
    methods: list[Method] = field(default_factory=lambda: [Method.SAPV_L1])
    exclude: list[str] = field(default_factory=list)
    output_dir: Path = Path(".")
    alignment: AlignmentPolicy = AlignmentPolicy.STRICT
    psd_tol: float = DEFAULT_PSD_TOL
    aggregates: bool = False


class UsageError(InputError):
    pass


def format_value(v: float) -> str:
    """Six significant digits, positional notation, '.' decimal point."""
    if v == 0:
        return "0.000000"
    text = np.format_float_positional(v, precision=6, unique=False, fractional=False, trim="k")
    return text.rstrip(".")


def _csv_list(text: str | Sequence[str] | None) -> list[str]:
    if text is None:
        return []
    items = text.split(",") if isinstance(text, str) else list(text)
    return [s.strip() for s in items if s.strip()]


def _parse_methods(items: list[str]) -> list[Method]:
    try:
        return [Method(m) for m in items]
    except ValueError as exc:
        choices = ", ".join(m.value for m in Method)
        raise UsageError(f"{exc}; choose from {choices}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge an optional JSON config file with command-line flags (flags win)."""
    file_cfg: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")

    def pick(flag_value, key):
        return flag_value if flag_value is not None else file_cfg.get(key)

    cfg = RunConfig()
    for attr, flag, key in (
        ("map_path", args.map, "map"),
        ("profiles_path", args.profiles, "profiles"),
        ("assignments_path", args.assignments, "assignments"),
    ):
        value = pick(flag, key)
        if value is not None:
            setattr(cfg, attr, Path(value))
    out = pick(args.out, "out")
    if out is not None:
        cfg.output_dir = Path(out)
    methods = _csv_list(pick(args.methods, "methods"))
    if methods:
        cfg.methods = _parse_methods(methods)
    cfg.exclude = _csv_list(pick(args.exclude, "exclude"))
    alignment = pick(args.alignment, "alignment")
    if alignment is not None:
        try:
            cfg.alignment = AlignmentPolicy(alignment)
        except ValueError:
            raise UsageError(f"unknown alignment policy {alignment!r}") from None
    tol = pick(args.psd_tol, "psd_tol")
    if tol is not None:
        cfg.psd_tol = float(tol)
    cfg.aggregates = bool(args.aggregates or file_cfg.get("aggregates", False))
    if not cfg.methods:
        raise UsageError("select at least one method")
    return cfg


@dataclass
class Inputs:
    catalog: CategoryCatalog
    base_map: BaseMap
    similarity: SimilarityMatrix
    groups: list[PublicationProfile]
    members: list[PublicationProfile]


def load_inputs(cfg: RunConfig) -> Inputs:
    if cfg.map_path is None:
        raise UsageError("--map is required")
    if cfg.profiles_path is None:
        raise UsageError("--profiles is required")
    catalog, base_map, similarity = to_model(parse_pajek(cfg.map_path.read_text(encoding="utf-8")))
    profiles = parse_profiles_csv(cfg.profiles_path.read_text(encoding="utf-8"))
    groups = sorted((p for p in profiles if p.kind is EntityKind.RESEARCH_GROUP), key=lambda p: p.entity_id)
    members = sorted((p for p in profiles if p.kind is EntityKind.PANEL_MEMBER), key=lambda p: p.entity_id)
    if not groups or not members:
        raise UsageError("profiles must contain at least one group and one panel member")
    if cfg.aggregates:
        ids = {p.entity_id for p in profiles}
        if GROUPS_AGGREGATE in ids or PANEL_AGGREGATE in ids:
            raise UsageError(f"entity ids {GROUPS_AGGREGATE!r}/{PANEL_AGGREGATE!r} are reserved with --aggregates")
        groups.append(aggregate_profiles(groups, GROUPS_AGGREGATE, EntityKind.AGGREGATE_GROUPS))
        members.append(aggregate_profiles(members, PANEL_AGGREGATE, EntityKind.AGGREGATE_PANEL))
    return Inputs(catalog, base_map, similarity, groups, members)


def compute(cfg: RunConfig, inputs: Inputs, methods: Sequence[Method]) -> dict[Method, MethodResult]:
    results = {}
    for method in methods:
        if method in results:
            continue
        result = distance_table(
            method,
            inputs.groups,
            inputs.members,
            inputs.catalog,
            base_map=inputs.base_map,
            similarity=inputs.similarity,
            policy=cfg.alignment,
            psd_tol=cfg.psd_tol,
        )
        for w in result.warnings:
            log.warning("%s: %s", method.value, w)
        results[method] = result
    return results


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _open(path: Path):
    return open(path, "w", encoding="utf-8", newline="")


def _dump_json(path: Path, payload: dict) -> None:
    with _open(path) as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_distances(result: MethodResult, out_dir: Path) -> Path:
    path = out_dir / f"{result.method.value}_distances.csv"
    # per-group minimum over individual members; ties go to the smaller id
    minima = {}
    for g in result.groups:
        candidates = [(result.entries[(g, m)], m) for m in result.members if not result.is_aggregate(m)]
        if candidates:
            minima[g] = min(candidates)[1]
    with _open(path) as fh:
        w = _writer(fh)
        w.writerow(["group", "member", "value", "is_group_min"])
        for g, m in sorted(result.entries):
            w.writerow([g, m, format_value(result.entries[(g, m)]), str(minima.get(g) == m).lower()])
    return path


def cmd_check(args: argparse.Namespace) -> int:
    if args.raw_matrix:
        matrix = np.loadtxt(args.raw_matrix, delimiter=",", ndmin=2)
    else:
        if not args.map:
            raise UsageError("--map is required")
        _, _, similarity = to_model(parse_pajek(Path(args.map).read_text(encoding="utf-8")))
        matrix = similarity
    tol = args.psd_tol if args.psd_tol is not None else DEFAULT_PSD_TOL
    report = psd_check(matrix, tol)
    print(f"N: {report.n}")
    print(f"symmetric: {str(report.is_symmetric).lower()}")
    print(f"min_eigenvalue: {report.min_eigenvalue!r}")
    print(f"max_eigenvalue: {report.max_eigenvalue!r}")
    print(f"PD: {str(report.is_positive_definite).lower()}")
    print(f"PSD: {str(report.is_positive_semidefinite).lower()}")
    return EXIT_OK if report.is_positive_definite else EXIT_NOT_PD


def cmd_distances(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    inputs = load_inputs(cfg)
    results = compute(cfg, inputs, cfg.methods)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    for result in results.values():
        write_distances(result, cfg.output_dir)
    return EXIT_OK


def _individual(entities) -> list[str]:
    return [p.entity_id for p in entities if not p.kind.is_aggregate]


def cmd_rank(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    inputs = load_inputs(cfg)
    assignments = None
    if cfg.assignments_path is not None:
        assignments = parse_assignments_csv(cfg.assignments_path.read_text(encoding="utf-8"))
    results = compute(cfg, inputs, cfg.methods)
    groups, members = _individual(inputs.groups), _individual(inputs.members)
    tables = {m: rank_members(r, groups, members, k=3) for m, r in results.items()}
    scores = {m: assessor_score(t, assignments) for m, t in tables.items()} if assignments else None

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    with _open(cfg.output_dir / "rankings.csv") as fh:
        w = _writer(fh)
        w.writerow(["method", "group", "rank", "member", "value"])
        for method, table in tables.items():
            for g in sorted(table.rankings):
                for e in table.rankings[g]:
                    w.writerow([method.value, g, e.rank, e.member, format_value(e.value)])
    if scores is not None:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "methods": {
                method.value: {
                    "variants": [
                        {"assigned": dict(c.chosen), "points": dict(c.points), "total": c.total}
                        for c in cards
                    ]
                }
                for method, cards in scores.items()
            },
        }
        _dump_json(cfg.output_dir / "scores.json", payload)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if len(cfg.methods) < 2:
        raise UsageError("compare needs at least two methods")
    inputs = load_inputs(cfg)
    computed = compute(cfg, inputs, cfg.methods)
    results = [computed[m] for m in cfg.methods]
    report = correlation_report(results, cfg.exclude)

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    pairs = []
    for (a, b), c in report.pairs.items():
        pairs.append({
            "method_a": a,
            "method_b": b,
            "pearson": c.pearson,
            "spearman": c.spearman,
            "n_pairs": c.n_pairs,
            "filtered": {
                "pearson": c.pearson_filtered,
                "spearman": c.spearman_filtered,
                "n_pairs": c.n_pairs_filtered,
            },
        })
    warnings = sorted({f"{r.method.value}: {w}" for r in results for w in r.warnings})
    _dump_json(cfg.output_dir / "correlations.json", {
        "schema_version": SCHEMA_VERSION,
        "excluded": list(report.excluded),
        "pairs": pairs,
        "warnings": warnings,
    })
    labels = report.methods
    for i in range(len(results)):
        for j in range(i + 1, len(results)):
            path = cfg.output_dir / f"scatter_{labels[i]}_{labels[j]}.csv"
            with _open(path) as fh:
                w = _writer(fh)
                w.writerow(["group", "member", "value_a", "value_b", "excluded"])
                for row in scatter_data(results[i], results[j], cfg.exclude):
                    w.writerow([row.group, row.member, format_value(row.value_a),
                                format_value(row.value_b), str(row.excluded).lower()])
    return EXIT_OK


def _add_run_flags(p: argparse.ArgumentParser, *, assignments: bool = False) -> None:
    p.add_argument("--config", help="JSON file with defaults for the flags below (flags win)")
    p.add_argument("--map", help="Pajek base map / similarity file")
    p.add_argument("--profiles", help="profiles CSV: entity,kind,category,count")
    if assignments:
        p.add_argument("--assignments", help="assignments CSV: group,main_assessor")
    else:
        p.set_defaults(assignments=None)
    p.add_argument(
        "--methods",
        help="comma-separated subset of barycenter, sapv, wcd, sapv-legacy "
        "(sapv-legacy is deprecated and kept for comparison only; default: sapv)",
    )
    p.add_argument("--exclude", help="comma-separated entity ids to leave out of filtered correlations")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--alignment", choices=[a.value for a in AlignmentPolicy],
                   help="how to treat categories missing from the map: strict (error) or drop")
    p.add_argument("--psd-tol", type=float, help=f"relative eigenvalue tolerance (default {DEFAULT_PSD_TOL:g})")
    p.add_argument("--aggregates", action="store_true", default=None,
                   help=f"add the {GROUPS_AGGREGATE!r} and {PANEL_AGGREGATE!r} aggregate entities")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cogdist", description="Cognitive distance between publication profiles.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="report size, symmetry and definiteness of the similarity matrix")
    p.add_argument("--map", help="Pajek base map / similarity file")
    p.add_argument("--psd-tol", type=float)
    p.add_argument("--raw-matrix", help=argparse.SUPPRESS)  # test hook: dense CSV matrix, no range checks
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("distances", help="write <method>_distances.csv for each method")
    _add_run_flags(p)
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("rank", help="write rankings.csv and, with --assignments, scores.json")
    _add_run_flags(p, assignments=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("compare", help="write correlations.json and scatter CSVs")
    _add_run_flags(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ComputationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
