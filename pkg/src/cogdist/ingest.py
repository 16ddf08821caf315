"""Readers for the Pajek base-map/similarity file and the CSV inputs.

Pajek grammar accepted here::

    *Vertices N
    id "label" x y [z]
    ...
    *Edges            (or *Arcs)
    i j w

Keywords are case-insensitive, blank lines and ``%`` comments are ignored.
Other ``*`` sections (``*Network``, ``*Partition``, ``*Vector``...) are
skipped with a warning.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
import math
import re
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadHeader,
    ConflictingLinkWeights,
    DanglingLinkEndpoint,
    DuplicateLabel,
    DuplicatePair,
    InconsistentKind,
    MalformedHeader,
    NegativeCount,
    UnparsableLine,
    UnparsableRow,
    VertexCountMismatch,
    WeightOutOfRange,
)
from .model import (
    RANGE_TOL,
    BaseMap,
    CategoryCatalog,
    EntityKind,
    PublicationProfile,
    SimilarityMatrix,
)

log = logging.getLogger(__name__)

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_NUM_RE = re.compile(rf"^{_NUM}$")
_VERTEX_RE = re.compile(
    rf'^\s*(\d+)\s+(?:"([^"]*)"|([^\s"]+))\s+({_NUM})\s+({_NUM})(?:\s+({_NUM}))?\s*$'
)
_LINK_RE = re.compile(rf"^\s*(\d+)\s+(\d+)(?:\s+({_NUM}))?\s*$")
_SECTION_RE = re.compile(r"^\s*\*(\w+)(?:\s+(.*))?$")


class LinkKind(enum.Enum):
    EDGES = "Edges"
    ARCS = "Arcs"


@dataclass(frozen=True)
class PajekVertex:
    id: int
    label: str
    x: float
    y: float
    z: float | None = None


@dataclass(frozen=True)
class PajekLink:
    i: int
    j: int
    weight: float


@dataclass(frozen=True)
class PajekDocument:
    vertices: tuple[PajekVertex, ...]
    links: tuple[PajekLink, ...]
    link_kind: LinkKind = LinkKind.EDGES


def _number(tok: str, line_no: int, line: str) -> float:
    value = float(tok)
    if not math.isfinite(value):
        raise UnparsableLine(line_no, line)
    return value


def parse_pajek(text: str) -> PajekDocument:
    n_declared: int | None = None
    vertices: dict[int, PajekVertex] = {}
    links: list[PajekLink] = []
    link_kind: LinkKind | None = None
    section = None  # "vertices", "links", "skip"

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        head = _SECTION_RE.match(line)
        if head:
            keyword = head.group(1).lower()
            arg = (head.group(2) or "").strip()
            if keyword == "vertices":
                if n_declared is not None:
                    raise MalformedHeader(f"line {line_no}: second *Vertices section")
                try:
                    n_declared = int(arg.split()[0])
                except (IndexError, ValueError):
                    raise MalformedHeader(f"line {line_no}: bad *Vertices header {line!r}") from None
                if n_declared < 1:
                    raise MalformedHeader(f"line {line_no}: vertex count must be positive")
                section = "vertices"
            elif keyword in ("edges", "arcs"):
                if n_declared is None:
                    raise MalformedHeader(f"line {line_no}: *{head.group(1)} before *Vertices")
                if link_kind is not None:
                    raise MalformedHeader(f"line {line_no}: more than one link section")
                link_kind = LinkKind.EDGES if keyword == "edges" else LinkKind.ARCS
                section = "links"
            else:
                log.warning("line %d: skipping unsupported Pajek section *%s", line_no, head.group(1))
                section = "skip"
            continue

        if section == "vertices":
            m = _VERTEX_RE.match(line)
            if not m:
                raise UnparsableLine(line_no, line)
            vid = int(m.group(1))
            if not 1 <= vid <= n_declared or vid in vertices:
                raise VertexCountMismatch(
                    f"line {line_no}: vertex id {vid} is duplicated or outside 1..{n_declared}"
                )
            label = m.group(2) if m.group(2) is not None else m.group(3)
            z = _number(m.group(6), line_no, line) if m.group(6) else None
            vertices[vid] = PajekVertex(
                vid, label, _number(m.group(4), line_no, line), _number(m.group(5), line_no, line), z
            )
        elif section == "links":
            m = _LINK_RE.match(line)
            if not m:
                raise UnparsableLine(line_no, line)
            i, j = int(m.group(1)), int(m.group(2))
            for end in (i, j):
                if not 1 <= end <= n_declared:
                    raise DanglingLinkEndpoint(
                        f"line {line_no}: endpoint {end} outside 1..{n_declared}"
                    )
            w = _number(m.group(3), line_no, line) if m.group(3) else 1.0
            links.append(PajekLink(i, j, w))
        elif section == "skip":
            continue
        else:
            raise MalformedHeader(f"line {line_no}: data before *Vertices header")

    if n_declared is None:
        raise MalformedHeader("missing *Vertices header")
    if len(vertices) != n_declared:
        raise VertexCountMismatch(f"header declares {n_declared} vertices, found {len(vertices)}")
    return PajekDocument(
        vertices=tuple(vertices[k] for k in sorted(vertices)),
        links=tuple(links),
        link_kind=link_kind or LinkKind.EDGES,
    )


def serialize_pajek(doc: PajekDocument) -> str:
    """Canonical text form; floats use ``repr`` so re-parsing is exact."""
    out = [f"*Vertices {len(doc.vertices)}"]
    for v in doc.vertices:
        if '"' in v.label:
            raise ValueError(f"label {v.label!r} cannot be written in Pajek format")
        parts = [str(v.id), f'"{v.label}"', repr(float(v.x)), repr(float(v.y))]
        if v.z is not None:
            parts.append(repr(float(v.z)))
        out.append(" ".join(parts))
    out.append(f"*{doc.link_kind.value}")
    for link in doc.links:
        out.append(f"{link.i} {link.j} {float(link.weight)!r}")
    return "\n".join(out) + "\n"


def to_model(doc: PajekDocument) -> tuple[CategoryCatalog, BaseMap, SimilarityMatrix]:
    """Catalog, base map and similarity matrix described by a Pajek document.

    Links become symmetric similarities; pairs with no link get 0 and the
    diagonal is 1. Self-loops are ignored.
    """
    labels = [v.label for v in doc.vertices]
    seen: set[str] = set()
    for label in labels:
        if label in seen:
            raise DuplicateLabel(label)
        seen.add(label)
    catalog = CategoryCatalog(tuple(labels))
    coords = np.array([(v.x, v.y) for v in doc.vertices], dtype=float)

    n = len(labels)
    values = np.zeros((n, n))
    assigned = np.zeros((n, n), dtype=bool)
    for link in doc.links:
        w = link.weight
        if w < 0 or w > 1 + RANGE_TOL:
            raise WeightOutOfRange(f"link {link.i}-{link.j} has weight {w}")
        if link.i == link.j:
            continue
        a, b = link.i - 1, link.j - 1
        if assigned[a, b] and abs(values[a, b] - w) > 1e-9:
            raise ConflictingLinkWeights(
                f"link {link.i}-{link.j}: weights {values[a, b]} and {w} disagree"
            )
        values[a, b] = values[b, a] = w
        assigned[a, b] = assigned[b, a] = True
    np.fill_diagonal(values, 1.0)
    return catalog, BaseMap(catalog, coords), SimilarityMatrix(catalog, values)


def _csv_rows(text: str) -> Iterator[tuple[int, list[str]]]:
    reader = csv.reader(io.StringIO(text.lstrip("﻿")))
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        yield reader.line_num, [cell.strip() for cell in row]


_KINDS = {"group": EntityKind.RESEARCH_GROUP, "panel_member": EntityKind.PANEL_MEMBER}


def parse_profiles_csv(text: str) -> list[PublicationProfile]:
    """Profiles from ``entity,kind,category,count`` rows, in first-seen order.

    Repeated (entity, category) rows are summed.
    """
    rows = _csv_rows(text)
    header = next(rows, None)
    if header is None or header[1] != ["entity", "kind", "category", "count"]:
        raise BadHeader("expected header 'entity,kind,category,count'")
    kinds: dict[str, EntityKind] = {}
    counts: dict[str, dict[str, float]] = {}
    for line_no, row in rows:
        if len(row) != 4 or not row[0] or not row[2]:
            raise UnparsableRow(line_no, ",".join(row))
        entity, kind_s, category, count_s = row
        kind = _KINDS.get(kind_s)
        if kind is None or not _NUM_RE.match(count_s):
            raise UnparsableRow(line_no, ",".join(row))
        count = float(count_s)
        if count < 0:
            raise NegativeCount(f"line {line_no}: {entity}/{category} has count {count_s}")
        if kinds.setdefault(entity, kind) is not kind:
            raise InconsistentKind(
                f"line {line_no}: {entity} is {kinds[entity].value}, row says {kind.value}"
            )
        per = counts.setdefault(entity, {})
        per[category] = per.get(category, 0.0) + count
    return [PublicationProfile(e, kinds[e], c) for e, c in counts.items()]


@dataclass(frozen=True)
class Assignment:
    group: str
    main_assessor: str


@dataclass(frozen=True)
class AssignmentTable:
    """Group to main-assessor rows. A group listed more than once is contested."""

    rows: tuple[Assignment, ...]

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            if row in seen:
                raise DuplicatePair(f"{row.group},{row.main_assessor} listed twice")
            seen.add(row)

    def by_group(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for row in self.rows:
            out.setdefault(row.group, []).append(row.main_assessor)
        return out


def parse_assignments_csv(text: str) -> AssignmentTable:
    rows = _csv_rows(text)
    header = next(rows, None)
    if header is None or header[1] != ["group", "main_assessor"]:
        raise BadHeader("expected header 'group,main_assessor'")
    out = []
    for line_no, row in rows:
        if len(row) != 2 or not row[0] or not row[1]:
            raise UnparsableRow(line_no, ",".join(row))
        out.append(Assignment(row[0], row[1]))
    return AssignmentTable(tuple(out))
