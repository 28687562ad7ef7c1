"""
Text formats for hypergraphs, morphisms and evolution logs.

Hypergraph file::

    # comment
    vertices: u v w          (optional; fixes the order before first use)
    0.5 : u v                (weight, colon, vertex labels)
    w                        (no colon: weight 0)

Morphism file: one ``v -> v'`` record per domain vertex.
Evolution log: a directory of ``<timestamp>.hg`` hypergraph files.
"""

import csv
import io
import logging
import os
from dataclasses import dataclass

from .errors import HypergraphError, ParseError, ValidationError
from .hypercore import FilteredHypergraph, Hypergraph, HypergraphMorphism, validate_morphism

log = logging.getLogger("hyperpersist.formats")

VERTICES_KEY = "vertices"
SNAPSHOT_SUFFIX = ".hg"


def format_value(value):
    """Render a filtration value or distance exactly; infinity is ``inf``.

    Integral floats print without a fractional part and every other float
    prints its shortest round-tripping form.
    """
    if isinstance(value, float):
        if value == float("inf"):
            return "inf"
        if value.is_integer():
            return str(int(value))
        return repr(value)
    return str(value)


def _parse_weight(token, path, line):
    token = token.strip()
    if not token:
        return 0
    try:
        return int(token)
    except ValueError:
        pass
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"weight {token!r} is not a number", path, line) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ParseError(f"weight {token!r} must be finite", path, line)
    return value


def _strip_comment(raw):
    return raw.split("#", 1)[0].strip()


def parse_hypergraph(text, path="<string>"):
    """Parse hypergraph text into a FilteredHypergraph.

    Raises:
        ParseError: bad weight, empty record, repeated declaration or
            duplicate hyperedge, with the offending line number.
    """
    vertices = []
    known = set()
    records = []
    seen = {}

    def declare(name):
        if name not in known:
            known.add(name)
            vertices.append(name)

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        head, sep, tail = line.partition(":")
        if sep and head.strip() == VERTICES_KEY:
            names = tail.split()
            if len(set(names)) != len(names):
                raise ParseError("vertex declared twice in one declaration", path, number)
            for name in names:
                declare(name)
            continue
        if sep:
            weight = _parse_weight(head, path, number)
            names = tail.split()
        else:
            weight = 0
            names = head.split()
        if not names:
            raise ParseError("hyperedge record has no vertices", path, number)
        for name in names:
            declare(name)
        key = frozenset(names)
        if key in seen:
            raise ParseError(f"duplicate hyperedge (first given on line {seen[key]})", path, number)
        seen[key] = number
        records.append((names, weight))

    position = {v: i for i, v in enumerate(vertices)}
    weights = {tuple(sorted({position[v] for v in names})): w for names, w in records}
    base = Hypergraph(tuple(vertices), frozenset(weights))
    log.debug("Parsed %s: %d vertices, %d hyperedges", path, len(vertices), len(weights))
    return FilteredHypergraph(base, weights)


def load_hypergraph(path):
    with open(path, encoding="utf-8") as handle:
        return parse_hypergraph(handle.read(), path=os.fspath(path))


def emit_hypergraph(f):
    """Canonical text: declaration line, then records by size and vertex order."""
    base = f.base
    lines = [f"{VERTICES_KEY}: {' '.join(base.vertices)}".rstrip()]
    for edge in base.sorted_edges():
        lines.append(f"{format_value(f.weight(edge))} : {' '.join(base.names(edge))}")
    return "\n".join(lines) + "\n"


def parse_morphism(text, domain, codomain, path="<string>"):
    """Parse ``v -> w`` records into a validated HypergraphMorphism.

    Raises:
        ParseError: malformed record or a vertex mapped twice.
        ValidationError: the map is not total or breaks a hyperedge.
    """
    mapping = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        left, sep, right = line.partition("->")
        source, target = left.strip(), right.strip()
        if not sep or not source or not target or len(source.split()) != 1 or len(target.split()) != 1:
            raise ParseError("expected a record of the form 'v -> w'", path, number)
        if source in mapping:
            raise ParseError(f"vertex {source!r} is mapped twice", path, number)
        mapping[source] = target
    ok, message = validate_morphism(mapping, domain, codomain)
    if not ok:
        raise ValidationError(f"{path}: {message}")
    return HypergraphMorphism.from_names(domain, codomain, mapping)


def load_morphism(path, domain, codomain):
    with open(path, encoding="utf-8") as handle:
        return parse_morphism(handle.read(), domain, codomain, path=os.fspath(path))


@dataclass(frozen=True)
class Snapshot:
    timestamp: str
    filtration: FilteredHypergraph


def _timestamp_key(name, path):
    stem = name[: -len(SNAPSHOT_SUFFIX)]
    try:
        return float(stem)
    except ValueError:
        raise ParseError(f"snapshot name {name!r} is not a numeric timestamp", path) from None


def load_evolution(directory):
    """Snapshots of an evolution log in timestamp order.

    Raises:
        ParseError: a snapshot file is malformed or misnamed.
        ValidationError: a snapshot drops a vertex or hyperedge of its predecessor.
    """
    directory = os.fspath(directory)
    names = [n for n in os.listdir(directory) if n.endswith(SNAPSHOT_SUFFIX)]
    names.sort(key=lambda n: _timestamp_key(n, os.path.join(directory, n)))
    snapshots = [
        Snapshot(n[: -len(SNAPSHOT_SUFFIX)], load_hypergraph(os.path.join(directory, n)))
        for n in names
    ]
    for earlier, later in zip(snapshots, snapshots[1:]):
        check_monotone(earlier, later)
    log.info("Loaded %d snapshots from %s", len(snapshots), directory)
    return snapshots


def check_monotone(earlier, later):
    """Every vertex and hyperedge of ``earlier`` must survive into ``later``."""
    small, large = earlier.filtration.base, later.filtration.base
    present = set(large.vertices)
    missing = [v for v in small.vertices if v not in present]
    if missing:
        raise ValidationError(
            f"snapshot {later.timestamp} drops vertex {missing[0]!r} of snapshot {earlier.timestamp}"
        )
    later_edges = {frozenset(large.names(e)) for e in large.hyperedges}
    for edge in small.sorted_edges():
        if frozenset(small.names(edge)) not in later_edges:
            raise ValidationError(
                f"snapshot {later.timestamp} drops hyperedge "
                f"{{{', '.join(small.names(edge))}}} of snapshot {earlier.timestamp}"
            )


def snapshot_inclusion(earlier, later):
    """The label-preserving inclusion morphism between two snapshots."""
    try:
        return HypergraphMorphism.inclusion(earlier.filtration.base, later.filtration.base)
    except HypergraphError as exc:
        raise ValidationError(str(exc)) from None


def csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(x) if isinstance(x, float) else x for x in row])
    return buffer.getvalue()
