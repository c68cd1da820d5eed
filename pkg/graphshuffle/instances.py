"""Instance files: `<kind> <n> <m>` followed by one edge per line."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, VertexOutOfRange
from .graphs import DirectedGraph, Hypergraph

_LOGGER = logging.getLogger(__name__)

KIND_DIGRAPH = "digraph"
KIND_GRAPH = "graph"
KIND_HYPERGRAPH = "hypergraph"
KINDS = (KIND_DIGRAPH, KIND_GRAPH, KIND_HYPERGRAPH)

_COMMENT = "#"


@dataclass(frozen=True)
class InstanceFile:
    """A parsed file; `graph` files keep their kind but hold a Hypergraph."""

    kind: str
    instance: DirectedGraph | Hypergraph


def _ints(fields: list[str], lineno: int) -> list[int]:
    try:
        return [int(f) for f in fields]
    except ValueError as ex:
        raise ParseError(f"expected integers, got {' '.join(fields)!r}", lineno) from ex


def _check_vertices(values: list[int], n: int, lineno: int) -> None:
    for v in values:
        if not 1 <= v <= n:
            raise VertexOutOfRange(f"line {lineno}: vertex {v} outside 1..{n}")


def _body_lines(text: str) -> list[tuple[int, list[str]]]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split(_COMMENT, 1)[0].split()
        if fields:
            lines.append((lineno, fields))
    return lines


def parse_instance_file(text: str) -> InstanceFile:
    lines = _body_lines(text)
    if not lines:
        raise ParseError("empty instance file")

    lineno, header = lines[0]
    if len(header) != 3 or header[0] not in KINDS:
        raise ParseError(
            f"header must read '<{'|'.join(KINDS)}> <n> <m>', got {' '.join(header)!r}",
            lineno,
        )
    kind = header[0]
    n, m = _ints(header[1:], lineno)
    if n < 1:
        raise ParseError(f"an instance needs at least one vertex, got n={n}", lineno)
    if m < 0:
        raise ParseError("m must be non-negative", lineno)

    body = lines[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else None
        raise ParseError(f"header declares {m} edges, found {len(body)}", where)

    edges = []
    for lineno, fields in body:
        values = _ints(fields, lineno)
        if kind == KIND_HYPERGRAPH:
            if not values or values[0] != len(values) - 1:
                raise ParseError("hyperedge line must read 'k v1 .. vk'", lineno)
            members = values[1:]
            if not members:
                raise ParseError("empty hyperedge", lineno)
            if len(set(members)) != len(members):
                raise ParseError("hyperedge repeats a vertex", lineno)
        else:
            if len(values) != 2:
                raise ParseError("edge line must read 'u v'", lineno)
            members = values
            if kind == KIND_GRAPH and values[0] == values[1]:
                raise ParseError("undirected loops are not supported", lineno)
        _check_vertices(members, n, lineno)
        edges.append(members)

    if kind == KIND_DIGRAPH:
        instance: DirectedGraph | Hypergraph = DirectedGraph(
            n, [(u, v) for u, v in edges]
        )
    else:
        instance = Hypergraph(n, edges)
    _LOGGER.debug("Parsed %s with n=%d, m=%d", kind, n, m)
    return InstanceFile(kind, instance)


def parse_instance(text: str) -> DirectedGraph | Hypergraph:
    """Validated instance from file text; `graph` yields a Hypergraph of 2-sets."""
    return parse_instance_file(text).instance


def read_instance(path: str | Path) -> InstanceFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as ex:
        raise ParseError(f"cannot read {path}: {ex.strerror}") from ex
    return parse_instance_file(text)


def emit_instance(
    instance: DirectedGraph | Hypergraph | InstanceFile, kind: str | None = None
) -> str:
    """Canonical text: no comments, single spaces, edges in input order."""
    if isinstance(instance, InstanceFile):
        kind = kind or instance.kind
        instance = instance.instance
    if isinstance(instance, DirectedGraph):
        kind = KIND_DIGRAPH
        body = [f"{s} {t}" for s, t in instance.edges]
    elif kind == KIND_GRAPH and instance.is_graph():
        body = [" ".join(str(v) for v in sorted(e)) for e in instance.hyperedges]
    else:
        kind = KIND_HYPERGRAPH
        body = [
            " ".join(str(v) for v in [len(e), *sorted(e)]) for e in instance.hyperedges
        ]
    return "\n".join([f"{kind} {instance.n} {instance.m}", *body]) + "\n"
