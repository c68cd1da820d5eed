"""Directed multigraphs, hypergraphs and their isomorphisms."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator

from .const import CONF_GROUP_CAP, ensure_config
from .errors import GroupTooLarge, NotAGraph, VertexOutOfRange
from .perm import DegreeClassGroup, Permutation, PermutationGroup

_LOGGER = logging.getLogger(__name__)


class DirectedGraph:
    """Vertices 1..n and an ordered edge list; loops and parallel edges allowed."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise VertexOutOfRange(f"vertex count must be >= 0, got {n}")
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(
            (int(s), int(t)) for s, t in edges
        )
        for s, t in self.edges:
            if not (1 <= s <= n and 1 <= t <= n):
                raise VertexOutOfRange(f"edge {s}->{t} outside 1..{n}")
        self._mult = Counter(self.edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    def multiplicity(self, source: int, target: int) -> int:
        return self._mult.get((source, target), 0)

    def successors(self, vertex: int) -> list[int]:
        """Edge targets out of vertex, ascending, with multiplicity."""
        return sorted(t for s, t in self.edges if s == vertex)

    def relabel(self, p: Permutation) -> DirectedGraph:
        return DirectedGraph(self.n, ((p(s), p(t)) for s, t in self.edges))

    def edge_multiset(self) -> Counter:
        return Counter(self._mult)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.n == other.n and self._mult == other._mult

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, edges={list(self.edges)})"


class Hypergraph:
    """Vertices 1..n and a family (list) of nonempty vertex sets."""

    def __init__(self, n: int, hyperedges: Iterable[Iterable[int]] = ()):
        if n < 0:
            raise VertexOutOfRange(f"vertex count must be >= 0, got {n}")
        self.n = n
        family = []
        for idx, edge in enumerate(hyperedges, start=1):
            members = [int(v) for v in edge]
            if not members:
                raise VertexOutOfRange(f"hyperedge {idx} is empty")
            if len(set(members)) != len(members):
                raise VertexOutOfRange(f"hyperedge {idx} repeats a vertex")
            for v in members:
                if not 1 <= v <= n:
                    raise VertexOutOfRange(
                        f"hyperedge {idx} has vertex {v} outside 1..{n}"
                    )
            family.append(frozenset(members))
        self.hyperedges: tuple[frozenset[int], ...] = tuple(family)

    @property
    def m(self) -> int:
        return len(self.hyperedges)

    def incidence(self, vertex: int) -> list[int]:
        """E_H^(i): indices (1-based, ascending) of the hyperedges holding vertex."""
        return [j for j, e in enumerate(self.hyperedges, start=1) if vertex in e]

    def is_graph(self) -> bool:
        return all(len(e) == 2 for e in self.hyperedges)

    def family(self) -> Counter:
        return Counter(self.hyperedges)

    def relabel(self, p: Permutation) -> Hypergraph:
        return Hypergraph(self.n, ([p(v) for v in sorted(e)] for e in self.hyperedges))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.n == other.n and self.family() == other.family()

    def __repr__(self) -> str:
        family = [sorted(e) for e in self.hyperedges]
        return f"Hypergraph(n={self.n}, hyperedges={family})"


@dataclass(frozen=True)
class DegreeProfile:
    indegree: tuple[int, ...] = ()
    outdegree: tuple[int, ...] = ()
    incidence: tuple[int, ...] = ()


def degrees(instance: DirectedGraph | Hypergraph) -> DegreeProfile:
    """in/out degrees of a digraph, or incidence counts |E_H^(i)| of a hypergraph."""
    if isinstance(instance, Hypergraph):
        counts = Counter(v for e in instance.hyperedges for v in e)
        return DegreeProfile(
            incidence=tuple(counts[v] for v in range(1, instance.n + 1))
        )
    out = Counter(s for s, _ in instance.edges)
    inn = Counter(t for _, t in instance.edges)
    return DegreeProfile(
        indegree=tuple(inn[v] for v in range(1, instance.n + 1)),
        outdegree=tuple(out[v] for v in range(1, instance.n + 1)),
    )


def undirected_to_directed(H: Hypergraph) -> DirectedGraph:
    """Turn every undirected edge {u,v} into the 2-cycle u->v, v->u."""
    edges = []
    for idx, e in enumerate(H.hyperedges, start=1):
        if len(e) != 2:
            raise NotAGraph(f"hyperedge {idx} has {len(e)} vertices")
        u, v = sorted(e)
        edges.extend([(u, v), (v, u)])
    return DirectedGraph(H.n, edges)


# -----------------------------
# Isomorphisms
# -----------------------------
def _signature(G: DirectedGraph) -> list[tuple[int, int, int]]:
    prof = degrees(G)
    return [
        (prof.indegree[v - 1], prof.outdegree[v - 1], G.multiplicity(v, v))
        for v in range(1, G.n + 1)
    ]


def iter_graph_isomorphisms(
    G: DirectedGraph, G2: DirectedGraph
) -> Iterator[Permutation]:
    """Yield Iso_0(G, G2) in lexicographic order of the image tuple."""
    n = G.n
    if n != G2.n or G.m != G2.m or n == 0:
        return
    sig1 = _signature(G)
    sig2 = _signature(G2)
    if sorted(sig1) != sorted(sig2):
        return

    # neighbours of v among earlier vertices, with both edge directions
    earlier = [
        [(u, G.multiplicity(v, u), G.multiplicity(u, v)) for u in range(1, v)]
        for v in range(1, n + 1)
    ]
    image = [0] * (n + 1)
    used = [False] * (n + 1)

    def extend(v: int) -> Iterator[Permutation]:
        if v > n:
            yield Permutation(image[1:])
            return
        for w in range(1, n + 1):
            if used[w] or sig2[w - 1] != sig1[v - 1]:
                continue
            if any(
                G2.multiplicity(w, image[u]) != fwd
                or G2.multiplicity(image[u], w) != back
                for u, fwd, back in earlier[v - 1]
            ):
                continue
            used[w] = True
            image[v] = w
            yield from extend(v + 1)
            used[w] = False

    yield from extend(1)


def enumerate_graph_isomorphisms(
    G: DirectedGraph, G2: DirectedGraph
) -> list[Permutation]:
    return list(iter_graph_isomorphisms(G, G2))


@lru_cache(maxsize=4096)
def _first_graph_isomorphism(
    n: int, edges: tuple, edges2: tuple
) -> Permutation | None:
    pair = DirectedGraph(n, edges), DirectedGraph(n, edges2)
    return next(iter_graph_isomorphisms(*pair), None)


def first_graph_isomorphism(
    G: DirectedGraph, G2: DirectedGraph
) -> Permutation | None:
    """Lexicographically first element of Iso_0(G, G2), or None.

    Memoized on the two edge multisets.
    """
    if G.n != G2.n:
        return None
    edges, edges2 = tuple(sorted(G.edges)), tuple(sorted(G2.edges))
    return _first_graph_isomorphism(G.n, edges, edges2)


def _collect_capped(isos: Iterator[Permutation], config: Dict | None) -> list:
    cap = ensure_config(config)[CONF_GROUP_CAP]
    found = []
    for p in isos:
        found.append(p)
        if len(found) > cap:
            raise GroupTooLarge(f"automorphism group exceeds {cap} elements")
    return found


def automorphism_group_graph(
    G: DirectedGraph, config: Dict | None = None
) -> PermutationGroup:
    elements = _collect_capped(iter_graph_isomorphisms(G, G), config)
    _LOGGER.debug("Aut_0 of %r has order %d", G, len(elements))
    return PermutationGroup(G.n, elements, validate=False)


def _incidence_signature(H: Hypergraph) -> list[tuple[int, ...]]:
    # per vertex: sorted sizes of the hyperedges it lies in
    return [
        tuple(sorted(len(H.hyperedges[j - 1]) for j in H.incidence(v)))
        for v in range(1, H.n + 1)
    ]


def iter_hypergraph_isomorphisms(
    H: Hypergraph, H2: Hypergraph
) -> Iterator[Permutation]:
    """Yield Iso(H, H2) in lexicographic order of the image tuple."""
    n = H.n
    if n != H2.n or H.m != H2.m or n == 0:
        return
    if sorted(len(e) for e in H.hyperedges) != sorted(len(e) for e in H2.hyperedges):
        return
    sig1 = _incidence_signature(H)
    sig2 = _incidence_signature(H2)
    if sorted(sig1) != sorted(sig2):
        return

    target = H2.family()
    image = [0] * (n + 1)
    used = [False] * (n + 1)
    # a hyperedge is checkable once its largest vertex is mapped
    closes_at: Dict[int, list[frozenset[int]]] = {}
    for e in H.hyperedges:
        closes_at.setdefault(max(e), []).append(e)

    def consistent(v: int) -> bool:
        for e in closes_at.get(v, ()):
            mapped = frozenset(image[u] for u in e)
            if mapped not in target:
                return False
        return True

    def extend(v: int) -> Iterator[Permutation]:
        if v > n:
            perm = Permutation(image[1:])
            mapped = Counter(frozenset(perm(u) for u in e) for e in H.hyperedges)
            if mapped == target:
                yield perm
            return
        for w in range(1, n + 1):
            if used[w] or sig2[w - 1] != sig1[v - 1]:
                continue
            used[w] = True
            image[v] = w
            if consistent(v):
                yield from extend(v + 1)
            used[w] = False

    yield from extend(1)


def enumerate_hypergraph_isomorphisms(
    H: Hypergraph, H2: Hypergraph
) -> list[Permutation]:
    return list(iter_hypergraph_isomorphisms(H, H2))


def _family_key(H: Hypergraph) -> tuple:
    return tuple(sorted(tuple(sorted(e)) for e in H.hyperedges))


@lru_cache(maxsize=4096)
def _first_hypergraph_isomorphism(
    n: int, family: tuple, family2: tuple
) -> Permutation | None:
    pair = Hypergraph(n, family), Hypergraph(n, family2)
    return next(iter_hypergraph_isomorphisms(*pair), None)


def first_hypergraph_isomorphism(
    H: Hypergraph, H2: Hypergraph
) -> Permutation | None:
    """Lexicographically first element of Iso(H, H2), or None; memoized."""
    if H.n != H2.n:
        return None
    return _first_hypergraph_isomorphism(H.n, _family_key(H), _family_key(H2))


def automorphism_group_hypergraph(
    H: Hypergraph, config: Dict | None = None
) -> PermutationGroup:
    elements = _collect_capped(iter_hypergraph_isomorphisms(H, H), config)
    _LOGGER.debug("Aut of %r has order %d", H, len(elements))
    return PermutationGroup(H.n, elements, validate=False)


def automorphism_group(
    instance: DirectedGraph | Hypergraph, config: Dict | None = None
) -> PermutationGroup:
    """Aut_0 of a digraph or Aut of a hypergraph, capped at the group cap."""
    if isinstance(instance, Hypergraph):
        return automorphism_group_hypergraph(instance, config)
    return automorphism_group_graph(instance, config)


def is_automorphism(instance: DirectedGraph | Hypergraph, p: Permutation) -> bool:
    if p.n != instance.n:
        return False
    return instance.relabel(p) == instance


# -----------------------------
# Degree-class subgroups
# -----------------------------
def degree_preserving_subgroups(
    G: DirectedGraph, config: Dict | None = None
) -> tuple[DegreeClassGroup, DegreeClassGroup]:
    """H_G^in and H_G^out as lazily enumerated products of symmetric groups."""
    prof = degrees(G)
    return (
        DegreeClassGroup(prof.indegree, config=config),
        DegreeClassGroup(prof.outdegree, config=config),
    )


def incidence_preserving_subgroup(
    H: Hypergraph, config: Dict | None = None
) -> DegreeClassGroup:
    """S_H: permutations preserving |E_H^(i)|."""
    return DegreeClassGroup(degrees(H).incidence, config=config)


def total_degree_subgroup(
    G: DirectedGraph, config: Dict | None = None
) -> DegreeClassGroup:
    """Permutations preserving in(i)+out(i); bounds the two-deck label scramble."""
    prof = degrees(G)
    return DegreeClassGroup(
        [i + o for i, o in zip(prof.indegree, prof.outdegree)], config=config
    )


def brute_force_isomorphisms(
    first: DirectedGraph | Hypergraph, second: DirectedGraph | Hypergraph
) -> list[Permutation]:
    """Reference enumeration over all n! bijections (small n only)."""
    from itertools import permutations

    if first.n != second.n or first.n == 0:
        return []
    found = []
    for images in permutations(range(1, first.n + 1)):
        p = Permutation(images)
        if first.relabel(p) == second:
            found.append(p)
    return found

