"""Gear graphs: cyclic group shuffles realized as graph shuffles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Sequence

from .cards import ChoiceSource, VisibleTrace
from .const import CONF_GROUP_CAP, PROTOCOL_CYCLIC, ensure_config
from .errors import GearPropositionFails, InvariantViolation
from .graphs import DirectedGraph, automorphism_group_graph
from .perm import Permutation, PermutationGroup, cycle_decomposition, generate_group
from .protocols import (
    CostReport,
    Mutation,
    ProtocolRun,
    payload_ids,
    run_new_graph_shuffle,
)

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class GearShape:
    g: Permutation
    cycles: tuple[tuple[int, ...], ...]
    gcds: Dict[tuple[int, int], int] = field(hash=False)

    @classmethod
    def of(cls, g: Permutation) -> GearShape:
        """Cycles in ascending length, each from its smallest point; 1-cycles kept."""
        cycles = tuple(tuple(c) for c in cycle_decomposition(g))
        gcds = {
            (k, k2): math.gcd(len(cycles[k - 1]), len(cycles[k2 - 1]))
            for k in range(1, len(cycles) + 1)
            for k2 in range(k + 1, len(cycles) + 1)
        }
        return cls(g, cycles, gcds)


@dataclass(frozen=True)
class GearReport:
    holds: bool
    aut: PermutationGroup
    cyclic: PermutationGroup
    graph: DirectedGraph

    def to_dict(self) -> Dict:
        return {
            "holds": self.holds,
            "aut_order": self.aut.order(),
            "cyclic_order": self.cyclic.order(),
            "aut": [str(p) for p in self.aut],
            "cyclic": [str(p) for p in self.cyclic],
        }


def gear_graph(g: Permutation) -> DirectedGraph:
    """Q(g): each cycle as a directed cycle, plus cross edges between
    earlier and later cycles whose lengths share a divisor."""
    shape = GearShape.of(g)
    edges: list[tuple[int, int]] = []
    for cycle in shape.cycles:
        # a 1-cycle becomes a self-loop
        size = len(cycle)
        edges.extend((cycle[u], cycle[(u + 1) % size]) for u in range(size))
    for (k, k2), d in sorted(shape.gcds.items()):
        if d == 1:
            continue
        first, second = shape.cycles[k - 1], shape.cycles[k2 - 1]
        edges.extend(
            (first[u], second[v])
            for u in range(len(first))
            for v in range(len(second))
            if (u - v) % d == 0
        )
    _LOGGER.debug("Gear graph of %s has %d edges", g, len(edges))
    return DirectedGraph(g.n, edges)


def verify_gear(g: Permutation, config: Dict | None = None) -> GearReport:
    """Compare Aut_0(Q(g)) with the cyclic group generated by g."""
    graph = gear_graph(g)
    aut = automorphism_group_graph(graph, config)
    cyclic = generate_group([g], degree=g.n, config=config)
    holds = aut.elements == cyclic.elements
    if not holds:
        _LOGGER.warning(
            "Gear graph of %s has %d automorphisms but <g> has order %d",
            g,
            aut.order(),
            cyclic.order(),
        )
    return GearReport(holds, aut, cyclic, graph)


@lru_cache(maxsize=32)
def _checked_gear(g: Permutation, group_cap: int) -> GearReport:
    return verify_gear(g, {CONF_GROUP_CAP: group_cap})


def _trivial_run(n: int, inputs: Sequence[int]) -> ProtocolRun:
    # <id> is the trivial group; nothing to shuffle
    return ProtocolRun(
        protocol=PROTOCOL_CYCLIC.key,
        realized=Permutation.identity(n),
        trace=VisibleTrace(),
        cost=CostReport(n, 0, 0),
        output=tuple(inputs),
    )


def run_cyclic_shuffle(
    g: Permutation,
    choice: ChoiceSource,
    payloads: Sequence[int] | None = None,
    mutations: Iterable[Mutation] = (),
    config: Dict | None = None,
) -> ProtocolRun:
    """Uniform shuffle over <g>, run as the graph shuffle of Q(g)."""
    inputs = payload_ids(g.n, payloads)
    if g.is_identity():
        return _trivial_run(g.n, inputs)

    conf = ensure_config(config)
    report = _checked_gear(g, conf[CONF_GROUP_CAP])
    if not report.holds:
        raise GearPropositionFails(
            f"Aut_0(Q(g)) has order {report.aut.order()},"
            f" <g> has {report.cyclic.order()}"
        )
    run = run_new_graph_shuffle(
        report.graph, choice, payloads=inputs, mutations=mutations, config=conf
    )
    if run.realized not in report.cyclic:
        raise InvariantViolation(f"realized {run.realized} is outside <{g}>")
    run.protocol = PROTOCOL_CYCLIC.key
    return run
