"""Card-based graph, hypergraph and cyclic group shuffles, with exact verification."""

from __future__ import annotations

from .const import DOMAIN, VERSION
from .gear import gear_graph, run_cyclic_shuffle, verify_gear
from .graphs import DirectedGraph, Hypergraph, automorphism_group
from .instances import emit_instance, parse_instance
from .perm import Permutation, parse_cycles
from .protocols import (
    Mutation,
    protocol_cost,
    protocol_runner,
    run_hypergraph_shuffle,
    run_ms_graph_shuffle,
    run_new_graph_shuffle,
)

__version__ = VERSION

__all__ = [
    "DOMAIN",
    "DirectedGraph",
    "Hypergraph",
    "Mutation",
    "Permutation",
    "automorphism_group",
    "emit_instance",
    "gear_graph",
    "parse_cycles",
    "parse_instance",
    "protocol_cost",
    "protocol_runner",
    "run_cyclic_shuffle",
    "run_hypergraph_shuffle",
    "run_ms_graph_shuffle",
    "run_new_graph_shuffle",
    "verify_gear",
]
