"""Graph, two-deck and hypergraph shuffle protocols on the card table."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Sequence

from .cards import (
    CardTable,
    ChoiceSource,
    DeckClass,
    SeededChoice,
    SortKey,
    VisibleTrace,
    barred,
    generalized_pss,
    helper_layout,
    numbered,
    payload,
    pss,
    pss_within,
    rearrange,
    sort_piles_by_revealed,
    turn,
)
from .const import (
    CONF_SEED,
    PROTOCOL_CYCLIC,
    PROTOCOL_GRAPH,
    PROTOCOL_HYPER,
    PROTOCOL_MS,
    ProtocolObj,
    ensure_config,
    protocol_by_name,
)
from .errors import (
    DuplicatePoint,
    EmptyInstance,
    InvariantViolation,
    IsomorphismNotFound,
    LengthMismatch,
)
from .graphs import (
    DirectedGraph,
    Hypergraph,
    degree_preserving_subgroups,
    degrees,
    incidence_preserving_subgroup,
    is_automorphism,
    first_graph_isomorphism,
    first_hypergraph_isomorphism,
    total_degree_subgroup,
    undirected_to_directed,
)
from .perm import DegreeClassGroup, Permutation, compose, identity, inverse

_LOGGER = logging.getLogger(__name__)


class Mutation(Enum):
    """Deliberately crippled protocol variants for checking the checkers."""

    SKIP_EDGE_SCRAMBLE = "skip_edge_scramble"
    SKIP_VERTEX_SCRAMBLE = "skip_vertex_scramble"
    SKIP_PILE_SCRAMBLE = "skip_pile_scramble"


@dataclass(frozen=True)
class CostReport:
    cards: int
    nominal_shuffles: int
    effective_shuffles: int
    # 2k+n' count of the graph shuffle, n' = vertices with out-degree >= 2
    refined_shuffles: int | None = None

    def to_dict(self) -> Dict[str, int]:
        out = {
            "cards": self.cards,
            "nominal_shuffles": self.nominal_shuffles,
            "effective_shuffles": self.effective_shuffles,
        }
        if self.refined_shuffles is not None:
            out["refined_shuffles"] = self.refined_shuffles
        return out


@dataclass
class ProtocolRun:
    """Result of one protocol execution.

    `realized` is the ground-truth ρ with output = apply_to_positions(ρ, input);
    `output` lists the payload ids in output order.
    """

    protocol: str
    realized: Permutation
    trace: VisibleTrace
    cost: CostReport
    output: tuple[int, ...]
    intermediate: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self, debug: bool = False) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "protocol": self.protocol,
            "realized": str(self.realized),
            "output": list(self.output),
            "cost": self.cost.to_dict(),
            "trace": self.trace.to_json(),
        }
        if debug:
            out["intermediate"] = {
                key: str(value) for key, value in sorted(self.intermediate.items())
            }
        return out


# -----------------------------
# Helpers
# -----------------------------
def as_digraph(instance: DirectedGraph | Hypergraph) -> DirectedGraph:
    """Digraphs pass through; undirected graphs become 2-cycle digraphs."""
    if isinstance(instance, Hypergraph):
        return undirected_to_directed(instance)
    return instance


def _require_vertices(n: int) -> None:
    if n < 1:
        raise EmptyInstance("protocols need at least one vertex")


def payload_ids(n: int, payloads: Sequence[int] | None) -> tuple[int, ...]:
    if payloads is None:
        return tuple(range(1, n + 1))
    ids = tuple(int(p) for p in payloads)
    if len(ids) != n:
        raise LengthMismatch(f"{len(ids)} payloads for {n} vertices")
    if len(set(ids)) != n:
        raise DuplicatePoint("payload ids must be distinct")
    return ids


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise InvariantViolation(message)


def _member(group: DegreeClassGroup, perm: Permutation | None) -> bool:
    return perm is None or perm in group


def _realized(inputs: Sequence[int], output: Sequence[int]) -> Permutation:
    # ρ(i) is the output position of the i-th input card
    position = {value: idx for idx, value in enumerate(output, start=1)}
    return Permutation(position[value] for value in inputs)


def _take_from(counters: Dict[int, int], slot: int) -> tuple[int, int]:
    pos = counters[slot]
    counters[slot] = pos + 1
    return (slot, pos)


def _value_piles(
    table: CardTable, deck_class: DeckClass
) -> Dict[int, list[tuple[int, int]]]:
    """(pile, position) references of helper cards, grouped by value."""
    found: Dict[int, list[tuple[int, int]]] = {}
    for i, pile in enumerate(table.piles, start=1):
        for pos, card in enumerate(pile, start=1):
            if card.deck_class is deck_class:
                found.setdefault(card.value, []).append((i, pos))
    return found


def _restore(
    table: CardTable,
    payload_refs: Sequence[tuple[int, int]],
    helper_piles: Iterable[list[tuple[int, int]]],
    layout: tuple,
    cards: Counter,
) -> None:
    rearrange(table, [[ref] for ref in payload_refs] + list(helper_piles), "output")
    _check(table.card_multiset() == cards, "card multiset changed during the run")
    _check(helper_layout(table) == layout, "helper cards lost their first layout")


def _cost(
    instance: DirectedGraph | Hypergraph, proto: ProtocolObj, effective: int
) -> CostReport:
    n = instance.n
    if proto is PROTOCOL_HYPER:
        incidence = degrees(instance).incidence
        sizes = [len(e) for e in instance.hyperedges]
        nominal = n + len(set(incidence)) + len(set(sizes))
        report = CostReport(n + sum(sizes), nominal, effective)
    else:
        G = as_digraph(instance)
        prof = degrees(G)
        if proto is PROTOCOL_MS:
            d = len({i + o for i, o in zip(prof.indegree, prof.outdegree)})
            report = CostReport(2 * (n + G.m), d + 1, effective)
        else:
            k = len(set(prof.outdegree))
            n_prime = sum(1 for o in prof.outdegree if o >= 2)
            report = CostReport(2 * n + G.m, n + 2 * k, effective, 2 * k + n_prime)
    if report.effective_shuffles > report.nominal_shuffles:
        _LOGGER.warning(
            "%s used %d shuffles, above its nominal count %d",
            proto.description,
            report.effective_shuffles,
            report.nominal_shuffles,
        )
    return report


# -----------------------------
# Graph shuffle with 2n+m cards
# -----------------------------
def run_new_graph_shuffle(
    G: DirectedGraph | Hypergraph,
    choice: ChoiceSource,
    payloads: Sequence[int] | None = None,
    mutations: Iterable[Mutation] = (),
    config: Dict | None = None,
) -> ProtocolRun:
    G = as_digraph(G)
    n = G.n
    _require_vertices(n)
    mutations = frozenset(mutations)
    inputs = payload_ids(n, payloads)
    prof = degrees(G)
    h_in, h_out = degree_preserving_subgroups(G, config)

    # input cards, then pile[i] of in(i)+1 copies of i
    table = CardTable(
        [[payload(x)] for x in inputs]
        + [numbered(i, prof.indegree[i - 1] + 1) for i in range(1, n + 1)]
    )
    layout = helper_layout(table)
    cards = table.card_multiset()

    # scramble the label piles
    sigma = generalized_pss(table, range(n + 1, 2 * n + 1), choice)
    _check(_member(h_in, sigma), f"label scramble {sigma} leaves H_in")
    _LOGGER.debug("Vertex labels scrambled: sigma=%s", sigma)

    # vertex[i] = x_i, alpha_i, alpha_w for every edge i->w (targets ascending)
    counters = {n + i: 1 for i in range(1, n + 1)}
    recipe = []
    for i in range(1, n + 1):
        refs = [(i, 1), _take_from(counters, n + i)]
        refs.extend(_take_from(counters, n + w) for w in G.successors(i))
        recipe.append(refs)
    rearrange(table, recipe, "vertex piles")

    # scramble the edge cards inside each vertex pile
    if Mutation.SKIP_EDGE_SCRAMBLE not in mutations:
        for i in range(1, n + 1):
            out = prof.outdegree[i - 1]
            if out >= 2:
                pss_within(table, i, range(3, out + 3), choice)

    # scramble the vertex piles
    tau = None
    if Mutation.SKIP_VERTEX_SCRAMBLE not in mutations:
        tau = generalized_pss(table, range(1, n + 1), choice)
    _check(_member(h_out, tau), f"vertex scramble {tau} leaves H_out")

    # open everything but the input cards, sort by label
    for k in range(1, n + 1):
        for pos in range(2, len(table.pile(k)) + 1):
            turn(table, k, pos)
    sort_piles_by_revealed(table, SortKey((2,)))

    # read the relabelled graph off the table
    derived = DirectedGraph(
        n,
        [(i, card.value) for i in range(1, n + 1) for card in table.pile(i)[2:]],
    )

    # undo the relabelling with the first isomorphism onto G
    psi = first_graph_isomorphism(derived, G)
    if psi is None:
        raise IsomorphismNotFound(f"{derived!r} is not isomorphic to {G!r}")
    psi_inv = inverse(psi)
    numbered_refs = _value_piles(table, DeckClass.NUMBERED)
    _restore(
        table,
        [(psi_inv(i), 1) for i in range(1, n + 1)],
        (numbered_refs[v] for v in range(1, n + 1)),
        layout,
        cards,
    )

    output = table.payload_order()
    rho = _realized(inputs, output)
    _check(rho == compose(psi, inverse(sigma)), "output is not psi after sigma^-1")
    _check(is_automorphism(G, rho), f"realized {rho} is not an automorphism")
    return ProtocolRun(
        protocol=PROTOCOL_GRAPH.key,
        realized=rho,
        trace=table.trace,
        cost=_cost(G, PROTOCOL_GRAPH, table.trace.shuffle_count()),
        output=output,
        intermediate={
            "sigma": sigma,
            "tau": tau if tau is not None else identity(n),
            "psi": psi,
            "derived": derived,
        },
    )


# -----------------------------
# Two-deck graph shuffle with 2(n+m) cards
# -----------------------------
def run_ms_graph_shuffle(
    G: DirectedGraph | Hypergraph,
    choice: ChoiceSource,
    payloads: Sequence[int] | None = None,
    mutations: Iterable[Mutation] = (),
    config: Dict | None = None,
) -> ProtocolRun:
    G = as_digraph(G)
    n, m = G.n, G.m
    _require_vertices(n)
    mutations = frozenset(mutations)
    inputs = payload_ids(n, payloads)
    prof = degrees(G)

    # pile[i] = barred i, then in(i)+out(i) numbered copies of i
    table = CardTable(
        [[payload(x)] for x in inputs]
        + [
            [barred(i)] + numbered(i, prof.indegree[i - 1] + prof.outdegree[i - 1])
            for i in range(1, n + 1)
        ]
    )
    layout = helper_layout(table)
    cards = table.card_multiset()

    # scramble the label piles
    sigma = generalized_pss(table, range(n + 1, 2 * n + 1), choice)
    _check(
        _member(total_degree_subgroup(G, config), sigma),
        f"label scramble {sigma} changes total degrees",
    )

    # vertex[i] = (barred alpha_i, x_i); edge[i->j] = (alpha_i, alpha_j)
    counters = {n + i: 2 for i in range(1, n + 1)}
    recipe = [[(n + i, 1), (i, 1)] for i in range(1, n + 1)]
    for s, t in G.edges:
        recipe.append([_take_from(counters, n + s), _take_from(counters, n + t)])
    rearrange(table, recipe, "vertex and edge piles")

    # scramble all vertex and edge piles together
    if Mutation.SKIP_PILE_SCRAMBLE not in mutations and n + m >= 2:
        pss(table, range(1, n + m + 1), choice)

    # left cards up; a numbered left card means an edge pile, open it fully
    for k in range(1, n + m + 1):
        turn(table, k, 1)
        if table.pile(k)[0].deck_class is DeckClass.NUMBERED:
            turn(table, k, 2)
    # parallel edges leave identical open edge piles
    sort_piles_by_revealed(table, SortKey((1, 2)), allow_identical_public=True)

    # edge piles spell out the relabelled graph
    derived = DirectedGraph(
        n,
        [
            (table.pile(k)[0].value, table.pile(k)[1].value)
            for k in range(n + 1, n + m + 1)
        ],
    )

    # y_i sits right of barred beta_i, beta_i = psi^-1(i)
    psi = first_graph_isomorphism(derived, G)
    if psi is None:
        raise IsomorphismNotFound(f"{derived!r} is not isomorphic to {G!r}")
    psi_inv = inverse(psi)
    numbered_refs = _value_piles(table, DeckClass.NUMBERED)
    _restore(
        table,
        [(psi_inv(i), 2) for i in range(1, n + 1)],
        ([(v, 1)] + numbered_refs.get(v, []) for v in range(1, n + 1)),
        layout,
        cards,
    )

    output = table.payload_order()
    rho = _realized(inputs, output)
    _check(rho == compose(psi, inverse(sigma)), "output is not psi after sigma^-1")
    _check(is_automorphism(G, rho), f"realized {rho} is not an automorphism")
    return ProtocolRun(
        protocol=PROTOCOL_MS.key,
        realized=rho,
        trace=table.trace,
        cost=_cost(G, PROTOCOL_MS, table.trace.shuffle_count()),
        output=output,
        intermediate={"sigma": sigma, "psi": psi, "derived": derived},
    )


# -----------------------------
# Hypergraph shuffle with n+sum|e| cards
# -----------------------------
def run_hypergraph_shuffle(
    H: Hypergraph,
    choice: ChoiceSource,
    payloads: Sequence[int] | None = None,
    mutations: Iterable[Mutation] = (),
    config: Dict | None = None,
) -> ProtocolRun:
    n, m = H.n, H.m
    _require_vertices(n)
    mutations = frozenset(mutations)
    inputs = payload_ids(n, payloads)
    incidence = degrees(H).incidence
    sizes = [len(e) for e in H.hyperedges]

    # pile[j] = |e_j| copies of j
    table = CardTable(
        [[payload(x)] for x in inputs]
        + [numbered(j, sizes[j - 1]) for j in range(1, m + 1)]
    )
    layout = helper_layout(table)
    cards = table.card_multiset()

    # scramble the hyperedge label piles
    sigma = generalized_pss(table, range(n + 1, n + m + 1), choice)
    _check(
        _member(DegreeClassGroup(sizes, config=config), sigma),
        f"label scramble {sigma} changes hyperedge sizes",
    )

    # vertex[i] = x_i, then alpha_j for j in E_H^(i) ascending
    counters = {n + j: 1 for j in range(1, m + 1)}
    recipe = []
    for i in range(1, n + 1):
        recipe.append([(i, 1)] + [_take_from(counters, n + j) for j in H.incidence(i)])
    rearrange(table, recipe, "vertex piles")

    # scramble the label cards inside each vertex pile
    if Mutation.SKIP_EDGE_SCRAMBLE not in mutations:
        for i in range(1, n + 1):
            s = incidence[i - 1]
            if s >= 2:
                pss_within(table, i, range(2, s + 2), choice)

    # scramble the vertex piles
    tau = None
    if Mutation.SKIP_VERTEX_SCRAMBLE not in mutations:
        tau = generalized_pss(table, range(1, n + 1), choice)
    _check(
        _member(incidence_preserving_subgroup(H, config), tau),
        f"vertex scramble {tau} leaves S_H",
    )

    # open the label cards; positions are read as they lie, no sort
    for k in range(1, n + 1):
        for pos in range(2, len(table.pile(k)) + 1):
            turn(table, k, pos)

    # vertex k lies in e~_j iff card j shows in pile k
    members: Dict[int, list[int]] = {j: [] for j in range(1, m + 1)}
    for k in range(1, n + 1):
        for card in table.pile(k)[1:]:
            members[card.value].append(k)
    derived = Hypergraph(n, [members[j] for j in range(1, m + 1)])

    # z_i = y_psi(i)
    psi = first_hypergraph_isomorphism(H, derived)
    if psi is None:
        raise IsomorphismNotFound(f"{H!r} is not isomorphic to {derived!r}")
    numbered_refs = _value_piles(table, DeckClass.NUMBERED)
    _restore(
        table,
        [(psi(i), 1) for i in range(1, n + 1)],
        (numbered_refs[j] for j in range(1, m + 1)),
        layout,
        cards,
    )

    output = table.payload_order()
    rho = _realized(inputs, output)
    tau_eff = tau if tau is not None else identity(n)
    _check(rho == compose(inverse(psi), tau_eff), "output is not psi^-1 after tau")
    _check(is_automorphism(H, rho), f"realized {rho} is not an automorphism")
    return ProtocolRun(
        protocol=PROTOCOL_HYPER.key,
        realized=rho,
        trace=table.trace,
        cost=_cost(H, PROTOCOL_HYPER, table.trace.shuffle_count()),
        output=output,
        intermediate={
            "sigma": sigma if sigma is not None else "()",
            "tau": tau_eff,
            "psi": psi,
            "derived": derived,
        },
    )


# -----------------------------
# Dispatch and cost
# -----------------------------
def _resolve(protocol: ProtocolObj | str) -> ProtocolObj:
    if isinstance(protocol, ProtocolObj):
        return protocol
    return protocol_by_name(protocol)


def protocol_runner(
    protocol: ProtocolObj | str,
    instance: Any,
    payloads: Sequence[int] | None = None,
    mutations: Iterable[Mutation] = (),
    config: Dict | None = None,
) -> Callable[[ChoiceSource], ProtocolRun]:
    """Bind a protocol to an instance; the result runs once per ChoiceSource."""
    proto = _resolve(protocol)
    proto.check_applicable(instance)
    mutations = tuple(mutations)

    if proto is PROTOCOL_CYCLIC:
        from .gear import run_cyclic_shuffle

        return lambda choice: run_cyclic_shuffle(
            instance, choice, payloads=payloads, mutations=mutations, config=config
        )

    run = {
        PROTOCOL_MS.key: run_ms_graph_shuffle,
        PROTOCOL_GRAPH.key: run_new_graph_shuffle,
        PROTOCOL_HYPER.key: run_hypergraph_shuffle,
    }[proto.key]
    return lambda choice: run(
        instance, choice, payloads=payloads, mutations=mutations, config=config
    )


def protocol_cost(
    instance: Any, protocol: ProtocolObj | str, config: Dict | None = None
) -> CostReport:
    """Card and shuffle counts; effective counts come from one seeded run."""
    conf = ensure_config(config)
    run = protocol_runner(protocol, instance, config=conf)
    return run(SeededChoice(conf[CONF_SEED])).cost
