"""Tests for gear graphs and cyclic group shuffles."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from graphshuffle.cards import SeededChoice, enumerate_runs
from graphshuffle.const import CONF_GROUP_CAP, PROTOCOL_CYCLIC
from graphshuffle.errors import GearPropositionFails, GroupTooLarge
from graphshuffle.gear import GearShape, gear_graph, run_cyclic_shuffle, verify_gear
from graphshuffle.graphs import is_automorphism
from graphshuffle.perm import Permutation, generate_group, identity, parse_cycles
from graphshuffle.protocols import protocol_runner
from graphshuffle.verify import exact_output_distribution

from .conftest import GEAR_LARGE, GEAR_SAMPLE


class TestGearShape:
    def test_cycles_sorted_by_length(self) -> None:
        shape = GearShape.of(parse_cycles("(4 5 6 7)(1 2 3)", 8))
        assert shape.cycles == ((8,), (1, 2, 3), (4, 5, 6, 7))
        assert shape.gcds == {(1, 2): 1, (1, 3): 1, (2, 3): 1}


class TestGearGraph:
    def test_sample_edges(self) -> None:
        G = gear_graph(parse_cycles(GEAR_SAMPLE, 6))
        assert G.edge_multiset() == {
            edge: 1
            for edge in [
                (1, 2),
                (2, 1),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 3),
                (1, 3),
                (1, 5),
                (2, 4),
                (2, 6),
            ]
        }

    def test_large_spot_checks(self) -> None:
        G = gear_graph(parse_cycles(GEAR_LARGE, 13))
        for edge in [(1, 8), (1, 11), (4, 12)]:
            assert G.multiplicity(*edge) == 1
        small, middle = {1, 2, 3}, {4, 5, 6, 7}
        assert not any(
            (s in small and t in middle) or (s in middle and t in small)
            for s, t in G.edges
        )

    def test_fixed_point_becomes_loop(self) -> None:
        G = gear_graph(parse_cycles("(1 2)", 3))
        assert G.multiplicity(3, 3) == 1


class TestVerifyGear:
    def test_sample_holds(self) -> None:
        report = verify_gear(parse_cycles(GEAR_SAMPLE, 6))
        assert report.holds
        assert report.aut.order() == 4

    def test_large_holds(self) -> None:
        report = verify_gear(parse_cycles(GEAR_LARGE, 13))
        assert report.holds
        assert report.aut.order() == report.cyclic.order() == 12

    def test_two_fixed_points_fail(self) -> None:
        """Two self-loop vertices can be swapped outside <g>."""
        report = verify_gear(identity(2))
        assert not report.holds
        assert report.aut.order() == 2
        assert report.cyclic.order() == 1
        assert report.to_dict()["holds"] is False

    def test_group_cap_propagates(self) -> None:
        with pytest.raises(GroupTooLarge):
            verify_gear(parse_cycles(GEAR_LARGE, 13), {CONF_GROUP_CAP: 5})


class TestCyclicShuffle:
    def test_three_cycle_is_a_uniform_cut(self) -> None:
        g = parse_cycles("(1 2 3)", 3)
        law = exact_output_distribution(protocol_runner(PROTOCOL_CYCLIC, g))
        rotations = generate_group([g])
        assert law.support() == set(rotations)
        assert all(law[p] == Fraction(1, 3) for p in rotations)

    def test_identity_is_trivial(self) -> None:
        run = run_cyclic_shuffle(identity(3), SeededChoice())
        assert run.realized.is_identity()
        assert len(run.trace) == 0
        assert run.cost.cards == 3

    def test_refuses_failing_gear(self) -> None:
        with pytest.raises(GearPropositionFails):
            run_cyclic_shuffle(parse_cycles("(1 2)", 4), SeededChoice())

    @pytest.mark.parametrize("seed", range(5))
    def test_realizes_a_power_of_g(self, seed: int) -> None:
        g = parse_cycles(GEAR_SAMPLE, 6)
        run = run_cyclic_shuffle(g, SeededChoice(seed))
        assert run.realized in verify_gear(g).cyclic
        assert run.protocol == "cyclic"

    def test_exhaustive_card_sequences(self) -> None:
        """Each of the four rotations of (1..6) appears with probability 1/4."""
        g = parse_cycles(GEAR_SAMPLE, 6)
        leaves = enumerate_runs(lambda choice: run_cyclic_shuffle(g, choice).output)
        law: dict[tuple[int, ...], Fraction] = {}
        for output, prob in leaves:
            law[output] = law.get(output, Fraction(0)) + prob
        assert law == {
            (1, 2, 3, 4, 5, 6): Fraction(1, 4),
            (2, 1, 6, 3, 4, 5): Fraction(1, 4),
            (1, 2, 5, 6, 3, 4): Fraction(1, 4),
            (2, 1, 4, 5, 6, 3): Fraction(1, 4),
        }


@pytest.mark.parametrize("seed", range(30))
def test_powers_of_g_are_gear_automorphisms(seed: int) -> None:
    """<g> acts on Q(g); a cycle pair with gcd d adds |c|*|c'|/d cross edges."""
    rng = random.Random(seed)
    n = rng.randint(1, 10)
    g = Permutation(rng.sample(range(1, n + 1), n))
    G = gear_graph(g)
    assert all(is_automorphism(G, p) for p in generate_group([g]))

    shape = GearShape.of(g)
    lengths = [len(c) for c in shape.cycles]
    cross = sum(
        lengths[k - 1] * lengths[k2 - 1] // d
        for (k, k2), d in shape.gcds.items()
        if d != 1
    )
    assert G.m == n + cross
