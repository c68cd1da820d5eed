"""Tests for configuration handling and protocol descriptors."""

from __future__ import annotations

import json

import pytest

from graphshuffle.const import (
    CONF_BRANCH_CAP,
    CONF_CHI_SQUARE_QUANTILE,
    CONF_GROUP_CAP,
    CONF_SEED,
    DEFAULT_BRANCH_CAP,
    DEFAULT_CHI_SQUARE_QUANTILE,
    PROTOCOL_CYCLIC,
    PROTOCOL_GRAPH,
    PROTOCOL_HYPER,
    PROTOCOL_MS,
    ensure_config,
    load_config,
    protocol_by_name,
)
from graphshuffle.errors import ConfigError, ProtocolMismatch
from graphshuffle.graphs import DirectedGraph, Hypergraph
from graphshuffle.perm import identity


class TestEnsureConfig:
    def test_defaults(self) -> None:
        conf = ensure_config(None)
        assert conf[CONF_BRANCH_CAP] == DEFAULT_BRANCH_CAP
        assert conf[CONF_CHI_SQUARE_QUANTILE] == DEFAULT_CHI_SQUARE_QUANTILE
        assert conf[CONF_SEED] == 0

    def test_coercion(self) -> None:
        conf = ensure_config({CONF_GROUP_CAP: "500", CONF_CHI_SQUARE_QUANTILE: "0.99"})
        assert conf[CONF_GROUP_CAP] == 500
        assert conf[CONF_CHI_SQUARE_QUANTILE] == pytest.approx(0.99)

    def test_unknown_keys_dropped(self) -> None:
        assert "colour" not in ensure_config({"colour": "red"})

    def test_none_keeps_default(self) -> None:
        conf = ensure_config({CONF_BRANCH_CAP: None})
        assert conf[CONF_BRANCH_CAP] == DEFAULT_BRANCH_CAP

    @pytest.mark.parametrize(
        "bad",
        [
            {CONF_GROUP_CAP: 0},
            {CONF_BRANCH_CAP: "many"},
            {CONF_CHI_SQUARE_QUANTILE: 1.0},
            {CONF_SEED: -1},
        ],
    )
    def test_invalid(self, bad: dict) -> None:
        with pytest.raises(ConfigError):
            ensure_config(bad)


class TestLoadConfig:
    def test_no_file(self) -> None:
        assert load_config(None) == ensure_config(None)

    def test_file(self, tmp_path) -> None:
        path = tmp_path / "conf.json"
        path.write_text(json.dumps({CONF_BRANCH_CAP: 1234}), encoding="utf-8")
        assert load_config(path)[CONF_BRANCH_CAP] == 1234

    def test_missing_file(self, tmp_path) -> None:
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    def test_not_an_object(self, tmp_path) -> None:
        path = tmp_path / "conf.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)


class TestProtocols:
    def test_lookup_by_cli_name_and_key(self) -> None:
        assert protocol_by_name("graph") is PROTOCOL_GRAPH
        assert protocol_by_name("new_graph") is PROTOCOL_GRAPH
        assert protocol_by_name("ms") is PROTOCOL_MS

    def test_unknown(self) -> None:
        with pytest.raises(ProtocolMismatch):
            protocol_by_name("dot")

    def test_description(self) -> None:
        assert PROTOCOL_GRAPH.description == "New Graph"

    def test_applicability(self) -> None:
        G = DirectedGraph(2, [(1, 2)])
        pairs = Hypergraph(2, [[1, 2]])
        triple = Hypergraph(3, [[1, 2, 3]])
        PROTOCOL_MS.check_applicable(G)
        PROTOCOL_MS.check_applicable(pairs)
        PROTOCOL_HYPER.check_applicable(triple)
        PROTOCOL_CYCLIC.check_applicable(identity(2))
        for proto, instance in [
            (PROTOCOL_MS, triple),
            (PROTOCOL_HYPER, G),
            (PROTOCOL_CYCLIC, G),
        ]:
            with pytest.raises(ProtocolMismatch):
                proto.check_applicable(instance)
