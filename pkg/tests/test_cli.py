"""Tests for the command-line front end."""

from __future__ import annotations

import json
import logging
from unittest.mock import patch

import pytest

from graphshuffle.cli import main
from graphshuffle.const import (
    EXIT_CAP,
    EXIT_FAIL,
    EXIT_INPUT,
    EXIT_PASS,
    REPORT_SCHEMA,
    VERSION,
)
from graphshuffle.errors import InvariantViolation
from graphshuffle.instances import parse_instance

from .conftest import AUT_G34, GEAR_SAMPLE, SAMPLE_G34, SAMPLE_H54, SAMPLE_TWO_CYCLE


def _json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


class TestAut:
    def test_text(self, instance_file, capsys) -> None:
        assert main(["aut", instance_file(SAMPLE_G34)]) == EXIT_PASS
        lines = capsys.readouterr().out.splitlines()
        assert lines == ["order 4", "()", "(4 5)", "(1 3)", "(1 3)(4 5)"]

    def test_group_cap(self, instance_file, tmp_path) -> None:
        conf = tmp_path / "conf.json"
        conf.write_text('{"group_cap": 10}', encoding="utf-8")
        path = instance_file("digraph 6 0\n")
        assert main(["--config", str(conf), "aut", path]) == EXIT_CAP

    def test_no_vertices(self, instance_file) -> None:
        assert main(["aut", instance_file("digraph 0 0\n")]) == EXIT_INPUT

    def test_json(self, instance_file, capsys) -> None:
        assert main(["--format", "json", "aut", instance_file(SAMPLE_H54)]) == 0
        report = _json(capsys)
        assert report["schema"] == REPORT_SCHEMA
        assert report["command"] == "aut"
        assert report["order"] == 4


class TestShuffle:
    def test_seeded_output_is_reproducible(self, instance_file, capsys) -> None:
        argv = ["--format", "json", "shuffle", "--protocol", "graph", "--seed", "7"]
        path = instance_file(SAMPLE_G34)
        main([*argv, path])
        first = capsys.readouterr().out
        main([*argv, path])
        assert capsys.readouterr().out == first
        assert json.loads(first)["cost"]["effective_shuffles"] == 6

    def test_debug(self, instance_file, capsys) -> None:
        path = instance_file(SAMPLE_H54)
        argv = ["--format", "json", "shuffle", "--protocol", "hyper", "--debug", path]
        assert main(argv) == EXIT_PASS
        assert "psi" in _json(capsys)["intermediate"]

    def test_cyclic(self, capsys) -> None:
        argv = ["shuffle", "--protocol", "cyclic", "--cycles", GEAR_SAMPLE]
        assert main([*argv, "--degree", "6"]) == EXIT_PASS
        assert capsys.readouterr().out.startswith("protocol cyclic\n")

    def test_cyclic_needs_cycles(self) -> None:
        assert main(["shuffle", "--protocol", "cyclic"]) == EXIT_INPUT

    def test_file_needed(self) -> None:
        assert main(["shuffle", "--protocol", "ms"]) == EXIT_INPUT


class TestVerify:
    def test_exact_pass(self, instance_file, capsys) -> None:
        path = instance_file(SAMPLE_G34)
        argv = ["--format", "json", "verify", "--protocol", "graph", path]
        assert main(argv) == EXIT_PASS
        report = _json(capsys)
        assert report["branches"] == 2304
        assert report["distribution"] == {p: "1/4" for p in AUT_G34}
        assert report["correctness"]["passed"]
        assert report["security"]["passed"]

    def test_branch_cap(self, instance_file) -> None:
        path = instance_file(SAMPLE_G34)
        argv = ["verify", "--protocol", "graph", "--max-branches", "100", path]
        assert main(argv) == EXIT_CAP

    def test_cyclic_exact(self, capsys) -> None:
        argv = ["verify", "--protocol", "cyclic", "--cycles", "(1 2)", "--degree", "2"]
        assert main(argv) == EXIT_PASS
        out = capsys.readouterr().out
        assert "rho (1 2) 1/2" in out
        assert "correctness pass" in out

    def test_stat(self, instance_file, capsys) -> None:
        path = instance_file(SAMPLE_G34)
        argv = ["--format", "json", "verify", "--mode", "stat", "--protocol", "graph"]
        assert main([*argv, "--trials", "800", "--seed", "3", path]) == EXIT_PASS
        report = _json(capsys)
        assert report["mode"] == "stat"
        assert report["trials"] == 800

    def test_stat_too_few_trials(self, instance_file) -> None:
        path = instance_file(SAMPLE_G34)
        argv = ["verify", "--mode", "stat", "--protocol", "graph", "--trials", "5"]
        assert main([*argv, path]) == EXIT_CAP


class TestEquiv:
    def test_two_cycle(self, instance_file, capsys) -> None:
        assert main(["equiv", instance_file(SAMPLE_TWO_CYCLE)]) == EXIT_PASS
        assert "equivalence pass" in capsys.readouterr().out

    def test_internal_failure(self, instance_file) -> None:
        path = instance_file(SAMPLE_TWO_CYCLE)
        with patch(
            "graphshuffle.cli.check_equivalence",
            side_effect=InvariantViolation("broken"),
        ):
            assert main(["equiv", path]) == EXIT_FAIL


class TestGear:
    def test_verify(self, capsys) -> None:
        argv = ["--format", "json", "gear", GEAR_SAMPLE, "--degree", "6", "--verify"]
        assert main(argv) == EXIT_PASS
        report = _json(capsys)
        assert report["verify"]["holds"] is True
        assert report["verify"]["aut_order"] == 4

    def test_output_file(self, tmp_path) -> None:
        out = tmp_path / "gear.dg"
        assert main(["gear", GEAR_SAMPLE, "--degree", "6", "-o", str(out)]) == 0
        G = parse_instance(out.read_text(encoding="utf-8"))
        assert G.n == 6
        assert G.m == 10

    def test_failing_gear(self) -> None:
        assert main(["gear", "(1 2)", "--degree", "4", "--verify"]) == EXIT_FAIL

    def test_bad_cycles(self) -> None:
        assert main(["gear", "(1 9)", "--degree", "4"]) == EXIT_INPUT


class TestCost:
    def test_hyper(self, instance_file, capsys) -> None:
        path = instance_file(SAMPLE_H54)
        argv = ["--format", "json", "cost", "--protocol", "hyper", path]
        assert main(argv) == EXIT_PASS
        report = _json(capsys)
        assert report["cards"] == 12
        assert report["effective_shuffles"] == 3

    def test_protocol_mismatch(self, instance_file) -> None:
        path = instance_file(SAMPLE_G34)
        assert main(["cost", "--protocol", "hyper", path]) == EXIT_INPUT


class TestErrors:
    def test_missing_file(self, tmp_path) -> None:
        assert main(["aut", str(tmp_path / "absent.dg")]) == EXIT_INPUT

    def test_malformed_file(self, instance_file, capsys) -> None:
        assert main(["aut", instance_file("digraph 2 1\n1\n")]) == EXIT_INPUT
        assert "line 2" in capsys.readouterr().err

    def test_bad_config(self, instance_file, tmp_path) -> None:
        conf = tmp_path / "conf.json"
        conf.write_text('{"branch_cap": 0}', encoding="utf-8")
        path = instance_file(SAMPLE_G34)
        assert main(["--config", str(conf), "aut", path]) == EXIT_INPUT

    def test_unknown_protocol(self, instance_file) -> None:
        with pytest.raises(SystemExit) as err:
            main(["cost", "--protocol", "dot", instance_file(SAMPLE_G34)])
        assert err.value.code == 2

    def test_startup_log(self, instance_file, caplog) -> None:
        caplog.set_level(logging.INFO)
        main(["-v", "aut", instance_file(SAMPLE_G34)])
        assert f"Starting graphshuffle v{VERSION}" in caplog.text
