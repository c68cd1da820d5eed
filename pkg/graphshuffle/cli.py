"""Command-line front end for graphshuffle."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Sequence

from .cards import SeededChoice
from .const import (
    CONF_BRANCH_CAP,
    CONF_MIN_TRIALS_PER_OUTCOME,
    CONF_SEED,
    DOMAIN,
    EXIT_CAP,
    EXIT_FAIL,
    EXIT_INPUT,
    EXIT_PASS,
    PROTOCOL_CYCLIC,
    PROTOCOLS,
    REPORT_SCHEMA,
    VERSION,
    ProtocolObj,
    ensure_config,
    load_config,
    protocol_by_name,
)
from .errors import CapExceeded, CardError, GraphShuffleError, InputError
from .gear import gear_graph, verify_gear
from .graphs import automorphism_group
from .instances import emit_instance, read_instance
from .perm import generate_group, parse_cycles
from .protocols import protocol_cost, protocol_runner
from .verify import (
    check_correctness,
    check_equivalence,
    check_security,
    exact_joint_distribution,
    statistical_uniformity,
)

_LOGGER = logging.getLogger(__name__)

FORMAT_TEXT = "text"
FORMAT_JSON = "json"

MODE_EXACT = "exact"
MODE_STAT = "stat"

_LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


@dataclass
class _Result:
    """What a subcommand hands back."""

    report: Dict[str, Any]
    lines: list[str]
    code: int = EXIT_PASS


# -----------------------------
# Argument parsing
# -----------------------------
def _protocol(name: str) -> ProtocolObj:
    try:
        return protocol_by_name(name)
    except GraphShuffleError as ex:
        raise argparse.ArgumentTypeError(str(ex)) from ex


def _add_target(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("file", nargs="?", help="instance file")
    parser.add_argument("--cycles", help='generator for cyclic, e.g. "(1 2)(3 4)"')
    parser.add_argument("--degree", type=int, help="degree of --cycles")


def build_parser() -> argparse.ArgumentParser:
    protocol_names = [p.cli_name for p in PROTOCOLS]
    parser = argparse.ArgumentParser(
        prog=DOMAIN, description="Card-based graph shuffle simulator and verifier"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument(
        "--format", choices=[FORMAT_TEXT, FORMAT_JSON], default=FORMAT_TEXT
    )
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    aut = sub.add_parser("aut", help="print the automorphism group")
    aut.add_argument("file", help="instance file")

    shuffle = sub.add_parser("shuffle", help="run a protocol once")
    shuffle.add_argument(
        "--protocol", type=_protocol, required=True, metavar="|".join(protocol_names)
    )
    shuffle.add_argument("--seed", type=int, help="choice seed (default from config)")
    shuffle.add_argument(
        "--debug", action="store_true", help="include intermediate permutations"
    )
    _add_target(shuffle)

    verify = sub.add_parser("verify", help="check correctness and security")
    verify.add_argument("--mode", choices=[MODE_EXACT, MODE_STAT], default=MODE_EXACT)
    verify.add_argument(
        "--protocol", type=_protocol, required=True, metavar="|".join(protocol_names)
    )
    verify.add_argument("--trials", type=int, help="runs in stat mode")
    verify.add_argument("--seed", type=int, help="master seed in stat mode")
    verify.add_argument("--max-branches", type=int, help="override the branch cap")
    _add_target(verify)

    equiv = sub.add_parser("equiv", help="compare the two graph protocols exactly")
    equiv.add_argument("--max-branches", type=int, help="override the branch cap")
    equiv.add_argument("file", help="instance file")

    gear = sub.add_parser("gear", help="build the gear graph of a permutation")
    gear.add_argument("cycles", help='cycle notation, e.g. "(1 2)(3 4 5 6)"')
    gear.add_argument("--degree", type=int, required=True)
    gear.add_argument("--verify", action="store_true", help="compare Aut with <g>")
    gear.add_argument("-o", "--output", help="write the digraph file here")

    cost = sub.add_parser("cost", help="card and shuffle counts")
    cost.add_argument(
        "--protocol", type=_protocol, required=True, metavar="|".join(protocol_names)
    )
    cost.add_argument("file", help="instance file")
    return parser


# -----------------------------
# Helpers
# -----------------------------
def _config(args: argparse.Namespace) -> Dict:
    conf = load_config(args.config)
    overrides = {}
    if getattr(args, "max_branches", None) is not None:
        overrides[CONF_BRANCH_CAP] = args.max_branches
    if getattr(args, "seed", None) is not None:
        overrides[CONF_SEED] = args.seed
    return ensure_config({**conf, **overrides}) if overrides else conf


def _target(args: argparse.Namespace, proto: ProtocolObj) -> Any:
    if proto is PROTOCOL_CYCLIC:
        if args.cycles is None or args.degree is None:
            raise InputError("cyclic needs --cycles and --degree")
        return parse_cycles(args.cycles, args.degree)
    if args.file is None:
        raise InputError(f"{proto.cli_name} needs an instance file")
    return read_instance(args.file).instance


def _group_of(instance: Any, proto: ProtocolObj, conf: Dict):
    if proto is PROTOCOL_CYCLIC:
        return generate_group([instance], degree=instance.n, config=conf)
    return automorphism_group(instance, conf)


# -----------------------------
# Subcommands
# -----------------------------
def cmd_aut(args: argparse.Namespace, conf: Dict) -> _Result:
    group = automorphism_group(read_instance(args.file).instance, conf)
    elements = [str(p) for p in sorted(group)]
    report = {"order": group.order(), "automorphisms": elements}
    return _Result(report, [f"order {group.order()}", *elements])


def cmd_shuffle(args: argparse.Namespace, conf: Dict) -> _Result:
    proto = args.protocol
    runner = protocol_runner(proto, _target(args, proto), config=conf)
    run = runner(SeededChoice(conf[CONF_SEED]))
    report = run.to_dict(debug=args.debug)
    lines = [
        f"protocol {proto.cli_name}",
        f"realized {run.realized}",
        f"output {' '.join(str(x) for x in run.output)}",
        "cost " + " ".join(f"{k}={v}" for k, v in run.cost.to_dict().items()),
        *run.trace.to_lines(),
    ]
    if args.debug:
        lines += [f"{k} {v}" for k, v in sorted(run.intermediate.items())]
    return _Result(report, lines)


def _verify_exact(runner: Callable, group, conf: Dict) -> _Result:
    joint = exact_joint_distribution(runner, conf)
    realized = joint.marginal(1)
    law = realized.to_dict()["outcomes"]
    correctness = check_correctness(realized, group)
    security = check_security(runner, conf, joint=joint)
    passed = correctness.passed and security.passed
    report = {
        "mode": MODE_EXACT,
        "passed": passed,
        "branches": joint.branches,
        "distribution": law,
        "correctness": correctness.to_dict(),
        "security": security.to_dict(),
    }
    lines = [
        f"branches {joint.branches}",
        f"|Aut| {correctness.aut_order}",
        *(f"rho {rho} {prob}" for rho, prob in law.items()),
        f"correctness {'pass' if correctness.passed else 'FAIL'}",
        f"security {'pass' if security.passed else 'FAIL'}"
        f" ({security.traces} traces, {security.violations} violations)",
    ]
    return _Result(report, lines, EXIT_PASS if passed else EXIT_FAIL)


def _verify_stat(
    runner: Callable, group, args: argparse.Namespace, conf: Dict
) -> _Result:
    trials = args.trials
    if trials is None:
        trials = 2 * conf[CONF_MIN_TRIALS_PER_OUTCOME] * group.order()
    result = statistical_uniformity(runner, group, trials, conf[CONF_SEED], conf)
    report = {"mode": MODE_STAT, **result.to_dict()}
    lines = [
        f"trials {result.trials}",
        f"chi_square {result.chi_square:.4f} dof {result.dof}"
        f" threshold {result.threshold:.4f}",
        f"outside {result.outside}",
        f"uniformity {'pass' if result.passed else 'FAIL'}",
    ]
    return _Result(report, lines, EXIT_PASS if result.passed else EXIT_FAIL)


def cmd_verify(args: argparse.Namespace, conf: Dict) -> _Result:
    proto = args.protocol
    instance = _target(args, proto)
    runner = protocol_runner(proto, instance, config=conf)
    group = _group_of(instance, proto, conf)
    if args.mode == MODE_STAT:
        result = _verify_stat(runner, group, args, conf)
    else:
        result = _verify_exact(runner, group, conf)
    result.report["protocol"] = proto.cli_name
    return result


def cmd_equiv(args: argparse.Namespace, conf: Dict) -> _Result:
    report = check_equivalence(read_instance(args.file).instance, conf)
    lines = [
        f"branches {report.first.branches} / {report.second.branches}",
        f"equivalence {'pass' if report.passed else 'FAIL'}",
    ]
    return _Result(report.to_dict(), lines, EXIT_PASS if report.passed else EXIT_FAIL)


def cmd_gear(args: argparse.Namespace, conf: Dict) -> _Result:
    g = parse_cycles(args.cycles, args.degree)
    text = emit_instance(gear_graph(g))
    report: Dict[str, Any] = {"g": str(g), "graph": text}
    lines = []
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as ex:
            raise InputError(f"cannot write {args.output}: {ex.strerror}") from ex
        lines.append(f"wrote {args.output}")
    else:
        lines.append(text.rstrip("\n"))

    code = EXIT_PASS
    if args.verify:
        gear = verify_gear(g, conf)
        report["verify"] = gear.to_dict()
        lines.append(
            f"holds {str(gear.holds).lower()}"
            f" |Aut| {gear.aut.order()} |<g>| {gear.cyclic.order()}"
        )
        code = EXIT_PASS if gear.holds else EXIT_FAIL
    return _Result(report, lines, code)


def cmd_cost(args: argparse.Namespace, conf: Dict) -> _Result:
    proto = args.protocol
    if proto is PROTOCOL_CYCLIC:
        raise InputError("cost applies to ms, graph and hyper")
    report = protocol_cost(read_instance(args.file).instance, proto, conf).to_dict()
    return _Result(report, [f"{k} {v}" for k, v in report.items()])


COMMANDS: Dict[str, Callable[[argparse.Namespace, Dict], _Result]] = {
    "aut": cmd_aut,
    "shuffle": cmd_shuffle,
    "verify": cmd_verify,
    "equiv": cmd_equiv,
    "gear": cmd_gear,
    "cost": cmd_cost,
}


# -----------------------------
# Entry point
# -----------------------------
def _emit(result: _Result, args: argparse.Namespace) -> None:
    if args.format == FORMAT_JSON:
        payload = {"schema": REPORT_SCHEMA, "command": args.command, **result.report}
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print("\n".join(result.lines))


def _exit_code(ex: GraphShuffleError) -> int:
    if isinstance(ex, CapExceeded):
        return EXIT_CAP
    if isinstance(ex, (InputError, CardError)):
        return EXIT_INPUT
    return EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=_LOG_LEVELS[min(args.verbose, len(_LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    _LOGGER.info("Starting %s v%s", DOMAIN, VERSION)

    try:
        conf = _config(args)
        result = COMMANDS[args.command](args, conf)
    except GraphShuffleError as ex:
        _LOGGER.debug("Command %s failed", args.command, exc_info=True)
        print(f"{DOMAIN}: error: {ex}", file=sys.stderr)
        return _exit_code(ex)

    _emit(result, args)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
