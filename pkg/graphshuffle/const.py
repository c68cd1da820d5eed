from __future__ import annotations

"""
Constants & helpers for graphshuffle.
- Configuration/schema
- Protocol descriptors
- Exit codes and report schema version
"""

from typing import Any, Dict
import json
import logging
from pathlib import Path

import voluptuous as vol

from .errors import ConfigError, ProtocolMismatch

_LOGGER = logging.getLogger(__name__)

# -----------------------------
# Generals / Meta
# -----------------------------
DOMAIN = "graphshuffle"
VERSION = "0.3.0"
REPORT_SCHEMA = 1

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_CAP = 3

# -----------------------------
# Configuration
# -----------------------------
CONF_GROUP_CAP = "group_cap"
CONF_BRANCH_CAP = "branch_cap"
CONF_CHI_SQUARE_QUANTILE = "chi_square_quantile"
CONF_MIN_TRIALS_PER_OUTCOME = "min_trials_per_outcome"
CONF_SEED = "seed"

# Defaults
DEFAULT_GROUP_CAP = 1_000_000
DEFAULT_BRANCH_CAP = 10_000_000
DEFAULT_CHI_SQUARE_QUANTILE = 0.999
DEFAULT_MIN_TRIALS_PER_OUTCOME = 50
DEFAULT_SEED = 0

CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_GROUP_CAP, default=DEFAULT_GROUP_CAP): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_BRANCH_CAP, default=DEFAULT_BRANCH_CAP): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(
            CONF_CHI_SQUARE_QUANTILE, default=DEFAULT_CHI_SQUARE_QUANTILE
        ): vol.All(
            vol.Coerce(float),
            vol.Range(min=0, max=1, min_included=False, max_included=False),
        ),
        vol.Optional(
            CONF_MIN_TRIALS_PER_OUTCOME, default=DEFAULT_MIN_TRIALS_PER_OUTCOME
        ): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): vol.All(
            vol.Coerce(int), vol.Range(min=0, max=2**64 - 1)
        ),
    }
)


def ensure_config(user_input: Dict | None) -> Dict:
    """Complete a configuration with defaults and validate it."""
    out: Dict[str, Any] = {
        CONF_GROUP_CAP: DEFAULT_GROUP_CAP,
        CONF_BRANCH_CAP: DEFAULT_BRANCH_CAP,
        CONF_CHI_SQUARE_QUANTILE: DEFAULT_CHI_SQUARE_QUANTILE,
        CONF_MIN_TRIALS_PER_OUTCOME: DEFAULT_MIN_TRIALS_PER_OUTCOME,
        CONF_SEED: DEFAULT_SEED,
    }
    if user_input is not None:
        for key in out:
            if user_input.get(key) is not None:
                out[key] = user_input[key]
        dropped = sorted(set(user_input) - set(out))
        if dropped:
            _LOGGER.debug("Ignoring unknown config keys: %s", dropped)
    try:
        return CONFIG_SCHEMA(out)
    except vol.Invalid as ex:
        raise ConfigError(f"invalid configuration: {ex}") from ex


def load_config(path: str | Path | None) -> Dict:
    """Read a JSON config file (or nothing) into a validated config."""
    if path is None:
        return ensure_config(None)
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as ex:
        raise ConfigError(f"cannot read config {path}: {ex}") from ex
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return ensure_config(raw)


# -----------------------------
# Protocol descriptors
# -----------------------------
INSTANCE_DIGRAPH = "digraph"
INSTANCE_HYPERGRAPH = "hypergraph"
INSTANCE_CYCLIC = "cyclic"


class ProtocolObj:
    key: str
    cli_name: str
    instance_kind: str

    def __init__(self, key: str, cli_name: str, instance_kind: str):
        self.key = key
        self.cli_name = cli_name
        self.instance_kind = instance_kind

    @property
    def description(self) -> str:
        # "new_graph" -> "New Graph"
        return " ".join(part.capitalize() for part in self.key.split("_"))

    def check_applicable(self, instance: Any) -> None:
        from .graphs import DirectedGraph, Hypergraph
        from .perm import Permutation

        if self.instance_kind == INSTANCE_DIGRAPH:
            if isinstance(instance, DirectedGraph):
                return
            # undirected graphs travel as hypergraphs of 2-sets
            if isinstance(instance, Hypergraph) and instance.is_graph():
                return
        elif self.instance_kind == INSTANCE_HYPERGRAPH:
            if isinstance(instance, Hypergraph):
                return
        elif isinstance(instance, Permutation):
            return
        raise ProtocolMismatch(
            f"protocol {self.cli_name} does not apply to {type(instance).__name__}"
        )

    def __repr__(self) -> str:
        return f"ProtocolObj({self.key!r})"


PROTOCOL_MS = ProtocolObj("ms", "ms", INSTANCE_DIGRAPH)
PROTOCOL_GRAPH = ProtocolObj("new_graph", "graph", INSTANCE_DIGRAPH)
PROTOCOL_HYPER = ProtocolObj("hyper", "hyper", INSTANCE_HYPERGRAPH)
PROTOCOL_CYCLIC = ProtocolObj("cyclic", "cyclic", INSTANCE_CYCLIC)

PROTOCOLS = [
    PROTOCOL_MS,
    PROTOCOL_GRAPH,
    PROTOCOL_HYPER,
    PROTOCOL_CYCLIC,
]


def protocol_by_name(name: str) -> ProtocolObj:
    """Look a protocol up by cli name or key."""
    for proto in PROTOCOLS:
        if name in (proto.cli_name, proto.key):
            return proto
    raise ProtocolMismatch(f"unknown protocol {name!r}")
