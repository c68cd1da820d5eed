"""Exact and statistical checks of correctness, security and equivalence."""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, Iterable

from scipy import stats

from .cards import ChoiceSource, SeededChoice, enumerate_runs
from .const import (
    CONF_CHI_SQUARE_QUANTILE,
    CONF_MIN_TRIALS_PER_OUTCOME,
    PROTOCOL_GRAPH,
    PROTOCOL_MS,
    ensure_config,
)
from .errors import InvariantViolation, SampleTooSmall
from .graphs import DirectedGraph, Hypergraph
from .perm import Permutation
from .protocols import ProtocolRun, protocol_runner

_LOGGER = logging.getLogger(__name__)

Runner = Callable[[ChoiceSource], ProtocolRun]


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _key_text(key: Any) -> str:
    if isinstance(key, tuple):
        return " ".join(_key_text(part) for part in key)
    return str(key)


@dataclass
class ExactDistribution:
    """Outcome -> exact probability; outcomes are permutations or (digest, ρ) pairs."""

    outcomes: Dict[Hashable, Fraction] = field(default_factory=dict)
    branches: int = 0

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[Hashable, Fraction]]
    ) -> ExactDistribution:
        dist = cls()
        for key, prob in pairs:
            dist.outcomes[key] = dist.outcomes.get(key, Fraction(0)) + prob
            dist.branches += 1
        return dist

    def support(self) -> set:
        return {key for key, prob in self.outcomes.items() if prob > 0}

    def total(self) -> Fraction:
        return sum(self.outcomes.values(), Fraction(0))

    def marginal(self, index: int) -> ExactDistribution:
        """Marginal over one component of tuple outcomes."""
        out = ExactDistribution(branches=self.branches)
        for key, prob in self.outcomes.items():
            part = key[index]
            out.outcomes[part] = out.outcomes.get(part, Fraction(0)) + prob
        return out

    def __getitem__(self, key: Hashable) -> Fraction:
        return self.outcomes.get(key, Fraction(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactDistribution):
            return NotImplemented
        keys = self.support() | other.support()
        return all(self[k] == other[k] for k in keys)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "branches": self.branches,
            "outcomes": {
                _key_text(key): format_fraction(prob)
                for key, prob in sorted(
                    self.outcomes.items(), key=lambda kv: _key_text(kv[0])
                )
            },
        }


# -----------------------------
# Exact distributions
# -----------------------------
def exact_joint_distribution(
    runner: Runner, config: Dict | None = None
) -> ExactDistribution:
    """Joint law of (trace digest, realized ρ) over every branch."""
    leaves = enumerate_runs(runner, config)
    traces: Dict[str, list[str]] = {}
    pairs = []
    for run, prob in leaves:
        digest = run.trace.digest()
        lines = run.trace.to_lines()
        seen = traces.setdefault(digest, lines)
        if seen != lines:
            raise InvariantViolation(f"trace digest collision on {digest}")
        pairs.append(((digest, run.realized), prob))
    dist = ExactDistribution.from_pairs(pairs)
    _LOGGER.debug("Joint law over %d distinct traces", len(traces))
    return dist


def exact_output_distribution(
    runner: Runner, config: Dict | None = None
) -> ExactDistribution:
    """Law of the realized permutation ρ."""
    leaves = enumerate_runs(runner, config)
    return ExactDistribution.from_pairs((run.realized, prob) for run, prob in leaves)


# -----------------------------
# Reports
# -----------------------------
@dataclass
class CorrectnessReport:
    passed: bool
    aut_order: int
    missing: list[Permutation] = field(default_factory=list)
    extra: list[Permutation] = field(default_factory=list)
    nonuniform: Dict[Permutation, Fraction] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "aut_order": self.aut_order,
            "missing": [str(p) for p in self.missing],
            "extra": [str(p) for p in self.extra],
            "nonuniform": {
                str(p): format_fraction(prob)
                for p, prob in sorted(self.nonuniform.items())
            },
        }


@dataclass
class SecurityReport:
    passed: bool
    traces: int
    outcomes: int
    violations: int
    example: tuple[str, str, str, str] | None = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "traces": self.traces,
            "outcomes": self.outcomes,
            "violations": self.violations,
            "example": list(self.example) if self.example else None,
        }


@dataclass
class EquivalenceReport:
    passed: bool
    first: ExactDistribution
    second: ExactDistribution

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            PROTOCOL_MS.key: self.first.to_dict(),
            PROTOCOL_GRAPH.key: self.second.to_dict(),
        }


@dataclass
class UniformityReport:
    passed: bool
    chi_square: float
    dof: int
    threshold: float
    trials: int
    counts: Dict[Permutation, int] = field(default_factory=dict)
    outside: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "chi_square": self.chi_square,
            "dof": self.dof,
            "threshold": self.threshold,
            "trials": self.trials,
            "outside": self.outside,
            "counts": {str(p): c for p, c in sorted(self.counts.items())},
        }


# -----------------------------
# Checks
# -----------------------------
def check_correctness(
    dist: ExactDistribution, aut: Iterable[Permutation]
) -> CorrectnessReport:
    """Pass iff the support is exactly Aut and every probability is 1/|Aut|."""
    group = set(aut)
    support = dist.support()
    expected = Fraction(1, len(group))
    report = CorrectnessReport(
        passed=False,
        aut_order=len(group),
        missing=sorted(group - support),
        extra=sorted(support - group),
        nonuniform={p: dist[p] for p in support & group if dist[p] != expected},
    )
    report.passed = not (report.missing or report.extra or report.nonuniform)
    if not report.passed:
        _LOGGER.warning(
            "Correctness fails: %d missing, %d extra, %d nonuniform",
            len(report.missing),
            len(report.extra),
            len(report.nonuniform),
        )
    return report


def check_security(
    runner: Runner,
    config: Dict | None = None,
    joint: ExactDistribution | None = None,
) -> SecurityReport:
    """Pass iff P(trace, ρ) == P(trace) P(ρ) for every pair, exactly."""
    if joint is None:
        joint = exact_joint_distribution(runner, config)
    by_trace = joint.marginal(0)
    by_outcome = joint.marginal(1)
    violations = 0
    example = None
    for digest in sorted(by_trace.support()):
        for rho in sorted(by_outcome.support()):
            observed = joint[(digest, rho)]
            product = by_trace[digest] * by_outcome[rho]
            if observed != product:
                violations += 1
                if example is None:
                    example = (
                        digest,
                        str(rho),
                        format_fraction(observed),
                        format_fraction(product),
                    )
    report = SecurityReport(
        passed=violations == 0,
        traces=len(by_trace.support()),
        outcomes=len(by_outcome.support()),
        violations=violations,
        example=example,
    )
    if not report.passed:
        _LOGGER.warning(
            "Trace and outcome are dependent on %d of %d pairs",
            violations,
            report.traces * report.outcomes,
        )
    return report


def check_equivalence(
    instance: DirectedGraph | Hypergraph, config: Dict | None = None
) -> EquivalenceReport:
    """Compare the exact output laws of the two graph protocols."""
    ms = exact_output_distribution(
        protocol_runner(PROTOCOL_MS, instance, config=config), config
    )
    graph = exact_output_distribution(
        protocol_runner(PROTOCOL_GRAPH, instance, config=config), config
    )
    report = EquivalenceReport(ms == graph, ms, graph)
    if not report.passed:
        _LOGGER.warning("Protocols disagree on %r", instance)
    return report


def statistical_uniformity(
    runner: Runner,
    aut: Iterable[Permutation],
    trials: int,
    seed: int = 0,
    config: Dict | None = None,
) -> UniformityReport:
    """Pearson chi-square of seeded runs against the uniform law on Aut."""
    conf = ensure_config(config)
    group = sorted(set(aut))
    minimum = conf[CONF_MIN_TRIALS_PER_OUTCOME] * len(group)
    if trials < minimum:
        raise SampleTooSmall(
            f"{trials} trials, need at least {minimum} for |Aut|={len(group)}"
        )

    master = random.Random(seed)
    tally: Counter = Counter()
    for _ in range(trials):
        run = runner(SeededChoice(master.getrandbits(64)))
        tally[run.realized] += 1
    members = set(group)
    outside = sum(c for p, c in tally.items() if p not in members)
    counts = {p: tally[p] for p in group}

    dof = len(group) - 1
    if dof == 0:
        # one possible outcome: no statistic, only membership
        report = UniformityReport(outside == 0, 0.0, 0, 0.0, trials, counts, outside)
    else:
        expected = trials / len(group)
        chi_square = sum((c - expected) ** 2 / expected for c in counts.values())
        threshold = float(stats.chi2.ppf(conf[CONF_CHI_SQUARE_QUANTILE], dof))
        report = UniformityReport(
            outside == 0 and chi_square < threshold,
            float(chi_square),
            dof,
            threshold,
            trials,
            counts,
            outside,
        )
    _LOGGER.info(
        "Chi-square %.3f on %d dof over %d trials: %s",
        report.chi_square,
        report.dof,
        trials,
        "pass" if report.passed else "fail",
    )
    return report
