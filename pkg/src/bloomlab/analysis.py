"""Influence ranking and named-scenario evaluation.

Influence is conditional mutual information in bits, computed exactly from
pairwise joint posteriors, so rankings are reproducible across runs and
backends. Scenarios bundle hard evidence with an optional named baseline;
evaluation reports the posterior under the scenario plus the signed
per-state difference from the baseline posterior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import Evidence, Network
from .errors import UnknownScenario, ValidationError
from .infer import PosteriorDistribution, joint_posterior, posterior_one


@dataclass(frozen=True)
class Scenario:
    """Named evidence bundle, optionally anchored to a baseline scenario."""

    name: str
    description: str
    evidence: Evidence
    baseline: str | None = None


@dataclass(frozen=True)
class SensitivityReport:
    """Nodes ranked by mutual information with the target, descending."""

    target: str
    entries: tuple[tuple[str, float], ...]

    def as_text(self) -> str:
        lines = [f"target: {self.target}"]
        width = max((len(name) for name, _ in self.entries), default=4)
        width = max(width, len("node"))
        lines.append(f"{'rank':>4}  {'node':<{width}}  mi_bits")
        for rank, (name, mi) in enumerate(self.entries, start=1):
            lines.append(f"{rank:>4}  {name:<{width}}  {mi:.6f}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ScenarioResult:
    """Posterior under a scenario and its per-state shift from the baseline."""

    scenario: str
    target: str
    posterior: PosteriorDistribution
    baseline: PosteriorDistribution
    delta: dict[str, float]

    def __iter__(self):
        return iter((self.posterior, self.delta))


@dataclass(frozen=True)
class ScenarioSet:
    """Named scenarios bundled with the model they were written for."""

    scenarios: tuple[Scenario, ...]
    model: str | None = None

    def __post_init__(self):
        seen = set()
        for scenario in self.scenarios:
            if scenario.name in seen:
                raise ValidationError(f"duplicate scenario name {scenario.name!r}")
            seen.add(scenario.name)

    def __iter__(self):
        return iter(self.scenarios)

    def get(self, name: str) -> Scenario:
        for scenario in self.scenarios:
            if scenario.name == name:
                return scenario
        raise UnknownScenario(f"no scenario named {name!r}")


def mutual_information(net: Network, a: str, b: str, evidence: Evidence | None = None) -> float:
    """MI(a; b | evidence) in bits from the exact pairwise joint posterior."""
    evidence = evidence or Evidence()
    pair = joint_posterior(net, (a, b), evidence)
    nd = pair.table.reshape(pair.cards)
    pa = nd.sum(axis=1)
    pb = nd.sum(axis=0)
    terms = []
    for i in range(nd.shape[0]):
        for j in range(nd.shape[1]):
            p = nd[i, j]
            if p > 0.0:
                terms.append(p * math.log2(p / (pa[i] * pb[j])))
    # exact independence can land a hair below zero in floating point
    return max(0.0, math.fsum(terms))


def sensitivity_ranking(
    net: Network, target: str, evidence: Evidence | None = None
) -> SensitivityReport:
    """Rank every unobserved non-target node by MI with ``target``.

    Ties sort alphabetically, so identical inputs produce identical reports.
    """
    evidence = evidence or Evidence()
    net.node(target)
    net.validate_evidence(evidence)
    scores = []
    for name in net.node_names():
        if name == target or name in evidence:
            continue
        scores.append((name, mutual_information(net, name, target, evidence)))
    scores.sort(key=lambda item: (-item[1], item[0]))
    return SensitivityReport(target, tuple(scores))


def _resolve_baseline(
    scenario: Scenario,
    scenarios: Mapping[str, Scenario] | Iterable[Scenario] | None,
) -> Evidence:
    if scenario.baseline is None:
        return Evidence()
    if scenarios is None:
        raise UnknownScenario(f"baseline scenario {scenario.baseline!r} is not available")
    if isinstance(scenarios, Mapping):
        table = dict(scenarios)
    else:
        table = {s.name: s for s in scenarios}
    if scenario.baseline not in table:
        raise UnknownScenario(f"baseline scenario {scenario.baseline!r} is not available")
    return table[scenario.baseline].evidence


def evaluate_scenario(
    net: Network,
    scenario: Scenario,
    target: str,
    scenarios: Mapping[str, Scenario] | Iterable[Scenario] | None = None,
) -> ScenarioResult:
    """Posterior of ``target`` under the scenario, with deltas vs its baseline.

    A scenario without a baseline is compared against the no-evidence
    posterior; a named baseline is looked up in ``scenarios``.
    """
    baseline_evidence = _resolve_baseline(scenario, scenarios)
    current = posterior_one(net, target, scenario.evidence)
    reference = posterior_one(net, target, baseline_evidence)
    delta = {
        state: current[state] - reference[state]
        for state in net.states(target)
    }
    return ScenarioResult(scenario.name, target, current, reference, delta)
