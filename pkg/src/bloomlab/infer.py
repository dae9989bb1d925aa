"""Exact inference by variable elimination, plus a brute-force oracle.

Factors are flat, C-ordered probability tables over an explicit scope,
using the same layout as CPT rows (last scope variable varies fastest).
Elimination order comes from the min-fill heuristic with alphabetical
tie-breaking, so queries are deterministic. Intermediate factors are
renormalized after every elimination step to keep deep products away
from underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .core import Evidence, Network
from .errors import (
    InconsistentEvidence,
    OverlappingSets,
    StateSpaceTooLarge,
    ValidationError,
    ZeroProbabilityEvidence,
)

ENUMERATION_LIMIT = 2 ** 20
POSTERIOR_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Factor:
    """Nonnegative table over the joint states of ``scope``."""

    scope: tuple[str, ...]
    cards: tuple[int, ...]
    table: np.ndarray  # flat, length prod(cards)

    def __post_init__(self):
        expected = int(np.prod(self.cards)) if self.cards else 1
        if self.table.shape != (expected,):
            raise ValueError(f"table length {self.table.shape} != prod(cards) {expected}")

    @property
    def size(self) -> int:
        return self.table.size

    def total(self) -> float:
        return float(self.table.sum())

    def multiply(self, other: "Factor") -> "Factor":
        scope = list(self.scope)
        cards = list(self.cards)
        for var, card in zip(other.scope, other.cards):
            if var not in self.scope:
                scope.append(var)
                cards.append(card)
        positions = {var: i for i, var in enumerate(scope)}
        a_pos = np.arange(len(self.scope), dtype=np.int64)
        b_pos = np.array([positions[v] for v in other.scope], dtype=np.int64)
        out_cards = np.array(cards, dtype=np.int64)
        table = kernels.multiply(out_cards, self.table, a_pos, other.table, b_pos)
        return Factor(tuple(scope), tuple(cards), table)

    def marginalize_out(self, variables: Iterable[str]) -> "Factor":
        drop = set(variables)
        axes = np.array(
            [i for i, v in enumerate(self.scope) if v in drop], dtype=np.int64
        )
        if axes.size == 0:
            return self
        keep = [(v, c) for v, c in zip(self.scope, self.cards) if v not in drop]
        table = kernels.marginalize(self.table, np.array(self.cards, dtype=np.int64), axes)
        scope = tuple(v for v, _ in keep)
        cards = tuple(c for _, c in keep)
        return Factor(scope, cards, table)

    def reduce(self, var: str, state_index: int) -> "Factor":
        """Select one state of ``var`` and drop it from the scope."""
        axis = self.scope.index(var)
        nd = self.table.reshape(self.cards)
        nd = np.take(nd, state_index, axis=axis)
        scope = self.scope[:axis] + self.scope[axis + 1:]
        cards = self.cards[:axis] + self.cards[axis + 1:]
        return Factor(scope, cards, np.ascontiguousarray(nd.ravel()))

    def normalized(self) -> "Factor":
        total = self.table.sum()
        if total <= 0.0:
            raise ZeroProbabilityEvidence("factor has zero total mass")
        return Factor(self.scope, self.cards, self.table / total)

    def transpose_to(self, scope: Sequence[str]) -> "Factor":
        """Reorder axes to the requested scope order."""
        scope = tuple(scope)
        if scope == self.scope:
            return self
        perm = [self.scope.index(v) for v in scope]
        nd = self.table.reshape(self.cards).transpose(perm)
        cards = tuple(self.cards[i] for i in perm)
        return Factor(scope, cards, np.ascontiguousarray(nd.ravel()))


@dataclass(frozen=True)
class PosteriorDistribution:
    """Normalized marginal over one node's states."""

    node: str
    probabilities: dict[str, float]

    def __post_init__(self):
        total = math.fsum(self.probabilities.values())
        if abs(total - 1.0) > POSTERIOR_TOLERANCE:
            raise ValueError(f"posterior for {self.node!r} sums to {total!r}")

    def __getitem__(self, state: str) -> float:
        return self.probabilities[state]

    def as_vector(self) -> np.ndarray:
        return np.array(list(self.probabilities.values()))


def _cpt_factor(net: Network, name: str) -> Factor:
    spec = net.node(name)
    scope = spec.parents + (name,)
    cards = tuple(net.card(v) for v in spec.parents) + (spec.card,)
    return Factor(scope, cards, np.ascontiguousarray(spec.cpt.ravel()))


def _evidence_restricted_factors(net: Network, evidence: Evidence) -> list[Factor]:
    net.validate_evidence(evidence)
    factors = []
    for name in net.topological_order:
        factor = _cpt_factor(net, name)
        for var, state in evidence.items():
            if var in factor.scope:
                factor = factor.reduce(var, net.state_index(var, state))
        factors.append(factor)
    return factors


def _interaction_graph(factors: Iterable[Factor]) -> dict[str, set[str]]:
    graph: dict[str, set[str]] = {}
    for factor in factors:
        for v in factor.scope:
            graph.setdefault(v, set())
        for i, a in enumerate(factor.scope):
            for b in factor.scope[i + 1:]:
                graph[a].add(b)
                graph[b].add(a)
    return graph


def _min_fill_order(graph: dict[str, set[str]], eliminable: set[str]) -> list[str]:
    graph = {v: set(n) for v, n in graph.items()}
    remaining = set(eliminable)
    order: list[str] = []
    while remaining:
        best = None
        best_fill = None
        for v in sorted(remaining):  # alphabetical tie-break
            neighbours = graph.get(v, set())
            fill = sum(
                1
                for i, a in enumerate(sorted(neighbours))
                for b in sorted(neighbours)[i + 1:]
                if b not in graph.get(a, set())
            )
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        neighbours = graph.get(best, set())
        for a in neighbours:
            for b in neighbours:
                if a != b:
                    graph[a].add(b)
        for a in neighbours:
            graph[a].discard(best)
        graph.pop(best, None)
        remaining.discard(best)
        order.append(best)
    return order


def elimination_order(net: Network, targets: Iterable[str], evidence: Evidence) -> list[str]:
    """Min-fill elimination order for the eliminable (non-target, unobserved) nodes."""
    targets = set(targets)
    for name in targets:
        net.node(name)
    net.validate_evidence(evidence)
    factors = _evidence_restricted_factors(net, evidence)
    eliminable = set(net.node_names()) - targets - evidence.nodes()
    return _min_fill_order(_interaction_graph(factors), eliminable)


def _eliminate(factors: list[Factor], order: Iterable[str]) -> list[Factor]:
    factors = list(factors)
    for var in order:
        involved = [f for f in factors if var in f.scope]
        if not involved:
            continue
        product = involved[0]
        for factor in involved[1:]:
            product = product.multiply(factor)
        summed = product.marginalize_out([var])
        total = summed.table.sum()
        if total <= 0.0:
            raise ZeroProbabilityEvidence(
                f"evidence has zero probability (detected eliminating {var!r})"
            )
        summed = Factor(summed.scope, summed.cards, summed.table / total)
        factors = [f for f in factors if var not in f.scope]
        factors.append(summed)
    return factors


def joint_posterior(net: Network, targets: Sequence[str], evidence: Evidence) -> Factor:
    """Normalized joint posterior factor over ``targets`` (in the given order)."""
    targets = list(targets)
    if not targets:
        raise ValidationError("targets must be nonempty")
    seen = set()
    for name in targets:
        net.node(name)
        if name in seen:
            raise OverlappingSets(f"duplicate target {name!r}")
        seen.add(name)
    overlap = set(targets) & evidence.nodes()
    if overlap:
        raise OverlappingSets(f"targets overlap evidence on {sorted(overlap)}")

    factors = _evidence_restricted_factors(net, evidence)
    eliminable = set(net.node_names()) - set(targets) - evidence.nodes()
    order = _min_fill_order(_interaction_graph(factors), eliminable)
    remaining = _eliminate(factors, order)
    result = remaining[0]
    for factor in remaining[1:]:
        result = result.multiply(factor)
    result = result.marginalize_out(set(result.scope) - set(targets))
    return result.normalized().transpose_to(targets)


def posterior(
    net: Network, targets: Iterable[str], evidence: Evidence | None = None
) -> dict[str, PosteriorDistribution]:
    """Exact marginal posterior of each target node given hard evidence."""
    evidence = evidence or Evidence()
    targets = list(targets)
    results: dict[str, PosteriorDistribution] = {}
    for name in targets:
        factor = joint_posterior(net, [name], evidence)
        probs = {state: float(p) for state, p in zip(net.states(name), factor.table)}
        results[name] = PosteriorDistribution(name, probs)
    return results


def posterior_one(net: Network, target: str, evidence: Evidence | None = None) -> PosteriorDistribution:
    return posterior(net, [target], evidence)[target]


def enumerate_joint(net: Network, evidence: Evidence | None = None) -> Factor:
    """Unnormalized joint over the unobserved nodes, by full enumeration.

    Ground truth for inference tests: walks every joint assignment of the
    unobserved nodes (topological order) with evidence fixed, multiplying
    CPT entries looked up directly. Guarded to ``2**20`` assignments.
    """
    evidence = evidence or Evidence()
    net.validate_evidence(evidence)
    unobserved = [n for n in net.topological_order if n not in evidence]
    cards = [net.card(n) for n in unobserved]
    total = 1
    for c in cards:
        total *= c
    if total > ENUMERATION_LIMIT:
        raise StateSpaceTooLarge(f"{total} joint assignments exceed limit {ENUMERATION_LIMIT}")

    # columns of every joint assignment, one int vector per node
    if unobserved:
        grids = np.unravel_index(np.arange(total), cards)
    else:
        grids = ()
    column = {name: grid for name, grid in zip(unobserved, grids)}
    for name, state in evidence.items():
        column[name] = np.full(total, net.state_index(name, state), dtype=np.intp)

    mass = np.ones(total, dtype=np.float64)
    for name in net.topological_order:
        spec = net.node(name)
        row = np.zeros(total, dtype=np.intp)
        stride = 1
        for parent in reversed(spec.parents):
            row += column[parent] * stride
            stride *= net.card(parent)
        mass *= spec.cpt[row, column[name]]

    if float(mass.sum()) <= 0.0:
        raise InconsistentEvidence("evidence has zero prior mass under the model")
    return Factor(tuple(unobserved), tuple(cards), mass)
