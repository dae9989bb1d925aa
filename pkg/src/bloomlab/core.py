"""Discrete Bayesian-network domain types and structural queries.

A network is a DAG of named nodes; each node carries an ordered state list
and a conditional probability table with one row per parent-state
combination (first parent varies slowest) and one column per state.
Networks are immutable once built, so all queries are safe to share across
threads.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CptShapeMismatch,
    CycleDetected,
    DuplicateNode,
    DuplicateState,
    OverlappingSets,
    RowNotNormalized,
    UnknownNode,
    UnknownParent,
    UnknownState,
    ValidationError,
)

ROW_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class NodeSpec:
    """One node: name, ordered states, ordered parents, CPT rows.

    Rows are ordered lexicographically over the parent states with the
    first parent varying slowest; a parentless node has a single row.
    """

    name: str
    states: tuple[str, ...]
    parents: tuple[str, ...]
    cpt: np.ndarray

    @classmethod
    def make(cls, name, states, parents=(), cpt=None) -> "NodeSpec":
        table = np.asarray(cpt, dtype=np.float64)
        if table.ndim == 1:
            table = table.reshape(1, -1)
        return cls(str(name), tuple(states), tuple(parents), table)

    @property
    def card(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class Evidence:
    """Hard evidence: observed node -> observed state label."""

    assignments: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def of(cls, **assignments) -> "Evidence":
        return cls(dict(assignments))

    def __len__(self):
        return len(self.assignments)

    def __contains__(self, node):
        return node in self.assignments

    def __getitem__(self, node):
        return self.assignments[node]

    def items(self):
        return self.assignments.items()

    def nodes(self):
        return set(self.assignments)

    def merged_with(self, other: "Evidence") -> "Evidence":
        combined = dict(self.assignments)
        combined.update(other.assignments)
        return Evidence(combined)


class Network:
    """Validated, immutable discrete Bayesian network.

    Construct through :func:`build_network`; the constructor assumes its
    inputs already satisfy every invariant.
    """

    def __init__(self, nodes: dict[str, NodeSpec], topological_order: tuple[str, ...]):
        self._nodes = dict(nodes)
        self.topological_order = tuple(topological_order)
        children: dict[str, list[str]] = {name: [] for name in self._nodes}
        for spec in self._nodes.values():
            for parent in spec.parents:
                children[parent].append(spec.name)
        self._children = {name: tuple(kids) for name, kids in children.items()}
        self._state_index = {
            name: {state: i for i, state in enumerate(spec.states)}
            for name, spec in self._nodes.items()
        }

    # -- lookups -------------------------------------------------------------

    @property
    def nodes(self) -> dict[str, NodeSpec]:
        return dict(self._nodes)

    def __contains__(self, name):
        return name in self._nodes

    def __len__(self):
        return len(self._nodes)

    def node(self, name: str) -> NodeSpec:
        try:
            return self._nodes[name]
        except KeyError:
            raise UnknownNode(f"unknown node {name!r}") from None

    def node_names(self) -> tuple[str, ...]:
        return tuple(self._nodes)

    def parents(self, name: str) -> tuple[str, ...]:
        return self.node(name).parents

    def children(self, name: str) -> tuple[str, ...]:
        self.node(name)
        return self._children[name]

    def states(self, name: str) -> tuple[str, ...]:
        return self.node(name).states

    def card(self, name: str) -> int:
        return self.node(name).card

    def state_index(self, name: str, state: str) -> int:
        self.node(name)
        try:
            return self._state_index[name][state]
        except KeyError:
            raise UnknownState(f"node {name!r} has no state {state!r}") from None

    def validate_evidence(self, evidence: Evidence) -> None:
        for node, state in evidence.items():
            self.state_index(node, state)

    def ancestors(self, names: Iterable[str]) -> set[str]:
        """All strict ancestors of the given nodes."""
        seen: set[str] = set()
        stack = [p for n in names for p in self.parents(n)]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(self._nodes[v].parents)
        return seen

    def descendants(self, name: str) -> set[str]:
        seen: set[str] = set()
        stack = list(self.children(name))
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(self._children[v])
        return seen


def _find_cycle(specs: dict[str, NodeSpec]) -> list[str]:
    """Return one directed cycle (list of node names) in the parent graph."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {name: WHITE for name in specs}
    trail: list[str] = []

    def visit(v: str) -> list[str] | None:
        color[v] = GREY
        trail.append(v)
        for child in sorted(n for n, s in specs.items() if v in s.parents):
            if color[child] == GREY:
                return trail[trail.index(child):]
            if color[child] == WHITE:
                found = visit(child)
                if found is not None:
                    return found
        color[v] = BLACK
        trail.pop()
        return None

    for name in sorted(specs):
        if color[name] == WHITE:
            cycle = visit(name)
            if cycle is not None:
                return cycle
    raise AssertionError("no cycle found")  # caller guarantees one exists


def build_network(specs: Sequence[NodeSpec]) -> Network:
    """Validate node specs and assemble an immutable :class:`Network`.

    Checks name uniqueness, state uniqueness, parent existence, CPT shape,
    row normalization (within ``1e-9``, then renormalized exactly) and
    acyclicity. The topological order is deterministic: among ready nodes,
    lexicographically smallest first.
    """
    by_name: dict[str, NodeSpec] = {}
    for spec in specs:
        if spec.name in by_name:
            raise DuplicateNode(f"duplicate node {spec.name!r}")
        by_name[spec.name] = spec

    validated: dict[str, NodeSpec] = {}
    for spec in by_name.values():
        if len(spec.states) < 2:
            raise ValidationError(f"node {spec.name!r} needs at least 2 states")
        if len(set(spec.states)) != len(spec.states):
            raise DuplicateState(f"node {spec.name!r} has duplicate state labels")
        if len(set(spec.parents)) != len(spec.parents):
            raise ValidationError(f"node {spec.name!r} lists a parent more than once")
        for parent in spec.parents:
            if parent not in by_name:
                raise UnknownParent(f"node {spec.name!r} references unknown parent {parent!r}")
        expected_rows = 1
        for parent in spec.parents:
            expected_rows *= len(by_name[parent].states)
        table = np.asarray(spec.cpt, dtype=np.float64)
        if table.ndim != 2 or table.shape != (expected_rows, len(spec.states)):
            raise CptShapeMismatch(
                f"node {spec.name!r}: CPT shape {tuple(table.shape)}, "
                f"expected ({expected_rows}, {len(spec.states)})"
            )
        if np.any(table < 0.0) or np.any(table > 1.0):
            raise ValidationError(f"node {spec.name!r}: CPT entries must lie in [0, 1]")
        sums = table.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE)[0]
        if bad.size:
            raise RowNotNormalized(spec.name, int(bad[0]), float(sums[bad[0]]))
        table = table / sums[:, None]  # exact renormalization after validation
        table.setflags(write=False)
        validated[spec.name] = NodeSpec(spec.name, spec.states, spec.parents, table)

    # lexicographic Kahn's algorithm; leftover nodes imply a cycle
    indegree = {name: len(spec.parents) for name, spec in validated.items()}
    children: dict[str, list[str]] = {name: [] for name in validated}
    for spec in validated.values():
        for parent in spec.parents:
            children[parent].append(spec.name)
    ready = [name for name, deg in indegree.items() if deg == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for child in children[v]:
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(ready, child)
    if len(order) != len(validated):
        remaining = {n: validated[n] for n in validated if n not in set(order)}
        raise CycleDetected(_find_cycle(remaining))

    ordered = {name: validated[name] for name in order}
    return Network(ordered, tuple(order))


def _check_query_sets(net: Network, *sets: Iterable[str]) -> list[set[str]]:
    groups = [set(s) for s in sets]
    for group in groups:
        for name in group:
            net.node(name)
    for i, a in enumerate(groups):
        for b in groups[i + 1:]:
            overlap = a & b
            if overlap:
                raise OverlappingSets(f"sets overlap on {sorted(overlap)}")
    return groups


def d_separated(net: Network, x: Iterable[str], y: Iterable[str], z: Iterable[str]) -> bool:
    """True iff every path between ``x`` and ``y`` is blocked given ``z``.

    Chains and forks are blocked by conditioning; colliders are blocked
    unless the collider or one of its descendants is conditioned on.
    Implemented as a breadth-first search over active trails.
    """
    x, y, z = _check_query_sets(net, x, y, z)
    if not x or not y:
        return True

    z_closure = z | net.ancestors(z)  # nodes with a descendant in z (or in z)
    UP, DOWN = 0, 1  # UP: arrived from a child; DOWN: arrived from a parent
    queue = deque((v, UP) for v in x)
    visited: set[tuple[str, int]] = set()
    while queue:
        v, direction = queue.popleft()
        if (v, direction) in visited:
            continue
        visited.add((v, direction))
        if v in y:
            return False
        if direction == UP and v not in z:
            for parent in net.parents(v):
                queue.append((parent, UP))
            for child in net.children(v):
                queue.append((child, DOWN))
        elif direction == DOWN:
            if v not in z:
                for child in net.children(v):
                    queue.append((child, DOWN))
            if v in z_closure:  # collider with observed descendant stays active
                for parent in net.parents(v):
                    queue.append((parent, UP))
    return True


def markov_blanket(net: Network, node: str) -> set[str]:
    """Parents, children and children's other parents of ``node``."""
    spec = net.node(node)
    blanket = set(spec.parents)
    for child in net.children(node):
        blanket.add(child)
        blanket.update(net.parents(child))
    blanket.discard(node)
    return blanket
