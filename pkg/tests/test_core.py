"""Structural layer: construction, d-separation, Markov blankets.

The d-separation oracle here is deliberately a different algorithm from
the production one: restrict to the ancestral subgraph, moralize, drop
the conditioning set, and test undirected reachability.
"""

import numpy as np
import pytest

from bloomlab.core import (
    Evidence,
    NodeSpec,
    build_network,
    d_separated,
    markov_blanket,
)
from bloomlab.errors import (
    CptShapeMismatch,
    CycleDetected,
    DuplicateState,
    OverlappingSets,
    RowNotNormalized,
    UnknownNode,
    UnknownParent,
    UnknownState,
    ValidationError,
)

from netgen import random_network

# --- oracle -------------------------------------------------------------


def dsep_oracle(net, x, y, z):
    """Moralization + reachability test for d-separation."""
    x, y, z = set(x), set(y), set(z)
    relevant = x | y | z
    keep = relevant | net.ancestors(relevant)
    # moral graph of the ancestral subgraph
    adjacency = {v: set() for v in keep}
    for v in keep:
        ps = [p for p in net.parents(v) if p in keep]
        for p in ps:
            adjacency[v].add(p)
            adjacency[p].add(v)
        for i, a in enumerate(ps):  # marry co-parents
            for b in ps[i + 1:]:
                adjacency[a].add(b)
                adjacency[b].add(a)
    # remove conditioning nodes, then search x -> y
    stack = list(x - z)
    seen = set(stack)
    while stack:
        v = stack.pop()
        if v in y:
            return False
        for w in adjacency[v]:
            if w not in z and w not in seen:
                seen.add(w)
                stack.append(w)
    return True


# --- construction -------------------------------------------------------


def binary(name, parents, probs):
    return NodeSpec.make(name, ("no", "yes"), parents, np.asarray(probs, dtype=float))


def chain_abc():
    return build_network(
        [
            binary("A", (), [[0.6, 0.4]]),
            binary("B", ("A",), [[0.9, 0.1], [0.2, 0.8]]),
            binary("C", ("B",), [[0.7, 0.3], [0.4, 0.6]]),
        ]
    )


def collider_acb():
    return build_network(
        [
            binary("A", (), [[0.6, 0.4]]),
            binary("B", (), [[0.5, 0.5]]),
            binary("C", ("A", "B"), [[0.9, 0.1], [0.6, 0.4], [0.3, 0.7], [0.2, 0.8]]),
        ]
    )


def test_build_smallest_dag():
    net = build_network(
        [
            binary("A", (), [[0.3, 0.7]]),
            binary("B", ("A",), [[0.5, 0.5], [0.1, 0.9]]),
        ]
    )
    assert net.topological_order == ("A", "B")
    assert net.parents("B") == ("A",)
    assert net.children("A") == ("B",)


def test_cycle_detected_and_named():
    with pytest.raises(CycleDetected) as exc:
        build_network(
            [
                binary("A", ("B",), [[0.5, 0.5], [0.5, 0.5]]),
                binary("B", ("A",), [[0.5, 0.5], [0.5, 0.5]]),
            ]
        )
    assert set(exc.value.cycle) == {"A", "B"}


def test_cpt_shape_mismatch_reports_expected_rows():
    with pytest.raises(CptShapeMismatch, match=r"\(4, 2\)"):
        build_network(
            [
                binary("A", (), [[0.5, 0.5]]),
                binary("B", (), [[0.5, 0.5]]),
                binary("C", ("A", "B"), [[0.5, 0.5]] * 3),
            ]
        )


def test_row_not_normalized_names_row():
    with pytest.raises(RowNotNormalized) as exc:
        build_network(
            [
                binary("A", (), [[0.5, 0.5]]),
                binary("B", ("A",), [[0.5, 0.5], [0.6, 0.5]]),
            ]
        )
    assert exc.value.node == "B"
    assert exc.value.row == 1


def test_rows_renormalized_after_validation():
    # 0.3/0.7 plus 5e-10 noise passes the 1e-9 gate, then is renormalized:
    # the stored row is the input row scaled by its own sum
    net = build_network(
        [binary("A", (), [[0.3 + 5e-10, 0.7]])]
    )
    row = net.node("A").cpt[0]
    assert row.sum() == pytest.approx(1.0, abs=1e-15)
    assert row[0] / row[1] == pytest.approx((0.3 + 5e-10) / 0.7, rel=1e-15)


def test_duplicate_state_rejected():
    with pytest.raises(DuplicateState):
        build_network([NodeSpec.make("A", ("x", "x"), (), [[0.5, 0.5]])])


def test_unknown_parent_rejected():
    with pytest.raises(UnknownParent):
        build_network([binary("B", ("A",), [[0.5, 0.5], [0.5, 0.5]])])


def test_repeated_parent_rejected():
    # a DAG has no parallel edges, so a parent may appear only once
    a = binary("A", (), [[0.5, 0.5]])
    b = binary("B", ("A", "A"), [[0.5, 0.5]] * 4)
    with pytest.raises(ValidationError):
        build_network([a, b])


def test_evidence_validation():
    net = chain_abc()
    net.validate_evidence(Evidence({"A": "yes"}))
    with pytest.raises(UnknownNode):
        net.validate_evidence(Evidence({"Z": "yes"}))
    with pytest.raises(UnknownState):
        net.validate_evidence(Evidence({"A": "maybe"}))


# --- d-separation --------------------------------------------------------


def test_chain_blocked_by_middle():
    net = chain_abc()
    assert d_separated(net, {"A"}, {"C"}, {"B"})
    assert not d_separated(net, {"A"}, {"C"}, set())


def test_collider_definition():
    net = collider_acb()
    assert d_separated(net, {"A"}, {"B"}, set())
    assert not d_separated(net, {"A"}, {"B"}, {"C"})


def test_overlapping_sets_rejected():
    net = chain_abc()
    with pytest.raises(OverlappingSets):
        d_separated(net, {"A"}, {"A"}, set())


def test_dsep_matches_moral_oracle_on_random_dags():
    rng = np.random.default_rng(20240217)
    for _ in range(300):
        net = random_network(rng, int(rng.integers(3, 13)), max_states=2, edge_prob=0.3)
        names = list(net.node_names())
        rng.shuffle(names)
        x = {names[0]}
        y = {names[1]}
        z = set(names[2: 2 + int(rng.integers(0, len(names) - 1))])
        assert d_separated(net, x, y, z) == dsep_oracle(net, x, y, z)


def test_dsep_symmetry_random():
    rng = np.random.default_rng(7)
    for _ in range(50):
        net = random_network(rng, 8, max_states=2)
        names = list(net.node_names())
        x, y = {names[0], names[2]}, {names[5]}
        z = {names[3]}
        assert d_separated(net, x, y, z) == d_separated(net, y, x, z)


def test_local_markov_property_random():
    # a node is d-separated from its non-descendants given its parents
    rng = np.random.default_rng(99)
    for _ in range(40):
        net = random_network(rng, int(rng.integers(3, 13)), max_states=2)
        for node in net.node_names():
            parents = set(net.parents(node))
            nondesc = (
                set(net.node_names()) - {node} - net.descendants(node) - parents
            )
            if nondesc:
                assert d_separated(net, {node}, nondesc, parents)


# --- Markov blankets -------------------------------------------------------


def test_blanket_chain_and_collider():
    assert markov_blanket(chain_abc(), "B") == {"A", "C"}
    assert markov_blanket(collider_acb(), "A") == {"C", "B"}


def test_blanket_never_contains_self_and_members_are_linked():
    rng = np.random.default_rng(3)
    for _ in range(30):
        net = random_network(rng, 9, max_states=2)
        for node in net.node_names():
            blanket = markov_blanket(net, node)
            assert node not in blanket
            for member in blanket:
                linked = (
                    member in net.parents(node)
                    or node in net.parents(member)
                    or any(
                        member in net.parents(c) for c in net.children(node)
                    )
                )
                assert linked


def test_blanket_unknown_node():
    with pytest.raises(UnknownNode):
        markov_blanket(chain_abc(), "missing")
