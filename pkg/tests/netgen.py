"""Seeded random-network generation shared across test modules."""

import numpy as np

from bloomlab.core import Evidence, NodeSpec, build_network


def random_dag_edges(rng, n_nodes, edge_prob=0.35):
    """Random DAG over nodes n0..n{k-1}; edges only from lower to higher index."""
    names = [f"n{i}" for i in range(n_nodes)]
    parents = {name: [] for name in names}
    for j in range(n_nodes):
        for i in range(j):
            if rng.random() < edge_prob:
                parents[names[j]].append(names[i])
    return names, parents


def random_network(rng, n_nodes, max_states=3, edge_prob=0.35):
    """Random discrete network with Dirichlet CPT rows."""
    names, parents = random_dag_edges(rng, n_nodes, edge_prob)
    cards = {name: int(rng.integers(2, max_states + 1)) for name in names}
    specs = []
    for name in names:
        card = cards[name]
        rows = 1
        for p in parents[name]:
            rows *= cards[p]
        cpt = rng.dirichlet(np.ones(card), size=rows)
        states = tuple(f"s{i}" for i in range(card))
        specs.append(NodeSpec.make(name, states, tuple(parents[name]), cpt))
    return build_network(specs)


def random_evidence(rng, net, max_nodes=2, exclude=()):
    """Random hard evidence on up to ``max_nodes`` nodes."""
    candidates = [n for n in net.node_names() if n not in exclude]
    k = int(rng.integers(0, min(max_nodes, len(candidates)) + 1))
    chosen = list(rng.choice(candidates, size=k, replace=False)) if k else []
    assignments = {}
    for name in chosen:
        states = net.states(name)
        assignments[name] = states[int(rng.integers(0, len(states)))]
    return Evidence(assignments)


def _dirichlet_rows(rng, rows, card):
    return rng.dirichlet(np.ones(card), size=rows)


def random_oobn(rng, max_classes=3):
    """Random flat OOBN model plus instances, bindings, and a top-level sink.

    Interface nodes (placeholders, declared outputs) are binary so any
    output can legally bind any placeholder; internal nodes vary.
    """
    from bloomlab.compose import InputPlaceholder, OobnClass, OobnModel

    iface_states = ("lo", "hi")
    classes = []
    for ci in range(int(rng.integers(1, max_classes + 1))):
        n_nodes = int(rng.integers(2, 5))
        n_inputs = int(rng.integers(0, 3))
        placeholders = [InputPlaceholder(f"in{k}", iface_states) for k in range(n_inputs)]
        local = [ph.name for ph in placeholders]
        specs = []
        for i in range(n_nodes):
            name = f"v{i}"
            k = int(rng.integers(0, min(len(local), 2) + 1))
            parlist = list(rng.choice(local, size=k, replace=False)) if k else []
            # node 0 is binary so every class exports a bindable output
            card = 2 if i == 0 else int(rng.integers(2, 4))
            specs.append((name, card, parlist))
            local.append(name)
        card_of = {ph.name: 2 for ph in placeholders}
        for name, card, parlist in specs:
            card_of[name] = card
        nodes = []
        for name, card, parlist in specs:
            rows = 1
            for p in parlist:
                rows *= card_of[p]
            states = iface_states if card == 2 else tuple(f"s{j}" for j in range(card))
            nodes.append(
                NodeSpec.make(name, states, tuple(parlist), _dirichlet_rows(rng, rows, card))
            )
        classes.append(OobnClass.make(f"c{ci}", nodes, placeholders, outputs=("v0",)))

    instances = [(f"inst{k}", classes[int(rng.integers(len(classes)))].name)
                 for k in range(int(rng.integers(1, 4)))]
    class_by_name = {c.name: c for c in classes}

    # two top-level binary roots keep binding sources distinct per instance:
    # a node with two placeholder parents must not end up with the same
    # parent twice after substitution
    root = NodeSpec.make("Root", iface_states, (), _dirichlet_rows(rng, 1, 2))
    root2 = NodeSpec.make("Root2", iface_states, (), _dirichlet_rows(rng, 1, 2))
    bindings = {}
    for idx, (inst, cname) in enumerate(instances):
        used = set()
        for ph in class_by_name[cname].inputs:
            choices = [(None, "Root"), (None, "Root2")]
            choices += [(instances[j][0], "v0") for j in range(idx)]
            choices = [c for c in choices if c not in used]
            pick = choices[int(rng.integers(len(choices)))]
            used.add(pick)
            bindings[(inst, ph.name)] = pick

    sink_parents = tuple(f"{inst}.v0" for inst, _ in instances)
    sink = NodeSpec.make(
        "Sink", iface_states, sink_parents, _dirichlet_rows(rng, 2 ** len(sink_parents), 2)
    )
    return OobnModel.make(classes, instances, bindings, top_level=(root, root2, sink))


def random_dbn(rng, n_nodes=3, max_states=2, n_labels=5):
    """Small random template with one or two lag-1 edges."""
    from bloomlab.dbn import DbnTemplate

    names = [f"X{i}" for i in range(n_nodes)]
    cards = {n: int(rng.integers(2, max_states + 1)) for n in names}
    intra = {}
    for i, name in enumerate(names):
        k = int(rng.integers(0, min(i, 2) + 1))
        intra[name] = list(rng.choice(names[:i], size=k, replace=False)) if k else []
    lag_pairs = []
    for _ in range(int(rng.integers(1, 3))):
        pair = (names[int(rng.integers(n_nodes))], names[int(rng.integers(n_nodes))])
        if pair not in lag_pairs:
            lag_pairs.append(pair)
    dests = {}
    for s, d in lag_pairs:
        dests.setdefault(d, []).append(s)

    specs, initial = [], {}
    for name in names:
        card = cards[name]
        intra_rows = 1
        for p in intra[name]:
            intra_rows *= cards[p]
        lag_rows = 1
        for s in dests.get(name, ()):
            lag_rows *= cards[s]
        states = tuple(f"s{j}" for j in range(card))
        specs.append(
            NodeSpec.make(name, states, tuple(intra[name]),
                          _dirichlet_rows(rng, intra_rows * lag_rows, card))
        )
        if name in dests:
            initial[name] = _dirichlet_rows(rng, intra_rows, card)
    labels = tuple(f"t{k}" for k in range(n_labels))
    return DbnTemplate.make(specs, lag_pairs, initial, labels)
