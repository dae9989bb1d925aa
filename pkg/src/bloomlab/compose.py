"""Object-oriented network composition.

Classes are reusable subnetworks with typed input placeholders and declared
output nodes. Instantiation prefixes every class-local name with
"instance."; flattening resolves bindings by deleting each placeholder and
re-parenting its children onto the bound source node, then builds one
ordinary :class:`~bloomlab.core.Network`.
"""

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import Network, NodeSpec, build_network
from .errors import (
    CycleAcrossInstances,
    DuplicateInstanceName,
    DuplicateNode,
    StateMismatch,
    UnboundInput,
    UnknownParent,
    ValidationError,
)


@dataclass(frozen=True)
class InputPlaceholder:
    """Typed, CPT-less stub standing in for a node bound at flatten time."""

    name: str
    states: tuple[str, ...]


@dataclass(frozen=True)
class Fragment:
    """An instantiated class body: prefixed nodes plus unbound stubs."""

    nodes: tuple[NodeSpec, ...]
    placeholders: tuple[InputPlaceholder, ...]


@dataclass(frozen=True)
class OobnClass:
    """Reusable subnetwork with an input/output interface.

    Body-node parents may reference input placeholders; placeholders carry
    a state list but no CPT and no parents. Outputs name body nodes that
    bindings may draw from.
    """

    name: str
    nodes: tuple[NodeSpec, ...]
    inputs: tuple[InputPlaceholder, ...]
    outputs: tuple[str, ...]

    @classmethod
    def make(cls, name, nodes, inputs=(), outputs=()) -> "OobnClass":
        placeholders = tuple(
            ph if isinstance(ph, InputPlaceholder) else InputPlaceholder(ph[0], tuple(ph[1]))
            for ph in inputs
        )
        obj = cls(str(name), tuple(nodes), placeholders, tuple(outputs))
        obj._validate()
        return obj

    def _validate(self):
        names = [spec.name for spec in self.nodes] + [ph.name for ph in self.placeholders]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DuplicateNode(f"class {self.name!r} declares {dupes} more than once")
        body = {spec.name for spec in self.nodes}
        for out in self.outputs:
            if out not in body:
                raise ValidationError(
                    f"output {out!r} of class {self.name!r} is not a body node"
                )
        # placeholder stubs get uniform CPTs so the body passes full
        # network validation (shapes, row sums, acyclicity)
        stubs = [
            NodeSpec.make(ph.name, ph.states, (), np.full((1, len(ph.states)), 1.0 / len(ph.states)))
            for ph in self.placeholders
        ]
        build_network(list(self.nodes) + stubs)

    @property
    def placeholders(self) -> tuple[InputPlaceholder, ...]:
        return self.inputs


def qualify(instance: str, name: str) -> str:
    return f"{instance}.{name}"


def instantiate(oobn_class: OobnClass, instance_name: str) -> Fragment:
    """Deep-copy the class body with every name prefixed ``instance_name.``."""
    if not instance_name or "." in instance_name:
        raise ValidationError(
            f"instance name {instance_name!r} must be a nonempty identifier without dots"
        )
    rename = {spec.name: qualify(instance_name, spec.name) for spec in oobn_class.nodes}
    rename.update({ph.name: qualify(instance_name, ph.name) for ph in oobn_class.inputs})
    nodes = tuple(
        NodeSpec.make(
            rename[spec.name],
            spec.states,
            tuple(rename[p] for p in spec.parents),
            np.array(spec.cpt, copy=True),
        )
        for spec in oobn_class.nodes
    )
    placeholders = tuple(
        InputPlaceholder(qualify(instance_name, ph.name), ph.states)
        for ph in oobn_class.inputs
    )
    return Fragment(nodes, placeholders)


@dataclass(frozen=True)
class OobnModel:
    """Assembled model: classes, named instances, bindings, top-level nodes.

    ``bindings`` maps (instance, placeholder) to its source: either
    (source instance, output node) or (None, top-level node name).
    """

    classes: tuple[OobnClass, ...]
    instances: tuple[tuple[str, str], ...]
    bindings: Mapping[tuple[str, str], tuple[str | None, str]]
    top_level: tuple[NodeSpec, ...]

    @classmethod
    def make(cls, classes, instances, bindings=None, top_level=()) -> "OobnModel":
        normalized = {}
        for key, source in (bindings or {}).items():
            if isinstance(source, str):
                source = (None, source)
            normalized[tuple(key)] = (source[0], source[1])
        return cls(
            tuple(classes),
            tuple((str(i), str(c)) for i, c in instances),
            normalized,
            tuple(top_level),
        )


def _check_instance_graph(model: OobnModel) -> None:
    # bindings alone induce the instance-reference graph; a cycle there is
    # rejected even when the node-level graph would unroll acyclically
    edges: dict[str, set[str]] = {inst: set() for inst, _ in model.instances}
    for (inst, _ph), (src_inst, _node) in model.bindings.items():
        if src_inst is not None and src_inst != inst:
            edges[src_inst].add(inst)
    seen: dict[str, int] = {}  # 0 = in progress, 1 = done

    def visit(v, trail):
        seen[v] = 0
        trail.append(v)
        for w in sorted(edges[v]):
            if seen.get(w) == 0:
                cycle = trail[trail.index(w):]
                raise CycleAcrossInstances(
                    "instance bindings form a cycle: " + " -> ".join(cycle + [w])
                )
            if w not in seen:
                visit(w, trail)
        trail.pop()
        seen[v] = 1

    for v in edges:
        if v not in seen:
            visit(v, [])


def flatten(model: OobnModel) -> Network:
    """Resolve bindings and compose everything into a single Network."""
    class_by_name = {c.name: c for c in model.classes}
    if len(class_by_name) != len(model.classes):
        raise DuplicateNode("duplicate class names in model")
    seen_instances = set()
    for inst, cname in model.instances:
        if inst in seen_instances:
            raise DuplicateInstanceName(f"instance {inst!r} declared twice")
        seen_instances.add(inst)
        if cname not in class_by_name:
            raise ValidationError(f"instance {inst!r} references unknown class {cname!r}")

    fragments = {
        inst: instantiate(class_by_name[cname], inst) for inst, cname in model.instances
    }
    nodes: dict[str, NodeSpec] = {}
    placeholder_states: dict[str, tuple[str, ...]] = {}
    for fragment in fragments.values():
        for spec in fragment.nodes:
            nodes[spec.name] = spec
        for ph in fragment.placeholders:
            placeholder_states[ph.name] = ph.states
    for spec in model.top_level:
        if spec.name in nodes or spec.name in placeholder_states:
            raise DuplicateNode(f"top-level node {spec.name!r} collides with an instance node")
        nodes[spec.name] = spec

    _check_instance_graph(model)

    outputs = {inst: set(class_by_name[cname].outputs) for inst, cname in model.instances}
    top_by_name = {spec.name: spec for spec in model.top_level}
    substitution: dict[str, str] = {}
    for (inst, ph), (src_inst, src_node) in sorted(model.bindings.items()):
        qname = qualify(inst, ph)
        if qname not in placeholder_states:
            raise ValidationError(f"binding targets unknown input {ph!r} on instance {inst!r}")
        if src_inst is None:
            if src_node not in top_by_name:
                raise ValidationError(f"binding source {src_node!r} is not a top-level node")
            src_states = top_by_name[src_node].states
            source = src_node
        else:
            if src_inst not in outputs:
                raise ValidationError(f"binding source references unknown instance {src_inst!r}")
            if src_node not in outputs[src_inst]:
                raise ValidationError(
                    f"{src_node!r} is not a declared output of instance {src_inst!r}"
                )
            source = qualify(src_inst, src_node)
            src_states = nodes[source].states
        if src_states != placeholder_states[qname]:
            raise StateMismatch(
                f"input {qname!r} expects states {placeholder_states[qname]}, "
                f"source {source!r} has {src_states}"
            )
        substitution[qname] = source

    unbound = sorted(set(placeholder_states) - set(substitution))
    if unbound:
        inst, _, ph = unbound[0].partition(".")
        raise UnboundInput(inst, ph)

    final = []
    for spec in nodes.values():
        if any(p in substitution for p in spec.parents):
            spec = NodeSpec.make(
                spec.name,
                spec.states,
                tuple(substitution.get(p, p) for p in spec.parents),
                spec.cpt,
            )
        final.append(spec)
    try:
        return build_network(final)
    except UnknownParent as exc:
        # top-level nodes may only reference instance nodes that exist
        raise ValidationError(str(exc)) from exc
