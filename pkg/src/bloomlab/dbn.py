"""Dynamic network templates: one slice plus lag-1 inter-slice links.

A template holds the intra-slice structure in ordinary NodeSpecs. For a
node that receives inter-slice edges, the NodeSpec's table is the
*transition* CPT: its rows cover the intra-slice parents plus every lagged
parent appended last (in inter-edge declaration order), and
``initial_cpts`` carries the slice-0 replacement whose shape omits the
lagged parents.
"""

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import Evidence, Network, NodeSpec, build_network
from .errors import (
    CptShapeMismatch,
    DuplicateNode,
    LabelCountMismatch,
    MissingInitialCpt,
    UnknownNode,
    ValidationError,
)
from .infer import PosteriorDistribution, posterior_one

DEFAULT_SLICE_LABELS = ("Nov", "Dec", "Jan", "Feb", "Mar")


@dataclass(frozen=True)
class DbnTemplate:
    slice_nodes: tuple[NodeSpec, ...]
    inter_edges: tuple[tuple[str, str], ...]
    initial_cpts: Mapping[str, np.ndarray]
    slice_labels: tuple[str, ...] = DEFAULT_SLICE_LABELS

    @classmethod
    def make(
        cls,
        slice_nodes: Sequence[NodeSpec],
        inter_edges: Sequence[tuple[str, str]] = (),
        initial_cpts: Mapping[str, np.ndarray] | None = None,
        slice_labels: Sequence[str] = DEFAULT_SLICE_LABELS,
    ) -> "DbnTemplate":
        initial = {
            name: np.asarray(cpt, dtype=np.float64)
            for name, cpt in (initial_cpts or {}).items()
        }
        template = cls(
            tuple(slice_nodes),
            tuple((str(s), str(d)) for s, d in inter_edges),
            initial,
            tuple(slice_labels),
        )
        template._validate()
        return template

    def _validate(self):
        names = [spec.name for spec in self.slice_nodes]
        if len(set(names)) != len(names):
            raise DuplicateNode("duplicate slice node names")
        if not self.slice_labels:
            raise ValidationError("slice_labels must be nonempty")
        if len(set(self.slice_labels)) != len(self.slice_labels):
            raise ValidationError("slice labels must be unique")
        known = set(names)
        seen_edges = set()
        for src, dst in self.inter_edges:
            if src not in known or dst not in known:
                missing = src if src not in known else dst
                raise UnknownNode(f"inter-slice edge endpoint {missing!r} is not a slice node")
            if (src, dst) in seen_edges:
                raise ValidationError(f"duplicate inter-slice edge {src!r} -> {dst!r}")
            seen_edges.add((src, dst))
        destinations = self.lagged_parents()
        for dst in destinations:
            if dst not in self.initial_cpts:
                raise MissingInitialCpt(f"node {dst!r} receives lag edges but has no initial CPT")
        extra = sorted(set(self.initial_cpts) - set(destinations))
        if extra:
            raise ValidationError(f"initial CPTs for non-destination nodes: {extra}")
        # a two-slice build exercises every CPT shape and row sum; use
        # throwaway labels so short label lists still validate
        specs = _slice_specs(self, ("validate0", "validate1"))
        try:
            build_network(specs)
        except CptShapeMismatch as exc:
            raise CptShapeMismatch(f"transition/initial CPT mismatch: {exc}") from exc

    def lagged_parents(self) -> dict[str, list[str]]:
        """Destination -> lagged sources, in inter-edge declaration order."""
        dests: dict[str, list[str]] = {}
        for src, dst in self.inter_edges:
            dests.setdefault(dst, []).append(src)
        return dests

    def node(self, name: str) -> NodeSpec:
        for spec in self.slice_nodes:
            if spec.name == name:
                return spec
        raise UnknownNode(f"no slice node named {name!r}")


def _slice_specs(template: DbnTemplate, labels: Sequence[str]) -> list[NodeSpec]:
    dests = template.lagged_parents()
    specs: list[NodeSpec] = []
    for t, label in enumerate(labels):
        for spec in template.slice_nodes:
            name = f"{label}.{spec.name}"
            intra = tuple(f"{label}.{p}" for p in spec.parents)
            if t == 0 and spec.name in dests:
                specs.append(NodeSpec.make(name, spec.states, intra, template.initial_cpts[spec.name]))
                continue
            lagged = tuple(f"{labels[t - 1]}.{s}" for s in dests.get(spec.name, ())) if t else ()
            specs.append(NodeSpec.make(name, spec.states, intra + lagged, spec.cpt))
    return specs


def unroll(template: DbnTemplate, n_slices: int) -> Network:
    """Materialize ``n_slices`` copies named "label.node" with lag-1 links."""
    if n_slices < 1:
        raise ValidationError("n_slices must be at least 1")
    if n_slices > len(template.slice_labels):
        raise LabelCountMismatch(
            f"{n_slices} slices requested but only {len(template.slice_labels)} labels defined"
        )
    return build_network(_slice_specs(template, template.slice_labels[:n_slices]))


def slice_posteriors(
    template: DbnTemplate,
    n_slices: int,
    target: str,
    evidence: Evidence | None = None,
) -> list[PosteriorDistribution]:
    """Posterior of "label.target" for each slice, in slice order."""
    template.node(target)
    net = unroll(template, n_slices)
    evidence = evidence or Evidence()
    return [
        posterior_one(net, f"{label}.{target}", evidence)
        for label in template.slice_labels[:n_slices]
    ]
