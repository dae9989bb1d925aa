"""Intervention pipeline: practice/land-use changes through to bloom posterior.

One call chains the deterministic management layer into the probabilistic
science model: apply overrides, compute normalized catchment loads, map
them to hard evidence, merge scenario evidence on top, and query the bloom
node. The baseline for deltas is always the untouched catalogue under
current practice with its own load-derived (typical-year) evidence.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping

from .core import Evidence, Network
from .errors import EvidenceConflict, UnknownCategory, UnknownSource
from .infer import PosteriorDistribution, posterior_one
from .management import (
    Catalogue,
    NutrientLoad,
    NutrientSource,
    ScienceLink,
    catchment_load,
    load_to_evidence,
    raw_load,
)

BLOOM_NODE = "BloomInitiation"


@dataclass(frozen=True)
class InterventionSpec:
    """What changes: practices per source, land uses per source, pinned evidence."""

    practice_overrides: Mapping[str, str] = field(default_factory=dict)
    landuse_overrides: Mapping[str, str] = field(default_factory=dict)
    extra_evidence: Evidence = field(default_factory=Evidence)
    label: str = ""


@dataclass(frozen=True)
class PipelineResult:
    """Loads, evidence, and posterior for one intervention, with baseline deltas."""

    label: str
    load: NutrientLoad
    evidence: Evidence
    posterior: PosteriorDistribution
    baseline: PosteriorDistribution
    delta: dict[str, float]
    conflicts: tuple[tuple[str, str, str], ...]

    def __iter__(self):
        return iter((self.load, self.evidence, self.posterior, self.delta))


def _apply_landuse(catalogue: Catalogue, overrides: Mapping[str, str]) -> list[NutrientSource]:
    ids = {source.id for source in catalogue.sources}
    for source_id, category in overrides.items():
        if source_id not in ids:
            raise UnknownSource(f"land-use override for unknown source {source_id!r}")
        if category not in catalogue.profiles:
            raise UnknownCategory(f"no emission profile for category {category!r}")
    modified = []
    for source in catalogue.sources:
        category = overrides.get(source.id)
        if category is None:
            modified.append(source)
        else:
            modified.append(NutrientSource.make(
                source.id, source.kind, category, source.area_or_capacity,
                source.soil_ph, source.soil_type, source.distance_m,
                catalogue.profiles[category],
            ))
    return modified


def _merge_evidence(
    load_evidence: Evidence, extra: Evidence
) -> tuple[Evidence, tuple[tuple[str, str, str], ...]]:
    conflicts = []
    for node, state in extra.items():
        if node in load_evidence and load_evidence[node] != state:
            conflicts.append((node, load_evidence[node], state))
    for node, implied, pinned in conflicts:
        warnings.warn(
            f"evidence for {node!r} pinned to {pinned!r}, overriding "
            f"load-derived {implied!r}",
            EvidenceConflict,
            stacklevel=3,
        )
    return load_evidence.merged_with(extra), tuple(conflicts)


def run_pipeline(
    catalogue: Catalogue,
    intervention: InterventionSpec,
    net: Network,
    link: ScienceLink | None = None,
    target: str = BLOOM_NODE,
) -> PipelineResult:
    """Evaluate one intervention end to end against the current-practice baseline."""
    if link is None:
        link = catalogue.link
    ids = {source.id for source in catalogue.sources}
    for source_id in intervention.practice_overrides:
        if source_id not in ids:
            raise UnknownSource(f"practice override for unknown source {source_id!r}")

    # normalization constants always come from the untouched catalogue
    baseline_raw = raw_load(catalogue.sources, {i: "current" for i in ids})

    modified = _apply_landuse(catalogue, intervention.landuse_overrides)
    assignment = {i: "current" for i in ids}
    assignment.update(intervention.practice_overrides)
    load = catchment_load(modified, assignment, baseline=baseline_raw)
    evidence, conflicts = _merge_evidence(
        load_to_evidence(load, link), intervention.extra_evidence
    )
    current = posterior_one(net, target, evidence)

    baseline_load = catchment_load(
        catalogue.sources, {i: "current" for i in ids}, baseline=baseline_raw
    )
    reference = posterior_one(net, target, load_to_evidence(baseline_load, link))
    delta = {state: current[state] - reference[state] for state in net.states(target)}
    return PipelineResult(
        intervention.label, load, evidence, current, reference, delta, conflicts
    )
