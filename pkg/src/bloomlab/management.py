"""Quantified nutrient-source catalogue and deterministic hazard/load rules.

This layer never propagates probabilities: sources carry P(high emission)
numbers per practice and nutrient, and everything downstream is plain
arithmetic. The hazard rubric is an integer product of emission, soil
mobility, and proximity bands; catchment loads attenuate emissions
exponentially with distance and scale by soil mobility, then normalize
against a current-practice baseline so indices read as multiples of the
status quo.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import Evidence
from .errors import (
    MissingEmissionEntry,
    ThresholdOrderError,
    UnassignedSource,
    UnknownCategory,
    ValidationError,
)

PRACTICES = ("current", "planned", "best")
CATALOGUE_NUTRIENTS = ("iron", "nitrogen", "organics", "phosphorus", "potassium")
SOIL_MOBILITY = {"sand": 3, "loam": 2, "clay": 1}
KINDS = ("point", "diffuse")

# transport attenuation scale in meters (config default)
ATTENUATION_M = 500.0

_BANDS = ((3, "negligible"), (8, "low"), (16, "moderate"))


def _check_emissions(emissions: Mapping, where: str) -> dict:
    checked = {}
    per_practice: dict[str, set[str]] = {}
    for key, value in emissions.items():
        try:
            practice, nutrient = key
        except (TypeError, ValueError):
            raise ValidationError(f"{where}: emission key {key!r} is not (practice, nutrient)")
        if practice not in PRACTICES:
            raise ValidationError(f"{where}: unknown practice {practice!r}")
        if nutrient not in CATALOGUE_NUTRIENTS:
            raise ValidationError(f"{where}: unknown nutrient {nutrient!r}")
        p = float(value)
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"{where}: P(high) for {key!r} is {p!r}, outside [0, 1]")
        checked[(practice, nutrient)] = p
        per_practice.setdefault(practice, set()).add(nutrient)
    nutrient_sets = list(per_practice.values())
    if nutrient_sets and any(s != nutrient_sets[0] for s in nutrient_sets[1:]):
        raise ValidationError(f"{where}: practices cover different nutrient sets")
    return checked


@dataclass(frozen=True)
class NutrientSource:
    """One quantified point or diffuse source in the catchment."""

    id: str
    kind: str
    category: str
    area_or_capacity: float
    soil_ph: float
    soil_type: str
    distance_m: float
    emissions: Mapping[tuple[str, str], float]

    @classmethod
    def make(cls, id, kind, category, area_or_capacity, soil_ph, soil_type,
             distance_m, emissions) -> "NutrientSource":
        if kind not in KINDS:
            raise ValidationError(f"source {id!r}: unknown kind {kind!r}")
        if soil_type not in SOIL_MOBILITY:
            raise ValidationError(f"source {id!r}: unknown soil type {soil_type!r}")
        area = float(area_or_capacity)
        if area < 0.0:
            raise ValidationError(f"source {id!r}: negative area/capacity")
        dist = float(distance_m)
        if dist < 0.0:
            raise ValidationError(f"source {id!r}: negative distance")
        checked = _check_emissions(emissions, f"source {id!r}")
        return cls(str(id), kind, category, area, float(soil_ph), soil_type, dist, checked)

    @property
    def practices(self) -> tuple[str, ...]:
        present = {practice for practice, _ in self.emissions}
        return tuple(p for p in PRACTICES if p in present)

    @property
    def nutrients(self) -> tuple[str, ...]:
        present = {nutrient for _, nutrient in self.emissions}
        return tuple(n for n in CATALOGUE_NUTRIENTS if n in present)


@dataclass(frozen=True)
class HazardRating:
    """Banded nutrient hazard: negligible / low / moderate / high."""

    value: str
    score: int


def hazard_band(score: int) -> str:
    for upper, label in _BANDS:
        if score <= upper:
            return label
    return "high"


def mobility(soil_type: str, soil_ph: float) -> int:
    """Soil mobility band 1-3; acid soils (pH < 5.5) move one band up."""
    try:
        m = SOIL_MOBILITY[soil_type]
    except KeyError:
        raise ValidationError(f"unknown soil type {soil_type!r}")
    if soil_ph < 5.5:
        m = min(3, m + 1)
    return m


def hazard_rating(source: NutrientSource, practice: str, nutrient: str) -> HazardRating:
    """E x M x D rubric score and its band for one source/practice/nutrient."""
    try:
        p = source.emissions[(practice, nutrient)]
    except KeyError:
        raise MissingEmissionEntry(
            f"source {source.id!r} has no emission entry for ({practice!r}, {nutrient!r})"
        )
    if p < 1 / 3:
        e = 1
    elif p < 2 / 3:
        e = 2
    else:
        e = 3
    m = mobility(source.soil_type, source.soil_ph)
    if source.distance_m < 100.0:
        d = 3
    elif source.distance_m < 500.0:
        d = 2
    else:
        d = 1
    score = e * m * d
    return HazardRating(hazard_band(score), score)


@dataclass(frozen=True)
class NutrientLoad:
    """Per-nutrient load indices, 1.0 = the current-practice baseline."""

    indices: Mapping[str, float]

    def __getitem__(self, nutrient: str) -> float:
        return self.indices[nutrient]

    def total_index(self, shares: Mapping[str, float]) -> float:
        """Share-weighted mean index across nutrients (shares sum to 1)."""
        total_share = math.fsum(shares.values())
        if abs(total_share - 1.0) > 1e-9:
            raise ValidationError(f"nutrient shares sum to {total_share!r}, expected 1")
        missing = set(shares) - set(self.indices)
        if missing:
            raise ValidationError(f"no load index for nutrients {sorted(missing)}")
        return math.fsum(shares[n] * self.indices[n] for n in shares)


def raw_load(
    sources: Sequence[NutrientSource],
    assignment: Mapping[str, str],
    lambda_m: float = ATTENUATION_M,
) -> dict[str, float]:
    """Unnormalized per-nutrient load under the given practice assignment.

    Each source contributes area x P(high) x exp(-distance / lambda) x (M/3)
    for every nutrient it quantifies; the sum is additive over sources.
    """
    totals = {n: 0.0 for n in CATALOGUE_NUTRIENTS}
    for source in sources:
        practice = assignment.get(source.id)
        if practice is None:
            raise UnassignedSource(f"source {source.id!r} has no assigned practice")
        if practice not in source.practices:
            raise UnassignedSource(
                f"source {source.id!r} does not define practice {practice!r}"
            )
        transport = math.exp(-source.distance_m / lambda_m)
        scale = source.area_or_capacity * transport * (
            mobility(source.soil_type, source.soil_ph) / 3.0
        )
        for nutrient in source.nutrients:
            totals[nutrient] += scale * source.emissions[(practice, nutrient)]
    return totals


def catchment_load(
    sources: Sequence[NutrientSource],
    assignment: Mapping[str, str],
    baseline: Mapping[str, float] | None = None,
    lambda_m: float = ATTENUATION_M,
) -> NutrientLoad:
    """Per-nutrient load indices, normalized against a baseline.

    Without an explicit ``baseline`` the raw loads of the same catalogue
    under all-current practice are used, so an unmodified catalogue reads
    exactly 1.0 per quantified nutrient.
    """
    raw = raw_load(sources, assignment, lambda_m)
    if baseline is None:
        baseline = raw_load(sources, {s.id: "current" for s in sources}, lambda_m)
    indices = {}
    for nutrient in CATALOGUE_NUTRIENTS:
        base = baseline.get(nutrient, 0.0)
        value = raw[nutrient]
        if base > 0.0:
            indices[nutrient] = value / base
        elif value == 0.0:
            indices[nutrient] = 0.0
        else:
            raise ValidationError(
                f"nutrient {nutrient!r} has load but no baseline to normalize by"
            )
    return NutrientLoad(indices)


@dataclass(frozen=True)
class ScienceLink:
    """How load indices enter the science model as hard evidence."""

    nodes: Mapping[str, str]  # nutrient -> science node name
    thresholds: Mapping[str, tuple[float, ...]]  # nutrient -> increasing cut points
    states: tuple[str, ...] = ("Low", "Medium", "High")


def load_to_evidence(load: NutrientLoad, link: ScienceLink) -> Evidence:
    """Map load indices to node states by cut points (right-closed bands).

    An index equal to a cut point takes the higher state. Nutrients without
    a linked node (potassium has none) are skipped.
    """
    assignments = {}
    for nutrient, node in link.nodes.items():
        cuts = tuple(link.thresholds[nutrient])
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ThresholdOrderError(
                f"cut points for {nutrient!r} are not strictly increasing: {cuts}"
            )
        if len(cuts) + 1 != len(link.states):
            raise ValidationError(
                f"{len(cuts)} cut points cannot index {len(link.states)} states"
            )
        assignments[node] = link.states[bisect_right(cuts, load[nutrient])]
    return Evidence(assignments)


@dataclass(frozen=True)
class Catalogue:
    """Bundled source list plus the data needed to re-profile and interpret it."""

    sources: tuple[NutrientSource, ...]
    profiles: Mapping[str, Mapping[tuple[str, str], float]]  # category -> emissions
    shares: Mapping[str, float]  # nutrient -> share of total load
    link: ScienceLink

    @classmethod
    def make(cls, sources, profiles, shares, link) -> "Catalogue":
        sources = tuple(sources)
        seen = set()
        for source in sources:
            if source.id in seen:
                raise ValidationError(f"duplicate source id {source.id!r}")
            seen.add(source.id)
        profiles = {
            category: _check_emissions(emissions, f"profile {category!r}")
            for category, emissions in profiles.items()
        }
        shares = {str(n): float(v) for n, v in shares.items()}
        for nutrient, value in shares.items():
            if nutrient not in CATALOGUE_NUTRIENTS:
                raise ValidationError(f"share for unknown nutrient {nutrient!r}")
            if value < 0.0:
                raise ValidationError(f"negative share for {nutrient!r}")
        total = math.fsum(shares.values())
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"nutrient shares sum to {total!r}, expected 1")
        return cls(sources, profiles, shares, link)

    def source(self, id: str) -> NutrientSource:
        for source in self.sources:
            if source.id == id:
                return source
        raise ValidationError(f"unknown source {id!r}")


def recategorize(catalogue: Catalogue, from_category: str, to_category: str) -> Catalogue:
    """New catalogue with every ``from_category`` source re-profiled.

    Sources keep their footprint (area, soil, distance) but take the target
    category's emission profile.
    """
    if to_category not in catalogue.profiles:
        raise UnknownCategory(f"no emission profile for category {to_category!r}")
    profile = catalogue.profiles[to_category]
    swapped = []
    for source in catalogue.sources:
        if source.category == from_category:
            swapped.append(NutrientSource.make(
                source.id, source.kind, to_category, source.area_or_capacity,
                source.soil_ph, source.soil_type, source.distance_m, profile,
            ))
        else:
            swapped.append(source)
    return Catalogue(tuple(swapped), catalogue.profiles, catalogue.shares, catalogue.link)
