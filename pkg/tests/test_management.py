"""Deterministic source catalogue: hazard rubric, loads, evidence mapping."""

import math

import numpy as np
import pytest

from bloomlab.core import Evidence
from bloomlab.errors import (
    MissingEmissionEntry,
    ThresholdOrderError,
    UnassignedSource,
    UnknownCategory,
    ValidationError,
)
from bloomlab.management import (
    CATALOGUE_NUTRIENTS,
    Catalogue,
    HazardRating,
    NutrientLoad,
    NutrientSource,
    ScienceLink,
    catchment_load,
    hazard_rating,
    load_to_evidence,
    mobility,
    raw_load,
    recategorize,
)

NUTRIENTS4 = ("iron", "nitrogen", "organics", "phosphorus")


def flat_emissions(p, practices=("current",), nutrients=NUTRIENTS4):
    return {(pr, n): p for pr in practices for n in nutrients}


def source(id="s1", kind="diffuse", category="grazing", area=100.0, ph=7.0,
           soil="loam", dist=300.0, emissions=None):
    if emissions is None:
        emissions = flat_emissions(0.5)
    return NutrientSource.make(id, kind, category, area, ph, soil, dist, emissions)


def band(score):
    if score <= 3:
        return "negligible"
    if score <= 8:
        return "low"
    if score <= 16:
        return "moderate"
    return "high"


# --- hazard rubric ----------------------------------------------------------

E_LEVELS = [(0.0, 1), (0.5, 2), (0.9, 3)]
M_LEVELS = [("clay", 7.0, 1), ("loam", 7.0, 2), ("sand", 7.0, 3)]
D_LEVELS = [(1000.0, 1), (300.0, 2), (50.0, 3)]


@pytest.mark.parametrize("p,e", E_LEVELS)
@pytest.mark.parametrize("soil,ph,m", M_LEVELS)
@pytest.mark.parametrize("dist,d", D_LEVELS)
def test_hazard_rubric_all_27_cells(p, e, soil, ph, m, dist, d):
    src = source(soil=soil, ph=ph, dist=dist, emissions=flat_emissions(p))
    rating = hazard_rating(src, "current", "nitrogen")
    assert rating.score == e * m * d
    assert rating.value == band(e * m * d)


def test_hazard_named_examples():
    lo = source(soil="clay", ph=7.0, dist=1000.0, emissions=flat_emissions(0.0))
    assert hazard_rating(lo, "current", "iron") == HazardRating("negligible", 1)
    hi = source(soil="sand", ph=5.0, dist=50.0, emissions=flat_emissions(0.9))
    assert hazard_rating(hi, "current", "iron") == HazardRating("high", 27)
    mid = source(soil="loam", ph=6.8, dist=300.0, emissions=flat_emissions(0.5))
    assert hazard_rating(mid, "current", "iron") == HazardRating("low", 8)


def test_hazard_band_edges():
    # emission bands are half-open on the left: 1/3 and 2/3 land upward
    assert hazard_rating(source(emissions=flat_emissions(1 / 3)), "current", "iron").score % 2 == 0
    src = source(soil="clay", dist=1000.0, emissions=flat_emissions(1 / 3))
    assert hazard_rating(src, "current", "iron").score == 2
    src = source(soil="clay", dist=1000.0, emissions=flat_emissions(2 / 3))
    assert hazard_rating(src, "current", "iron").score == 3
    # distance bands: exactly 100 m is the 2 band, exactly 500 m the 1 band
    assert hazard_rating(source(dist=100.0, emissions=flat_emissions(0.0),
                                soil="clay"), "current", "iron").score == 2
    assert hazard_rating(source(dist=500.0, emissions=flat_emissions(0.0),
                                soil="clay"), "current", "iron").score == 1


def test_mobility_acid_boost_capped():
    assert mobility("clay", 7.0) == 1
    assert mobility("clay", 5.0) == 2
    assert mobility("loam", 5.4) == 3
    assert mobility("sand", 5.0) == 3  # already at cap
    assert mobility("sand", 5.5) == 3  # boost only strictly below 5.5
    assert mobility("loam", 5.5) == 2


def test_hazard_missing_emission_entry():
    with pytest.raises(MissingEmissionEntry):
        hazard_rating(source(), "best", "iron")
    with pytest.raises(MissingEmissionEntry):
        hazard_rating(source(), "current", "potassium")


def test_hazard_monotone_in_inputs():
    rng = np.random.default_rng(41)
    soils = ["clay", "loam", "sand"]
    for _ in range(60):
        p = float(rng.uniform(0, 1))
        ph = float(rng.uniform(4.0, 8.0))
        si = int(rng.integers(3))
        dist = float(rng.uniform(0, 1500))
        base = hazard_rating(
            source(soil=soils[si], ph=ph, dist=dist, emissions=flat_emissions(p)),
            "current", "iron").score
        worse_p = hazard_rating(
            source(soil=soils[si], ph=ph, dist=dist,
                   emissions=flat_emissions(min(1.0, p + 0.4))),
            "current", "iron").score
        closer = hazard_rating(
            source(soil=soils[si], ph=ph, dist=dist * 0.3, emissions=flat_emissions(p)),
            "current", "iron").score
        sandier = hazard_rating(
            source(soil=soils[min(2, si + 1)], ph=ph, dist=dist,
                   emissions=flat_emissions(p)),
            "current", "iron").score
        assert worse_p >= base and closer >= base and sandier >= base


# --- source validation -------------------------------------------------------

def test_source_validation():
    with pytest.raises(ValidationError):
        source(emissions={("current", "iron"): 1.2})
    with pytest.raises(ValidationError):
        source(emissions={("sometimes", "iron"): 0.5})
    with pytest.raises(ValidationError):
        source(emissions={("current", "sulfur"): 0.5})
    with pytest.raises(ValidationError):
        source(soil="peat")
    with pytest.raises(ValidationError):
        source(area=-1.0)
    with pytest.raises(ValidationError):
        source(dist=-5.0)
    with pytest.raises(ValidationError):
        source(kind="areal")
    # practices must cover the same nutrients
    with pytest.raises(ValidationError):
        source(emissions={("current", "iron"): 0.5, ("best", "nitrogen"): 0.1})
    # potassium is a legal catalogue nutrient
    source(emissions={("current", "potassium"): 0.5})


# --- loads -------------------------------------------------------------------

def test_raw_load_matches_hand_formula():
    s1 = source(id="a", area=120.0, soil="sand", ph=5.0, dist=250.0,
                emissions=flat_emissions(0.7))
    s2 = source(id="b", area=40.0, soil="clay", ph=7.0, dist=900.0,
                emissions=flat_emissions(0.2, nutrients=("iron",)))
    got = raw_load([s1, s2], {"a": "current", "b": "current"})
    expect_iron = (
        120.0 * 0.7 * math.exp(-250.0 / 500.0) * (3 / 3)
        + 40.0 * 0.2 * math.exp(-900.0 / 500.0) * (1 / 3)
    )
    expect_n = 120.0 * 0.7 * math.exp(-250.0 / 500.0)
    assert got["iron"] == pytest.approx(expect_iron, rel=1e-12)
    assert got["nitrogen"] == pytest.approx(expect_n, rel=1e-12)
    assert got["potassium"] == 0.0
    assert set(got) == set(CATALOGUE_NUTRIENTS)


def test_raw_load_additive_over_concatenation():
    rng = np.random.default_rng(42)
    soils = ["clay", "loam", "sand"]
    sources = [
        source(id=f"s{i}", area=float(rng.uniform(1, 200)),
               soil=soils[int(rng.integers(3))], ph=float(rng.uniform(4, 8)),
               dist=float(rng.uniform(10, 1200)),
               emissions=flat_emissions(float(rng.uniform(0, 1))))
        for i in range(8)
    ]
    assign = {s.id: "current" for s in sources}
    whole = raw_load(sources, assign)
    left = raw_load(sources[:3], assign)
    right = raw_load(sources[3:], assign)
    for n in CATALOGUE_NUTRIENTS:
        assert whole[n] == pytest.approx(left[n] + right[n], rel=1e-12)


def test_empty_catalogue_loads_zero():
    load = catchment_load([], {})
    for n in CATALOGUE_NUTRIENTS:
        assert load[n] == 0.0


def test_current_practice_baseline_is_unity():
    sources = [source(id="a"), source(id="b", area=10.0)]
    assign = {"a": "current", "b": "current"}
    load = catchment_load(sources, assign)
    for n in NUTRIENTS4:
        assert load[n] == pytest.approx(1.0, abs=1e-12)
    # potassium undefined by these sources: stays zero, not 0/0
    assert load["potassium"] == 0.0


def test_catchment_load_with_explicit_baseline():
    s = source(id="a", emissions=flat_emissions(0.5, ("current", "best")))
    base = raw_load([s], {"a": "current"})
    halved = NutrientSource.make(
        s.id, s.kind, s.category, s.area_or_capacity, s.soil_ph, s.soil_type,
        s.distance_m, flat_emissions(0.25, ("current",)))
    load = catchment_load([halved], {"a": "current"}, baseline=base)
    for n in NUTRIENTS4:
        assert load[n] == pytest.approx(0.5, rel=1e-12)


def test_unassigned_source_rejected():
    s = source(id="a")
    with pytest.raises(UnassignedSource):
        catchment_load([s], {})
    with pytest.raises(UnassignedSource):
        catchment_load([s], {"a": "best"})  # practice not defined by source


def test_total_index_share_weighted():
    load = NutrientLoad({
        "iron": 1.0, "nitrogen": 2.0, "organics": 0.5,
        "phosphorus": 1.5, "potassium": 1.0,
    })
    shares = {"iron": 0.2, "nitrogen": 0.2, "organics": 0.2,
              "phosphorus": 0.2, "potassium": 0.2}
    assert load.total_index(shares) == pytest.approx(1.2, rel=1e-12)
    with pytest.raises(ValidationError):
        load.total_index({"iron": 0.5, "nitrogen": 0.2})


# --- evidence mapping ----------------------------------------------------------

LINK = ScienceLink(
    nodes={"iron": "DissolvedIron", "nitrogen": "DissolvedNitrogen"},
    thresholds={"iron": (0.8, 1.25), "nitrogen": (0.8, 1.25)},
)


def unit_load(**over):
    vals = {n: 1.0 for n in CATALOGUE_NUTRIENTS}
    vals.update(over)
    return NutrientLoad(vals)


def test_load_to_evidence_bands():
    ev = load_to_evidence(unit_load(iron=0.5, nitrogen=2.0), LINK)
    assert ev["DissolvedIron"] == "Low"
    assert ev["DissolvedNitrogen"] == "High"


def test_load_to_evidence_right_closed_cuts():
    ev = load_to_evidence(unit_load(iron=0.8, nitrogen=1.25), LINK)
    assert ev["DissolvedIron"] == "Medium"
    assert ev["DissolvedNitrogen"] == "High"
    ev = load_to_evidence(unit_load(iron=0.7999999, nitrogen=1.0), LINK)
    assert ev["DissolvedIron"] == "Low"
    assert ev["DissolvedNitrogen"] == "Medium"


def test_load_to_evidence_skips_unlinked_nutrients():
    ev = load_to_evidence(unit_load(potassium=9.0), LINK)
    assert set(ev.nodes()) == {"DissolvedIron", "DissolvedNitrogen"}


def test_threshold_order_enforced():
    bad = ScienceLink(nodes={"iron": "DissolvedIron"}, thresholds={"iron": (1.25, 0.8)})
    with pytest.raises(ThresholdOrderError):
        load_to_evidence(unit_load(), bad)
    flat = ScienceLink(nodes={"iron": "DissolvedIron"}, thresholds={"iron": (0.8, 0.8)})
    with pytest.raises(ThresholdOrderError):
        load_to_evidence(unit_load(), flat)


# --- catalogue bundle -----------------------------------------------------------

def demo_catalogue():
    sources = (
        source(id="nv1", category="natural vegetation", area=60.0,
               emissions=flat_emissions(0.1, ("current", "planned", "best"))),
        source(id="gr1", category="grazing", area=140.0,
               emissions=flat_emissions(0.5, ("current", "planned", "best"))),
    )
    profiles = {
        "natural vegetation": flat_emissions(0.1, ("current", "planned", "best")),
        "grazing": flat_emissions(0.5, ("current", "planned", "best")),
        "agriculture": flat_emissions(0.8, ("current", "planned", "best")),
    }
    shares = {"iron": 0.25, "nitrogen": 0.25, "organics": 0.25,
              "phosphorus": 0.25, "potassium": 0.0}
    return Catalogue.make(sources, profiles, shares, LINK)


def test_catalogue_recategorize_swaps_profile():
    cat = demo_catalogue()
    converted = recategorize(cat, "natural vegetation", "agriculture")
    src = {s.id: s for s in converted.sources}["nv1"]
    assert src.category == "agriculture"
    assert src.emissions[("current", "iron")] == 0.8
    assert src.area_or_capacity == 60.0
    untouched = {s.id: s for s in converted.sources}["gr1"]
    assert untouched.emissions[("current", "iron")] == 0.5


def test_catalogue_recategorize_unknown_target():
    with pytest.raises(UnknownCategory):
        recategorize(demo_catalogue(), "grazing", "mining")


def test_catalogue_duplicate_ids_rejected():
    with pytest.raises(ValidationError):
        Catalogue.make((source(id="a"), source(id="a")),
                       {}, {"iron": 1.0}, LINK)


def test_catalogue_shares_must_sum_to_one():
    with pytest.raises(ValidationError):
        Catalogue.make((source(id="a"),), {}, {"iron": 0.4, "nitrogen": 0.4}, LINK)
