"""Loaders for the bundled demonstration documents.

Each call re-parses the packaged file and returns a fresh object, so
callers can treat the result as their own.
"""

from __future__ import annotations

from importlib import resources

from .analysis import ScenarioSet
from .compose import OobnModel
from .dbn import DbnTemplate
from .io import parse
from .management import Catalogue
from .probit import TimeSeriesDataset, load_dataset_csv

__all__ = [
    "data_path",
    "demo_bloom_monthly",
    "demo_catalogue",
    "demo_dynamic",
    "demo_scenarios",
    "demo_science",
]


def data_path(name: str):
    """Traversable handle on one bundled data file."""
    return resources.files(__package__).joinpath("data", name)


def _document(name: str, kind: str):
    doc = parse(data_path(name).read_text(encoding="utf-8"))
    if doc.kind != kind:
        raise RuntimeError(f"{name} holds a {doc.kind!r} document, expected {kind!r}")
    return doc.body


def demo_science() -> OobnModel:
    """Object-oriented bloom-initiation model (flattens to 23 nodes)."""
    return _document("demo_science.json", "oobn")


def demo_dynamic() -> DbnTemplate:
    """Seasonal two-slice template over the November-March season."""
    return _document("demo_dynamic.json", "dbn-template")


def demo_scenarios() -> ScenarioSet:
    """Named evidence sets for the science model."""
    return _document("demo_scenarios.json", "scenario-set")


def demo_catalogue() -> Catalogue:
    """Catchment nutrient-source catalogue linked to the science model."""
    return _document("demo_catalogue.json", "catalogue")


def demo_bloom_monthly() -> TimeSeriesDataset:
    """Monthly bloom indicator with weather covariates (77 rows)."""
    with resources.as_file(data_path("demo_bloom_monthly.csv")) as path:
        return load_dataset_csv(path)
