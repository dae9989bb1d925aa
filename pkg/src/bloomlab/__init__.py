"""Discrete Bayesian-network scenario workbench for catchment management."""

from .analysis import (
    Scenario,
    ScenarioResult,
    ScenarioSet,
    SensitivityReport,
    evaluate_scenario,
    mutual_information,
    sensitivity_ranking,
)
from .compose import InputPlaceholder, OobnClass, OobnModel, flatten, instantiate
from .core import (
    Evidence,
    Network,
    NodeSpec,
    build_network,
    d_separated,
    markov_blanket,
)
from .dbn import DbnTemplate, slice_posteriors, unroll
from .infer import (
    Factor,
    PosteriorDistribution,
    elimination_order,
    enumerate_joint,
    joint_posterior,
    posterior,
    posterior_one,
)
from .io import ModelDocument, document_for, parse, parse_file, serialize, write_file
from .management import (
    Catalogue,
    HazardRating,
    NutrientLoad,
    NutrientSource,
    ScienceLink,
    catchment_load,
    hazard_rating,
    load_to_evidence,
    raw_load,
    recategorize,
)
from .pipeline import InterventionSpec, PipelineResult, run_pipeline
from .probit import (
    BmaSummary,
    CovariateSpec,
    Design,
    RjSample,
    TimeSeriesDataset,
    bma_predict,
    bma_summary,
    build_design,
    load_dataset_csv,
    rjmcmc_fit,
)

__version__ = "0.1.0"

__all__ = [
    "BmaSummary",
    "Catalogue",
    "CovariateSpec",
    "DbnTemplate",
    "Design",
    "Evidence",
    "Factor",
    "HazardRating",
    "InputPlaceholder",
    "InterventionSpec",
    "ModelDocument",
    "Network",
    "NodeSpec",
    "NutrientLoad",
    "NutrientSource",
    "OobnClass",
    "OobnModel",
    "PipelineResult",
    "PosteriorDistribution",
    "RjSample",
    "Scenario",
    "ScenarioResult",
    "ScenarioSet",
    "ScienceLink",
    "SensitivityReport",
    "TimeSeriesDataset",
    "bma_predict",
    "bma_summary",
    "build_design",
    "build_network",
    "catchment_load",
    "d_separated",
    "document_for",
    "elimination_order",
    "enumerate_joint",
    "evaluate_scenario",
    "flatten",
    "hazard_rating",
    "instantiate",
    "joint_posterior",
    "load_dataset_csv",
    "load_to_evidence",
    "markov_blanket",
    "mutual_information",
    "parse",
    "parse_file",
    "posterior",
    "posterior_one",
    "raw_load",
    "recategorize",
    "rjmcmc_fit",
    "run_pipeline",
    "sensitivity_ranking",
    "serialize",
    "slice_posteriors",
    "unroll",
    "write_file",
]
