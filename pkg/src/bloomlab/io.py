"""One JSON envelope for every document kind the toolkit reads and writes.

A document is ``{"format_version": 1, "kind": ..., "body": ...}``. ``parse``
rebuilds the typed in-memory object and reruns every construction-time
invariant, so a document that parses is a document that loads. Syntax
errors carry line/column; schema violations carry a dotted field path;
any other format version is refused outright.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import Scenario, ScenarioSet
from .compose import InputPlaceholder, OobnClass, OobnModel, flatten
from .core import Evidence, Network, NodeSpec, build_network
from .dbn import DEFAULT_SLICE_LABELS, DbnTemplate
from .errors import ParseError, SchemaError, ValidationError, VersionError
from .management import Catalogue, NutrientSource, ScienceLink
from .pipeline import InterventionSpec
from .probit import TimeSeriesDataset

FORMAT_VERSION = 1

KINDS = (
    "network",
    "oobn",
    "dbn-template",
    "scenario-set",
    "catalogue",
    "intervention",
    "dataset",
)


@dataclass(frozen=True)
class ModelDocument:
    """A parsed document: its kind tag plus the fully built body object."""

    kind: str
    body: object
    format_version: int = FORMAT_VERSION


def parse(text: str) -> ModelDocument:
    """Parse document text, raising on anything the modules would reject."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, err.lineno, err.colno) from err
    obj = _object(data, "document")
    _fields(obj, "", ("format_version", "kind", "body"))
    version = obj["format_version"]
    if isinstance(version, bool) or not isinstance(version, int):
        raise SchemaError("format_version", "expected an integer")
    if version != FORMAT_VERSION:
        raise VersionError(
            f"unsupported format_version {version}; this build reads version {FORMAT_VERSION}"
        )
    kind = _string(obj["kind"], "kind")
    if kind not in _PARSERS:
        raise SchemaError("kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    body = _PARSERS[kind](obj["body"], "body")
    return ModelDocument(kind, body, version)


def parse_file(path) -> ModelDocument:
    return parse(Path(path).read_text(encoding="utf-8"))


def serialize(document: ModelDocument) -> str:
    """Render a document back to deterministic, diff-friendly JSON text."""
    if document.kind not in _WRITERS:
        raise ValidationError(f"cannot serialize documents of kind {document.kind!r}")
    expected, writer = _WRITERS[document.kind]
    if not isinstance(document.body, expected):
        raise ValidationError(
            f"document of kind {document.kind!r} holds {type(document.body).__name__},"
            f" expected {expected.__name__}"
        )
    payload = {
        "format_version": document.format_version,
        "kind": document.kind,
        "body": writer(document.body),
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def document_for(body, kind: str | None = None) -> ModelDocument:
    """Wrap a model object in a document envelope, inferring kind from type."""
    if kind is None:
        for expected, candidate in _KIND_BY_TYPE:
            if isinstance(body, expected):
                kind = candidate
                break
        else:
            raise ValidationError(f"no document kind holds {type(body).__name__} objects")
    return ModelDocument(kind, body)


def write_file(path, body, kind: str | None = None) -> None:
    Path(path).write_text(serialize(document_for(body, kind)), encoding="utf-8")


# --- schema plumbing --------------------------------------------------------------


def _join(path: str, key) -> str:
    return f"{key}" if not path else f"{path}.{key}"


def _fail(path: str, message: str):
    raise SchemaError(path, message)


def _fields(obj: dict, path: str, required, optional=()):
    for key in obj:
        if key not in required and key not in optional:
            _fail(_join(path, key), "unknown field")
    for key in required:
        if key not in obj:
            _fail(_join(path, key), "missing required field")


def _object(value, path) -> dict:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _array(value, path) -> list:
    if not isinstance(value, list):
        _fail(path, f"expected an array, got {type(value).__name__}")
    return value


def _string(value, path) -> str:
    if not isinstance(value, str):
        _fail(path, f"expected a string, got {type(value).__name__}")
    return value


def _number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _integer(value, path) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {type(value).__name__}")
    return value


def _string_array(value, path) -> list[str]:
    return [_string(item, f"{path}[{i}]") for i, item in enumerate(_array(value, path))]


def _string_map(value, path) -> dict[str, str]:
    obj = _object(value, path)
    return {key: _string(val, _join(path, key)) for key, val in obj.items()}


def _build(path, factory, *args, **kwargs):
    """Run a module constructor, converting its rejections into schema errors."""
    try:
        return factory(*args, **kwargs)
    except SchemaError:
        raise
    except ValidationError as err:
        raise SchemaError(path, str(err)) from err


def _matrix(value, path) -> np.ndarray:
    rows = _array(value, path)
    if not rows:
        _fail(path, "expected at least one row")
    table = []
    for i, row in enumerate(rows):
        cells = _array(row, f"{path}[{i}]")
        table.append([_number(cell, f"{path}[{i}][{j}]") for j, cell in enumerate(cells)])
    if len({len(row) for row in table}) != 1:
        _fail(path, "rows differ in length")
    return np.asarray(table, dtype=np.float64)


def _matrix_json(cpt) -> list[list[float]]:
    return [[float(cell) for cell in row] for row in np.asarray(cpt)]


# --- node specs -------------------------------------------------------------------


def _parse_node(value, path) -> NodeSpec:
    obj = _object(value, path)
    _fields(obj, path, ("name", "states", "parents", "cpt"))
    return NodeSpec.make(
        _string(obj["name"], _join(path, "name")),
        _string_array(obj["states"], _join(path, "states")),
        _string_array(obj["parents"], _join(path, "parents")),
        _matrix(obj["cpt"], _join(path, "cpt")),
    )


def _parse_nodes(value, path) -> list[NodeSpec]:
    return [_parse_node(item, f"{path}[{i}]") for i, item in enumerate(_array(value, path))]


def _node_json(spec: NodeSpec) -> dict:
    return {
        "name": spec.name,
        "states": list(spec.states),
        "parents": list(spec.parents),
        "cpt": _matrix_json(spec.cpt),
    }


def _parse_evidence(value, path) -> Evidence:
    return Evidence(_string_map(value, path))


def _evidence_json(evidence: Evidence) -> dict:
    return {node: state for node, state in sorted(evidence.items())}


# --- network ----------------------------------------------------------------------


def _parse_network(body, path) -> Network:
    obj = _object(body, path)
    _fields(obj, path, ("nodes",))
    specs = _parse_nodes(obj["nodes"], _join(path, "nodes"))
    return _build(_join(path, "nodes"), build_network, specs)


def _network_json(net: Network) -> dict:
    return {"nodes": [_node_json(net.node(name)) for name in net.node_names()]}


# --- oobn -------------------------------------------------------------------------


def _parse_oobn(body, path) -> OobnModel:
    obj = _object(body, path)
    _fields(obj, path, ("classes", "instances", "bindings", "top_level"))

    classes = []
    for i, value in enumerate(_array(obj["classes"], _join(path, "classes"))):
        cpath = f"{_join(path, 'classes')}[{i}]"
        cls = _object(value, cpath)
        _fields(cls, cpath, ("name", "nodes"), optional=("inputs", "outputs"))
        inputs = []
        for j, ph in enumerate(_array(cls.get("inputs", []), _join(cpath, "inputs"))):
            ppath = f"{_join(cpath, 'inputs')}[{j}]"
            placeholder = _object(ph, ppath)
            _fields(placeholder, ppath, ("name", "states"))
            inputs.append(
                InputPlaceholder(
                    _string(placeholder["name"], _join(ppath, "name")),
                    tuple(_string_array(placeholder["states"], _join(ppath, "states"))),
                )
            )
        classes.append(
            _build(
                cpath,
                OobnClass.make,
                _string(cls["name"], _join(cpath, "name")),
                _parse_nodes(cls["nodes"], _join(cpath, "nodes")),
                inputs,
                _string_array(cls.get("outputs", []), _join(cpath, "outputs")),
            )
        )

    instances = []
    for i, value in enumerate(_array(obj["instances"], _join(path, "instances"))):
        ipath = f"{_join(path, 'instances')}[{i}]"
        inst = _object(value, ipath)
        _fields(inst, ipath, ("name", "class"))
        instances.append(
            (_string(inst["name"], _join(ipath, "name")), _string(inst["class"], _join(ipath, "class")))
        )

    bindings = {}
    for i, value in enumerate(_array(obj["bindings"], _join(path, "bindings"))):
        bpath = f"{_join(path, 'bindings')}[{i}]"
        binding = _object(value, bpath)
        _fields(binding, bpath, ("instance", "input", "source_instance", "source_node"))
        source_instance = binding["source_instance"]
        if source_instance is not None:
            source_instance = _string(source_instance, _join(bpath, "source_instance"))
        key = (
            _string(binding["instance"], _join(bpath, "instance")),
            _string(binding["input"], _join(bpath, "input")),
        )
        bindings[key] = (source_instance, _string(binding["source_node"], _join(bpath, "source_node")))

    top_level = _parse_nodes(obj["top_level"], _join(path, "top_level"))
    model = _build(path, OobnModel.make, classes, instances, bindings, top_level)
    # flattening runs the full structural validation (bindings, cycles, shapes)
    _build(path, flatten, model)
    return model


def _oobn_json(model: OobnModel) -> dict:
    return {
        "classes": [
            {
                "name": cls.name,
                "inputs": [{"name": ph.name, "states": list(ph.states)} for ph in cls.inputs],
                "outputs": list(cls.outputs),
                "nodes": [_node_json(spec) for spec in cls.nodes],
            }
            for cls in model.classes
        ],
        "instances": [{"name": name, "class": cls} for name, cls in model.instances],
        "bindings": [
            {
                "instance": instance,
                "input": input_name,
                "source_instance": source_instance,
                "source_node": source_node,
            }
            for (instance, input_name), (source_instance, source_node) in model.bindings.items()
        ],
        "top_level": [_node_json(spec) for spec in model.top_level],
    }


# --- dbn template -----------------------------------------------------------------


def _parse_dbn(body, path) -> DbnTemplate:
    obj = _object(body, path)
    _fields(obj, path, ("nodes", "inter_edges", "initial_cpts"), optional=("slice_labels",))
    nodes = _parse_nodes(obj["nodes"], _join(path, "nodes"))

    edges = []
    for i, value in enumerate(_array(obj["inter_edges"], _join(path, "inter_edges"))):
        epath = f"{_join(path, 'inter_edges')}[{i}]"
        pair = _array(value, epath)
        if len(pair) != 2:
            _fail(epath, "expected a [source, destination] pair")
        edges.append((_string(pair[0], f"{epath}[0]"), _string(pair[1], f"{epath}[1]")))

    initial = {}
    for name, value in _object(obj["initial_cpts"], _join(path, "initial_cpts")).items():
        initial[name] = _matrix(value, _join(_join(path, "initial_cpts"), name))

    labels = (
        _string_array(obj["slice_labels"], _join(path, "slice_labels"))
        if "slice_labels" in obj
        else DEFAULT_SLICE_LABELS
    )
    return _build(path, DbnTemplate.make, nodes, edges, initial, labels)


def _dbn_json(template: DbnTemplate) -> dict:
    return {
        "nodes": [_node_json(spec) for spec in template.slice_nodes],
        "inter_edges": [[src, dst] for src, dst in template.inter_edges],
        "initial_cpts": {
            name: _matrix_json(template.initial_cpts[name])
            for name in sorted(template.initial_cpts)
        },
        "slice_labels": list(template.slice_labels),
    }


# --- scenario set -----------------------------------------------------------------


def _parse_scenarios(body, path) -> ScenarioSet:
    obj = _object(body, path)
    _fields(obj, path, ("scenarios",), optional=("model",))
    model = _string(obj["model"], _join(path, "model")) if obj.get("model") is not None else None

    scenarios = []
    for i, value in enumerate(_array(obj["scenarios"], _join(path, "scenarios"))):
        spath = f"{_join(path, 'scenarios')}[{i}]"
        scenario = _object(value, spath)
        _fields(scenario, spath, ("name", "description", "evidence"), optional=("baseline",))
        baseline = scenario.get("baseline")
        if baseline is not None:
            baseline = _string(baseline, _join(spath, "baseline"))
        scenarios.append(
            Scenario(
                _string(scenario["name"], _join(spath, "name")),
                _string(scenario["description"], _join(spath, "description")),
                _parse_evidence(scenario["evidence"], _join(spath, "evidence")),
                baseline,
            )
        )

    names = {scenario.name for scenario in scenarios}
    for i, scenario in enumerate(scenarios):
        if scenario.baseline is not None and scenario.baseline not in names:
            _fail(
                f"{_join(path, 'scenarios')}[{i}].baseline",
                f"references unknown scenario {scenario.baseline!r}",
            )
    return _build(path, ScenarioSet, tuple(scenarios), model)


def _scenarios_json(bundle: ScenarioSet) -> dict:
    body = {}
    if bundle.model is not None:
        body["model"] = bundle.model
    body["scenarios"] = [
        {
            "name": scenario.name,
            "description": scenario.description,
            "evidence": _evidence_json(scenario.evidence),
            **({"baseline": scenario.baseline} if scenario.baseline is not None else {}),
        }
        for scenario in bundle.scenarios
    ]
    return body


# --- catalogue --------------------------------------------------------------------


def _parse_emissions(value, path) -> dict[tuple[str, str], float]:
    emissions = {}
    for practice, table in _object(value, path).items():
        tpath = _join(path, practice)
        for nutrient, p in _object(table, tpath).items():
            emissions[(practice, nutrient)] = _number(p, _join(tpath, nutrient))
    return emissions


def _emissions_json(emissions) -> dict:
    nested: dict[str, dict[str, float]] = {}
    for (practice, nutrient), p in emissions.items():
        nested.setdefault(practice, {})[nutrient] = float(p)
    return {
        practice: {nutrient: table[nutrient] for nutrient in sorted(table)}
        for practice, table in sorted(nested.items())
    }


_SOURCE_FIELDS = (
    "id",
    "kind",
    "category",
    "area_or_capacity",
    "soil_ph",
    "soil_type",
    "distance_m",
    "emissions",
)


def _parse_catalogue(body, path) -> Catalogue:
    obj = _object(body, path)
    _fields(obj, path, ("sources", "profiles", "shares", "link"))

    sources = []
    for i, value in enumerate(_array(obj["sources"], _join(path, "sources"))):
        spath = f"{_join(path, 'sources')}[{i}]"
        source = _object(value, spath)
        _fields(source, spath, _SOURCE_FIELDS)
        sources.append(
            _build(
                spath,
                NutrientSource.make,
                _string(source["id"], _join(spath, "id")),
                _string(source["kind"], _join(spath, "kind")),
                _string(source["category"], _join(spath, "category")),
                _number(source["area_or_capacity"], _join(spath, "area_or_capacity")),
                _number(source["soil_ph"], _join(spath, "soil_ph")),
                _string(source["soil_type"], _join(spath, "soil_type")),
                _number(source["distance_m"], _join(spath, "distance_m")),
                _parse_emissions(source["emissions"], _join(spath, "emissions")),
            )
        )

    profiles = {
        category: _parse_emissions(table, _join(_join(path, "profiles"), category))
        for category, table in _object(obj["profiles"], _join(path, "profiles")).items()
    }
    shares = {
        nutrient: _number(p, _join(_join(path, "shares"), nutrient))
        for nutrient, p in _object(obj["shares"], _join(path, "shares")).items()
    }

    lpath = _join(path, "link")
    link_obj = _object(obj["link"], lpath)
    _fields(link_obj, lpath, ("nodes", "thresholds"), optional=("states",))
    thresholds = {}
    for nutrient, cuts in _object(link_obj["thresholds"], _join(lpath, "thresholds")).items():
        cpath = _join(_join(lpath, "thresholds"), nutrient)
        thresholds[nutrient] = tuple(_number(c, f"{cpath}[{j}]") for j, c in enumerate(_array(cuts, cpath)))
    states = (
        tuple(_string_array(link_obj["states"], _join(lpath, "states")))
        if "states" in link_obj
        else ScienceLink.__dataclass_fields__["states"].default
    )
    link = ScienceLink(_string_map(link_obj["nodes"], _join(lpath, "nodes")), thresholds, states)

    return _build(path, Catalogue.make, sources, profiles, shares, link)


def _catalogue_json(catalogue: Catalogue) -> dict:
    return {
        "sources": [
            {
                "id": source.id,
                "kind": source.kind,
                "category": source.category,
                "area_or_capacity": float(source.area_or_capacity),
                "soil_ph": float(source.soil_ph),
                "soil_type": source.soil_type,
                "distance_m": float(source.distance_m),
                "emissions": _emissions_json(source.emissions),
            }
            for source in catalogue.sources
        ],
        "profiles": {
            category: _emissions_json(catalogue.profiles[category])
            for category in sorted(catalogue.profiles)
        },
        "shares": {nutrient: float(catalogue.shares[nutrient]) for nutrient in sorted(catalogue.shares)},
        "link": {
            "nodes": {n: catalogue.link.nodes[n] for n in sorted(catalogue.link.nodes)},
            "thresholds": {
                n: [float(c) for c in catalogue.link.thresholds[n]]
                for n in sorted(catalogue.link.thresholds)
            },
            "states": list(catalogue.link.states),
        },
    }


# --- intervention -----------------------------------------------------------------


def _parse_intervention(body, path) -> InterventionSpec:
    obj = _object(body, path)
    _fields(
        obj,
        path,
        (),
        optional=("label", "practice_overrides", "landuse_overrides", "extra_evidence"),
    )
    return InterventionSpec(
        _string_map(obj.get("practice_overrides", {}), _join(path, "practice_overrides")),
        _string_map(obj.get("landuse_overrides", {}), _join(path, "landuse_overrides")),
        _parse_evidence(obj.get("extra_evidence", {}), _join(path, "extra_evidence")),
        _string(obj.get("label", ""), _join(path, "label")),
    )


def _intervention_json(spec: InterventionSpec) -> dict:
    return {
        "label": spec.label,
        "practice_overrides": {k: spec.practice_overrides[k] for k in sorted(spec.practice_overrides)},
        "landuse_overrides": {k: spec.landuse_overrides[k] for k in sorted(spec.landuse_overrides)},
        "extra_evidence": _evidence_json(spec.extra_evidence),
    }


# --- dataset ----------------------------------------------------------------------

_ROW_FIELDS = ("year", "month", "bloom")


def _parse_dataset(body, path) -> TimeSeriesDataset:
    obj = _object(body, path)
    _fields(obj, path, ("rows",))
    rows = _array(obj["rows"], _join(path, "rows"))
    if not rows:
        _fail(_join(path, "rows"), "expected at least one row")

    months, bloom = [], []
    columns: list[str] = []
    series: dict[str, list[float]] = {}
    for i, value in enumerate(rows):
        rpath = f"{_join(path, 'rows')}[{i}]"
        row = _object(value, rpath)
        for field in _ROW_FIELDS:
            if field not in row:
                _fail(_join(rpath, field), "missing required field")
        months.append((_integer(row["year"], _join(rpath, "year")), _integer(row["month"], _join(rpath, "month"))))
        bloom.append(_integer(row["bloom"], _join(rpath, "bloom")))
        covariate_keys = sorted(set(row) - set(_ROW_FIELDS))
        if i == 0:
            columns = covariate_keys
        elif covariate_keys != columns:
            _fail(rpath, "covariate columns differ from the first row")
        for name in columns:
            series.setdefault(name, []).append(_number(row[name], _join(rpath, name)))

    covariates = {name: np.asarray(series[name], dtype=np.float64) for name in columns}
    return _build(_join(path, "rows"), TimeSeriesDataset.make, months, np.asarray(bloom), covariates)


def _dataset_json(dataset: TimeSeriesDataset) -> dict:
    columns = sorted(dataset.covariates)
    rows = []
    for i, (year, month) in enumerate(dataset.months):
        row = {"year": year, "month": month, "bloom": int(dataset.bloom[i])}
        for name in columns:
            row[name] = float(dataset.covariates[name][i])
        rows.append(row)
    return {"rows": rows}


_PARSERS = {
    "network": _parse_network,
    "oobn": _parse_oobn,
    "dbn-template": _parse_dbn,
    "scenario-set": _parse_scenarios,
    "catalogue": _parse_catalogue,
    "intervention": _parse_intervention,
    "dataset": _parse_dataset,
}

_WRITERS = {
    "network": (Network, _network_json),
    "oobn": (OobnModel, _oobn_json),
    "dbn-template": (DbnTemplate, _dbn_json),
    "scenario-set": (ScenarioSet, _scenarios_json),
    "catalogue": (Catalogue, _catalogue_json),
    "intervention": (InterventionSpec, _intervention_json),
    "dataset": (TimeSeriesDataset, _dataset_json),
}

_KIND_BY_TYPE = tuple((expected, kind) for kind, (expected, _) in _WRITERS.items())
