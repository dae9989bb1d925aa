"""HTTP API over a directory of model documents.

Documents load once at startup (fail-fast on any parse error) and are
immutable afterwards; queries run against compiled networks shared by
all requests. The only mutable state is the probit job table, which a
lock guards; fits run on a small worker pool so they never block query
endpoints.
"""

from __future__ import annotations

import itertools
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .analysis import Scenario, ScenarioSet, evaluate_scenario, sensitivity_ranking
from .compose import flatten
from .core import Evidence, Network
from .dbn import unroll
from .errors import (
    ComputationError,
    InconsistentEvidence,
    UnknownScenario,
    ValidationError,
    ZeroProbabilityEvidence,
)
from .infer import posterior_one
from .io import document_for, parse_file, serialize
from .pipeline import BLOOM_NODE, InterventionSpec, run_pipeline
from .probit import (
    DEFAULT_COVARIATES,
    TimeSeriesDataset,
    bma_summary,
    build_design,
    load_dataset_csv,
    rjmcmc_fit,
)

@dataclass(frozen=True)
class ModelEntry:
    """One loaded document plus whatever compiled form it supports."""

    id: str
    kind: str
    body: object
    network: Network | None = None
    scenarios: ScenarioSet | None = None


@dataclass
class Registry:
    """Immutable after startup: documents, compiled networks, datasets."""

    entries: dict[str, ModelEntry] = field(default_factory=dict)
    datasets: dict[str, TimeSeriesDataset] = field(default_factory=dict)

    def get(self, model_id: str) -> ModelEntry:
        try:
            return self.entries[model_id]
        except KeyError:
            raise HTTPException(
                404,
                {"code": "model_not_found", "message": f"no model with id {model_id!r}"},
            )

    def queryable(self, model_id: str) -> ModelEntry:
        entry = self.get(model_id)
        if entry.network is None:
            raise ValidationError(f"a {entry.kind!r} document cannot be queried")
        return entry

    def only_kind(self, kind: str, requested: str | None, what: str) -> ModelEntry:
        if requested is not None:
            entry = self.get(requested)
            if entry.kind != kind:
                raise ValidationError(f"{requested!r} is a {entry.kind!r}, expected {kind!r}")
            return entry
        matches = [e for e in self.entries.values() if e.kind == kind]
        if len(matches) != 1:
            raise ValidationError(
                f"{what} is required when the registry holds {len(matches)} {kind} documents"
            )
        return matches[0]


def _compile(body, kind: str) -> Network | None:
    if kind == "network":
        return body
    if kind == "oobn":
        return flatten(body)
    if kind == "dbn-template":
        return unroll(body, len(body.slice_labels))
    return None


def default_model_dir() -> Path:
    return Path(str(resources.files("bloomlab").joinpath("data")))


def build_registry(model_dir: str | Path | None = None) -> Registry:
    """Load every document in the directory; any failure aborts startup."""
    root = Path(model_dir) if model_dir is not None else default_model_dir()
    if not root.is_dir():
        raise FileNotFoundError(f"model directory {root} does not exist")
    registry = Registry()
    scenario_sets: list[tuple[str, ScenarioSet]] = []
    for path in sorted(root.glob("*.json")):
        doc = parse_file(path)
        entry = ModelEntry(path.stem, doc.kind, doc.body, _compile(doc.body, doc.kind))
        registry.entries[entry.id] = entry
        if isinstance(doc.body, ScenarioSet):
            scenario_sets.append((entry.id, doc.body))
    for path in sorted(root.glob("*.csv")):
        registry.datasets[path.stem] = load_dataset_csv(path)
    for set_id, sset in scenario_sets:
        if sset.model is None or sset.model not in registry.entries:
            continue
        target = registry.entries[sset.model]
        registry.entries[sset.model] = ModelEntry(
            target.id, target.kind, target.body, target.network, sset
        )
    return registry


@dataclass
class Job:
    id: str
    status: str  # queued | running | done | failed
    result: dict | None = None
    error: str | None = None


class JobTable:
    """Serialized access to probit fits; execution happens off-thread."""

    def __init__(self, max_workers: int = 2):
        self._lock = threading.Lock()
        self._jobs: dict[str, Job] = {}
        self._executor = ThreadPoolExecutor(max_workers=max_workers)
        self._ids = itertools.count(1)

    def submit(self, work) -> str:
        with self._lock:
            job_id = f"job-{next(self._ids)}"
            self._jobs[job_id] = Job(job_id, "queued")

        def run():
            with self._lock:
                self._jobs[job_id].status = "running"
            try:
                result = work()
            except Exception as exc:
                with self._lock:
                    job = self._jobs[job_id]
                    job.status, job.error = "failed", str(exc)
            else:
                with self._lock:
                    job = self._jobs[job_id]
                    job.status, job.result = "done", result

        self._executor.submit(run)
        return job_id

    def snapshot(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise HTTPException(
                    404, {"code": "job_not_found", "message": f"no job with id {job_id!r}"}
                )
            return Job(job.id, job.status, job.result, job.error)


def _require(payload: dict, key: str, kind: type, default=None):
    if key not in payload:
        if default is not None:
            return default
        raise ValidationError(f"request body is missing {key!r}")
    value = payload[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ValidationError(f"field {key!r} must be a {kind.__name__}")
    return value


def _string_map(payload: dict, key: str) -> dict[str, str]:
    raw = payload.get(key, {})
    if not isinstance(raw, dict):
        raise ValidationError(f"field {key!r} must be an object")
    out = {}
    for node, state in raw.items():
        if not isinstance(state, str):
            raise ValidationError(f"field {key!r} must map names to strings")
        out[str(node)] = state
    return out


def _posterior_payload(dist) -> dict:
    return dict(dist.probabilities)


def create_app(model_dir: str | Path | None = None) -> FastAPI:
    registry = build_registry(model_dir)
    jobs = JobTable()
    app = FastAPI(title="bloomlab", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ZeroProbabilityEvidence)
    @app.exception_handler(InconsistentEvidence)
    async def impossible_evidence(request: Request, exc):
        return JSONResponse(
            {"error": {"code": "impossible_evidence", "message": str(exc)}}, status_code=422
        )

    @app.exception_handler(ValidationError)
    async def validation(request: Request, exc):
        return JSONResponse(
            {"error": {"code": "validation", "message": str(exc)}}, status_code=400
        )

    @app.exception_handler(ComputationError)
    async def computation(request: Request, exc):
        return JSONResponse(
            {"error": {"code": "computation_failed", "message": str(exc)}}, status_code=500
        )

    @app.exception_handler(RequestValidationError)
    async def bad_request(request: Request, exc):
        return JSONResponse(
            {"error": {"code": "bad_request", "message": str(exc)}}, status_code=400
        )

    @app.exception_handler(HTTPException)
    async def http_error(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "error", "message": str(detail)}
        return JSONResponse({"error": detail}, status_code=exc.status_code)

    @app.get("/models")
    def list_models():
        return {
            "models": [
                {
                    "id": entry.id,
                    "kind": entry.kind,
                    "queryable": entry.network is not None,
                    "scenarios": (
                        [s.name for s in entry.scenarios] if entry.scenarios else []
                    ),
                }
                for entry in registry.entries.values()
            ],
            "datasets": sorted(registry.datasets),
        }

    @app.get("/models/{model_id}")
    def get_model(model_id: str):
        entry = registry.get(model_id)
        return Response(
            serialize(document_for(entry.body, entry.kind)), media_type="application/json"
        )

    @app.get("/models/{model_id}/nodes")
    def get_nodes(model_id: str):
        entry = registry.queryable(model_id)
        net = entry.network
        return {
            "model": model_id,
            "nodes": [
                {
                    "name": name,
                    "states": list(net.states(name)),
                    "parents": list(net.parents(name)),
                }
                for name in net.node_names()
            ],
        }

    @app.post("/models/{model_id}/query")
    def query(model_id: str, payload: dict):
        entry = registry.queryable(model_id)
        target = _require(payload, "target", str)
        evidence = Evidence(_string_map(payload, "evidence"))
        dist = posterior_one(entry.network, target, evidence)
        return {
            "model": model_id,
            "target": target,
            "evidence": dict(evidence.items()),
            "posterior": _posterior_payload(dist),
        }

    @app.post("/models/{model_id}/scenario")
    def scenario(model_id: str, payload: dict):
        entry = registry.queryable(model_id)
        target = _require(payload, "target", str, default=BLOOM_NODE)
        if "name" in payload:
            name = _require(payload, "name", str)
            if entry.scenarios is None:
                raise ValidationError(f"model {model_id!r} has no scenario set")
            try:
                chosen = entry.scenarios.get(name)
            except UnknownScenario as exc:
                raise HTTPException(
                    404, {"code": "scenario_not_found", "message": str(exc)}
                )
            pool = entry.scenarios.scenarios
        else:
            evidence = Evidence(_string_map(payload, "evidence"))
            chosen = Scenario("inline", "ad-hoc evidence", evidence)
            pool = ()
        result = evaluate_scenario(entry.network, chosen, target, pool)
        return {
            "model": model_id,
            "scenario": result.scenario,
            "target": result.target,
            "posterior": _posterior_payload(result.posterior),
            "baseline": _posterior_payload(result.baseline),
            "delta": dict(result.delta),
        }

    @app.get("/models/{model_id}/sensitivity")
    def sensitivity(model_id: str, target: str):
        entry = registry.queryable(model_id)
        report = sensitivity_ranking(entry.network, target)
        return {
            "model": model_id,
            "target": target,
            "entries": [[name, mi] for name, mi in report.entries],
        }

    @app.post("/pipeline/run")
    def pipeline_run(payload: dict):
        catalogue = registry.only_kind("catalogue", payload.get("catalogue"), "'catalogue'")
        target = _require(payload, "target", str, default=BLOOM_NODE)
        if payload.get("model") is not None:
            model = registry.queryable(_require(payload, "model", str))
        else:
            # default to the unique loaded model that carries the target node
            carriers = [
                e for e in registry.entries.values()
                if e.network is not None and target in e.network.node_names()
            ]
            if len(carriers) != 1:
                raise ValidationError(
                    f"'model' is required: {len(carriers)} loaded models have node {target!r}"
                )
            model = carriers[0]
        raw = payload.get("intervention", {})
        if not isinstance(raw, dict):
            raise ValidationError("field 'intervention' must be an object")
        spec = InterventionSpec(
            practice_overrides=_string_map(raw, "practice_overrides"),
            landuse_overrides=_string_map(raw, "landuse_overrides"),
            extra_evidence=Evidence(_string_map(raw, "extra_evidence")),
            label=str(raw.get("label", "")),
        )
        result = run_pipeline(catalogue.body, spec, model.network, target=target)
        return {
            "catalogue": catalogue.id,
            "model": model.id,
            "label": result.label,
            "load": dict(result.load.indices),
            "total_index": result.load.total_index(catalogue.body.shares),
            "evidence": dict(result.evidence.items()),
            "posterior": _posterior_payload(result.posterior),
            "baseline": _posterior_payload(result.baseline),
            "delta": dict(result.delta),
            "conflicts": [list(c) for c in result.conflicts],
        }

    @app.post("/probit/fit")
    def probit_fit(payload: dict):
        dataset_id = _require(payload, "dataset", str)
        if dataset_id not in registry.datasets:
            raise HTTPException(
                404,
                {"code": "dataset_not_found", "message": f"no dataset with id {dataset_id!r}"},
            )
        iterations = _require(payload, "iterations", int, default=10000)
        seed = _require(payload, "seed", int, default=0)
        prior_scale = _require(payload, "prior_scale", float, default=3.0)
        burn_in = _require(payload, "burn_in", int, default=max(1, iterations // 5))
        if iterations <= 0 or burn_in < 0 or burn_in >= iterations:
            raise ValidationError("need 0 <= burn_in < iterations")
        data = registry.datasets[dataset_id]

        def work():
            design = build_design(data, DEFAULT_COVARIATES)
            samples = rjmcmc_fit(
                design.X, design.y, prior_scale=prior_scale,
                iterations=iterations, burn_in=burn_in, seed=seed,
            )
            summary = bma_summary(samples)
            return {
                "dataset": dataset_id,
                "seed": seed,
                "iterations": iterations,
                "columns": list(design.columns),
                "models": [
                    {"gamma": "".join(map(str, gamma)), "probability": p, "se": se}
                    for gamma, p, se in summary.models[:10]
                ],
                "inclusion": {
                    name: {"probability": p, "se": se}
                    for name, (p, se) in zip(design.columns, summary.inclusion)
                },
                "n_samples": summary.n_samples,
            }

        return {"job_id": jobs.submit(work)}

    @app.get("/probit/jobs/{job_id}")
    def probit_job(job_id: str):
        job = jobs.snapshot(job_id)
        body = {"job_id": job.id, "status": job.status}
        if job.status == "done":
            body["result"] = job.result
        if job.status == "failed":
            body["error"] = job.error
        return body

    return app
