"""Command-line entry point.

One subcommand per workbench verb; every command reads documents through
:mod:`bloomlab.io`, so file validation is uniform. Exit codes: 0 success,
1 usage error, 2 validation error (malformed files, unknown nodes or
states, impossible requests), 3 computation failure on valid inputs.
"""

from __future__ import annotations

import json
import sys

import click

from .analysis import evaluate_scenario, sensitivity_ranking
from .compose import OobnModel, flatten
from .core import Evidence, Network, d_separated
from .dbn import DbnTemplate, unroll
from .errors import ComputationError, ValidationError
from .infer import posterior_one
from .io import document_for, parse_file, serialize, write_file
from .management import Catalogue, hazard_rating
from .pipeline import BLOOM_NODE, InterventionSpec, run_pipeline
from .probit import (
    DEFAULT_COVARIATES,
    bma_summary,
    build_design,
    load_dataset_csv,
    rjmcmc_fit,
)

PRACTICES = ("current", "planned", "best")


def _structured(ctx) -> bool:
    return bool(ctx.obj and ctx.obj.get("structured"))


def _emit(ctx, payload: dict, text: str):
    if _structured(ctx):
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(text)


def _evidence_from(pairs) -> Evidence:
    assignment = {}
    for item in pairs:
        node, sep, state = item.partition("=")
        if not sep or not node or not state:
            raise click.UsageError(f"evidence must look like Node=State, got {item!r}")
        assignment[node] = state
    return Evidence(assignment)


def _queryable(body, kind: str) -> Network:
    """Compile any model document into a flat network for inference."""
    if kind == "network":
        return body
    if kind == "oobn":
        return flatten(body)
    if kind == "dbn-template":
        return unroll(body, len(body.slice_labels))
    raise ValidationError(f"a {kind!r} document cannot be queried")


def _posterior_lines(dist, delta=None) -> list[str]:
    lines = []
    for state, p in dist.probabilities.items():
        extra = f"  (delta {delta[state]:+.6g})" if delta is not None else ""
        lines.append(f"{state}: {p:.6g}{extra}")
    return lines


@click.group()
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["text", "structured"]),
    default="text",
    help="Human-readable text or machine-readable JSON.",
)
@click.pass_context
def cli(ctx, output_format):
    """Bayesian-network workbench for bloom scenario analysis."""
    ctx.obj = {"structured": output_format == "structured"}


@cli.command()
@click.argument("path", type=click.Path())
@click.pass_context
def validate(ctx, path):
    """Parse a document and re-check every invariant."""
    doc = parse_file(path)
    body, kind = doc.body, doc.kind
    if kind == "network":
        detail = f"{len(body.node_names())} nodes"
    elif kind == "oobn":
        detail = f"{len(body.classes)} classes, {len(body.instances)} instances"
    elif kind == "dbn-template":
        detail = f"{len(body.slice_nodes)} slice nodes, {len(body.slice_labels)} slices"
    elif kind == "scenario-set":
        detail = f"{len(body.scenarios)} scenarios"
    elif kind == "catalogue":
        detail = f"{len(body.sources)} sources"
    elif kind == "dataset":
        detail = f"{len(body)} rows"
    else:
        detail = "intervention"
    _emit(ctx, {"ok": True, "kind": kind, "detail": detail}, f"ok: {kind} document ({detail})")


@cli.command()
@click.argument("model", type=click.Path())
@click.option("--target", required=True, help="Node to query.")
@click.option("--evidence", multiple=True, help="Repeated Node=State assignments.")
@click.pass_context
def query(ctx, model, target, evidence):
    """Posterior of a target node given hard evidence."""
    doc = parse_file(model)
    net = _queryable(doc.body, doc.kind)
    ev = _evidence_from(evidence)
    dist = posterior_one(net, target, ev)
    payload = {
        "target": target,
        "evidence": dict(ev.items()),
        "posterior": dict(dist.probabilities),
    }
    _emit(ctx, payload, "\n".join(_posterior_lines(dist)))


@cli.command()
@click.argument("model", type=click.Path())
@click.option("--x", "xs", multiple=True, required=True, help="First node set.")
@click.option("--y", "ys", multiple=True, required=True, help="Second node set.")
@click.option("--z", "zs", multiple=True, help="Conditioning set.")
@click.pass_context
def dsep(ctx, model, xs, ys, zs):
    """Check d-separation of two node sets given a third."""
    doc = parse_file(model)
    net = _queryable(doc.body, doc.kind)
    separated = d_separated(net, xs, ys, zs)
    _emit(
        ctx,
        {"x": list(xs), "y": list(ys), "z": list(zs), "d_separated": separated},
        "true" if separated else "false",
    )


def _write_or_print(net: Network, output):
    if output is None:
        click.echo(serialize(document_for(net)), nl=False)
    else:
        write_file(output, net)
        click.echo(f"wrote {output}")


@cli.command("flatten")
@click.argument("oobn", type=click.Path())
@click.option("--output", type=click.Path(), default=None, help="Write instead of printing.")
def flatten_cmd(oobn, output):
    """Flatten an object-oriented model to a plain network document."""
    doc = parse_file(oobn)
    if not isinstance(doc.body, OobnModel):
        raise ValidationError(f"expected an oobn document, got {doc.kind!r}")
    _write_or_print(flatten(doc.body), output)


@cli.command("unroll")
@click.argument("template", type=click.Path())
@click.option("--slices", type=int, required=True, help="Number of time slices.")
@click.option("--output", type=click.Path(), default=None, help="Write instead of printing.")
def unroll_cmd(template, slices, output):
    """Unroll a dynamic template into a plain network document."""
    doc = parse_file(template)
    if not isinstance(doc.body, DbnTemplate):
        raise ValidationError(f"expected a dbn-template document, got {doc.kind!r}")
    _write_or_print(unroll(doc.body, slices), output)


@cli.command()
@click.argument("model", type=click.Path())
@click.option("--target", required=True, help="Node to rank influences on.")
@click.pass_context
def sensitivity(ctx, model, target):
    """Rank every other node by mutual information with the target."""
    doc = parse_file(model)
    net = _queryable(doc.body, doc.kind)
    report = sensitivity_ranking(net, target)
    payload = {"target": target, "entries": [[name, mi] for name, mi in report.entries]}
    _emit(ctx, payload, report.as_text())


@cli.command()
@click.argument("model", type=click.Path())
@click.argument("scenario_file", type=click.Path())
@click.option("--name", required=True, help="Scenario to evaluate.")
@click.option("--target", default=BLOOM_NODE, show_default=True)
@click.pass_context
def scenario(ctx, model, scenario_file, name, target):
    """Evaluate a named scenario against its baseline."""
    doc = parse_file(model)
    net = _queryable(doc.body, doc.kind)
    sdoc = parse_file(scenario_file)
    if sdoc.kind != "scenario-set":
        raise ValidationError(f"expected a scenario-set document, got {sdoc.kind!r}")
    sset = sdoc.body
    result = evaluate_scenario(net, sset.get(name), target, sset.scenarios)
    payload = {
        "scenario": result.scenario,
        "target": result.target,
        "posterior": dict(result.posterior.probabilities),
        "baseline": dict(result.baseline.probabilities),
        "delta": dict(result.delta),
    }
    text = [f"scenario: {result.scenario}", f"target: {result.target}"]
    text += _posterior_lines(result.posterior, result.delta)
    _emit(ctx, payload, "\n".join(text))


@cli.command()
@click.argument("catalogue", type=click.Path())
@click.option(
    "--practice",
    type=click.Choice(PRACTICES),
    default="current",
    show_default=True,
    help="Practice level to rate.",
)
@click.pass_context
def hazard(ctx, catalogue, practice):
    """Hazard rating for every source and nutrient at one practice level."""
    doc = parse_file(catalogue)
    if not isinstance(doc.body, Catalogue):
        raise ValidationError(f"expected a catalogue document, got {doc.kind!r}")
    records = []
    for source in doc.body.sources:
        for nutrient in source.nutrients:
            rating = hazard_rating(source, practice, nutrient)
            records.append(
                {
                    "source": source.id,
                    "nutrient": nutrient,
                    "score": rating.score,
                    "band": rating.value,
                }
            )
    width = max(len(r["source"]) for r in records)
    lines = [f"practice: {practice}"]
    lines += [
        f"{r['source']:<{width}}  {r['nutrient']:<10}  {r['score']:>3}  {r['band']}"
        for r in records
    ]
    _emit(ctx, {"practice": practice, "ratings": records}, "\n".join(lines))


@cli.command("pipeline")
@click.argument("catalogue", type=click.Path())
@click.argument("model", type=click.Path())
@click.option("--intervention", type=click.Path(), default=None, help="Intervention document.")
@click.option("--target", default=BLOOM_NODE, show_default=True)
@click.pass_context
def pipeline_cmd(ctx, catalogue, model, intervention, target):
    """Run catchment loads through the science model."""
    cdoc = parse_file(catalogue)
    if not isinstance(cdoc.body, Catalogue):
        raise ValidationError(f"expected a catalogue document, got {cdoc.kind!r}")
    mdoc = parse_file(model)
    net = _queryable(mdoc.body, mdoc.kind)
    spec = InterventionSpec()
    if intervention is not None:
        idoc = parse_file(intervention)
        if not isinstance(idoc.body, InterventionSpec):
            raise ValidationError(f"expected an intervention document, got {idoc.kind!r}")
        spec = idoc.body
    result = run_pipeline(cdoc.body, spec, net, target=target)
    payload = {
        "label": result.label,
        "load": dict(result.load.indices),
        "evidence": dict(result.evidence.items()),
        "posterior": dict(result.posterior.probabilities),
        "baseline": dict(result.baseline.probabilities),
        "delta": dict(result.delta),
        "conflicts": [list(c) for c in result.conflicts],
    }
    lines = [f"intervention: {result.label or '(baseline)'}", "load indices:"]
    lines += [f"  {n}: {v:.6g}" for n, v in result.load.indices.items()]
    lines.append("evidence:")
    lines += [f"  {node} = {state}" for node, state in sorted(result.evidence.items())]
    lines.append(f"posterior of {target}:")
    lines += ["  " + line for line in _posterior_lines(result.posterior, result.delta)]
    _emit(ctx, payload, "\n".join(lines))


@cli.command("probit-fit")
@click.argument("dataset", type=click.Path())
@click.option("--iterations", type=int, default=10000, show_default=True)
@click.option("--burn-in", type=int, default=None, help="Defaults to iterations // 5.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--prior-scale", type=float, default=3.0, show_default=True)
@click.pass_context
def probit_fit(ctx, dataset, iterations, burn_in, seed, prior_scale):
    """Reversible-jump probit fit on a monthly bloom dataset."""
    if str(dataset).endswith(".csv"):
        data = load_dataset_csv(dataset)
    else:
        doc = parse_file(dataset)
        if doc.kind != "dataset":
            raise ValidationError(f"expected a dataset document, got {doc.kind!r}")
        data = doc.body
    design = build_design(data, DEFAULT_COVARIATES)
    if burn_in is None:
        burn_in = iterations // 5
    samples = rjmcmc_fit(
        design.X, design.y, prior_scale=prior_scale, iterations=iterations,
        burn_in=burn_in, seed=seed,
    )
    summary = bma_summary(samples)
    payload = {
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
        "seed": seed,
    }
    _emit(ctx, payload, summary.as_text(design.columns))


@cli.command()
@click.option("--port", type=int, default=8000, envvar="BLOOMLAB_PORT", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--model-dir",
    type=click.Path(),
    default=None,
    help="Directory of model documents; defaults to the bundled demo set.",
)
def serve(port, host, model_dir):
    """Serve the HTTP API over a model directory."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(model_dir), host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except FileNotFoundError as exc:
        click.echo(f"error: no such file: {exc.filename}", err=True)
        return 2
    except OSError as exc:
        name = getattr(exc, "filename", None)
        click.echo(f"error: cannot read {name}: {exc.strerror or exc}", err=True)
        return 2
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except ComputationError as exc:
        click.echo(f"computation failed: {exc}", err=True)
        return 3
    except Exception as exc:  # anything else is a bug surfacing at runtime
        click.echo(f"unexpected error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
