"""Command line interface: gen, summarize, query, stats, bench, serve."""

from __future__ import annotations

import json
import sys

import click

from .errors import EmptyQueryResultError, SubsumError
from .optimize import Constraint
from .service import (
    BenchSpec,
    Engine,
    SummaryRequest,
    bench,
    bench_csv,
    database_stats,
    report_to_json,
)
from .synthetic import SyntheticSpec, generate_synthetic


def _constraint_from(k, budget_s, cover) -> Constraint:
    given = [v for v in (k, budget_s, cover) if v is not None]
    if len(given) != 1:
        raise click.UsageError("specify exactly one of --k / --budget-s / --cover")
    if k is not None:
        return Constraint.cardinality(k)
    if budget_s is not None:
        return Constraint.knapsack(budget_s)
    return Constraint.cover(cover)


def _summarize_options(fn):
    for opt in reversed([
        click.option("--db", "db_path", required=True, type=click.Path(exists=True)),
        click.option("--mode", default="keyframes",
                     type=click.Choice(["keyframes", "skim", "entities"])),
        click.option("--function", default="fl",
                     help="fl | fb[:sqrt|log|ratio] | sc | psc | dm"),
        click.option("--k", type=int, default=None, help="cardinality constraint"),
        click.option("--budget-s", type=float, default=None, help="knapsack budget, seconds"),
        click.option("--cover", type=float, default=None, help="cover fraction in (0,1]"),
        click.option("--snippets", default="fixed:2", help="fixed:<s> | shots | subtitles"),
        click.option("--entity-kind", default=None,
                     type=click.Choice(["object", "face", "human", "scene"])),
        click.option("--kernel", default=None, help="e.g. scene:0.4,object:0.4,hist:0.2"),
        click.option("--knn", type=int, default=None, help="sparsify kernel to k neighbors"),
        click.option("--window", default=None, help="time pre-filter t0:t1 (seconds)"),
        click.option("--no-lazy", is_flag=True, help="use plain greedy"),
        click.option("--no-timings", is_flag=True, help="deterministic output (drop timings)"),
        click.option("--out", "out_format", default="json", type=click.Choice(["json", "csv"])),
    ]):
        fn = opt(fn)
    return fn


def _run_summarize(db_path, mode, function, k, budget_s, cover, snippets, entity_kind,
                   kernel, knn, window, no_lazy, no_timings, out_format, query=None):
    engine = Engine()
    db_id = engine.register_path(db_path)
    time_window = None
    if window is not None:
        t0, t1 = window.split(":")
        time_window = (float(t0), float(t1))
    request = SummaryRequest(
        mode=mode,
        function=function,
        constraint=_constraint_from(k, budget_s, cover),
        query=query,
        snippets=snippets,
        entity_kind=entity_kind,
        kernel=kernel,
        knn=knn,
        time_window=time_window,
        lazy=not no_lazy,
        include_timings=not no_timings,
    )
    try:
        report = engine.summarize(db_id, request)
    except EmptyQueryResultError as exc:
        click.echo(json.dumps({"error": "no_relevant_content", "message": str(exc)}))
        sys.exit(3)
    except SubsumError as exc:
        raise click.ClickException(str(exc))
    if out_format == "csv":
        click.echo("step,item,gain")
        for step, (item, gain) in enumerate(zip(report["selected"], report["gains"])):
            click.echo(f"{step},{item},{gain}")
    else:
        click.echo(report_to_json(report))


@click.group()
def main():
    """Submodular summarization engine for precomputed visual-analysis databases."""


@main.command()
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--duration", type=float, default=60.0)
@click.option("--fps", type=float, default=1.0)
@click.option("--clusters", type=int, default=3)
@click.option("--dim", type=int, default=16)
@click.option("--hist-bins", type=int, default=64)
@click.option("--objects", type=int, default=0)
@click.option("--faces", type=int, default=0)
@click.option("--humans", type=int, default=0)
@click.option("--scenes", type=int, default=0)
@click.option("--shot-every", type=float, default=None)
@click.option("--subtitle-every", type=float, default=None)
@click.option("--seed", type=int, default=0)
def gen(out_path, duration, fps, clusters, dim, hist_bins, objects, faces, humans,
        scenes, shot_every, subtitle_every, seed):
    """Generate a synthetic analysis database."""
    from .analysisdb import save_database

    spec = SyntheticSpec(
        duration_s=duration, fps=fps, clusters=clusters, feature_dim=dim,
        hist_bins=hist_bins, objects=objects, faces=faces, humans=humans,
        scenes=scenes, shot_every_s=shot_every, subtitle_every_s=subtitle_every,
        seed=seed,
    )
    video = generate_synthetic(spec)
    save_database(video.db, out_path)
    click.echo(json.dumps({
        "path": out_path,
        "frames": video.db.n_frames,
        "entities": len(video.db.entities),
    }))


@main.command()
@_summarize_options
def summarize(**kwargs):
    """Run extractive summarization and print the run report."""
    _run_summarize(**kwargs)


@main.command()
@click.option("--query", "query", required=True,
              help="e.g. 'object:3>=0.6 & scene:1 | scene:2'")
@_summarize_options
def query(query, **kwargs):
    """Query-focused summarization (summarize restricted to matching items)."""
    _run_summarize(query=query, **kwargs)


@main.command()
@click.option("--db", "db_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_format", default="json", type=click.Choice(["json", "csv"]))
def stats(db_path, out_format):
    """Entity and label statistics for a database."""
    from .analysisdb import load_database

    report = database_stats(load_database(db_path))
    if out_format == "csv":
        click.echo("vocab,label,count")
        for vocab, counts in report["frame_labels"].items():
            for label, count in counts.items():
                click.echo(f"{vocab},{label},{count}")
    else:
        click.echo(json.dumps(report, sort_keys=True))


@main.command(name="bench")
@click.option("--n", type=int, default=7200)
@click.option("--dim", type=int, default=64)
@click.option("--sizes", default="1,2,5", help="summary sizes in percent")
@click.option("--functions", default="fl,fb:sqrt,sc,psc,dm")
@click.option("--knn", type=int, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_format", default="json", type=click.Choice(["json", "csv"]))
@click.option("--csv-path", type=click.Path(), default=None, help="also write the CSV here")
def bench_cmd(n, dim, sizes, functions, knn, seed, out_format, csv_path):
    """Timing table over a synthetic ground set (n frames at 1 fps)."""
    spec = BenchSpec(
        n=n, feature_dim=dim,
        sizes=tuple(float(s) / 100.0 for s in sizes.split(",")),
        functions=tuple(functions.split(",")),
        knn=knn, seed=seed,
    )
    report = bench(spec)
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write(bench_csv(report))
    click.echo(bench_csv(report) if out_format == "csv" else json.dumps(report, sort_keys=True))


@main.command()
@click.option("--bind", default="127.0.0.1:8000")
@click.option("--db", "db_paths", multiple=True, required=True, type=click.Path(exists=True))
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="serve a built frontend from this directory under /ui")
def serve(bind, db_paths, ui_dir):
    """Start the HTTP service with one or more registered databases."""
    import uvicorn

    from .http_api import create_app

    engine = Engine()
    for path in db_paths:
        db_id = engine.register_path(path)
        click.echo(f"registered {path} as {db_id}", err=True)
    host, _, port = bind.partition(":")
    uvicorn.run(create_app(engine, ui_dir=ui_dir), host=host, port=int(port or 8000))


if __name__ == "__main__":
    main()
