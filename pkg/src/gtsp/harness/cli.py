"""Command-line entry point ``gtsp``.

Exit codes: 0 success, 1 usage error, 2 instance error, 3 findings present.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..bounds.dual import build_dual_certificate, verify_dual_feasibility
from ..bounds.heldkarp import held_karp_exact
from ..bounds.lp import solve_ec_lp
from ..graph_core import Graph, GraphError, is_two_vertex_connected, parse_graph, serialize_graph
from ..tour import run_algorithm3
from ..vcss import run_algorithm1
from .experiment import ExperimentOptions, evaluate, expand_bench_spec, rational, run_experiment, summarize
from .generators import generate_random_2vc, generate_tight_example

EXIT_OK, EXIT_USAGE, EXIT_INSTANCE, EXIT_FINDINGS = 0, 1, 2, 3


def _load(path: str) -> Graph:
    try:
        return parse_graph(Path(path).read_text())
    except OSError as exc:
        raise click.FileError(path, str(exc)) from None


def _emit(obj) -> None:
    click.echo(json.dumps(obj, sort_keys=True, default=str))


@click.group()
def main() -> None:
    """Graphic TSP tours from 2-vertex-connected spanning subgraphs, with exact bounds."""


@main.command()
@click.argument("file")
@click.option("--walk", is_flag=True, help="Also print the closed walk.")
@click.option("--json", "as_json", is_flag=True, help="Print a JSON record instead of text.")
def solve(file: str, walk: bool, as_json: bool) -> None:
    """Run the full pipeline on one instance."""
    g = _load(file)
    if not is_two_vertex_connected(g.edges, g.n) or g.n < 3:
        rec = evaluate(g, ExperimentOptions(lp=False, dual=False, exact=False))
        out = {"cost": rec.alg_cost, "blocks": rec.blocks, "findings": [f.to_json() for f in rec.findings]}
        codes = rec.findings
        walk_list = None
    else:
        res = run_algorithm3(g)
        out = {
            "cost": res.tour.cost,
            "matching": res.tour.chosen_matching,
            "candidate_costs": list(res.candidate_costs),
            "lemma3_ratio": rational(res.tour.diagnostics["lemma3_ratio"]),
            "findings": [f.to_json() for f in res.findings],
        }
        codes = res.findings
        walk_list = res.walk
    if walk and walk_list is not None:
        out["walk"] = walk_list
    if as_json:
        _emit(out)
    else:
        click.echo(f"tour cost {out['cost']}")
        if "walk" in out:
            click.echo(" ".join(map(str, out["walk"])))
        for f in out["findings"]:
            click.echo(f"finding {f['code']}: {f['message']}")
    sys.exit(EXIT_FINDINGS if codes else EXIT_OK)


@main.command()
@click.argument("file")
def decompose(file: str) -> None:
    """Print the decomposition left by the improvement loop as JSON."""
    g = _load(file)
    d = run_algorithm1(g)
    _emit(d.to_json())
    sys.exit(EXIT_FINDINGS if d.findings else EXIT_OK)


@main.command()
@click.argument("file")
@click.option("--lp", "want_lp", is_flag=True, help="Cut LP value.")
@click.option("--dual", "want_dual", is_flag=True, help="Constructed dual and its feasibility.")
@click.option("--exact", "want_exact", is_flag=True, help="Optimal tour by dynamic programming.")
def bound(file: str, want_lp: bool, want_dual: bool, want_exact: bool) -> None:
    """Lower bounds and certificates (all of them when no flag is given)."""
    g = _load(file)
    if not (want_lp or want_dual or want_exact):
        want_lp = want_dual = want_exact = True
    out: dict = {}
    bad = False
    if want_lp:
        out["lp_value"] = rational(solve_ec_lp(g).objective)
    if want_dual:
        ds = build_dual_certificate(run_algorithm1(g))
        ok, violations = verify_dual_feasibility(ds, g)
        bad = not ok
        out.update(dual_value=rational(ds.value), dual_feasible=ok,
                   violations=[{"where": v.where, "item": str(v.item), "lhs": rational(v.lhs), "rhs": rational(v.rhs)}
                               for v in violations])
    if want_exact:
        cost, tour = held_karp_exact(g)
        out["exact"] = {"cost": cost, "tour": tour}
    _emit(out)
    sys.exit(EXIT_FINDINGS if bad else EXIT_OK)


@main.group()
def gen() -> None:
    """Write instance files to standard output."""


@gen.command()
@click.option("--k", type=int, required=True, help="Odd path length, at least 3.")
def tight(k: int) -> None:
    g = generate_tight_example(k)
    click.echo(serialize_graph(g, f"theta family, k={k}: pipeline {4 * k - 2}, optimum {3 * k - 1}"), nl=False)


@gen.command("random")
@click.option("--n", type=int, required=True)
@click.option("--p", type=float, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
def random_(n: int, p: float, seed: int) -> None:
    g = generate_random_2vc(n, p, seed)
    click.echo(serialize_graph(g, f"random 2-connected n={n} p={p} seed={seed}"), nl=False)


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write records here instead of stdout.")
@click.option("--quarantine", default="quarantine", show_default=True,
              help="Directory for instances that break a ratio claim.")
@click.option("--timings", is_flag=True, help="Add per-stage timings (makes output run-dependent).")
def bench(spec_path: str, jobs: int, out: str | None, quarantine: str, timings: bool) -> None:
    """Batch experiments from a JSON spec; one record per line, then a summary line."""
    doc = json.loads(Path(spec_path).read_text())
    specs = expand_bench_spec(doc, base=Path(spec_path).parent)
    opts = ExperimentOptions(
        lp=doc.get("lp", True), dual=doc.get("dual", True), exact=doc.get("exact", True),
        exact_cap=doc.get("exact_cap"), quarantine=quarantine, timings=timings,
    )
    sink = open(out, "w") if out else sys.stdout
    records = []
    try:
        for rec in run_experiment(specs, opts, jobs):
            records.append(rec)
            sink.write(rec.to_line() + "\n")
            sink.flush()
        sink.write(json.dumps({"summary": summarize(records)}, sort_keys=True) + "\n")
    finally:
        if out:
            sink.close()
    if any(r.error for r in records):
        sys.exit(EXIT_INSTANCE)
    sys.exit(EXIT_FINDINGS if any(r.findings for r in records) else EXIT_OK)


def run(argv: list[str] | None = None) -> int:
    """Invoke the CLI and return its exit code instead of exiting."""
    try:
        main.main(args=argv, standalone_mode=False)
    except click.exceptions.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.FileError as exc:
        exc.show()
        return EXIT_INSTANCE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except GraphError as exc:
        click.echo(f"instance error: {exc}", err=True)
        return EXIT_INSTANCE
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


def entry() -> None:
    sys.exit(run())
