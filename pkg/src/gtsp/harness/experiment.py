"""Batch experiments: run the pipeline and every bound on each instance, one JSON record per line.

Graphs that are connected but not 2-connected are split into blocks. Each
block with three or more vertices gets its own pipeline run and bounds;
a bridge block contributes exactly 2 to every quantity, since any closed
walk crosses a bridge twice. The tours are spliced at cut vertices.
"""

from __future__ import annotations

import json
import multiprocessing
import random
import time
from collections.abc import Iterable, Iterator
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .. import findings as fc
from ..bounds.dual import build_dual_certificate, repair_dual, verify_dual_feasibility, weak_duality_check
from ..bounds.heldkarp import held_karp_exact, oracle_cap
from ..bounds.lp import solve_ec_lp
from ..findings import Finding
from ..graph_core import (
    EdgeInstance,
    EdgeMultiset,
    Graph,
    GraphError,
    biconnected_blocks,
    expand_to_walk,
    is_eulerian,
    is_valid_closed_walk,
    parse_graph,
    serialize_graph,
)
from ..tour import run_algorithm3
from .generators import generate_random_2vc, generate_tight_example

FOUR_THIRDS = Fraction(4, 3)


def rational(q: Fraction | int | None) -> str | None:
    if q is None:
        return None
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # "tight", "random" or "file"
    k: int | None = None
    n: int | None = None
    p: float | None = None
    seed: int = 0
    path: str | None = None

    def __post_init__(self):
        if self.kind == "tight":
            if self.k is None or self.k < 3 or self.k % 2 == 0:
                raise GraphError(f"tight instances need an odd k >= 3, got {self.k}")
        elif self.kind == "random":
            if self.n is None or self.p is None:
                raise GraphError("random instances need n and p")
        elif self.kind == "file":
            if not self.path:
                raise GraphError("file instances need a path")
        else:
            raise GraphError(f"unknown instance kind {self.kind!r}")
        if not 0 <= self.seed < 2**64:
            raise GraphError("seed must fit in 64 bits")

    @property
    def instance_id(self) -> str:
        if self.kind == "tight":
            return f"tight-k{self.k}"
        if self.kind == "random":
            return f"random-n{self.n}-p{self.p}-s{self.seed}"
        return f"file-{Path(self.path).name}"

    def params(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def build(self) -> Graph:
        if self.kind == "tight":
            return generate_tight_example(self.k)
        if self.kind == "random":
            return generate_random_2vc(self.n, self.p, self.seed)
        return parse_graph(Path(self.path).read_text())


def expand_bench_spec(doc: dict[str, Any], base: Path | None = None) -> list[GeneratorSpec]:
    """Instance list of a bench spec document.

    Entries are ``{"kind": "tight", "k": 5}``, ``{"kind": "random", "n": 8,
    "p": 0.5, "seed": 1}``, ``{"kind": "file", "path": "x.txt"}`` or a
    ``random_sweep`` with ``count``, ``n_min``, ``n_max``, ``p_min``,
    ``p_max`` and ``seed`` that expands into random entries.
    """
    out: list[GeneratorSpec] = []
    for item in doc.get("instances", []):
        item = dict(item)
        kind = item.pop("kind")
        if kind == "random_sweep":
            rng = random.Random(item.get("seed", 0))
            for _ in range(item["count"]):
                n = rng.randint(item.get("n_min", 4), item.get("n_max", 12))
                p = round(rng.uniform(item.get("p_min", 0.3), item.get("p_max", 0.8)), 3)
                out.append(GeneratorSpec("random", n=n, p=p, seed=rng.getrandbits(64)))
        elif kind == "file" and base is not None:
            out.append(GeneratorSpec("file", path=str(base / item["path"]), seed=item.get("seed", 0)))
        else:
            out.append(GeneratorSpec(kind, **item))
    return out


@dataclass(frozen=True)
class ExperimentOptions:
    lp: bool = True
    dual: bool = True
    exact: bool = True
    exact_cap: int | None = None
    quarantine: str | None = None
    timings: bool = False


@dataclass
class ExperimentRecord:
    instance: str
    params: dict[str, Any]
    n: int | None = None
    m: int | None = None
    blocks: int | None = None
    alg_cost: int | None = None
    lp_value: Fraction | None = None
    dual_value: Fraction | None = None
    dual_feasible: bool | None = None
    exact_opt: int | None = None
    ratio_vs_opt: Fraction | None = None
    ratio_vs_dual: Fraction | None = None
    lemma3_ratio: Fraction | None = None
    findings: list[Finding] = field(default_factory=list)
    error: str | None = None
    timings: dict[str, float] | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "instance": self.instance,
            "params": self.params,
            "n": self.n,
            "m": self.m,
            "blocks": self.blocks,
            "alg_cost": self.alg_cost,
            "lp_value": rational(self.lp_value),
            "dual_value": rational(self.dual_value),
            "dual_feasible": self.dual_feasible,
            "exact_opt": self.exact_opt,
            "ratio_vs_opt": rational(self.ratio_vs_opt),
            "ratio_vs_dual": rational(self.ratio_vs_dual),
            "lemma3_ratio": rational(self.lemma3_ratio),
            "findings": [f.to_json() for f in self.findings],
        }
        if self.error is not None:
            out["error"] = self.error
        if self.timings is not None:
            out["timings"] = self.timings
        return out

    def to_line(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, default=str)


def _lift(e: EdgeInstance, old: list[int]) -> EdgeInstance:
    if e.via is None:
        return EdgeInstance.original(old[e.u], old[e.v])
    return EdgeInstance.shortcut(old[e.u], old[e.v], old[e.via])


@dataclass
class _Totals:
    cost: int = 0
    lp: Fraction | None = Fraction(0)
    dual: Fraction | None = Fraction(0)
    feasible: bool | None = True
    opt: int | None = 0
    f1: Fraction | None = None


def evaluate(g: Graph, opts: ExperimentOptions = ExperimentOptions()) -> ExperimentRecord:
    """Pipeline, bounds and audits for one graph (the record's id fields are left blank)."""
    rec = ExperimentRecord("", {}, n=g.n, m=g.m)
    clock: dict[str, float] = {}

    def timed(stage: str, fn, *args):
        t0 = time.perf_counter()
        try:
            return fn(*args)
        finally:
            clock[stage] = clock.get(stage, 0.0) + time.perf_counter() - t0

    blocks = biconnected_blocks(g)
    rec.blocks = len(blocks)
    tot = _Totals()
    if not opts.lp:
        tot.lp = None
    if not opts.dual:
        tot.dual = tot.feasible = None
    cap = oracle_cap() if opts.exact_cap is None else opts.exact_cap
    if not opts.exact or any(len(b) > cap for b in blocks):
        tot.opt = None
    tour: dict[EdgeInstance, int] = {}
    found: list[Finding] = []
    for verts in blocks:
        if len(verts) == 1:
            continue
        if len(verts) == 2:
            tour[EdgeInstance.original(*verts)] = 2
            tot.cost += 2
            for name in ("lp", "dual", "opt"):
                if getattr(tot, name) is not None:
                    setattr(tot, name, getattr(tot, name) + 2)
            continue
        sub, old = g.induced(verts)
        res = timed("pipeline", run_algorithm3, sub)
        for f in res.findings:
            found.append(Finding(f.code, f.message, {**f.data, "block": list(verts)} if len(blocks) > 1 else f.data))
        for e, c in res.tour.edges.items():
            tour[_lift(e, old)] = c
        tot.cost += res.tour.cost
        r3 = res.tour.diagnostics["lemma3_ratio"]
        if r3 is not None and (tot.f1 is None or r3 > tot.f1):
            tot.f1 = r3
        lp = timed("lp", solve_ec_lp, sub) if opts.lp else None
        if lp is not None:
            tot.lp += lp.objective
        if opts.dual:
            ds = timed("dual", build_dual_certificate, res.decomposition)
            found.extend(ds.findings)
            ok, violations = verify_dual_feasibility(ds, sub)
            if not ok:
                tot.feasible = False
                found.append(Finding(fc.DUAL_INFEASIBLE, f"{len(violations)} dual constraints violated",
                                     {"violations": [str(v.item) for v in violations]}))
                ds = repair_dual(ds, violations)
            if lp is not None and not weak_duality_check(lp, ds):
                raise AssertionError(f"dual value {ds.value} exceeds LP value {lp.objective}")
            tot.dual += ds.value
        if tot.opt is not None:
            tot.opt += timed("exact", held_karp_exact, sub, cap)[0]
    multiset = EdgeMultiset(tour)
    walk = expand_to_walk(multiset, g) if multiset else [0]
    if not (is_eulerian(multiset, g.n) or g.n == 1) or not is_valid_closed_walk(walk, g) or len(walk) - 1 != tot.cost:
        found.append(Finding(fc.INVALID_TOUR, "spliced tour is not a valid closed spanning walk"))
    rec.alg_cost = tot.cost
    rec.lp_value, rec.dual_value, rec.dual_feasible, rec.exact_opt = tot.lp, tot.dual, tot.feasible, tot.opt
    rec.lemma3_ratio = tot.f1
    if tot.opt:
        rec.ratio_vs_opt = Fraction(tot.cost, tot.opt)
        if rec.ratio_vs_opt > FOUR_THIRDS:
            found.append(Finding(fc.RATIO, f"tour {tot.cost} > 4/3 of optimum {tot.opt}"))
    if tot.dual:
        rec.ratio_vs_dual = Fraction(tot.cost) / tot.dual
        if rec.ratio_vs_dual > FOUR_THIRDS:
            found.append(Finding(fc.DUAL_RATIO, f"tour {tot.cost} > 4/3 of dual value {tot.dual}"))
    _check_chain(rec)
    rec.findings = found
    if opts.timings:
        rec.timings = {k: round(v, 6) for k, v in sorted(clock.items())}
    return rec


def _check_chain(rec: ExperimentRecord) -> None:
    """dual <= lp <= opt <= alg wherever the values exist; a break is a bug."""
    chain = [v for v in (rec.dual_value, rec.lp_value, rec.exact_opt, rec.alg_cost) if v is not None]
    if any(a > b for a, b in zip(chain, chain[1:])):
        raise AssertionError(f"bound chain broken: {chain}")


QUARANTINED = {fc.RATIO, fc.DUAL_RATIO}


def run_one(spec: GeneratorSpec, opts: ExperimentOptions = ExperimentOptions()) -> ExperimentRecord:
    """Evaluate one instance; errors are recorded, never raised."""
    try:
        g = spec.build()
    except (GraphError, OSError) as exc:
        return ExperimentRecord(spec.instance_id, spec.params(), error=f"{type(exc).__name__}: {exc}")
    try:
        rec = evaluate(g, opts)
    except Exception as exc:  # noqa: BLE001 - a batch must survive any single instance
        return ExperimentRecord(spec.instance_id, spec.params(), n=g.n, m=g.m,
                                error=f"{type(exc).__name__}: {exc}")
    rec.instance, rec.params = spec.instance_id, spec.params()
    if opts.quarantine and any(f.code in QUARANTINED for f in rec.findings):
        qdir = Path(opts.quarantine)
        qdir.mkdir(parents=True, exist_ok=True)
        codes = sorted({f.code for f in rec.findings})
        (qdir / f"{spec.instance_id}.txt").write_text(serialize_graph(g, f"{spec.instance_id}: {', '.join(codes)}"))
    return rec


def _work(args: tuple[GeneratorSpec, ExperimentOptions]) -> ExperimentRecord:
    return run_one(*args)


def run_experiment(specs: Iterable[GeneratorSpec], opts: ExperimentOptions = ExperimentOptions(),
                   jobs: int = 1) -> Iterator[ExperimentRecord]:
    """Records in input order; with ``jobs > 1`` instances run in a process pool."""
    work = [(s, opts) for s in specs]
    if jobs <= 1:
        yield from map(_work, work)
        return
    with multiprocessing.Pool(jobs) as pool:
        yield from pool.imap(_work, work)


def summarize(records: Iterable[ExperimentRecord]) -> dict[str, Any]:
    recs = list(records)
    codes: dict[str, int] = {}
    for r in recs:
        for f in r.findings:
            codes[f.code] = codes.get(f.code, 0) + 1
    opt_ratios = [r.ratio_vs_opt for r in recs if r.ratio_vs_opt is not None]
    dual_ratios = [r.ratio_vs_dual for r in recs if r.ratio_vs_dual is not None]
    return {
        "instances": len(recs),
        "errors": sum(r.error is not None for r in recs),
        "with_findings": sum(bool(r.findings) for r in recs),
        "findings": dict(sorted(codes.items())),
        "max_ratio_vs_opt": rational(max(opt_ratios)) if opt_ratios else None,
        "max_ratio_vs_dual": rational(max(dual_ratios)) if dual_ratios else None,
    }
