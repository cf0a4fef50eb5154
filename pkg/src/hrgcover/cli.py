"""Command line driver: generate, solve, evaluate, diagnose, calibrate."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from hrgcover import cover as vc
from hrgcover.diagnostics import bounds_report
from hrgcover.generator import (
    RNG_NAME,
    EdgeBuilder,
    GeneratorConfig,
    SamplingMode,
    average_degree,
    calibrate_C,
    generate,
)
from hrgcover.geometry import ModelParams
from hrgcover.graph import (
    Graph,
    is_vertex_cover,
    load_edge_list,
    read_coordinates,
    with_coordinates,
    write_coordinates,
    write_edge_list,
)

log = logging.getLogger("hrgcover")

CSV_COLUMNS = [
    "graph",
    "n",
    "m",
    "algorithm",
    "seed",
    "cover_size",
    "opt_status",
    "lower_bound",
    "ratio",
    "ratio_is_bound",
    "relative_error",
    "greedy_count",
    "exact_cover_count",
    "time_ms",
]
ALGORITHMS = ("standard", "adapted-degree", "adapted-radius", "exact")
NEEDS_COORDS = {"adapted-radius"}


class StartupError(Exception):
    """Invalid experiment configuration, detected before any job runs."""


@dataclass
class GraphSource:
    """Where a graph comes from: files on disk or a generator config."""

    name: str
    seed: int | str = ""
    edges: str | None = None
    coords: str | None = None
    config: GeneratorConfig | None = None

    def load(self) -> tuple[Graph, ModelParams | None, str]:
        if self.config is not None:
            return generate(self.config), self.config.params, self.config.mode.value
        with open(self.edges, "rb") as fh:
            if self.coords is None:
                g, _ = load_edge_list(fh)
                return g, None, ""
            with open(self.coords) as ch:
                radii, angles, meta = read_coordinates(ch)
            g, _ = load_edge_list(fh, vertex_count=len(radii))
        g = with_coordinates(g, radii, angles)
        params = None
        if {"n", "alpha", "C"} <= meta.keys():
            params = ModelParams(int(meta["n"]), float(meta["alpha"]), float(meta["C"]))
        return g, params, meta.get("mode", "")


@dataclass
class ExperimentSpec:
    command: str
    sources: list[GraphSource]
    algorithms: list[str] = field(default_factory=list)
    tau: float = 1.0
    component_limit: int | None = None
    limit_rule: str = "floor"
    time_limit: float = 60.0
    output: str | None = None
    jobs: int = 1

    def __post_init__(self) -> None:
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise StartupError(f"unknown algorithm(s): {', '.join(unknown)}")
        if NEEDS_COORDS & set(self.algorithms):
            missing = [s.name for s in self.sources if s.config is None and s.coords is None]
            if missing:
                raise StartupError(
                    "adapted-radius needs vertex coordinates; pass --coords for " + ", ".join(missing)
                )
        if self.component_limit is not None and self.component_limit < 1:
            raise StartupError("--component-limit must be at least 1")
        if self.tau <= 0:
            raise StartupError("--tau must be positive")

    def limit_for(self, n: int) -> int:
        if self.component_limit is not None:
            return self.component_limit
        if self.limit_rule == "ceil":
            return vc.protocol_component_limit(n, self.tau)
        return vc.component_limit_for(n, self.tau)

    def config_hash(self) -> str:
        payload = {
            "command": self.command,
            "algorithms": self.algorithms,
            "tau": self.tau,
            "component_limit": self.component_limit,
            "limit_rule": self.limit_rule,
            "time_limit": self.time_limit,
            "sources": [
                {
                    "name": s.name,
                    "seed": s.seed,
                    "edges": s.edges,
                    "coords": s.coords,
                    "config": None
                    if s.config is None
                    else {
                        "n": s.config.params.n,
                        "alpha": s.config.params.alpha,
                        "C": s.config.params.C,
                        "mode": s.config.mode.value,
                        "edge_builder": s.config.edge_builder.value,
                        "seed": s.config.seed,
                    },
                }
                for s in self.sources
            ],
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


# -- jobs ----------------------------------------------------------------------


def _fmt(x: float | None, digits: int = 6) -> str:
    if x is None:
        return ""
    if math.isinf(x):
        return "inf"
    return f"{x:.{digits}g}"


def relative_error(adapted: int, standard: int, opt: vc.ExactResult) -> float | None:
    """(adapted - opt) / (standard - opt); ``None`` without an exact optimum or when standard is optimal."""
    if not opt.optimal or standard <= opt.upper_bound:
        return None
    return (adapted - opt.upper_bound) / (standard - opt.upper_bound)


def run_graph(spec: ExperimentSpec, source: GraphSource, with_exact: bool) -> list[dict[str, str]]:
    """All selected algorithms on one graph, as CSV rows."""
    try:
        g, _, _ = source.load()
    except Exception as exc:  # noqa: BLE001 - recorded per row
        log.error("%s: %s", source.name, exc)
        return [_error_row(source, alg, exc) for alg in spec.algorithms]

    results: dict[str, vc.CoverResult] = {}
    errors: dict[str, Exception] = {}
    for alg in spec.algorithms:
        if alg == "exact":
            continue
        try:
            if alg == "standard":
                res = vc.standard_greedy(g)
            elif alg == "adapted-degree":
                res = vc.adapted_greedy_degree(g, spec.limit_for(g.vertex_count))
            else:
                res = vc.adapted_greedy_radius(g, spec.tau, spec.component_limit)
            if not is_vertex_cover(g, res.cover):
                raise AssertionError(f"{alg} returned an invalid cover")
            results[alg] = res
        except Exception as exc:  # noqa: BLE001
            log.error("%s/%s: %s", source.name, alg, exc)
            errors[alg] = exc

    opt = None
    if with_exact or "exact" in spec.algorithms:
        hint = min((r.cover for r in results.values()), key=len, default=None)
        try:
            opt = vc.exact_cover(g, spec.time_limit, upper_hint=hint)
            if opt.optimal and not is_vertex_cover(g, opt.cover):
                raise AssertionError("exact solver returned an invalid cover")
        except Exception as exc:  # noqa: BLE001
            log.error("%s/exact: %s", source.name, exc)
            errors["exact"] = exc

    standard = results.get("standard")
    if standard is None and opt is not None and any(a.startswith("adapted") for a in results):
        standard = vc.standard_greedy(g)

    rows = []
    for alg in spec.algorithms:
        if alg in errors:
            rows.append(_error_row(source, alg, errors[alg], g))
            continue
        row = _base_row(source, alg, g)
        if alg == "exact":
            if opt is None:
                continue
            row.update(
                cover_size=str(opt.upper_bound),
                greedy_count="",
                exact_cover_count=str(opt.upper_bound) if opt.optimal else "",
                time_ms=_fmt(opt.elapsed * 1000.0),
            )
            if opt.optimal:
                row.update(ratio="1", ratio_is_bound="false")
            else:
                ratio, _ = vc.approximation_ratio(opt.upper_bound, opt)
                row.update(ratio=_fmt(ratio), ratio_is_bound="true")
        else:
            res = results[alg]
            row.update(
                cover_size=str(res.size),
                greedy_count=str(res.greedy_count),
                exact_cover_count=str(res.exact_region_cover_count),
                time_ms=_fmt(res.elapsed * 1000.0),
            )
            if opt is not None:
                ratio, is_bound = vc.approximation_ratio(res.size, opt)
                if not is_bound and ratio < 1.0:
                    raise AssertionError(f"{alg} beat the optimum on {source.name}; solver inconsistency")
                row.update(ratio=_fmt(ratio), ratio_is_bound=str(is_bound).lower())
                if alg.startswith("adapted") and standard is not None:
                    row["relative_error"] = _fmt(relative_error(res.size, standard.size, opt))
        if opt is not None:
            row.update(opt_status=opt.status.value, lower_bound=str(opt.lower_bound))
        rows.append(row)
    return rows


def _base_row(source: GraphSource, alg: str, g: Graph | None) -> dict[str, str]:
    row = dict.fromkeys(CSV_COLUMNS, "")
    row.update(graph=source.name, algorithm=alg, seed=str(source.seed))
    if g is not None:
        row.update(n=str(g.vertex_count), m=str(g.edge_count))
    return row


def _error_row(source: GraphSource, alg: str, exc: Exception, g: Graph | None = None) -> dict[str, str]:
    row = _base_row(source, alg, g)
    row["opt_status"] = "error"
    return row | {"_error": f"{type(exc).__name__}: {exc}"}


def _run_jobs(spec: ExperimentSpec, with_exact: bool) -> list[dict[str, str]]:
    if spec.jobs > 1 and len(spec.sources) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            chunks = list(pool.map(run_graph, [spec] * len(spec.sources), spec.sources, [with_exact] * len(spec.sources)))
    else:
        chunks = [run_graph(spec, s, with_exact) for s in spec.sources]
    rows = [r for chunk in chunks for r in chunk]
    order = {a: i for i, a in enumerate(ALGORITHMS)}
    rows.sort(key=lambda r: (r["graph"], order[r["algorithm"]], _seed_key(r["seed"])))
    return rows


def _seed_key(seed: str) -> tuple[int, str]:
    return (int(seed), "") if seed.isdigit() else (-1, seed)


def _write_rows(rows: list[dict[str, object]], columns: list[str], output: str | None) -> None:
    clean = [{k: r.get(k, "") for k in columns} for r in rows]
    if output is None:
        writer = csv.DictWriter(sys.stdout, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(clean)
        return
    with open(output, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(clean)


def _write_meta(spec: ExperimentSpec, rows: list[dict[str, object]], argv: list[str]) -> None:
    if spec.output is None:
        return
    meta = {
        "config_hash": spec.config_hash(),
        "rng": RNG_NAME,
        "argv": argv,
        "errors": [
            {"graph": r["graph"], "algorithm": r.get("algorithm", ""), "seed": r["seed"], "error": r["_error"]}
            for r in rows
            if "_error" in r
        ],
    }
    Path(spec.output + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


# -- argument handling -----------------------------------------------------------


def parse_seeds(text: str) -> list[int]:
    """``"3"``, ``"0,2,5"`` or ``"0-19"`` (inclusive ranges, combinable)."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            seeds.extend(range(int(a), int(b) + 1))
        else:
            seeds.append(int(part))
    return seeds


def _resolve_C(args: argparse.Namespace, n: int) -> float:
    if args.avg_degree is not None:
        C = calibrate_C(args.avg_degree, n, args.alpha, args.calibration_seeds)
        log.info("calibrated C=%.6g for average degree %s at n=%d", C, args.avg_degree, n)
        return C
    return args.c


def _sources(args: argparse.Namespace) -> list[GraphSource]:
    if args.input:
        coords = args.coords or []
        if coords and len(coords) != len(args.input):
            raise StartupError("--coords must be given once per --input")
        return [
            GraphSource(name=Path(p).name, edges=p, coords=coords[i] if coords else None)
            for i, p in enumerate(args.input)
        ]
    if args.n is None:
        raise StartupError("either --input or --n is required")
    out = []
    for n in args.n:
        C = _resolve_C(args, n)
        params = ModelParams(n, args.alpha, C)
        for seed in parse_seeds(args.seeds):
            cfg = GeneratorConfig(params, seed, SamplingMode(args.mode), EdgeBuilder(args.edge_builder))
            out.append(GraphSource(name=f"hrg-n{n}-a{args.alpha:g}-C{C:.6g}", seed=seed, config=cfg))
    return out


def _add_model_args(p: argparse.ArgumentParser, multi_n: bool = True) -> None:
    p.add_argument("--n", type=int, nargs="+" if multi_n else None, help="vertex count (generated graphs)")
    p.add_argument("--alpha", type=float, default=0.75)
    deg = p.add_mutually_exclusive_group()
    deg.add_argument("--c", type=float, default=0.0, help="disk radius offset C")
    deg.add_argument("--avg-degree", type=float, help="calibrate C to this average degree")
    p.add_argument("--calibration-seeds", type=int, default=3)
    p.add_argument("--mode", choices=[m.value for m in SamplingMode], default="fixed")
    p.add_argument("--edge-builder", choices=[e.value for e in EdgeBuilder], default="accelerated")


def _add_solver_args(p: argparse.ArgumentParser, default_algs: str, tau: float, rule: str) -> None:
    p.add_argument("--input", nargs="+", help="edge-list file(s)")
    p.add_argument("--coords", nargs="+", help="coordinate sidecar per input")
    p.add_argument("--seeds", default="0", help="seed list for generated graphs, e.g. 0-19")
    p.add_argument("--algorithms", default=default_algs, help=f"comma list from {', '.join(ALGORITHMS)}")
    p.add_argument("--tau", type=float, default=tau)
    p.add_argument("--component-limit", type=int, help="explicit cap on exactly solved component size")
    p.add_argument(
        "--limit-rule",
        choices=["floor", "ceil"],
        default=rule,
        help="cap from tau: floor(tau lnln n) or tau*ceil(lnln n) (the experimental protocol)",
    )
    p.add_argument("--time-limit", type=float, default=60.0, help="exact solver limit in seconds")
    p.add_argument("--output", help="CSV path (stdout if omitted)")
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hrgcover", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a hyperbolic random graph")
    _add_model_args(p, multi_n=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="path prefix; writes PREFIX.edges and PREFIX.coords")

    p = sub.add_parser("solve", help="run cover algorithms")
    _add_model_args(p)
    _add_solver_args(p, "standard,adapted-degree", tau=1.0, rule="floor")

    p = sub.add_parser("evaluate", help="approximation ratios against exact optima")
    _add_model_args(p)
    _add_solver_args(p, "standard,adapted-degree", tau=10.0, rule="ceil")

    p = sub.add_parser("diagnose", help="inner disk / run statistics against their predictors")
    _add_model_args(p)
    p.add_argument("--input", nargs="+", help="edge-list file(s); need --coords with model metadata")
    p.add_argument("--coords", nargs="+")
    p.add_argument("--seeds", default="0")
    p.add_argument("--tau", type=float, nargs="+", default=[1.0])
    p.add_argument("--output", help="CSV path (stdout if omitted)")
    p.add_argument("--report", help="text report path (stderr if omitted)")

    p = sub.add_parser("calibrate", help="find C for a target average degree")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.75)
    p.add_argument("--avg-degree", type=float, required=True)
    p.add_argument("--seeds", type=int, default=3, help="number of graphs per probe")
    return parser


def cmd_generate(args: argparse.Namespace) -> int:
    C = _resolve_C(args, args.n)
    params = ModelParams(args.n, args.alpha, C)
    cfg = GeneratorConfig(params, args.seed, SamplingMode(args.mode), EdgeBuilder(args.edge_builder))
    g = generate(cfg)
    meta = {
        "n": params.n,
        "alpha": repr(params.alpha),
        "C": repr(params.C),
        "R": repr(params.R),
        "beta": repr(params.beta),
        "seed": args.seed,
        "mode": cfg.mode.value,
        "edge_builder": cfg.edge_builder.value,
        "rng": RNG_NAME,
        "realized_n": g.vertex_count,
        "edges": g.edge_count,
    }
    with open(args.output + ".edges", "w") as fh:
        write_edge_list(g, fh)
    with open(args.output + ".coords", "w") as fh:
        write_coordinates(g, fh, meta)
    log.info("wrote %s.edges/.coords: n=%d m=%d avg degree %.3f", args.output, g.vertex_count, g.edge_count, average_degree(g))
    return 0


def _spec(args: argparse.Namespace) -> ExperimentSpec:
    return ExperimentSpec(
        command=args.command,
        sources=_sources(args),
        algorithms=[a.strip() for a in args.algorithms.split(",") if a.strip()],
        tau=args.tau,
        component_limit=args.component_limit,
        limit_rule=args.limit_rule,
        time_limit=args.time_limit,
        output=args.output,
        jobs=args.jobs,
    )


def cmd_solve(args: argparse.Namespace, argv: list[str], with_exact: bool = False) -> int:
    spec = _spec(args)
    rows = _run_jobs(spec, with_exact)
    _write_rows(rows, CSV_COLUMNS, spec.output)
    _write_meta(spec, rows, argv)
    for r in rows:
        if "_error" in r:
            print(f"error: {r['graph']} seed={r['seed']} {r['algorithm']}: {r['_error']}", file=sys.stderr)
    return 1 if any("_error" in r for r in rows) else 0


def cmd_evaluate(args: argparse.Namespace, argv: list[str]) -> int:
    return cmd_solve(args, argv, with_exact=True)


DIAGNOSE_COLUMNS = [
    "graph", "seed", "model", "n", "tau", "gamma", "rho", "w", "sector_width", "n_sectors",
    "component_limit", "inner_disk", "n_outer", "narrow_run_vertices", "wide_run_vertices",
    "large_narrow_vertices", "inner_fraction", "inner_ratio", "wide_ratio", "large_narrow_ratio",
    "excess_ratio", "nonempty_sector_fraction", "occupancy_lower", "occupancy_upper",
    "outer_span_violations", "error",
]  # fmt: skip


def cmd_diagnose(args: argparse.Namespace, argv: list[str]) -> int:
    sources = _sources(args)
    rows, texts, failed = [], [], False
    for src in sources:
        try:
            g, params, mode = src.load()
            if params is None:
                raise StartupError(f"{src.name}: coordinates with n/alpha/C metadata are required")
        except Exception as exc:  # noqa: BLE001
            rows.append({"graph": src.name, "seed": src.seed, "error": str(exc)})
            failed = True
            continue
        for tau in args.tau:
            try:
                rep = bounds_report(g, params, tau, model=mode or "fixed")
            except ValueError as exc:
                rows.append({"graph": src.name, "seed": src.seed, "tau": tau, "error": str(exc)})
                texts.append(f"{src.name} seed={src.seed} tau={tau}: {exc}")
                failed = True
                continue
            rows.append({"graph": src.name, "seed": src.seed, **{k: _cell(v) for k, v in rep.as_row().items()}})
            texts.append(f"{src.name} seed={src.seed}\n{rep.text()}")
    _write_rows(rows, DIAGNOSE_COLUMNS, args.output)
    report = "\n\n".join(texts) + "\n"
    if args.report:
        Path(args.report).write_text(report)
    else:
        sys.stderr.write(report)
    return 1 if failed else 0


def _cell(v: object) -> object:
    return _fmt(v, 10) if isinstance(v, float) else v


def cmd_calibrate(args: argparse.Namespace) -> int:
    C = calibrate_C(args.avg_degree, args.n, args.alpha, args.seeds)
    print(f"{C:.10g}")
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "solve":
            return cmd_solve(args, argv)
        if args.command == "evaluate":
            return cmd_evaluate(args, argv)
        if args.command == "diagnose":
            return cmd_diagnose(args, argv)
        return cmd_calibrate(args)
    except (StartupError, ValueError, OSError) as exc:
        print(f"hrgcover: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
