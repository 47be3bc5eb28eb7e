"""Command-line driver: ``python -m tdepth <command>``.

Exit codes: 0 success, 1 unexpected error, 2 usage (bad flags, config or
input document), 3 capacity (circuit too large for the dense oracle),
4 verification failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .baselines import LookaheadParams, lookahead_optimize
from .benchgen import PROFILES, GenSpec, generate, manifest, specs_from_manifest, suite_specs
from .circuit import Circuit, t_count, t_depth
from .config import Config, load_config
from .document import dumps, parse_document, read_circuit, serialize, write_atomic
from .errors import CapacityError, ConfigError, DocumentError, TDepthError
from .estimate import Protocol, estimate
from .ga import optimize
from .oracle import Verdict, verify_optimization
from .report import CsvRow, csv_text, optimization_report, summarize

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_CAPACITY, EXIT_VERIFY = 0, 1, 2, 3, 4

log = logging.getLogger("tdepth")


class UsageError(TDepthError):
    pass


def _config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (overrides --config and TDEPTH_* variables)")
    g.add_argument("--config", help="JSON config file")
    g.add_argument("--seed", type=int)
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--population", type=int)
    g.add_argument("--generations", type=int)
    g.add_argument("--elite", type=int)
    g.add_argument("--mutation", type=float)
    g.add_argument("--max-rounds", type=int)
    g.add_argument("--workers", type=int, help="threads for fitness evaluation")
    g.add_argument("--policy", choices=["disjoint", "overlap"])
    g.add_argument("--order", choices=["paper", "strict"])
    g.add_argument("--window", type=int, help="lookahead window size")
    g.add_argument("--no-expand", dest="expand", action="store_const", const=False)


def _resolve_config(args) -> Config:
    keys = ("seed", "alpha", "beta", "population", "generations", "elite", "mutation",
            "max_rounds", "workers", "policy", "order", "window", "expand")
    overrides = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    return load_config(args.config, overrides)


def _write_or_print(text: str, path: str | None) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    if args.profile:
        profile = PROFILES[args.profile]
        if args.count is not None:
            profile = type(profile)(profile.name, profile.qubits, profile.columns, profile.densities, args.count)
        specs = suite_specs(profile, args.seed)
        _write_or_print(dumps(manifest(specs)), args.out)
        return EXIT_OK
    if args.n is None or args.c is None:
        raise UsageError("generate needs --n and --c (or --profile)")
    if (args.t_total is None) == (args.density is None):
        raise UsageError("give exactly one of --t-total and --density")
    t_total = args.t_total if args.t_total is not None else round(args.density * args.n * args.c)
    try:
        spec = GenSpec(args.n, args.c, t_total, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    provenance = {"generator": {"n": spec.n, "c": spec.c, "t_total": spec.t_total, "seed": spec.seed}}
    _write_or_print(serialize(generate(spec), provenance), args.out)
    return EXIT_OK


def run_optimize(circuit: Circuit, cfg: Config, source: str | None = None):
    t0 = time.perf_counter()
    result = optimize(circuit, cfg.ga, cfg.greedy, cfg.expansion, cfg.policy)
    seconds = time.perf_counter() - t0
    return result, optimization_report(circuit, result, cfg, seconds, source)


def cmd_optimize(args) -> int:
    cfg = _resolve_config(args)
    doc = read_circuit(args.input)
    result, report = run_optimize(doc.circuit, cfg, str(args.input))
    provenance = {"optimized_from": report["input_sha256"], "config": cfg.as_dict()}
    _write_or_print(serialize(result.circuit, provenance), args.out)
    if args.report:
        write_atomic(args.report, dumps(report))
    if args.csv:
        row = CsvRow(Path(args.input).stem, doc.circuit.n, len(doc.circuit.columns), t_count(doc.circuit), "ga",
                     report["t_depth_before"], report["t_depth_after"], report["t_count_before"],
                     report["t_count_after"], report["rounds"], report["wall_clock_seconds"], cfg.ga.rng_seed)
        write_atomic(args.csv, csv_text([row]))
    print(
        f"T-depth {report['t_depth_before']} -> {report['t_depth_after']} "
        f"({report['t_depth_reduction_pct']:.2f}%), T-count {report['t_count_before']} -> "
        f"{report['t_count_after']} ({report['t_count_reduction_pct']:.2f}%), "
        f"{report['rounds']} rounds, {report['wall_clock_seconds']:.2f}s",
        file=sys.stderr if not args.out else sys.stdout,
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    original = read_circuit(args.original).circuit
    optimized = read_circuit(args.optimized).circuit
    rep = verify_optimization(original, optimized, args.tol)
    print(rep)
    return EXIT_OK if rep.verdict is Verdict.EQUIVALENT else EXIT_VERIFY


def _load_instances(path: str) -> list[tuple[str, GenSpec | None, Circuit]]:
    data = Path(path).read_bytes()
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if isinstance(obj, list):
        try:
            specs = specs_from_manifest(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"bad manifest entry: {exc}", path) from None
        return [(f"{k:04d}", s, generate(s)) for k, s in enumerate(specs)]
    return [(Path(path).stem, None, parse_document(data).circuit)]


def _instance_row(name, spec, circuit, method, after, rounds, seconds, seed):
    c = spec.c if spec else len(circuit.columns)
    total = spec.t_total if spec else t_count(circuit)
    return CsvRow(name, circuit.n, c, total, method, t_depth(circuit), t_depth(after),
                  t_count(circuit), t_count(after), rounds, seconds, seed)


def _run_instance(job):
    name, spec, circuit, cfg, with_lookahead = job
    rows = []
    t0 = time.perf_counter()
    res = optimize(circuit, cfg.ga, cfg.greedy, cfg.expansion, cfg.policy)
    rows.append(_instance_row(name, spec, circuit, "ga", res.circuit, len(res.logs),
                              time.perf_counter() - t0, cfg.ga.rng_seed))
    if with_lookahead:
        t0 = time.perf_counter()
        out, _ = lookahead_optimize(circuit, LookaheadParams(cfg.window, cfg.policy))
        rows.append(_instance_row(name, spec, circuit, f"lookahead_w{cfg.window}", out, 1,
                                  time.perf_counter() - t0, None))
    return rows


def run_suite(instances, cfg: Config, with_lookahead: bool, jobs: int = 1) -> list[CsvRow]:
    work = [(name, spec, circ, cfg, with_lookahead) for name, spec, circ in instances]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_run_instance, work))
    else:
        results = [_run_instance(w) for w in work]
    return [row for rows in results for row in rows]


def _emit_table(rows, args) -> None:
    _write_or_print(csv_text(rows), args.out)
    for method, s in summarize(rows).items():
        print(
            f"{method}: {s['instances']} instances, mean T-depth reduction {s['mean_td_reduction_pct']:.2f}%, "
            f"mean T-count reduction {s['mean_tc_reduction_pct']:.2f}%, mean {s['mean_seconds']:.2f}s",
            file=sys.stderr if not args.out else sys.stdout,
        )


def cmd_compare(args) -> int:
    cfg = _resolve_config(args)
    rows = run_suite(_load_instances(args.input), cfg, True, args.jobs)
    _emit_table(rows, args)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _resolve_config(args)
    if args.manifest:
        instances = _load_instances(args.manifest)
    else:
        profile = PROFILES[args.profile]
        if args.count is not None:
            profile = type(profile)(profile.name, profile.qubits, profile.columns, profile.densities, args.count)
        instances = [(f"{k:04d}", s, generate(s)) for k, s in enumerate(suite_specs(profile, args.master_seed))]
    rows = run_suite(instances, cfg, args.lookahead, args.jobs)
    _emit_table(rows, args)
    return EXIT_OK


def cmd_estimate(args) -> int:
    td, tc = args.t_depth, args.t_count
    if args.input:
        circ = read_circuit(args.input).circuit
        td, tc = t_depth(circ), t_count(circ)
    if td is None or tc is None:
        raise UsageError("estimate needs --t-count and --t-depth, or an input circuit")
    try:
        protocol = Protocol(args.constant, args.exponent, args.tiles, args.distance, args.target)
        est = estimate(tc, td, protocol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        print(dumps(est.as_dict()), end="")
    else:
        print(f"T-count {tc}, T-depth {td}")
        print(f"p_max = {est.formulas['p_max']} = {est.p_max:.6g}")
        print(f"factory qubits = {est.formulas['factory_qubits']} = {est.factory_qubits}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tdepth", description="T-depth reduction by merging T layers")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="random circuit, or a suite manifest with --profile")
    g.add_argument("--n", type=int)
    g.add_argument("--c", type=int)
    g.add_argument("--t-total", type=int)
    g.add_argument("--density", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--profile", choices=sorted(PROFILES))
    g.add_argument("--count", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    o = sub.add_parser("optimize", help="run the GA optimizer on a circuit document")
    o.add_argument("input")
    o.add_argument("--out", help="optimized circuit (default: stdout)")
    o.add_argument("--report", help="JSON report path")
    o.add_argument("--csv", help="single-row CSV path")
    _config_flags(o)
    o.set_defaults(func=cmd_optimize)

    v = sub.add_parser("verify", help="dense-unitary equivalence check (n <= 12)")
    v.add_argument("original")
    v.add_argument("optimized")
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compare", help="GA against the window lookahead on a circuit or manifest")
    c.add_argument("input")
    c.add_argument("--out", help="CSV path (default: stdout)")
    c.add_argument("--jobs", type=int, default=1)
    _config_flags(c)
    c.set_defaults(func=cmd_compare)

    b = sub.add_parser("bench", help="GA over a generated suite, CSV out")
    b.add_argument("--profile", choices=sorted(PROFILES), default="small")
    b.add_argument("--count", type=int)
    b.add_argument("--master-seed", type=int, default=0)
    b.add_argument("--manifest", help="run this manifest instead of a profile")
    b.add_argument("--lookahead", action="store_true", help="also run the lookahead baseline")
    b.add_argument("--out", help="CSV path (default: stdout)")
    b.add_argument("--jobs", type=int, default=1)
    _config_flags(b)
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("estimate", help="magic-state distillation estimate")
    e.add_argument("input", nargs="?", help="circuit document to take T-count/T-depth from")
    e.add_argument("--t-count", type=int)
    e.add_argument("--t-depth", type=int)
    e.add_argument("--target", type=float, default=1e-2)
    e.add_argument("--constant", type=float, default=41.25)
    e.add_argument("--exponent", type=int, default=4)
    e.add_argument("--tiles", type=int, default=11)
    e.add_argument("--distance", type=int, default=5)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_estimate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, ConfigError, DocumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TDepthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
