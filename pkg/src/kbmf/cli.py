"""
Command line interface: ``kbmf factorize | complete | generate | binarize | oracle | bench``.

Every run that produces factors writes them as matrix files next to a JSON
report; the errors in the report can be recomputed from those files and the
input matrix.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .heuristics import k_greedy_detailed
from .io import (apply_mask, appendix_grid, binarize_categorical, generate_synthetic_instance, instance_name,
                 read_config, read_matrix, read_table, write_factors, write_matrix)
from .matrix import BinaryMatrix, Factorisation, boolean_product
from .objective import ObjectiveSpec, frobenius_error, reconstruction_percentage, rho_error
from .oracle import boolean_rank_small, brute_force_kbmf, isolated_set
from .pipeline import PipelineConfig, factorize, greedy_seed_list, solve_compact
from .preprocess import WeightedBinaryMatrix

SCHEMA_VERSION = 1
METHODS = ("cg", "cip", "kgreedy")

log = logging.getLogger("kbmf")


class CliError(Exception):
    pass


def _num(v):
    """JSON-friendly number: ints stay ints, Fractions become floats."""
    if v is None:
        return None
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    v = float(v)
    return v if np.isfinite(v) else None


def _load(path) -> BinaryMatrix:
    try:
        X = read_matrix(path)
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}") from e
    except ValueError as e:
        raise CliError(f"malformed matrix file {path}: {e}") from e
    # weighted files describe a matrix with repeated rows and columns
    return X.original() if isinstance(X, WeightedBinaryMatrix) else X


def _objective(args) -> ObjectiveSpec:
    if args.objective == "frob":
        return ObjectiveSpec("frobenius")
    try:
        rho = Fraction(args.rho)
    except (ValueError, ZeroDivisionError) as e:
        raise CliError(f"bad --rho value {args.rho!r}") from e
    if rho <= 0:
        raise CliError("--rho must be positive")
    return ObjectiveSpec("rho", rho)


def _solve(X: BinaryMatrix, args) -> tuple[Factorisation, dict]:
    """Run the chosen method; returns factors and the method-specific report fields."""
    k = args.rank
    mode = _objective(args)
    t0 = time.perf_counter()
    if args.method == "kgreedy":
        g = k_greedy_detailed(X, k, seeds=greedy_seed_list(args.seed, args.greedy_seeds))
        zero = g.error == 0
        return g.factorisation, {"status": "heuristic", "dual_bound": 0 if zero else None,
                                 "zeta_f_lower_bound": 0 if zero else None, "proven": zero,
                                 "gap": 0 if zero else None, "greedy_seed": g.seed,
                                 "timings": {"total": time.perf_counter() - t0}}
    if args.method == "cip":
        if mode.mode != "frobenius":
            raise CliError("the compact formulation only supports --objective frob")
        g = k_greedy_detailed(X, k, seeds=greedy_seed_list(args.seed, args.greedy_seeds))
        f, r = solve_compact(X, k, time_limit=args.ip_time, warm=g.factorisation,
                             preprocess=not args.no_preprocess)
        zf = frobenius_error(X, boolean_product(f))
        lower = max(0, int(np.ceil(r.bound - 1e-6))) if np.isfinite(r.bound) else 0
        return f, {"status": r.status, "dual_bound": _num(r.bound), "zeta_f_lower_bound": lower,
                   "proven": bool(zf <= lower), "gap": zf - lower, "nodes": r.nodes,
                   "timings": {"total": time.perf_counter() - t0}}
    cfg = PipelineConfig(k=k, mode=mode, cg_time=args.cg_time, ip_time=args.ip_time, seed=args.seed,
                         greedy_seeds=args.greedy_seeds, preprocess=not args.no_preprocess,
                         cold_start=args.cold_start, columns_per_iter=args.columns_per_iter,
                         exact_pricing=args.exact_pricing)
    res = factorize(X, cfg)
    extra = {"status": res.cg.status if res.cg is not None else "trivial",
             "dual_bound": _num(res.dual_bound), "zeta_f_lower_bound": _num(res.zeta_f_lower_bound),
             "proven": bool(res.proven), "objective_proven": bool(res.objective_proven),
             "gap": _num(res.gap), "source": res.source,
             "reduced_shape": list(res.reduced_shape) if res.reduced_shape else None,
             "timings": {key: float(v) for key, v in res.timings.items()}}
    if res.cg is not None:
        extra["pool_size"] = len(res.cg.pool)
        extra["cg_iterations"] = len(res.cg.log)
        extra["lp_value"] = _num(res.cg.lp_value)
        extra["iterations"] = [it.as_dict() for it in res.cg.log]
    if res.ip is not None:
        extra["ip_status"] = res.ip.milp.status
        extra["ip_objective"] = _num(res.ip.objective)
    return res.factorisation, extra


def _report(X: BinaryMatrix, f: Factorisation, args, extra: dict, command: str) -> dict:
    mode = _objective(args)
    rep = {
        "schema_version": SCHEMA_VERSION,
        "kbmf_version": __version__,
        "command": command,
        "input": str(args.input),
        "shape": list(X.shape),
        "missing": int(X.missing.sum()),
        "rank": args.rank,
        "method": args.method,
        "objective": {"name": mode.mode, "rho": str(mode.rho) if mode.mode == "rho" else None},
        "seed": args.seed,
        "zeta_f": frobenius_error(X, boolean_product(f)),
        "zeta_rho": str(rho_error(X, f, mode.rho)) if mode.mode == "rho" else None,
    }
    rep.update(extra)
    return rep


def _emit(rep: dict, f: Factorisation, args) -> None:
    prefix = args.out or str(Path(args.input).with_suffix("")) + f"_k{args.rank}"
    pa, pb = write_factors(prefix, f)
    rep["factors"] = {"A": pa, "B": pb}
    text = json.dumps(rep, indent=2)
    report_path = args.report or f"{prefix}_report.json"
    Path(report_path).write_text(text + "\n")
    rep["report"] = report_path
    print(json.dumps({key: rep[key] for key in ("zeta_f", "zeta_rho", "proven", "status", "factors", "report")
                      if key in rep}))


def cmd_factorize(args) -> int:
    X = _load(args.input)
    f, extra = _solve(X, args)
    rep = _report(X, f, args, extra, "factorize")
    _emit(rep, f, args)
    return 0


def cmd_complete(args) -> int:
    X = _load(args.input)
    f, extra = _solve(X, args)
    rep = _report(X, f, args, extra, "complete")
    if args.truth:
        T = _load(args.truth)
        if T.shape != X.shape:
            raise CliError("--truth has a different shape from the input")
        zeros = Factorisation(np.zeros((X.n, args.rank), bool), np.zeros((args.rank, X.m), bool))
        rep["reconstruction_percentage"] = float(reconstruction_percentage(T, f))
        rep["baseline_zero_percentage"] = float(reconstruction_percentage(T, zeros))
    _emit(rep, f, args)
    return 0


def cmd_generate(args) -> int:
    out = Path(args.out)
    if args.grid:
        if args.grid != "appendix-b":
            raise CliError(f"unknown grid {args.grid!r}")
        out.mkdir(parents=True, exist_ok=True)
        grid = appendix_grid(args.seed)
        for name, X in grid:
            write_matrix(out / f"{name}.txt", X)
        print(json.dumps({"written": len(grid), "directory": str(out)}))
        return 0
    if args.n is None or args.m is None:
        raise CliError("--n and --m are required without --grid")
    if not 0 <= args.sigma < 100:
        raise CliError("--sigma must be in [0, 100)")
    inst = generate_synthetic_instance(args.n, args.m, args.kappa, args.sigma, args.noise, args.seed)
    X = inst.X
    if args.mask:
        if not 0 <= args.mask < 100:
            raise CliError("--mask must be in [0, 100)")
        if args.truth:
            write_matrix(args.truth, X)
        X = apply_mask(X, args.mask, args.seed)
    write_matrix(out, X)
    print(json.dumps({"written": 1, "file": str(out), "ones": int(X.ones.sum()), "missing": int(X.missing.sum())}))
    return 0


def cmd_binarize(args) -> int:
    try:
        table = read_table(args.table, delimiter=args.delimiter)
        config = read_config(args.config)
    except OSError as e:
        raise CliError(str(e)) from e
    try:
        X, names = binarize_categorical(table, config)
    except ValueError as e:
        raise CliError(str(e)) from e
    write_matrix(args.out, X)
    print(json.dumps({"shape": list(X.shape), "columns": names, "missing": int(X.missing.sum()),
                      "ones_pct": round(100 * float(X.ones.sum()) / max(1, int(X.known.sum())), 2)}))
    return 0


def cmd_oracle(args) -> int:
    X = _load(args.input)
    rep: dict = {"input": str(args.input), "shape": list(X.shape)}
    if args.isolation:
        cells = isolated_set(X)
        rep["isolation_number"] = len(cells)
        rep["isolated_set"] = [list(map(int, c)) for c in cells]
    if args.boolean_rank:
        try:
            rep["boolean_rank"] = boolean_rank_small(X)
        except ValueError as e:
            raise CliError(str(e)) from e
    if args.rank is not None:
        mode = _objective(args)
        try:
            value, f = brute_force_kbmf(X, args.rank, mode)
        except ValueError as e:
            raise CliError(str(e)) from e
        rep["rank"] = args.rank
        rep["optimum"] = str(value)
        rep["zeta_f"] = frobenius_error(X, boolean_product(f))
        if args.out:
            rep["factors"] = dict(zip("AB", write_factors(args.out, f)))
    if len(rep) == 2:
        raise CliError("nothing to do: give --isolation, --boolean-rank or --rank")
    print(json.dumps(rep))
    return 0


def cmd_bench(args) -> int:
    d = Path(args.directory)
    files = sorted(p for p in d.glob("*.txt") if not p.stem.endswith(("_A", "_B")))
    if not files:
        raise CliError(f"no instance files in {d}")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise CliError(f"unknown method {m!r}")
    rows = []
    for path in files:
        X = _load(path)
        row = {"instance": instance_name(path), "shape": list(X.shape)}
        for m in methods:
            ns = argparse.Namespace(**{**vars(args), "method": m, "input": str(path)})
            t0 = time.perf_counter()
            f, extra = _solve(X, ns)
            row[m] = {"zeta_f": frobenius_error(X, boolean_product(f)), "time": time.perf_counter() - t0,
                      "proven": extra.get("proven")}
        rows.append(row)
        log.info("%s done", row["instance"])
    rep = {"schema_version": SCHEMA_VERSION, "command": "bench", "rank": args.rank, "methods": methods,
           "objective": args.objective, "rows": rows}
    if args.report:
        Path(args.report).write_text(json.dumps(rep, indent=2) + "\n")
    width = max(len(r["instance"]) for r in rows)
    print("instance".ljust(width) + "".join(f"  {m:>18}" for m in methods))
    for r in rows:
        cells = "".join(f"  {r[m]['zeta_f']:>8d} ({r[m]['time']:6.1f}s)" for m in methods)
        print(r["instance"].ljust(width) + cells)
    return 0


def _solver_flags(p: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        p.add_argument("input", help="matrix file")
    p.add_argument("--rank", "-k", type=int, required=True, help="target rank k")
    p.add_argument("--method", choices=METHODS, default="cg")
    p.add_argument("--objective", choices=("frob", "rho"), default="frob")
    p.add_argument("--rho", default="1", help="rho for --objective rho, e.g. 1 or 1/3")
    p.add_argument("--cg-time", type=float, default=60.0, help="column generation budget in seconds")
    p.add_argument("--ip-time", type=float, default=60.0, help="integer program budget in seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--greedy-seeds", type=int, default=70, help="number of k-Greedy runs")
    p.add_argument("--columns-per-iter", type=int, default=2)
    p.add_argument("--exact-pricing", choices=("always", "on-heuristic-failure", "never"),
                   default="on-heuristic-failure")
    p.add_argument("--no-preprocess", action="store_true", help="solve on the input without merging duplicates")
    p.add_argument("--cold-start", action="store_true", help="start column generation from an empty pool")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kbmf", description="Rank-k binary matrix factorisation.")
    parser.add_argument("--version", action="version", version=f"kbmf {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factorize", help="factorise a binary matrix")
    _solver_flags(p)
    p.add_argument("--out", help="prefix of the factor files (default: next to the input)")
    p.add_argument("--report", help="path of the JSON report")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("complete", help="factorise a matrix with missing cells")
    _solver_flags(p)
    p.add_argument("--truth", help="complete matrix for the reconstruction percentage")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("generate", help="synthetic instances")
    p.add_argument("--out", required=True, help="output file, or directory with --grid")
    p.add_argument("--grid", help="named grid; only 'appendix-b' (120 instances)")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--kappa", type=int, default=10)
    p.add_argument("--sigma", type=float, default=50.0, help="target percentage of zeros")
    p.add_argument("--noise", type=float, default=0.0, help="percentage of flipped entries")
    p.add_argument("--mask", type=float, default=0.0, help="percentage of cells to hide")
    p.add_argument("--truth", help="with --mask: also write the unmasked matrix here")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("binarize", help="one-hot encode a categorical table")
    p.add_argument("table")
    p.add_argument("--config", required=True, help="JSON column-type config")
    p.add_argument("--out", required=True)
    p.add_argument("--delimiter", default=",")
    p.set_defaults(func=cmd_binarize)

    p = sub.add_parser("oracle", help="exact answers for tiny matrices")
    p.add_argument("input")
    p.add_argument("--isolation", action="store_true", help="isolation number")
    p.add_argument("--boolean-rank", action="store_true")
    p.add_argument("--rank", "-k", type=int, help="brute-force optimum at this rank")
    p.add_argument("--objective", choices=("frob", "rho"), default="frob")
    p.add_argument("--rho", default="1")
    p.add_argument("--out", help="prefix for the optimal factors")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="run several methods over a directory of instances")
    p.add_argument("directory")
    _solver_flags(p, with_input=False)
    p.add_argument("--methods", default="kgreedy,cg,cip", help="comma-separated list")
    p.add_argument("--report", help="path of the JSON table")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "rank", None) is not None and args.rank < 1:
        print("kbmf: error: --rank must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (CliError, ValueError) as e:
        print(f"kbmf: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
