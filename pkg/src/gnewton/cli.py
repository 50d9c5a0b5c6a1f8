"""Command-line interface.

Subcommands: solve (one run with a printed iteration table), basin (PPM
portrait of iterations-to-converge), bench (seeded randomized success-rate
report as JSON), lambda (error-constant estimate with spectral bounds), and
table (batch CSV reproducing the benchmark/constant tables for a problem).

Exit codes: 0 success, 1 method failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import analysis, experiments, problems, solver
from .errors import (EmptyWindow, GnewtonError, NoConvergence, NonFiniteEvaluation,
                     NoSuccessfulStarts, NotFixedPoint, UnknownGeneralizer,
                     UnknownProblem, ZeroSuccessRate)
from .generalizers import GENERALIZER_NAMES, make
from .problems import BUILTIN_NAMES, builtin, parse_system

TABLE_DOMAINS = {
    "quartic2": (3.0, 10.0, 100.0),
    "jennrich2": (3.0, 10.0),
    "cubic2": (3.0, 10.0, 100.0),
    "cubic6": (3.0, 10.0, 100.0),
    "sigproc2": (3.0, 10.0, 100.0),
}

TABLE_LAMBDA_S = {
    "quartic2": ("identity", "cube"),
    "jennrich2": ("identity", "exp"),
    "cubic2": ("identity", "cube", "sinh"),
    "cubic6": ("identity", "cube", "sinh"),
    "sigproc2": ("identity", "cube", "sinh", "exp"),
}


class UsageError(Exception):
    pass


def _load_problem(spec: str):
    if spec.startswith("file:"):
        path = spec[5:]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read problem file {path!r}: {e}")
        n = sum(1 for line in text.splitlines()
                if line.split("#", 1)[0].strip().startswith("f"))
        if n < 1:
            raise UsageError(f"no equations found in {path!r}")
        try:
            return parse_system(text, n, name=os.path.basename(path))
        except GnewtonError as e:
            raise UsageError(f"problem file {path!r}: {e}")
    try:
        return builtin(spec)
    except UnknownProblem as e:
        raise UsageError(str(e))


def _load_generalizer(name: str):
    try:
        return make(name)
    except UnknownGeneralizer as e:
        raise UsageError(str(e))


def _parse_vector(text: str, n: int):
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"expected {n} comma-separated values, got {len(parts)}")
    try:
        return tuple(float(t) for t in parts)
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}")


def _parse_domain(text: str, n: int):
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"expected {n} ranges 'lo:hi', got {len(parts)}")
    box = []
    for part in parts:
        halves = part.split(":")
        if len(halves) != 2:
            raise UsageError(f"range {part!r} is not of the form lo:hi")
        try:
            lo, hi = float(halves[0]), float(halves[1])
        except ValueError:
            raise UsageError(f"cannot parse range {part!r}")
        if lo > hi:
            raise UsageError(f"inverted range {part!r}")
        box.append((lo, hi))
    return tuple(box)


def _parse_grid(text: str):
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise UsageError(f"grid {text!r} is not of the form WxH")
    try:
        w, h = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}")
    if w < 1 or h < 1:
        raise UsageError("grid dimensions must be positive")
    return w, h


def _config(args) -> solver.SolveConfig:
    return solver.SolveConfig(tol=args.tol, max_iter=args.max_iter)


def _fmt(t) -> str:
    if isinstance(t, complex):
        return f"{t.real:.12g}{t.imag:+.12g}j"
    return f"{t:.12g}"


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(experiments.to_json_text(obj) + "\n")


def cmd_solve(args) -> int:
    p = _load_problem(args.problem)
    s = _load_generalizer(args.s)
    x0 = _parse_vector(args.x0, p.n)
    trace = solver.solve(p, s, x0, _config(args))
    print(f"# {p.name} / {s.name}  tol={args.tol:g}  max_iter={args.max_iter}")
    print(f"{'k':>3s}  {'|f(x)|_inf':>12s}  x")
    for k, (x, r) in enumerate(zip(trace.iterates, trace.residual_norms)):
        print(f"{k:3d}  {r:12.5e}  ({', '.join(_fmt(t) for t in x)})")
    print(f"status: {trace.status.value}  iterations: {trace.iterations_used}", end="")
    if trace.solution_index is not None:
        print(f"  solution_index: {trace.solution_index}", end="")
    print()
    if args.json:
        _write_json(args.json, {
            "problem": p.name, "generalizer": s.name,
            "status": trace.status.value,
            "iterations_used": trace.iterations_used,
            "solution_index": trace.solution_index,
            "iterates": [list(x) for x in trace.iterates],
            "residual_norms": list(trace.residual_norms),
        })
    return 0 if trace.status is solver.Status.CONVERGED else 1


def cmd_basin(args) -> int:
    p = _load_problem(args.problem)
    if p.n != 2:
        raise UsageError("basin portraits need a two-variable problem")
    s = _load_generalizer(args.s)
    domain = _parse_domain(args.domain, 2)
    resolution = _parse_grid(args.grid)
    grid = experiments.render_basin(p, s, domain, resolution, _config(args),
                                    workers=args.threads)
    experiments.write_ppm(grid, experiments.default_palette(), args.out)
    if args.counts:
        experiments.write_counts_csv(grid, args.counts)
    frac = grid.fraction_converged()
    print(f"wrote {args.out}: {resolution[0]}x{resolution[1]}, "
          f"converged fraction {frac:.4f}")
    return 0


def cmd_bench(args) -> int:
    p = _load_problem(args.problem)
    s = _load_generalizer(args.s)
    domain = _parse_domain(args.domain, p.n)
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    cfg = _config(args)
    report = experiments.run_bench(p, s, domain, args.samples, args.seed, cfg,
                                   workers=args.threads)
    if args.time:
        try:
            report = experiments.with_timing(p, s, report, cfg, repeats=args.repeats)
        except (NoSuccessfulStarts, ZeroSuccessRate) as e:
            print(f"timing skipped: {e}", file=sys.stderr)
    text = experiments.to_json_text(report.to_jsonable())
    print(text)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


def cmd_lambda(args) -> int:
    p = _load_problem(args.problem)
    s = _load_generalizer(args.s)
    if not p.known_solutions:
        raise UsageError(f"problem {p.name} has no known solutions to index")
    if not 1 <= args.solution <= len(p.known_solutions):
        raise UsageError(f"--solution must be in 1..{len(p.known_solutions)}")
    x_star = p.known_solutions[args.solution - 1]
    cfg = _config(args)
    try:
        vectors = analysis.compute_spectral_vectors(p, s, x_star)
        if args.x0:
            starts = (_parse_vector(args.x0, p.n),)
            est = analysis.estimate_lambda(p, s, x_star, starts[0], cfg)
        else:
            est, starts = analysis.estimate_lambda_auto(p, s, x_star, cfg)
    except (NonFiniteEvaluation, NoConvergence, EmptyWindow, NotFixedPoint) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    contained = vectors.bound_lo - 0.05 <= est.lam <= vectors.bound_hi + 0.05
    print(f"# {p.name} / {s.name}  solution {args.solution} = "
          f"({', '.join(_fmt(t) for t in x_star)})")
    print(f"lambda   = {est.lam:.4g}")
    print(f"order    = {est.order_estimate:.3f}")
    print(f"spread   = {est.fluctuation:.3g} (max/min window ratio)")
    print(f"interval = [{vectors.bound_lo:.4g}, {vectors.bound_hi:.4g}]  "
          f"(contains estimate: {'yes' if contained else 'NO'})")
    if args.json:
        _write_json(args.json, {
            "problem": p.name, "generalizer": s.name, "solution": args.solution,
            "lambda": est.lam, "order_estimate": est.order_estimate,
            "fluctuation": est.fluctuation,
            "bound_lo": vectors.bound_lo, "bound_hi": vectors.bound_hi,
            "contained": contained,
            "window": [list(row) for row in est.window],
            "starts": [list(x) for x in starts],
        })
    return 0


def _table_rows_bench(p, args, with_tts: bool):
    halves = TABLE_DOMAINS.get(p.name)
    if halves is None:
        halves = (3.0,)
    cfg = solver.SolveConfig(tol=args.tol, max_iter=args.max_iter)
    rows = []
    for s_name in GENERALIZER_NAMES:
        s = make(s_name)
        for half in halves:
            domain = tuple((-half, half) for _ in range(p.n))
            rep = experiments.run_bench(p, s, domain, args.samples, args.seed, cfg,
                                        workers=args.threads)
            row = {
                "problem": p.name, "s": s_name, "half_width": half,
                "samples": args.samples, "seed": args.seed,
                "success_rate_pct": 100.0 * rep.success_rate,
                "avg_iterations": "" if rep.avg_iterations is None
                else round(rep.avg_iterations, 3),
            }
            if with_tts:
                try:
                    rep = experiments.with_timing(p, s, rep, cfg, repeats=args.repeats)
                    row["cpu_per_iteration"] = f"{rep.cpu_per_iteration:.3e}"
                    row["time_to_solution"] = f"{rep.time_to_solution:.3e}"
                except (NoSuccessfulStarts, ZeroSuccessRate):
                    row["cpu_per_iteration"] = ""
                    row["time_to_solution"] = ""
            rows.append(row)
    return rows


def _table_rows_lambda(p, args):
    if not p.known_solutions:
        raise UsageError(f"problem {p.name} has no known solutions")
    names = TABLE_LAMBDA_S.get(p.name, GENERALIZER_NAMES)
    cfg = solver.SolveConfig(tol=args.tol, max_iter=args.max_iter)
    rows = []
    for sol_idx, x_star in enumerate(p.known_solutions, start=1):
        for s_name in names:
            s = make(s_name)
            row = {"problem": p.name, "solution": sol_idx, "s": s_name,
                   "lambda": "", "order": "", "bound_lo": "", "bound_hi": "",
                   "contained": "", "note": ""}
            try:
                est, _ = analysis.estimate_lambda_auto(p, s, x_star, cfg)
                row["lambda"] = f"{est.lam:.4g}"
                row["order"] = f"{est.order_estimate:.3f}"
            except (NoConvergence, EmptyWindow, NonFiniteEvaluation) as e:
                row["note"] = type(e).__name__
            try:
                vec = analysis.compute_spectral_vectors(p, s, x_star)
                row["bound_lo"] = f"{vec.bound_lo:.4g}"
                row["bound_hi"] = f"{vec.bound_hi:.4g}"
                if row["lambda"]:
                    ok = vec.bound_lo - 0.05 <= est.lam <= vec.bound_hi + 0.05
                    row["contained"] = "yes" if ok else "no"
            except (NonFiniteEvaluation, NotFixedPoint) as e:
                if not row["note"]:
                    row["note"] = type(e).__name__
            rows.append(row)
    return rows


def cmd_table(args) -> int:
    import csv

    p = _load_problem(args.problem)
    if args.which == "lambda":
        rows = _table_rows_lambda(p, args)
    else:
        rows = _table_rows_bench(p, args, with_tts=(args.which == "tts"))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.out}: {len(rows)} rows")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnewton",
        description="Generalized Newton solvers: solve, basin portraits, "
                    "randomized benchmarks, error-constant analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, domain=False):
        sp.add_argument("--problem", required=True,
                        help=f"builtin ({', '.join(BUILTIN_NAMES)}) or file:PATH")
        sp.add_argument("--s", required=True,
                        help=f"generalizer ({', '.join(GENERALIZER_NAMES)})")
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--max-iter", dest="max_iter", type=int, default=14)

    sp = sub.add_parser("solve", help="run one solve and print the iteration table")
    common(sp)
    sp.add_argument("--x0", required=True, help="comma-separated start point")
    sp.add_argument("--json", help="write the trace as JSON")
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("basin", help="render an iterations-to-converge portrait")
    common(sp)
    sp.add_argument("--domain", required=True, help="xmin:xmax,ymin:ymax")
    sp.add_argument("--grid", required=True, help="WxH pixels")
    sp.add_argument("--out", required=True, help="output PPM path")
    sp.add_argument("--counts", help="optional CSV of per-pixel counts")
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sp.set_defaults(fn=cmd_basin)

    sp = sub.add_parser("bench", help="randomized success-rate benchmark (JSON)")
    common(sp)
    sp.add_argument("--domain", required=True, help="n ranges lo:hi, comma-separated")
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--time", action="store_true",
                    help="also measure CPU per iteration and time-to-solution")
    sp.add_argument("--repeats", type=int, default=20)
    sp.add_argument("--json", help="also write the report to this path")
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sp.set_defaults(fn=cmd_bench)

    sp = sub.add_parser("lambda", help="error-constant estimate and bounds")
    common(sp)
    sp.add_argument("--solution", type=int, required=True,
                    help="1-based index into the problem's known solutions")
    sp.add_argument("--x0", help="optional start (defaults to an automatic ensemble)")
    sp.add_argument("--json", help="write the estimate as JSON")
    sp.set_defaults(fn=cmd_lambda)

    sp = sub.add_parser("table", help="batch CSV over generalizers and domains")
    sp.add_argument("--problem", required=True)
    sp.add_argument("--which", choices=("lambda", "bench", "tts"), required=True)
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", dest="max_iter", type=int, default=14)
    sp.add_argument("--repeats", type=int, default=20)
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sp.set_defaults(fn=cmd_table)
    return parser


_NEGATIVE_VALUE_FLAGS = ("--domain", "--x0")


def _absorb_negative_values(argv):
    """Turn ['--domain', '-3:3,...'] into ['--domain=-3:3,...'] so argparse
    does not mistake the value for an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _NEGATIVE_VALUE_FLAGS:
            val = next(it, None)
            if val is None:
                out.append(tok)
            else:
                out.append(f"{tok}={val}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_absorb_negative_values(list(argv)))
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except GnewtonError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
