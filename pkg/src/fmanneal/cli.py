"""``fma`` command-line interface.

Exit codes: 0 success, 2 configuration error, 3 runtime error, 4 budget error.
"""

import argparse
import sys
import time
import warnings

from numba.core.errors import NumbaWarning

from .annealer import AnnealConfig, brute_force_qubo, sample
from .config import dump_config, load_config
from .driver import RunAborted, run_fma
from .exceptions import BudgetExceededError, ConfigError
from .fm import Qubo
from .labs import brute_force_optimum, reference_optimum
from .stats import aggregate, load_records, to_csv
from .sweep import load_sweep_spec, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_BUDGET = 0, 2, 3, 4


def _err(msg):
    print(f"fma: {msg}", file=sys.stderr)


def _fmt_opt(v):
    return "n/a" if v is None else f"{v:.8f}"


def cmd_run(args):
    try:
        cfg, optimum = load_config(args.config, args.set)
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    if args.optimum is not None:
        optimum = args.optimum
    if optimum is None:
        optimum = reference_optimum(cfg.n)
    out = args.output or f"fma_run_n{cfg.n}_{cfg.policy}_seed{cfg.seed}.jsonl".replace(":", "")

    def progress(row):
        if args.verbose:
            print(f"iter {row['iteration']:5d}  best {row['best_objective_so_far']:.8f}  "
                  f"loss {row['train_loss_final']:.3e}  |D| {row['dataset_size']}", file=sys.stderr)

    status = EXIT_OK
    try:
        rec = run_fma(cfg, optimum=optimum, callback=progress)
    except RunAborted as exc:
        rec = exc.record
        _err(f"run aborted: {exc.cause!r}")
        status = EXIT_RUNTIME
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(rec.to_jsonl())
    print(f"record: {out}")
    print(f"best objective: {_fmt_opt(rec.best_objective)}")
    print(f"residual: {_fmt_opt(rec.best_residual)}")
    print(f"bb calls: {rec.bb_calls}")
    return status


def cmd_sweep(args):
    try:
        spec = load_sweep_spec(args.spec)
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    if args.output_dir:
        spec.output_dir = args.output_dir
    rows, records = run_sweep(spec, workers=args.workers,
                              progress=(lambda n: print(f"done {n}", file=sys.stderr)) if args.verbose else None)
    print(to_csv(rows), end="")
    failed = sum(r.n_failed for r in rows)
    if failed:
        _err(f"{failed} cell(s) failed and were excluded from the aggregates")
    return EXIT_OK


def cmd_stats(args):
    records = load_records(args.records)
    if not records:
        _err("no record files matched")
        return EXIT_CONFIG
    text = to_csv(aggregate(records))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_oracle(args):
    t0 = time.perf_counter()
    try:
        if args.problem == "labs":
            if args.n is None:
                _err("oracle labs requires --n")
                return EXIT_CONFIG
            spins, val = brute_force_optimum(args.n)
            wall = time.perf_counter() - t0
            print(f"n: {args.n}")
            print(f"energy: {val.energy}")
            print(f"merit_factor: {val.merit_factor!r}")
            print(f"objective: {val.objective!r}")
            print("sequence: " + "".join("+" if s > 0 else "-" for s in spins))
        else:
            if args.qubo is None:
                _err("oracle qubo requires --qubo FILE")
                return EXIT_CONFIG
            q = _read_qubo(args.qubo)
            if q is None:
                return EXIT_CONFIG
            x, e = brute_force_qubo(q)
            wall = time.perf_counter() - t0
            print(f"n: {q.n}")
            print(f"energy: {e!r}")
            print("x: " + "".join(str(int(b)) for b in x))
    except BudgetExceededError as exc:
        _err(f"budget exceeded: {exc}")
        return EXIT_BUDGET
    print(f"wall_time_s: {wall:.3f}")
    return EXIT_OK


def _read_qubo(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return Qubo.from_text(fh.read())
    except (OSError, ValueError) as exc:
        _err(f"cannot read QUBO file: {exc}")
        return None


def cmd_anneal(args):
    q = _read_qubo(args.qubo)
    if q is None:
        return EXIT_CONFIG
    try:
        cfg = AnnealConfig(args.beta_initial, args.beta_final, "linear",
                           args.outer_loops, args.inner_loops, args.num_reads)
    except ValueError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    ss = sample(q, cfg, args.seed)
    for idx, (x, e) in zip(ss.read_index, ss):
        print(f"{e!r} {''.join(str(int(b)) for b in x)} read={int(idx)}")
    return EXIT_OK


def cmd_defaults(args):
    from .config import FmaConfig

    text = dump_config(FmaConfig())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="fma", description="Factorization machine with annealing")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="single FMA run on the LABS objective")
    r.add_argument("--config", help="key = value configuration file")
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a key")
    r.add_argument("--optimum", type=float, help="reference optimum for residuals")
    r.add_argument("--output", "-o", help="JSON-lines record path")
    r.add_argument("--verbose", "-v", action="store_true")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a parameter sweep over seeds")
    s.add_argument("spec", help="sweep spec file")
    s.add_argument("--workers", type=int, help="worker processes (default: FMA_THREADS or CPU count)")
    s.add_argument("--output-dir", help="override the spec's output_dir")
    s.add_argument("--verbose", "-v", action="store_true")
    s.set_defaults(func=cmd_sweep)

    st = sub.add_parser("stats", help="aggregate stored run records")
    st.add_argument("records", nargs="+", help="record files or glob patterns")
    st.add_argument("--output", "-o")
    st.set_defaults(func=cmd_stats)

    o = sub.add_parser("oracle", help="exhaustive optimum for small instances")
    o.add_argument("problem", choices=("labs", "qubo"))
    o.add_argument("--n", type=int)
    o.add_argument("--qubo", help="QUBO triple file")
    o.set_defaults(func=cmd_oracle)

    a = sub.add_parser("anneal", help="sample a QUBO file with simulated annealing")
    d = AnnealConfig()
    a.add_argument("--qubo", required=True)
    a.add_argument("--beta-initial", type=float, default=d.beta_initial)
    a.add_argument("--beta-final", type=float, default=d.beta_final)
    a.add_argument("--outer-loops", type=int, default=d.outer_loops)
    a.add_argument("--inner-loops", type=int, default=d.inner_loops)
    a.add_argument("--num-reads", type=int, default=d.num_reads)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_anneal)

    df = sub.add_parser("defaults", help="print the default configuration")
    df.add_argument("--output", "-o")
    df.set_defaults(func=cmd_defaults)
    return p


def main(argv=None):
    warnings.filterwarnings("ignore", category=NumbaWarning)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
