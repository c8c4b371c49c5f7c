"""Command-line interface: ``becsim {sample,rates,table1,verify,bench}``.

Data goes to stdout (or ``--output``); diagnostics go to stderr.
Exit codes: 0 success, 1 usage/parameter/I-O error, 2 failed check.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core_math import (
    DEFAULT_C,
    Algorithm,
    BecParams,
    acceptance_rate_b,
    choose_algorithm,
)
from .errors import BecError
from .samplers import UniformSource, sample_many
from .verification import (
    empirical_acceptance,
    ks_critical,
    ks_uniform,
    means_theoretical,
    pit_conditional,
    theoretical_rate,
)

log = logging.getLogger("becsim")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK = 2

TABLE1_DELTAS = (0.0, 0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 100.0)
TABLE1_CS = (0.0, 0.5, 0.7, 1.0)
# Published three-decimal acceptance rates, rows by c, columns by delta.
TABLE1_REFERENCE = {
    0.0: (1.00, .916, .852, .723, .596, .517, .461, .386, .299, .201, .130, .041),
    0.5: (.904, .859, .829, .776, .736, .719, .710, .704, .705, .719, .741, .796),
    0.7: (.836, .803, .781, .747, .725, .718, .716, .718, .726, .746, .770, .822),
    1.0: (.731, .711, .700, .684, .680, .682, .687, .696, .712, .737, .764, .819),
}
TABLE1_TOLERANCE = 0.0005


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    params: BecParams
    n: int
    algorithm: Algorithm
    c: float
    seed: int
    fmt: str = "csv"
    output: str | None = None
    workers: int = 1


def fmt17(v: float) -> str:
    return f"{v:.17g}"


def fmt_rate(r: float) -> str:
    """At least six decimals and at least six significant digits."""
    if r <= 0 or not math.isfinite(r):
        return repr(r)
    decimals = max(6, 5 - math.floor(math.log10(r)))
    return f"{r:.{decimals}f}"


def table1_rate(delta: float, c: float) -> float:
    return acceptance_rate_b(delta, c)


def table1_rows():
    """[(c, [(delta, computed, published), ...]), ...] for the 48 cells."""
    rows = []
    for c in TABLE1_CS:
        cells = [(d, table1_rate(d, c), ref) for d, ref in zip(TABLE1_DELTAS, TABLE1_REFERENCE[c])]
        rows.append((c, cells))
    return rows


def _config_from_args(args) -> RunConfig:
    params = BecParams(args.beta, args.gamma, args.delta)
    if args.n < 1:
        raise BecError(f"--n must be a positive integer, got {args.n}")
    algorithm = Algorithm(args.algorithm) if args.algorithm else Algorithm.AUTO
    if algorithm is Algorithm.B and params.delta == 0:
        raise BecError("algorithm b requires delta > 0 (use c or auto at delta = 0)")
    if algorithm is Algorithm.B and not args.c > 0:
        raise BecError(f"--c must be > 0 for algorithm b, got {args.c}")
    seed = args.seed
    if seed is None:
        seed = UniformSource().seed
        log.info("seed=%d (from system entropy)", seed)
    if args.workers < 1:
        raise BecError(f"--workers must be >= 1, got {args.workers}")
    return RunConfig(
        params=params,
        n=args.n,
        algorithm=algorithm,
        c=args.c,
        seed=seed,
        fmt=getattr(args, "format", "csv"),
        output=getattr(args, "output", None),
        workers=args.workers,
    )


def _route_note(cfg: RunConfig) -> str:
    if cfg.algorithm is Algorithm.AUTO:
        route = choose_algorithm(cfg.params.delta)
        if route.algorithm is Algorithm.B:
            return f"auto -> b (c={route.c})"
        return "auto -> c"
    if cfg.algorithm is Algorithm.B:
        return f"b (c={cfg.c})"
    return cfg.algorithm.value


def _sample_shard(beta, gamma, delta, n, algorithm, c, seed):
    params = BecParams(beta, gamma, delta)
    pairs, stats = sample_many(params, n, algorithm, UniformSource(seed), c=c)
    return pairs, stats.proposals


def _draw(cfg: RunConfig):
    """Pairs and total proposals for ``cfg``, sharded across workers if requested."""
    p = cfg.params
    if cfg.workers == 1:
        return _sample_shard(p.beta, p.gamma, p.delta, cfg.n, cfg.algorithm, cfg.c, cfg.seed)
    seeds = UniformSource(cfg.seed).spawn_seeds(cfg.workers)
    sizes = [cfg.n // cfg.workers + (i < cfg.n % cfg.workers) for i in range(cfg.workers)]
    jobs = [(s, k) for s, k in zip(seeds, sizes) if k > 0]
    pairs, proposals = [], 0
    with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
        futures = [
            pool.submit(_sample_shard, p.beta, p.gamma, p.delta, k, cfg.algorithm, cfg.c, s)
            for s, k in jobs
        ]
        for fut in futures:
            shard, props = fut.result()
            pairs.extend(shard)
            proposals += props
    return pairs, proposals


def write_records(pairs, stream, fmt: str):
    if fmt == "csv":
        stream.write("x,y\n")
        for x, y in pairs:
            stream.write(f"{fmt17(x)},{fmt17(y)}\n")
    elif fmt == "jsonl":
        # json.dumps uses repr, which round-trips doubles exactly.
        for x, y in pairs:
            stream.write(json.dumps({"x": x, "y": y}) + "\n")
    else:
        raise BecError(f"unknown format {fmt!r}")


@contextlib.contextmanager
def _open_output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_sample(args) -> int:
    cfg = _config_from_args(args)
    log.info("route: %s", _route_note(cfg))
    pairs, proposals = _draw(cfg)
    log.info("drew %d pairs from %d proposals", len(pairs), proposals)
    with _open_output(cfg.output) as out:
        write_records(pairs, out, cfg.fmt)
    return EXIT_OK


def cmd_rates(args) -> int:
    for v in list(args.deltas) + list(args.cs):
        if not (v >= 0 and math.isfinite(v)):
            raise BecError(f"deltas and c values must be finite and >= 0, got {v}")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["c", "delta", "rate"])
    for c in args.cs:
        for d in args.deltas:
            w.writerow([repr(float(c)), repr(float(d)), fmt_rate(acceptance_rate_b(d, c))])
    return EXIT_OK


def cmd_table1(args) -> int:
    t0 = time.perf_counter()
    rows = table1_rows()
    elapsed = time.perf_counter() - t0
    out = sys.stdout
    out.write("c    | " + " ".join(f"{d:>6g}" for d in TABLE1_DELTAS) + "\n")
    mismatches = []
    for c, cells in rows:
        out.write(f"{c:<4g} | " + " ".join(f"{r:6.3f}" for _, r, _ in cells) + "\n")
        for d, r, ref in cells:
            if abs(r - ref) > TABLE1_TOLERANCE:
                mismatches.append((c, d, r, ref))
    out.write(f"# computed in {elapsed:.3f}s; tolerance +/-{TABLE1_TOLERANCE}\n")
    for c, d, r, ref in mismatches:
        out.write(f"MISMATCH c={c:g} delta={d:g}: computed {r:.7f}, published {ref:.3f}, "
                  f"diff {r - ref:+.7f}\n")
    cells = sum(len(cs) for _, cs in rows)
    out.write(f"{'FAIL' if mismatches else 'PASS'}: {cells - len(mismatches)}/{cells} cells within tolerance\n")
    return EXIT_CHECK if mismatches else EXIT_OK


def run_verify(cfg: RunConfig, n_proposals: int) -> list[dict]:
    """Run all seeded checks for ``cfg`` and return one record per check."""
    source = UniformSource(cfg.seed)
    p = cfg.params
    algorithm, c = cfg.algorithm, cfg.c
    if algorithm is Algorithm.AUTO:
        algorithm, c = choose_algorithm(p.delta)
    checks = []

    theory = theoretical_rate(p.delta, algorithm, c)
    est = empirical_acceptance(p, algorithm, c, n_proposals, source)
    z = est.z_score(theory)
    checks.append(dict(check="acceptance", value=est.point, expected=theory,
                       statistic=z, threshold=3.0, passed=bool(abs(z) <= 3.0)))

    pairs, _ = sample_many(p, cfg.n, algorithm, source, c=c)
    crit = ks_critical(cfg.n, 0.01)
    for axis in ("y_given_x", "x_given_y"):
        d = ks_uniform(pit_conditional(p, pairs, axis))
        checks.append(dict(check=f"pit_{axis}", value=d, expected=0.0,
                           statistic=d, threshold=crit, passed=bool(d < crit)))

    arr = np.asarray(pairs)
    for name, col, mu in zip(("mean_x", "mean_y"), arr.T, means_theoretical(p)):
        se = col.std(ddof=1) / math.sqrt(col.size)
        z = (col.mean() - mu) / se if se > 0 else 0.0
        checks.append(dict(check=name, value=float(col.mean()), expected=mu,
                           statistic=float(z), threshold=4.0, passed=bool(abs(z) <= 4.0)))
    return checks


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    if args.proposals < 1000:
        raise BecError(f"--proposals must be at least 1000, got {args.proposals}")
    log.info("verify: %s, seed=%d", _route_note(cfg), cfg.seed)
    checks = run_verify(cfg, args.proposals)
    for rec in checks:
        sys.stdout.write(json.dumps(rec) + "\n")
    failed = [rec["check"] for rec in checks if not rec["passed"]]
    summary = {"seed": cfg.seed, "route": _route_note(cfg), "passed": not failed, "failed": failed}
    sys.stdout.write(json.dumps(summary) + "\n")
    if failed:
        log.error("verification failed: %s", ", ".join(failed))
        return EXIT_CHECK
    return EXIT_OK


def run_bench(params: BecParams, n: int, algorithms, c: float, seed: int) -> list[dict]:
    rows = []
    for alg in algorithms:
        alg = Algorithm(alg)
        if alg is Algorithm.B and params.delta == 0:
            log.info("skipping algorithm b at delta = 0")
            continue
        source = UniformSource(seed)
        t0 = time.perf_counter()
        _, stats = sample_many(params, n, alg, source, c=c)
        seconds = time.perf_counter() - t0
        expected = 1.0 / theoretical_rate(params.delta, alg, c)
        rows.append(dict(
            algorithm=alg.value,
            c=c if alg is Algorithm.B else "",
            draws=n,
            seconds=seconds,
            draws_per_second=n / seconds if seconds > 0 else math.inf,
            mean_trials=stats.mean_trials,
            expected_trials=expected,
            relative_error=abs(stats.mean_trials - expected) / expected,
        ))
    return rows


def cmd_bench(args) -> int:
    cfg = _config_from_args(args)
    algorithms = [args.algorithm] if args.algorithm else ["a", "b", "c"]
    rows = run_bench(cfg.params, cfg.n, algorithms, cfg.c, cfg.seed)
    fields = ["algorithm", "c", "draws", "seconds", "draws_per_second",
              "mean_trials", "expected_trials", "relative_error", "within_5pct"]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([r["algorithm"], r["c"], r["draws"], f"{r['seconds']:.4f}",
                    f"{r['draws_per_second']:.1f}", f"{r['mean_trials']:.4f}",
                    f"{r['expected_trials']:.4f}", f"{r['relative_error']:.4f}",
                    str(r["relative_error"] <= 0.05).lower()])
    return EXIT_OK


def _uint64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="becsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = _Parser(add_help=False)
    run.add_argument("--beta", type=float, default=1.0)
    run.add_argument("--gamma", type=float, default=1.0)
    run.add_argument("--delta", type=float, default=1.0)
    run.add_argument("--n", type=int, default=1000)
    run.add_argument("--c", type=float, default=DEFAULT_C)
    run.add_argument("--seed", type=_uint64, default=None)
    run.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sample", parents=[run], help="draw pairs")
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm], default="auto")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("rates", help="theoretical acceptance rates (c = 0 gives algorithms A/C)")
    p.add_argument("--deltas", type=float, nargs="+", default=list(TABLE1_DELTAS))
    p.add_argument("--cs", type=float, nargs="+", default=list(TABLE1_CS))
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("table1", help="recompute the published rate table and diff it")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("verify", parents=[run], help="seeded statistical checks")
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm], default="auto")
    p.add_argument("--proposals", type=int, default=100_000)
    p.set_defaults(func=cmd_verify, n=100_000)

    p = sub.add_parser("bench", parents=[run], help="throughput and trials per draw")
    p.add_argument("--algorithm", choices=["a", "b", "c"], default=None)
    p.set_defaults(func=cmd_bench, n=100_000)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.func(args)
    except (BecError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
