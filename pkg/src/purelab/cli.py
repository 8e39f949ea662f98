from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from purelab import __version__
from purelab import experiments as ex
from purelab import verify
from purelab.errors import BoundViolationError, NonConvergenceError, ValidationError
from purelab.hbac import MAX_QUBITS

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_IO = 3

COMMANDS = ("theorems", "oracle-check", "montecarlo", "mixer-grid", "hbac", "distill")
UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int = 0
    dim: int = 5
    samples: int = 1000
    densities: int = 100
    unitaries: int = 100
    n: int = 3
    eps0: float = 0.2
    eps: float = 0.2
    delta: float = 1e-8
    max_iterations: int = 1_000_000
    steps: int = 101
    channel: str = "haar"
    out: str | None = None
    format: str = "csv"
    threads: int = 1


def _common(p: argparse.ArgumentParser, *, seed=True, out=True) -> None:
    if seed:
        p.add_argument("--seed", type=int, default=0, help="64-bit unsigned master seed")
    if out:
        p.add_argument("--out", default=None, help="dataset path; a .manifest.json is written next to it")
        p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $PURELAB_THREADS or CPU count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="purelab",
        description="Purification bound simulator: theorem checks, Monte Carlo and HBAC runs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("theorems", help="randomized checks of both theorems, the oracle and the weight lemma")
    p.add_argument("--samples", type=int, default=1000)
    _common(p)

    p = sub.add_parser("oracle-check", help="brute-force permutation oracle against the sort")
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--samples", type=int, default=100, help="random auxiliary spectra (x 21 alphas)")
    _common(p)

    p = sub.add_parser("montecarlo", help="random states and unitaries: output vs input polarization")
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--densities", type=int, default=100)
    p.add_argument("--unitaries", type=int, default=100)
    p.add_argument("--channel", choices=ex.CHANNELS, default="haar")
    _common(p)

    p = sub.add_parser("mixer-grid", help="two-qubit mixer channel over a grid of input purities")
    p.add_argument("--steps", type=int, default=101)
    _common(p, seed=False)

    p = sub.add_parser("hbac", help="recursive open-system purification trajectory")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--eps0", type=float, default=0.2)
    p.add_argument("--delta", type=float, default=1e-8)
    p.add_argument("--max-iterations", type=int, default=1_000_000)
    _common(p)

    p = sub.add_parser("distill", help="closed-system single-sort distillation vs (j-1)*eps")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--eps", type=float, default=0.2)
    _common(p, seed=False)
    return parser


def _check_ranges(parser: argparse.ArgumentParser, ns: argparse.Namespace) -> None:
    def bad(flag, msg):
        parser.error(f"argument {flag}: {msg}")

    if hasattr(ns, "seed") and not 0 <= ns.seed <= UINT64_MAX:
        bad("--seed", "must be a 64-bit unsigned integer")
    if ns.threads is not None and ns.threads < 1:
        bad("--threads", "must be >= 1")
    if ns.command == "oracle-check" and not 2 <= ns.dim <= 5:
        bad("--dim", "brute force supports 2 <= dim <= 5")
    if ns.command == "montecarlo" and ns.dim < 2:
        bad("--dim", "must be >= 2")
    for flag in ("samples", "densities", "unitaries", "max_iterations"):
        if getattr(ns, flag, 1) < 1:
            bad("--" + flag.replace("_", "-"), "must be >= 1")
    if ns.command == "mixer-grid" and ns.steps < 2:
        bad("--steps", "must be >= 2")
    if ns.command == "hbac":
        if not 2 <= ns.n <= MAX_QUBITS:
            bad("--n", f"must lie in 2..{MAX_QUBITS}")
        if not 0 <= ns.eps0 < float("inf"):
            bad("--eps0", "must be finite and >= 0")
        if not ns.delta > 0:
            bad("--delta", "must be > 0")
    if ns.command == "distill":
        if not 2 <= ns.n <= 6:
            bad("--n", "must lie in 2..6")
        if not 0 <= ns.eps < float("inf"):
            bad("--eps", "must be finite and >= 0")


def parse_args(argv=None) -> RunConfig:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)
    _check_ranges(parser, ns)
    if ns.verbose:
        logging.basicConfig(level=logging.INFO)
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    values = {k: v for k, v in vars(ns).items() if k in fields and v is not None}
    if ns.threads is None:
        values["threads"] = ex.default_threads()
    return RunConfig(**values)


def _emit(status: str, **metrics) -> None:
    parts = [f"status={status}"] + [f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}" for k, v in metrics.items()]
    print(" ".join(parts))


def _save(config: RunConfig, dataset: ex.Dataset) -> None:
    if config.out is None:
        return
    out = Path(config.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    ex.write_dataset(dataset, out, config.format)
    ex.write_manifest(ex.manifest_path(out), config.command, dataclasses.asdict(config), config.seed, dataset)


def _run_checks(config: RunConfig) -> list[verify.CheckResult]:
    rng = np.random.default_rng(config.seed)
    if config.command == "oracle-check":
        return [verify.check_oracle(config.dim, config.samples, rng)]
    s = config.samples
    return [
        verify.check_theorem1(s, rng),
        verify.check_theorem2(range(2, 7), s, rng),
        *(verify.check_oracle(d, max(1, s // 100), rng) for d in (2, 3, 4)),
        verify.check_dense_lemma(5, max(1, s // 10), rng),
    ]


def _execute(config: RunConfig) -> int:
    cmd = config.command
    if cmd in ("theorems", "oracle-check"):
        results = _run_checks(config)
        for r in results:
            print(r.summary())
        ok = all(r.ok for r in results)
        dataset = ex.Dataset(results, {"passed": sum(r.passed for r in results), "total": sum(r.total for r in results)})
        _save(config, dataset)
        _emit("ok" if ok else "violation", passed=dataset.meta["passed"], total=dataset.meta["total"])
        return EXIT_OK if ok else EXIT_VIOLATION

    if cmd == "montecarlo":
        ds = ex.run_fig1b(config.dim, config.densities, config.unitaries, config.seed, config.channel, config.threads)
        _save(config, ds)
        _emit("ok", max_y=ds.meta["max_y"], records=len(ds), rejected=ds.meta["rejected_samples"])
    elif cmd == "mixer-grid":
        ds = ex.run_mixer_grid(config.steps)
        _save(config, ds)
        _emit("ok", max_gap=ds.meta["max_gap"], records=len(ds))
    elif cmd == "hbac":
        ds = ex.run_hbac(config.n, config.eps0, config.delta, config.seed, config.max_iterations)
        _save(config, ds)
        m = ds.meta
        _emit("ok", final_eps_n=m["final_eps_n"], limit=m["limit"], distance_to_limit=m["distance_to_limit"], iterations=m["iterations"])
    elif cmd == "distill":
        ds = ex.run_closed_distillation(config.n, config.eps)
        _save(config, ds)
        for r in ds:
            print(f"j={r.j} achieved={r.achieved!r} bound={r.bound!r}")
        _emit("ok", fixed_point_distance=ds.meta["fixed_point_distance"], records=len(ds))
    return EXIT_OK


def execute(config: RunConfig) -> int:
    try:
        return _execute(config)
    except (BoundViolationError, ValidationError) as exc:
        _emit("violation", reason=json.dumps(str(exc)))
        return EXIT_VIOLATION
    except NonConvergenceError as exc:
        _emit("violation", reason=json.dumps(str(exc)), iterations=len(exc.trajectory))
        return EXIT_VIOLATION
    except OSError as exc:
        print(f"purelab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    return execute(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
