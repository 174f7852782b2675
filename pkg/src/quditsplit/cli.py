"""Command-line harness: run trials, verify exhaustively, tabulate outcomes.

Subcommands:
  run           execute protocol trials, emit a JSON-lines trace and CSV summary
  verify        sweep the dense verification oracle over a (d, n) grid
  distribution  empirical vs exact outcome frequencies for the sender's measurement

Exit codes: 0 success, 2 usage error, 3 size cap exceeded, 4 verification
failure (a trial or check missed its tolerance).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from . import trace
from .measurement import outcome_distribution, sample_outcome_counts, trial_stream
from .oracle import (
    ORACLE_SIZE_CAP,
    dense_protocol_check,
    marginal_sweep,
    qubit_fixture_check,
)
from .protocol import (
    FIDELITY_TOL,
    MODES,
    SEQUENTIAL,
    PARALLEL,
    encode,
    prepare_joint,
    run_protocol,
)
from .register import DEFAULT_SIZE_CAP, SecretAmplitudes, SizeCapError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_VERIFY = 4

# Seed for the deterministic secrets the verify subcommand sweeps with.
VERIFY_SEED = 0xA5A5


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _dimension(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("qudit dimension must be >= 2")
    return value


def _at_least_one(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("value must be >= 0")
    return value


def parse_secret(text: str, d: int) -> SecretAmplitudes:
    """Parse comma-separated re,im pairs; normalize with a loud warning if
    the input norm is off by more than 1e-6."""
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"secret must be comma-separated numbers: {exc}")
    if len(values) != 2 * d:
        raise ValueError(
            f"secret needs {2 * d} values (re,im per coefficient) for d={d}, "
            f"got {len(values)}"
        )
    alphas = np.array(
        [complex(values[2 * k], values[2 * k + 1]) for k in range(d)]
    )
    norm = float(np.linalg.norm(alphas))
    if norm == 0.0:
        raise ValueError("secret must not be the zero vector")
    if abs(norm - 1.0) > 1e-6:
        print(
            f"warning: secret norm is {norm:.9g}, normalizing",
            file=sys.stderr,
        )
    return SecretAmplitudes(d, alphas)


def parse_grid(text: str) -> list[tuple[int, int]]:
    """Parse a sweep grid like "d=2..4,n=1..3" into (d, n) pairs."""
    ranges: dict[str, list[int]] = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValueError(f"grid term {part!r} is not key=value")
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in ("d", "n"):
            raise ValueError(f"grid key must be d or n, got {key!r}")
        value = value.strip()
        if ".." in value:
            lo_text, _, hi_text = value.partition("..")
            lo, hi = int(lo_text), int(hi_text)
        else:
            lo = hi = int(value)
        if lo > hi:
            raise ValueError(f"empty range in grid term {part!r}")
        ranges[key] = list(range(lo, hi + 1))
    if "d" not in ranges or "n" not in ranges:
        raise ValueError("grid must specify both d and n")
    for d in ranges["d"]:
        if d < 2:
            raise ValueError(f"grid dimension d={d} is below 2")
    for n in ranges["n"]:
        if n < 1:
            raise ValueError(f"grid party count n={n} is below 1")
    return [(d, n) for d in ranges["d"] for n in ranges["n"]]


# ---- run ---------------------------------------------------------------------


@dataclass
class RunSettings:
    d: int
    n_bobs: int
    mode: str
    trials: int
    seed: int
    secret: Optional[SecretAmplitudes]
    cap: int
    trace_path: Optional[str]
    summary_path: Optional[str]


def execute_run(settings: RunSettings) -> int:
    trace_lines = []
    summary_rows = [trace.SUMMARY_HEADER]
    all_ok = True
    for trial in range(settings.trials):
        rng = trial_stream(settings.seed, trial)
        secret = settings.secret or SecretAmplitudes.random(settings.d, rng)
        transcript = run_protocol(
            secret,
            settings.d,
            settings.n_bobs,
            settings.mode,
            rng=rng,
            cap=settings.cap,
        )
        transcript.seed = settings.seed
        ok = transcript.final_fidelity >= 1.0 - FIDELITY_TOL
        all_ok = all_ok and ok
        trace_lines.append(trace.trace_line(transcript, settings.seed, trial))
        summary_rows.append(trace.summary_row(transcript, trial))
        l, m = transcript.split_outcome()
        k_digits = transcript.reconstruction_digits()
        print(
            f"trial {trial}: outcome (l,m)=({l},{m}) k={k_digits} "
            f"fidelity={transcript.final_fidelity:.12f}"
            + ("" if ok else "  BELOW TOLERANCE")
        )
    if settings.trace_path:
        trace.write_lines(settings.trace_path, trace_lines)
    if settings.summary_path:
        trace.write_lines(settings.summary_path, summary_rows)
    if not all_ok:
        print("one or more trials missed the fidelity tolerance", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    secret = None
    if args.secret is not None:
        try:
            secret = parse_secret(args.secret, args.d)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    settings = RunSettings(
        d=args.d,
        n_bobs=args.n,
        mode=args.mode,
        trials=args.trials,
        seed=args.seed,
        secret=secret,
        cap=args.cap,
        trace_path=args.emit_trace,
        summary_path=args.summary,
    )
    return execute_run(settings)


# ---- verify ------------------------------------------------------------------


def _verify_secrets(d: int, n: int) -> list[tuple[str, SecretAmplitudes]]:
    uniform = SecretAmplitudes(d, np.ones(d, dtype=complex))
    random = SecretAmplitudes.random(d, trial_stream(VERIFY_SEED, 1000 * d + n))
    return [
        ("basis", SecretAmplitudes.basis(d, 0)),
        ("uniform", uniform),
        ("random", random),
    ]


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        grid = parse_grid(args.grid)
    except ValueError as exc:
        print(f"error: bad grid: {exc}", file=sys.stderr)
        return EXIT_USAGE

    for d, n in grid:
        if d ** (n + 2) > ORACLE_SIZE_CAP:
            raise SizeCapError(
                f"grid point d={d}, n={n} needs {d ** (n + 2)} amplitudes, "
                f"over the oracle cap of {ORACLE_SIZE_CAP}; trim the grid"
            )

    checks = []
    for d, n in grid:
        secrets = _verify_secrets(d, n)
        _, random_secret = secrets[-1]
        for mode in (SEQUENTIAL, PARALLEL):
            report = dense_protocol_check(random_secret, d, n, mode)
            report["case"] = "random"
            checks.append(report)
        for label, secret in secrets:
            report = marginal_sweep(secret, d, n)
            report["case"] = label
            checks.append(report)

    fixture_rng = trial_stream(VERIFY_SEED, 7)
    fixture_pairs = [(1.0 + 0j, 0j), (1 / np.sqrt(2) + 0j, 1 / np.sqrt(2) + 0j)]
    for _ in range(3):
        pair = SecretAmplitudes.random(2, fixture_rng).alphas
        fixture_pairs.append((pair[0], pair[1]))
    for a, b in fixture_pairs:
        report = qubit_fixture_check(a, b)
        report["case"] = f"a={a:.6f}, b={b:.6f}"
        checks.append(report)

    all_passed = all(check["passed"] for check in checks)
    for check in checks:
        label = check["check"]
        where = ""
        if "d" in check:
            where = f" d={check['d']} n={check['n']}"
        if "mode" in check:
            where += f" {check['mode']}"
        dev_key = (
            "max_state_deviation" if "max_state_deviation" in check else "max_deviation"
        )
        status = "pass" if check["passed"] else "FAIL"
        print(f"{label}{where} [{check['case']}]: {status} (dev {check[dev_key]:.3e})")

    if args.report:
        report_obj = {
            "version": trace.TRACE_VERSION,
            "grid": args.grid,
            "checks": checks,
            "all_passed": all_passed,
        }
        trace.write_lines(args.report, [trace.dumps(report_obj)])

    return EXIT_OK if all_passed else EXIT_VERIFY


# ---- distribution ------------------------------------------------------------


def cmd_distribution(args: argparse.Namespace) -> int:
    rng = trial_stream(args.seed)
    secret = SecretAmplitudes.random(args.d, rng)
    joint = prepare_joint(secret, args.n, cap=DEFAULT_SIZE_CAP)
    encoded, _ = encode(joint, args.n)
    targets = [0, args.n + 1]

    dist = outcome_distribution(encoded, targets)
    counts = sample_outcome_counts(encoded, targets, rng, args.samples)

    rows = ["outcome,exact_probability,empirical_frequency,z_score"]
    for idx, (l, m) in enumerate(product(range(args.d), repeat=2)):
        exact = dist.get((l, m), 0.0)
        if args.samples:
            freq = counts[idx] / args.samples
            sigma = np.sqrt(exact * (1.0 - exact) / args.samples)
            z = (freq - exact) / sigma if sigma > 0 else 0.0
            empirical = trace.format_float(float(freq))
            z_text = trace.format_float(float(z))
        else:
            empirical = ""
            z_text = ""
        rows.append(
            f"{l}-{m},{trace.format_float(exact)},{empirical},{z_text}"
        )

    if args.output:
        trace.write_lines(args.output, rows)
    else:
        for row in rows:
            print(row)
    return EXIT_OK


# ---- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quditsplit",
        description="Simulate and verify d-dimensional multiparty information splitting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute protocol trials")
    run_p.add_argument("--d", type=_dimension, required=True, help="qudit dimension (>= 2)")
    run_p.add_argument("--n", type=_at_least_one, required=True, help="number of share-holders")
    run_p.add_argument("--mode", choices=list(MODES), required=True)
    run_p.add_argument("--trials", type=_at_least_one, default=1)
    run_p.add_argument("--seed", type=_u64, default=0)
    run_p.add_argument(
        "--secret",
        help="comma-separated re,im pairs for the secret coefficients "
        "(default: a fresh random secret per trial)",
    )
    run_p.add_argument("--emit-trace", metavar="PATH", help="JSON-lines trace output")
    run_p.add_argument("--summary", metavar="PATH", help="CSV summary output")
    run_p.add_argument(
        "--cap",
        type=_at_least_one,
        default=DEFAULT_SIZE_CAP,
        help=f"amplitude-count cap (default {DEFAULT_SIZE_CAP})",
    )
    run_p.set_defaults(func=cmd_run)

    verify_p = sub.add_parser("verify", help="run the dense verification oracle")
    verify_p.add_argument(
        "--grid",
        default="d=2..4,n=1..3",
        help='sweep grid, e.g. "d=2..4,n=1..3"',
    )
    verify_p.add_argument("--report", metavar="PATH", help="JSON report output")
    verify_p.set_defaults(func=cmd_verify)

    dist_p = sub.add_parser(
        "distribution",
        help="empirical vs exact outcome table for the sender's measurement",
    )
    dist_p.add_argument("--d", type=_dimension, required=True)
    dist_p.add_argument("--n", type=_at_least_one, required=True)
    dist_p.add_argument("--samples", type=_nonnegative, default=10000)
    dist_p.add_argument("--seed", type=_u64, default=0)
    dist_p.add_argument("--output", metavar="PATH", help="CSV output (default stdout)")
    dist_p.set_defaults(func=cmd_distribution)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
