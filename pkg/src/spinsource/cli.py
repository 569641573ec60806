"""Command line front end for config-driven runs.

    spinsource CONFIG.json [MORE.json ...] [--output-dir DIR]
               [--seed N] [--n-max N] [--backend B] [--jobs J] [-v]

Each config produces a structured JSON report and a decay CSV next to
it (see runner module for the schema).  Exit code: 0 when every
selected check and test verdict of every config is pass, 1 when any is
not, 2 on config errors, 3 when a resource cap was hit.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor

from .errors import CapExceededError, ConfigError
from .runner import run_config_file

EXIT_PASS = 0
EXIT_VERDICT_FAIL = 1
EXIT_CONFIG_ERROR = 2
EXIT_CAP_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsource",
        description="Run spin-chain source experiments from JSON configs.",
    )
    parser.add_argument("configs", nargs="+", metavar="CONFIG", help="config JSON file")
    parser.add_argument("--output-dir", help="override every config's output directory")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--n-max", type=int, dest="n_max", help="override the shift horizon")
    parser.add_argument(
        "--backend", choices=["auto", "dense", "transfer"], help="override the backend"
    )
    parser.add_argument(
        "--jobs", type=int, default=1, help="run up to J configs concurrently"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="per-pair verdicts")
    return parser


def _run_one(path: str, overrides: dict) -> tuple:
    try:
        report, written = run_config_file(path, overrides)
    except ConfigError as exc:
        return EXIT_CONFIG_ERROR, None, [], f"config error: {exc}"
    except CapExceededError as exc:
        return EXIT_CAP_ERROR, None, [], f"resource cap: {exc}"
    code = EXIT_PASS if report.passed else EXIT_VERDICT_FAIL
    return code, report, written, None


def _print_result(path: str, code: int, report, written, error, verbose: bool) -> None:
    if error is not None:
        print(f"{path}: {error}", file=sys.stderr)
        return
    status = "pass" if code == EXIT_PASS else "FAIL"
    files = ", ".join(str(p) for p in written)
    print(f"{path}: {status} ({len(report.failures)} failures) -> {files}")
    if report.failures and not verbose:
        for f in report.failures[:5]:
            print(f"  {f}")
        if len(report.failures) > 5:
            print(f"  ... {len(report.failures) - 5} more in the report")
    if verbose:
        for name, check in report.checks.items():
            print(
                f"  check {name}: {'pass' if check.passed else 'FAIL'} "
                f"(worst {check.worst_deviation:.3e} at m,i={check.worst_pair})"
            )
        if report.sweep is not None:
            for pair in report.sweep.pairs:
                verdicts = ", ".join(
                    f"{r.test}={r.verdict}" for r in pair.reports
                )
                print(f"  pair {pair.label}: {verdicts}")
        if report.classification is not None:
            print(f"  oracle verdicts: {report.classification.verdicts}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: getattr(args, key)
        for key in ("seed", "n_max", "backend", "output_dir")
        if getattr(args, key) is not None
    }
    jobs = max(1, args.jobs)
    if jobs == 1 or len(args.configs) == 1:
        results = [_run_one(path, overrides) for path in args.configs]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda p: _run_one(p, overrides), args.configs))
    worst = EXIT_PASS
    for path, (code, report, written, error) in zip(args.configs, results):
        _print_result(path, code, report, written, error, args.verbose)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
