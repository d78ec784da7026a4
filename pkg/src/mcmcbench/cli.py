"""Command-line front end: single experiments and repeated-dataset sweeps."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import ExperimentConfig, repeated_datasets, run_experiment
from .models import FAMILY_OF


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file; explicit flags win")
    parser.add_argument("--model", help="model family (LM, LR, MM, AFT); optional check")
    parser.add_argument("--prior", help="prior tag, e.g. LM-C, LR-N, MM, AFT-NH")
    parser.add_argument("--n", type=int, help="sample size")
    parser.add_argument("--p", type=int, help="number of covariates")
    parser.add_argument("--H", type=int, help="mixture components (2 or 4)")
    parser.add_argument("--k", type=float, help="target censored fraction (AFT)")
    parser.add_argument("--covariates", choices=["continuous", "binary"])
    parser.add_argument("--zero-pattern", type=int, dest="zero_pattern",
                        help="number of trailing true-zero coefficients")
    parser.add_argument("--backends", help="comma-separated: gibbs,nuts,rwmh")
    parser.add_argument("--chains", type=int, help="parallel chains per backend")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--niter", type=int, dest="n_iter", help="override total iterations")
    parser.add_argument("--nburn", type=int, dest="n_burn", help="override burn-in")
    parser.add_argument("--nthin", type=int, dest="n_thin", help="override thinning")
    parser.add_argument("--max-workers", type=int, dest="max_workers")
    parser.add_argument("--format", choices=["csv", "json"], default=None,
                        help="report format when --out is set (default csv)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mcmcbench",
        description="Benchmark MCMC backends on simulated Bayesian models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="one dataset, all requested backends")
    _add_common(p_run)
    p_sweep = sub.add_parser("sweep", help="repeat over independently drawn datasets")
    _add_common(p_sweep)
    p_sweep.add_argument("--repeats", type=int, help="number of datasets")
    return parser


_CFG_FIELDS = (
    "prior", "n", "p", "H", "covariates", "zero_pattern", "k", "backends",
    "chains", "seed", "repeats", "out", "n_iter", "n_burn", "n_thin",
    "max_workers",
)


def _merge_config(args) -> ExperimentConfig:
    values = {}
    if args.config:
        values.update(json.loads(Path(args.config).read_text()))
    for name in _CFG_FIELDS:
        flag_val = getattr(args, name, None)
        if flag_val is not None:
            values[name] = flag_val
    unknown = set(values) - set(_CFG_FIELDS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "prior" not in values:
        raise ValueError("a prior tag is required (--prior or config file)")
    if args.model and FAMILY_OF.get(values["prior"]) != args.model:
        raise ValueError(
            f"--model {args.model} does not match prior {values['prior']}"
        )
    return ExperimentConfig(**values)


def _print_rows(rows, fmt):
    if fmt == "json":
        print(json.dumps(rows, indent=2, default=float))
        return
    from .harness import REPORT_COLUMNS

    print(",".join(REPORT_COLUMNS))
    for row in rows:
        print(",".join(str(row[c]) for c in REPORT_COLUMNS))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
        if args.command == "sweep":
            result = repeated_datasets(cfg)
            rows = result["rows"]
        else:
            reports = run_experiment(cfg)
            rows = [rep.row() for rep in reports.values()]
        _print_rows(rows, args.format or "csv")
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
