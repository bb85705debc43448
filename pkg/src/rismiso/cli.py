"""Command-line front end for the experiment runners.

Exit codes: 0 success, 1 configuration error, 2 validation-suite failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .config import EXPERIMENTS, ConfigError, apply_overrides, from_dict, load_file
from .experiments import run_experiment, sidecar_path, write_outputs

_HELP = {
    "nmse-sweep": "estimation error (closed form vs Monte-Carlo) across RIS sizes",
    "stat-vs-inst": "statistical phase design vs per-realization genie baseline",
    "power-scaling": "rate under shrinking transmit power vs the limit values",
    "validate": "theory-vs-oracle checks with pass/fail flags",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rismiso",
        description="RIS-aided uplink experiments: estimation quality, rate bounds, power scaling.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=_HELP[name])
        sp.add_argument("--config", type=Path, help="YAML config file")
        sp.add_argument("--seed", type=int, help="override scenario and Monte-Carlo seeds")
        sp.add_argument("--trials", type=int, help="override Monte-Carlo trial count")
        sp.add_argument("--parallelism", type=int, help="override Monte-Carlo worker count")
        sp.add_argument("--out", type=Path, help="output CSV path (default <experiment>.csv)")
        sp.add_argument("--sweep", metavar="VAR=V1,V2,...", help="override the sweep values")
        sp.add_argument("--print-config", action="store_true",
                        help="print the fully resolved configuration and exit")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = load_file(args.config) if args.config else {}
        data = apply_overrides(
            data, seed=args.seed, trials=args.trials, parallelism=args.parallelism,
            sweep=args.sweep, output=None if args.out is None else str(args.out))
        config = from_dict(data, experiment=args.experiment)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    if args.print_config:
        print(yaml.safe_dump(config.to_dict(), sort_keys=False), end="")
        return 0

    result = run_experiment(config)
    out_path = Path(config.output) if config.output else Path(f"{config.experiment}.csv")
    write_outputs(result, config, out_path)
    print(f"wrote {len(result.rows)} row(s) to {out_path} (+ {sidecar_path(out_path).name})")
    if config.experiment == "validate":
        for row in result.rows:
            flag = "pass" if row["passed"] else "FAIL"
            print(f"  {row['metric']:<24} closed={row['closed_form']:.6e} "
                  f"mc={row['monte_carlo']:.6e} rel_err={row['rel_err']:.3%} [{flag}]")
        if not result.passed:
            print("validation suite FAILED", file=sys.stderr)
            return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
