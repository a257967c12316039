"""Command-line entry point: ``blidkit <suite> [options]``.

Every subcommand runs its verification suite, prints one line per case,
writes ``<suite>_report.json``, ``<suite>_cases.csv`` and the plot-series CSVs
to the output directory, and exits 0 exactly when every case passes.
Configuration errors exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bump import BumpFunction
from .config import BLID_CHOICES, ConfigError, SuiteConfig, load_config
from .extension import extend, make_germ
from .function_space import element_from_json
from .report import Report, dumps, to_plain
from .suites import make_blid, run_suite

__all__ = ["main", "build_parser", "resolve_config"]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML configuration file")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--out", type=Path, help="output directory for reports")
    common.add_argument("--workers", type=int, help="cases run concurrently")
    common.add_argument("-q", "--quiet", action="store_true", help="only print the summary")

    parser = argparse.ArgumentParser(prog="blidkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="suite", required=True)
    sub.add_parser("verify-blid", parents=[common], help="blid certificates")
    sub.add_parser("borel", parents=[common], help="Borel jet realization")
    sub.add_parser("all", parents=[common], help="every suite in one report")

    p = sub.add_parser("extend", parents=[common], help="global representatives of germs")
    p.add_argument("--germ", help="germ catalog name")
    p.add_argument("--blid", choices=BLID_CHOICES, help="blid used for the extension")
    p.add_argument("--input", type=Path, help="element JSON to evaluate F at")
    p.add_argument("--output", type=Path,
                   help="where to write F(input) (default: <out>/extend_value.json)")

    p = sub.add_parser("cohomology", parents=[common], help="cohomological equation")
    p.add_argument("--matrix", type=Path, help="JSON file holding A")
    p.add_argument("--jets", type=Path, help="JSON jet sequence of f")
    p.add_argument("--order", type=int, help="truncation order m")

    p = sub.add_parser("linearize-cutoff", parents=[common], help="cutoff of a nonlinearity")
    p.add_argument("--map", dest="map_name", help="map catalog name")
    p.add_argument("--delta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--epsilon", type=float)
    return parser


def resolve_config(args: argparse.Namespace) -> SuiteConfig:
    cfg = load_config(args.config)
    overrides = {"suite": args.suite, "seed": args.seed, "workers": args.workers,
                 "output_dir": None if args.out is None else str(args.out)}
    if args.suite == "extend":
        overrides.update({"extend.germ": args.germ, "extend.blid": args.blid})
    elif args.suite == "cohomology":
        overrides.update({"cohomology.matrix": None if args.matrix is None else str(args.matrix),
                          "cohomology.jets": None if args.jets is None else str(args.jets),
                          "cohomology.order": args.order})
    elif args.suite == "linearize-cutoff":
        overrides.update({"linearize.map": args.map_name, "linearize.delta": args.delta,
                          "linearize.alpha": args.alpha, "linearize.epsilon": args.epsilon})
    return cfg.with_overrides(**overrides)


def _print_report(report: Report, quiet: bool) -> None:
    if not quiet:
        for c in report.cases:
            obs = to_plain(c.observed)
            bound = to_plain(c.bound)
            line = f"{c.status.upper():5s} {c.case_id}: {obs} {c.relation} {bound}"
            if c.detail:
                line += f"  ({c.detail})"
            print(line)
    n_pass = sum(c.passed for c in report.cases)
    print(f"{report.suite}: {n_pass}/{len(report.cases)} cases pass")


def _suite_extras(report: Report, cfg: SuiteConfig, args, out: Path) -> None:
    """Per-subcommand side outputs named by the external interface."""
    if args.suite == "extend":
        details = {k: v for d in report.details.values() for k, v in d.items()}
        (out / "extend_checks.json").write_text(dumps(details))
        if args.input is not None:
            F = extend(make_germ(cfg.extend["germ"]),
                       make_blid(cfg.extend["blid"], _bump(cfg)))
            value = np.atleast_1d(F(element_from_json(args.input)))
            text = dumps({"germ": cfg.extend["germ"], "blid": cfg.extend["blid"],
                          "value": value})
            (args.output or out / "extend_value.json").write_text(text)
    elif args.suite == "cohomology":
        solution = report.details.get("cohomology.solve", {}).get("solution", {})
        (out / "cohomology_solution.json").write_text(dumps(solution))
    elif args.suite == "linearize-cutoff":
        rep = report.details.get("linearize", {}).get("cutoff_bounds", {})
        (out / "linearize-cutoff_bounds.json").write_text(dumps(rep))


def _bump(cfg: SuiteConfig) -> BumpFunction:
    return BumpFunction(cfg.bump["r_inner"], cfg.bump["r_outer"])


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = run_suite(cfg)
    out = Path(cfg.output_dir)
    try:
        report.write(out)
        _suite_extras(report, cfg, args, out)
    except OSError as exc:
        print(f"cannot write reports to {out}: {exc}", file=sys.stderr)
        return 2
    _print_report(report, args.quiet)
    return report.exit_status


if __name__ == "__main__":
    raise SystemExit(main())
