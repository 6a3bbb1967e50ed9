"""Command-line runner.

    lmduality run --scenario NAME [--config PATH] [--out DIR] [--seed N] [--<knob> VALUE ...]
    lmduality --list-scenarios

Exit status: 0 all checks pass, 1 invalid configuration, 2 I/O failure,
3 at least one property check failed.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import artifacts, kernels, scenarios
from .config import ALL, KNOBS, SCENARIOS, ScenarioConfig, help_table, parse_config
from .errors import ConfigError, LMDualityError

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_FAILED = 0, 1, 2, 3

log = logging.getLogger("lmduality")


def run(config: ScenarioConfig) -> int:
    """Run every scenario selected by ``config``; write artifacts and ``summary.json``.

    Returns the exit status; I/O errors propagate as ``OSError``.
    """
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    ctx = scenarios.Context(config, out)
    with scenarios.track_calls() as counts:
        for name in config.scenarios:
            ctx.scenario = name
            log.info("running %s", name)
            scenarios.RUNNERS[name](ctx)

    coverage = {op: counts.get(op, 0) > 0 for op in scenarios.tracked_op_names()}
    coverage["cli.parse_config"] = True
    coverage["cli.run"] = True
    passed = all(c.passed for c in ctx.checks)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "scenario": config.scenario,
        "seed": config.seed,
        "prng": "numpy PCG64, SeedSequence(seed, spawn_key=(scenario_index,))",
        "backend": kernels.BACKEND,
        "params": {"m": config.params.m, "g": config.params.g, "k": config.params.k, "hbar": config.params.hbar},
        "knobs": {k: v for k, v in config.knobs.items() if k != "out"},
        "checks": [c.as_dict() for c in ctx.checks],
        "artifacts": sorted(ctx.artifacts),
        "coverage": coverage,
        "coverage_complete": all(coverage.values()) if config.scenario == ALL else None,
        "passed": passed,
    }
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        artifacts.write_json(summary, fh)
    for c in ctx.checks:
        if not c.passed:
            log.error("FAILED %s/%s: %r %s %r", c.scenario, c.name, c.value, c.relation, c.tolerance)
    return EXIT_OK if passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmduality",
        description="Landau model / chiral oscillator duality experiments.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="scenarios: " + ", ".join(SCENARIOS + (ALL,)) + "\n\n" + help_table(),
    )
    parser.add_argument("--list-scenarios", action="store_true", help="print scenario names and exit")
    sub = parser.add_subparsers(dest="command")
    runp = sub.add_parser(
        "run",
        help="run a scenario",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=help_table(),
    )
    runp.add_argument("--config", type=Path, help="flat key = value config file")
    runp.add_argument("-v", "--verbose", action="store_true")
    for knob in KNOBS:
        runp.add_argument("--" + knob.name.replace("_", "-"), dest=knob.name, default=None, metavar="VALUE",
                          help=f"{knob.help}")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_scenarios:
        print("\n".join(SCENARIOS + (ALL,)))
        return EXIT_OK
    if args.command != "run":
        parser.print_help()
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {k.name: getattr(args, k.name) for k in KNOBS}
    try:
        config = parse_config(args.config, overrides)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc, ConfigError) else EXIT_IO
    try:
        status = run(config)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except LMDualityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{config.scenario}: {'PASS' if status == EXIT_OK else 'FAIL'} -> {config.out / 'summary.json'}")
    return status


if __name__ == "__main__":
    sys.exit(main())
