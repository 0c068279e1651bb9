"""
Command-line interface for the alphaeta lab.

One subcommand per experiment; every run writes its results and a manifest
into the output directory.
"""

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .config import SUBCOMMANDS, ExperimentConfig, load_config
from .errors import ConfigError, GuardViolation, NumericalError
from .presets import get_preset, list_presets
from .runner import RunResult, batch_run, run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_NUMERICAL = 4

_DESCRIPTIONS = {
    "constellation-dump": "Dump the 2M-point phase constellation",
    "keystream": "Expand a seed key into keystream symbols",
    "encrypt": "Encrypt the configured plaintext and show the angles",
    "bob-ber": "Monte Carlo bit-error rate of the keyed receiver",
    "gamma": "Analytic and empirical wedge ambiguity Gamma",
    "eve-co": "Ciphertext-only bit error of the eavesdropper",
    "eve-bruteforce": "Wedge-assisted exhaustive seed search",
    "eve-correlation": "Correlation (linear decoding) attack on the LFSR",
    "dsr-sweep": "Deliberate signal randomisation scaling sweep",
    "joint-srm": "Square-root measurement error of the joint attack",
}

_EXIT_CODES = {"GuardViolation": EXIT_GUARD, "NumericalError": EXIT_NUMERICAL}


def create_parser() -> argparse.ArgumentParser:
    """Create argument parser."""
    parser = argparse.ArgumentParser(
        prog="alphaeta-lab",
        description="alphaeta lab - simulator and attack lab for the alpha-eta coherent-state cipher",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Gamma at the published operating point
  alphaeta-lab gamma --preset paper_operating_point

  # Receiver calibration at S = 1 with a custom seed
  alphaeta-lab bob-ber --preset receiver_calibration --seed 7 --trials 100000

  # Correlation attack from a config file, one value overridden
  alphaeta-lab eve-correlation --config lab.ini --override system.S=100

  # Several experiments as one batch
  alphaeta-lab constellation-dump keystream encrypt --preset paper_keystream

  # List available presets
  alphaeta-lab --list-presets
        """,
    )

    parser.add_argument(
        "subcommands", nargs="*", metavar="SUBCOMMAND",
        help="Experiment(s) to run, several run as a batch: " + ", ".join(SUBCOMMANDS),
    )

    # Configuration
    parser.add_argument("--config", type=str, metavar="PATH", help="Config file (.ini/.cfg text or .json)")
    parser.add_argument(
        "--preset", type=str, help=f'Start from a preset (available: {", ".join(list_presets())})'
    )
    parser.add_argument("--list-presets", action="store_true", help="List all available presets")
    parser.add_argument(
        "--override", action="append", default=[], metavar="KEY=VALUE",
        help="Override a config value as section.key=value (repeatable)",
    )
    parser.add_argument("--save-config", type=str, metavar="PATH", help="Write the effective config and exit")

    # Run options
    parser.add_argument("--seed", type=int, metavar="U64", help="Master seed (default: 0)")
    parser.add_argument("--trials", type=int, metavar="N", help="Monte Carlo trials")
    parser.add_argument("--out", type=str, metavar="DIR", help="Output directory (default: ./results)")
    parser.add_argument("--format", type=str, choices=["csv", "json"], help="Result format (default: csv)")
    parser.add_argument("--workers", type=int, help="Worker threads for Monte Carlo chunks")
    parser.add_argument(
        "--allow-override", action="store_true", help="Run above the desk-scale size guards"
    )

    # Misc
    parser.add_argument("-v", "--verbose", action="store_true", help="Verbose output")
    parser.add_argument("--version", action="version", version=f"alphaeta-lab v{__version__}")

    return parser


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Assemble the configuration: preset or file, then flags, then overrides.

    Raises:
        ConfigError: On unknown presets or invalid values
    """
    if args.config and args.preset:
        raise ConfigError("--config and --preset are mutually exclusive")
    if args.preset:
        try:
            config = get_preset(args.preset)
        except KeyError as e:
            raise ConfigError(e.args[0]) from e
    elif args.config:
        config = load_config(args.config)
    else:
        config = ExperimentConfig()

    flags = []
    if args.seed is not None:
        flags.append(f"run.master_seed={args.seed}")
    if args.trials is not None:
        flags.append(f"run.trials={args.trials}")
    if args.out:
        flags.append(f"run.output_dir={args.out}")
    if args.format:
        flags.append(f"run.output_format={args.format}")
    if args.workers is not None:
        flags.append(f"run.workers={args.workers}")
    if args.allow_override:
        flags.append("attack.allow_override=true")
    return config.apply_overrides(flags + list(args.override))


def print_summary(result: RunResult, output_dir: str) -> None:
    print("\n" + "=" * 60)
    print(f"{result.subcommand} complete!")
    print("=" * 60)
    for row in result.rows[:12]:
        print("  " + ", ".join(f"{k}={v}" for k, v in zip(result.header, row)))
    if len(result.rows) > 12:
        print(f"  ... {len(result.rows) - 12} more rows")
    print(f"  Output:  {output_dir}")
    for name in result.files:
        print(f"    - {name}")
    print("=" * 60)
    if result.notes:
        print("\nNotes:")
        for note in result.notes:
            print(f"  ! {note}")


def print_batch_summary(results: dict, output_dir: str) -> None:
    print("\n" + "=" * 60)
    print("Batch complete!")
    print("=" * 60)
    print(f"  Total:   {results['total']}")
    print(f"  Success: {results['success']}")
    print(f"  Failed:  {results['failed']}")
    print(f"  Output:  {output_dir}")
    print("=" * 60)
    if results["failed"] > 0:
        print("\nErrors:")
        for result in results["results"]:
            if not result["success"]:
                print(f"  ✗ {result['subcommand']}: {result['error']}")


def main(argv: Optional[List[str]] = None) -> None:
    """Main CLI entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)
    unknown = [name for name in args.subcommands if name not in SUBCOMMANDS]
    if unknown:
        parser.error(f"unknown subcommand(s) {', '.join(unknown)}; choose from {', '.join(SUBCOMMANDS)}")

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    # Handle list commands
    if args.list_presets:
        print("Available presets:")
        for preset in list_presets():
            print(f"  - {preset}")
        sys.exit(EXIT_OK)

    try:
        config = build_config(args)
        if args.save_config:
            if args.save_config.lower().endswith(".json"):
                config.to_json_file(args.save_config)
            else:
                config.to_ini_file(args.save_config)
            print(f"Configuration saved as: {args.save_config}")
            sys.exit(EXIT_OK)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)
    except OSError as e:
        print(f"Error: cannot write config: {e}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)

    # Require a subcommand
    if not args.subcommands:
        parser.print_help()
        sys.exit(EXIT_CONFIG)

    if args.verbose:
        for name in args.subcommands:
            print(f"\n{_DESCRIPTIONS[name]}")
        print(f"  System: M = {config.system.M}, S = {config.system.S:g}")
        print(f"  Master seed: {config.run.master_seed}")
        print(f"  Output directory: {config.run.output_dir}\n")

    def progress_callback(current, total, label):
        print(f"  [{current}/{total}] {label}")

    if len(args.subcommands) > 1:
        results = batch_run(
            args.subcommands,
            config,
            progress_callback=progress_callback if args.verbose else None,
        )
        print_batch_summary(results, config.run.output_dir)
        failures = [r for r in results["results"] if not r["success"]]
        sys.exit(_EXIT_CODES.get(failures[0]["error_type"], EXIT_CONFIG) if failures else EXIT_OK)

    try:
        result = run(
            args.subcommands[0],
            config,
            progress_callback=progress_callback if args.verbose else None,
        )
    except GuardViolation as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_GUARD)
    except NumericalError as e:
        print(f"Error: {e}", file=sys.stderr)
        for key, value in e.diagnostics.items():
            print(f"  {key}: {value}", file=sys.stderr)
        sys.exit(EXIT_NUMERICAL)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)
    except OSError as e:
        print(f"Error: cannot write results: {e}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)

    print_summary(result, config.run.output_dir)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
