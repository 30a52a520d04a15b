"""Command-line experiment runner.

Subcommands: ``run`` executes one config and persists results;
``characterize`` emits a sweep CSV for one suite; ``validate`` checks a
config without executing; ``version`` prints the artifact version.
Config errors exit with status 2, runtime failures with 1.
"""

import argparse
import json
import sys
from dataclasses import replace

import pqrc
from pqrc.config import (
    ExperimentConfig,
    load_config,
    resolve_output_dir,
    resolved_dict,
)
from pqrc.errors import ConfigError
from pqrc.runner import SUITES, characterize, run_experiment, write_bundle, write_sweep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqrc",
        description="Photonic quantum reservoir computing simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("config", help="path to the experiment config (JSON)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the reservoir RNG seed")
        p.add_argument("--replicas", type=int, default=None,
                       help="override the Monte Carlo replica count")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for hyperopt trials")
        p.add_argument("--output-dir", default=None,
                       help="override the output directory "
                            "(also via PQRC_OUTPUT_DIR)")
        p.add_argument("--noiseless", action="store_true",
                       help="force exact probabilities (n_shot = inf)")

    run_p = sub.add_parser("run", help="run one experiment config")
    add_common(run_p)

    char_p = sub.add_parser("characterize", help="emit a sweep CSV")
    char_p.add_argument("suite", choices=SUITES)
    add_common(char_p)
    char_p.add_argument("--grid", default=None,
                        help="comma-separated sweep values "
                             "(e.g. '0,1,2,3' or '100,1000,inf')")

    val_p = sub.add_parser("validate", help="validate a config without running")
    val_p.add_argument("config")

    sub.add_parser("version", help="print the artifact version")
    return parser


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    reservoir = config.reservoir
    replicas = config.replicas
    notes = list(config.notes)
    if args.seed is not None:
        reservoir = replace(reservoir, seed=args.seed)
    if args.noiseless and reservoir.n_shot is not None:
        reservoir = replace(reservoir, n_shot=None)
        notes.append("n_shot forced to inf by --noiseless")
    if args.replicas is not None:
        if args.replicas < 1:
            raise ConfigError("--replicas must be >= 1")
        replicas = args.replicas
    if reservoir.n_shot is None and replicas > 1:
        notes.append(f"replicas reduced {replicas} -> 1: noiseless runs are identical")
        replicas = 1
    return replace(config, reservoir=reservoir, replicas=replicas,
                   notes=tuple(notes))


def _parse_grid(text: str | None):
    if text is None:
        return None
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token == "inf":
            values.append(None)
            continue
        try:
            values.append(int(token))
        except ValueError:
            try:
                values.append(float(token))
            except ValueError:
                values.append(token)
    if not values:
        raise ConfigError("--grid must contain at least one value")
    return values


def cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    outdir = resolve_output_dir(config, args.output_dir)
    bundle = run_experiment(config, jobs=args.jobs)
    written = write_bundle(bundle, outdir)
    for key, stats in bundle.aggregate.items():
        if isinstance(stats.get("median"), list):
            medians = ", ".join(f"{m:.4g}" for m in stats["median"])
            print(f"{key}: median=[{medians}]")
        else:
            print(f"{key}: median={stats['median']:.6g} std={stats['std']:.3g}")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_characterize(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    outdir = resolve_output_dir(config, args.output_dir)
    rows = characterize(config, args.suite, grid=_parse_grid(args.grid),
                        jobs=args.jobs)
    path = write_sweep(rows, outdir)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_validate(args) -> int:
    config = load_config(args.config)
    print(json.dumps(resolved_dict(config), indent=2, sort_keys=True))
    for note in config.notes:
        print(f"note: {note}")
    print("valid")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(f"pqrc {pqrc.__version__}")
        return 0
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "characterize":
            return cmd_characterize(args)
        return cmd_validate(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
