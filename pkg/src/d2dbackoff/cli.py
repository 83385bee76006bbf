"""Command-line entry point.

    d2d-discovery analytic [--config FILE] [--mode coupled] [--eq15] ...
    d2d-discovery mc --seed 7 --seeds 100 --format json --out run.json
    d2d-discovery sweep --axis L_max --values 2,3,4,5 --engines analytic-coupled,mc
    d2d-discovery figure fig2 --out fig2.csv

Exit status: 0 on success, 1 for configuration or argument errors, 2 for
runtime failures.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .configfile import ConfigParseError, parse_config
from .core import ConfigError, SuccessMode
from .experiments import (
    ALL_ENGINES,
    AXIS_FIELDS,
    PRESETS,
    SERIES_PRESETS,
    Engine,
    SweepSpec,
    preset,
    run_engine,
    run_sweep,
)
from .output import emit, run_bundle, sweep_bundle, sweep_series_bundle

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

# flag -> ScenarioConfig field
_FIELD_FLAGS = {
    "total_ues": int,
    "resources": int,
    "dz_length": float,
    "dz_interval": float,
    "dz_count": int,
    "max_transmissions": int,
    "backoff_window": int,
    "processing_delay": float,
    "alpha": float,
    "beta": float,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value scenario file")
    for name, typ in _FIELD_FLAGS.items():
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, default=None)
    p.add_argument("--mode", choices=[m.value for m in SuccessMode], default=None,
                   help="collision thinning of the fluid model")
    p.add_argument("--eq15", dest="eq15_weighting", action=argparse.BooleanOptionalAction, default=None,
                   help="weight successes by P_S(l) = 1 - exp(-l)")
    p.add_argument("--seed", type=int, default=0, help="base seed for the mc engine")
    p.add_argument("--seeds", type=int, default=None, help="number of mc seeds")
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="d2d-discovery", description="Random-backoff D2D discovery engines")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analytic", help="fluid recursion, one row per DZ")
    _add_shared(p)

    p = sub.add_parser("mc", help="Monte Carlo, per-DZ means over seeds")
    _add_shared(p)

    p = sub.add_parser("sweep", help="one row per (point, engine)")
    _add_shared(p)
    p.add_argument("--axis", required=True, choices=sorted(AXIS_FIELDS))
    p.add_argument("--values", required=True, help="comma-separated integers")
    p.add_argument("--engines", default=",".join(e.value for e in ALL_ENGINES))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("figure", help="reproduce a figure's dataset")
    p.add_argument("name", choices=PRESETS)
    _add_shared(p)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _overrides(args) -> dict:
    out = {name: getattr(args, name) for name in _FIELD_FLAGS}
    out["success_mode"] = args.mode
    out["eq15_weighting"] = args.eq15_weighting
    return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--values must be comma-separated integers, got {text!r}") from None


def _engines(text: str) -> tuple[Engine, ...]:
    try:
        return tuple(Engine(e.strip()) for e in text.split(",") if e.strip())
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command == "figure":
            spec = preset(args.name)
            spec = replace(
                spec,
                base=parse_config(args.config, _overrides(args), base=spec.base),
                seed=args.seed,
                mc_seeds=args.seeds if args.seeds is not None else spec.mc_seeds,
            )
        else:
            config = parse_config(args.config, _overrides(args))
    except (UsageError, ConfigError, ConfigParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "analytic":
            engine = Engine.ANALYTIC_COUPLED if config.success_mode is SuccessMode.COUPLED else Engine.ANALYTIC_LITERAL
            bundle = run_bundle(run_engine(config, engine))
        elif args.command == "mc":
            n = args.seeds if args.seeds is not None else 1
            if n < 1:
                raise UsageError("--seeds must be ≥ 1")
            bundle = run_bundle(run_engine(config, Engine.MC, tuple(range(args.seed, args.seed + n))))
        elif args.command == "sweep":
            spec = SweepSpec(
                base=config,
                axis=(args.axis,),
                values=tuple((v,) for v in _int_list(args.values)),
                engines=_engines(args.engines),
                mc_seeds=args.seeds if args.seeds is not None else 20,
                seed=args.seed,
            )
            bundle = sweep_bundle(run_sweep(spec, workers=args.workers))
        else:
            result = run_sweep(spec, workers=args.workers)
            bundle = sweep_series_bundle(result) if spec.name in SERIES_PRESETS else sweep_bundle(result)
    except (UsageError, ConfigError, ConfigParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    try:
        if args.out is None:
            emit(bundle, args.format, sys.stdout)
        else:
            emit(bundle, args.format, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
