"""Command-line front end.

Subcommands::

    thermospec sweep CONFIG      run the configured temperature sweep
    thermospec point CONFIG --temp K
                                 run a single temperature point
    thermospec calibrate CONFIG  detector sensitivity from saturated records
    thermospec oracle CONFIG --temp K
                                 emit the closed-form spectrum only
    thermospec selftest          run the built-in invariant checks

CONFIG is a JSON file (see README for the schema); missing keys fall back to
the defaults.  Exit status is nonzero when any fit fails, unless
``--keep-going`` is given.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import selftest as selftest_mod
from .calibration import estimate_delta_v, simulate_saturated_records
from .pipeline import (
    STATUS_OK,
    TWO_LEVEL_VALIDITY_MAX_K,
    ExperimentConfig,
    emit_figure_data,
    run_point,
    run_sweep,
    write_point_outputs,
)
from .readout import synthesize_off
from .seeding import ROLE_SATURATION, spawn_rng
from .spectra import analytic_spectrum
from .thermal import QubitRates, effective_photon_number


def _load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config)
    if getattr(args, "seed", None) is not None:
        config = replace(config, master_seed=args.seed)
    if getattr(args, "averages", None) is not None:
        config = replace(config, n_averages=args.averages)
    return config


def _warn_two_level(temperatures) -> None:
    hot = [t for t in temperatures if t > TWO_LEVEL_VALIDITY_MAX_K]
    if hot:
        print(
            f"warning: {len(hot)} temperature(s) above "
            f"{TWO_LEVEL_VALIDITY_MAX_K * 1e3:.0f} mK; the two-level treatment "
            "degrades there (higher qubit levels start to populate)",
            file=sys.stderr,
        )


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    _warn_two_level(config.temperatures)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep = run_sweep(config, workers=args.workers, replicate=args.replicate)
    sweep.to_csv(out_dir / "sweep.csv")
    emit_figure_data(sweep, out_dir)
    for point in sweep.points:
        write_point_outputs(point, out_dir / "points")
    failures = [p for p in sweep.points if p.status != STATUS_OK]
    for p in failures:
        print(
            f"point T={p.temperature * 1e3:g} mK replica {p.replica}: {p.status}",
            file=sys.stderr,
        )
    print(f"wrote sweep of {len(sweep.points)} point(s) to {out_dir}")
    return 0 if (args.keep_going or not failures) else 1


def _cmd_point(args) -> int:
    config = _load_config(args)
    _warn_two_level([args.temp])
    out_dir = Path(args.out_dir)
    point = run_point(config, args.temp)
    write_point_outputs(point, out_dir)
    print(json.dumps(point.row, default=str, indent=1))
    if point.status != STATUS_OK:
        print(f"fit status: {point.status}", file=sys.stderr)
        return 0 if args.keep_going else 1
    return 0


def _cmd_calibrate(args) -> int:
    config = _load_config(args)
    n = args.samples
    sat = simulate_saturated_records(
        config.detector,
        n,
        seed=np.random.SeedSequence((config.master_seed, ROLE_SATURATION, 0)),
        sample_rate=config.sample_rate,
    )
    off = synthesize_off(
        n,
        config.detector,
        seed=np.random.SeedSequence((config.master_seed, ROLE_SATURATION, 1)),
        sample_rate=config.sample_rate,
    )
    result = estimate_delta_v(sat, off)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "calibration.json"
    path.write_text(json.dumps(result.to_dict(), indent=1) + "\n")
    print(
        f"dV/2 = {result.delta_v_half * 1e3:.4f} mV "
        f"+/- {result.statistical_uncertainty * 1e3:.4f} mV "
        f"({result.n_samples} samples) -> {path}"
    )
    return 0


def _cmd_oracle(args) -> int:
    config = _load_config(args)
    env = config.environment.at_base_temperature(args.temp)
    rates = QubitRates(config.gamma_intrinsic, effective_photon_number(env))
    n_bins = config.segment_length // 2 + 1
    freqs = np.arange(n_bins) * (config.sample_rate / config.segment_length)
    spectrum = analytic_spectrum(rates, config.detector, freqs)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"oracle_T{args.temp * 1e3:07.2f}mK.csv"
    spectrum.to_csv(path)
    print(f"wrote {path}")
    return 0


def _cmd_selftest(args) -> int:
    return selftest_mod.run(seed=args.seed if args.seed is not None else 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermospec",
        description="Telegraph-noise spectroscopy of a thermally excited two-level system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument("--out-dir", default="out", help="output directory")

    p = sub.add_parser("sweep", help="run the configured temperature sweep")
    add_common(p)
    p.add_argument("--averages", type=int, default=None, help="override n_averages")
    p.add_argument("--workers", type=int, default=1, help="parallel point workers")
    p.add_argument("--replicate", action="store_true", help="rerun each point on a derived seed")
    p.add_argument("--keep-going", action="store_true", help="exit 0 even if fits fail")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("point", help="run one temperature point")
    add_common(p)
    p.add_argument("--temp", type=float, required=True, help="base temperature in K")
    p.add_argument("--averages", type=int, default=None, help="override n_averages")
    p.add_argument("--keep-going", action="store_true", help="exit 0 even if the fit fails")
    p.set_defaults(func=_cmd_point)

    p = sub.add_parser("calibrate", help="detector sensitivity from saturated records")
    add_common(p)
    p.add_argument("--samples", type=int, default=10_000_000, help="samples per record")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("oracle", help="emit the closed-form spectrum only")
    add_common(p)
    p.add_argument("--temp", type=float, required=True, help="base temperature in K")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.add_argument("--seed", type=int, default=None, help="seed for the stochastic checks")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
