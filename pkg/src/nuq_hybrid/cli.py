"""Command-line frontend: codebook construction, single-shot design, sweeps and figure presets.

Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import harness
from .channel import SpatialLobeProfile
from .codebooks import build_nuq_codebook_full, build_nuq_codebook_sub
from .errors import InvalidArgument, InvalidConfiguration, InvalidProfile
from .harness import Axis, ScenarioConfig, Scheme
from .metrics import LinkBudget, spectral_efficiency
from .presets import FIGURES, figure_curves

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2
_CONFIG_ERRORS = (InvalidConfiguration, InvalidProfile, InvalidArgument)


class _ConfigError(Exception):
    pass


def parse_angle(text: str) -> float:
    """Radians from a number or a simple multiple of pi: ``pi``, ``pi/2``, ``3*pi/4``, ``0.5pi``."""
    s = text.strip().lower().replace(" ", "")
    m = re.fullmatch(r"([0-9.eE+-]*)\*?pi(?:/([0-9.eE+-]+))?", s)
    try:
        if m:
            head = m.group(1)
            coef = {"": 1.0, "+": 1.0, "-": -1.0}.get(head)
            coef = float(head) if coef is None else coef
            return coef * np.pi / (float(m.group(2)) if m.group(2) else 1.0)
        return float(s)
    except ValueError:
        raise _ConfigError(f"cannot parse angle {text!r}") from None


def _parse_list(text: str, conv=float) -> list:
    try:
        return [conv(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise _ConfigError(f"cannot parse list {text!r}") from None


def _override_value(key: str, raw: str):
    fields = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
    if key not in fields:
        raise _ConfigError(f"unknown override key {key!r}; valid keys: {', '.join(fields)}")
    if key == "snr_grid_db":
        return tuple(_parse_list(raw))
    if key == "schemes":
        return tuple(_parse_list(raw, str))
    if key == "quant_range_policy":
        return raw if raw == harness.HALF_RANGE else tuple(parse_angle(v) for v in raw.split(","))
    try:
        return int(raw)
    except ValueError:
        raise _ConfigError(f"override {key} expects an integer, got {raw!r}") from None


def _default_seed():
    env = os.environ.get("MMW_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise _ConfigError(f"MMW_SEED must be an integer, got {env!r}") from None


def load_config(args, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Base config (preset or default), then --config file, then --set, --seed and --trials."""
    config = base or ScenarioConfig()
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise _ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise _ConfigError("config file must hold a JSON object")
        merged = config.to_dict()
        merged.update(loaded)
        config = ScenarioConfig.from_dict(merged)
    changes = {}
    for item in getattr(args, "set", None) or ():
        key, sep, raw = item.partition("=")
        if not sep:
            raise _ConfigError(f"--set expects key=value, got {item!r}")
        changes[key.strip()] = _override_value(key.strip(), raw.strip())
    seed = args.seed if getattr(args, "seed", None) is not None else _default_seed()
    if seed is not None:
        changes["seed"] = seed
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    if changes:
        merged = config.to_dict()
        merged.update(changes)
        config = ScenarioConfig.from_dict(merged)
    return config


def _profile_from_args(args) -> SpatialLobeProfile:
    ranges = None if args.ranges is None else [parse_angle(r) for r in args.ranges.split(",")]
    return SpatialLobeProfile.default(args.lobes, args.subpaths, parse_angle(args.offset), quant_ranges=ranges)


def cmd_codebook(args) -> int:
    profile = _profile_from_args(args)
    if args.structure == "full":
        cb_t, cb_r = build_nuq_codebook_full(args.nt, args.nr, args.bits, profile)
    else:
        if args.nrf is None:
            raise _ConfigError("--nrf is required for the sub-connected structure")
        cb_t, cb_r = build_nuq_codebook_sub(args.nt, args.nr, args.nrf, args.bits, profile)
    print(f"M={cb_t.size} bits_per_index={cb_t.bits_per_index}")
    print("lobe_grid_lengths=" + ",".join(str(len(g)) for g in cb_t.lobes))
    if args.out:
        doc = {"transmit": cb_t.to_dict(), "receive": cb_r.to_dict(),
               "profile": dataclasses.asdict(profile), "bits": args.bits}
        Path(args.out).write_text(json.dumps(doc) + "\n")
    return EXIT_OK


def cmd_design(args) -> int:
    config = load_config(args)
    if args.structure == "sub":
        config = dataclasses.replace(config, schemes=(Scheme.NUQ_SUB,))
    elif args.scheme:
        config = dataclasses.replace(config, schemes=(Scheme(args.scheme),))
    config.validate()
    profile, channel = harness.draw_realization(config, args.trial)
    report = {"seed": config.seed, "trial": args.trial, "lobe_offset": profile.offset, "schemes": {}}
    for scheme in config.schemes:
        pre = harness.design(config, scheme, channel)
        entry = {
            "tx_indices": list(pre.selected_tx_indices),
            "rx_indices": list(pre.selected_rx_indices),
            "feedback_bits": harness.scheme_feedback_bits(config, scheme),
            "power": pre.transmit_power,
            "se": {f"{s:g}": spectral_efficiency(channel.H, pre, LinkBudget(s, config.n_s))
                   for s in config.snr_grid_db},
        }
        report["schemes"][scheme.value] = entry
        print(f"{scheme.value}: tx_indices={entry['tx_indices']} rx_indices={entry['rx_indices']} "
              f"feedback_bits={entry['feedback_bits']} power={entry['power']:.12g}")
        print("  se " + " ".join(f"{k}dB={v:.6g}" for k, v in entry["se"].items()))
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=1) + "\n")
    return EXIT_OK


def _write(records, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix == ".json":
        harness.write_results_json(records, out)
    else:
        harness.write_results(records, out)


def cmd_sweep(args) -> int:
    config = load_config(args)
    axis = Axis(args.axis)
    values = _parse_list(args.values) if args.values else list(config.snr_grid_db)
    if axis is not Axis.SNR:
        bad = [v for v in values if v != int(v)]
        if bad:
            raise _ConfigError(f"axis {axis.value} takes integer values, got {bad}")
    records = harness.sweep(config, axis, values, workers=args.workers)
    if args.out:
        _write(records, Path(args.out))
        print(f"wrote {len(records)} records to {args.out}")
    else:
        harness.write_csv(records, sys.stdout)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.figure not in FIGURES:
        raise _ConfigError(f"unknown figure id {args.figure!r}; valid ids: {', '.join(FIGURES)}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for curve in figure_curves(args.figure):
        config = load_config(args, base=curve.config)
        values = curve.values if curve.axis is not Axis.SNR else config.snr_grid_db
        records = harness.sweep(config, curve.axis, values, workers=args.workers)
        path = out_dir / f"{curve.name}.csv"
        harness.write_results(records, path)
        print(f"{path} ({len(records)} rows)")
    return EXIT_OK


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON scenario file (ScenarioConfig field names)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one scenario field")
    p.add_argument("--seed", type=int, help="root seed (default: $MMW_SEED, else the config's)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nuq-hybrid", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("codebook", help="build NUQ codebooks for one lobe profile")
    p.add_argument("--structure", choices=("full", "sub"), default="full")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--lobes", type=int, required=True)
    p.add_argument("--subpaths", type=int, default=1)
    p.add_argument("--nt", type=int, required=True)
    p.add_argument("--nr", type=int, required=True)
    p.add_argument("--nrf", type=int)
    p.add_argument("--offset", default="0", help="lobe rotation, radians or multiple of pi")
    p.add_argument("--ranges", help="comma-separated quantized ranges (default: the lobe spreads)")
    p.add_argument("--out", help="codebook JSON output path")
    p.set_defaults(func=cmd_codebook)

    p = sub.add_parser("design", help="design precoders for one seeded channel realization")
    _add_config_flags(p)
    p.add_argument("--structure", choices=("full", "sub"), default="full")
    p.add_argument("--scheme", choices=[s.value for s in Scheme])
    p.add_argument("--trial", type=int, default=0, help="which realization of the seed's stream")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("sweep", help="Monte Carlo sweep along one axis")
    _add_config_flags(p)
    p.add_argument("--axis", choices=[a.value for a in Axis], default=Axis.SNR.value)
    p.add_argument("--values", help="comma-separated axis values (default: the SNR grid)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV (or .json) output path; stdout if omitted")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="run a figure preset, one CSV per curve",
                       description="SNR axes default to -10..10 dB in 2 dB steps; RF-chain, antenna "
                                   "and bit sweeps run at 0 dB.")
    p.add_argument("figure", help="one of: " + ", ".join(FIGURES))
    _add_config_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default="results")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (_ConfigError, *_CONFIG_ERRORS) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
