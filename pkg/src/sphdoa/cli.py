"""Command-line front end.

Three subcommands: `simulate` renders a seeded room scene to a
multichannel WAV, `estimate` runs the weighting pipeline on a WAV
and prints the source directions as JSON, and `bench` runs the
spacing sweep and writes a CSV or JSON report.

Exit codes: 0 on success, 1 for a malformed command line, 2 when the
work itself fails.
"""

import argparse
import json
import logging
import sys

import numpy as np

from .config import load_config, make_trial_config
from .geometry import vector_to_direction
from .pipeline import (
    estimate_sources,
    field_from_recording,
    normalize_scheme,
    run_benchmark,
    simulate_trial,
)
from .reports import emit_report
from .wavio import read_wav, write_wav

__all__ = ["main"]


def _scheme_arg(raw):
    try:
        return normalize_scheme(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _scheme_list(raw):
    names = [part for part in raw.split(",") if part.strip()]
    if not names:
        raise argparse.ArgumentTypeError("expected a comma-separated scheme list")
    return [_scheme_arg(part.strip()) for part in names]


def _float_list(raw):
    try:
        values = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number in {raw!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected a comma-separated number list")
    return values


def _report_path_arg(raw):
    from pathlib import Path

    if Path(raw).suffix.lower() not in (".csv", ".json"):
        raise argparse.ArgumentTypeError("--out must end in .csv or .json")
    return raw


def _band_arg(raw):
    parts = raw.replace(":", ",").split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {raw!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {raw!r}") from exc
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError("band bounds must satisfy 0 < LO < HI")
    return (lo, hi)


def _directions_json(vectors):
    dirs = []
    for v in vectors:
        az, inc = vector_to_direction(v)
        dirs.append(
            {
                "azimuth_deg": round(float(np.degrees(az)), 6),
                "inclination_deg": round(float(np.degrees(inc)), 6),
            }
        )
    dirs.sort(key=lambda d: (d["azimuth_deg"], d["inclination_deg"]))
    return dirs


def _trial_config_from(args, **extra):
    mapping = load_config(args.config) if args.config else {}
    return make_trial_config(mapping, **extra)


def _cmd_simulate(args):
    cfg = _trial_config_from(
        args,
        seed=args.seed,
        t60=args.t60,
        snr_db=args.snr_db,
        n_sources=args.sources,
        spacing_deg=args.spacing,
        duration=args.duration,
        rotation_deg=args.rotation,
    )
    mics, truth, _ = simulate_trial(cfg)
    write_wav(args.out, mics)
    payload = {
        "out": args.out,
        "n_channels": mics.n_channels,
        "n_samples": mics.n_samples,
        "sample_rate": mics.sample_rate,
        "sources": _directions_json(truth),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_estimate(args):
    mics = read_wav(args.infile)
    field = field_from_recording(mics, band=args.band)
    est = estimate_sources(
        field, args.scheme, args.sources, p_percent=args.p, seed=args.seed
    )
    payload = {
        "scheme": args.scheme,
        "n_sources": args.sources,
        "sources": _directions_json(est),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_bench(args):
    cfg = _trial_config_from(
        args,
        seed=args.seed,
        t60=args.t60,
        snr_db=args.snr_db,
        n_sources=args.sources,
    )
    report = run_benchmark(
        cfg, args.spacings, args.trials, args.schemes, threads=args.threads
    )
    emit_report(report, args.out)
    print(f"wrote {args.out}: {len(report.cells)} cells, "
          f"{report.trials} trials each", file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sphdoa",
        description="Multi-source DOA estimation from spherical arrays",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="render a room scene to a WAV file")
    sim.add_argument("--config", help="key = value config file")
    sim.add_argument("--out", required=True, help="output WAV path")
    sim.add_argument("--seed", type=int, help="override the scene seed")
    sim.add_argument("--t60", type=float, help="override the reverberation time [s]")
    sim.add_argument("--snr-db", type=float, help="override the sensor SNR [dB]")
    sim.add_argument("--sources", type=int, help="override the source count")
    sim.add_argument("--spacing", type=float, help="override the source spacing [deg]")
    sim.add_argument("--duration", type=float, help="override the scene length [s]")
    sim.add_argument("--rotation", type=float, help="fix the circle rotation [deg]")
    sim.set_defaults(func=_cmd_simulate)

    est = sub.add_parser("estimate", help="estimate source directions from a WAV file")
    est.add_argument("--in", dest="infile", required=True, help="input WAV path")
    est.add_argument(
        "--scheme", type=_scheme_arg, default="ec",
        help="weighting scheme: ec, ec1, ec2 or ec3",
    )
    est.add_argument("--sources", type=int, default=2, help="number of sources")
    est.add_argument("--p", type=float, default=5.0, help="top weight percentile")
    est.add_argument(
        "--band", type=_band_arg, default=(200.0, 4000.0),
        help="analysis band LO:HI in Hz",
    )
    est.add_argument("--seed", type=int, default=0, help="clustering seed")
    est.set_defaults(func=_cmd_estimate)

    ben = sub.add_parser("bench", help="run the spacing benchmark")
    ben.add_argument("--config", help="key = value config file")
    ben.add_argument(
        "--spacings", type=_float_list, default=[10.0, 30.0, 60.0, 90.0],
        help="comma-separated source spacings [deg]",
    )
    ben.add_argument("--trials", type=int, default=5, help="trials per spacing")
    ben.add_argument(
        "--schemes", type=_scheme_list, default=["ec", "ec1", "ec2", "ec3"],
        help="comma-separated scheme list",
    )
    ben.add_argument(
        "--out", required=True, type=_report_path_arg,
        help="output report path (.csv or .json)",
    )
    ben.add_argument("--seed", type=int, help="override the master seed")
    ben.add_argument("--t60", type=float, help="override the reverberation time [s]")
    ben.add_argument("--snr-db", type=float, help="override the sensor SNR [dB]")
    ben.add_argument("--sources", type=int, help="override the source count")
    ben.add_argument("--threads", type=int, help="worker pool size")
    ben.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None):
    logging.basicConfig(
        level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except Exception as exc:
        print(f"sphdoa: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
