"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, report, runner
from .errors import FMCWError
from .pipeline import PipelineOptions, default_dc_removal, run_pipeline
from .profiles import ProfileId, derive_chirp_params, make_profile
from .recfile import read_recording, write_recording
from .scenario import load_scenario, resolve_scenario, shipped_scenarios
from .vitals import sliding_estimates

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for data errors here.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def cmd_profile_show(args):
    try:
        profile = make_profile(args.id)
    except ValueError:
        names = ", ".join(p.value for p in ProfileId if p != ProfileId.CUSTOM)
        raise UsageError(f"unknown profile '{args.id}' (choose from {names})") from None
    d = derive_chirp_params(profile)
    rows = [
        ("profile", profile.id.value),
        ("start frequency", f"{profile.f_start / 1e9:g} GHz"),
        ("end frequency", f"{profile.f_end / 1e9:g} GHz"),
        ("bandwidth", f"{d.bandwidth / 1e9:g} GHz"),
        ("sample rate", f"{profile.sample_rate / 1e6:g} MHz"),
        ("samples per chirp", str(profile.samples_per_chirp)),
        ("chirp duration", f"{d.chirp_duration * 1e6:g} us"),
        ("chirp interval", f"{profile.chirp_interval * 1e3:g} ms"),
        ("slope", f"{d.slope:.6g} Hz/s"),
        ("range bin", f"{d.range_bin * 100:g} cm"),
        ("max range", f"{d.max_range:g} m"),
        ("usable range", f"{d.usable_range:g} m"),
        ("wavelength", f"{d.wavelength * 1e3:.6g} mm"),
        ("slow-time rate", f"{d.slow_time_rate:g} Hz"),
    ]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k.ljust(width)}  {v}")
    return EXIT_OK


def cmd_simulate(args):
    cfg = load_scenario(resolve_scenario(args.scenario))
    if args.seed is not None:
        cfg.values.setdefault("run", {})["seed"] = args.seed
    profile = make_profile(args.profile) if args.profile else None
    rec = runner.simulate(cfg, profile)
    write_recording(rec, args.output)
    print(f"wrote {rec.n_chirps} chirps x {rec.profile.samples_per_chirp} samples "
          f"({rec.profile.id.value}) to {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args):
    pad = None if args.pad_cm is None else args.pad_cm / 100
    if pad is not None and pad <= 0:
        raise UsageError("--pad-cm must be positive")
    rec = read_recording(args.recording)
    dc = False if args.no_dc_removal else default_dc_removal(rec.profile)
    rng, trace = run_pipeline(rec, PipelineOptions(pad, dc))
    report.write_series_csv({"time_s": trace.times + rec.t0,
                             "displacement_m": trace.samples}, args.output)
    print(f"range {rng:.4f} m, {len(trace)} samples, clutter removal "
          f"{'on' if dc else 'off'}", file=sys.stderr)
    if args.vitals_csv:
        est = sliding_estimates(trace)
        report.write_series_csv({
            "window_start_s": [e.window_start for e in est],
            "hr_bpm": [e.hr for e in est], "rr_brpm": [e.rr for e in est],
        }, args.vitals_csv)
        print(f"{len(est)} rate windows, median hr {np.median([e.hr for e in est]):.1f} bpm, "
              f"median rr {np.median([e.rr for e in est]):.1f} brpm", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args):
    cfg = load_scenario(resolve_scenario(args.scenario))
    if args.seed is not None:
        cfg.values.setdefault("run", {})["seed"] = args.seed
    rep = runner.run_experiment(args.experiment, cfg)
    for p in report.write_bench_outputs(rep, args.output):
        print(f"wrote {p}", file=sys.stderr)
    print(report.markdown_report([rep]))
    return EXIT_OK


def cmd_report(args):
    for p in report.assemble(args.directory):
        print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


def cmd_scenarios(args):
    for name in shipped_scenarios():
        print(name)
    return EXIT_OK


def build_parser():
    ap = _Parser(prog="fmcwvitals", description="FMCW radar vital-sign simulation toolkit")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("profile", help="radar profiles")
    psub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    show = psub.add_parser("show", help="print a profile and its derived chirp constants")
    show.add_argument("id", help="BGT24, BGT60 or BGT120")
    show.set_defaults(func=cmd_profile_show)

    p = sub.add_parser("simulate", help="synthesize a recording from a scenario")
    p.add_argument("scenario", help="scenario file, or the name of a shipped one")
    p.add_argument("-o", "--output", required=True, type=Path)
    p.add_argument("--profile", choices=["BGT24", "BGT60", "BGT120"],
                   help="radar to simulate (default: first one in the scenario)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="recording -> displacement trace CSV")
    p.add_argument("recording", type=Path)
    p.add_argument("-o", "--output", required=True, type=Path)
    p.add_argument("--no-dc-removal", action="store_true",
                   help="skip slow-time mean subtraction (default: on for BGT60/BGT120)")
    p.add_argument("--pad-cm", type=float, help="zero-pad the range FFT to this bin size")
    p.add_argument("--vitals-csv", type=Path, help="also write sliding HR/RR estimates")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="run one experiment for every radar in a scenario")
    p.add_argument("experiment", choices=runner.EXPERIMENTS)
    p.add_argument("scenario")
    p.add_argument("-o", "--output", required=True, type=Path)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="markdown tables and plot CSVs from bench outputs")
    p.add_argument("directory", type=Path)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("scenarios", help="list shipped scenario files")
    p.set_defaults(func=cmd_scenarios)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (FMCWError, ValueError, OSError) as exc:
        print(f"fmcwvitals: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
