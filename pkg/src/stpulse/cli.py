"""Command-line entry point.

    stpulse analyze pulse CAPTURE --config CFG
    stpulse analyze st CAPTURE --config CFG
    stpulse separate --e-on 6.479u --e-off 8.134u --e-charge 6.889u
    stpulse separate --pulse CAPTURE --st CAPTURE --config CFG
    stpulse simulate st|pulse [--params CFG] --out CAPTURE
    stpulse report REPORT.json --format table

Analyses print a table unless ``--format`` says otherwise; ``--out`` writes
to a file. Failures print ``ErrorName: message`` and exit with status 1.
"""

import argparse
import sys

from .capture_io import ColumnSpec, parse_capture_csv, truth_path, write_capture_csv, write_truth
from .config import load_config, load_sim_params, parse_si
from .errors import AnalysisError
from .report import FORMATS, provenance_for, read_report, render_report, write_report


def _energy(text):
    try:
        return parse_si(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an energy: {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="stpulse",
                                description="Sawyer-Tower and single-pulse switching-loss analysis")
    sub = p.add_subparsers(dest="command", required=True)

    def output_opts(sp):
        sp.add_argument("--format", choices=FORMATS, default="table")
        sp.add_argument("--out", help="write the report here instead of stdout")

    an = sub.add_parser("analyze", help="analyze one capture")
    an.add_argument("kind", choices=("pulse", "st"))
    an.add_argument("capture")
    an.add_argument("--config", required=True)
    an.add_argument("--time-column", default="time")
    output_opts(an)

    sep = sub.add_parser("separate", help="split event energies into loss components")
    sep.add_argument("--e-on", type=_energy)
    sep.add_argument("--e-off", type=_energy)
    sep.add_argument("--e-charge", type=_energy)
    sep.add_argument("--pulse", help="single-pulse capture")
    sep.add_argument("--st", help="Sawyer-Tower capture")
    sep.add_argument("--config")
    sep.add_argument("--time-column", default="time")
    output_opts(sep)

    sim = sub.add_parser("simulate", help="write a synthetic capture and its ground truth")
    sim.add_argument("kind", choices=("pulse", "st"))
    sim.add_argument("--params")
    sim.add_argument("--out", required=True)

    rep = sub.add_parser("report", help="re-render a structured report")
    rep.add_argument("report")
    output_opts(rep)
    return p


def _emit(report, args):
    if args.out:
        write_report(report, args.format, args.out)
    else:
        sys.stdout.write(render_report(report, args.format))


def _analyze(args):
    from .pipeline import analyze_pulse_capture, analyze_st

    cfg = load_config(args.config, mode=args.kind)
    cap = parse_capture_csv(args.capture, ColumnSpec(time=args.time_column))
    prov = provenance_for(args.capture, args.config)
    fn = analyze_pulse_capture if args.kind == "pulse" else analyze_st
    _emit(fn(cap, cfg, prov), args)


def _separate(args, parser):
    from .pipeline import separate_captures, separate_scalars

    scalars = (args.e_on, args.e_off, args.e_charge)
    files = (args.pulse, args.st, args.config)
    if all(x is not None for x in scalars) and all(x is None for x in files):
        report = separate_scalars(*scalars)
    elif all(x is not None for x in files) and all(x is None for x in scalars):
        cfg = load_config(args.config, mode="separate")
        spec = ColumnSpec(time=args.time_column)
        report = separate_captures(parse_capture_csv(args.pulse, spec),
                                   parse_capture_csv(args.st, spec), cfg,
                                   provenance_for(args.pulse, args.st, args.config))
    else:
        parser.error("separate takes either --e-on/--e-off/--e-charge "
                     "or --pulse/--st/--config")
    _emit(report, args)


def _simulate(args):
    from .simulator import simulate_single_pulse, simulate_sawyer_tower, truth_to_dict

    model, params = load_sim_params(args.params, args.kind)
    run = simulate_sawyer_tower if args.kind == "st" else simulate_single_pulse
    cap, truth = run(model, params)
    write_capture_csv(cap, args.out)
    write_truth(truth_to_dict(truth), truth_path(args.out))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            _analyze(args)
        elif args.command == "separate":
            _separate(args, parser)
        elif args.command == "simulate":
            _simulate(args)
        else:
            _emit(read_report(args.report), args)
    except AnalysisError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
