"""Command-line interface: ``steersim solve|sweep|figure|readout-check``.

Exit codes: 0 success, 1 usage/IO/internal error, 2 unstable single point.
"""

import argparse
import os
import sys
from collections import Counter

import numpy as np

from . import __version__
from .config import load_config
from .errors import SteerSimError
from .export import FIELDS, heatmap_svg, records_to_csv, write_atomic
from .steering import (
    Classification,
    evaluate,
    reconstruct_mechanical,
    simulate_readout,
    steerabilities,
)
from .sweep import PRESETS, Axis, Constraint, figure_preset, run_sweep

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSTABLE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _num(x):
    return "-" if x is None else f"{x:.9g}"


def format_report(result):
    lines = [
        f"stable: {'yes' if result.stable else 'no (unstable)'}",
        f"spectral_abscissa: {_num(result.spectral_abscissa)}",
        f"g_m1_to_m2: {_num(result.g_12)}",
        f"g_m2_to_m1: {_num(result.g_21)}",
        f"energy_imbalance: {_num(result.energy_imbalance)}",
        f"classification: {result.classification.value}",
    ]
    return "\n".join(lines) + "\n"


def cmd_solve(args):
    cfg = load_config(args.config)
    params = cfg.normalized_params()
    result = evaluate(params, gate=not args.ungated)
    sys.stdout.write(format_report(result))
    return EXIT_OK if result.stable else EXIT_UNSTABLE


def _write_outputs(records, ax1, ax2, out, svg, title):
    write_atomic(out, records_to_csv(records))
    written = [out]
    if svg:
        stem = os.path.splitext(out)[0]
        for field, column in FIELDS.items():
            path = f"{stem}_{column}.svg"
            write_atomic(path, heatmap_svg(records, ax1, ax2, field, title=f"{title} {column}"))
            written.append(path)
    counts = Counter(r.classification.value for r in records)
    summary = ", ".join(f"{c.value}={counts.get(c.value, 0)}" for c in Classification)
    sys.stdout.write(f"{len(records)} points: {summary}\n")
    for path in written:
        sys.stdout.write(f"wrote {path}\n")


def cmd_sweep(args):
    cfg = load_config(args.config)
    base = cfg.normalized_params()
    constraint = Constraint.parse(args.constraint) if args.constraint else None
    records = run_sweep(base, args.ax1, args.ax2, constraint, gate=not args.ungated)
    out = args.out or cfg.out or "sweep.csv"
    _write_outputs(records, args.ax1, args.ax2, out, args.svg or cfg.svg, "sweep")
    return EXIT_OK


def cmd_figure(args):
    preset = figure_preset(args.preset).with_axes(args.ax1, args.ax2)
    records = run_sweep(
        preset.base, preset.ax1, preset.ax2, preset.constraint, gate=not args.ungated,
    )
    out = args.out or f"{preset.id}.csv"
    _write_outputs(records, preset.ax1, preset.ax2, out, args.svg, preset.id)
    return EXIT_OK


def cmd_readout_check(args):
    cfg = load_config(args.config)
    result = evaluate(cfg.normalized_params())
    if not result.stable:
        sys.stdout.write(format_report(result))
        return EXIT_UNSTABLE
    vm = result.covariance.mech
    v_out = simulate_readout(vm, args.eta1, args.eta2)
    rec = reconstruct_mechanical(v_out, args.eta1, args.eta2)
    err = float(np.max(np.abs(rec - vm)))
    g12, g21 = steerabilities(rec)
    dg = max(abs(g12 - result.g_12), abs(g21 - result.g_21))
    sys.stdout.write(
        f"eta: {args.eta1:g}, {args.eta2:g}\n"
        f"max |Vm_reconstructed - Vm|: {err:.3e}\n"
        f"max steering difference: {dg:.3e}\n"
        f"g_m1_to_m2: {g12:.9g}\n"
        f"g_m2_to_m1: {g21:.9g}\n"
    )
    ok = err <= 1e-10 * max(1.0, float(np.max(np.abs(vm)))) and dg <= 1e-10
    return EXIT_OK if ok else EXIT_ERROR


def build_parser():
    parser = _Parser(prog="steersim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ungated_help = (
        "solve the Lyapunov equation even for unstable drift and classify the result; "
        "for comparison with calculations that skip the stability check (not physical)"
    )

    p = sub.add_parser("solve", help="single parameter point")
    p.add_argument("--config", required=True)
    p.add_argument("--ungated", action="store_true", help=ungated_help)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="two-axis grid from a config base point")
    p.add_argument("--config", required=True)
    p.add_argument("--ax1", type=Axis.parse, required=True, metavar="NAME:START:STOP:POINTS")
    p.add_argument("--ax2", type=Axis.parse, required=True, metavar="NAME:START:STOP:POINTS")
    p.add_argument("--constraint", help="coupling rule such as g2=0.5*g1")
    p.add_argument("--out")
    p.add_argument("--svg", action="store_true", help="also write one heatmap per field")
    p.add_argument("--ungated", action="store_true", help=ungated_help)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="figure preset grid")
    p.add_argument("preset", choices=sorted(PRESETS))
    p.add_argument("--ax1", type=Axis.parse, metavar="NAME:START:STOP:POINTS")
    p.add_argument("--ax2", type=Axis.parse, metavar="NAME:START:STOP:POINTS")
    p.add_argument("--out")
    p.add_argument("--svg", action="store_true", help="also write one heatmap per field")
    p.add_argument("--ungated", action="store_true", help=ungated_help)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("readout-check", help="homodyne readout round trip on a solved point")
    p.add_argument("--config", required=True)
    p.add_argument("--eta1", type=float, default=1.0)
    p.add_argument("--eta2", type=float, default=1.0)
    p.set_defaults(func=cmd_readout_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SteerSimError, OSError, ValueError) as exc:
        sys.stderr.write(f"steersim: error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
