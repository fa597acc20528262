"""Command-line entry point.

    robustgates fidelity --out fidelity.csv --family BB1 --family naive
    robustgates profile --config profile.json --out profile.json
    robustgates counting --out counting.csv
    robustgates multiplet --out multiplet.csv
    robustgates simplify --out simplify.csv

Exit status is 0 on success and 2 on any configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .harness import ConfigError, default_spec, load_config, run_sweep

COMMANDS = {
    "profile": "excitation-profile",
    "fidelity": "fidelity-sweep",
    "counting": "counting",
    "multiplet": "coupling-multiplet",
    "simplify": "simplify-demo",
}

HELP = {
    "profile": "transverse signal after a composite 90_y pulse versus pulse-length error",
    "fidelity": "propagator fidelity of each family versus pulse-length error",
    "counting": "approximate quantum counting signal versus iteration count",
    "multiplet": "13C multiplet phases under repeated coupling gates in 2-13C alanine",
    "simplify": "counting on alanine with spectator couplings (negative result)",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robustgates", description="Composite-pulse robust gate simulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("--config", help="JSON sweep config")
        p.add_argument("--out", help="output file (.csv or .json)")
        p.add_argument("--family", action="append", help="family to run; repeatable")
        p.add_argument("--theta", type=float, help="target rotation angle in radians")
        p.add_argument("--f-min", type=float)
        p.add_argument("--f-max", type=float)
        p.add_argument("--f-step", type=float)
    return parser


def spec_for(args):
    experiment = COMMANDS[args.command]
    spec = load_config(args.config) if args.config else default_spec(experiment)
    if spec.experiment != experiment:
        raise ConfigError("experiment", f"config is for {spec.experiment!r}, not {experiment!r}")
    changes = {}
    if args.family:
        changes["families"] = tuple(args.family)
    if args.theta is not None:
        changes["theta"] = args.theta
    grid = {k: getattr(args, k) for k in ("f_min", "f_max", "f_step") if getattr(args, k) is not None}
    if grid:
        changes["grid"] = replace(spec.grid, **grid)
    return replace(spec, **changes).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_for(args)
        path = run_sweep(spec, args.out)
    except ConfigError as exc:
        print(f"robustgates: configuration error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
