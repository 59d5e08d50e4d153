"""Command line front end.

Subcommands map one-to-one onto the dataset builders in commands.py
plus the self-check runner.  Parameters come from defaults, then an
optional TOML config file, then flags, in that order of precedence.
Exit codes: 0 on success, 1 on usage or validation errors, 2 when the
verify suite finds a failing check.
"""

import argparse
import json
import sys

from .checks import run_verification
from .commands import (cmd_fields, cmd_levels, cmd_noise, cmd_populations,
                       cmd_sweep, cmd_transitions)
from .config import (ConfigError, FORMATS, SWEEP_AXES, build_config,
                     load_config_file, validate_config)
from .oracle import DegenerateSpectrumError, LevelTrackingError


def _add_common(parser, noise_flags=False):
    parser.add_argument("--config", metavar="FILE",
                        help="TOML file with scenario parameters")
    parser.add_argument("--eta", type=float, help="drive strength")
    parser.add_argument("--nu", type=float, help="sweep rate")
    parser.add_argument("--j", type=float, help="spin length (default 1/2)")
    window = parser.add_mutually_exclusive_group()
    window.add_argument("--nu-tau-c", type=float, dest="nu_tau_c",
                        help="dimensionless half-window nu*tau_c")
    window.add_argument("--tau-c", type=float, dest="tau_c",
                        help="half-window in time units (alternative)")
    parser.add_argument("--points", type=int, help="output grid size")
    parser.add_argument("--tol", type=float, help="integrator tolerance")
    parser.add_argument("--out", metavar="FILE",
                        help="write here instead of stdout")
    parser.add_argument("--format", choices=FORMATS, dest="format",
                        help="output format (default csv)")
    if noise_flags:
        parser.add_argument("--gamma", type=float,
                            help="isotropic damping rate over nu")
        parser.add_argument("--gamma-x", type=float, dest="gamma_x",
                            help="x damping rate over nu")
        parser.add_argument("--gamma-y", type=float, dest="gamma_y",
                            help="y damping rate over nu")
        parser.add_argument("--gamma-z", type=float, dest="gamma_z",
                            help="z damping rate over nu")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="modlz",
        description="Datasets for a sweep-rate-modulated avoided crossing: "
                    "drive fields, level diagrams, populations, adiabatic "
                    "transition tracking, noisy fidelities, and sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fields", help="drive components over the window")
    _add_common(p)

    p = sub.add_parser("levels", help="adiabatic and diabatic level diagram")
    _add_common(p)

    p = sub.add_parser("populations",
                       help="level populations along one trajectory")
    _add_common(p)
    p.add_argument("--route", choices=("oracle", "exact"), default="oracle",
                   help="numerical integration or closed form")
    p.add_argument("--m", type=float, help="initial level (default +j)")

    p = sub.add_parser("transitions",
                       help="adiabatic transition matrix column in time")
    _add_common(p)
    p.add_argument("--m", type=float, help="initial level (default +j)")

    p = sub.add_parser("noise",
                       help="fidelity under dephasing or spin flips")
    _add_common(p, noise_flags=True)

    p = sub.add_parser("sweep", help="endpoint results over a parameter")
    _add_common(p, noise_flags=True)
    p.add_argument("--axis", choices=SWEEP_AXES, required=True,
                   help="swept parameter")
    p.add_argument("--values", required=True,
                   help="comma separated sweep values")
    p.add_argument("--noise", choices=("dephasing", "spinflip"),
                   help="channel for gamma sweeps (default spinflip)")

    p = sub.add_parser("verify", help="run the structural self checks")
    _add_common(p)

    return parser


_COMMON_KEYS = ("eta", "nu", "j", "nu_tau_c", "tau_c", "points", "tol",
                "out", "format")
_NOISE_KEYS = ("gamma", "gamma_x", "gamma_y", "gamma_z")


def _overrides(args, keys):
    out = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    return out


def _infer_noise_scenario(args):
    has_flip = args.gamma is not None
    has_deph = args.gamma_z is not None
    if has_flip == has_deph:
        raise ConfigError("noise needs exactly one of --gamma (spin flip) "
                          "or --gamma-z (dephasing)")
    return "spinflip" if has_flip else "dephasing"


def _parse_values(text):
    items = [s.strip() for s in text.split(",") if s.strip()]
    try:
        return tuple(float(s) for s in items)
    except ValueError as exc:
        raise ConfigError(f"bad sweep value in {text!r}") from exc


def _dispatch(args):
    keys = _COMMON_KEYS
    if args.command == "noise":
        scenario = _infer_noise_scenario(args)
        keys = _COMMON_KEYS + _NOISE_KEYS
    elif args.command == "sweep":
        scenario = "sweep"
        keys = _COMMON_KEYS + _NOISE_KEYS
    elif args.command == "populations":
        scenario = args.route
        keys = _COMMON_KEYS + ("m",)
    elif args.command == "transitions":
        scenario = "transitions"
        keys = _COMMON_KEYS + ("m",)
    else:
        scenario = args.command

    overrides = _overrides(args, keys)
    if args.command == "sweep":
        overrides["axis"] = args.axis
        overrides["values"] = _parse_values(args.values)
        if args.noise is not None:
            overrides["noise"] = args.noise

    file_values = None
    if args.config is not None:
        file_values = load_config_file(args.config)

    cfg = build_config(scenario, file_values=file_values,
                       overrides=overrides)
    validate_config(cfg)

    if args.command == "verify":
        report = run_verification(cfg)
        if cfg.format == "json":
            text = json.dumps(report.to_dict(), indent=2) + "\n"
        else:
            text = report.render_text()
        if cfg.out is not None:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0 if report.passed else 2

    builder = {
        "fields": cmd_fields,
        "levels": cmd_levels,
        "populations": cmd_populations,
        "transitions": cmd_transitions,
        "noise": cmd_noise,
        "sweep": cmd_sweep,
    }[args.command]
    dataset = builder(cfg)
    dataset.write(cfg.out, fmt=cfg.format)
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; fold usage
        # errors into our generic failure code
        return 0 if exc.code == 0 else 1
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, LevelTrackingError,
            DegenerateSpectrumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
