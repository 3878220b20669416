"""Command-line interface.

Subcommands: profile, simulate, verify, sweep.  Exit codes: 0 success,
1 usage error, 2 profile-solver failure, 3 blow-up abort, 4 verification
failure.  NSKSHOCK_OUT sets the default output root.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .dynamics import BlowUpError
from .gas import AdmissibilityError, DomainError
from .harness import (
    RunConfig,
    run_profile_command,
    run_simulate_command,
    run_sweep,
    run_verify,
    set_by_path,
)
from .profile import ProfileSolveError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PROFILE = 2
EXIT_BLOWUP = 3
EXIT_VERIFY = 4


def _build_parser():
    parser = argparse.ArgumentParser(prog="nskshock", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dotted-key config override, e.g. --set grid.n=1025",
        )

    p_prof = sub.add_parser("profile", help="solve and export a shock profile")
    common(p_prof)
    p_prof.add_argument("--v-plus", type=float, default=None)
    p_prof.add_argument("--v-minus", type=float, default=None)
    p_prof.add_argument("--delta-s", type=float, default=None)

    p_sim = sub.add_parser("simulate", help="run a perturbed-shock scenario")
    common(p_sim)
    p_sim.add_argument("--t-final", type=float, default=None)

    p_ver = sub.add_parser("verify", help="run the property battery")
    common(p_ver)
    p_ver.add_argument(
        "--flip-cstar-sign",
        action="store_true",
        help="debug mutation: corrupt the completed-square constant (negative control)",
    )

    p_swp = sub.add_parser("sweep", help="sweep one config key over a value list")
    common(p_swp)
    p_swp.add_argument("--param", type=str, required=True, help="dotted config key")
    p_swp.add_argument("--values", type=str, required=True, help="comma-separated values")
    p_swp.add_argument("--task", type=str, default="profile", choices=["profile", "simulate"])
    p_swp.add_argument("--workers", type=int, default=None)
    return parser


def _load_config(args) -> RunConfig:
    d = RunConfig().to_dict()
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        with open(path) as fh:
            file_cfg = json.load(fh)
        _merge(d, file_cfg)
    for item in args.set:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        set_by_path(d, key, val)
    cfg = RunConfig.from_dict(d)
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "v_plus", None) is not None:
        cfg.end_states.v_plus = args.v_plus
    if getattr(args, "v_minus", None) is not None:
        cfg.end_states.v_minus = args.v_minus
        cfg.end_states.delta_s = None
    if getattr(args, "delta_s", None) is not None:
        cfg.end_states.delta_s = args.delta_s
        cfg.end_states.v_minus = None
    if getattr(args, "t_final", None) is not None:
        cfg.t_final = args.t_final
    return cfg


def _merge(base: dict, overlay: dict, prefix=""):
    for k, v in overlay.items():
        if k not in base:
            raise KeyError(f"unknown config key {prefix}{k!r}")
        if isinstance(v, dict) and isinstance(base[k], dict):
            _merge(base[k], v, prefix=f"{prefix}{k}.")
        else:
            base[k] = v


def _out_dir(args, default_name):
    if args.out is not None:
        return Path(args.out)
    root = os.environ.get("NSKSHOCK_OUT", ".")
    return Path(root) / default_name


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    try:
        cfg = _load_config(args)
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    if args.command == "profile":
        out = _out_dir(args, "profile_out")
        try:
            rep = run_profile_command(cfg, out)
        except (ProfileSolveError, AdmissibilityError, DomainError) as err:
            print(f"profile solver failed: {err}", file=sys.stderr)
            return EXIT_PROFILE
        print(json.dumps({"out": str(out), "monotone": rep["monotone"]}))
        return EXIT_OK

    if args.command == "simulate":
        out = _out_dir(args, "simulate_out")
        try:
            result = run_simulate_command(cfg, out)
        except ProfileSolveError as err:
            print(f"profile solver failed: {err}", file=sys.stderr)
            return EXIT_PROFILE
        except BlowUpError as err:
            print(f"initial data rejected: {err}", file=sys.stderr)
            return EXIT_BLOWUP
        if result.aborted:
            print(f"run aborted: {result.abort_report}", file=sys.stderr)
            return EXIT_BLOWUP
        print(json.dumps({"out": str(out), "records": len(result.records)}))
        return EXIT_OK

    if args.command == "verify":
        out = _out_dir(args, "verify_out")
        out.mkdir(parents=True, exist_ok=True)
        report = run_verify(cfg, flip_cstar_sign=args.flip_cstar_sign)
        with open(out / "verify_report.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        failing = [k for k, v in report.items() if isinstance(v, dict) and not v["pass"]]
        if failing:
            print(f"verification failed: {', '.join(failing)}", file=sys.stderr)
            return EXIT_VERIFY
        print(json.dumps({"out": str(out), "all_pass": True}))
        return EXIT_OK

    if args.command == "sweep":
        values = [json.loads(v) for v in args.values.split(",") if v.strip()]
        if not values:
            print("error: empty sweep value list", file=sys.stderr)
            return EXIT_USAGE
        out = _out_dir(args, "sweep_out")
        try:
            res = run_sweep(cfg, args.param, values, task=args.task, out_dir=out, max_workers=args.workers)
        except KeyError as err:
            print(f"error: {err}", file=sys.stderr)
            return EXIT_USAGE
        print(json.dumps({"out": str(out), "fits": res["fits"]}))
        return EXIT_OK

    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
