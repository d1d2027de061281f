# src/dnls_ist/connectors/cli.py
"""
Command-line interface.

    dnls-ist scatter     --input q0.json --out sd.json
    dnls-ist evolve      --sdata sd.json --t T --out sd_t.json
    dnls-ist reconstruct --sdata sd.json --t T --xmin A --xmax B --nx N --out q.csv
    dnls-ist soliton     --sdata sd.json --t T --xmin A --xmax B --nx N --out q.csv
    dnls-ist asympt      --sdata sd.json --t T --cone v1,v2,x1,x2 --xmin A --xmax B --nx N --out prof.csv
    dnls-ist pde         --input u0.json --t T [--L L --n N --dt DT] --out u.csv
    dnls-ist verify      --suite roundtrip [--suite delta ...] [--out report.json]

Exit status: 0 success, 1 domain error (or failed verification), 2 usage error.
Outputs ending in .json are written with the versioned JSON schema, anything
else as CSV (columns x, Re, Im; asympt adds the u-profile and |dispersive|).
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .serialization import (
    asymptotic_frame,
    load_potential,
    load_scattering,
    profile_frame,
    save,
    write_csv,
)
from ..core.asymptotics import ConeSelection
from ..core.pipeline import IstPipeline
from ..core.solitons import ReflectionlessData
from ..core.types import PotentialKind, PotentialSample, UniformGrid
from ..core.verification import SUITES
from ..utils.errors import EXIT_DOMAIN_ERROR, EXIT_OK, EXIT_USAGE_ERROR, ScatteringError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


def _cone(text: str) -> ConeSelection:
    try:
        v1, v2, x1, x2 = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--cone expects v1,v2,x1,x2, got '{text}'")
    try:
        return ConeSelection(v1, v2, x1, x2)
    except ScatteringError as e:
        raise argparse.ArgumentTypeError(e.message)


# flags whose comma-separated value may start with a minus sign
LIST_FLAGS = ("--cone",)


def _attach_list_values(argv: List[str]) -> List[str]:
    """Rewrite "--cone -0.5,0.5,-5,5" as "--cone=-0.5,0.5,-5,5" so argparse reads it as a value."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in LIST_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and "," in argv[i + 1]:
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def _add_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--xmin", type=float, default=-10.0, help="left end of the output grid")
    parser.add_argument("--xmax", type=float, default=10.0, help="right end of the output grid")
    parser.add_argument("--nx", type=int, default=201, help="number of output points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dnls-ist", description="Inverse scattering toolkit for the DNLS equation")
    parser.add_argument("--config", help="configuration file (JSON)")
    parser.add_argument("--no-config", action="store_true", help="ignore config/config.json and use defaults")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="console log level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scatter", help="direct scattering map")
    p.add_argument("--input", required=True, help="potential sample (JSON)")
    p.add_argument("--out", required=True, help="scattering data (JSON)")

    p = sub.add_parser("evolve", help="exact time evolution of scattering data")
    p.add_argument("--sdata", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("reconstruct", help="inverse map by the Riemann-Hilbert solver")
    p.add_argument("--sdata", required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--u", action="store_true", help="return u instead of q")
    p.add_argument("--out", required=True)
    _add_grid(p)

    p = sub.add_parser("soliton", help="exact N-soliton from the discrete data")
    p.add_argument("--sdata", required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--out", required=True)
    _add_grid(p)

    p = sub.add_parser("asympt", help="large-time asymptotic profile")
    p.add_argument("--sdata", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--cone", type=_cone, required=True, help="v1,v2,x1,x2")
    p.add_argument("--out", required=True)
    _add_grid(p)

    p = sub.add_parser("pde", help="reference pseudo-spectral solver")
    p.add_argument("--input", required=True, help="u-gauge potential sample (JSON)")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--L", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", action="append", choices=list(SUITES) + ["all"], required=True)
    p.add_argument("--out", help="JSON report path (stdout when omitted)")
    return parser


def _grid(args) -> UniformGrid:
    if args.nx < 2 or not args.xmax > args.xmin:
        raise ValueError("the output grid needs nx >= 2 and xmax > xmin")
    return UniformGrid(args.xmin, (args.xmax - args.xmin) / (args.nx - 1), args.nx)


def _write_sample(sample: PotentialSample, path: str, manifest: dict) -> None:
    if path.endswith(".json"):
        save(sample, path)
    else:
        write_csv(profile_frame(sample.x, sample.values), path, manifest)


def _run(args, pipeline: IstPipeline) -> int:
    manifest = {"command": args.command}
    if args.command == "scatter":
        save(pipeline.scatter(load_potential(args.input)), args.out)
    elif args.command == "evolve":
        save(pipeline.evolve(load_scattering(args.sdata), args.t), args.out)
    elif args.command == "reconstruct":
        kind = PotentialKind.U_GAUGE if args.u else PotentialKind.Q_GAUGE
        sample = pipeline.reconstruct(load_scattering(args.sdata), _grid(args), args.t, kind)
        _write_sample(sample, args.out, {**manifest, "t": args.t, "kind": kind.value})
    elif args.command == "soliton":
        data = ReflectionlessData.from_scattering(load_scattering(args.sdata))
        grid = _grid(args)
        values = pipeline.soliton(data, grid.points, args.t)
        write_csv(profile_frame(grid.points, values), args.out, {**manifest, "t": args.t, "n_solitons": data.n})
    elif args.command == "asympt":
        grid = _grid(args)
        cone = args.cone
        profile = pipeline.asymptotics(load_scattering(args.sdata), grid.points, args.t, cone)
        write_csv(asymptotic_frame(profile.x, profile.q, profile.u, np.abs(profile.dispersive)), args.out,
                  {**manifest, "t": args.t, "cone": [cone.v1, cone.v2, cone.x1, cone.x2]})
    elif args.command == "pde":
        result = pipeline.pde(load_potential(args.input), args.t, L=args.L, n=args.n, dt=args.dt)
        _write_sample(result, args.out, {**manifest, "t": args.t})
    elif args.command == "verify":
        names = list(SUITES) if "all" in args.suite else args.suite
        reports = pipeline.verify(names)
        payload = json.dumps([r.to_dict() for r in reports], indent=2)
        if args.out:
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            Path(args.out).write_text(payload)
        else:
            print(payload)
        return EXIT_OK if all(r.passed for r in reports) else EXIT_DOMAIN_ERROR
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Exit status
    """
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_list_values(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE_ERROR

    try:
        overrides = {"logging": {"level": args.log_level}} if args.log_level else None
        pipeline = IstPipeline(args.config, overrides, use_file=not args.no_config)
        return _run(args, pipeline)
    except ScatteringError as e:
        logger.error(f"{args.command} failed: {e}")
        print(json.dumps({"error": e.to_dict()}), file=sys.stderr)
        return EXIT_DOMAIN_ERROR
    except (FileNotFoundError, ValueError, json.JSONDecodeError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
