"""Command-line interface.

    bulknmr algebra  --n K --out PATH
    bulknmr simulate --config PATH --out DIR
    bulknmr verify   --config PATH --horizon SECONDS --samples K

Exit codes: 0 success, 2 configuration/schema error, 3 numerical failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, qoracle
from .algebra import MAX_NUCLEI, build_structure_table, get_basis
from .config import ConfigError, load_config
from .dynamics import EventError
from .io import (
    write_fid_csv, write_peaks_json, write_spectrum_csv, write_table_dump, write_trajectory_csv,
)
from .pipeline import simulate, verify
from .propagate import NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _fail(code: int, message: str) -> int:
    print(f"bulknmr: error: {message}", file=sys.stderr)
    return code


def cmd_algebra(args) -> int:
    if not 1 <= args.n <= MAX_NUCLEI:
        return _fail(EXIT_CONFIG, f"schema error: n must be in [1, {MAX_NUCLEI}], got {args.n}")
    table = build_structure_table(args.n, eager=False)
    out = Path(args.out)
    try:
        with out.open("w") as fh:
            lines = write_table_dump(table, fh)
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot write {out}: {exc.strerror}")
    print(f"basis={len(get_basis(args.n))} nonzero={lines // 2} lines={lines}")
    return EXIT_OK


def _numerical(exc) -> bool:
    return isinstance(exc, NumericalError) or (isinstance(exc, EventError) and isinstance(exc.cause, NumericalError))


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config)
        if not any(type(ev).__name__ == "Acquire" for ev in cfg.sequence):
            raise ConfigError("sequence has no acquire event")
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        result = simulate(cfg)
    except (NumericalError, EventError) as exc:
        return _fail(EXIT_NUMERICAL if _numerical(exc) else EXIT_CONFIG, str(exc))
    except ValueError as exc:
        return _fail(EXIT_CONFIG, str(exc))

    out = Path(args.out)
    h = cfg.sha256
    basis = get_basis(cfg.system.n)
    columns = {"all": None, "rank1": [j for j in range(len(basis)) if basis.ranks[j] == 1]}
    try:
        out.mkdir(parents=True, exist_ok=True)
        if cfg.export_trajectory != "none":
            with (out / "trajectory.csv").open("w") as fh:
                write_trajectory_csv(result.trajectory, fh, h, columns[cfg.export_trajectory])
        with (out / "fid.csv").open("w") as fh:
            write_fid_csv(result.fid, fh, h)
        with (out / "spectrum.csv").open("w") as fh:
            write_spectrum_csv(result.spectrum, fh, h)
        with (out / "peaks.json").open("w") as fh:
            write_peaks_json(result.spectrum, fh)
        with (out / "manifest.json").open("w") as fh:
            json.dump({"tool": "bulknmr", "version": __version__, "config_sha256": h}, fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot write results to {out}: {exc.strerror}")
    print(f"n={cfg.system.n} snapshots={len(result.trajectory)} peaks={len(result.spectrum.peaks)}")
    return EXIT_OK


def _nuclei_in(path) -> int | None:
    try:
        doc = json.loads(Path(path).read_text())
        return len(doc["nuclei"])
    except Exception:
        return None


def cmd_verify(args) -> int:
    n = _nuclei_in(args.config)
    if n is not None and n > qoracle.ORACLE_MAX_N:
        return _fail(EXIT_CONFIG, f"oracle ceiling exceeded: n={n} > {qoracle.ORACLE_MAX_N}")
    if args.samples < 1 or args.horizon < 0:
        return _fail(EXIT_CONFIG, "need --samples >= 1 and --horizon >= 0")
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        report = verify(cfg, args.horizon, args.samples, args.tol)
    except (NumericalError, EventError) as exc:
        return _fail(EXIT_NUMERICAL if _numerical(exc) else EXIT_CONFIG, str(exc))
    except ValueError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    print(json.dumps({
        "n": report.n,
        "snapshots": report.snapshots,
        "max_deviation": report.max_deviation,
        "tolerance": report.tolerance,
        "passed": report.passed,
        "worst": [{"observable": k, "deviation": v} for k, v in report.worst(10)],
    }, indent=1))
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bulknmr", description="Classical bulk NMR spin-dynamics simulator.")
    p.add_argument("--version", action="version", version=f"bulknmr {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("algebra", help="dump the structure-constant table")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_algebra)

    s = sub.add_parser("simulate", help="run a configuration and write CSV/JSON results")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="compare the classical dynamics with the density-matrix oracle")
    v.add_argument("--config", required=True)
    v.add_argument("--horizon", type=float, required=True)
    v.add_argument("--samples", type=int, required=True)
    v.add_argument("--tol", type=float, default=1e-8)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
