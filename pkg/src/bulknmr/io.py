"""Text exports: structure-table dumps and CSV/JSON result files.

CSV files begin with one ``#`` comment line carrying the tool version and the
configuration hash; floats use 17 significant digits so they round-trip.
"""

from __future__ import annotations

import csv
import json
import re
from fractions import Fraction

import numpy as np

from . import __version__
from .algebra import StructureTable, get_basis, parse_operator

__all__ = [
    "format_dyadic",
    "parse_dyadic",
    "write_table_dump",
    "read_table_dump",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_fid_csv",
    "write_spectrum_csv",
    "write_peaks_json",
    "header_line",
]


def header_line(config_hash: str = "") -> str:
    return f"# bulknmr {__version__} config_sha256={config_hash or '-'}\n"


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def format_dyadic(c: Fraction) -> str:
    """``p/2^k`` with ``p`` odd (or ``k = 0``)."""
    c = Fraction(c)
    d = c.denominator
    k = d.bit_length() - 1
    if d != 1 << k:
        raise ValueError(f"{c} is not dyadic")
    return f"{c.numerator}/2^{k}"


_DYADIC = re.compile(r"^([+-]?\d+)/2\^(\d+)$")


def parse_dyadic(text: str) -> Fraction:
    m = _DYADIC.match(text.strip())
    if not m:
        raise ValueError(f"not a dyadic fraction: {text!r}")
    return Fraction(int(m.group(1)), 2 ** int(m.group(2)))


def write_table_dump(table: StructureTable, fh) -> int:
    """Write every nonzero ordered commutator ``[B_j, B_k]`` (``j != k``).

    Returns the number of lines written.
    """
    basis = table.basis
    names = basis.names()
    fh.write(f"# bulknmr {__version__} algebra n={table.n} basis={len(basis)}\n")
    count = 0
    for j in range(len(basis)):
        k, l, f = table.row_arrays(j)
        for kk, ll, ff in zip(k, l, f):
            fh.write(f"[{names[j]},{names[kk]}] = sum({format_dyadic(Fraction(float(ff)))} {names[ll]})\n")
            count += 1
    return count


_LINE = re.compile(r"^\[(\S+?\]),(\S+?\])\] = sum\((.*)\)$")


def read_table_dump(lines, n: int) -> dict:
    """Parse a dump into ``{(op_j, op_k): {op_l: Fraction}}``."""
    out = {}
    for line in lines:
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"malformed dump line: {line!r}")
        a, b = parse_operator(m.group(1), n), parse_operator(m.group(2), n)
        terms = {}
        body = m.group(3).split()
        for coeff, name in zip(body[::2], body[1::2]):
            terms[parse_operator(name, n)] = parse_dyadic(coeff)
        out[(a, b)] = terms
    return out


def write_trajectory_csv(traj, fh, config_hash: str = "", columns=None):
    """``t,<op names...>``; ``columns`` restricts to a subset of basis indices."""
    names = get_basis(traj.n).names()
    cols = np.arange(len(names)) if columns is None else np.asarray(columns)
    fh.write(header_line(config_hash))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t"] + [names[c] for c in cols])
    for t, row in zip(traj.times, traj.values):
        w.writerow([_g17(t)] + [_g17(x) for x in row[cols]])


def read_trajectory_csv(fh):
    """Return ``(names, times, values)`` from a trajectory CSV."""
    rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    names = rows[0][1:]
    data = np.array([[float(x) for x in r] for r in rows[1:]]).reshape(len(rows) - 1, len(names) + 1)
    return names, data[:, 0], data[:, 1:]


def write_fid_csv(fid, fh, config_hash: str = ""):
    fh.write(header_line(config_hash))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "re", "im"])
    for t, s in zip(fid.times, fid.samples):
        w.writerow([_g17(t), _g17(s.real), _g17(s.imag)])


def write_spectrum_csv(spec, fh, config_hash: str = ""):
    fh.write(header_line(config_hash))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["freq_hz", "re", "im", "mag"])
    for f, a in zip(spec.frequencies, spec.amplitudes):
        w.writerow([_g17(f), _g17(a.real), _g17(a.imag), _g17(abs(a))])


def write_peaks_json(spec, fh):
    json.dump([{"freq_hz": f, "magnitude": m} for f, m in spec.peaks], fh, indent=1)
    fh.write("\n")
