"""Re-ingest an ``evolve`` CSV and re-verify its invariants.

Usable as ``python -m rotofrict.checker run.csv`` or ``rotofrict check run.csv``.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np


def read_evolve_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader if row]
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(header)}, header


def check_columns(cols: dict, header: list[str], zero_temperature: bool = True,
                  norm_tol: float = 1e-10) -> list[str]:
    """Return a list of violated invariants (empty when everything holds)."""
    failures = []
    pcols = [h for h in header if h.startswith("p_")]
    if not pcols:
        return ["no population columns"]
    P = np.column_stack([cols[h] for h in pcols])
    drift = np.max(np.abs(P.sum(axis=1) - 1.0))
    if drift > norm_tol:
        failures.append(f"normalization: max |sum p - 1| = {drift:.3e}")
    if P.min() < -1e-12:
        failures.append(f"negativity: min p = {P.min():.3e}")
    t = cols["t"]
    if np.any(np.diff(t) <= 0):
        failures.append("time column not strictly increasing")
    if zero_temperature:
        for name in ("energy", "omega4", "omega"):
            series = cols[name]
            rise = np.diff(series)
            slack = 1e-12 * np.max(np.abs(series))
            if np.any(rise > slack):
                failures.append(f"monotonicity: {name} increases by up to {rise.max():.3e}")
        if np.any(cols["power"] < -1e-12 * np.max(np.abs(cols["power"]))):
            failures.append("power: negative radiated power at zero temperature")
    return failures


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rotofrict-check", description=__doc__)
    parser.add_argument("csv", help="file written by `rotofrict evolve`")
    parser.add_argument("--thermal", action="store_true",
                        help="run came from T > 0; skip the monotonicity checks")
    parser.add_argument("--tol", type=float, default=1e-10, help="normalization tolerance")
    args = parser.parse_args(argv)
    cols, header = read_evolve_csv(args.csv)
    failures = check_columns(cols, header, zero_temperature=not args.thermal, norm_tol=args.tol)
    for line in failures:
        print(f"FAIL {line}")
    if not failures:
        print(f"OK {args.csv}: {len(cols['t'])} rows")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
