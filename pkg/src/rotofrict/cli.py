"""Command-line front end.

Every subcommand writes CSV (one header line, RFC 4180 quoting) to ``--out``
or stdout. Floats are printed in scientific notation with
``ROTOFRICT_PRECISION`` significant digits (default 17), so identical
invocations produce identical bytes.

Failures print one line ``error: guard=<name> message=<text>`` to stderr
and exit non-zero (2 for bad arguments, 1 for violated guards).
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import checker
from .angular import QuadratureGrid, transition_dipole, transition_dipole_quadrature
from .classical import classical_evolve, classical_limit_ratio, classical_power
from .constants import (
    gamma0,
    level_frequency,
    load_config,
    radiation_reaction_time,
)
from .dynamics import evolve, pure_state, short_time_torque, three_level_reference, time_grid
from .errors import GuardError
from .rates import (
    CutoffSpec,
    PerturbationBreakdown,
    RegimeWarning,
    quantum_correction,
    rate_table,
    short_time_beta,
    short_time_excited_probability,
    transition_probability_integral,
)

DEFAULTS_HELP = """\
Without --config every command runs in natural units: hbar = I = 1 and
gamma0 = 1, so times are in 1/gamma0, power in hbar^2 gamma0 / I, Omega^4 in
(hbar/I)^4 and temperatures in hbar^2 / (I kB). A config file with
`units = si` switches to SI with CODATA 2018 constants; see README.
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"error: guard=arguments message={message}\n")
        sys.exit(2)


def _precision() -> int:
    raw = os.environ.get("ROTOFRICT_PRECISION", "17")
    try:
        digits = int(raw)
    except ValueError:
        raise ValueError(f"ROTOFRICT_PRECISION must be an integer, got {raw!r}") from None
    if not 1 <= digits <= 17:
        raise ValueError("ROTOFRICT_PRECISION must lie in 1..17")
    return digits


def _cell(x, digits: int) -> str:
    if isinstance(x, (str, int, np.integer)) and not isinstance(x, bool):
        return str(x)
    return f"{float(x) + 0.0:.{digits - 1}e}"  # + 0.0 folds -0.0 into 0.0


def write_csv(out, header, rows) -> None:
    digits = _precision()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x, digits) for x in row])
    if out in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(out).write_text(buf.getvalue(), encoding="utf-8")


def _positive(kind=float):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _non_negative(kind=float):
    def parse(text):
        value = kind(text)
        if value < 0:
            raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
        return value
    return parse


def _initial_level(text: str) -> int:
    value = text.split("=", 1)[1] if text.startswith("l=") else text
    level = int(value)
    if level < 0:
        raise argparse.ArgumentTypeError("initial level must be non-negative")
    return level


def _figure_path(args, default_from_out: bool = False):
    if getattr(args, "figure", None):
        return args.figure
    if default_from_out and args.out not in (None, "-") and not args.no_figure:
        return str(Path(args.out).with_suffix(".png"))
    return None


# --- subcommands ---------------------------------------------------------

def cmd_rates(args, molecule, constants):
    table = rate_table(args.lmax, molecule, constants, T=args.temp)
    rows = [
        (l, level_frequency(l, molecule, constants), table.down[l], table.up[l], quantum_correction(l))
        for l in range(args.lmax + 1)
    ]
    write_csv(args.out, ["l", "omega_l", "down", "up", "quantum_correction"], rows)


def _run_evolve(molecule, constants, lmax, initial, temp, tmax, grid, npoints, engine):
    if initial > lmax:
        raise ValueError(f"initial level {initial} exceeds lmax {lmax}")
    table = rate_table(lmax, molecule, constants, T=temp)
    return evolve(pure_state(initial, lmax), table, time_grid(tmax, npoints, grid), engine=engine)


def _write_trajectory(traj, out, figure=None):
    header = ["t"] + [f"p_{l}" for l in range(traj.l_max + 1)] + [
        "omega", "omega4", "energy", "power", "torque"]
    rows = (
        [t, *p, w, w4, e, pw, n]
        for t, p, w, w4, e, pw, n in zip(traj.times, traj.populations, traj.omega, traj.omega4,
                                         traj.energy, traj.power, traj.torque)
    )
    write_csv(out, header, rows)
    if figure:
        from .plotting import plot_populations
        plot_populations(traj.times, traj.populations, figure, traj.omega4, traj.power)


def cmd_evolve(args, molecule, constants):
    tmax = args.tmax if args.tmax is not None else 20.0 / gamma0(molecule, constants)
    base = dict(lmax=args.lmax, initial=args.initial, temp=args.temp)
    if not args.sweep:
        traj = _run_evolve(molecule, constants, tmax=tmax, grid=args.grid,
                           npoints=args.npoints, engine=args.engine, **base)
        _write_trajectory(traj, args.out, _figure_path(args))
        return

    name, _, values = args.sweep.partition("=")
    parse = {"initial": _initial_level, "temp": float, "lmax": int}.get(name)
    if parse is None or not values:
        raise ValueError("--sweep expects initial=..., temp=... or lmax=... with comma-separated values")
    if args.out in (None, "-"):
        raise ValueError("--sweep writes one file per value and needs --out")
    out = Path(args.out)
    jobs = []
    for raw in values.split(","):
        params = dict(base, **{name: parse(raw)})
        target = out.with_name(f"{out.stem}_{name}{raw}{out.suffix}")
        jobs.append((params, target))

    def run(job):
        params, target = job
        traj = _run_evolve(molecule, constants, tmax=tmax, grid=args.grid,
                           npoints=args.npoints, engine=args.engine, **params)
        figure = target.with_suffix(".png") if args.figure else None
        _write_trajectory(traj, target, figure)
        return target

    with ThreadPoolExecutor() as pool:
        for target in pool.map(run, jobs):
            print(target)


def cmd_fig2(args, molecule, constants):
    from .constants import NATURAL, NATURAL_MOLECULE

    t = time_grid(args.tmax, args.npoints, args.grid)
    ref = three_level_reference(t, NATURAL_MOLECULE, NATURAL)
    rows = (
        [ti, *p, w4, pw]
        for ti, p, w4, pw in zip(ref.times, ref.populations, ref.omega4, ref.power)
    )
    write_csv(args.out, ["t", "p_0", "p_1", "p_2", "omega4", "power"], rows)
    figure = _figure_path(args, default_from_out=True)
    if figure:
        from .plotting import plot_fig2
        plot_fig2(ref.times, ref.omega4, ref.power, figure)


def cmd_classical(args, molecule, constants):
    tau = args.tau if args.tau is not None else radiation_reaction_time(molecule, constants)
    t = time_grid(args.tmax, args.npoints, args.grid)
    traj = classical_evolve(args.omega0, tau, t)
    power = classical_power(traj.omega, molecule, constants)
    write_csv(args.out, ["t", "omega", "power"], zip(traj.times, traj.omega, power))
    figure = _figure_path(args)
    if figure:
        from .plotting import plot_classical
        plot_classical(traj.times, traj.omega, traj.omega_rk, figure)


def cmd_climit(args, molecule, constants):
    ls = list(range(1, args.lmax + 1))
    ratio = [classical_limit_ratio(l, molecule, constants) for l in ls]
    write_csv(args.out, ["l", "ratio", "error"], ((l, r, 1.0 - r) for l, r in zip(ls, ratio)))
    figure = _figure_path(args)
    if figure:
        from .plotting import plot_climit
        plot_climit(ls, ratio, figure)


def cmd_short_time(args, molecule, constants):
    cutoff = CutoffSpec(args.cutoff) if args.cutoff else CutoffSpec.default(constants)
    cutoff.check(args.level, molecule, constants)
    beta = short_time_beta(args.level, cutoff, molecule, constants)
    # stay inside both omega_c t << 1 and beta t^2 << 1
    tmax = args.tmax if args.tmax is not None else 0.01 * min(1.0 / cutoff.omega_c, 1.0 / np.sqrt(beta))
    rows = []
    for t in np.linspace(0.0, tmax, args.npoints):
        survival = short_time_excited_probability(args.level, t, cutoff, molecule, constants)
        quad = transition_probability_integral(args.level, t, cutoff, molecule, constants)
        torque = short_time_torque(args.level, t, cutoff, molecule, constants)
        rows.append((t, survival, beta * t * t, quad, torque))
    write_csv(args.out, ["t", "survival", "decayed", "decayed_quad", "torque"], rows)


def cmd_oracle_check(args, molecule, constants):
    grid = QuadratureGrid(args.nodes, args.nodes)
    rows = []
    for l in range(1, args.lmax + 1):
        for m in range(-l, l + 1):
            for mp in range(-(l - 1), l):
                closed = transition_dipole(l, m, l - 1, mp).vector
                quad = transition_dipole_quadrature(l, m, l - 1, mp, grid=grid).vector
                for i, axis in enumerate("xyz"):
                    for part, get in (("re", np.real), ("im", np.imag)):
                        a, b = float(get(closed[i])), float(get(quad[i]))
                        rows.append((l, m, mp, f"{axis}_{part}", a, b, abs(a - b)))
    write_csv(args.out, ["l", "m", "mprime", "component", "closed", "quad", "absdiff"], rows)


def cmd_check(args, molecule, constants):
    argv = [args.csv, "--tol", str(args.tol)] + (["--thermal"] if args.thermal else [])
    code = checker.main(argv)
    if code:
        raise GuardError(f"{args.csv} violates its invariants", guard="roundtrip")


# --- parser --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file (units, dipole_cm, inertia_kgm2, ...)")
    common.add_argument("--out", default="-", help="output CSV path (default: stdout)")

    grid = _Parser(add_help=False)
    grid.add_argument("--npoints", type=_positive(int), default=500)
    grid.add_argument("--grid", choices=("geometric", "linear"), default="geometric")

    figure = _Parser(add_help=False)
    figure.add_argument("--figure", help="also render a PNG figure to this path")

    parser = _Parser(
        prog="rotofrict",
        description="Rotational friction of a polar rotor through spontaneous emission.",
        epilog=DEFAULTS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", parents=[common], help="transition rates per level")
    p.add_argument("--lmax", type=_positive(int), required=True)
    p.add_argument("--temp", type=_non_negative(), default=0.0)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("evolve", parents=[common, grid, figure], help="master-equation trajectory")
    p.add_argument("--lmax", type=_positive(int), required=True)
    p.add_argument("--initial", type=_initial_level, required=True, help="initial level, e.g. l=5")
    p.add_argument("--temp", type=_non_negative(), default=0.0)
    p.add_argument("--tmax", type=_positive(), default=None, help="end time (default 20/gamma0)")
    p.add_argument("--engine", choices=("auto", "cascade", "rk", "expm"), default="auto")
    p.add_argument("--sweep", help="fan out over one parameter, e.g. temp=0,1,2")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("fig2", parents=[common, grid, figure],
                       help="three-level reference cascade in natural units")
    p.add_argument("--tmax", type=_positive(), default=20.0)
    p.add_argument("--no-figure", action="store_true", help="skip the PNG written beside --out")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("classical", parents=[common, grid, figure],
                       help="classical radiation-reaction spin-down")
    p.add_argument("--omega0", type=_positive(), required=True)
    p.add_argument("--tau", type=_positive(), default=None,
                   help="radiation-reaction time (default from the rotor)")
    p.add_argument("--tmax", type=_positive(), required=True)
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("climit", parents=[common, figure], help="quantum/classical power ratio")
    p.add_argument("--lmax", type=_positive(int), required=True)
    p.set_defaults(func=cmd_climit)

    p = sub.add_parser("short-time", parents=[common], help="non-Markovian short-time decay")
    p.add_argument("--level", type=_positive(int), default=1)
    p.add_argument("--tmax", type=_positive(), default=None,
                   help="end time (default 0.01 * min(1/omega_c, 1/sqrt(beta)))")
    p.add_argument("--npoints", type=_positive(int), default=11)
    p.add_argument("--cutoff", type=_positive(), default=None, help="override omega_c")
    p.set_defaults(func=cmd_short_time)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="closed-form vs quadrature transition dipoles")
    p.add_argument("--lmax", type=_positive(int), default=5)
    p.add_argument("--nodes", type=_positive(int), default=64)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("check", parents=[common], help="re-verify an evolve CSV")
    p.add_argument("csv")
    p.add_argument("--thermal", action="store_true")
    p.add_argument("--tol", type=_positive(), default=1e-10)
    p.set_defaults(func=cmd_check)
    return parser


def _guard_name(exc: BaseException) -> str:
    if isinstance(exc, GuardError):
        return exc.guard
    if isinstance(exc, PerturbationBreakdown):
        return "perturbation_breakdown"
    if isinstance(exc, RegimeWarning):
        return "short_time_regime"
    if isinstance(exc, OSError):
        return "io"
    return "invalid_input"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        molecule, constants = load_config(args.config)
        with warnings.catch_warnings():
            warnings.simplefilter("error", RegimeWarning)
            args.func(args, molecule, constants)
    except (GuardError, RegimeWarning, ValueError, OSError) as exc:
        message = " ".join(str(exc).split())
        sys.stderr.write(f"error: guard={_guard_name(exc)} message={message}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
