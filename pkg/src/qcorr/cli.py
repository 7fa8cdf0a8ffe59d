"""Command-line entry point: ``qcorr <group> <command> [options]``.

Reports go to stdout (or files for ``figures all``) as CSV or JSON; short
human-readable summaries go to stderr. Exit status is 2 for bad flags, 1 for
numeric failures such as an invalid state file, 0 otherwise.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import report as rp
from .contextuality import (
    cabello_beta,
    chsh_scan,
    noncontextual_assignment_search,
)
from .densop import ConvergenceError
from .discord import discord, geometric_discord, nearest_classical_check, werner_discord
from .leggett_garg import (
    LgConfig,
    elgi_theta_sweep,
    kn_analytic,
    kn_circuit,
    lg_bounds,
    phase_grid,
    violation_margin,
)
from .observables import LINE_SIGNS, mermin_square, pseudo_spin_bell_states
from .states import InvalidStateError, pure, random_density_matrix, swap_subsystems, werner


class CliError(Exception):
    """Numeric or input failure reported with exit status 1."""


def _seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QCORR_SEED")
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise CliError(f"QCORR_SEED must be an integer, got {env!r}") from None


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _params(args, *names) -> dict:
    return {n: getattr(args, n) for n in names}


def cmd_mermin(args, seed):
    rng = np.random.default_rng(0 if seed is None else seed)
    rho = random_density_matrix(2, rng)
    rows = []
    for name, line in mermin_square().lines():
        rows.append((name, " ".join(str(o) for o in line), LINE_SIGNS[name]))
    beta = cabello_beta(rho, args.visibility)
    rows.append(("beta", "random state", beta))
    _note(f"beta = {rp.fmt(beta)} (noncontextual bound 4)")
    return rp.CorrelationReport("cabello_beta", _params(args, "visibility"), ("line", "observables", "value"), rows)


def cmd_assignments(args, seed):
    res = noncontextual_assignment_search()
    _note(f"satisfying: {res.satisfying} / {res.total_assignments}")
    _note(f"max satisfied lines: {res.max_satisfied} / 6")
    return rp.CorrelationReport(
        "cabello_beta", {}, ("total_assignments", "satisfying", "max_satisfied"),
        [(res.total_assignments, res.satisfying, res.max_satisfied)],
    )


def cmd_chsh(args, seed):
    if args.grid < 2:
        raise CliError(f"--grid must be at least 2, got {args.grid}")
    if args.infile:
        states = [rp.read_state_file(args.infile)]
    else:
        states = [pure(v) for v in pseudo_spin_bell_states()]
    rows = []
    for k, rho in enumerate(states):
        if rho.qubits != 2:
            raise CliError("CHSH scan needs a two-qubit state")
        beta, eta, value = chsh_scan(rho, args.grid)
        rows.append((k, beta, eta, value))
    best = max(r[3] for r in rows)
    _note(f"max I = {rp.fmt(best)} (Tsirelson {rp.fmt(2 * math.sqrt(2))}, classical 2)")
    return rp.CorrelationReport("chsh", _params(args, "grid", "infile"), ("state", "beta", "eta", "I"), rows)


def cmd_lgi_sweep(args, seed):
    if args.n_min < 3 or args.n_max < args.n_min:
        raise CliError(f"need 3 <= n-min <= n-max, got {args.n_min}..{args.n_max}")
    if args.points < 2:
        raise CliError(f"--points must be at least 2, got {args.points}")
    if args.t2 is None:
        rep = rp.kstring_report(args.n_min, args.n_max, args.points)
        rep.params.update(_params(args, "t2", "omega"))
        return rep
    if args.t2 <= 0 or args.omega <= 0:
        raise CliError(f"--t2 and --omega must be positive, got {args.t2}, {args.omega}")
    # phase = omega * dt with the step fixed by omega, so dt / t2 varies along the sweep
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        b = lg_bounds(n)
        for ph in phase_grid(args.points):
            dt = ph / args.omega if ph > 0 else np.finfo(float).tiny
            kn = kn_circuit(LgConfig(n, args.omega, dt), t2=args.t2)
            rows.append((n, float(ph), kn, b.lower, b.upper, float(violation_margin(n, kn))))
    return rp.CorrelationReport(
        "kn_sweep", _params(args, "n_min", "n_max", "points", "t2", "omega"),
        ("n", "phase", "K_n", "lower", "upper", "margin"), rows,
    )


def cmd_lgi_point(args, seed):
    cfg = LgConfig.from_phase(args.n, args.phase)
    kn = kn_analytic(cfg)
    b = lg_bounds(args.n)
    margin = float(violation_margin(args.n, kn))
    _note(f"K{args.n} = {rp.fmt(kn)}")
    _note(f"bounds ({rp.fmt(b.lower)}, {rp.fmt(b.upper)})")
    _note(f"margin {rp.fmt(margin)}")
    return rp.CorrelationReport(
        "kn_sweep", _params(args, "n", "phase"), ("n", "phase", "K_n", "lower", "upper", "margin"),
        [(args.n, args.phase, kn, b.lower, b.upper, margin)],
    )


def cmd_elgi(args, seed):
    if args.points < 2:
        raise CliError(f"--points must be at least 2, got {args.points}")
    rows = [(theta, d) for _, theta, d in elgi_theta_sweep(args.n, args.points)]
    neg = sum(d < 0 for _, d in rows)
    _note(f"negative deficits: {neg} / {len(rows)} (min {rp.fmt(min(d for _, d in rows))})")
    return rp.CorrelationReport("elgi_sweep", _params(args, "n", "points"), ("theta", f"D_{args.n}"), rows)


def cmd_werner(args, seed):
    if args.sweep is not None:
        if args.sweep < 2:
            raise CliError(f"--sweep must be at least 2, got {args.sweep}")
        rep = rp.discord_purity_report(args.sweep)
        rep.params = _params(args, "eps", "sweep")
        _note(f"max |D_W - 2 D_G| = {rp.fmt(max(r[3] for r in rep.rows))}")
        return rep
    eps = args.eps
    d = werner_discord(eps)
    numeric = discord(werner(eps)).discord
    g = geometric_discord(werner(eps))
    _note(f"D_W = {rp.fmt(d)}, D^G_W = {rp.fmt(g)}")
    return rp.CorrelationReport(
        "discord_point", _params(args, "eps", "sweep"), ("eps", "D_W", "D_W_numeric", "D_G"),
        [(eps, d, numeric, g)],
    )


def _two_qubit_file(path):
    rho = rp.read_state_file(path)
    if rho.qubits != 2:
        raise CliError(f"{path}: discord needs a two-qubit state, got dimension {rho.dim}")
    return rho


def cmd_discord_state(args, seed):
    rho = _two_qubit_file(args.infile)
    res = discord(rho, args.side)
    _note(f"D = {rp.fmt(res.discord)} (measured side {args.side})")
    a = res.argmax
    return rp.CorrelationReport(
        "discord_point", _params(args, "infile", "side"),
        ("side", "mutual_info", "classical_corr", "discord", "theta", "phi"),
        [(args.side, res.mutual_info, res.classical_corr, res.discord, a.theta, a.phi)],
    )


def cmd_geometric(args, seed):
    rho = _two_qubit_file(args.infile)
    g = geometric_discord(rho, args.side)
    columns = ["side", "D_G"]
    row = [args.side, g]
    if args.check:
        view = rho if args.side == "A" else swap_subsystems(rho)
        columns.append("nearest_classical")
        row.append(nearest_classical_check(view, args.samples, 0 if seed is None else seed))
    _note(f"D_G = {rp.fmt(g)}")
    return rp.CorrelationReport(
        "geometric_discord", _params(args, "infile", "side", "check", "samples"), tuple(columns), [tuple(row)]
    )


def cmd_figures(args, seed):
    written = rp.figures_all(args.out, seed)
    for path in written.values():
        _note(f"wrote {path}")
    return None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=None, help="overrides QCORR_SEED")

    p = argparse.ArgumentParser(prog="qcorr", description="Quantum correlation calculators.")
    groups = p.add_subparsers(dest="group", required=True)

    def sub(parent, name, func, help_):
        s = parent.add_parser(name, parents=[common], help=help_)
        s.set_defaults(func=func)
        return s

    ctx = groups.add_parser("contextuality", help="Mermin square and pseudo-spin CHSH")
    cs = ctx.add_subparsers(dest="command", required=True)
    s = sub(cs, "mermin", cmd_mermin, "square lines and beta for a seeded random state")
    s.add_argument("--visibility", type=float, default=1.0)
    sub(cs, "assignments", cmd_assignments, "exhaustive noncontextual value assignments")
    s = sub(cs, "chsh", cmd_chsh, "CHSH maximum over measurement angles")
    s.add_argument("--grid", type=int, default=360)
    s.add_argument("--in", dest="infile", default=None, help="state file (default: pseudo-spin Bell states)")

    lgi = groups.add_parser("lgi", help="Leggett-Garg strings")
    ls = lgi.add_subparsers(dest="command", required=True)
    s = sub(ls, "sweep", cmd_lgi_sweep, "K_n over n and phase")
    s.add_argument("--n-min", type=int, default=3)
    s.add_argument("--n-max", type=int, default=8)
    s.add_argument("--points", type=int, default=512)
    s.add_argument("--t2", type=float, default=None)
    s.add_argument("--omega", type=float, default=1.0)
    s = sub(ls, "point", cmd_lgi_point, "K_n at one phase")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--phase", type=float, required=True)

    el = groups.add_parser("elgi", help="entropic Leggett-Garg deficit")
    es = el.add_subparsers(dest="command", required=True)
    s = sub(es, "sweep", cmd_elgi, "deficit over theta in [0, pi]")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--points", type=int, default=181)

    dc = groups.add_parser("discord", help="quantum and geometric discord")
    ds = dc.add_subparsers(dest="command", required=True)
    s = sub(ds, "werner", cmd_werner, "Werner-state discord")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--eps", type=float)
    g.add_argument("--sweep", type=int, metavar="P")
    s = sub(ds, "state", cmd_discord_state, "discord of a state file")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--side", choices=("A", "B"), default="A")
    s = sub(ds, "geometric", cmd_geometric, "geometric discord of a state file")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--side", choices=("A", "B"), default="A")
    s.add_argument("--check", action="store_true", help="add the nearest-classical search bound")
    s.add_argument("--samples", type=int, default=32)

    fg = groups.add_parser("figures", help="figure data files")
    fs = fg.add_subparsers(dest="command", required=True)
    s = sub(fs, "all", cmd_figures, "write every figure CSV")
    s.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        seed = _seed(args)
        rep = args.func(args, seed)
        if rep is not None:
            rep.metadata = rp.metadata(seed)
            sys.stdout.write(rep.render(args.format))
    except (CliError, InvalidStateError, rp.StateFileError, ConvergenceError, ValueError, OSError) as exc:
        _note(f"error: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
