"""Command-line front end.

Figure subcommands write CSV data (one file per panel); ``verify`` and
``uncertainty`` print JSON. Exit codes: 0 success, 1 usage error,
2 tolerance violation, 3 I/O error.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._errors import DomainError, LagtimeError, UsageError
from .arrival import ArrivalQuery, StateCoefficients, toa_amplitude_mode, toa_amplitude_quadrature
from .arrival import toa_density_scan
from .modes import ModeSpec, PacketSpec, mode_table
from .operators import (
    TIME_VARIANCE_RTOL,
    energy_moments,
    element_table_quadrature,
    energy_moments_quadrature,
    hamiltonian_matrix,
    hamiltonian_sq_matrix,
    spectrum_truncated,
    time_variance_closed_form,
    time_variance_quadrature,
    uncertainty_report,
)
from .kernels import BACKEND
from .quadrature import Grid1D
from .timerep import psi_closed_form, psi_numeric

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE, EXIT_IO = 0, 1, 2, 3

TOLERANCES = {
    "orthonormality_max_error": 1e-11,
    "band_leakage_max": 1e-11,
    "band_entry_max_error": 1e-11,
    "energy_moments_max_rel_error": 1e-11,
    "variance_identity_max_error": 1e-10,
    "psi_closed_vs_numeric_max_error": 1e-6,
    "time_variance_max_rel_discrepancy": TIME_VARIANCE_RTOL,
    "arrival_closed_vs_quadrature_max_error": 1e-8,
    "spectrum_max_rel_residual": 1e-9,
}
# heisenberg margin is checked as a lower bound
HEISENBERG_FLOOR = -1e-9

FIGURE_DEFAULTS = {
    "fig1": {"alpha": 2.0, "omega_grid": "0:20:1001", "grid": "-6:6:1201"},
    "fig2": {"alpha": 20.0, "omega_grid": "0:60:1201", "grid": "-0.6:0.6:1201"},
    "fig3": {"alpha_grid": "2:40:77"},
    "fig4": {"alpha_grid": "2:40:77"},
    "fig5": {"alpha": 2.0, "grid": "-8:8:801"},
    "fig6": {"alpha": 20.0, "grid": "-8:8:801"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid_spec(text):
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX:COUNT, got {text!r}") from None
    if not (count >= 2 and hi > lo):
        raise argparse.ArgumentTypeError(f"need MAX > MIN and COUNT >= 2, got {text!r}")
    return lo, hi, count


def _int_list(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _usage(flag, message):
    return UsageError(f"{flag}: {message}")


def _check_common(args, min_alpha=None):
    if getattr(args, "omega0", 1.0) <= 0:
        raise _usage("--omega0", "must be > 0")
    alpha = getattr(args, "alpha", None)
    if alpha is not None:
        if min_alpha is not None and alpha < min_alpha:
            raise _usage("--alpha", f"this command requires alpha >= {min_alpha:g}, got {alpha:g}")
        if alpha <= -1:
            raise _usage("--alpha", f"must be > -1, got {alpha:g}")
    for flag in ("n", "m"):
        v = getattr(args, flag, None)
        if v is not None and v < 0:
            raise _usage(f"--{flag}", "must be >= 0")
    s = getattr(args, "s", None)
    if s is not None and s not in (1, -1):
        raise _usage("--s", "must be +1 or -1")


def _fmt(v):
    return format(float(v), ".16e")


def write_csv(path, header, columns):
    """Write columns as CSV with 17 significant digits and LF line endings."""
    rows = np.column_stack([np.asarray(c, dtype=np.float64) for c in columns])
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _linspace(spec):
    lo, hi, count = spec
    return np.linspace(lo, hi, count)


# figures ---------------------------------------------------------------


def _fig_modes(args, tag):
    _check_common(args)
    nlist = list(range(args.nmodes))
    omega = _linspace(args.omega_grid) * args.omega0
    phis = mode_table(nlist[-1], args.alpha, args.omega0, omega)
    offsets = _linspace(args.grid) / args.omega0
    t = args.tau + offsets
    dens = [np.abs(psi_closed_form(PacketSpec(ModeSpec(n, args.alpha, args.omega0), args.tau), t)) ** 2
            for n in nlist]
    out = Path(args.out)
    return [
        write_csv(out / f"{tag}_energy.csv", ["omega"] + [f"phi_{n}" for n in nlist],
                  [omega] + [phis[n] for n in nlist]),
        write_csv(out / f"{tag}_time.csv", ["t"] + [f"psi2_{n}" for n in nlist], [t] + dens),
    ]


def _fig_alpha_scan(args, tag, quantity):
    _check_common(args)
    alphas = _linspace(args.alpha_grid)
    if alphas[0] < 2:
        raise _usage("--alpha-grid", "time moments require alpha >= 2")
    cols = [alphas]
    names = ["alpha"]
    for n in args.n_list:
        if n < 0:
            raise _usage("--n-list", "mode indices must be >= 0")
        vals = []
        for a in alphas:
            rep = uncertainty_report(ModeSpec(n, float(a), args.omega0))
            vals.append(rep.delta_T if quantity == "deltaT" else rep.product)
        cols.append(vals)
        names.append(f"{quantity}_n{n}")
    return [write_csv(Path(args.out) / f"{tag}.csv", names, cols)]


def _fig_arrival(args, tag):
    _check_common(args)
    u = _linspace(args.grid)
    tau = args.s * args.x + u / args.omega0
    state = StateCoefficients.single(args.m, args.alpha, args.omega0)
    dens = toa_density_scan(args.n, args.alpha, args.omega0, args.x, args.s, state, Grid1D(tau))
    return [write_csv(Path(args.out) / f"{tag}.csv", ["tau", "density"], [tau, dens])]


def run_figure(args):
    tag = args.command
    Path(args.out).mkdir(parents=True, exist_ok=True)
    if tag in ("fig1", "fig2"):
        paths = _fig_modes(args, tag)
    elif tag == "fig3":
        paths = _fig_alpha_scan(args, tag, "deltaT")
    elif tag == "fig4":
        paths = _fig_alpha_scan(args, tag, "product")
    else:
        paths = _fig_arrival(args, tag)
    for p in paths:
        print(p)
    return EXIT_OK


# verification ------------------------------------------------------------


def verify_report(alpha=2.0, nmax=20, omega0=1.0):
    """Run every consistency check and return a flat dict of residuals."""
    if alpha < 2:
        raise _usage("--alpha", f"the uncertainty suite requires alpha >= 2, got {alpha:g}")
    if not 1 <= nmax <= 64:
        raise _usage("--nmax", f"must lie in [1, 64], got {nmax}")
    res = {}

    gram = element_table_quadrature(0, nmax, alpha)
    res["orthonormality_max_error"] = float(np.max(np.abs(gram - np.eye(nmax + 1))))

    # matrix elements of omega and omega^2 by quadrature (units of omega0)
    q1 = element_table_quadrature(1, nmax, alpha)
    q2 = element_table_quadrature(2, nmax, alpha)
    idx = np.arange(nmax + 1)
    dist = np.abs(idx[:, None] - idx[None, :])
    res["band_leakage_max"] = float(max(np.max(np.abs(q1[dist >= 2])), np.max(np.abs(q2[dist >= 3]))))
    d1 = hamiltonian_matrix(nmax + 1, alpha).to_dense()
    d2 = hamiltonian_sq_matrix(nmax + 1, alpha).to_dense()
    res["band_entry_max_error"] = float(max(
        np.max(np.abs(q1 - d1) / np.maximum(1.0, np.abs(d1))),
        np.max(np.abs(q2 - d2) / np.maximum(1.0, np.abs(d2))),
    ))

    worst = 0.0
    for n in range(nmax + 1):
        mode = ModeSpec(n, alpha, omega0)
        em, eq = energy_moments(mode), energy_moments_quadrature(mode)
        for a, b in ((em.mean, eq.mean), (em.second, eq.second), (em.var, eq.var)):
            worst = max(worst, abs(a - b) / abs(a))
    res["energy_moments_max_rel_error"] = worst

    # var_H(n) = sum of squared couplings in column n (interior rows only)
    full = hamiltonian_matrix(nmax + 2, alpha).to_dense()
    var_err = 0.0
    for n in range(nmax + 1):
        off = np.sum(full[:, n] ** 2) - full[n, n] ** 2
        var_err = max(var_err, abs(off - energy_moments(ModeSpec(n, alpha)).var))
    res["variance_identity_max_error"] = float(var_err)

    nt = min(nmax, 6)
    psi_err = 0.0
    t = Grid1D(np.linspace(-30, 30, 65) / omega0)
    for n in range(nt + 1):
        packet = PacketSpec(ModeSpec(n, alpha, omega0), 0.0)
        psi_err = max(psi_err, float(np.max(np.abs(psi_numeric(packet, t).values
                                                   - psi_closed_form(packet, t.points)))))
    res["psi_closed_vs_numeric_max_error"] = psi_err

    disc = 0.0
    margin = math.inf
    for n in range(nt + 1):
        mode = ModeSpec(n, alpha, omega0)
        closed = time_variance_closed_form(mode)
        quad = time_variance_quadrature(mode)
        res[f"var_T_closed_form_n{n}"] = closed
        res[f"var_T_quadrature_n{n}"] = quad
        disc = max(disc, abs(closed - quad) / abs(quad))
    res["time_variance_max_rel_discrepancy"] = disc
    for n in range(nmax + 1):
        margin = min(margin, uncertainty_report(ModeSpec(n, alpha, omega0)).product - 0.5)
    res["heisenberg_margin_min"] = margin

    arr = 0.0
    for n in range(5):
        for m in range(5):
            state = StateCoefficients.single(m, alpha, omega0)
            for u in np.linspace(-5, 5, 11):
                q = ArrivalQuery.build(n, alpha, omega0, u / omega0, 0.0, 1)
                arr = max(arr, abs(toa_amplitude_mode(q, m) - toa_amplitude_quadrature(q, state)))
    res["arrival_closed_vs_quadrature_max_error"] = arr

    spec = spectrum_truncated(max(nmax, 2), alpha, omega0)
    res["spectrum_max_rel_residual"] = spec.max_residual

    ok = all(res[k] <= tol for k, tol in TOLERANCES.items()) and margin >= HEISENBERG_FLOOR
    out = {"version": __version__, "backend": BACKEND, "alpha": float(alpha), "nmax": int(nmax)}
    out.update(res)
    out.update({f"tol_{k}": v for k, v in TOLERANCES.items()})
    out["tol_heisenberg_margin_min"] = HEISENBERG_FLOOR
    out["pass"] = bool(ok)
    return out


def _emit_json(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_verify(args):
    report = verify_report(args.alpha, args.nmax, args.omega0)
    _emit_json(report, args.out)
    return EXIT_OK if report["pass"] else EXIT_TOLERANCE


def run_uncertainty(args):
    _check_common(args, min_alpha=2.0)
    rep = uncertainty_report(ModeSpec(args.n, args.alpha, args.omega0), args.tau)
    _emit_json(rep.as_dict(), args.out)
    return EXIT_OK


def run_spectrum(args):
    _check_common(args)
    if not 2 <= args.nmax <= 2048:
        raise _usage("--nmax", f"must lie in [2, 2048], got {args.nmax}")
    spec = spectrum_truncated(args.nmax, args.alpha, args.omega0)
    target = args.out or sys.stdout
    _write_or_print(target, ["index", "eigenvalue"], [np.arange(args.nmax), spec.eigenvalues])
    return EXIT_OK


def run_modes(args):
    _check_common(args)
    omega = _linspace(args.grid) * args.omega0
    phi = mode_table(args.n, args.alpha, args.omega0, omega)[args.n]
    _write_or_print(args.out or sys.stdout, ["omega", f"phi_{args.n}"], [omega, phi])
    return EXIT_OK


def run_arrival(args):
    _check_common(args)
    u = _linspace(args.grid)
    tau = args.s * args.x + u / args.omega0
    amps = np.array([toa_amplitude_mode(ArrivalQuery.build(args.n, args.alpha, args.omega0, tv, args.x, args.s),
                                        args.m) for tv in tau])
    _write_or_print(args.out or sys.stdout, ["tau", "re", "im", "density"],
                    [tau, amps.real, amps.imag, np.abs(amps) ** 2])
    return EXIT_OK


def _write_or_print(target, header, columns):
    if target is sys.stdout:
        rows = np.column_stack(columns)
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(_fmt(v) for v in row) + "\n")
    else:
        write_csv(target, header, columns)


def build_parser():
    parser = _Parser(prog="lagtime", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, alpha=2.0):
        p.add_argument("--alpha", type=float, default=alpha, help=f"shape exponent (default {alpha:g})")
        p.add_argument("--omega0", type=float, default=1.0, help="energy scale (default 1)")

    for tag in ("fig1", "fig2"):
        d = FIGURE_DEFAULTS[tag]
        p = sub.add_parser(tag, help=f"mode profiles in energy and time, alpha={d['alpha']:g}")
        common(p, d["alpha"])
        p.add_argument("--nmodes", type=int, default=4, help="modes n = 0..NMODES-1 (default 4)")
        p.add_argument("--tau", type=float, default=0.0)
        p.add_argument("--omega-grid", type=_grid_spec, default=_grid_spec(d["omega_grid"]),
                       help=f"omega/omega0 grid MIN:MAX:COUNT (default {d['omega_grid']})")
        p.add_argument("--grid", type=_grid_spec, default=_grid_spec(d["grid"]),
                       help=f"omega0 (t - tau) grid (default {d['grid']})")
        p.add_argument("--out", default=".", help="output directory")
    for tag, what in (("fig3", "time width"), ("fig4", "uncertainty product")):
        p = sub.add_parser(tag, help=f"{what} against alpha")
        p.add_argument("--omega0", type=float, default=1.0)
        p.add_argument("--alpha-grid", type=_grid_spec, default=_grid_spec(FIGURE_DEFAULTS[tag]["alpha_grid"]),
                       help="alpha grid MIN:MAX:COUNT (default 2:40:77, step 0.5)")
        p.add_argument("--n-list", type=_int_list, default=[0, 3], help="mode indices (default 0,3)")
        p.add_argument("--out", default=".", help="output directory")
    for tag in ("fig5", "fig6"):
        d = FIGURE_DEFAULTS[tag]
        p = sub.add_parser(tag, help=f"arrival density for m=1, n=3, alpha={d['alpha']:g}")
        common(p, d["alpha"])
        p.add_argument("--m", type=int, default=1)
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--x", type=float, default=0.0)
        p.add_argument("--s", type=int, default=1)
        p.add_argument("--grid", type=_grid_spec, default=_grid_spec(d["grid"]),
                       help=f"omega0 (tau - s x) grid (default {d['grid']})")
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("verify", help="run all consistency checks, print JSON")
    common(p)
    p.add_argument("--nmax", type=int, default=20)
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")

    p = sub.add_parser("uncertainty", help="energy/time moments of one mode, JSON")
    common(p)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("spectrum", help="eigenvalues of the truncated Hamiltonian, CSV")
    common(p)
    p.add_argument("--nmax", type=int, default=50)
    p.add_argument("--out", default=None)

    p = sub.add_parser("modes", help="one mode on an energy grid, CSV")
    common(p)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--grid", type=_grid_spec, default=_grid_spec("0:20:401"),
                   help="omega/omega0 grid (default 0:20:401)")
    p.add_argument("--out", default=None)

    p = sub.add_parser("arrival", help="arrival amplitude over a tau grid, CSV")
    common(p)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--grid", type=_grid_spec, default=_grid_spec("-8:8:801"),
                   help="omega0 (tau - s x) grid (default -8:8:801)")
    p.add_argument("--out", default=None)
    return parser


_HANDLERS = {
    "verify": run_verify,
    "uncertainty": run_uncertainty,
    "spectrum": run_spectrum,
    "modes": run_modes,
    "arrival": run_arrival,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = _HANDLERS.get(args.command, run_figure)
    try:
        return handler(args)
    except (UsageError, DomainError) as exc:
        print(f"lagtime {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"lagtime {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except LagtimeError as exc:
        print(f"lagtime {args.command}: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
