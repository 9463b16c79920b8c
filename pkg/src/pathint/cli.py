"""Reproducible experiment driver.

Subcommands: ``propagate`` (one polarization trace), ``sweep-l`` (fit and
extrapolate over a family of memory lengths), ``fgr`` (closed-form rate
predictions), ``verify`` (oracle vs compressed diff report).

Configuration is a flat key=value text file, optionally overridden by
repeated ``--set key=value`` flags; numbers are given in the units the
figures quote (ueV, nm, K, ps).  Output is CSV with the full configuration
embedded in ``#`` header lines; floats use shortest round-trip formatting
so identical configs produce byte-identical files.
"""

import argparse
import csv
import sys

import numpy as np

from . import __version__
from .bath import BathSpec, QuadratureError, build_cumulant_table
from .system import build_h0_case1, build_h0_case2, step_matrix
from .oracle import CapacityError, trace_full
from .compressed import run_polarization
from .trace import PolarizationTrace
from .fit import FitError, fit_exponentials
from .extrapolate import ParameterFamily, power_law_fit, extrapolation_error

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_DEFAULTS = {
    "case": "1",
    "omega_x_uev": "0", "omega_c_uev": "0", "g_uev": "100",
    "omega1_uev": "0", "omega2_uev": "0", "g1_uev": "500", "g2_uev": "500",
    "deformation_ev": "-6.5",
    "sound_velocity_ms": "4600",
    "mass_density_gcm3": "5.65",
    "temperature_k": "50",
    "confinement_nm": "3.3",
    "separation_nm": "0",
    "dt_ps": "", "memory_ps": "",
    "L": "12", "l_list": "",
    "n_steps": "", "t_end_ps": "",
    "eps": "1e-8",
    "excitation": "1", "measure": "1",
    "n_terms": "", "fit_start_ps": "", "fit_end_ps": "",
    "beta": "2", "free_beta": "0",
    "g_list_uev": "", "d_list_nm": "",
    "synthetic": "0", "synthetic_gamma_inf": "0",
    "synthetic_alpha": "0", "synthetic_beta": "2",
}


class UsageError(Exception):
    pass


def load_config(path=None, overrides=()):
    cfg = dict(_DEFAULTS)
    if path:
        try:
            with open(path) as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}")
        for ln, line in enumerate(lines, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in cfg:
                raise UsageError(f"{path}:{ln}: unknown key '{key}'")
            cfg[key] = val
    for item in overrides:
        if "=" not in item:
            raise UsageError(f"--set needs key=value, got '{item}'")
        key, val = (s.strip() for s in item.split("=", 1))
        if key not in cfg:
            raise UsageError(f"unknown key '{key}'")
        cfg[key] = val
    return cfg


def _get_float(cfg, key):
    try:
        return float(cfg[key])
    except ValueError:
        raise UsageError(f"'{key}' must be a number, got '{cfg[key]}'")


def _get_int(cfg, key):
    try:
        return int(cfg[key])
    except ValueError:
        raise UsageError(f"'{key}' must be an integer, got '{cfg[key]}'")


def _int_list(cfg, key):
    raw = cfg[key].replace(",", " ").split()
    try:
        return [int(s) for s in raw]
    except ValueError:
        raise UsageError(f"'{key}' must be a list of integers")


def _float_list(cfg, key):
    raw = cfg[key].replace(",", " ").split()
    try:
        return [float(s) for s in raw]
    except ValueError:
        raise UsageError(f"'{key}' must be a list of numbers")


def build_bath(cfg):
    case = _get_int(cfg, "case")
    l_nm = _get_float(cfg, "confinement_nm")
    lengths = (l_nm,) if case == 1 else (l_nm, l_nm)
    try:
        return BathSpec(
            deformation_diff=_get_float(cfg, "deformation_ev"),
            sound_velocity=_get_float(cfg, "sound_velocity_ms"),
            mass_density=_get_float(cfg, "mass_density_gcm3"),
            temperature=_get_float(cfg, "temperature_k"),
            confinement_lengths=lengths,
            dot_separation=_get_float(cfg, "separation_nm"))
    except ValueError as exc:
        raise UsageError(str(exc))


def build_system(cfg):
    case = _get_int(cfg, "case")
    if case == 1:
        return build_h0_case1(_get_float(cfg, "omega_x_uev") * 1e-3,
                              _get_float(cfg, "omega_c_uev") * 1e-3,
                              _get_float(cfg, "g_uev") * 1e-3)
    if case == 2:
        return build_h0_case2(_get_float(cfg, "omega1_uev") * 1e-3,
                              _get_float(cfg, "omega2_uev") * 1e-3,
                              _get_float(cfg, "omega_c_uev") * 1e-3,
                              _get_float(cfg, "g1_uev") * 1e-3,
                              _get_float(cfg, "g2_uev") * 1e-3)
    raise UsageError("'case' must be 1 or 2")


def resolve_timing(cfg, L):
    has_dt = cfg["dt_ps"] != ""
    has_mem = cfg["memory_ps"] != ""
    if has_dt and has_mem:
        raise UsageError("give exactly one of dt_ps or memory_ps")
    if has_mem:
        dt = _get_float(cfg, "memory_ps") / L
    elif has_dt:
        dt = _get_float(cfg, "dt_ps")
    else:
        dt = 0.1
    if dt <= 0:
        raise UsageError("time step must be positive")
    if cfg["n_steps"] != "":
        n = _get_int(cfg, "n_steps")
    elif cfg["t_end_ps"] != "":
        n = max(1, int(round(_get_float(cfg, "t_end_ps") / dt)))
    else:
        n = 500
    return dt, n


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, cfg, columns, rows, extra_meta=()):
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        out.write(f"# pathint {__version__}\n")
        for key in sorted(cfg):
            out.write(f"# {key}={cfg[key]}\n")
        for line in extra_meta:
            out.write(f"# {line}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    finally:
        if path:
            out.close()


def read_csv(path):
    """Round-trip reader: returns (meta_lines, columns, rows-as-strings)."""
    meta, columns, rows = [], None, []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                meta.append(line[1:].strip())
                continue
            parsed = next(csv.reader([line]))
            if columns is None:
                columns = parsed
            else:
                rows.append(parsed)
    return meta, columns, rows


def _run_trace(cfg, L, dt, n_steps, oracle=False):
    system = build_system(cfg)
    bath = build_bath(cfg)
    table = build_cumulant_table(bath, dt, L)
    excitation = _get_int(cfg, "excitation")
    measure = _get_int(cfg, "measure")
    if oracle:
        m = step_matrix(system, dt)
        values = trace_full(system, table, m, excitation, measure, n_steps)
        times = dt * np.arange(1, n_steps + 1)
        meta = {"engine": "oracle", "L": L, "dt": dt,
                "ranks": np.zeros(n_steps, int),
                "stored_elements": np.full(n_steps, system.dim**L),
                "peak_stored": system.dim**L}
        return PolarizationTrace(times=times, values=values, meta=meta)
    eps = _get_float(cfg, "eps")
    if not 0.0 <= eps < 1.0:
        raise UsageError("eps must be in [0, 1)")
    return run_polarization(system, bath, dt, L, n_steps, eps,
                            excitation, measure, table=table)


def cmd_propagate(cfg, output, oracle=False):
    L = _get_int(cfg, "L")
    dt, n_steps = resolve_timing(cfg, L)
    trace = _run_trace(cfg, L, dt, n_steps, oracle=oracle)
    rows = [
        (t, p.real, p.imag, abs(p), int(r), int(s))
        for t, p, r, s in zip(trace.times, trace.values,
                              trace.meta["ranks"],
                              trace.meta["stored_elements"])
    ]
    write_csv(output, cfg,
              ["t_ps", "re_P", "im_P", "abs_P", "rank_after_truncation",
               "stored_elements"],
              rows,
              extra_meta=[f"engine={trace.meta['engine']}",
                          f"dt_ps_resolved={_fmt(dt)}",
                          f"n_steps_resolved={n_steps}",
                          f"peak_stored={trace.meta['peak_stored']}"])
    return 0


def _fit_window(cfg, trace, L, dt):
    if cfg["fit_start_ps"] != "" or cfg["fit_end_ps"] != "":
        w0 = _get_float(cfg, "fit_start_ps") if cfg["fit_start_ps"] != "" \
            else max(L * dt, 0.3 * trace.times[-1])
        w1 = _get_float(cfg, "fit_end_ps") if cfg["fit_end_ps"] != "" \
            else trace.times[-1]
        return (w0, w1)
    return None


def cmd_sweep_l(cfg, output, oracle=False):
    l_values = _int_list(cfg, "l_list")
    if len(l_values) < 3:
        raise UsageError("l_list must contain at least 3 values")
    case = _get_int(cfg, "case")
    n_terms = _get_int(cfg, "n_terms") if cfg["n_terms"] != "" \
        else (2 if case == 1 else 3)
    beta = None if cfg["free_beta"] not in ("0", "", "false") \
        else _get_float(cfg, "beta")

    columns = ["row_type", "L", "term", "gamma_uev", "energy_uev",
               "abs_C", "arg_C", "residual", "alpha", "beta", "error_uev"]
    rows = []
    meta_lines = []

    if cfg["synthetic"] not in ("0", "", "false"):
        g_inf = _get_float(cfg, "synthetic_gamma_inf")
        alpha = _get_float(cfg, "synthetic_alpha")
        b_syn = _get_float(cfg, "synthetic_beta")
        gammas = {0: np.array([g_inf + alpha * l**-b_syn
                               for l in l_values])}
        energies = {0: np.zeros(len(l_values))}
        amps = {0: np.ones(len(l_values), complex)}
        n_terms = 1
        residuals = np.zeros(len(l_values))
        meta_lines.append("mode=synthetic")
    else:
        gammas = {j: np.empty(len(l_values)) for j in range(n_terms)}
        energies = {j: np.empty(len(l_values)) for j in range(n_terms)}
        amps = {j: np.empty(len(l_values), complex) for j in range(n_terms)}
        residuals = np.empty(len(l_values))
        for idx, L in enumerate(l_values):
            dt, n_steps = resolve_timing(cfg, L)
            trace = _run_trace(cfg, L, dt, n_steps, oracle=oracle)
            fit = fit_exponentials(trace, n_terms,
                                   window=_fit_window(cfg, trace, L, dt))
            meta_lines.append(
                f"window_L{L}={_fmt(fit.window[0])}:{_fmt(fit.window[1])}")
            residuals[idx] = fit.residual
            for j, term in enumerate(fit.terms):
                gammas[j][idx] = term.rate
                energies[j][idx] = term.energy * 1e3
                amps[j][idx] = term.amplitude

    for idx, L in enumerate(l_values):
        for j in range(n_terms):
            rows.append(("fit", L, j, gammas[j][idx], energies[j][idx],
                         abs(amps[j][idx]), np.angle(amps[j][idx]),
                         residuals[idx], "", "", ""))

    for j in range(n_terms):
        family = ParameterFamily(l_values, gammas[j], f"gamma_{j}")
        ext = power_law_fit(family, beta=beta)
        err = extrapolation_error(family, beta=ext.beta) \
            if len(l_values) >= 4 else float("nan")
        rows.append(("extrapolation", "", j, ext.value_inf, "", "", "", "",
                     ext.alpha, ext.beta, err))

    write_csv(output, cfg, columns, rows, extra_meta=meta_lines)
    return 0


def cmd_fgr(cfg, output):
    from .fgr import rates_with_virtual, gamma_ph_case1, gamma_ph_case2
    from .units import bose_occupation, HBAR_MEV_PS

    case = _get_int(cfg, "case")
    bath = build_bath(cfg)
    d_list = _float_list(cfg, "d_list_nm")
    if case == 1:
        g_list = _float_list(cfg, "g_list_uev") or [_get_float(cfg, "g_uev")]
        points = [(g, bath.dot_separation) for g in g_list]
    else:
        g_bar = _get_float(cfg, "g1_uev")
        g_list = _float_list(cfg, "g_list_uev") or [g_bar]
        if d_list:
            points = [(g_list[0], d) for d in d_list]
        else:
            points = [(g, bath.dot_separation) for g in g_list]

    rows = []
    for g_uev, d_nm in points:
        system = (build_h0_case1(0.0, 0.0, g_uev * 1e-3) if case == 1
                  else build_h0_case2(0.0, 0.0, 0.0, g_uev * 1e-3,
                                      g_uev * 1e-3))
        evals = np.linalg.eigvalsh(system.h0)
        r_mev = float(evals[-1] - evals[0])
        b = bath if d_nm == bath.dot_separation else BathSpec(
            deformation_diff=bath.deformation_diff,
            sound_velocity=bath.sound_velocity,
            mass_density=bath.mass_density,
            temperature=bath.temperature,
            confinement_lengths=bath.confinement_lengths,
            dot_separation=d_nm)
        pred = rates_with_virtual(b, r_mev, case=case)
        omega_r = r_mev / HBAR_MEV_PS
        n_r = bose_occupation(omega_r, b.temperature)
        gph = gamma_ph_case1(b, r_mev) if case == 1 else gamma_ph_case2(b, r_mev)
        rows.append((g_uev, d_nm, r_mev,
                     (n_r + 1) * gph, n_r * gph,
                     pred.gamma_plus, pred.gamma_minus))
    write_csv(output, cfg,
              ["g_uev", "d_nm", "r_mev", "gamma_plus_fgr", "gamma_minus_fgr",
               "gamma_plus_bar", "gamma_minus_bar"],
              rows)
    return 0


def cmd_verify(cfg, output):
    L = _get_int(cfg, "L")
    dt, n_steps = resolve_timing(cfg, L)
    full = _run_trace(cfg, L, dt, n_steps, oracle=True)
    opt = _run_trace(cfg, L, dt, n_steps, oracle=False)
    diff = np.abs(full.values - opt.values)
    rows = [(t, d, abs(pf), abs(po))
            for t, d, pf, po in zip(full.times, diff, full.values, opt.values)]
    write_csv(output, cfg,
              ["t_ps", "abs_diff", "abs_P_full", "abs_P_opt"],
              rows,
              extra_meta=[f"max_abs_diff={_fmt(float(diff.max()))}",
                          f"peak_stored_opt={opt.meta['peak_stored']}",
                          f"elements_full={build_system(cfg).dim**L}"])
    return 0


def make_parser():
    parser = argparse.ArgumentParser(
        prog="pathint",
        description="Path-integral polarization dynamics with SVD-compressed "
                    "influence functionals")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("propagate", "sweep-l", "fgr", "verify"):
        p = sub.add_parser(name)
        p.add_argument("config", nargs="?", default=None,
                       help="flat key=value configuration file")
        p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override a configuration key")
        p.add_argument("-o", "--output", default=None,
                       help="CSV output path (default stdout)")
        if name in ("propagate", "sweep-l"):
            p.add_argument("--oracle", action="store_true",
                           help="use the full-tensor engine")
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        if args.command == "propagate":
            return cmd_propagate(cfg, args.output, oracle=args.oracle)
        if args.command == "sweep-l":
            return cmd_sweep_l(cfg, args.output, oracle=args.oracle)
        if args.command == "fgr":
            return cmd_fgr(cfg, args.output)
        return cmd_verify(cfg, args.output)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, FitError, CapacityError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
