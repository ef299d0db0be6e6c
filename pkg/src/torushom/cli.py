"""Command-line interface: ``torushom <command> [options]``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .cell import cell_residual, homogenize
from .contour import frak_c
from .errors import InsufficientPoints, MissingMetrics, TorusHomError
from .harness.analysis import constants_report, fit_rate, uniformity_check
from .harness.checks import contour_gaps, monotone_to_floor
from .harness.config import ExperimentConfig, parse_list, parse_number, parse_zeta
from .harness.presets import make_problem, voigt_reuss
from .harness.sweep import read_records, run_sweep, write_records
from .norms import ELLIPTIC_METRICS, EXTRA_METRICS, PARABOLIC_METRICS


def _add_common(p):
    p.add_argument("--config", help="INI experiment file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--preset", help="coefficient preset")
    p.add_argument("--grid", type=int, help="grid points per axis N")
    p.add_argument("--eps-list", help="comma separated, e.g. 1/4,1/8")
    p.add_argument("--t-list", help="comma separated times")
    p.add_argument("--zeta-list", help="comma separated modulus@angle, e.g. 1@3pi/4")
    p.add_argument("--tol", type=float, help="Krylov tolerance")
    p.add_argument("--seed", type=int, help="power iteration seed")
    p.add_argument("--no-smoothing", action="store_true", help="drop S_eps from correctors")
    p.add_argument("--format", choices=("csv", "json"), help="record format")
    p.add_argument("--plot", action="store_true", help="write SVG figures")
    p.add_argument("--workers", type=int, help="worker processes for sweeps")


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_ini(args.config, validate=False) if args.config else ExperimentConfig()
    overrides = {"out": args.out, "preset": args.preset, "N": args.grid, "tol": args.tol,
                 "seed": args.seed, "format": args.format, "workers": args.workers}
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
    if args.eps_list:
        cfg.eps_list = [parse_number(p) for p in parse_list(args.eps_list)]
    if args.t_list:
        cfg.t_list = [parse_number(p) for p in parse_list(args.t_list)]
    if args.zeta_list:
        cfg.zeta_list = [parse_zeta(p) for p in parse_list(args.zeta_list)]
    if args.no_smoothing:
        cfg.smoothing = False
    if args.plot:
        cfg.plot = True
    return cfg.validate()


def _problem(cfg):
    return make_problem(cfg.preset, cfg.d, cfg.a, cfg.N_cell, cfg.value, cfg.symbol,
                        cfg.fourier)


def _matrix(a):
    return np.array2string(np.real_if_close(np.asarray(a)), precision=12)


def cmd_effective(cfg, args):
    g, sym, oracle = _problem(cfg)
    Lam, g0 = homogenize(g, sym, cfg.cell_tol)
    print(f"preset {cfg.preset}, d={cfg.d}, N_cell={cfg.N_cell}")
    print("g0 =", _matrix(g0))
    if oracle is not None:
        print("oracle =", _matrix(oracle))
        print(f"max |g0 - oracle| = {np.max(np.abs(np.asarray(g0) - oracle)):.3e}")
    elif sym.m == cfg.d and np.allclose(g.values, g.values[0, 0] * np.eye(sym.m)[
            (...,) + (None,) * cfg.d]):
        lo, hi = voigt_reuss(g)
        ev = np.linalg.eigvalsh(np.asarray(g0))
        inside = lo - 1e-10 <= ev.min() and ev.max() <= hi + 1e-10
        print(f"Voigt-Reuss bounds [{lo:.10f}, {hi:.10f}], eigenvalues {ev}, "
              f"{'inside' if inside else 'OUTSIDE'}")
    print(f"cell solve: {Lam.iterations} iterations, residual {Lam.residual:.2e}, "
          f"equation defect {np.max(cell_residual(Lam, g, sym)):.2e}")
    return 0


def cmd_cell(cfg, args):
    g, sym, _ = _problem(cfg)
    Lam, g0 = homogenize(g, sym, cfg.cell_tol)
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, "corrector.npz")
    np.savez(path, values=Lam.values, x=Lam.cell.coordinates(), g0=np.asarray(g0))
    print(f"Lambda: shape {Lam.values.shape}, L2 norm {Lam.l2_norm():.10f}, "
          f"mean {np.max(np.abs(Lam.mean())):.1e}")
    print(f"wrote {path}")
    return 0


def _table(records):
    print(f"{'metric':<15}{'K':>5}{'t':>8}{'|zeta|':>8}{'value':>14}{'compensated':>14}"
          f"{'iters':>7}")
    for r in records:
        t = "" if math.isnan(r.t) else f"{r.t:g}"
        z = "" if math.isnan(r.zeta_re) else f"{r.abs_zeta:g}"
        print(f"{r.metric:<15}{r.K:>5}{t:>8}{z:>8}{r.value:>14.6e}{r.compensated:>14.6f}"
              f"{r.iters_max:>7}" + (f"  {r.error}" if r.error else ""))


def _run(cfg, metrics):
    cfg.metrics = list(metrics)
    records = run_sweep(cfg, progress=lambda part: _table(part))
    path = write_records(records, cfg.out, cfg.format)
    print(f"wrote {path}")
    return records


def cmd_resolvent_error(cfg, args):
    cfg.t_list = []
    _run(cfg, cfg.metrics_for(True) if cfg.metrics else ELLIPTIC_METRICS)
    return 0


def cmd_semigroup_error(cfg, args):
    _run(cfg, cfg.metrics_for(False) if cfg.metrics else PARABOLIC_METRICS)
    return 0


def cmd_contour_check(cfg, args):
    t_values = cfg.t_list or [0.1, 1.0, 10.0]
    rows = contour_gaps(t_values, seed=cfg.seed)
    ok = True
    for t in t_values:
        sub = [r for r in rows if r.t == t]
        for r in sub:
            print(f"t={t:<6g} n_arc={r.n_arc:<4} n_ray={r.n_ray:<4} gap={r.gap:.3e}")
        mono = monotone_to_floor([r.gap for r in sub])
        final = sub[-1].gap <= 1e-8
        ok &= mono and final
        print(f"t={t:<6g} monotone={mono} final<=1e-8={final}")
    return 0 if ok else 1


def _records_path(cfg, args):
    path = getattr(args, "records", None)
    if path:
        return path
    for ext in ("csv", "json"):
        p = os.path.join(cfg.out, "records." + ext)
        if os.path.exists(p):
            return p
    return None


def analyse(records, cfg, out_dir=None):
    """Fits, spreads and the constants report for a set of records."""
    summary = {"fits": {}, "spreads": {}}
    metrics = sorted({r.metric for r in records})
    for metric in metrics:
        for variable in ("eps", "t", "abs_zeta"):
            try:
                fit = fit_rate(records, metric, variable)
            except InsufficientPoints:
                continue
            summary["fits"][f"{metric} vs {variable}"] = fit._asdict()
            print(f"slope {metric:<15} vs {variable:<9} {fit.slope:+.4f} "
                  f"(rms {fit.residual:.2e}, {fit.n} points)")
        for variable in ("t", "abs_zeta"):
            try:
                sp = uniformity_check(records, metric, variable, limit=cfg.spread_limit)
            except InsufficientPoints:
                continue
            summary["spreads"][f"{metric} vs {variable}"] = sp._asdict()
            state = "skipped (noise floor)" if sp.skipped else f"ratio {sp.ratio:.3f}"
            print(f"spread {metric:<14} vs {variable:<9} {state}")
    report = None
    try:
        report = constants_report(records)
        print(report.to_text())
    except MissingMetrics as exc:
        print(f"constants report skipped: {exc}")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "fits.json"), "w") as fh:
            json.dump(summary, fh, indent=1, sort_keys=True)
            fh.write("\n")
        if report is not None:
            with open(os.path.join(out_dir, "constants.json"), "w") as fh:
                fh.write(report.to_json() + "\n")
            with open(os.path.join(out_dir, "constants.txt"), "w") as fh:
                fh.write(report.to_text())
        if cfg.plot:
            from .harness.plots import plot_all
            for p in plot_all(records, out_dir):
                print(f"wrote {p}")
    return summary, report


def cmd_constants(cfg, args):
    closed, quad = frak_c()
    print(f"frak_c closed form {closed:.12f}")
    print(f"frak_c quadrature  {quad:.12f}")
    path = _records_path(cfg, args)
    if path:
        try:
            print(constants_report(read_records(path)).to_text())
        except MissingMetrics as exc:
            print(f"constants report skipped: {exc}")
    return 0


def cmd_sweep(cfg, args):
    if not cfg.metrics:
        cfg.metrics = list(ELLIPTIC_METRICS + PARABOLIC_METRICS + EXTRA_METRICS)
    records = run_sweep(cfg, progress=_table)
    print(f"wrote {write_records(records, cfg.out, cfg.format)}")
    analyse(records, cfg, cfg.out)
    return 0


def cmd_report(cfg, args):
    path = _records_path(cfg, args)
    if path is None:
        print(f"no records found in {cfg.out}", file=sys.stderr)
        return 2
    analyse(read_records(path), cfg, cfg.out)
    return 0


COMMANDS = {
    "effective": (cmd_effective, "print g0 and compare with the preset's oracle"),
    "cell": (cmd_cell, "solve the cell problem and save the corrector"),
    "resolvent-error": (cmd_resolvent_error, "resolvent error norms over eps and zeta"),
    "semigroup-error": (cmd_semigroup_error, "semigroup error norms over eps and t"),
    "contour-check": (cmd_contour_check, "contour exponential against the spectral one"),
    "constants": (cmd_constants, "contour constant and fitted constants"),
    "sweep": (cmd_sweep, "full sweep, fits, constants report"),
    "report": (cmd_report, "fits and plots from existing records"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="torushom", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name in ("constants", "report"):
            p.add_argument("--records", help="records file (default: <out>/records.csv)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command][0](cfg, args)
    except TorusHomError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
