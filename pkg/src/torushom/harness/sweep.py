"""Sweeps over ``(eps, t, zeta)`` and the result records they produce."""
from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from ..errors import TorusHomError
from ..norms import ErrorSuite, Problem, paper_factor
from ..resolvent import Shift
from ..spectral import TorusGrid
from .config import ExperimentConfig
from .presets import make_problem

COLUMNS = ("experiment_id", "preset", "d", "n", "m", "N", "K", "eps", "t", "zeta_re",
           "zeta_im", "phi", "c_phi", "metric", "value", "paper_factor", "compensated",
           "iters_max", "residual_max", "wall_ms", "seed")


@dataclass
class ResultRecord:
    experiment_id: str
    preset: str
    d: int
    n: int
    m: int
    N: int
    K: int
    eps: float
    t: float            # nan for resolvent metrics
    zeta_re: float      # nan for semigroup metrics
    zeta_im: float
    phi: float
    c_phi: float
    metric: str
    value: float
    paper_factor: float
    compensated: float
    iters_max: int
    residual_max: float
    wall_ms: float      # nan unless timing is enabled
    seed: int
    problem_hash: str = ""
    point: int = 0
    converged: bool = True
    error: str = ""

    @property
    def abs_zeta(self):
        return math.hypot(self.zeta_re, self.zeta_im)

    @property
    def elliptic(self):
        return self.metric.startswith("res")

    def row(self):
        return [getattr(self, c) for c in COLUMNS]


def _problem_cache(cfg: ExperimentConfig):
    cache = {}

    def get(cell_N):
        if cell_N not in cache:
            g, sym, _ = make_problem(cfg.preset, cfg.d, cfg.a, cell_N, cfg.value,
                                     cfg.symbol, cfg.fourier)
            cache[cell_N] = Problem.build(g, sym, cfg.cell_tol)
        return cache[cell_N]

    return get


def _run_point(cfg: ExperimentConfig, index, point, get_problem=None):
    eps, t, zeta = point
    K = int(round(1 / eps))
    grid = TorusGrid(cfg.d, cfg.N, K)
    get_problem = get_problem or _problem_cache(cfg)
    problem = get_problem(max(cfg.N_cell, grid.points_per_period))
    suite = ErrorSuite(problem, grid, cfg.thetas(), cfg.smoothing, cfg.tol, cfg.max_iters,
                       cfg.n_arc, cfg.n_ray, cfg.contour_tol)
    elliptic = zeta is not None
    shift = Shift.polar(*zeta) if elliptic else None
    base = dict(experiment_id=cfg.experiment_id, preset=cfg.preset, d=cfg.d, n=problem.n,
                m=problem.sym.m, N=cfg.N, K=K, eps=grid.eps,
                t=float("nan") if elliptic else float(t),
                zeta_re=shift.zeta.real if elliptic else float("nan"),
                zeta_im=shift.zeta.imag if elliptic else float("nan"),
                phi=shift.phi if elliptic else float("nan"),
                c_phi=shift.c_phi if elliptic else float("nan"),
                seed=cfg.seed, problem_hash=cfg.problem_hash(), point=index)
    records = []
    for metric in cfg.metrics_for(elliptic):
        factor = paper_factor(metric, grid.eps, t=t, zeta=shift.zeta if elliptic else None,
                              c_phi=shift.c_phi if elliptic else None)
        start = time.perf_counter()
        try:
            est = suite.norm(metric, t=t, zeta=shift.zeta if elliptic else None,
                             seed=cfg.seed, tol_rel=cfg.power_tol,
                             max_iters=cfg.power_max_iters)
            value, converged, error = est.value, est.converged, ""
        except TorusHomError as exc:
            value, converged, error = float("nan"), False, f"{type(exc).__name__}: {exc}"
        wall = (time.perf_counter() - start) * 1e3 if cfg.timing else float("nan")
        records.append(ResultRecord(
            metric=metric, value=value, paper_factor=factor, compensated=value / factor,
            iters_max=int(suite.stats.iterations), residual_max=float(suite.stats.residual),
            wall_ms=wall, converged=converged, error=error, **base))
    return records


def _run_chunk(args):
    cfg, items = args
    get = _problem_cache(cfg)
    out = []
    for index, point in items:
        out.extend(_run_point(cfg, index, point, get))
    return out


def run_sweep(cfg: ExperimentConfig, progress=None):
    """One record per (point, metric), ordered by point index then metric."""
    cfg.validate()
    items = list(enumerate(cfg.points()))
    records = []
    if cfg.workers > 1 and len(items) > 1:
        chunks = [(cfg, items[i::cfg.workers]) for i in range(cfg.workers)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for part in pool.map(_run_chunk, chunks):
                records.extend(part)
    else:
        get = _problem_cache(cfg)
        for index, point in items:
            part = _run_point(cfg, index, point, get)
            records.extend(part)
            if progress:
                progress(part)
    order = {m: i for i, m in enumerate(cfg.metrics_for(True) + cfg.metrics_for(False))}
    records.sort(key=lambda r: (r.point, order.get(r.metric, 99)))
    return records


# -- persistence ---------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def write_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in records:
            w.writerow([_fmt(v) for v in r.row()])


def _clean(v):
    return None if isinstance(v, float) and math.isnan(v) else v


def write_json(records, path):
    rows = [{k: _clean(v) for k, v in asdict(r).items()} for r in records]
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1)
        fh.write("\n")


def write_records(records, out_dir, fmt="csv"):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "records." + fmt)
    (write_csv if fmt == "csv" else write_json)(records, path)
    return path


_TYPES = {f.name: f.type for f in fields(ResultRecord)}


def _convert(name, raw):
    kind = _TYPES[name]
    if raw is None:
        return float("nan")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        return raw if isinstance(raw, bool) else str(raw) == "True"
    return raw


def read_records(path):
    """Records from a CSV or JSON file written by :func:`write_records`."""
    if path.endswith(".json"):
        with open(path) as fh:
            rows = json.load(fh)
    else:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    return [ResultRecord(**{k: _convert(k, v) for k, v in row.items() if k in _TYPES})
            for row in rows]
