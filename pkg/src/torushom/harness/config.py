"""Experiment configuration: INI files with one section per stage.

Schema and defaults (every key is optional)::

    [experiment]
    id = cos1d-sweep
    seed = 0

    [problem]
    preset = cos1d            ; constant | cos1d | layered2d | checker2d-smooth | fourier
    d = 1                     ; ignored by presets with a fixed dimension
    a = 2.0                   ; mean level of the oscillating presets, value of "constant"
    value =                   ; JSON matrix for the constant preset
    symbol =                  ; gradient | scalar | JSON list of d matrices
    fourier =                 ; rows "k_1 .. k_d re [im]" separated by ";"
    smoothing = true

    [grid]
    N = 256
    N_cell = 64

    [sweep]
    design = cross            ; cross | product
    eps_list = 1/4, 1/8, 1/16, 1/32
    t_list =
    zeta_list = 1@3pi/4       ; modulus@angle pairs
    eps_ref =                 ; cross design: eps of the t and zeta scans (default: middle of eps_list)
    t_ref = 1
    zeta_ref = 1@3pi/4
    metrics =                 ; default: every metric the lists call for
    bloch = true
    theta = 1/32, 1/16, 1/8, 1/4, 3/8, 1/2, 3/4, 1   ; quasi-momenta in units of pi
    workers = 1

    [solver]
    tol = 1e-10
    max_iters = 2000
    cell_tol = 1e-11
    power_tol = 1e-4
    power_max_iters = 500

    [contour]
    n_arc = 16
    n_ray = 24
    tol = 1e-9

    [output]
    out = results
    format = csv              ; csv | json
    plot = false
    timing = false            ; record wall_ms (breaks byte-identical reruns)
    spread_limit = 3
"""
from __future__ import annotations

import configparser
import hashlib
import json
import re
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Optional

import numpy as np

from ..errors import ConfigInvalid
from ..norms import ELLIPTIC_METRICS, EXTRA_METRICS, PARABOLIC_METRICS
from .presets import PRESETS

ALL_METRICS = ELLIPTIC_METRICS + PARABOLIC_METRICS + EXTRA_METRICS
DEFAULT_THETA = (1 / 32, 1 / 16, 1 / 8, 1 / 4, 3 / 8, 1 / 2, 3 / 4, 1.0)

_ANGLE = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


def parse_number(text):
    """Floats, fractions such as ``1/16``, and multiples of pi such as ``3pi/4``."""
    text = str(text).strip()
    m = _ANGLE.match(text)
    if m:
        coef = float(m.group(1)) if m.group(1) not in ("", "+", "-") else \
            (-1.0 if m.group(1) == "-" else 1.0)
        den = float(m.group(2)) if m.group(2) else 1.0
        return coef * np.pi / den
    return float(Fraction(text))


def parse_list(text):
    if text is None:
        return []
    if isinstance(text, (list, tuple)):
        return list(text)
    return [p.strip() for p in str(text).replace(";", ",").split(",") if p.strip()]


def parse_zeta(text):
    """``modulus@angle`` to ``(modulus, phi)``."""
    if isinstance(text, (tuple, list)):
        return float(text[0]), float(text[1])
    if "@" not in text:
        raise ValueError(f"zeta {text!r} is not of the form modulus@angle")
    mod, ang = text.split("@", 1)
    return parse_number(mod), parse_number(ang)


def _bool(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


@dataclass
class ExperimentConfig:
    experiment_id: str = "experiment"
    seed: int = 0
    preset: str = "cos1d"
    d: int = 1
    a: float = 2.0
    value: Optional[str] = None
    symbol: Optional[str] = None
    fourier: Optional[str] = None
    smoothing: bool = True
    N: int = 256
    N_cell: int = 64
    design: str = "cross"
    eps_list: list = field(default_factory=lambda: [1 / 4, 1 / 8, 1 / 16, 1 / 32])
    t_list: list = field(default_factory=list)
    zeta_list: list = field(default_factory=lambda: [(1.0, 3 * np.pi / 4)])
    eps_ref: Optional[float] = None
    t_ref: float = 1.0
    zeta_ref: tuple = (1.0, 3 * np.pi / 4)
    metrics: list = field(default_factory=list)
    bloch: bool = True
    theta: list = field(default_factory=lambda: list(DEFAULT_THETA))
    workers: int = 1
    tol: float = 1e-10
    max_iters: int = 2000
    cell_tol: float = 1e-11
    power_tol: float = 1e-4
    power_max_iters: int = 500
    n_arc: int = 16
    n_ray: int = 24
    contour_tol: float = 1e-9
    out: str = "results"
    format: str = "csv"
    plot: bool = False
    timing: bool = False
    spread_limit: float = 3.0

    # -- construction -----------------------------------------------------
    @classmethod
    def from_ini(cls, path, validate=True):
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        with open(path) as fh:
            parser.read_file(fh)
        return cls.from_parser(parser, validate)

    @classmethod
    def from_string(cls, text):
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        parser.read_string(text)
        return cls.from_parser(parser)

    @classmethod
    def from_parser(cls, parser, validate=True):
        cfg, problems = cls(), []
        renames = {("experiment", "id"): "experiment_id", ("contour", "tol"): "contour_tol"}
        names = {f.name for f in fields(cls)}
        for section in parser.sections():
            for key, raw in parser.items(section):
                name = renames.get((section, key), key)
                # configparser lower-cases keys; restore the grid names
                name = {"n": "N", "n_cell": "N_cell"}.get(name, name)
                if name not in names:
                    problems.append(f"[{section}] {key}: unknown key")
                    continue
                try:
                    cfg.set(name, raw)
                except (ValueError, ZeroDivisionError) as exc:
                    problems.append(f"[{section}] {key}: {exc}")
        if problems:
            raise ConfigInvalid(problems)
        return cfg.validate() if validate else cfg

    def set(self, name, raw):
        """Assign one field from its text form."""
        if raw is None or (isinstance(raw, str) and raw.strip() == "" and name not in
                           ("value", "symbol", "fourier")):
            if name in ("t_list", "metrics"):
                setattr(self, name, [])
            return
        if name in ("eps_list", "t_list", "theta"):
            value = [parse_number(p) for p in parse_list(raw)]
        elif name == "zeta_list":
            value = [parse_zeta(p) for p in parse_list(raw)]
        elif name == "zeta_ref":
            value = parse_zeta(raw)
        elif name == "metrics":
            value = parse_list(raw)
        elif name in ("eps_ref", "t_ref", "a", "tol", "cell_tol", "power_tol",
                      "contour_tol", "spread_limit"):
            value = parse_number(raw)
        elif name in ("seed", "d", "N", "N_cell", "workers", "max_iters",
                      "power_max_iters", "n_arc", "n_ray"):
            value = int(raw)
        elif name in ("smoothing", "bloch", "plot", "timing"):
            value = _bool(raw)
        else:
            value = str(raw).strip() or None
        setattr(self, name, value)

    # -- validation -------------------------------------------------------
    def validate(self):
        p = []
        fixed_d = {"cos1d": 1, "layered2d": 2, "checker2d-smooth": 2}
        self.d = fixed_d.get(self.preset, self.d)
        if self.preset not in PRESETS:
            p.append(f"problem.preset: {self.preset!r} is not one of {', '.join(PRESETS)}")
        if self.preset == "fourier" and not self.fourier:
            p.append("problem.fourier: the fourier preset needs a coefficient table")
        if self.preset in ("cos1d", "layered2d", "checker2d-smooth") and not self.a > 1:
            p.append(f"problem.a: {self.a} must exceed 1 for a positive coefficient")
        if self.d < 1:
            p.append(f"problem.d: {self.d} must be positive")
        if self.N < 4 or self.N & (self.N - 1):
            p.append(f"grid.N: {self.N} is not a power of two >= 4")
        if self.N_cell < 4 or self.N_cell & (self.N_cell - 1):
            p.append(f"grid.N_cell: {self.N_cell} is not a power of two >= 4")
        for eps in self.all_eps():
            inv = 1.0 / eps if eps > 0 else np.inf
            K = int(round(inv))
            if not np.isfinite(inv) or abs(inv - K) > 1e-9 or K < 1:
                p.append(f"sweep.eps_list: 1/eps = {inv} is not a positive integer")
            elif self.N % K:
                p.append(f"sweep.eps_list: 1/eps = {K} does not divide N = {self.N}")
            elif K > 1 and self.N < 4 * K:
                p.append(f"sweep.eps_list: eps = 1/{K} leaves fewer than 4 points per period")
        for t in self.all_t():
            if not t > 0:
                p.append(f"sweep.t_list: t = {t} must be positive")
        for mod, phi in self.all_zeta():
            if not 0 < phi < 2 * np.pi:
                p.append(f"sweep.zeta_list: phi = {phi} is not in (0, 2pi)")
            if not mod > 0:
                p.append(f"sweep.zeta_list: |zeta| = {mod} must be positive")
        for m in self.metrics:
            if m not in ALL_METRICS:
                p.append(f"sweep.metrics: unknown metric {m!r}")
        if self.design not in ("cross", "product"):
            p.append(f"sweep.design: {self.design!r} is not cross or product")
        if self.format not in ("csv", "json"):
            p.append(f"output.format: {self.format!r} is not csv or json")
        if self.workers < 1:
            p.append("sweep.workers: must be at least 1")
        if self.tol <= 0 or self.power_tol <= 0 or self.contour_tol <= 0:
            p.append("solver: tolerances must be positive")
        if self.bloch and not self.theta:
            p.append("sweep.theta: bloch fibers requested but the list is empty")
        if p:
            raise ConfigInvalid(p)
        return self

    # -- sweep points -----------------------------------------------------
    def reference_eps(self):
        """``eps_ref``, defaulting to the middle of ``eps_list``."""
        if self.eps_ref is not None:
            return self.eps_ref
        ordered = sorted(self.eps_list)
        return ordered[len(ordered) // 2] if ordered else None

    def all_eps(self):
        ref = self.reference_eps() if self.design == "cross" else None
        return list(self.eps_list) + ([ref] if ref is not None else [])

    def all_t(self):
        return list(self.t_list) + ([self.t_ref] if self.design == "cross" else [])

    def all_zeta(self):
        return list(self.zeta_list) + ([self.zeta_ref] if self.design == "cross" else [])

    def points(self):
        """Sweep points ``(eps, t, zeta)``; exactly one of ``t``/``zeta`` is set.

        The product design pairs every eps with every zeta and t.  The cross
        design scans eps at ``zeta_ref``/``t_ref`` and scans zeta and t at
        ``eps_ref``.  Only families with requested metrics contribute.
        """
        pts = []
        ell, par = bool(self.metrics_for(True)), bool(self.metrics_for(False))
        if self.design == "product":
            for eps in self.eps_list:
                pts += [(eps, None, z) for z in self.zeta_list] if ell else []
                pts += [(eps, t, None) for t in self.t_list] if par else []
        else:
            ref = self.reference_eps()
            if ell:
                pts += [(eps, None, self.zeta_ref) for eps in self.eps_list]
                pts += [(ref, None, z) for z in self.zeta_list]
            if par:
                pts += [(eps, self.t_ref, None) for eps in self.eps_list]
                pts += [(ref, t, None) for t in self.t_list]
        seen, unique = set(), []
        for eps, t, z in pts:
            key = (round(1 / eps), t, None if z is None else (round(z[0], 14), round(z[1], 14)))
            if key not in seen:
                seen.add(key)
                unique.append((eps, t, z))
        return unique

    def metrics_for(self, elliptic):
        chosen = self.metrics or list(ELLIPTIC_METRICS + PARABOLIC_METRICS)
        return [m for m in chosen if m.startswith("res") == elliptic]

    def thetas(self):
        """Bloch quasi-momenta, shape ``(B, d)``, or None for the plain torus."""
        if not self.bloch:
            return None
        th = np.zeros((len(self.theta), self.d))
        th[:, 0] = np.pi * np.asarray(self.theta, float)
        return th

    def problem_hash(self):
        keys = ("preset", "d", "a", "value", "symbol", "fourier", "N_cell", "cell_tol")
        blob = json.dumps({k: getattr(self, k) for k in keys}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_dict(self):
        return asdict(self)
