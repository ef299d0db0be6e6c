"""Rate fits, uniformity of compensated values, and the constants report."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from ..contour import frak_c
from ..errors import InsufficientPoints, MissingMetrics
from ..norms import ELLIPTIC_METRICS, PARABOLIC_METRICS

VARIABLES = ("eps", "t", "abs_zeta")
NOISE = 1e-10


class FitResult(NamedTuple):
    slope: float
    intercept: float
    residual: float     # rms of the log-log residuals
    n: int


class Spread(NamedTuple):
    max_compensated: float
    min_compensated: float
    ratio: float
    passed: bool
    skipped: bool       # every value sits at the noise floor


def _coords(r):
    return {"eps": r.eps, "t": r.t, "abs_zeta": r.abs_zeta, "phi": r.phi}


def _key(value):
    return None if math.isnan(value) else round(value, 12)


def scan(records, metric, variable, fixed=None):
    """Records of ``metric`` in the largest group varying only ``variable``.

    ``fixed`` optionally pins the other coordinates, e.g. ``{"t": 1.0}``.
    Returns the records sorted by ``variable``.
    """
    if variable not in VARIABLES:
        raise ValueError(f"variable must be one of {VARIABLES}")
    groups = {}
    for r in records:
        if r.metric != metric or not math.isfinite(r.value):
            continue
        c = _coords(r)
        if fixed and any(not math.isclose(c[k], v, rel_tol=1e-9) for k, v in fixed.items()):
            continue
        key = tuple((k, _key(v)) for k, v in c.items() if k != variable)
        groups.setdefault(key, {})[_key(c[variable])] = r
    if not groups:
        return []
    best = max(groups.values(), key=len)
    return [best[k] for k in sorted(best)]


def fit_rate(records, metric, variable="eps", fixed=None) -> FitResult:
    """Least-squares slope of ``log value`` against ``log variable``.

    Resolvent metrics are divided by ``c(phi)^2`` first.
    """
    rows = [r for r in scan(records, metric, variable, fixed) if r.value > 0]
    if len(rows) < 3:
        raise InsufficientPoints(
            f"{metric} vs {variable}: {len(rows)} usable points, need 3")
    x = np.log([_coords(r)[variable] for r in rows])
    y = np.log([r.value / (r.c_phi**2 if r.elliptic else 1.0) for r in rows])
    A = np.stack([x, np.ones_like(x)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ np.array([slope, intercept])
    return FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(res**2))), len(rows))


def uniformity_check(records, metric, variable="t", fixed=None, limit=3.0,
                     min_span=10.0, noise=NOISE) -> Spread:
    """Spread ``max/min`` of the compensated values along one scan."""
    rows = scan(records, metric, variable, fixed)
    if len(rows) < 2:
        raise InsufficientPoints(f"{metric} vs {variable}: {len(rows)} points")
    xs = [_coords(r)[variable] for r in rows]
    if max(xs) / min(xs) < min_span:
        raise InsufficientPoints(
            f"{metric} vs {variable}: span {max(xs) / min(xs):.3g} is below {min_span:g}")
    if all(r.value <= noise for r in rows):
        return Spread(float("nan"), float("nan"), float("nan"), True, True)
    comp = np.array([r.compensated for r in rows])
    hi, lo = float(comp.max()), float(comp.min())
    ratio = hi / lo if lo > 0 else float("inf")
    return Spread(hi, lo, ratio, ratio <= limit, False)


CONSTANT_OF = {"C1": "res_diff", "C2": "res_grad_corr", "C3": "res_corr",
               "C4": "semi_diff", "C5": "semi_grad_corr", "C6": "semi_corr"}


@dataclass
class ConstantsReport:
    frak_c_closed: float
    frak_c_quadrature: float
    constants: dict             # name -> max compensated value (None below noise)
    below_noise: dict
    derived: dict
    checks: dict
    slack: float = 0.1
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.checks.values())

    def to_json(self):
        return json.dumps(asdict(self), indent=1, sort_keys=True)

    def to_text(self):
        lines = [f"frak_c closed form  {self.frak_c_closed:.10f}",
                 f"frak_c quadrature   {self.frak_c_quadrature:.10f}", ""]
        for name, metric in CONSTANT_OF.items():
            v = self.constants[name]
            shown = "below noise" if v is None else f"{v:.6g}"
            lines.append(f"{name} ({metric:<14}) {shown}")
        lines.append("")
        for k, v in self.derived.items():
            lines.append(f"{k:<22} {v:.6g}")
        lines.append("")
        for k, v in self.checks.items():
            lines.append(f"{k:<22} {'pass' if v else 'FAIL'}")
        lines.extend(self.notes)
        return "\n".join(lines) + "\n"


def constants_report(records, slack=0.1, noise=NOISE, two_tol=1e-7) -> ConstantsReport:
    """Empirical constants (max compensated value per metric) and the chain checks.

    The parabolic constants must satisfy, with relative ``slack``,
    ``C4 <= sqrt2 max(2, c C1)``, ``C5 <= c C2`` and ``C6 <= c C3``, where
    ``c`` is the contour constant.  Every semigroup difference must also
    stay below ``min(2, c C1 eps t^{-1/2})``.
    """
    have = {r.metric for r in records if math.isfinite(r.value)}
    missing = [m for m in ELLIPTIC_METRICS + PARABOLIC_METRICS if m not in have]
    if missing:
        raise MissingMetrics(f"records lack {', '.join(missing)}")
    closed, quad = frak_c()
    consts, quiet = {}, {}
    for name, metric in CONSTANT_OF.items():
        rows = [r for r in records if r.metric == metric and math.isfinite(r.value)]
        quiet[name] = all(r.value <= noise for r in rows)
        consts[name] = None if quiet[name] else max(r.compensated for r in rows)

    def val(name):
        return consts[name] or 0.0

    grow = 1.0 + slack
    derived = {"c*C1": closed * val("C1"), "c*C2": closed * val("C2"),
               "c*C3": closed * val("C3"),
               "C4 bound": math.sqrt(2) * max(2.0, closed * val("C1"))}
    checks = {
        "C4 chain": val("C4") <= derived["C4 bound"] * grow,
        "C5 chain": val("C5") <= derived["c*C2"] * grow,
        "C6 chain": val("C6") <= derived["c*C3"] * grow,
        "quadrature <= closed": quad <= closed,
    }
    ok = True
    for r in records:
        if r.metric == "semi_diff" and math.isfinite(r.value):
            bound = min(2.0 + two_tol, derived["c*C1"] * r.eps / math.sqrt(r.t))
            ok &= quiet["C4"] or r.value <= bound
    checks["min(2, c C1 eps/sqrt t)"] = bool(ok)
    notes = []
    if any(quiet.values()):
        notes.append("constants at the noise floor are reported as below noise")
    return ConstantsReport(closed, quad, consts, quiet, derived, checks, slack, notes)
