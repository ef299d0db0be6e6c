"""Stand-alone numerical checks run by the CLI and the acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..contour import build_contour, expm_contour, expm_spectral_A0
from ..operators import EffectiveOperator, Symbol
from ..spectral import TorusGrid, random_field

ROUNDOFF_FLOOR = 1e-13
CONTOUR_LEVELS = ((8, 16), (16, 32), (32, 64), (64, 128))


@dataclass
class ContourGap:
    t: float
    n_arc: int
    n_ray: int
    nodes: int
    gap: float


def contour_gaps(t_values=(0.1, 1.0, 10.0), levels=CONTOUR_LEVELS, N=64, d=1, seed=0,
                 tol=1e-12):
    """Relative gap between contour and spectral ``exp(-t A0)`` for ``A0 = -Laplace``."""
    grid = TorusGrid(d, N)
    sym = Symbol(np.ones((1, 1, 1))) if d == 1 else Symbol.gradient(d)
    a0 = EffectiveOperator(np.eye(sym.m), sym, grid)
    f = random_field(grid, 1, np.random.default_rng(seed))
    rows = []
    for t in t_values:
        exact = expm_spectral_A0(a0, t, f)
        scale = grid.l2_norm(exact)
        for n_arc, n_ray in levels:
            c = build_contour(t, n_arc, n_ray, tol)
            approx = expm_contour(a0, t, f, c)
            rows.append(ContourGap(t, n_arc, n_ray, c.size,
                                   float(grid.l2_norm(approx - exact) / scale)))
    return rows


def monotone_to_floor(gaps, floor=ROUNDOFF_FLOOR):
    """Each gap is below the previous one unless both already sit at round-off."""
    return all(b < a or max(a, b) <= floor for a, b in zip(gaps, gaps[1:]))
