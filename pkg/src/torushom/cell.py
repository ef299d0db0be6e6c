"""Periodic cell problem and the effective matrix ``g0``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositive
from .krylov import pcg
from .operators import (CoefficientField, EffectiveOperator, OscillatingOperator,
                        Symbol, check_rank_condition, sample_oscillating)
from .spectral import TorusGrid, blockmul


@dataclass(frozen=True)
class CorrectorField:
    """Mean-zero periodic ``n x m`` matrix function ``Lambda`` on the unit cell.

    ``values[:, j]`` is the column ``lambda_j`` solving
    ``b(D)* g (b(D) lambda_j + e_j) = 0``.
    """

    cell: TorusGrid
    values: np.ndarray          # (n, m, *cell_grid)
    iterations: int = 0
    residual: float = 0.0

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def m(self):
        return self.values.shape[1]

    def mean(self):
        return self.values.mean(axis=tuple(range(2, 2 + self.cell.d)))

    def on_grid(self, grid: TorusGrid):
        """Samples of ``Lambda(x/eps)`` on ``grid`` (index arithmetic only)."""
        return sample_oscillating(self.values, self.cell.N, grid)

    def l2_norm(self):
        return float(np.sqrt(np.mean(np.sum(np.abs(self.values) ** 2, axis=(0, 1)))))


@dataclass(frozen=True)
class EffectiveMatrix:
    matrix: np.ndarray          # Hermitian part of the averaged flux
    asymmetry: float            # max |g0 - g0^*| before symmetrization

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def _cell_operator(g: CoefficientField, sym: Symbol):
    return OscillatingOperator(g, sym, g.cell)


def solve_cell_problem(g: CoefficientField, sym: Symbol, tol=1e-10,
                       max_iters=2000) -> CorrectorField:
    """Solve for ``Lambda`` by preconditioned CG in Fourier space.

    All ``m`` columns are solved as one batch.  The preconditioner inverts
    the constant-coefficient operator built from the cell average of ``g``;
    the zero mode is pinned to zero, which enforces the mean-zero condition.
    """
    check_rank_condition(sym)
    cell = g.cell
    d = cell.d
    op = _cell_operator(g, sym)
    cols = np.moveaxis(g.values, 1, 0)                 # (m_j, m, *cell)
    rhs = -blockmul(op.bxi_h, cell.forward(cols), d)   # (m_j, n, *cell)
    ref = op.reference
    zero = (0,) * d
    inv = np.zeros_like(ref.evals)
    nz = ref.evals > 1e-300
    inv[nz] = 1.0 / ref.evals[nz]
    inv[(...,) + zero] = 0.0

    def precond(F):
        return ref.function_hat(F, inv)

    def project(F):
        F = F.copy()
        F[(...,) + zero] = 0.0
        return F

    def apply(F):
        return project(op.apply_hat(F))

    rhs = project(rhs)
    sol, info = pcg(apply, precond, rhs, d + 1, tol=tol, max_iters=max_iters)
    sol = project(sol)
    lam = np.moveaxis(cell.inverse(sol), 0, 1)          # (n, m, *cell)
    return CorrectorField(cell, lam, info.iterations, info.residual)


def flux_gradient(Lam: CorrectorField, sym: Symbol):
    """``b(D) Lambda`` on the cell, shape ``(m, m, *cell)``."""
    cell = Lam.cell
    d = cell.d
    bxi = sym.blocks(cell.wavevectors(), d)
    cols = np.moveaxis(Lam.values, 1, 0)               # (m_j, n, *cell)
    out = cell.inverse(blockmul(bxi, cell.forward(cols), d))
    return np.moveaxis(out, 0, 1)


def cell_residual(Lam: CorrectorField, g: CoefficientField, sym: Symbol):
    """Per-column ``|b(D)* g (b(D) lambda_j + e_j)| / |b(D)* g e_j|``."""
    cell = Lam.cell
    d = cell.d
    op = _cell_operator(g.resample(cell.N), sym)
    cols = np.moveaxis(Lam.values, 1, 0)
    gcols = np.moveaxis(op.g_eps, 1, 0)
    res = op.apply_hat(cell.forward(cols)) + blockmul(op.bxi_h, cell.forward(gcols), d)
    scale = cell.coef_norm(blockmul(op.bxi_h, cell.forward(gcols), d))
    return cell.coef_norm(res) / np.where(scale > 0, scale, 1.0)


def effective_matrix(Lam: CorrectorField, g: CoefficientField, sym: Symbol) -> EffectiveMatrix:
    """``g0 = <g (b(D) Lambda + 1_m)>`` averaged over the cell."""
    d = Lam.cell.d
    gv = g.resample(Lam.cell.N).values
    flux = flux_gradient(Lam, sym) + np.eye(sym.m).reshape((sym.m, sym.m) + (1,) * d)
    letters = "xyz"[:d]
    prod = np.einsum(f"ij{letters},jk{letters}->ik{letters}", gv, flux)
    g0 = prod.mean(axis=tuple(range(2, 2 + d)))
    asym = float(np.max(np.abs(g0 - g0.conj().T)))
    scale = max(1.0, float(np.max(np.abs(g0))))
    if asym > 1e-8 * scale:
        raise NotPositive(f"effective matrix is far from Hermitian ({asym:.2e})")
    herm = 0.5 * (g0 + g0.conj().T)
    EffectiveOperator(herm, sym, TorusGrid(d, 4)).check_positive()
    return EffectiveMatrix(herm, asym)


def homogenize(g: CoefficientField, sym: Symbol, tol=1e-10):
    """Corrector and effective matrix in one call."""
    Lam = solve_cell_problem(g, sym, tol)
    return Lam, effective_matrix(Lam, g, sym)
