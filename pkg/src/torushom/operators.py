"""The oscillating operator ``A_eps = b(D)* g(x/eps) b(D)`` and its effective
counterpart ``A0 = b(D)* g0 b(D)``, applied matrix-free in Fourier space.

Both operator handles accept an optional stack of Bloch quasi-momenta
``theta`` (shape ``(B, d)``).  Fiber ``j`` acts on the periodic part of
``exp(i theta_j . x) u(x)``; ``theta = None`` is the plain torus.  Because
``g(x/eps)`` is 1-periodic, the operator on R^d is the direct integral of
these fibers over ``theta`` in ``[-pi, pi)^d``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import GridMismatch, NotPositive, RankDeficient, SingularBlock
from .spectral import TorusGrid, blockadj, blockmul, blocks_first, blocks_last

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class EllipticityBounds:
    alpha0: float
    alpha1: float


@dataclass(frozen=True)
class Symbol:
    """Constant matrices ``b_1..b_d`` (each ``m x n``) of ``b(D) = sum b_l D_l``."""

    mats: np.ndarray

    def __post_init__(self):
        mats = np.asarray(self.mats, dtype=complex)
        if mats.ndim != 3:
            raise ValueError("symbol matrices must have shape (d, m, n)")
        d, m, n = mats.shape
        if m < n:
            raise ValueError(f"need m >= n, got m={m}, n={n}")
        object.__setattr__(self, "mats", mats)

    @property
    def d(self):
        return self.mats.shape[0]

    @property
    def m(self):
        return self.mats.shape[1]

    @property
    def n(self):
        return self.mats.shape[2]

    @classmethod
    def gradient(cls, d):
        """Acoustics symbol ``b(xi) = xi`` (``m = d``, ``n = 1``)."""
        return cls(np.eye(d).reshape(d, d, 1))

    def blocks(self, xi, d_space=None):
        """``b(xi)`` for ``xi`` of shape ``(..., d, *grid)``; returns ``(..., m, n, *grid)``."""
        xi = np.asarray(xi)
        ds = xi.ndim - 1 if d_space is None else d_space
        lead = xi.shape[: xi.ndim - ds - 1]
        grid = xi.shape[xi.ndim - ds:]
        out = np.zeros(lead + (self.m, self.n) + grid, dtype=complex)
        for l in range(self.d):
            xl = np.expand_dims(np.take(xi, l, axis=-ds - 1), (-ds - 2, -ds - 1))
            out += self.mats[l].reshape((self.m, self.n) + (1,) * ds) * xl
        return out

    def at(self, xi_vec):
        """``b(xi)`` for a single vector ``xi``."""
        return np.tensordot(np.asarray(xi_vec, dtype=float), self.mats, axes=1)


def sphere_directions(d, n_dirs):
    """Deterministic sample of the unit sphere in R^d."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        a = 2 * np.pi * np.arange(n_dirs) / n_dirs
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    n_pol = max(3, int(np.sqrt(n_dirs)))
    n_az = max(4, n_dirs // n_pol)
    pol = np.pi * np.arange(n_pol + 1) / n_pol
    az = 2 * np.pi * np.arange(n_az) / n_az
    P, A = np.meshgrid(pol, az, indexing="ij")
    return np.stack([np.sin(P) * np.cos(A), np.sin(P) * np.sin(A), np.cos(P)],
                    axis=-1).reshape(-1, 3)


def check_rank_condition(sym: Symbol, n_dirs: int = 64) -> EllipticityBounds:
    """Bounds ``alpha0 <= b(theta)* b(theta) <= alpha1`` over sampled unit directions."""
    if n_dirs < 2 * sym.d:
        raise ValueError("n_dirs must be at least 2d")
    dirs = sphere_directions(sym.d, n_dirs)
    b = np.einsum("kl,lmn->kmn", dirs, sym.mats)
    ev = np.linalg.eigvalsh(np.conj(np.swapaxes(b, 1, 2)) @ b)
    alpha0, alpha1 = float(ev.min()), float(ev.max())
    if alpha0 <= 1e-10:
        raise RankDeficient(f"b(theta)*b(theta) has eigenvalue {alpha0:.3e}")
    return EllipticityBounds(alpha0, alpha1)


def sample_oscillating(values, cell_N, grid: TorusGrid):
    """Values of ``f(x/eps)`` on ``grid`` from samples of ``f`` on the unit cell.

    ``values`` has shape ``(..., *cell_grid)``.  Grid point ``i`` maps to
    cell point ``(i mod P) * (cell_N / P)`` with ``P = N/K``; no
    interpolation is performed, so ``P`` must divide ``cell_N``.
    """
    P = grid.points_per_period
    if cell_N % P:
        raise GridMismatch(
            f"{P} points per period do not subsample a {cell_N}-point cell grid")
    idx = (np.arange(grid.N) % P) * (cell_N // P)
    out = values
    for ax in range(grid.d):
        out = np.take(out, idx, axis=out.ndim - grid.d + ax)
    return out


@dataclass(frozen=True)
class CoefficientField:
    """Hermitian positive definite ``m x m`` matrix function on the unit cell.

    ``values`` has shape ``(m, m, *cell_grid)``.  ``func``, when present,
    evaluates ``g`` at points of shape ``(d, ...)`` and lets the field be
    resampled at another resolution.
    """

    cell: TorusGrid
    values: np.ndarray
    func: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        if v.shape[2:] != self.cell.shape or v.shape[0] != v.shape[1]:
            raise ValueError("coefficient samples have the wrong shape")
        d = self.cell.d
        herm = np.max(np.abs(v - blockadj(v, d)))
        scale = max(1.0, float(np.max(np.abs(v))))
        if herm > HERMITIAN_TOL * scale:
            raise NotPositive(f"coefficient is not Hermitian (defect {herm:.2e})")
        ev = self.eigenvalues()
        if ev.min() <= 0:
            raise NotPositive(f"coefficient has eigenvalue {ev.min():.3e}")

    @classmethod
    def from_function(cls, func, d, cell_N):
        cell = TorusGrid(d, cell_N)
        vals = np.asarray(func(cell.coordinates()), dtype=complex)
        return cls(cell, vals, func)

    @classmethod
    def constant(cls, matrix, d, cell_N=8):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))

        def func(x):
            return np.broadcast_to(
                matrix.reshape(matrix.shape + (1,) * d),
                matrix.shape + x.shape[1:]).copy()

        return cls.from_function(func, d, cell_N)

    @property
    def m(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.cell.d

    def resample(self, cell_N):
        if cell_N == self.cell.N:
            return self
        if self.func is None:
            raise GridMismatch("coefficient has no generator to resample from")
        return CoefficientField.from_function(self.func, self.d, cell_N)

    def eigenvalues(self):
        return np.linalg.eigvalsh(blocks_last(self.values, self.d))

    @property
    def g_min(self):
        return float(self.eigenvalues().min())

    @property
    def g_max(self):
        return float(self.eigenvalues().max())

    def mean(self):
        return self.values.mean(axis=tuple(range(2, 2 + self.d)))

    def is_constant(self, tol=1e-14):
        dev = self.values - self.mean().reshape((self.m, self.m) + (1,) * self.d)
        return float(np.max(np.abs(dev))) <= tol * max(1.0, float(np.max(np.abs(self.values))))

    def on_grid(self, grid: TorusGrid):
        """Samples of ``g(x/eps)`` on ``grid``."""
        g = self if self.cell.N % grid.points_per_period == 0 or self.func is None \
            else self.resample(max(self.cell.N, grid.points_per_period))
        return sample_oscillating(g.values, g.cell.N, grid)


def _check_fields(u, n, d):
    if u.ndim < d + 1 or u.shape[-d - 1] != n:
        raise ValueError(f"expected a field with {n} components")


class EffectiveOperator:
    """``A0 = b(D)* g0 b(D)`` with constant ``g0``: diagonal per Fourier mode.

    The per-mode ``n x n`` blocks ``M(xi) = b(xi)* g0 b(xi)`` are
    eigendecomposed once, so resolvents and exponentials are exact.
    """

    def __init__(self, g0, sym: Symbol, grid: TorusGrid, theta=None):
        g0 = np.atleast_2d(np.asarray(g0, dtype=complex))
        if g0.shape != (sym.m, sym.m):
            raise ValueError("g0 has the wrong size")
        self.g0 = 0.5 * (g0 + g0.conj().T)
        self.sym = sym
        self.grid = grid
        self.theta = None if theta is None else np.atleast_2d(np.asarray(theta, float))
        d = grid.d
        self.bxi = sym.blocks(grid.wavevectors(self.theta), d)
        gbxi = np.einsum("ij,...jk" + "xyz"[:d] + "->...ik" + "xyz"[:d],
                         self.g0, self.bxi)
        M = np.einsum("...ji" + "xyz"[:d] + ",...jk" + "xyz"[:d] + "->...ik" + "xyz"[:d],
                      np.conj(self.bxi), gbxi)
        self.blocks = M
        w, V = np.linalg.eigh(blocks_last(M, d))
        self.evals = np.moveaxis(w, -1, -d - 1)      # (..., n, *grid)
        self.evecs = blocks_first(V, d)              # (..., n, n, *grid)

    @property
    def n(self):
        return self.sym.n

    def function_hat(self, F, values):
        """Apply ``phi(M(xi))`` given eigenvalue images ``values = phi(evals)``."""
        d = self.grid.d
        if self.n == 1:
            return values * F
        c = blockmul(blockadj(self.evecs, d), F, d)
        return blockmul(self.evecs, values * c, d)

    def apply_hat(self, F):
        return blockmul(self.blocks, F, self.grid.d)

    def apply(self, u):
        _check_fields(u, self.n, self.grid.d)
        return self.grid.inverse(self.apply_hat(self.grid.forward(u)))

    def shifted_evals(self, zeta):
        """``evals - zeta``; a 1-D ``zeta`` adds a leading shift axis."""
        zeta = np.asarray(zeta, dtype=complex)
        if zeta.ndim == 0:
            diff = self.evals - zeta
        else:
            diff = self.evals[None] - zeta.reshape((-1,) + (1,) * self.evals.ndim)
        gap = np.min(np.abs(diff))
        if gap <= 1e-14 * max(1.0, float(np.max(np.abs(zeta)))):
            raise SingularBlock(f"A0 - zeta has a block with gap {gap:.2e}")
        return diff

    def resolvent_hat(self, F, zeta):
        return self.function_hat(F, 1.0 / self.shifted_evals(zeta))

    def resolvent(self, f, zeta):
        return self.grid.inverse(self.resolvent_hat(self.grid.forward(f), zeta))

    def expm_hat(self, F, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            vals = np.exp(-t * self.evals)
        else:
            vals = np.exp(-t.reshape((-1,) + (1,) * self.evals.ndim) * self.evals[None])
        return self.function_hat(F, vals)

    def expm(self, f, t):
        return self.grid.inverse(self.expm_hat(self.grid.forward(f), t))

    def check_positive(self, n_dirs=64):
        """Raise if ``b(theta)* g0 b(theta)`` is not positive definite on the sphere."""
        dirs = sphere_directions(self.sym.d, n_dirs)
        b = np.einsum("kl,lmn->kmn", dirs, self.sym.mats)
        ev = np.linalg.eigvalsh(np.conj(np.swapaxes(b, 1, 2)) @ self.g0 @ b)
        if ev.min() <= 0:
            raise NotPositive(f"effective symbol has eigenvalue {ev.min():.3e}")
        return float(ev.min())


class OscillatingOperator:
    """``A_eps = b(D)* g(x/eps) b(D)`` on ``grid`` with ``eps = 1/grid.K``.

    Products with ``g(x/eps)`` are pseudo-spectral: evaluated pointwise on
    the grid without de-aliasing.
    """

    def __init__(self, g: CoefficientField, sym: Symbol, grid: TorusGrid, theta=None):
        if g.d != grid.d or sym.d != grid.d or g.m != sym.m:
            raise ValueError("coefficient, symbol and grid dimensions disagree")
        self.g = g
        self.sym = sym
        self.grid = grid
        self.theta = None if theta is None else np.atleast_2d(np.asarray(theta, float))
        self.g_eps = g.on_grid(grid)
        self.bxi = sym.blocks(grid.wavevectors(self.theta), grid.d)
        self.bxi_h = blockadj(self.bxi, grid.d)
        self.reference = EffectiveOperator(g.mean(), sym, grid, self.theta)

    @property
    def n(self):
        return self.sym.n

    @property
    def eps(self):
        return self.grid.eps

    def apply_hat(self, F):
        d = self.grid.d
        v = self.grid.inverse(blockmul(self.bxi, F, d))
        w = self.grid.forward(blockmul(self.g_eps, v, d))
        return blockmul(self.bxi_h, w, d)

    def apply(self, u):
        _check_fields(u, self.n, self.grid.d)
        return self.grid.inverse(self.apply_hat(self.grid.forward(u)))


def apply_A_eps(g, sym, eps, u, grid: TorusGrid, theta=None):
    K = int(round(1.0 / eps))
    if abs(K * eps - 1.0) > 1e-12 or grid.N % K:
        raise GridMismatch(f"1/eps={1.0 / eps} does not divide N={grid.N}")
    if grid.K != K:
        grid = TorusGrid(grid.d, grid.N, K, grid.max_entries)
    return OscillatingOperator(g, sym, grid, theta).apply(u)


def apply_A0(g0, sym, u, grid: TorusGrid, theta=None):
    return EffectiveOperator(g0, sym, grid, theta).apply(u)
