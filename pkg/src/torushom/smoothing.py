"""Steklov smoothing and the elliptic / parabolic correctors."""
from __future__ import annotations

import numpy as np

from .cell import CorrectorField
from .operators import EffectiveOperator
from .spectral import TorusGrid, blockadj, blockmul


class SmoothingMultiplier:
    """Fourier multiplier of the cell average ``S_eps u(x) = int u(x - eps z) dz``.

    On ``exp(i xi.x)`` it acts as ``prod_j exp(-i xi_j eps/2) sinc(xi_j eps/2)``.
    With ``enabled=False`` the multiplier is identically one.
    """

    def __init__(self, grid: TorusGrid, eps=None, theta=None, enabled=True):
        self.grid = grid
        self.eps = grid.eps if eps is None else float(eps)
        self.enabled = enabled
        xi = grid.wavevectors(None if theta is None else np.atleast_2d(theta))
        h = 0.5 * self.eps * xi
        s = np.prod(np.exp(-1j * h) * np.sinc(h / np.pi), axis=-grid.d - 1)
        if not enabled:
            s = np.ones_like(s)
        self.values = np.expand_dims(s, -grid.d - 1)    # (..., 1, *grid)

    def apply_hat(self, F):
        return self.values * F

    def adjoint_hat(self, F):
        return np.conj(self.values) * F

    def apply(self, f):
        return self.grid.inverse(self.apply_hat(self.grid.forward(f)))


def apply_S_eps(sm: SmoothingMultiplier, f):
    return sm.apply(f)


class Corrector:
    """``[Lambda^eps] S_eps b(D) phi(A0)`` for ``phi`` a resolvent or an exponential."""

    def __init__(self, Lam: CorrectorField, sm: SmoothingMultiplier, a0: EffectiveOperator):
        self.grid = a0.grid
        self.a0 = a0
        self.sm = sm
        self.lam_eps = Lam.on_grid(self.grid)            # (n, m, *grid)
        self.lam_eps_h = blockadj(self.lam_eps, self.grid.d)

    def _chain(self, U):
        d = self.grid.d
        V = self.sm.apply_hat(blockmul(self.a0.bxi, U, d))
        return blockmul(self.lam_eps, self.grid.inverse(V), d)

    def _chain_adjoint_hat(self, h):
        """``b(D)* S_eps* [Lambda^eps]*`` applied to a field, returned in Fourier space."""
        d = self.grid.d
        W = self.sm.adjoint_hat(self.grid.forward(blockmul(self.lam_eps_h, h, d)))
        return blockmul(blockadj(self.a0.bxi, d), W, d)

    def elliptic(self, f, zeta):
        return self._chain(self.a0.resolvent_hat(self.grid.forward(f), zeta))

    def elliptic_adjoint(self, h, zeta):
        return self.grid.inverse(
            self.a0.resolvent_hat(self._chain_adjoint_hat(h), np.conj(zeta)))

    def parabolic(self, f, t):
        return self._chain(self.a0.expm_hat(self.grid.forward(f), t))

    def parabolic_adjoint(self, h, t):
        return self.grid.inverse(self.a0.expm_hat(self._chain_adjoint_hat(h), t))


def corrector_elliptic(Lam, sm, a0: EffectiveOperator, zeta, f):
    from .resolvent import _as_zeta
    return Corrector(Lam, sm, a0).elliptic(f, _as_zeta(zeta))


def corrector_parabolic(Lam, sm, a0: EffectiveOperator, t, f):
    if t <= 0:
        raise ValueError("t must be positive")
    return Corrector(Lam, sm, a0).parabolic(f, t)


def multiplied_smoothing_bound(f_values, cell_N, sm: SmoothingMultiplier, seed=0,
                               tol_rel=1e-4, max_iters=500):
    """Power-iteration estimate of ``|[f^eps] S_eps|`` in L2.

    ``f_values`` holds samples of a scalar periodic ``f`` on a ``cell_N``
    grid of the unit cell.
    """
    from .norms import ErrorOperator, op_norm
    from .operators import sample_oscillating
    grid = sm.grid
    fe = sample_oscillating(np.asarray(f_values, complex), cell_N, grid)

    def fwd(u):
        return fe * sm.apply(u)

    def adj(v):
        return grid.inverse(sm.adjoint_hat(grid.forward(np.conj(fe) * v)))

    shape = sm.values.shape[:-grid.d - 1] + (1,) + grid.shape
    opE = ErrorOperator(fwd, adj, shape, grid, "multiplied smoothing")
    return op_norm(opE, seed=seed, tol_rel=tol_rel, max_iters=max_iters)
