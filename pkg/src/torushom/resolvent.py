"""Resolvents of ``A_eps`` (iterative) and ``A0`` (exact), and the sector weight c(phi)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidAngle
from .krylov import bicgstab
from .operators import EffectiveOperator, OscillatingOperator

TWO_PI = 2 * np.pi


def c_of_phi(phi: float) -> float:
    """``1/|sin phi|`` off the left half-plane sector, 1 on ``[pi/2, 3pi/2]``."""
    if not 0 < phi < TWO_PI:
        raise InvalidAngle(f"phi={phi} is not in (0, 2pi)")
    if np.pi / 2 <= phi <= 3 * np.pi / 2:
        return 1.0
    return 1.0 / abs(np.sin(phi))


def principal_arg(zeta) -> float:
    phi = float(np.angle(zeta))
    return phi + TWO_PI if phi < 0 else phi


@dataclass(frozen=True)
class Shift:
    zeta: complex
    phi: float
    c_phi: float

    @classmethod
    def from_zeta(cls, zeta):
        zeta = complex(zeta)
        if zeta.imag == 0 and zeta.real >= 0:
            raise InvalidAngle(f"zeta={zeta} lies on [0, inf)")
        phi = principal_arg(zeta)
        return cls(zeta, phi, c_of_phi(phi))

    @classmethod
    def polar(cls, modulus, phi):
        return cls.from_zeta(modulus * np.exp(1j * phi))


def _as_zeta(zeta):
    if isinstance(zeta, Shift):
        return zeta.zeta
    return zeta


@dataclass
class SolverStats:
    """Worst iteration count and relative residual seen by a solver."""

    iterations: int = 0
    residual: float = 0.0

    def update(self, iterations, residual):
        self.iterations = max(self.iterations, iterations)
        self.residual = max(self.residual, residual)

    def reset(self):
        self.iterations = 0
        self.residual = 0.0


class ResolventSolver:
    """Iterative ``(A_eps - zeta)^{-1}`` for one or many shifts at once.

    BiCGStab runs in Fourier space, right-preconditioned by the exact
    resolvent of the constant-coefficient operator built from the cell
    average of ``g``.  A 1-D array of shifts is solved as one batch and
    the solutions are stacked along a new leading axis.
    """

    def __init__(self, op: OscillatingOperator, tol=1e-10, max_iters=2000, stats=None):
        self.op = op
        self.tol = tol
        self.max_iters = max_iters
        self.stats = SolverStats() if stats is None else stats

    @property
    def grid(self):
        return self.op.grid

    def resolvent_hat(self, F, zeta):
        zeta = np.asarray(_as_zeta(zeta), dtype=complex)
        ref = self.op.reference
        pvals = 1.0 / ref.shifted_evals(zeta)
        # fibers broadcast against an unbatched right-hand side
        lead = ref.evals.shape[:-self.grid.d - 1]
        F = np.broadcast_to(F, np.broadcast_shapes(F.shape, lead + F.shape[-self.grid.d - 1:]))
        if zeta.ndim == 0:
            zb = zeta
            B = F
        else:
            zb = zeta.reshape((-1,) + (1,) * F.ndim)
            B = np.broadcast_to(F, zeta.shape + F.shape)

        def apply(X):
            return self.op.apply_hat(X) - zb * X

        def precond(X):
            return ref.function_hat(X, pvals)

        X, info = bicgstab(apply, precond, B, self.grid.d + 1,
                           tol=self.tol, max_iters=self.max_iters)
        self.stats.update(info.iterations, info.residual)
        return X

    def resolvent(self, f, zeta):
        return self.grid.inverse(self.resolvent_hat(self.grid.forward(f), zeta))


def solve_resolvent_A_eps(op: OscillatingOperator, f, zeta, tol=1e-10, max_iters=2000):
    return ResolventSolver(op, tol, max_iters).resolvent(f, zeta)


def solve_resolvent_A0(op: EffectiveOperator, f, zeta):
    return op.resolvent(f, _as_zeta(zeta))
