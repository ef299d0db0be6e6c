"""Operator norms of homogenization error operators by power iteration.

An :class:`ErrorOperator` is a black-box linear map with its adjoint.  When
its input has leading axes in front of ``(c, *grid)`` the map is taken to be
block diagonal over them (one block per Bloch fiber); power iteration then
runs independently per block and the norm is the largest block norm.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .cell import CorrectorField
from .contour import Contour, build_contour, weighted_sum
from .errors import AdjointMismatch
from .operators import CoefficientField, EffectiveOperator, OscillatingOperator, Symbol
from .resolvent import ResolventSolver, SolverStats
from .smoothing import Corrector, SmoothingMultiplier
from .spectral import TorusGrid


@dataclass
class ErrorOperator:
    forward: Callable
    adjoint: Callable
    in_shape: tuple
    grid: TorusGrid
    descriptor: str = ""
    # restrict(indices) -> ErrorOperator on a subset of the leading blocks
    restrict: Optional[Callable] = None

    @property
    def block_ndim(self):
        return len(self.in_shape) - self.grid.d - 1


@dataclass
class NormEstimate:
    value: float
    blocks: np.ndarray
    iterations: int
    converged: bool
    seed: int
    history: list = field(default_factory=list)


def _block_norm(opE, x):
    return opE.grid.l2_norm(x)


def _expand(v, grid):
    return v.reshape(v.shape + (1,) * (grid.d + 1))


def check_adjoint(opE: ErrorOperator, seed=0, tol=1e-8):
    """Compare ``<E x, y>`` with ``<x, E* y>`` on random inputs."""
    rng = np.random.default_rng(seed + 7919)
    x = rng.standard_normal(opE.in_shape) + 1j * rng.standard_normal(opE.in_shape)
    Ex = opE.forward(x)
    y = rng.standard_normal(Ex.shape) + 1j * rng.standard_normal(Ex.shape)
    lhs = np.sum(opE.grid.inner(Ex, y))
    rhs = np.sum(opE.grid.inner(x, opE.adjoint(y)))
    scale = float(np.sqrt(np.sum(_block_norm(opE, x) ** 2) * np.sum(_block_norm(opE, y) ** 2)))
    defect = abs(lhs - rhs) / scale
    if defect > tol:
        raise AdjointMismatch(f"{opE.descriptor}: adjoint defect {defect:.2e}")
    return defect


def power_iteration(opE: ErrorOperator, seed=0, tol_rel=1e-4, max_iters=500,
                    check=True, atol=1e-12, res_factor=20.0,
                    margin=0.1) -> NormEstimate:
    """Largest singular value per block via power iteration on ``E* E``.

    The estimates ``|E x_k|`` are non-decreasing and bound the true norm
    from below.  A block stops once its estimate changes by at most
    ``tol_rel`` relative and the eigen-residual ``|E*E x - s^2 x|`` is at
    most ``res_factor * tol_rel * s^2``; the second test keeps nearly equal
    leading singular values from stalling the first.  A block that meets
    the first test only also stops once its estimate sits a relative
    ``margin`` below a fully converged block, since it cannot change the
    maximum.  Blocks whose estimate falls below ``atol`` stop at once.  If the operator can be
    restricted to a subset of blocks, stopped blocks are dropped from later
    applications.
    """
    if check:
        check_adjoint(opE, seed)
    grid = opE.grid
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(opE.in_shape) + 1j * rng.standard_normal(opE.in_shape)
    x /= _expand(_block_norm(opE, x), grid)
    blocked = opE.block_ndim == 1
    n_blocks = opE.in_shape[0] if blocked else 1
    est = np.zeros(n_blocks)
    active = np.arange(n_blocks)
    op = opE
    prev = None
    best = 0.0
    history = []
    converged = False
    it = 0

    def expand(v):
        return _expand(v if blocked else v[0], grid)

    for it in range(1, max_iters + 1):
        y = op.forward(x)
        cur = np.atleast_1d(_block_norm(op, y))
        est[active] = cur
        history.append(est.copy())
        z = op.adjoint(y)
        lam = cur**2
        res = np.atleast_1d(_block_norm(op, z - expand(lam) * x))
        if prev is not None:
            steady = np.abs(cur - prev) <= tol_rel * cur
            full = steady & (res <= res_factor * tol_rel * lam)
            if full.any():
                best = max(best, float(np.max(cur[full])))
            done = full | (cur <= atol) | (steady & (cur <= (1 - margin) * best))
            if done.all():
                converged = True
                break
            if blocked and done.any() and opE.restrict is not None:
                keep = ~done
                active = active[keep]
                op = opE.restrict(active)
                z, cur = z[keep], cur[keep]
        prev = cur
        nrm = np.atleast_1d(_block_norm(op, z))
        if np.all(nrm == 0):
            converged = True
            break
        x = z / expand(np.where(nrm == 0, 1.0, nrm))
    return NormEstimate(float(np.max(est)), est, it, converged, seed, history)


def op_norm(opE: ErrorOperator, seed=0, tol_rel=1e-4, max_iters=500) -> float:
    res = power_iteration(opE, seed, tol_rel, max_iters)
    if not res.converged:
        warnings.warn(f"{opE.descriptor}: power iteration did not converge "
                      f"in {max_iters} steps; returning best estimate", RuntimeWarning)
    return res.value


def identity_operator(grid: TorusGrid, c=1, batch=()):
    return ErrorOperator(lambda u: u, lambda u: u, tuple(batch) + (c,) + grid.shape,
                         grid, "identity")


def multiplier_operator(grid: TorusGrid, mult, c=1):
    """Fourier multiplier ``mult`` (shape ``grid.shape``) as an ErrorOperator."""
    fwd = lambda u: grid.inverse(mult * grid.forward(u))
    adj = lambda u: grid.inverse(np.conj(mult) * grid.forward(u))
    return ErrorOperator(fwd, adj, (c,) + grid.shape, grid, "multiplier")


def grad_compose(opE: ErrorOperator, theta=None) -> ErrorOperator:
    """``D o E``: stacks ``D_l (E u)`` for ``l = 1..d`` into ``d*n`` components."""
    grid = opE.grid
    d = grid.d
    xi = grid.wavevectors(None if theta is None else np.atleast_2d(theta))
    xi = np.expand_dims(xi, -d - 1)                  # (..., d, 1, *grid)

    def fwd(u):
        V = grid.forward(opE.forward(u))             # (..., n, *grid)
        G = xi * np.expand_dims(V, -d - 2)           # (..., d, n, *grid)
        G = G.reshape(G.shape[:-d - 2] + (-1,) + grid.shape)
        return grid.inverse(G)

    def adj(h):
        H = grid.forward(h)
        H = H.reshape(H.shape[:-d - 1] + (xi.shape[-d - 2], -1) + grid.shape)
        return opE.adjoint(grid.inverse(np.sum(xi * H, axis=-d - 2)))

    return ErrorOperator(fwd, adj, opE.in_shape, grid, "D(" + opE.descriptor + ")")


@dataclass(frozen=True)
class Problem:
    """A homogenization problem: coefficient, symbol, corrector and ``g0``."""

    g: CoefficientField
    sym: Symbol
    Lam: CorrectorField
    g0: np.ndarray

    @classmethod
    def build(cls, g, sym, tol=1e-10):
        from .cell import homogenize
        Lam, g0 = homogenize(g, sym, tol)
        return cls(g, sym, Lam, np.asarray(g0))

    @property
    def n(self):
        return self.sym.n


ELLIPTIC_METRICS = ("res_diff", "res_grad_corr", "res_corr")
PARABOLIC_METRICS = ("semi_diff", "semi_grad_corr", "semi_corr")
EXTRA_METRICS = ("res_grad_diff", "semi_grad_diff")


def paper_factor(metric, eps, t=None, zeta=None, c_phi=None):
    """Predicted scaling of each error norm (constants left out)."""
    if metric in ("res_diff", "res_corr"):
        return c_phi**2 * abs(zeta) ** -0.5 * eps
    if metric == "res_grad_corr":
        return c_phi**2 * eps
    if metric == "semi_diff":
        return eps * (t + eps**2) ** -0.5
    if metric == "semi_grad_corr":
        return eps / t
    if metric == "semi_corr":
        return eps * t**-0.5
    if metric in EXTRA_METRICS:
        return 1.0
    raise KeyError(metric)


class ErrorSuite:
    """Error operators of one problem at one oscillation scale ``eps = 1/grid.K``.

    ``theta`` selects the Bloch fibers; the reported norms are maxima over
    them.  Contour settings apply to the semigroup metrics.
    """

    def __init__(self, problem: Problem, grid: TorusGrid, theta=None, smoothing=True,
                 tol=1e-10, max_iters=2000, n_arc=64, n_ray=128, contour_tol=1e-12):
        self._settings = dict(problem=problem, grid=grid, eps=grid.eps, smoothing=smoothing,
                              tol=tol, max_iters=max_iters, stats=SolverStats(),
                              contour_args=dict(n_arc=n_arc, n_ray=n_ray, tol=contour_tol))
        self.__dict__.update(self._settings)
        self._init_operators(None if theta is None else np.atleast_2d(np.asarray(theta, float)))

    def _init_operators(self, theta):
        problem, grid = self.problem, self.grid
        self.theta = theta
        self.a_eps = OscillatingOperator(problem.g, problem.sym, grid, theta)
        self.a0 = EffectiveOperator(problem.g0, problem.sym, grid, theta)
        self.solver = ResolventSolver(self.a_eps, self.tol, self.max_iters, self.stats)
        self.sm = SmoothingMultiplier(grid, theta=theta, enabled=self.smoothing)
        self.corr = Corrector(problem.Lam, self.sm, self.a0)

    @property
    def in_shape(self):
        lead = () if self.theta is None else (self.theta.shape[0],)
        return lead + (self.problem.n,) + self.grid.shape

    def subset(self, idx):
        """The same suite on a subset of the Bloch fibers."""
        new = object.__new__(ErrorSuite)
        new.__dict__.update(self._settings)
        new._init_operators(self.theta[np.asarray(idx)])
        return new

    def _op(self, fwd, adj, name):
        return ErrorOperator(fwd, adj, self.in_shape, self.grid, name)

    def resolvent_diff(self, zeta, corrected=False):
        g, eps = self.grid, self.eps

        def make(z, sign):
            def apply(u):
                F = g.forward(u)
                out = g.inverse(self.solver.resolvent_hat(F, z) - self.a0.resolvent_hat(F, z))
                if corrected:
                    out -= eps * (self.corr.elliptic(u, zeta) if sign > 0
                                  else self.corr.elliptic_adjoint(u, zeta))
                return out
            return apply

        name = "res_corr" if corrected else "res_diff"
        return self._op(make(zeta, 1), make(np.conj(zeta), -1), name)

    def contour(self, t) -> Contour:
        return build_contour(t, **self.contour_args)

    def semigroup_diff(self, t, corrected=False):
        g, eps = self.grid, self.eps
        c = self.contour(t)
        coef = c.coefficients(t)

        def diff(u, nodes, cf):
            F = g.forward(u)
            U = self.solver.resolvent_hat(F, nodes) - self.a0.resolvent_hat(F, nodes)
            return g.inverse(weighted_sum(cf, U))

        def fwd(u):
            out = diff(u, c.nodes, coef)
            if corrected:
                out -= eps * self.corr.parabolic(u, t)
            return out

        def adj(h):
            out = diff(h, np.conj(c.nodes), np.conj(coef))
            if corrected:
                out -= eps * self.corr.parabolic_adjoint(h, t)
            return out

        return self._op(fwd, adj, "semi_corr" if corrected else "semi_diff")

    def operator(self, metric, t=None, zeta=None):
        op = self._operator(metric, t, zeta)
        if self.theta is not None:
            op.restrict = lambda idx: self.subset(idx)._operator(metric, t, zeta)
        return op

    def _operator(self, metric, t=None, zeta=None):
        if metric == "res_diff":
            return self.resolvent_diff(zeta)
        if metric == "res_corr":
            return self.resolvent_diff(zeta, corrected=True)
        if metric == "res_grad_corr":
            return grad_compose(self.resolvent_diff(zeta, corrected=True), self.theta)
        if metric == "res_grad_diff":
            return grad_compose(self.resolvent_diff(zeta), self.theta)
        if metric == "semi_diff":
            return self.semigroup_diff(t)
        if metric == "semi_corr":
            return self.semigroup_diff(t, corrected=True)
        if metric == "semi_grad_corr":
            return grad_compose(self.semigroup_diff(t, corrected=True), self.theta)
        if metric == "semi_grad_diff":
            return grad_compose(self.semigroup_diff(t), self.theta)
        raise KeyError(metric)

    def norm(self, metric, t=None, zeta=None, seed=0, tol_rel=1e-4, max_iters=500):
        """Power-iteration estimate of one error norm (max over fibers)."""
        self.stats.reset()
        op = self.operator(metric, t=t, zeta=zeta)
        est = power_iteration(op, seed, tol_rel, max_iters)
        if not est.converged:
            warnings.warn(f"{metric}: power iteration hit max_iters", RuntimeWarning)
        return est


def error_suite(suite: ErrorSuite, t=None, zeta=None, seed=0, tol_rel=1e-4,
                max_iters=500, metrics=None):
    """Norms of the error operators at ``(eps, t)`` and/or ``(eps, zeta)``.

    Returns ``{metric: (value, paper_factor, NormEstimate)}``.
    """
    from .resolvent import Shift
    out = {}
    if metrics is None:
        metrics = (ELLIPTIC_METRICS if zeta is not None else ()) + \
                  (PARABOLIC_METRICS if t is not None else ())
    shift = Shift.from_zeta(zeta) if zeta is not None else None
    for metric in metrics:
        elliptic = metric.startswith("res")
        est = suite.norm(metric, t=None if elliptic else t,
                         zeta=shift.zeta if elliptic else None,
                         seed=seed, tol_rel=tol_rel, max_iters=max_iters)
        factor = paper_factor(metric, suite.eps, t=t, zeta=shift.zeta if shift else None,
                              c_phi=shift.c_phi if shift else None)
        out[metric] = (est.value, factor, est)
    return out
