"""Batched Krylov solvers working on stacks of independent systems.

Every array has shape ``(*batch, c, *grid)``; each batch entry is its own
linear system.  Inner products reduce over the trailing ``nred`` axes and
keep dimensions so scalars broadcast back over the stack.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence


@dataclass
class SolveInfo:
    iterations: int
    residual: float     # worst relative true residual over the batch


def _flat(a, nred):
    return a.reshape(a.shape[: a.ndim - nred] + (-1,))


def _dot(a, b, nred):
    a, b = np.broadcast_arrays(a, b)
    out = np.vecdot(_flat(a, nred), _flat(b, nred))
    return out.reshape(out.shape + (1,) * nred)


def _norm(a, nred):
    v = _flat(a, nred)
    v = v.view(np.float64) if v.dtype == np.complex128 and v.flags.c_contiguous else v
    out = np.sqrt(np.real(np.vecdot(v, v)))
    return out.reshape(out.shape + (1,) * nred)


def _safe_div(num, den, mask):
    out = np.zeros(np.broadcast(num, den).shape, dtype=complex)
    np.divide(num, den, out=out, where=mask & (den != 0))
    return out


def bicgstab(apply, precond, b, nred, tol=1e-10, max_iters=2000, restarts=3):
    """Right-preconditioned BiCGStab on a batch of systems ``apply(x) = b``.

    The true residual is recomputed after each cycle and the method
    restarts from it, so the returned solution satisfies
    ``|b - apply(x)| <= tol |b|`` per system or :class:`NoConvergence` is raised.
    """
    x = np.zeros_like(b, dtype=complex)
    bnorm = _norm(b, nred)
    target = tol * bnorm
    total = 0
    r = b.astype(complex, copy=True)
    for _ in range(restarts + 1):
        rnorm = _norm(r, nred)
        done = rnorm <= target
        if done.all():
            break
        dx, its = _bicgstab_cycle(apply, precond, r, target, nred, max_iters - total)
        x += dx
        total += its
        r = b - apply(x)
        if total >= max_iters:
            break
    rel = _norm(r, nred) / np.where(bnorm > 0, bnorm, 1.0)
    worst = float(rel.max()) if rel.size else 0.0
    if worst > tol:
        raise NoConvergence(
            f"BiCGStab stopped at relative residual {worst:.2e} after {total} iterations",
            iterations=total, residual=worst)
    return x, SolveInfo(total, worst)


def _bicgstab_cycle(apply, precond, b, target, nred, max_iters):
    x = np.zeros_like(b)
    r = b.copy()
    rhat = r.copy()
    shape = _norm(b, nred).shape
    rho = np.ones(shape, complex)
    alpha = np.ones(shape, complex)
    omega = np.ones(shape, complex)
    v = np.zeros_like(b)
    p = np.zeros_like(b)
    done = _norm(r, nred) <= target
    its = 0
    while its < max_iters and not done.all():
        its += 1
        active = ~done
        rho_new = _dot(rhat, r, nred)
        beta = _safe_div(rho_new * alpha, rho * omega, active)
        p = r + beta * (p - omega * v)
        y = precond(p)
        v = apply(y)
        alpha = _safe_div(rho_new, _dot(rhat, v, nred), active)
        s = r - alpha * v
        x += alpha * y
        s_done = _norm(s, nred) <= target
        z = precond(s)
        t = apply(z)
        omega = _safe_div(_dot(t, s, nred), _dot(t, t, nred), active & ~s_done)
        x += omega * z
        r = s - omega * t
        rho = np.where(active, rho_new, 1.0)
        omega = np.where(active & ~s_done, omega, 1.0)
        alpha = np.where(active, alpha, 1.0)
        done = done | s_done | (_norm(r, nred) <= target)
        # a vanishing omega or rho means breakdown; leave it to the restart
        breakdown = active & ~done & ((np.abs(rho_new) == 0) | (np.abs(omega) == 0))
        if breakdown.any():
            break
    return x, its


def pcg(apply, precond, b, nred, tol=1e-10, max_iters=2000):
    """Preconditioned conjugate gradients for Hermitian positive systems."""
    x = np.zeros_like(b, dtype=complex)
    r = b.astype(complex, copy=True)
    bnorm = _norm(b, nred)
    target = tol * bnorm
    z = precond(r)
    p = z.copy()
    rz = _dot(r, z, nred)
    done = _norm(r, nred) <= target
    its = 0
    while its < max_iters and not done.all():
        its += 1
        active = ~done
        q = apply(p)
        alpha = _safe_div(rz, _dot(p, q, nred), active)
        x += alpha * p
        r -= alpha * q
        done = done | (_norm(r, nred) <= target)
        z = precond(r)
        rz_new = _dot(r, z, nred)
        beta = _safe_div(rz_new, rz, ~done)
        p = z + beta * p
        rz = rz_new
    r = b - apply(x)
    rel = _norm(r, nred) / np.where(bnorm > 0, bnorm, 1.0)
    worst = float(rel.max()) if rel.size else 0.0
    if worst > tol:
        raise NoConvergence(
            f"CG stopped at relative residual {worst:.2e} after {its} iterations",
            iterations=its, residual=worst)
    return x, SolveInfo(its, worst)
