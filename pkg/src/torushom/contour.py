"""Riesz-Dunford contour quadrature for ``exp(-tA)``.

The contour is the unit arc ``{e^{i phi}: pi/4 <= phi <= 7pi/4}`` joined
to the rays ``{r e^{+-i pi/4}: r >= 1}``, shrunk by the factor ``1/t``.  It
encloses [0, inf) counter-clockwise, so

    exp(-tA) = -1/(2 pi i) sum_j w_j exp(-zeta_j t) (A - zeta_j)^{-1}.

Both pieces are integrated with composite Gauss-Legendre panels; the ray
panels grow geometrically away from the corner at ``r = 1`` and the rays
are cut at the radius where the neglected tail of ``|exp(-eta)|`` drops
below ``tol``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidTime
from .operators import EffectiveOperator
from .resolvent import principal_arg

PANEL = 16


@dataclass(frozen=True)
class Contour:
    t: float
    n_arc: int
    n_ray: int
    R: float
    radius: float
    nodes: np.ndarray       # zeta_j on the scaled contour
    weights: np.ndarray     # d zeta_j, orientation included
    unscaled: np.ndarray    # eta_j = t zeta_j

    @property
    def size(self):
        return self.nodes.size

    def coefficients(self, t=None):
        """``-w_j exp(-zeta_j t) / (2 pi i)`` for the weighted node sum."""
        t = self.t if t is None else t
        return -self.weights * np.exp(-self.nodes * t) / (2j * np.pi)


def ray_radius(tol, radius=1.0):
    """Cut-off with ``2 sqrt2 exp(-R/sqrt2) <= tol``."""
    return max(np.sqrt(2) * np.log(2 * np.sqrt(2) / tol), 2 * radius)


def _gauss_panels(breaks, n_total):
    """Gauss-Legendre nodes and weights on consecutive panels."""
    n_pan = len(breaks) - 1
    counts = np.full(n_pan, n_total // n_pan)
    counts[: n_total % n_pan] += 1
    xs, ws = [], []
    for a, b, c in zip(breaks[:-1], breaks[1:], counts):
        x, w = np.polynomial.legendre.leggauss(int(c))
        xs.append(0.5 * (b - a) * x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


def build_contour(t, n_arc=64, n_ray=128, tol=1e-12, radius=1.0) -> Contour:
    if not t > 0:
        raise InvalidTime(f"t={t} must be positive")
    if n_arc < 8 or n_ray < 8:
        raise ValueError("need at least 8 nodes on the arc and on each ray")
    R = ray_radius(tol, radius)
    n_pan = max(1, n_arc // PANEL)
    phi, wphi = _gauss_panels(np.linspace(np.pi / 4, 7 * np.pi / 4, n_pan + 1), n_arc)
    arc = radius * np.exp(1j * phi)
    warc = 1j * arc * wphi

    n_pan = max(1, n_ray // PANEL)
    L = R - radius
    breaks = L * (2.0 ** np.arange(n_pan + 1) - 1) / (2.0**n_pan - 1)
    s, ws = _gauss_panels(breaks, n_ray)
    r = radius + s
    up, down = np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)
    # upper ray runs inward (R -> radius), lower ray outward
    eta = np.concatenate([(r * up)[::-1], arc, r * down])
    w = np.concatenate([(-up * ws)[::-1], warc, down * ws])
    return Contour(float(t), n_arc, n_ray, float(R), float(radius),
                   eta / t, w / t, eta)


def node_args(contour: Contour):
    return np.array([principal_arg(z) for z in contour.nodes])


def weighted_sum(coef, U):
    """``sum_j coef_j U[j]`` accumulated in node order."""
    out = np.zeros(U.shape[1:], dtype=complex)
    for c, u in zip(coef, U):
        out += c * u
    return out


def expm_contour_hat(solver, t, F, contour: Contour):
    coef = contour.coefficients(t)
    return weighted_sum(coef, solver.resolvent_hat(F, contour.nodes))


def expm_contour(solver, t, f, contour: Contour = None):
    """Contour approximation of ``exp(-tA) f``.

    ``solver`` is anything with ``grid`` and ``resolvent_hat(F, zetas)``:
    an :class:`EffectiveOperator` or a :class:`ResolventSolver`.
    """
    if not t > 0:
        raise InvalidTime(f"t={t} must be positive; use the spectral path at t=0")
    contour = build_contour(t) if contour is None else contour
    grid = solver.grid
    return grid.inverse(expm_contour_hat(solver, t, grid.forward(f), contour))


def expm_spectral_A0(a0: EffectiveOperator, t, f):
    if t < 0:
        raise InvalidTime(f"t={t} must be non-negative")
    if t == 0:
        return np.array(f, dtype=complex)
    return a0.expm(f, t)


def frak_c_closed_form():
    return 1.5 * np.e + 2**1.5 / np.pi * np.exp(-1 / np.sqrt(2))


def frak_c_quadrature(n_arc=64, n_ray=128, tol=1e-16):
    """``(1/pi) int_gamma |exp(-eta)| |d eta|`` on the unscaled contour."""
    c = build_contour(1.0, n_arc, n_ray, tol)
    return float(np.sum(np.abs(np.exp(-c.unscaled)) * np.abs(c.weights)) / np.pi)


def frak_c(n_arc=64, n_ray=128):
    """``(closed_form, quadrature)`` for the contour constant."""
    return float(frak_c_closed_form()), frak_c_quadrature(n_arc, n_ray)
