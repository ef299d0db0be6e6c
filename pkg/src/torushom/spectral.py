"""Unit-torus grids, Fourier transforms and L2 norms.

Fields are plain complex arrays laid out as ``(*batch, c, *grid)``: any
number of leading batch axes, one component axis, then ``d`` spatial axes
of length ``N``.  Fourier coefficients use the same layout, indexed by the
integer frequencies returned by :meth:`TorusGrid.frequencies` and
normalized so that the L2 norm (mean over the unit cell) equals the l2 norm
of the coefficients.

The derivative ``D = -i grad`` acts on ``exp(2 pi i k.x)`` as multiplication
by ``2 pi k``.  Bloch fibers with quasi-momentum ``theta`` shift this to
``2 pi k + theta``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import GridMismatch

MEMORY_CAP = 2**26


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on [0, 1)^d with ``N`` points per axis and ``eps = 1/K``."""

    d: int
    N: int
    K: int = 1
    max_entries: int = MEMORY_CAP

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"d must be 1, 2 or 3, got {self.d}")
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two, got {self.N}")
        if self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K}")
        if self.N % self.K:
            raise GridMismatch(f"K={self.K} does not divide N={self.N}")
        if self.K > 1 and self.N < 4 * self.K:
            raise GridMismatch(
                f"N={self.N} gives fewer than 4 samples per period for K={self.K}")
        if self.d * self.N**self.d > self.max_entries:
            raise ValueError("grid exceeds the configured memory cap")

    @property
    def eps(self) -> float:
        return 1.0 / self.K

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.d

    @property
    def axes(self) -> tuple:
        return tuple(range(-self.d, 0))

    @property
    def points_per_period(self) -> int:
        return self.N // self.K

    def check_capacity(self, components: int):
        if self.d * components * self.N**self.d > self.max_entries:
            raise ValueError("field exceeds the configured memory cap")

    def coordinates(self) -> np.ndarray:
        """Grid points, shape ``(d, *grid)``."""
        x = np.arange(self.N) / self.N
        return np.array(np.meshgrid(*([x] * self.d), indexing="ij"))

    def frequencies(self) -> np.ndarray:
        """Integer frequencies in [-N/2, N/2), shape ``(d, *grid)``, FFT order."""
        k = np.fft.fftfreq(self.N, 1.0 / self.N).round().astype(int)
        return np.array(np.meshgrid(*([k] * self.d), indexing="ij"))

    def wavevectors(self, theta=None) -> np.ndarray:
        """Symbol arguments ``xi = 2 pi k + theta``.

        ``theta`` is ``None``, a ``(d,)`` vector or a ``(B, d)`` stack of
        quasi-momenta; the result has shape ``(d, *grid)`` or
        ``(B, d, *grid)`` accordingly.
        """
        xi = 2 * np.pi * self.frequencies().astype(float)
        if theta is None:
            return xi
        theta = np.asarray(theta, dtype=float)
        if theta.shape[-1] != self.d:
            raise ValueError("quasi-momentum has the wrong dimension")
        return xi + theta.reshape(theta.shape + (1,) * self.d)

    def forward(self, f: np.ndarray) -> np.ndarray:
        return sfft.fftn(f, axes=self.axes, norm="forward")

    def inverse(self, F: np.ndarray) -> np.ndarray:
        return sfft.ifftn(F, axes=self.axes, norm="forward")

    def inner(self, f: np.ndarray, h: np.ndarray):
        """L2 inner product (conjugate-linear in ``f``) over component and space axes."""
        ax = tuple(range(-self.d - 1, 0))
        return np.sum(np.conj(f) * h, axis=ax) / self.N**self.d

    def l2_norm(self, f: np.ndarray):
        ax = tuple(range(-self.d - 1, 0))
        return np.sqrt(np.sum(np.abs(f) ** 2, axis=ax) / self.N**self.d)

    def coef_norm(self, F: np.ndarray):
        ax = tuple(range(-self.d - 1, 0))
        return np.sqrt(np.sum(np.abs(F) ** 2, axis=ax))

    def mode_index(self, k) -> tuple:
        """Array index of integer frequency ``k`` in the FFT layout."""
        return tuple(int(kj) % self.N for kj in np.atleast_1d(k))

    def plane_wave(self, k, v) -> np.ndarray:
        """``v * exp(2 pi i k.x)`` as a field with ``len(v)`` components."""
        x = self.coordinates()
        phase = np.exp(2j * np.pi * np.tensordot(np.atleast_1d(k), x, axes=1))
        return np.asarray(v, dtype=complex).reshape((-1,) + (1,) * self.d) * phase


def forward(f, grid: TorusGrid):
    return grid.forward(f)


def inverse(F, grid: TorusGrid):
    return grid.inverse(F)


def l2_norm(f, grid: TorusGrid):
    return grid.l2_norm(f)


def random_field(grid: TorusGrid, c: int, rng, batch=()) -> np.ndarray:
    shape = tuple(batch) + (c,) + grid.shape
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# Per-mode block algebra.  Blocks have shape (..., p, q, *grid); fields
# (..., q, *grid).  ``d`` is the number of trailing spatial axes.

def blockmul(M, F, d):
    if M.shape[-d - 1] == 1:
        return np.take(M, 0, axis=-d - 1) * F
    return np.sum(M * np.expand_dims(F, -d - 2), axis=-d - 1)


def blockadj(M, d):
    return np.conj(np.swapaxes(M, -d - 2, -d - 1))


def blocks_last(M, d):
    """Move the two block axes behind the spatial axes."""
    return np.moveaxis(M, (-d - 2, -d - 1), (-2, -1))


def blocks_first(M, d):
    return np.moveaxis(M, (-2, -1), (-d - 2, -d - 1))
