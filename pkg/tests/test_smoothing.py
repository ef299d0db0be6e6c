import numpy as np
import pytest

from oracles import dft_matrices, int_freqs, spectral_norm

from torushom.cell import homogenize
from torushom.harness.presets import make_problem
from torushom.operators import EffectiveOperator
from torushom.smoothing import (Corrector, SmoothingMultiplier, apply_S_eps,
                                multiplied_smoothing_bound)
from torushom.spectral import TorusGrid, random_field


def test_multiplier_on_plane_waves():
    grid = TorusGrid(1, 64, 8)
    sm = SmoothingMultiplier(grid)
    k = grid.frequencies()[0]
    xi = 2 * np.pi * k
    with np.errstate(invalid="ignore", divide="ignore"):
        want = (1 - np.exp(-1j * xi * grid.eps)) / (1j * xi * grid.eps)
    want[k == 0] = 1.0
    np.testing.assert_allclose(sm.values[0], want, atol=1e-14)
    assert np.max(np.abs(sm.values)) <= 1 + 1e-15


def test_smoothing_is_a_cell_average():
    grid = TorusGrid(1, 64, 4)
    x = grid.coordinates()[0]
    u = lambda y: np.cos(2 * np.pi * 3 * y) + 0.5 * np.sin(2 * np.pi * 7 * y)
    z, w = np.polynomial.legendre.leggauss(40)
    z, w = 0.5 * (z + 1), 0.5 * w
    direct = sum(wj * u(x - grid.eps * zj) for zj, wj in zip(z, w))
    got = apply_S_eps(SmoothingMultiplier(grid), u(x)[None].astype(complex))
    np.testing.assert_allclose(got[0].real, direct, atol=1e-12)


def test_disabled_smoothing_is_identity(rng):
    grid = TorusGrid(2, 16, 4)
    u = random_field(grid, 2, rng)
    np.testing.assert_allclose(SmoothingMultiplier(grid, enabled=False).apply(u), u,
                               atol=1e-14)


def test_multiplied_smoothing_bounded_by_cell_l2_norm():
    g, sym, _ = make_problem("cos1d", cell_N=64)
    Lam, _ = homogenize(g, sym)
    grid = TorusGrid(1, 256, 16)
    bound = multiplied_smoothing_bound(Lam.values[0, 0], 64, SmoothingMultiplier(grid))
    assert 0 < bound <= Lam.l2_norm() * (1 + 1e-9)


def test_multiplied_smoothing_of_cosine_matches_dense():
    N, K = 64, 8
    grid = TorusGrid(1, N, K)
    F, Finv = dft_matrices(N)
    xi = 2 * np.pi * int_freqs(N)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = (1 - np.exp(-1j * xi / K)) / (1j * xi / K)
    s[xi == 0] = 1.0
    x = np.arange(N) / N
    M = np.diag(np.cos(2 * np.pi * K * x)) @ Finv @ np.diag(s) @ F
    cell = np.cos(2 * np.pi * np.arange(16) / 16)
    bound = multiplied_smoothing_bound(cell, 16, SmoothingMultiplier(grid))
    assert bound <= 1 / np.sqrt(2) + 1e-8
    assert bound == pytest.approx(spectral_norm(M), rel=1e-3)


def test_multiplied_smoothing_with_unit_function_is_one():
    grid = TorusGrid(1, 64, 4)
    bound = multiplied_smoothing_bound(np.ones(16), 16, SmoothingMultiplier(grid))
    # the runner-up singular value is 0.974, so convergence is slow
    assert bound == pytest.approx(1.0, rel=1e-4) and bound <= 1 + 1e-12


@pytest.mark.parametrize("smoothing", [True, False])
def test_corrector_adjoints(rng, smoothing):
    g, sym, _ = make_problem("cos1d", cell_N=64)
    Lam, g0 = homogenize(g, sym)
    grid = TorusGrid(1, 64, 4)
    theta = np.array([[0.3], [1.7]])
    a0 = EffectiveOperator(g0, sym, grid, theta)
    corr = Corrector(Lam, SmoothingMultiplier(grid, theta=theta, enabled=smoothing), a0)
    f = random_field(grid, 1, rng, batch=(2,))
    h = random_field(grid, 1, rng, batch=(2,))
    z = 2 * np.exp(2j)
    lhs = grid.inner(corr.elliptic(f, z), h)
    rhs = grid.inner(f, corr.elliptic_adjoint(h, z))
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)
    lhs = grid.inner(corr.parabolic(f, 0.3), h)
    rhs = grid.inner(f, corr.parabolic_adjoint(h, 0.3))
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)


def test_corrector_vanishes_for_constant_coefficient(rng):
    g, sym, _ = make_problem("constant", d=1, a=3.0, cell_N=16)
    Lam, g0 = homogenize(g, sym)
    grid = TorusGrid(1, 64, 4)
    corr = Corrector(Lam, SmoothingMultiplier(grid), EffectiveOperator(g0, sym, grid))
    assert np.max(np.abs(corr.parabolic(random_field(grid, 1, rng), 1.0))) < 1e-14
