import numpy as np
import pytest
import scipy.linalg

from oracles import dense_A0, dense_A_eps, dense_expm, dense_resolvent
from torushom.errors import GridMismatch, NotPositive, RankDeficient, SingularBlock
from torushom.operators import (CoefficientField, EffectiveOperator, OscillatingOperator,
                                Symbol, apply_A0, apply_A_eps, check_rank_condition,
                                sample_oscillating)
from torushom.spectral import TorusGrid, random_field


def gfun(y):
    return 2 + np.cos(2 * np.pi * y)


def cos_field(cell_N=64):
    return CoefficientField.from_function(
        lambda x: gfun(x[0])[None, None], 1, cell_N)


SCALAR = Symbol(np.ones((1, 1, 1)))


@pytest.mark.parametrize("K", [1, 2])
@pytest.mark.parametrize("theta", [None, 0.7])
def test_apply_A_eps_matches_dense(rng, K, theta):
    grid = TorusGrid(1, 8, K)
    th = None if theta is None else np.array([theta])
    u = random_field(grid, 1, rng)
    A = dense_A_eps(gfun, 8, K, theta or 0.0)
    got = apply_A_eps(cos_field(), SCALAR, grid.eps, u, grid, th)
    np.testing.assert_allclose(got.reshape(-1), A @ u[0], atol=1e-10)


def test_apply_A0_matches_dense(rng):
    grid = TorusGrid(1, 8)
    u = random_field(grid, 1, rng)
    got = apply_A0(np.array([[1.7]]), SCALAR, u, grid, np.array([0.3]))
    np.testing.assert_allclose(got.reshape(-1), dense_A0(1.7, 8, 0.3) @ u[0], atol=1e-10)


def test_effective_resolvent_and_exponential_match_dense(rng):
    grid = TorusGrid(1, 8)
    a0 = EffectiveOperator(np.array([[1.3]]), SCALAR, grid, np.array([0.4]))
    A = dense_A0(1.3, 8, 0.4)
    u = random_field(grid, 1, rng)
    z = 2.0 * np.exp(2.5j)
    np.testing.assert_allclose(a0.resolvent(u, z).reshape(-1), dense_resolvent(A, z) @ u[0],
                               atol=1e-12)
    np.testing.assert_allclose(a0.expm(u, 0.01).reshape(-1), dense_expm(A, 0.01) @ u[0], atol=1e-12)


def test_gradient_symbol_blocks_in_2d(rng):
    grid = TorusGrid(2, 8)
    g0 = np.array([[2.0, 0.3], [0.3, 1.0]])
    a0 = EffectiveOperator(g0, Symbol.gradient(2), grid)
    u = grid.plane_wave([1, 2], [1.0])
    xi = 2 * np.pi * np.array([1.0, 2.0])
    np.testing.assert_allclose(a0.apply(u), (xi @ g0 @ xi) * u, atol=1e-9)


def test_rank_condition():
    bounds = check_rank_condition(Symbol.gradient(3))
    assert bounds.alpha0 == pytest.approx(1.0) and bounds.alpha1 == pytest.approx(1.0)
    mats = np.zeros((2, 2, 1))
    mats[0, 0, 0] = 1.0
    with pytest.raises(RankDeficient):
        check_rank_condition(Symbol(mats))


def test_coefficient_validation():
    with pytest.raises(NotPositive):
        CoefficientField.constant(np.array([[1.0, 2.0], [0.0, 1.0]]), 1)
    with pytest.raises(NotPositive):
        CoefficientField.constant(np.array([[-1.0]]), 1)


def test_oscillating_samples_equal_direct_evaluation():
    grid = TorusGrid(1, 64, 4)
    g = cos_field(64)
    x = grid.coordinates()[0]
    np.testing.assert_allclose(g.on_grid(grid)[0, 0].real, gfun(4 * x), atol=1e-14)
    with pytest.raises(GridMismatch):
        sample_oscillating(np.zeros(6), 6, grid)


def test_shift_on_the_spectrum_is_singular():
    grid = TorusGrid(1, 8)
    a0 = EffectiveOperator(np.eye(1), SCALAR, grid)
    with pytest.raises(SingularBlock):
        a0.shifted_evals(0.0)


def test_constant_coefficient_operator_equals_effective(rng):
    grid = TorusGrid(2, 8, 2)
    g = CoefficientField.constant(np.array([[2.0, 0.5], [0.5, 1.0]]), 2)
    op = OscillatingOperator(g, Symbol.gradient(2), grid)
    a0 = EffectiveOperator(g.mean(), Symbol.gradient(2), grid)
    u = random_field(grid, 1, rng)
    np.testing.assert_allclose(op.apply(u), a0.apply(u), atol=1e-9)


def test_dense_operator_is_hermitian():
    A = dense_A_eps(gfun, 8, 2, 0.2)
    assert scipy.linalg.ishermitian(A, atol=1e-10)
