import numpy as np
import pytest

from oracles import dense_A0, dense_A_eps, dense_resolvent
from torushom.errors import InvalidAngle, NoConvergence
from torushom.operators import CoefficientField, EffectiveOperator, OscillatingOperator, Symbol
from torushom.resolvent import (ResolventSolver, Shift, c_of_phi, solve_resolvent_A0,
                                solve_resolvent_A_eps)
from torushom.spectral import TorusGrid, random_field

SCALAR = Symbol(np.ones((1, 1, 1)))


def gfun(y):
    return 2 + np.cos(2 * np.pi * y)


def cos_op(grid, theta=None):
    g = CoefficientField.from_function(lambda x: gfun(x[0])[None, None], 1, 64)
    return OscillatingOperator(g, SCALAR, grid, theta)


@pytest.mark.parametrize("phi,expected", [(np.pi / 4, np.sqrt(2)), (np.pi / 6, 2.0),
                                          (np.pi / 2, 1.0), (3 * np.pi / 4, 1.0),
                                          (np.pi, 1.0), (7 * np.pi / 4, np.sqrt(2))])
def test_sector_weight(phi, expected):
    assert c_of_phi(phi) == pytest.approx(expected)


@pytest.mark.parametrize("phi", [0.0, 2 * np.pi, -1.0])
def test_sector_weight_rejects_angles_outside_range(phi):
    with pytest.raises(InvalidAngle):
        c_of_phi(phi)


def test_shift_from_polar_coordinates():
    s = Shift.polar(4.0, 3 * np.pi / 4)
    assert s.zeta == pytest.approx(4 * np.exp(3j * np.pi / 4))
    assert s.phi == pytest.approx(3 * np.pi / 4) and s.c_phi == 1.0
    with pytest.raises(InvalidAngle):
        Shift.from_zeta(2.0)


@pytest.mark.parametrize("theta", [None, 1.1])
def test_resolvent_matches_dense(rng, theta):
    grid = TorusGrid(1, 8, 2)
    th = None if theta is None else np.array([theta])
    f = random_field(grid, 1, rng)
    z = np.exp(0.75j * np.pi)
    got = solve_resolvent_A_eps(cos_op(grid, th), f, z, tol=1e-13)
    want = dense_resolvent(dense_A_eps(gfun, 8, 2, theta or 0.0), z) @ f[0]
    np.testing.assert_allclose(got.reshape(-1), want, atol=1e-10)


def test_effective_resolvent_matches_dense(rng):
    grid = TorusGrid(1, 8)
    f = random_field(grid, 1, rng)
    a0 = EffectiveOperator(np.array([[np.sqrt(3)]]), SCALAR, grid)
    z = 3.0 * np.exp(0.2j)
    want = dense_resolvent(dense_A0(np.sqrt(3), 8), z) @ f[0]
    np.testing.assert_allclose(solve_resolvent_A0(a0, f, Shift.from_zeta(z))[0], want,
                               atol=1e-12)


def test_batched_shifts_equal_single_solves(rng):
    grid = TorusGrid(1, 32, 4)
    solver = ResolventSolver(cos_op(grid, np.array([[0.3], [2.0]])), tol=1e-12)
    F = grid.forward(random_field(grid, 1, rng, batch=(2,)))
    zs = np.array([np.exp(1j), 2 * np.exp(-2j), -1.0 + 0j])
    batch = solver.resolvent_hat(F, zs)
    for j, z in enumerate(zs):
        np.testing.assert_allclose(batch[j], solver.resolvent_hat(F, z), atol=1e-10)


def test_residual_of_solution(rng):
    grid = TorusGrid(1, 64, 8)
    op = cos_op(grid)
    f = random_field(grid, 1, rng)
    z = 5 * np.exp(2.0j)
    u = ResolventSolver(op, tol=1e-11).resolvent(f, z)
    r = op.apply(u) - z * u - f
    assert grid.l2_norm(r)[()] < 1e-9 * grid.l2_norm(f)[()] * 1e3


def test_constant_coefficient_resolvents_coincide(rng):
    grid = TorusGrid(1, 32, 4)
    g = CoefficientField.constant(np.array([[2.5]]), 1)
    f = random_field(grid, 1, rng)
    z = np.exp(2j)
    a = solve_resolvent_A_eps(OscillatingOperator(g, SCALAR, grid), f, z)
    b = solve_resolvent_A0(EffectiveOperator(np.array([[2.5]]), SCALAR, grid), f, z)
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_iteration_cap_raises(rng):
    grid = TorusGrid(1, 64, 8)
    f = random_field(grid, 1, rng)
    with pytest.raises(NoConvergence) as info:
        solve_resolvent_A_eps(cos_op(grid), f, -1.0, tol=1e-14, max_iters=1)
    assert info.value.residual > 1e-14
