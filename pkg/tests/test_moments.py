"""Velocity moments, potential reconstruction, and the two phi_t routes."""

import numpy as np
import numpy.testing as npt
import pytest

from phasemix import (
    MomentCalculator,
    actionangle_evaluator,
    cumulative_from_zero,
    spatial_grid,
)
from phasemix.potential import invert_phi


@pytest.fixture(scope="module")
def calc(params, chart, f0):
    return MomentCalculator(
        actionangle_evaluator(chart, params, f0), params, 0.5, n_quad=128
    )


@pytest.fixture(scope="module")
def grid(params):
    return spatial_grid(params, 0.5, 201)


def test_spatial_grid_shape(params):
    g = spatial_grid(params, 0.5, 201)
    assert g.size == 201
    npt.assert_allclose(g[100], 0.0, atol=1e-15)
    npt.assert_allclose(g[-1], invert_phi(params, 2.0), rtol=1e-14)
    npt.assert_allclose(g, -g[::-1], atol=1e-15)
    # Even requests are promoted to the next odd count.
    assert spatial_grid(params, 0.5, 200).size == 201


def test_cumulative_from_zero_polynomial():
    x = np.linspace(-2.0, 2.0, 401)
    # int_0^x 3 y**2 dy = x**3, exact for Simpson.
    npt.assert_allclose(cumulative_from_zero(3.0 * x**2, x), x**3, atol=1e-13)


def test_cumulative_from_zero_smooth():
    x = np.linspace(-1.0, 1.0, 801)
    npt.assert_allclose(
        cumulative_from_zero(np.cos(x), x), np.sin(x), atol=1e-11
    )


def test_cumulative_requires_centered_grid():
    x = np.linspace(0.1, 1.0, 11)
    with pytest.raises(ValueError):
        cumulative_from_zero(np.ones_like(x), x)


def test_density_even_at_t0(calc, grid):
    # The initial data is even in x (it depends on x through Phi only
    # after angle averaging at +-v pairs), so rho(0, .) is even.
    rho = calc.density(0.0, grid)
    npt.assert_allclose(rho, rho[::-1], atol=1e-12)
    assert np.all(rho >= 0.0)


def test_density_vanishes_outside_support(calc, grid):
    assert abs(calc.density(0.0, np.array([grid[-1]]))[0]) < 1e-14


def test_mass_conservation(calc, grid):
    from scipy.integrate import simpson

    fine = np.linspace(grid[0], grid[-1], 801)
    m0 = simpson(calc.density(0.0, fine), x=fine)
    for t in (1.0, 10.0, 100.0):
        mt = simpson(calc.density(t, fine), x=fine)
        npt.assert_allclose(mt, m0, rtol=1e-8)


def test_mass_frozen_value(calc):
    # Mass of the default data, frozen from converged quadrature and
    # cross-checked against the action-angle integral with the 1/c
    # Jacobian factor.
    from scipy.integrate import simpson

    fine = np.linspace(-calc.x_max, calc.x_max, 801)
    m = simpson(calc.density(0.0, fine), x=fine)
    npt.assert_allclose(m, 1.8326594895451827, rtol=1e-7)


def test_current_odd_at_quarter_turn(calc, grid):
    # j is an odd moment; at t = 0 the sin(Q) modulation makes it odd
    # under x -> -x up to the angle asymmetry; just pin j(0) = 0 is not
    # generally true, so check the tail instead: j -> 0 at the support
    # edge.
    j = calc.current(0.0, grid)
    assert abs(j[0]) < 1e-14 and abs(j[-1]) < 1e-14


def test_phi_pinned_at_origin(calc, grid):
    p = calc.phi(0.0, grid)
    mid = grid.size // 2
    npt.assert_allclose(p[mid], 0.0, atol=1e-15)
    # -phi'' = rho: check curvature sign near the origin where rho > 0.
    assert p[mid + 1] + p[mid - 1] - 2.0 * p[mid] < 0.0


def test_phi_t_routes_converge(params, chart, f0):
    calc = MomentCalculator(
        actionangle_evaluator(chart, params, f0), params, 0.5, n_quad=512
    )
    grid = spatial_grid(params, 0.5, 801)
    t = 5.0
    ref = calc.phi_t_reconstruct(t, grid)
    err = [
        float(np.max(np.abs(calc.phi_t_fd(t, dt, grid) - ref)))
        for dt in (2e-3, 1e-3)
    ]
    assert 3.5 <= err[0] / err[1] <= 4.5


def test_series_assembles_everything(calc, grid):
    times = np.array([0.0, 1.0])
    s = calc.series(times, grid)
    assert s.rho.shape == (2, grid.size)
    npt.assert_allclose(s.rho[0], calc.density(0.0, grid), atol=1e-14)
    npt.assert_allclose(s.phi_t[1], calc.phi_t_reconstruct(1.0, grid), atol=1e-14)


def test_n_quad_floor(params, chart, f0):
    with pytest.raises(ValueError):
        MomentCalculator(
            actionangle_evaluator(chart, params, f0), params, 0.5, n_quad=32
        )
