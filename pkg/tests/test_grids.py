import numpy as np
import pytest

from lsg.errors import GridTooSmall
from lsg.grids import (RadialGrid, boundary_tail, fourier_at, fourier_native,
                       lq_norm, require_tail, support_radius,
                       weyl_symmetry_residual)


def test_grid_basic_properties():
    g = RadialGrid(2, 10.0, 64)
    assert g.spacing == pytest.approx(20.0 / 64)
    assert g.shape == (64, 64)
    assert 0.0 in g.axis
    assert g.nodes().shape == (64 * 64, 2)


def test_grid_rejects_odd_or_bad_sizes():
    with pytest.raises(ValueError):
        RadialGrid(1, 10.0, 15)
    with pytest.raises(ValueError):
        RadialGrid(1, -1.0, 16)


def test_fourier_native_matches_direct(rng):
    g = RadialGrid(1, 8.0, 128)
    vals = np.exp(-g.axis**2) * (1 + 0.3j)
    dual, fast = fourier_native(vals, g, sign=-1)
    direct = fourier_at(vals, g, [dual.axis], sign=-1)
    assert np.abs(fast - direct).max() <= 1e-12 * np.abs(direct).max()

    dual2, fast2 = fourier_native(vals, g, sign=+1)
    direct2 = fourier_at(vals, g, [dual2.axis], sign=+1)
    assert np.abs(fast2 - direct2).max() <= 1e-12 * np.abs(direct2).max()


def test_fourier_native_matches_direct_2d(rng):
    g = RadialGrid(2, 6.0, 32)
    r2 = g.radius_sq()
    vals = np.exp(-r2) * (g.meshes()[0] + 0.2j)
    dual, fast = fourier_native(vals, g, sign=-1)
    direct = fourier_at(vals, g, [dual.axis, dual.axis], sign=-1)
    assert np.abs(fast - direct).max() <= 1e-11 * np.abs(direct).max()


def test_fourier_gaussian_reference():
    # FT of e^{-a x^2} is sqrt(pi/a) e^{-xi^2/4a} in this convention
    g = RadialGrid(1, 12.0, 512)
    a = 0.7
    vals = np.exp(-a * g.axis**2).astype(complex)
    dual, hat = fourier_native(vals, g, sign=-1)
    expected = np.sqrt(np.pi / a) * np.exp(-dual.axis**2 / (4 * a))
    sel = np.abs(dual.axis) < 10.0
    assert np.abs(hat[sel] - expected[sel]).max() <= 1e-12 * expected.max()


def test_fourier_roundtrip(rng):
    g = RadialGrid(1, 10.0, 256)
    vals = np.exp(-g.axis**2) * np.cos(g.axis) * (1 + 0.5j)
    dual, hat = fourier_native(vals, g, sign=-1)
    _, back = fourier_native(hat, dual, sign=+1)
    back /= 2.0 * np.pi
    assert np.abs(back - vals).max() <= 1e-12 * np.abs(vals).max()


def test_tail_checks():
    g = RadialGrid(1, 3.0, 64)
    wide = np.exp(-0.1 * g.axis**2)
    assert boundary_tail(wide) > 1e-12
    with pytest.raises(GridTooSmall):
        require_tail(wide)
    narrow = np.exp(-10.0 * g.axis**2)
    require_tail(narrow)


def test_support_radius():
    g = RadialGrid(1, 10.0, 256)
    vals = np.where(np.abs(g.axis) <= 2.0, 1.0, 0.0)
    r = support_radius(vals, g)
    assert 1.9 <= r <= 2.1


def test_lq_norm_inf_and_two():
    g = RadialGrid(1, 5.0, 64)
    vals = np.exp(-g.axis**2)
    assert lq_norm(vals, g, np.inf) == pytest.approx(1.0)
    ref = np.sqrt((vals**2).sum() * g.spacing)
    assert lq_norm(vals, g, 2.0) == pytest.approx(ref)


def test_weyl_symmetry_residual_flags_asymmetry(a1, a1_grid):
    mats, signs = a1.weyl_matrices(), a1.weyl_signs()
    odd = np.sinh(a1_grid.axis) * np.exp(-a1_grid.axis**2)
    assert weyl_symmetry_residual(odd, a1_grid, mats, signs, odd=True) <= 1e-14
    # an even profile is maximally non-antisymmetric
    even = np.exp(-a1_grid.axis**2)
    assert weyl_symmetry_residual(even, a1_grid, mats, signs, odd=True) > 0.5
    assert weyl_symmetry_residual(even, a1_grid, mats, signs, odd=False) <= 1e-14


def test_weyl_symmetry_residual_b2(b2):
    grid = RadialGrid(2, 6.0, 32)
    x, y = grid.meshes()
    env = np.exp(-(x**2 + y**2))
    invariant = env * (np.cosh(x) + np.cosh(y))
    mats, signs = b2.weyl_matrices(), b2.weyl_signs()
    assert weyl_symmetry_residual(invariant, grid, mats, signs,
                                  odd=False) <= 1e-13
