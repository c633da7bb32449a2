import numpy as np
import pytest

from lsg.errors import (ForcingNotAntisymmetrizable, GridTooSmall,
                        InvalidTime, UnderResolvedPhase)
from lsg.grids import (BiInvariantField, GridMode, RadialGrid, Representation,
                       l2_norm, relative_l2, weyl_symmetry_residual)
from lsg.propagator import (calibrate_constant, data_bandwidth, duhamel_solve,
                            euclidean_propagate, gaussian_profile,
                            group_propagate_closed_form,
                            group_propagate_spectral, suggest_spectral_grid)
from lsg.spherical import (conjugated_values, denominator_on_grid,
                           spherical_transform, synthesize_conjugated)


def gaussian_exact_evolution(x, a, c, t):
    """Closed-form free evolution of e^{-(a - ic)|x|^2} in one dimension.

    Complex-width calculus: w = a - ic evolves to w/(1+4iwt) with amplitude
    (1+4iwt)^{-1/2}; verified independently below by quadrature and by
    finite-difference substitution into the equation.
    """
    w = a - 1j * c
    den = 1.0 + 4j * w * t
    return den ** -0.5 * np.exp(-w * x**2 / den)


# --- Euclidean propagator ----------------------------------------------------

def test_euclidean_gaussian_matches_quadrature_oracle():
    """Brute-force oscillatory quadrature of the kernel integral."""
    a, t = 1.0, 0.5
    grid = RadialGrid(1, 12.0, 512)
    f = gaussian_profile(grid, a)
    got = euclidean_propagate(f, t, GridMode.FIXED)

    y = np.linspace(-20.0, 20.0, 400001)
    dy = y[1] - y[0]
    const = (4j * np.pi * t) ** -0.5
    for x_target in (0.0, 0.75, 2.5):
        idx = int(np.argmin(np.abs(grid.axis - x_target)))
        x = grid.axis[idx]
        kernel = np.exp(1j * (x - y) ** 2 / (4 * t)) * np.exp(-a * y**2)
        oracle = const * kernel.sum() * dy
        assert abs(got.field.values[idx] - oracle) <= 1e-8 * abs(oracle)


def test_gaussian_formula_satisfies_equation():
    """FD substitution: the reference formula solves u_t = i u_xx."""
    a, c, t = 0.8, 0.3, 0.7
    x = np.linspace(-3, 3, 601)
    h = x[1] - x[0]
    dt = 1e-5
    u0 = gaussian_exact_evolution(x, a, c, t)
    du_dt = (gaussian_exact_evolution(x, a, c, t + dt)
             - gaussian_exact_evolution(x, a, c, t - dt)) / (2 * dt)
    lap = (u0[2:] + u0[:-2] - 2 * u0[1:-1]) / (h * h)
    resid = du_dt[1:-1] - 1j * lap
    assert np.abs(resid).max() <= 1e-4 * np.abs(u0).max()


@pytest.mark.parametrize("a,t", [(1.0, 0.25), (0.5, 1.0), (2.0, 0.5)])
def test_euclidean_matches_gaussian_closed_form(a, t):
    grid = RadialGrid(1, 12.0, 1024)
    f = gaussian_profile(grid, a)
    got = euclidean_propagate(f, t, GridMode.FIXED)
    expected = gaussian_exact_evolution(grid.axis, a, 0.0, t)
    assert np.abs(got.field.values - expected).max() <= 1e-8


def test_euclidean_zero_data(a1_grid):
    f = BiInvariantField(a1_grid, np.zeros(a1_grid.shape, dtype=complex),
                         Representation.PLAIN)
    out = euclidean_propagate(f, 1.0, GridMode.FIXED)
    assert np.abs(out.field.values).max() == 0.0


def test_lemma1_modulus_profile():
    # focusing chirp: |u(x,1)| = const * e^{-x^2/16}
    grid = RadialGrid(1, 12.0, 2048)
    f = gaussian_profile(grid, 1.0, chirp=-0.25)
    out = euclidean_propagate(f, 1.0, GridMode.FIXED)
    mag = np.abs(out.field.values)
    expected = 0.5 * np.exp(-grid.axis**2 / 16.0)
    assert np.abs(mag - expected).max() <= 1e-10


def test_euclidean_invalid_time(a1_grid):
    f = gaussian_profile(a1_grid, 1.0)
    with pytest.raises(InvalidTime):
        euclidean_propagate(f, 0.0)
    with pytest.raises(InvalidTime):
        euclidean_propagate(f, -1.0)


def test_euclidean_tail_guard():
    grid = RadialGrid(1, 3.0, 64)
    f = gaussian_profile(grid, 0.3)
    with pytest.raises(GridTooSmall):
        euclidean_propagate(f, 1.0)


def test_scaled_mode_small_t_recovers_initial_data(a1):
    """The t -> 0+ limit through the auto-upsampled SCALED path.

    The residual against the initial data is the genuine first-order
    deviation t*||(lap - |rho|^2) g|| (constant ~ 4 for the rate-1
    Gaussian), so the path itself is additionally pinned against the
    spectral oracle at the same tiny t.
    """
    grid = RadialGrid(1, 12.0, 512)
    f = gaussian_profile(grid, 1.0)
    res = group_propagate_closed_form(a1, f, 1e-3, GridMode.SCALED)
    out_grid = res.field.grid
    target = (np.exp(-out_grid.axis**2)
              * denominator_on_grid(a1, out_grid))
    err = relative_l2(res.field.values, target.astype(complex), out_grid)
    assert err <= 5e-3
    oracle = group_propagate_spectral(a1, f, 1e-3, out_grid=out_grid)
    assert relative_l2(res.field.values, oracle.field.values,
                       out_grid) <= 1e-9

    tiny = group_propagate_closed_form(a1, f, 2e-4, GridMode.SCALED)
    tg = tiny.field.grid
    target = np.exp(-tg.axis**2) * denominator_on_grid(a1, tg)
    assert relative_l2(tiny.field.values, target.astype(complex), tg) <= 1e-3


# --- group propagator ---------------------------------------------------------

@pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
def test_closed_form_matches_spectral_a1(a1, t):
    grid = RadialGrid(1, 12.0, 512)
    f = gaussian_profile(grid, 1.0)
    box = max(12.0, 2.3 * t * data_bandwidth(a1, f))
    out = RadialGrid(1, box, 1024)
    closed = group_propagate_closed_form(a1, f, t, GridMode.FIXED, out)
    oracle = group_propagate_spectral(a1, f, t, out_grid=out)
    assert relative_l2(closed.field.values, oracle.field.values, out) <= 1e-6


def test_closed_form_matches_spectral_a2(a2):
    grid = RadialGrid(2, 10.0, 128)
    f = gaussian_profile(grid, 1.0)
    out = RadialGrid(2, 26.0, 160)
    closed = group_propagate_closed_form(a2, f, 1.0, GridMode.FIXED, out)
    oracle = group_propagate_spectral(a2, f, 1.0, out_grid=out)
    assert relative_l2(closed.field.values, oracle.field.values, out) <= 1e-4


def test_spectral_t_zero_is_plain_synthesis(a1):
    grid = RadialGrid(1, 12.0, 512)
    f = gaussian_profile(grid, 1.0)
    res = group_propagate_spectral(a1, f, 0.0)
    sgrid = suggest_spectral_grid(a1, f, 0.0)
    spec = spherical_transform(a1, f, sgrid)
    direct = synthesize_conjugated(a1, spec, [grid.axis])
    assert np.abs(res.field.values - direct).max() \
        <= 1e-12 * np.abs(direct).max()


def test_single_mode_phase_factor(a1):
    """Evolution of a single-mode spectrum is the global phase
    e^{-it(|lam0|^2+|rho|^2)}; the |rho|^2 part separates from the
    |rho|^2-stripped synthesis exactly."""
    from lsg.grids import SpectralField
    sgrid = RadialGrid(1, 10.0, 128)
    out_axis = np.linspace(-6, 6, 201)
    k = 90
    lam0 = sgrid.axis[k]
    k_neg = int(np.argmin(np.abs(sgrid.axis + lam0)))
    vals = np.zeros(sgrid.shape, dtype=complex)
    vals[k] = vals[k_neg] = 1.0
    spec = SpectralField(sgrid, vals)
    t = 0.8
    rho_sq = float(a1.rho @ a1.rho)
    full_phase = np.exp(-1j * t * (sgrid.radius_sq() + rho_sq))
    stripped_phase = np.exp(-1j * t * sgrid.radius_sq())
    full = synthesize_conjugated(a1, spec, [out_axis], extra_phase=full_phase)
    stripped = synthesize_conjugated(a1, spec, [out_axis],
                                     extra_phase=stripped_phase)
    assert np.abs(full - np.exp(-1j * t * rho_sq) * stripped).max() \
        <= 1e-14 * np.abs(full).max()
    base = synthesize_conjugated(a1, spec, [out_axis])
    assert np.abs(full - np.exp(-1j * t * (lam0**2 + rho_sq)) * base).max() \
        <= 1e-12 * np.abs(base).max()


def test_under_resolved_phase_guard(a1):
    grid = RadialGrid(1, 12.0, 512)
    f = gaussian_profile(grid, 1.0)
    coarse_spectral = RadialGrid(1, 12.0, 64)
    with pytest.raises(UnderResolvedPhase):
        group_propagate_spectral(a1, f, 4.0, spectral_grid=coarse_spectral)


def test_fixed_mode_chirp_guard(a1):
    grid = RadialGrid(1, 12.0, 128)   # too coarse for t this small
    f = gaussian_profile(grid, 1.0)
    with pytest.raises(GridTooSmall):
        group_propagate_closed_form(a1, f, 0.01, GridMode.FIXED)


def test_mass_conservation_and_antisymmetry(a1):
    grid = RadialGrid(1, 12.0, 512)
    f = gaussian_profile(grid, 1.0)
    base = l2_norm(conjugated_values(a1, f), grid)
    mats, signs = a1.weyl_matrices(), a1.weyl_signs()
    for t in (0.5, 2.0):
        box = max(12.0, 2.3 * t * data_bandwidth(a1, f))
        out = RadialGrid(1, box, 1024)
        for result, tol in (
                (group_propagate_closed_form(a1, f, t, GridMode.FIXED, out), 1e-8),
                (group_propagate_spectral(a1, f, t, out_grid=out), 1e-10)):
            drift = abs(l2_norm(result.field.values, out) - base) / base
            assert drift <= tol
            assert weyl_symmetry_residual(result.field.values, out,
                                          mats, signs, odd=True) <= 1e-8


def test_group_law(a1):
    grid = RadialGrid(1, 24.0, 1024)
    f = gaussian_profile(grid, 1.0)
    t1, t2 = 0.3, 0.45
    one = group_propagate_spectral(a1, f, t1)
    two = group_propagate_spectral(a1, one.field, t2)
    direct = group_propagate_spectral(a1, f, t1 + t2)
    assert relative_l2(two.field.values, direct.field.values, grid) <= 1e-6


def test_time_reversal(a1):
    grid = RadialGrid(1, 24.0, 1024)
    f = gaussian_profile(grid, 1.0)
    g = conjugated_values(a1, f)
    t = 0.5
    fwd = group_propagate_spectral(a1, f, t)
    conj_field = BiInvariantField(grid, np.conj(fwd.field.values),
                                  Representation.CONJUGATED)
    back = group_propagate_spectral(a1, conj_field, t)
    assert relative_l2(np.conj(back.field.values), g, grid) <= 1e-6


# --- calibration ----------------------------------------------------------------

def test_calibration_t_independence(a1):
    c1 = calibrate_constant(a1, t=0.5)
    c2 = calibrate_constant(a1, t=2.0)
    assert abs(c1 - c2) <= 1e-8 * abs(c1)


def test_calibration_fresnel_modulus(a1):
    from lsg.spherical import plancherel_constant
    c = calibrate_constant(a1)
    kappa = plancherel_constant(a1)
    assert abs(c) == pytest.approx(kappa * 4 * np.sqrt(np.pi), rel=1e-8)


def test_calibration_tensorizes_on_products():
    from lsg.rootsystem import build_root_system
    c1 = calibrate_constant(build_root_system("A1"))
    c11 = calibrate_constant(build_root_system("A1xA1"))
    assert abs(c11 - c1 * c1) <= 1e-8 * abs(c11)


# --- Duhamel ---------------------------------------------------------------------

def _mms_pieces(rs, grid, a):
    """Manufactured solution v = m(t) e^{-a|H|^2} with analytic forcing.

    The conjugated forcing is assembled per Weyl term, so no grid
    Laplacian enters: psi*phi = -i m'(s) e^{-a|H|^2} phi
                                 - m(s) * sum_s det(s)(|s rho - 2aH|^2
                                   - 2a l - |rho|^2) e^{<s rho, H>-a|H|^2}.
    """
    orbit = rs.orbit(rs.rho)
    signs = rs.weyl_signs()
    nodes = grid.nodes()
    rsq = grid.radius_sq()
    rho_sq = float(rs.rho @ rs.rho)
    gauss = np.exp(-a * rsq)
    phi = denominator_on_grid(rs, grid)
    lap_term = np.zeros(grid.shape)
    for vec, sgn in zip(orbit, signs):
        shift = np.einsum("ij,j->i", nodes, vec).reshape(grid.shape)
        dist_sq = (vec @ vec - 4.0 * a * shift
                   + 4.0 * a * a * rsq)
        lap_term += sgn * (dist_sq - 2.0 * a * rs.rank - rho_sq) * np.exp(shift)
    lap_term = lap_term * gauss

    def m(t):
        return 1.0 + 0.5 * np.sin(1.3 * t)

    def m_dot(t):
        return 0.65 * np.cos(1.3 * t)

    def forcing(s):
        vals = -1j * m_dot(s) * gauss * phi - m(s) * lap_term
        return BiInvariantField(grid, vals, Representation.CONJUGATED)

    def exact_conjugated(t):
        return m(t) * gauss * phi

    f0 = BiInvariantField(grid, (m(0.0) * gauss).astype(complex),
                          Representation.PLAIN)
    return f0, forcing, exact_conjugated


def test_duhamel_zero_forcing_matches_closed_form(a1):
    grid = RadialGrid(1, 12.0, 1024)
    f = gaussian_profile(grid, 1.0)

    def zero(s):
        return BiInvariantField(grid, np.zeros(grid.shape, dtype=complex),
                                Representation.CONJUGATED)

    duh = duhamel_solve(a1, f, zero, 1.0, steps=8)
    closed = group_propagate_closed_form(a1, f, 1.0, GridMode.FIXED)
    assert relative_l2(duh.field.values, closed.field.values, grid) <= 1e-13


def test_duhamel_manufactured_solution_fourth_order(a1):
    grid = RadialGrid(1, 12.0, 2048)
    f0, forcing, exact = _mms_pieces(a1, grid, a=0.5)
    t = 1.0
    target = exact(t)
    errs = []
    for steps in (8, 16):
        got = duhamel_solve(a1, f0, forcing, t, steps=steps)
        errs.append(relative_l2(got.field.values, target, grid))
    ratio = errs[0] / errs[1]
    assert errs[1] < errs[0]
    assert errs[1] < 1e-3
    assert 10.0 <= ratio <= 26.0


def test_duhamel_rejects_non_antisymmetrizable_forcing(a1):
    grid = RadialGrid(1, 12.0, 1024)
    f = gaussian_profile(grid, 1.0)

    def lopsided(s):
        vals = np.exp(-(grid.axis - 1.0) ** 2).astype(complex)
        return BiInvariantField(grid, vals, Representation.CONJUGATED)

    with pytest.raises(ForcingNotAntisymmetrizable):
        duhamel_solve(a1, f, lopsided, 1.0, steps=8)


def test_duhamel_step_validation(a1):
    grid = RadialGrid(1, 12.0, 1024)
    f = gaussian_profile(grid, 1.0)
    with pytest.raises(ValueError):
        duhamel_solve(a1, f, lambda s: f, 1.0, steps=4)
    with pytest.raises(InvalidTime):
        duhamel_solve(a1, f, lambda s: f, -1.0, steps=8)
