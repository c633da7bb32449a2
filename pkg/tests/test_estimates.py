from fractions import Fraction

import numpy as np
import pytest

from lsg.errors import InsufficientTimes, UnsupportedExponent
from lsg.estimates import (decay_exponent_fit, strichartz_inhomogeneous_check,
                           strichartz_norm, strichartz_pair, weighted_norm)
from lsg.grids import (BiInvariantField, GridMode, RadialGrid, Representation,
                       l2_norm)
from lsg.propagator import (gaussian_profile, group_propagate_closed_form)
from lsg.spherical import conjugated_values, denominator_on_grid


def test_weighted_norm_zero_field(a1, a1_grid):
    f = BiInvariantField(a1_grid, np.zeros(a1_grid.shape, dtype=complex),
                         Representation.CONJUGATED)
    assert weighted_norm(a1, f, 2.0) == 0.0
    assert weighted_norm(a1, f, np.inf) == 0.0


def test_weighted_norm_rejects_small_q(a1, a1_grid):
    f = gaussian_profile(a1_grid, 1.0)
    with pytest.raises(UnsupportedExponent):
        weighted_norm(a1, f, 1.5)


def test_weighted_norm_q2_is_mass(a1, a1_grid):
    f = gaussian_profile(a1_grid, 1.0)
    base = l2_norm(conjugated_values(a1, f), a1_grid)
    res = group_propagate_closed_form(a1, f, 1.0, GridMode.SCALED)
    assert weighted_norm(a1, res, 2.0) == pytest.approx(base, rel=1e-8)


@pytest.mark.parametrize("q", [2.0, 4.0, 6.0])
def test_norm_reduction_identity(q, b2, rng):
    """Group assembly sum |u|^q |phi|^{q-2} phi^2 h^l against the conjugated
    assembly sum |u phi|^q h^l: identical up to rounding."""
    grid = RadialGrid(2, 6.0, 48)
    x, y = grid.meshes()
    u = (np.exp(-(x**2 + y**2)) * (np.cosh(x) + np.cosh(0.5 * y))
         * (1.0 + 0.2j))
    phi = denominator_on_grid(b2, grid)
    w = grid.cell_volume()
    group_side = float((np.abs(u)**q * np.abs(phi)**(q - 2) * phi**2).sum() * w)
    conj_side = float((np.abs(u * phi)**q).sum() * w)
    assert abs(group_side - conj_side) <= 1e-12 * conj_side


def test_decay_fit_rank1(a1):
    grid = RadialGrid(1, 12.0, 1024)
    f = gaussian_profile(grid, 1.0)
    times = list(np.geomspace(1.0, 10.0, 6))
    slope, target, reports = decay_exponent_fit(a1, f, 1.0, times)
    assert target == pytest.approx(-0.5)
    assert abs(slope - target) <= 0.05
    assert len(reports) == 6 and reports[0].q == np.inf

    slope2, target2, _ = decay_exponent_fit(a1, f, 2.0, times)
    assert target2 == 0.0
    assert abs(slope2) <= 0.02


def test_decay_fit_needs_decade(a1, a1_grid):
    f = gaussian_profile(a1_grid, 1.0)
    with pytest.raises(InsufficientTimes):
        decay_exponent_fit(a1, f, 1.0, [1.0, 2.0, 3.0, 4.0, 5.0])
    with pytest.raises(InsufficientTimes):
        decay_exponent_fit(a1, f, 1.0, [1.0, 11.0])


def test_strichartz_pairs_exact():
    assert strichartz_pair(1) == (Fraction(6, 5), Fraction(6, 1))
    assert strichartz_pair(2) == (Fraction(4, 3), Fraction(4, 1))
    for rank in (1, 2, 3, 4):
        p, q = strichartz_pair(rank)
        # admissibility: 2/q = l(1/p' ... ) reduces to q = 2(l+2)/l
        assert q == Fraction(2 * (rank + 2), rank)
        assert p == Fraction(2 * (rank + 2), rank + 4)


def test_strichartz_zero_data(a1, a1_grid):
    f = BiInvariantField(a1_grid, np.zeros(a1_grid.shape, dtype=complex),
                         Representation.PLAIN)
    seq = strichartz_norm(a1, f, 1.0, refinements=3, dyadic_levels=4)
    assert seq == [0.0, 0.0, 0.0]


def test_strichartz_stabilizes(a1):
    grid = RadialGrid(1, 12.0, 256)
    f = gaussian_profile(grid, 1.0)
    seq = strichartz_norm(a1, f, 1.5, refinements=3, dyadic_levels=5)
    assert abs(seq[-1] - seq[-2]) / seq[-1] <= 0.02


def test_inhomogeneous_scaling_invariance(a1):
    grid = RadialGrid(1, 8.0, 640)
    f = gaussian_profile(grid, 1.0)

    def zero(s):
        return BiInvariantField(grid, np.zeros(grid.shape, dtype=complex),
                                Representation.CONJUGATED)

    out1 = strichartz_inhomogeneous_check(a1, f, zero, 1.0)
    doubled = f.with_values(2.0 * f.values)
    out2 = strichartz_inhomogeneous_check(a1, doubled, zero, 1.0)
    assert out1["forcing_norm"] == 0.0
    assert out2["ratio"] == pytest.approx(out1["ratio"], rel=1e-8)


def test_inhomogeneous_stable_under_grid_refinement(a1):
    def forcing_for(grid):
        base = gaussian_profile(grid, 0.9, 0.2)

        def forcing(s):
            return base.with_values(np.exp(1j * 0.7 * s) * base.values)
        return forcing

    results = []
    for n in (512, 640):
        grid = RadialGrid(1, 8.0, n)
        f = gaussian_profile(grid, 1.0)
        out = strichartz_inhomogeneous_check(a1, f, forcing_for(grid), 1.5)
        results.append(out["ratio"])
    assert results[0] == pytest.approx(results[1], rel=0.02)
    assert np.isfinite(results[0]) and results[0] > 0
