import itertools
import math

import numpy as np
import pytest

from mfraclab.lattice import ALL, DYADIC, Cube, Grid, GridFunction, cubes_containing, truncated
from mfraclab.norms import L1, Lr, Orlicz
from mfraclab.operators import (
    FunctionVector,
    MaximalSpec,
    fractional_integral,
    fractional_maximal,
    hardy_littlewood,
    m_delta,
    maximal,
    orlicz_maximal,
    spec_for,
    truncated_relation_data,
)
from mfraclab.orlicz import luxemburg_average, young_llogl
from mfraclab.recipes import draw_functions


def _oracle_maximal(grid, fs, alpha, family=ALL, B=None, phi=None):
    # naive loop over every cube containing each cell
    from mfraclab.lattice import average

    out = np.zeros(grid.shape)
    for cell in itertools.product(*[range(grid.N)] * grid.n):
        best = 0.0
        for Q in cubes_containing(grid, cell, family):
            meas = Q.measure(grid)
            w = phi(meas) if phi is not None else meas ** (alpha / grid.n)
            prod = float(w)
            for f in fs:
                prod *= (average(f, Q) if B is None else luxemburg_average(B, f, Q))
            best = max(best, prod)
        out[cell] = best
    return out


def test_function_vector_validation():
    g = Grid(1, 8)
    f = GridFunction.constant(g, 1.0)
    with pytest.raises(ValueError):
        FunctionVector([])
    with pytest.raises(ValueError):
        FunctionVector([f, GridFunction.constant(Grid(1, 16), 1.0)])


def test_maximal_constant_inputs():
    # constants with box measure 1: the sup sits at the whole box
    g = Grid(1, 16)
    F = FunctionVector([GridFunction.constant(g, 1.0)] * 2)
    for alpha in (0.0, 0.5, 1.5):
        out = maximal(spec_for(2, alpha=alpha), F)
        assert np.allclose(out.values, 1.0, rtol=1e-14)


def test_maximal_halfline_value():
    # indicator of the left half at N=8: the best interval for the cell
    # containing 3/4 is the 7-cell one anchored at 0, value 4/7
    g = Grid(1, 8)
    chi = GridFunction(g, (np.arange(8) < 4).astype(float), nonnegative=True)
    out = hardy_littlewood(chi)
    cell = g.cell_of_point([0.75])
    assert out.values[cell] == pytest.approx(4 / 7, rel=1e-15)


@pytest.mark.parametrize("alpha,family", [(0.0, ALL), (0.5, ALL), (0.5, DYADIC)])
def test_maximal_matches_oracle(alpha, family):
    g = Grid(1, 16)
    rng = np.random.default_rng(0)
    fs = draw_functions(g, 2, rng)
    got = maximal(spec_for(2, alpha=alpha, family=family), FunctionVector(fs)).values
    want = _oracle_maximal(g, fs, alpha, family)
    assert np.max(np.abs(got - want) / np.maximum(want, 1e-300)) < 1e-13


def test_maximal_orlicz_slots_match_oracle():
    g = Grid(1, 8)
    rng = np.random.default_rng(1)
    fs = draw_functions(g, 2, rng)
    B = young_llogl(1)
    got = maximal(spec_for(2, alpha=0.5, B=B), FunctionVector(fs)).values
    want = _oracle_maximal(g, fs, 0.5, ALL, B=B)
    assert np.max(np.abs(got - want) / np.maximum(want, 1e-300)) < 1e-9


def test_maximal_mixed_slot_tags():
    g = Grid(1, 8)
    rng = np.random.default_rng(2)
    fs = draw_functions(g, 2, rng)
    spec = MaximalSpec(alpha=0.0, tags=(Lr(2), Orlicz(young_llogl(1))))
    out = maximal(spec, FunctionVector(fs)).values
    assert np.all(out >= 0) and np.all(np.isfinite(out))


def test_maximal_2d_oracle():
    g = Grid(2, 4)
    rng = np.random.default_rng(3)
    fs = [GridFunction(g, rng.uniform(0, 1, g.shape), nonnegative=True)]
    got = maximal(spec_for(1, alpha=0.5), FunctionVector(fs)).values
    want = _oracle_maximal(g, fs, 0.5)
    assert np.allclose(got, want, rtol=1e-13)


def test_maximal_monotone_and_homogeneous():
    g = Grid(1, 16)
    rng = np.random.default_rng(4)
    fs = draw_functions(g, 2, rng)
    gs = [GridFunction(g, f.values + rng.uniform(0, 1, 16), nonnegative=True) for f in fs]
    spec = spec_for(2, alpha=0.5)
    a = maximal(spec, FunctionVector(fs)).values
    b = maximal(spec, FunctionVector(gs)).values
    assert np.all(a <= b + 1e-14)
    scaled = maximal(spec, FunctionVector([3.0 * fs[0], fs[1]])).values
    assert np.allclose(scaled, 3.0 * a, rtol=1e-13)


def test_dyadic_below_all():
    g = Grid(1, 32)
    rng = np.random.default_rng(5)
    fs = draw_functions(g, 2, rng)
    F = FunctionVector(fs)
    d = maximal(spec_for(2, alpha=0.5, family=DYADIC), F).values
    a = maximal(spec_for(2, alpha=0.5, family=ALL), F).values
    assert np.all(d <= a * (1 + 1e-14))


def test_maximal_dominates_every_cube():
    g = Grid(1, 8)
    rng = np.random.default_rng(6)
    fs = draw_functions(g, 2, rng)
    out = maximal(spec_for(2, alpha=0.5), FunctionVector(fs)).values
    from mfraclab.lattice import average

    for _ in range(30):
        side = int(rng.integers(1, 9))
        anchor = (int(rng.integers(0, 9 - side)),)
        Q = Cube(anchor, side)
        val = Q.measure(g) ** 0.5 * average(fs[0], Q) * average(fs[1], Q)
        for cell in range(anchor[0], anchor[0] + side):
            assert out[cell] >= val * (1 - 1e-14)


def test_maximal_alpha_range_guard():
    g = Grid(1, 8)
    F = FunctionVector([GridFunction.constant(g, 1.0)] * 2)
    with pytest.raises(ValueError):
        maximal(spec_for(2, alpha=2.0), F)


def test_fractional_integral_annihilation():
    g = Grid(1, 16)
    F = FunctionVector([GridFunction.constant(g, 0.0), GridFunction.constant(g, 1.0)])
    out = fractional_integral(1.0, F)
    assert np.all(out.values == 0.0)


def test_fractional_integral_m1_oracle():
    # direct double-precision sum at N=16 for the half-interval indicator
    g = Grid(1, 16)
    chi = GridFunction(g, (np.arange(16) < 8).astype(float), nonnegative=True)
    alpha = 0.5
    centers = (np.arange(16) + 0.5) * g.h
    x = g.cell_of_point([0.71875])[0]
    want = 0.0
    for y in range(16):
        d = abs(centers[x] - centers[y])
        if d == 0:
            continue
        want += chi.values[y] * d ** (alpha - 1)
    want *= g.h
    got = fractional_integral(alpha, FunctionVector([chi])).values[x]
    assert got == pytest.approx(want, rel=1e-14)


def test_fractional_integral_m2_oracle():
    g = Grid(1, 8)
    rng = np.random.default_rng(7)
    fs = draw_functions(g, 2, rng)
    alpha = 0.75
    centers = (np.arange(8) + 0.5) * g.h
    got = fractional_integral(alpha, FunctionVector(fs)).values
    for x in range(8):
        want = 0.0
        for y1 in range(8):
            for y2 in range(8):
                s = abs(centers[x] - centers[y1]) + abs(centers[x] - centers[y2])
                if s == 0:
                    continue
                want += fs[0].values[y1] * fs[1].values[y2] * s ** (alpha - 2)
        want *= g.h**2
        assert got[x] == pytest.approx(want, rel=1e-13)


def test_fractional_integral_symmetry():
    # even data about the box center give an even output
    g = Grid(1, 16)
    rng = np.random.default_rng(8)
    half = rng.uniform(0, 1, 8)
    vals = np.concatenate([half, half[::-1]])
    f = GridFunction(g, vals, nonnegative=True)
    out = fractional_integral(1.0, FunctionVector([f, f])).values
    assert np.allclose(out, out[::-1], rtol=1e-12)


def test_fractional_integral_monotone_and_homogeneous():
    g = Grid(1, 8)
    rng = np.random.default_rng(9)
    fs = draw_functions(g, 2, rng)
    gs = [GridFunction(g, f.values + 0.5, nonnegative=True) for f in fs]
    a = fractional_integral(1.0, FunctionVector(fs)).values
    b = fractional_integral(1.0, FunctionVector(gs)).values
    assert np.all(a <= b + 1e-14)
    scaled = fractional_integral(1.0, FunctionVector([fs[0], 2.0 * fs[1]])).values
    assert np.allclose(scaled, 2.0 * a, rtol=1e-13)


def test_fractional_integral_range_guard():
    g = Grid(1, 8)
    F = FunctionVector([GridFunction.constant(g, 1.0)] * 2)
    for bad in (0.0, 2.0, -1.0):
        with pytest.raises(ValueError):
            fractional_integral(bad, F)


def test_m_delta_identity_and_constant():
    g = Grid(1, 16)
    rng = np.random.default_rng(10)
    f = GridFunction(g, rng.uniform(0, 2, 16), nonnegative=True)
    assert np.allclose(m_delta(f, 1.0).values, hardy_littlewood(f).values, rtol=1e-14)
    c = GridFunction.constant(g, 2.5)
    assert np.allclose(m_delta(c, 0.7).values, 2.5, rtol=1e-12)


def test_m_delta_power_mean_ordering():
    g = Grid(1, 16)
    rng = np.random.default_rng(11)
    f = GridFunction(g, rng.uniform(0, 2, 16), nonnegative=True)
    m1 = hardy_littlewood(f).values
    m2 = m_delta(f, 2.0).values
    assert np.all(m2 >= m1 - 1e-12)


def test_hedberg_split_finite():
    # two-term split against the off-order maximals has a finite constant
    g = Grid(1, 16)
    rng = np.random.default_rng(12)
    fs = draw_functions(g, 2, rng)
    F = FunctionVector(fs)
    alpha, eps = 1.0, 0.25
    Ia = fractional_integral(alpha, F).values
    Mm = maximal(spec_for(2, alpha=alpha - eps), F).values
    Mp = maximal(spec_for(2, alpha=alpha + eps), F).values
    for s in (0.25, 1.0, 4.0):
        split = s**eps * Mm + s**-eps * Mp
        live = split > 0
        assert np.all(Ia[~live] == 0)
        assert np.max(Ia[live] / split[live]) < 10.0


def test_truncated_relation_shapes_and_constants():
    g = Grid(1, 16)
    rng = np.random.default_rng(13)
    spec = spec_for(2, alpha=1.0)
    # constant inputs: both sides constant and comparable
    Fc = FunctionVector([GridFunction.constant(g, 1.0)] * 2)
    lhs, rhs = truncated_relation_data(spec, Fc, k=-2, q=1.0)
    assert np.ptp(lhs.values) < 1e-12
    ratio = lhs.values / rhs.values
    assert np.isfinite(ratio).all()
    # single bump, two powers
    fs = draw_functions(g, 2, rng)
    F = FunctionVector(fs)
    for q in (1.0, 2.0):
        lhs, rhs = truncated_relation_data(spec, F, k=-2, q=q)
        live = rhs.values > 0
        assert np.all(lhs.values[~live] == 0)
        c = np.max(lhs.values[live] / rhs.values[live])
        assert math.isfinite(c)


def test_truncated_relation_k_guards():
    g = Grid(1, 16)
    F = FunctionVector([GridFunction.constant(g, 1.0)] * 2)
    spec = spec_for(2, alpha=1.0)
    with pytest.raises(ValueError):
        truncated_relation_data(spec, F, k=1, q=1.0)  # beyond the box
    with pytest.raises(ValueError):
        truncated_relation_data(spec, F, k=-10, q=1.0)  # below one cell


def test_orlicz_maximal_wrapper():
    g = Grid(1, 8)
    rng = np.random.default_rng(14)
    f = GridFunction(g, rng.uniform(0, 2, 8), nonnegative=True)
    got = orlicz_maximal(f, young_llogl(1)).values
    plain = hardy_littlewood(f).values
    assert np.all(got >= plain - 1e-12)


def test_fractional_maximal_order_guard():
    g = Grid(1, 8)
    f = GridFunction.constant(g, 1.0)
    with pytest.raises(ValueError):
        fractional_maximal(f, 1.5)  # m = 1 caps the order at n
