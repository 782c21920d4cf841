"""Order-8 filter, critical stretching, sine-transform filtering pipeline."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdfilter.core import Field, laplacian_symbol, make_grid_1d, zero_reaction
from rdfilter.filtering import (
    FilterSpec,
    KappaMonitor,
    apply_filter,
    filter_boundary_trace,
    filter_factors,
    kappa_critical,
    postprocess_field,
    sigma8,
    sine_coefficients,
    sine_reconstruct,
)
from rdfilter.stepper import recurrence_roots


def test_sigma8_anchor_values():
    assert abs(sigma8(0.0) - 1.0) < 1e-14
    assert abs(sigma8(1.0)) < 1e-14
    assert abs(sigma8(0.5) - 0.5) < 1e-14


def test_sigma8_support_and_symmetry():
    xi = np.linspace(-3.0, 3.0, 1201)
    s = sigma8(xi)
    assert np.all(s[np.abs(xi) >= 1.0] == 0.0)
    assert np.max(np.abs(s - sigma8(-xi))) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-1.0, max_value=1.0, allow_nan=False))
def test_sigma8_bounded_unit_interval(xi):
    s = sigma8(xi)
    assert -1e-14 <= s <= 1.0 + 1e-14


def test_sigma8_monotone_on_unit_interval():
    xi = np.linspace(0.0, 1.0, 2001)
    assert np.all(np.diff(sigma8(xi)) <= 1e-13)


def test_sigma8_derivatives_vanish_at_zero():
    # the filter order requires sigma^(l)(0) = 0 for l = 1..7; checked in
    # high precision because float64 differences of sigma8 are dominated by
    # its enormous eighth derivative
    import mpmath as mp

    mp.mp.dps = 60

    def sig(xi):
        y = (1 + mp.cos(mp.pi * xi)) / 2
        return (35 - 84 * y + 70 * y**2 - 20 * y**3) * y**4

    for order in range(1, 8):
        d = mp.diff(sig, mp.mpf(0), order)
        assert abs(d) < 1e-6, f"order {order}: {d}"


def test_sigma8_derivatives_decay_toward_one():
    # sigma8 and its first 7 derivatives tend to 0 as xi -> 1-: each value at
    # 1 - delta/100 must be far below the value at 1 - delta
    import mpmath as mp

    mp.mp.dps = 60

    def sig(xi):
        y = (1 + mp.cos(mp.pi * xi)) / 2
        return (35 - 84 * y + 70 * y**2 - 20 * y**3) * y**4

    for order in range(0, 8):
        coarse = abs(mp.diff(sig, mp.mpf(1) - mp.mpf("1e-2"), order))
        fine = abs(mp.diff(sig, mp.mpf(1) - mp.mpf("1e-4"), order))
        assert fine < coarse / 10


def test_sigma8_float_matches_high_precision():
    import mpmath as mp

    mp.mp.dps = 60

    def sig(xi):
        y = (1 + mp.cos(mp.pi * xi)) / 2
        return (35 - 84 * y + 70 * y**2 - 20 * y**3) * y**4

    for xi in np.linspace(0.0, 1.0, 41):
        assert abs(sigma8(float(xi)) - float(sig(mp.mpf(float(xi))))) < 1e-13


def test_kappa_critical_values():
    h = np.pi / 64
    assert abs(kappa_critical(h**2 / 3.0, h) - 1.0) < 1e-12
    assert abs(kappa_critical(h**2 / 2.0, h) - np.pi / np.arccos(-1.0 / 3.0)) < 1e-12
    assert kappa_critical(1e12, h) > 1e3  # dt -> infinity: unbounded stretch
    assert kappa_critical(h**2 / 10.0, h) == 1.0  # below the limit: no stretch
    with pytest.raises(ValueError):
        kappa_critical(-1.0, h)


def test_sine_transform_roundtrip():
    rng = np.random.default_rng(2)
    vals = rng.normal(size=(33, 2))
    vals[0] = vals[-1] = 0.0
    back = sine_reconstruct(sine_coefficients(vals))
    assert np.max(np.abs(back - vals)) < 1e-12


def test_sine_coefficients_of_pure_modes():
    grid = make_grid_1d(16)
    for k in (1, 3, 7):
        b = sine_coefficients(np.sin(k * grid.nodes)[:, np.newaxis])
        want = np.zeros(15)
        want[k - 1] = 1.0
        assert np.max(np.abs(b[:, 0] - want)) < 1e-12


def test_apply_filter_identity_at_tiny_kappa():
    grid = make_grid_1d(32)
    rng = np.random.default_rng(3)
    vals = rng.normal(size=33)
    vals[0] = vals[-1] = 0.0
    out = apply_filter(Field(grid, vals), FilterSpec(kappa=1e-6))
    assert np.max(np.abs(out.values[:, 0] - vals)) < 1e-8


def test_apply_filter_kills_modes_beyond_cutoff():
    grid = make_grid_1d(16)
    # kappa*k/N >= 1 -> mode removed entirely
    out = apply_filter(Field(grid, np.sin(8 * grid.nodes)), FilterSpec(kappa=2.0))
    assert np.max(np.abs(out.values)) < 1e-13


def test_apply_filter_single_mode_half_damping():
    grid = make_grid_1d(8)
    out = apply_filter(Field(grid, np.sin(2 * grid.nodes)), FilterSpec(kappa=2.0))
    want = 0.5 * np.sin(2 * grid.nodes)
    assert np.max(np.abs(out.values[:, 0] - want)) < 1e-13


def test_apply_filter_rejects_unshifted_input():
    grid = make_grid_1d(8)
    with pytest.raises(ValueError):
        apply_filter(Field(grid, np.cos(grid.nodes)), FilterSpec(kappa=1.0))


@pytest.mark.parametrize("n", [8, 12, 16])
def test_apply_filter_matches_dense_fourier_sum(n):
    # brute-force oracle: complex Fourier series of the odd extension on 2N
    # equispaced points, coefficients damped by sigma(kappa k / N)
    grid = make_grid_1d(n)
    rng = np.random.default_rng(n)
    vals = rng.normal(size=n + 1)
    vals[0] = vals[-1] = 0.0
    spec = FilterSpec(kappa=1.3)
    got = apply_filter(Field(grid, vals), spec).values[:, 0]
    x2 = np.linspace(0.0, 2.0 * np.pi, 2 * n, endpoint=False)
    w = np.concatenate([vals, -vals[-2:0:-1]])
    want = np.zeros(n + 1)
    for k in range(1, n):
        ck = np.sum(w * np.exp(-1j * k * x2)) / (2 * n)
        mode = 2.0 * np.real(ck * np.exp(1j * k * grid.nodes))
        want += spec.sigma(spec.kappa * k / n) * mode
    assert np.max(np.abs(got - want)) < 1e-12


@pytest.mark.parametrize("ratio", [2.0, 4.0, 8.0])
def test_retained_modes_stable_at_critical_kappa(ratio):
    grid = make_grid_1d(64)
    dt = ratio * grid.h**2 / 3.0
    spec = FilterSpec(kappa=kappa_critical(dt, grid.h))
    factors = filter_factors(grid.n_intervals, spec)
    for k in range(1, grid.n_intervals):
        if factors[k - 1] > 1e-12:
            roots = recurrence_roots(dt, laplacian_symbol(grid, k))
            assert np.max(np.abs(roots)) <= 1.0 + 1e-12, f"mode {k}"


def test_filter_boundary_trace_constant_and_cosine():
    x = np.linspace(0.0, np.pi, 65)
    assert np.max(np.abs(filter_boundary_trace(np.full(65, 2.0), FilterSpec(3.0)) - 2.0)) < 1e-13
    out = filter_boundary_trace(np.cos(x), FilterSpec(3.0))
    assert np.max(np.abs(out - np.cos(x))) < 1e-13


def test_filter_boundary_trace_removes_high_mode():
    x = np.linspace(0.0, np.pi, 65)
    trace = 1.0 + 0.5 * np.cos(x) + 1e-3 * np.sin(32 * x)
    out = filter_boundary_trace(trace, FilterSpec(kappa=4.0))
    assert np.max(np.abs(out - (1.0 + 0.5 * np.cos(x)))) < 1e-12
    # endpoints reproduced exactly
    assert out[0] == trace[0] and out[-1] == trace[-1]


def test_kappa_monitor_bumps_after_sustained_growth():
    mon = KappaMonitor(kappa=2.0)
    n = 64
    # kappa = 2 retains modes k <= 31; put energy in the watched top quarter
    coeffs = np.zeros((n - 1, 1))
    coeffs[27] = 1.0
    assert mon.observe(coeffs, n) == 2.0
    assert mon.observe(1.2 * coeffs, n) == 2.0  # first growth
    assert abs(mon.observe(1.5 * coeffs, n) - 2.2) < 1e-12  # second -> bump 10%


def test_kappa_monitor_ignores_flat_energy():
    mon = KappaMonitor(kappa=2.0)
    n = 64
    coeffs = np.zeros((n - 1, 1))
    coeffs[27] = 1.0
    for _ in range(6):
        assert mon.observe(coeffs, n) == 2.0


def test_postprocess_field_roundtrip_identity_filter():
    grid = make_grid_1d(64)
    u = Field(grid, (grid.nodes / np.pi) ** 4 + np.cos(2 * grid.nodes))
    out1 = postprocess_field(u, FilterSpec(kappa=1e-9), shift_order=1)
    assert np.max(np.abs(out1.values - u.values)) < 1e-8
    hist = (u, u)
    out3 = postprocess_field(u, FilterSpec(kappa=1e-9), shift_order=3,
                             history=hist, reaction=zero_reaction(), dt=0.1,
                             t_next=0.1)
    assert np.max(np.abs(out3.values - u.values)) < 1e-8


def test_postprocess_field_preserves_boundary_values():
    grid = make_grid_1d(32)
    u = Field(grid, np.cos(grid.nodes) + np.sin(5 * grid.nodes))
    out = postprocess_field(u, FilterSpec(kappa=3.0))
    assert out.values[0, 0] == u.values[0, 0]
    assert out.values[-1, 0] == u.values[-1, 0]


def _sawtooth(y):
    # piecewise-linear 2pi-periodic function with a single jump at pi/2;
    # exact sine-series coefficients about the jump are 1/k
    return (np.pi - np.mod(y - np.pi / 2, 2.0 * np.pi)) / 2.0


def test_step_function_far_field_decay_rates():
    # filtered truncation of a step function: error decays at order >= p-2 = 6
    # away from the jump, stays O(1) within 2h of it
    jump = np.pi / 2
    y = np.linspace(0.0, 2.0 * np.pi, 4001, endpoint=False)
    d = np.minimum(np.abs(y - jump), 2.0 * np.pi - np.abs(y - jump))
    far = d >= 1.0
    exact = _sawtooth(y)
    far_errors = []
    for n in (64, 128, 256):
        k = np.arange(1, n)[:, np.newaxis]
        coeffs = np.sin(k * (y[np.newaxis, :] - jump)) / k
        filtered = np.sum(sigma8(k / n) * coeffs, axis=0)
        err = np.abs(filtered - exact)
        far_errors.append(np.max(err[far]))
        near = d <= 2.0 * (np.pi / n)
        assert np.max(err[near]) > 0.1  # O(1) at the jump
    orders = np.log2(np.array(far_errors[:-1]) / np.array(far_errors[1:]))
    assert np.all(orders >= 6.0), f"observed orders {orders}"
