"""Mixed differences, the modulus lattice, and the log-weighted seminorm."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixsmooth.core import LorentzParams, SmoothParams, TrigPoly, cosine, evaluate_on_grid, tensor
from mixsmooth.lorentz import poly_norm
from mixsmooth.smoothness import (
    TailNotConverged,
    derivative,
    difference_norms,
    log_modulus_seminorm,
    mixed_difference,
    mixed_modulus,
    modulus_grid,
)

from test_core import random_poly
from test_spectral import ring_poly

L2 = LorentzParams(2.0, 2.0)


# --- oracles ------------------------------------------------------------------
# the step h = 2*pi*j/N shifts the sampling grid by exactly j cells, so the
# difference of samples can be formed by np.roll with no interpolation error


def rolled_difference(values, shifts, k, axes):
    out = np.asarray(values, dtype=complex)
    for axis, (j, kk) in zip(axes, zip(shifts, k)):
        for _ in range(kk):
            out = np.roll(out, -j, axis=axis) - out
    return out


def test_difference_matches_roll_oracle_1d():
    f = random_poly(np.random.default_rng(21), 1, 6)
    N = 64
    vals = evaluate_on_grid(f, (N,))
    for j, k in ((1, 1), (3, 1), (5, 2), (11, 3)):
        h = 2.0 * math.pi * j / N
        g = mixed_difference(f, (h,), (k,))
        got = evaluate_on_grid(g, (N,))
        want = rolled_difference(vals, (j,), (k,), axes=(0,))
        assert np.allclose(got, want, rtol=1e-10, atol=1e-10)


def test_difference_matches_roll_oracle_2d():
    f = ring_poly(np.random.default_rng(22), 2, 4)
    N = 32
    vals = evaluate_on_grid(f, (N, N))
    h = (2.0 * math.pi * 3 / N, 2.0 * math.pi * 7 / N)
    g = mixed_difference(f, h, (2, 1))
    got = evaluate_on_grid(g, (N, N))
    want = rolled_difference(vals, (3, 7), (2, 1), axes=(0, 1))
    assert np.allclose(got, want, rtol=1e-9, atol=1e-9)


def test_first_difference_of_cosine_closed_form():
    # multiplier magnitude |e^{ih} - 1| = 2 sin(h/2)
    for h in (0.3, 1.0, 2.5):
        g = mixed_difference(cosine(1), (h,), (1,))
        want = 2.0 * math.sin(h / 2.0) / math.sqrt(2.0)
        assert poly_norm(g, L2) == pytest.approx(want, rel=1e-12)


def test_higher_difference_powers_of_multiplier():
    for k in (1, 2, 3):
        g = mixed_difference(cosine(1), (0.7,), (k,))
        want = (2.0 * math.sin(0.35)) ** k / math.sqrt(2.0)
        assert poly_norm(g, L2) == pytest.approx(want, rel=1e-12)


# --- modulus ------------------------------------------------------------------


def test_modulus_of_cosine_closed_form():
    # sup over h <= t of 2 sin(h/2) sits at the endpoint while t <= pi
    for t in (0.25, 0.9, 2.0, math.pi):
        got = mixed_modulus(cosine(1), (t,), (1,), L2)
        assert got == pytest.approx(math.sqrt(2.0) * math.sin(t / 2.0), rel=1e-8)


def test_modulus_tensor_factorization_at_p2():
    f = tensor(cosine(1), cosine(1))
    for t1, t2 in ((0.5, 1.5), (2.0, 0.3)):
        got = mixed_modulus(f, (t1, t2), (1, 1), L2)
        want = 2.0 * math.sin(t1 / 2.0) * math.sin(t2 / 2.0)
        assert got == pytest.approx(want, rel=1e-8)


def test_modulus_monotone_in_t():
    f = ring_poly(np.random.default_rng(23), 1, 9)
    ts = [0.1, 0.4, 0.9, 1.7, 3.0]
    vals = [mixed_modulus(f, (t,), (1,), L2) for t in ts]
    assert all(a <= b * (1.0 + 1e-9) for a, b in zip(vals, vals[1:]))


def test_modulus_subadditive_on_shared_lattice():
    # both summands and the sum measured over one common set of steps
    rng = np.random.default_rng(24)
    f = ring_poly(rng, 1, 7)
    g = ring_poly(rng, 1, 7)
    lp = LorentzParams(3.0, 1.5)
    for t in (0.5, 1.5):
        h_list = [(h,) for h in np.linspace(0.0, t, 17)[1:]]
        nf = difference_norms(f, h_list, (1,), lp)
        ng = difference_norms(g, h_list, (1,), lp)
        nsum = difference_norms(f + g, h_list, (1,), lp)
        assert nsum.max() <= nf.max() + ng.max() + 1e-9


def test_modulus_bounded_by_derivative():
    # omega_k(f, t) <= t^k * ||f^(k)|| at p = tau = 2
    f = ring_poly(np.random.default_rng(25), 1, 8)
    d1 = poly_norm(derivative(f, (1,)), L2)
    for t in (0.5, 0.1, 0.02):
        got = mixed_modulus(f, (t,), (1,), L2)
        assert got <= t * d1 * (1.0 + 1e-6)


def test_derivative_closed_form():
    for n in (1, 3, 8):
        g = derivative(cosine(n), (1,))
        assert poly_norm(g, L2) == pytest.approx(n / math.sqrt(2.0), rel=1e-12)
    # second derivative brings down n^2
    g = derivative(cosine(3), (2,))
    assert poly_norm(g, L2) == pytest.approx(9.0 / math.sqrt(2.0), rel=1e-12)


def test_derivative_of_tensor_is_separable():
    f = tensor(cosine(2), cosine(5))
    g = derivative(f, (1, 1))
    assert poly_norm(g, L2) == pytest.approx(10.0 * 0.5, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_modulus_vanishes_with_t(seed):
    f = ring_poly(np.random.default_rng(seed), 1, 5)
    small = mixed_modulus(f, (1e-4,), (1,), L2)
    assert small <= 1e-3 * max(poly_norm(f, L2), 1.0)


# --- modulus lattice cache --------------------------------------------------


def test_modulus_grid_structure():
    f = ring_poly(np.random.default_rng(26), 1, 9)
    grid = modulus_grid(f, (1,), L2, nu_max=(4,))
    assert grid.values.shape == tuple(len(tv) for tv in grid.t_values)
    # suffix max makes the stored table exactly monotone in each axis
    v = grid.values
    assert np.all(v[:-1] >= v[1:] - 0.0)
    # table agrees with the direct computation at its own nodes, indexed by
    # the dyadic level nu (t = t_values[nu - 1])
    for nu in (1, 2, 4):
        t = grid.t_values[0][nu - 1]
        direct = mixed_modulus(f, (t,), (1,), L2, refine=False)
        assert grid.value_at((nu,)) >= direct - 1e-12


def test_modulus_grid_2d_monotone_both_axes():
    f = ring_poly(np.random.default_rng(27), 2, 5)
    grid = modulus_grid(f, (1, 1), L2, nu_max=(3, 3))
    v = grid.values
    assert np.all(v[:-1, :] >= v[1:, :])
    assert np.all(v[:, :-1] >= v[:, 1:])


# --- log-weighted seminorm ------------------------------------------------


def test_seminorm_zero_function_is_zero():
    sp = SmoothParams(1.0, 0.0)
    res = log_modulus_seminorm(TrigPoly.zero(1), sp, L2, nu_max=(3,))
    assert res.value == 0.0


def test_seminorm_tail_not_converged_for_tiny_cutoff():
    sp = SmoothParams(1.0, 0.5)
    with pytest.raises(TailNotConverged):
        log_modulus_seminorm(cosine(32), sp, L2, nu_max=(1,))


def test_seminorm_auto_cutoff_converges():
    sp = SmoothParams(1.0, 0.5)
    res = log_modulus_seminorm(cosine(4) + cosine(1), sp, L2)
    assert res.value > 0.0
    assert res.tail_bound <= 0.01 * res.value


def test_seminorm_reuses_precomputed_grid_exactly():
    f = ring_poly(np.random.default_rng(28), 1, 6)
    sp = SmoothParams(2.0, 0.25)
    fresh = log_modulus_seminorm(f, sp, L2, nu_max=(6,))
    grid = modulus_grid(f, sp.k, L2, nu_max=(6,))
    reused = log_modulus_seminorm(f, sp, L2, nu_max=(6,), grid=grid)
    assert reused.value == fresh.value
    assert reused.tail_bound == fresh.tail_bound


def test_seminorm_scales_linearly():
    f = ring_poly(np.random.default_rng(29), 1, 6)
    sp = SmoothParams(2.0, 0.25)
    a = log_modulus_seminorm(f, sp, L2, nu_max=(6,))
    b = log_modulus_seminorm(f * 3.0, sp, L2, nu_max=(6,))
    assert b.value == pytest.approx(3.0 * a.value, rel=1e-10)
