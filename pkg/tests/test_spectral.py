"""Dyadic block structure, partial sums, and corner complements."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixsmooth.core import InvalidParams, LorentzParams, TrigPoly, cosine, tensor
from mixsmooth.lorentz import poly_norm
from mixsmooth.spectral import (
    angle_operator,
    angle_residual,
    angle_residual_norms,
    block_norms,
    block_of_frequency,
    decompose,
    delta_block,
    lp_tail_norm,
    max_block_index,
    partial_sum,
    tail_square_norms,
)

from test_core import random_poly

L2 = LorentzParams(2.0, 2.0)


def ring_poly(rng, dim, degree):
    """Random member of the class: no mass on any k_j = 0 hyperplane."""
    f = random_poly(rng, dim, degree)
    coeffs = f.coeffs.copy()
    for axis, n in enumerate(f.degree):
        idx = [slice(None)] * dim
        idx[axis] = n
        coeffs[tuple(idx)] = 0.0
    return TrigPoly(dim, f.degree, coeffs)


# --- oracles ------------------------------------------------------------------


def block_by_search(k):
    """Smallest s >= 1 with |k| < 2**s, by linear search."""
    if k == 0:
        raise ValueError("zero frequency sits in no block")
    s = 1
    while abs(k) >= 2**s:
        s += 1
    return s


def angle_by_filter(f, l):
    """Keep a coefficient iff some axis stays within its cutoff."""
    g = np.zeros(f.coeffs.shape, dtype=complex)
    for k, c in f.nonzero_entries():
        if any(abs(kj) <= lj for kj, lj in zip(k, l)):
            idx = tuple(kj + n for kj, n in zip(k, f.degree))
            g[idx] = c
    return TrigPoly(f.dim, f.degree, g, real=False)


# --- block index -------------------------------------------------------------


def test_block_of_frequency_small_cases():
    for k in list(range(1, 40)) + [63, 64, 100]:
        assert block_of_frequency(k) == block_by_search(k)
        assert block_of_frequency(-k) == block_by_search(k)


def test_block_boundaries():
    assert block_of_frequency(1) == 1
    assert block_of_frequency(2) == 2
    assert block_of_frequency(3) == 2
    assert block_of_frequency(4) == 3
    assert block_of_frequency(8) == 4


# --- decomposition -------------------------------------------------------------


def test_blocks_have_disjoint_dyadic_support():
    f = random_poly(np.random.default_rng(3), 1, 13)
    for s, piece in decompose(f).blocks.items():
        for k, _ in piece.nonzero_entries():
            assert tuple(block_of_frequency(kj) for kj in k) == s


def test_reconstruction_is_exact():
    rng = np.random.default_rng(4)
    for f in (ring_poly(rng, 1, 9), ring_poly(rng, 2, 5)):
        g = decompose(f).reconstruct()
        assert g.degree == f.degree
        assert np.array_equal(g.coeffs, f.coeffs)


def test_parseval_over_blocks():
    f = ring_poly(np.random.default_rng(8), 2, 7)
    total = sum(poly_norm(piece, L2) ** 2 for piece in decompose(f).blocks.values())
    assert total == pytest.approx(poly_norm(f, L2) ** 2, rel=1e-8)


def test_delta_block_extracts_one_shell():
    f = cosine(1) + cosine(3) + cosine(5)
    assert sorted(k for (k,), _ in delta_block(f, (1,)).nonzero_entries()) == [-1, 1]
    assert sorted(k for (k,), _ in delta_block(f, (2,)).nonzero_entries()) == [-3, 3]
    assert sorted(k for (k,), _ in delta_block(f, (3,)).nonzero_entries()) == [-5, 5]
    assert max_block_index(f) == (3,)


# --- partial sums and corner complement -----------------------------------------


def test_partial_sum_keeps_the_box():
    f = random_poly(np.random.default_rng(11), 1, 10)
    g = partial_sum(f, (4,))
    for (k,), _ in g.nonzero_entries():
        assert abs(k) <= 4
    # idempotent, and the full box returns the function unchanged
    assert np.array_equal(partial_sum(g, (4,)).coeffs, g.coeffs)
    assert np.array_equal(partial_sum(f, f.tight_degree()).coeffs, f.coeffs)


def test_angle_operator_matches_filter_oracle_2d():
    f = tensor(random_poly(np.random.default_rng(12), 1, 6), random_poly(np.random.default_rng(13), 1, 5))
    for l in ((1, 1), (2, 4), (0, 3)):
        got = angle_operator(f, l)
        want = angle_by_filter(f, l)
        assert dict(got.nonzero_entries()) == pytest.approx(dict(want.nonzero_entries()))


def test_angle_inclusion_exclusion_2d():
    # two overlapping half-plane partial sums minus their intersection
    f = tensor(random_poly(np.random.default_rng(14), 1, 6), random_poly(np.random.default_rng(15), 1, 6))
    n1, n2 = f.degree
    for l1, l2 in ((1, 1), (2, 3), (0, 5)):
        lhs = angle_operator(f, (l1, l2))
        rhs = (
            partial_sum(f, (l1, n2))
            + partial_sum(f, (n1, l2))
            - partial_sum(f, (l1, l2))
        )
        assert lhs.degree == rhs.degree or dict(lhs.nonzero_entries()) == dict(rhs.nonzero_entries())
        for k, c in lhs.nonzero_entries():
            assert rhs.coeff(k) == c
        for k, c in rhs.nonzero_entries():
            assert lhs.coeff(k) == c


def test_residual_complements_the_operator():
    f = tensor(cosine(2), cosine(2))
    kept = angle_operator(f, (1, 1))
    rest = angle_residual(f, (1, 1))
    assert list(kept.nonzero_entries()) == []
    assert poly_norm(rest, L2) == pytest.approx(0.5, abs=1e-12)
    g = kept + rest
    assert g.coeff((2, 2)) == f.coeff((2, 2))


def test_angle_residual_norms_match_singles():
    f = random_poly(np.random.default_rng(16), 1, 12)
    cutoffs = [(1,), (3,), (7,)]
    batched = angle_residual_norms(f, cutoffs, L2)
    singles = [poly_norm(angle_residual(f, l), L2) for l in cutoffs]
    assert np.allclose(batched, singles, rtol=1e-12, atol=1e-15)


# --- tails -------------------------------------------------------------


def test_tail_square_norm_hand_value():
    f = cosine(1) + cosine(3)
    assert lp_tail_norm(f, 1, L2) == pytest.approx(1.0, abs=1e-10)
    assert lp_tail_norm(f, 2, L2) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-10)
    assert lp_tail_norm(f, 3, L2) == pytest.approx(0.0, abs=1e-15)


def test_tail_square_norms_grid_is_monotone():
    f = ring_poly(np.random.default_rng(17), 1, 14)
    t = tail_square_norms(f, L2)
    assert t.ndim == 1
    assert all(t[i] >= t[i + 1] - 1e-15 for i in range(len(t) - 1))
    assert t[0] == pytest.approx(poly_norm(f, L2), rel=1e-8)


def test_tail_square_norms_2d_shape():
    f = tensor(cosine(3), cosine(5))
    t = tail_square_norms(f, L2)
    assert t.shape == (2, 3)  # block indices run to bit_length of each degree
    assert t[0, 0] == pytest.approx(0.5, rel=1e-10)


def test_tail_rejects_empty_axis():
    with pytest.raises(InvalidParams):
        tail_square_norms(TrigPoly.zero(2), L2)


def test_block_norms_values():
    f = cosine(1) + cosine(2) * 0.5
    norms = block_norms(f, L2)
    assert set(norms) == {(1,), (2,)}
    assert norms[(1,)] == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-10)
    assert norms[(2,)] == pytest.approx(0.5 / math.sqrt(2.0), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000), cut=st.integers(min_value=0, max_value=9))
def test_partial_plus_complement_is_identity(seed, cut):
    f = random_poly(np.random.default_rng(seed), 1, 9)
    g = partial_sum(f, (cut,)) + angle_residual(f, (cut,))
    for k, c in f.nonzero_entries():
        assert g.coeff(k) == pytest.approx(c, rel=1e-14, abs=1e-15)
