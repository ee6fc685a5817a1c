"""Dyadic spectral blocks, rectangular partial sums, and the angle operator.

The axis-j frequency k falls in dyadic block s >= 1 when 2^(s-1) <= |k| < 2^s;
index 0 is reserved for k = 0 and its block is empty by convention, so a
zero-mean ring member decomposes exactly into blocks with every s_j >= 1.

The angle operator with cutoff vector l keeps every coefficient whose
frequency is small (|k_j| <= l_j) on at least one axis; its residual spectrum
is the open corner {|k_j| > l_j for all j}.  In two variables this reduces to
the inclusion-exclusion identity U = S_(l1,inf) + S_(inf,l2) - S_(l1,l2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import InvalidParams, LorentzParams, TrigPoly, default_grid_shape, evaluate_coeff_batch
from .lorentz import batch_norms, lorentz_norm

__all__ = [
    "BlockIndex",
    "BlockDecomposition",
    "block_of_frequency",
    "delta_block",
    "decompose",
    "max_block_index",
    "partial_sum",
    "angle_operator",
    "angle_residual",
    "angle_residual_norms",
    "block_norms",
    "lp_tail_norm",
    "tail_square_norms",
]


@dataclass(frozen=True)
class BlockIndex:
    """Per-axis dyadic block indices, each s_j >= 0."""

    s: tuple[int, ...]

    def __init__(self, s):
        if np.isscalar(s):
            s = (s,)
        s = tuple(int(v) for v in s)
        if any(v < 0 for v in s):
            raise InvalidParams(f"block indices must be >= 0, got {s}")
        object.__setattr__(self, "s", s)

    def __iter__(self):
        return iter(self.s)

    def __len__(self):
        return len(self.s)


def _index_tuple(s, dim: int) -> tuple[int, ...]:
    if isinstance(s, BlockIndex):
        s = s.s
    elif np.isscalar(s):
        s = (int(s),) * dim
    s = tuple(int(v) for v in s)
    if len(s) != dim:
        raise InvalidParams(f"block index {s} does not match dim {dim}")
    if any(v < 0 for v in s):
        raise InvalidParams(f"block indices must be >= 0, got {s}")
    return s


def block_of_frequency(k: int) -> int:
    """Dyadic block index of a single frequency: 0 for k = 0, else floor(log2|k|)+1."""
    k = abs(int(k))
    if k == 0:
        return 0
    return k.bit_length()


def _axis_block_indices(freqs: np.ndarray) -> np.ndarray:
    """Vectorized block_of_frequency over an integer frequency axis."""
    a = np.abs(freqs).astype(np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    pos = a > 0
    # frexp exponent of an exact small integer is floor(log2) + 1
    out[pos] = np.frexp(a[pos].astype(np.float64))[1]
    return out


def _axis_block_mask(freqs: np.ndarray, s: int) -> np.ndarray:
    if s == 0:
        return np.zeros(freqs.shape, dtype=bool)
    lo, hi = 2 ** (s - 1), 2**s
    a = np.abs(freqs)
    return (a >= lo) & (a < hi)


def _outer_mask(axis_masks) -> np.ndarray:
    mask = axis_masks[0]
    for nxt in axis_masks[1:]:
        mask = np.tensordot(mask, nxt, axes=0)
    return mask


def delta_block(f: TrigPoly, s) -> TrigPoly:
    """Spectral restriction of f to the dyadic block rho(s).

    Any s_j = 0 yields the zero polynomial (the index-0 block is empty).
    Restriction copies coefficients, so summing the blocks of a ring member
    reproduces it exactly, coefficient by coefficient.
    """
    s = _index_tuple(s, f.dim)
    masks = [_axis_block_mask(f.freqs(axis), sj) for axis, sj in enumerate(s)]
    return f.apply_multiplier(_outer_mask(masks), real=f.real if f.real else None)


def max_block_index(f: TrigPoly) -> tuple[int, ...]:
    """Per-axis largest block index that can carry a coefficient of f."""
    return tuple(block_of_frequency(n) for n in f.tight_degree())


@dataclass(frozen=True)
class BlockDecomposition:
    """All nonzero dyadic blocks of a polynomial, keyed by their index tuple."""

    base_degree: tuple[int, ...]
    blocks: dict[tuple[int, ...], TrigPoly] = field(default_factory=dict)

    def reconstruct(self) -> TrigPoly:
        total = None
        for key in sorted(self.blocks):
            total = self.blocks[key] if total is None else total + self.blocks[key]
        if total is None:
            raise InvalidParams("decomposition holds no blocks")
        return total


def decompose(f: TrigPoly) -> BlockDecomposition:
    """Split f into its nonzero dyadic blocks (ring members decompose exactly)."""
    smax = max_block_index(f)
    blocks: dict[tuple[int, ...], TrigPoly] = {}
    for s in np.ndindex(*[m + 1 for m in smax]):
        if any(v == 0 for v in s):
            continue
        blk = delta_block(f, s)
        if np.any(blk.coeffs != 0):
            blocks[tuple(int(v) for v in s)] = blk
    return BlockDecomposition(base_degree=f.degree, blocks=blocks)


def _cutoff_tuple(l, dim: int) -> tuple[float, ...]:
    if np.isscalar(l):
        l = (l,) * dim
    out = []
    for v in l:
        v = float(v)
        if math.isnan(v) or (not math.isinf(v) and (v < 0 or v != int(v))):
            raise InvalidParams(f"cutoffs must be nonnegative integers or inf, got {l}")
        out.append(v)
    if len(out) != dim:
        raise InvalidParams(f"cutoff {l} does not match dim {dim}")
    return tuple(out)


def partial_sum(f: TrigPoly, l) -> TrigPoly:
    """Rectangular partial sum S_l: keep |k_j| <= l_j; l_j = inf keeps the axis whole."""
    l = _cutoff_tuple(l, f.dim)
    masks = [np.abs(f.freqs(axis)) <= lj for axis, lj in enumerate(l)]
    return f.apply_multiplier(_outer_mask(masks))


def _residual_mask(f: TrigPoly, l) -> np.ndarray:
    masks = [np.abs(f.freqs(axis)) > lj for axis, lj in enumerate(l)]
    return _outer_mask(masks)


def angle_operator(f: TrigPoly, l) -> TrigPoly:
    """Angle-approximation operator U_l: drop only the corner |k_j| > l_j for all j.

    Equivalently the union over nonempty axis subsets e of the groups that are
    small on e and large elsewhere; the complement-of-corner form is exact and
    a subset-enumeration oracle in the tests pins the equivalence.
    """
    l = _cutoff_tuple(l, f.dim)
    return f.apply_multiplier(~_residual_mask(f, l))


def angle_residual(f: TrigPoly, l) -> TrigPoly:
    """f - U_l(f) as an exact spectral restriction (no subtraction roundoff)."""
    l = _cutoff_tuple(l, f.dim)
    return f.apply_multiplier(_residual_mask(f, l))


def angle_residual_norms(f: TrigPoly, cutoffs, lp: LorentzParams, shape=None) -> np.ndarray:
    """Lorentz norms of f - U_l(f) for a list of cutoff vectors, batched."""
    if shape is None:
        shape = default_grid_shape(f.dim, f.degree)
    cutoffs = [_cutoff_tuple(l, f.dim) for l in cutoffs]
    batch = np.empty((len(cutoffs),) + f.coeffs.shape, dtype=np.complex128)
    for i, l in enumerate(cutoffs):
        batch[i] = f.coeffs * _residual_mask(f, l)
    values = evaluate_coeff_batch(f.degree, batch, shape)
    return batch_norms(values, lp)


def block_norms(f: TrigPoly, lp: LorentzParams, shape=None) -> dict[tuple[int, ...], float]:
    """Lorentz norms of every nonzero dyadic block, batched, keyed by index tuple."""
    if shape is None:
        shape = default_grid_shape(f.dim, f.degree)
    dec = decompose(f)
    keys = sorted(dec.blocks)
    if not keys:
        return {}
    batch = np.stack([dec.blocks[s].coeffs for s in keys])
    values = evaluate_coeff_batch(f.degree, batch, shape)
    norms = batch_norms(values, lp)
    return {s: float(v) for s, v in zip(keys, norms)}


def tail_square_norms(f: TrigPoly, lp: LorentzParams, shape=None) -> np.ndarray:
    """Norms of the dyadic square-function tails for every start index at once.

    Entry [nu_1 - 1, ..., nu_m - 1] is

        || ( sum_{s_j >= nu_j for all j} |delta_s(f)(x)|^2 )^(1/2) ||_{p,tau}

    for nu_j in 1..smax_j.  Every nonzero block is evaluated once; the tails
    are suffix sums of the squared block samples over the block lattice.
    """
    if shape is None:
        shape = default_grid_shape(f.dim, f.degree)
    smax = max_block_index(f)
    if any(v == 0 for v in smax):
        raise InvalidParams("tail norms need a nonzero spectrum on every axis")
    lattice = tuple(range(1, v + 1) for v in smax)
    keys = [s for s in np.ndindex(*[len(ax) for ax in lattice])]
    batch = np.empty((len(keys),) + f.coeffs.shape, dtype=np.complex128)
    for i, pos in enumerate(keys):
        s = tuple(lattice[axis][p] for axis, p in enumerate(pos))
        masks = [_axis_block_mask(f.freqs(axis), sj) for axis, sj in enumerate(s)]
        batch[i] = f.coeffs * _outer_mask(masks)
    values = evaluate_coeff_batch(f.degree, batch, shape)
    squares = (values**2).reshape(tuple(len(ax) for ax in lattice) + (values.shape[-1],))
    for axis in range(len(smax)):
        squares = np.flip(np.cumsum(np.flip(squares, axis=axis), axis=axis), axis=axis)
    flat = np.sqrt(squares.reshape(-1, squares.shape[-1]))
    norms = batch_norms(flat, lp)
    return norms.reshape(tuple(len(ax) for ax in lattice))


def lp_tail_norm(f: TrigPoly, nu, lp: LorentzParams, shape=None) -> float:
    """Single square-function tail norm with start index nu (each nu_j >= 1)."""
    nu = _index_tuple(nu, f.dim)
    if any(v < 1 for v in nu):
        raise InvalidParams(f"tail start indices must be >= 1, got {nu}")
    smax = max_block_index(f)
    if all(v <= m for v, m in zip(nu, smax)):
        sig = tail_square_norms(f, lp, shape)
        return float(sig[tuple(v - 1 for v in nu)])
    # start index beyond the spectrum on some axis: collect blocks directly
    if shape is None:
        shape = default_grid_shape(f.dim, f.degree)
    total = None
    for s, blk in sorted(decompose(f).blocks.items()):
        if all(sj >= nj for sj, nj in zip(s, nu)):
            vals = evaluate_coeff_batch(f.degree, blk.coeffs[None, ...], shape)[0]
            total = vals**2 if total is None else total + vals**2
    if total is None:
        return 0.0
    return float(batch_norms(np.sqrt(total)[None, :], lp)[0])
