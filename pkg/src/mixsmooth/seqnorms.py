"""Weighted sequence norms over dyadic blocks and the theorem-facing functionals.

Everything here reduces a polynomial to scalar sequences (block norms, angle
surrogates at dyadic cutoffs, square-function tails) and combines them with
polynomial weights prod (s_j + 1)^(b_j) through a common theta-sum

    {sum w_s^theta x_s^theta}^(1/theta)        (theta = inf: sup of w_s x_s).

The embedding exponent table and the numeric convergence certificate for the
comparison sums of the embedding theorems live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    InvalidParams,
    LorentzParams,
    SmoothParams,
    TrigPoly,
    default_grid_shape,
    evaluate_coeff_batch,
    validate_params,
)
from .lorentz import batch_norms, poly_norm
from .smoothness import ModulusGrid, log_modulus_seminorm
from .spectral import (
    angle_residual_norms,
    block_norms,
    block_of_frequency,
    max_block_index,
    tail_square_norms,
)

__all__ = [
    "Inconclusive",
    "UncoveredParams",
    "EmbeddingExponents",
    "ConditionReport",
    "theta_sum",
    "seq_norm_B",
    "norm_bold_B",
    "theorem1_rhs",
    "theorem2_rhs",
    "theorem3_norm",
    "embedding_exponents",
    "theorem5_condition",
]


class Inconclusive(ArithmeticError):
    """The truncated comparison sum cannot certify convergence or divergence."""


class UncoveredParams(ValueError):
    """The (p, tau) pair falls outside the proven exponent table."""


def theta_sum(values, theta: float) -> float:
    """{sum v^theta}^(1/theta) over nonnegative weighted values; sup when theta = inf."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        return 0.0
    if math.isinf(theta):
        return float(np.max(arr))
    return float(np.sum(arr**theta) ** (1.0 / theta))


def _block_weight(s: tuple[int, ...], sp: SmoothParams, r_weights) -> float:
    w = 1.0
    for sj, bj in zip(s, sp.b):
        w *= (sj + 1.0) ** bj
    if r_weights is not None:
        w *= 2.0 ** sum(sj * rj for sj, rj in zip(s, r_weights))
    return w


def seq_norm_B(
    f: TrigPoly, lp: LorentzParams, sp: SmoothParams, r_weights=None, shape=None
) -> float:
    """Weighted block-norm sequence norm

        { sum_s prod_j (s_j + 1)^(b_j theta) ||delta_s(f)||^theta }^(1/theta),

    optionally carrying extra geometric weights 2^(<s, r>) per block.
    """
    validate_params(lp, sp, f.dim)
    if r_weights is not None:
        r_weights = tuple(float(v) for v in r_weights)
        if len(r_weights) != f.dim:
            raise InvalidParams(f"r_weights {r_weights} does not match dim {f.dim}")
    norms = block_norms(f, lp, shape)
    weighted = [
        _block_weight(s, sp, r_weights) * val for s, val in sorted(norms.items())
    ]
    return theta_sum(weighted, sp.theta)


def norm_bold_B(
    f: TrigPoly,
    lp: LorentzParams,
    sp: SmoothParams,
    nu_max=None,
    h_grid: int = 17,
    shape=None,
    grid: ModulusGrid | None = None,
) -> float:
    """Lorentz norm plus the log-weighted modulus seminorm (the bold-class norm)."""
    validate_params(lp, sp, f.dim)
    semi = log_modulus_seminorm(f, sp, lp, nu_max=nu_max, h_grid=h_grid, shape=shape, grid=grid)
    return poly_norm(f, lp, shape) + semi.value


def _dyadic_cutoff(nu: int) -> int:
    # floor(2^(nu - 1)): 0, 1, 2, 4, 8, ... for nu = 0, 1, 2, 3, 4, ...
    return 0 if nu == 0 else 2 ** (nu - 1)


def theorem1_rhs(f: TrigPoly, lp: LorentzParams, sp: SmoothParams, nu_max=None, shape=None) -> float:
    """Weighted theta-sum of angle surrogates at dyadic cutoffs floor(2^(nu-1)).

    Sums nu_j from 0; by default each axis stops once the cutoff swallows the
    spectrum (the surrogate vanishes identically beyond, contributing zero).
    """
    validate_params(lp, sp, f.dim)
    tight = f.tight_degree()
    if nu_max is None:
        # per axis, the first nu with floor(2^(nu-1)) >= n kills the residual
        nu_max = tuple(0 if n == 0 else int(n - 1).bit_length() + 1 for n in tight)
    elif np.isscalar(nu_max):
        nu_max = (int(nu_max),) * f.dim
    nu_max = tuple(int(v) for v in nu_max)
    grid_nus = [range(0, v + 1) for v in nu_max]
    combos = [tuple(int(v) for v in pos) for pos in np.ndindex(*[len(g) for g in grid_nus])]
    cutoffs = [tuple(_dyadic_cutoff(v) for v in nu) for nu in combos]
    norms = angle_residual_norms(f, cutoffs, lp, shape)
    weighted = []
    for nu, val in zip(combos, norms):
        w = 1.0
        for vj, bj in zip(nu, sp.b):
            w *= (vj + 1.0) ** bj
        weighted.append(w * float(val))
    return theta_sum(weighted, sp.theta)


def theorem2_rhs(f: TrigPoly, lp: LorentzParams, sp: SmoothParams, shape=None) -> float:
    """|| f ||_{p,tau} plus the weighted theta-sum of square-function tail norms,
    tails starting at every nu in [1, smax]^m."""
    validate_params(lp, sp, f.dim)
    sig = tail_square_norms(f, lp, shape)
    weighted = np.array(sig, dtype=np.float64)
    for axis in range(f.dim):
        nus = np.arange(1, sig.shape[axis] + 1, dtype=np.float64)
        w = (nus + 1.0) ** sp.b[axis]
        shape_w = [1] * f.dim
        shape_w[axis] = w.size
        weighted = weighted * w.reshape(shape_w)
    return poly_norm(f, lp, shape) + theta_sum(weighted, sp.theta)


def _group_bounds(l: int) -> tuple[int, int]:
    # dyadic-of-dyadic group: block indices s with floor(2^(l-1)) + 1 <= s <= 2^l
    lo = (0 if l == 0 else 2 ** (l - 1)) + 1
    return lo, 2**l


def theorem3_norm(f: TrigPoly, lp: LorentzParams, sp: SmoothParams, side: str, shape=None) -> float:
    """Weighted norm over dyadic groups of dyadic blocks.

    Group l on an axis merges block indices floor(2^(l-1))+1 .. 2^l; the term
    weight is prod_j 2^(l_j (b_j + 1/theta)) and side selects the summation
    origin: "lower" sums l_j from 1, "upper" from 0.  Returns
    || f ||_{p,tau} + the group sum; both comparison displays carry the
    plain norm inside the brace.
    """
    validate_params(lp, sp, f.dim)
    if side not in ("lower", "upper"):
        raise InvalidParams(f"side must be 'lower' or 'upper', got {side}")
    start = 1 if side == "lower" else 0
    smax = max_block_index(f)
    l_ranges = []
    for m_ax in smax:
        top = start
        while _group_bounds(top)[1] < max(m_ax, 1):
            top += 1
        l_ranges.append(range(start, top + 1))
    inv_theta = 0.0 if math.isinf(sp.theta) else 1.0 / sp.theta
    axis_block_ids = [
        np.array([block_of_frequency(int(k)) for k in f.freqs(axis)]) for axis in range(f.dim)
    ]
    if shape is None:
        shape = default_grid_shape(f.dim, f.degree)
    combos = []
    masks = []
    for pos in np.ndindex(*[len(r) for r in l_ranges]):
        l_vec = tuple(l_ranges[axis][p] for axis, p in enumerate(pos))
        axis_masks = []
        for axis, lj in enumerate(l_vec):
            lo, hi = _group_bounds(lj)
            ids = axis_block_ids[axis]
            axis_masks.append((ids >= lo) & (ids <= hi))
        mask = axis_masks[0]
        for nxt in axis_masks[1:]:
            mask = np.tensordot(mask, nxt, axes=0)
        if not np.any(mask & (f.coeffs != 0)):
            continue
        combos.append(l_vec)
        masks.append(mask)
    base = poly_norm(f, lp, shape)
    if not combos:
        return base
    batch = np.stack([f.coeffs * m for m in masks])
    values = evaluate_coeff_batch(f.degree, batch, shape)
    norms = batch_norms(values, lp)
    weighted = []
    for l_vec, val in zip(combos, norms):
        w = 1.0
        for lj, bj in zip(l_vec, sp.b):
            w *= 2.0 ** (lj * (bj + inv_theta))
        weighted.append(w * float(val))
    return base + theta_sum(weighted, sp.theta)


@dataclass(frozen=True)
class EmbeddingExponents:
    """Exponent table output for the two-sided sequence-class embeddings."""

    covered: bool
    reason: str
    beta: float | None = None
    gamma: float | None = None
    v: tuple[float, ...] | None = None
    u: tuple[float, ...] | None = None


def embedding_exponents(lp: LorentzParams, sp: SmoothParams) -> EmbeddingExponents:
    """Exponents (beta, gamma) and shifted weights (v, u) where the two-sided
    block-norm embeddings are proven; uncovered pairs are flagged, never guessed.

    beta = tau and gamma = 2 for 1 < tau <= 2 (any p); beta = 2 and gamma = tau
    for 2 < tau < inf provided 2 < p < inf.  v_j = b_j + 1/min(beta, theta),
    u_j = b_j + 1/max(gamma, theta).
    """
    p, tau = lp.p, lp.tau
    if 1.0 < tau <= 2.0:
        beta, gamma = tau, 2.0
    elif tau > 2.0 and p > 2.0:
        beta, gamma = 2.0, tau
    else:
        return EmbeddingExponents(
            covered=False,
            reason=f"(p, tau) = ({p}, {tau}) outside the proven table "
            "(needs 1 < tau <= 2, or tau > 2 with p > 2)",
        )
    theta = sp.theta
    v = tuple(bj + 1.0 / min(beta, theta) for bj in sp.b)
    u = tuple(bj + (0.0 if math.isinf(max(gamma, theta)) else 1.0 / max(gamma, theta)) for bj in sp.b)
    return EmbeddingExponents(covered=True, reason="", beta=beta, gamma=gamma, v=v, u=u)


@dataclass(frozen=True)
class ConditionReport:
    """Verdict of the numeric convergence certificate for a comparison sum."""

    converges: bool
    partial_sum: float
    tail_estimate: float
    last_ratio: float


def _band_sums(terms: np.ndarray, coord_max: np.ndarray, edges: list[int]) -> list[float]:
    sums = []
    lo = 0
    for hi in edges:
        mask = (coord_max > lo) & (coord_max <= hi)
        sums.append(float(np.sum(terms[mask])))
        lo = hi
    return sums


def theorem5_condition(
    b1,
    b2,
    tau1: float,
    tau2: float,
    theta1: float,
    theta2: float,
    truncation: int | None = None,
    dyadic: bool = False,
    margin: float = 0.05,
) -> ConditionReport:
    """Numeric convergence certificate for the embedding comparison sums.

    Power form (default): terms prod_j s_j^((b2_j - b1_j) theta2 eta')
    * (sum_j (s_j + 1))^((1/tau2 - 1/tau1) theta2 eta') over s in N^m, with
    eta = theta1/theta2 and eta' its conjugate.  Dyadic form substitutes
    2^(l_j) geometry: prod_j 2^(l_j (b2_j - b1_j - 1/theta1 + 1/theta2) theta2 eta')
    * (sum_j 2^(l_j))^(same tau exponent) over l in Z_+^m.

    The box sum is split into geometric bands of the max coordinate; the
    verdict comes from the last band ratios: certified convergent when they
    sit below 1 - margin (tail extrapolated geometrically), divergent when at
    or above 1, Inconclusive in between (a larger truncation may resolve it).
    """
    b1 = tuple(float(v) for v in ((b1,) if np.isscalar(b1) else b1))
    b2 = tuple(float(v) for v in ((b2,) if np.isscalar(b2) else b2))
    if len(b1) != len(b2):
        raise InvalidParams("b1 and b2 must have the same number of axes")
    dim = len(b1)
    if not (0 < theta2 < theta1):
        raise InvalidParams(f"need 0 < theta2 < theta1, got ({theta1}, {theta2})")
    if not (1.0 <= tau2 <= tau1):
        raise InvalidParams(f"need tau2 <= tau1, got ({tau1}, {tau2})")
    if math.isinf(theta1):
        eta_conj = 1.0
    else:
        eta = theta1 / theta2
        eta_conj = eta / (eta - 1.0)
    scale = theta2 * eta_conj
    a_exp = tuple((v2 - v1) * scale for v1, v2 in zip(b1, b2))
    b_exp = (1.0 / tau2 - 1.0 / tau1) * scale
    if dyadic:
        inv_t1 = 0.0 if math.isinf(theta1) else 1.0 / theta1
        a_exp = tuple((v2 - v1 - inv_t1 + 1.0 / theta2) * scale for v1, v2 in zip(b1, b2))
    if truncation is None:
        truncation = {1: 4096, 2: 512}.get(dim, 128) if not dyadic else {1: 64, 2: 48}.get(dim, 24)
    truncation = int(truncation)
    with np.errstate(over="ignore", divide="ignore"):
        if dyadic:
            axes = [np.arange(0, truncation + 1, dtype=np.float64)] * dim
            grids = np.meshgrid(*axes, indexing="ij")
            terms = np.ones(grids[0].shape)
            coupling = np.zeros(grids[0].shape)
            for g, aj in zip(grids, a_exp):
                terms = terms * 2.0 ** (g * aj)
                coupling = coupling + 2.0**g
            terms = terms * coupling**b_exp
            coord = np.maximum.reduce(grids) + 1.0
            width = max(4, truncation // 8)
            edges = list(range(width, truncation + 1, width))
            if not edges or edges[-1] != truncation + 1:
                edges.append(truncation + 1)
        else:
            axes = [np.arange(1, truncation + 1, dtype=np.float64)] * dim
            grids = np.meshgrid(*axes, indexing="ij")
            terms = np.ones(grids[0].shape)
            coupling = np.zeros(grids[0].shape)
            for g, aj in zip(grids, a_exp):
                terms = terms * g**aj
                coupling = coupling + g + 1.0
            terms = terms * coupling**b_exp
            coord = np.maximum.reduce(grids)
            edges = [2**i for i in range(2, int(math.log2(truncation)) + 1)]
            if edges[-1] != truncation:
                edges.append(truncation)
    partial = float(np.sum(terms))
    if not math.isfinite(partial):
        return ConditionReport(converges=False, partial_sum=partial, tail_estimate=math.inf, last_ratio=math.inf)
    bands = _band_sums(terms, coord, edges)
    if bands[-1] == 0.0:
        return ConditionReport(converges=True, partial_sum=partial, tail_estimate=0.0, last_ratio=0.0)
    ratios = [
        bands[i + 1] / bands[i] for i in range(len(bands) - 1) if bands[i] > 0.0
    ]
    if len(ratios) < 2:
        raise Inconclusive(f"too few usable bands at truncation {truncation}")
    # ratios of regularly varying band sums approach their geometric limit
    # monotonically near the end; take the recent max and guard against a
    # still-drifting sequence rather than demanding one-sided convergence.
    # Downward drift only tightens the bound, so only upward drift blocks
    # the certificate.
    q = max(ratios[-3:])
    drift = ratios[-1] - ratios[-2]
    rise = max(drift, 0.0)
    if q >= 1.0:
        return ConditionReport(converges=False, partial_sum=partial, tail_estimate=math.inf, last_ratio=q)
    q_safe = min(q + rise, 0.999)
    if q <= 1.0 - margin and rise <= margin / 2 and q_safe <= 1.0 - margin / 2:
        tail = bands[-1] * q_safe / (1.0 - q_safe)
        return ConditionReport(converges=True, partial_sum=partial, tail_estimate=tail, last_ratio=q)
    raise Inconclusive(
        f"band ratios near {q:.4f} (drift {drift:+.4f}) cannot certify either way "
        f"against margin {margin} at truncation {truncation}; try a larger truncation"
    )
