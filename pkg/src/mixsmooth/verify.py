"""Ratio-verification harness: seeded corpus, registered checks, reports.

Every named check compares a left-hand quantity against a right-hand bound or
equivalent over a deterministic corpus and reports the per-function ratios.
Two-sided equivalences should show ratios trapped in a stable window; one
sided bounds should show a finite corpus max that does not blow up when the
corpus degrees double.  Windows are configuration loaded from a frozen
reference run, not constants in code; the doubling probe guards against
windows that only look stable at one scale.

Ratio bookkeeping: 0/0 entries are excluded from the statistics and counted,
and any nonzero/zero entry fails the check outright.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .approx import direct_approximant
from .core import (
    InvalidParams,
    LorentzParams,
    SmoothParams,
    TrigPoly,
    cosine,
    tensor,
    validate_params,
)
from .lorentz import lorentz_norm, poly_norm
from .seqnorms import (
    EmbeddingExponents,
    Inconclusive,
    UncoveredParams,
    embedding_exponents,
    seq_norm_B,
    theorem1_rhs,
    theorem2_rhs,
    theorem3_norm,
    theorem5_condition,
)
from .smoothness import (
    ModulusGrid,
    derivative,
    difference_norms,
    log_modulus_seminorm,
    mixed_modulus,
    modulus_grid,
)
from .spectral import angle_residual_norms, block_norms, tail_square_norms

__all__ = [
    "UnknownCheck",
    "CHECK_NAMES",
    "CorpusFunction",
    "Corpus",
    "VerifyConfig",
    "RatioRow",
    "RatioReport",
    "generate_corpus",
    "lacunary",
    "random_decay_poly",
    "run_check",
    "check_sided",
    "Workspace",
    "load_golden_windows",
    "default_threads",
    "parallel_map",
]

CHECK_NAMES = (
    "lemma1_monotone",
    "lemma1_subadd",
    "lemma1_deriv",
    "lemma2_bernstein",
    "lemma3_sandwich",
    "lemma4_direct",
    "lemma5_inverse",
    "rel_2_2_weight",
    "thm1",
    "thm2",
    "thm3",
    "thm4_lower",
    "thm4_upper",
    "thm5_1",
    "thm5_23",
    "lp_equivalence",
)


class UnknownCheck(ValueError):
    """Raised for a check name outside the registry."""


def default_threads() -> int:
    env = os.environ.get("MIXSMOOTH_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def parallel_map(fn, items, threads: int = 1) -> list:
    """Map preserving input order; thread pool only when threads > 1.

    Reduction order is by input index regardless of completion order, so
    reports do not depend on the thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# corpus


@dataclass(frozen=True)
class CorpusFunction:
    fid: str
    family: str
    poly: TrigPoly


@dataclass(frozen=True)
class Corpus:
    seed: int
    dim: int
    max_degree: int
    functions: tuple[CorpusFunction, ...]

    def __iter__(self):
        return iter(self.functions)

    def __len__(self):
        return len(self.functions)


def lacunary(rho: float, smax: int) -> TrigPoly:
    """Lacunary cosine sum: sum_{s=0}^{smax} 2^(-rho s) cos(2^s y)."""
    if smax < 0:
        raise InvalidParams(f"smax must be >= 0, got {smax}")
    total = cosine(1, amplitude=1.0)
    for s in range(1, smax + 1):
        total = total + cosine(2**s, amplitude=2.0 ** (-rho * s))
    return total


def random_decay_poly(rng: np.random.Generator, dim: int, max_degree: int, decay: float) -> TrigPoly:
    """Random real polynomial, zero axis means, |a_k| ~ prod |k_j|^(-decay)."""
    n = int(max_degree)
    if dim == 1:
        coeffs = np.zeros(2 * n + 1, dtype=np.complex128)
        for k in range(1, n + 1):
            z = (rng.standard_normal() + 1j * rng.standard_normal()) * k ** (-decay)
            coeffs[n + k] = z
            coeffs[n - k] = np.conj(z)
        return TrigPoly(1, n, coeffs, real=True, allow_large=True)
    if dim == 2:
        coeffs = np.zeros((2 * n + 1, 2 * n + 1), dtype=np.complex128)
        for k1 in range(1, n + 1):
            for k2 in range(1, n + 1):
                w = (k1 * k2) ** (-decay)
                z1 = (rng.standard_normal() + 1j * rng.standard_normal()) * w
                z2 = (rng.standard_normal() + 1j * rng.standard_normal()) * w
                coeffs[n + k1, n + k2] = z1
                coeffs[n - k1, n - k2] = np.conj(z1)
                coeffs[n + k1, n - k2] = z2
                coeffs[n - k1, n + k2] = np.conj(z2)
        return TrigPoly(2, (n, n), coeffs, real=True, allow_large=True)
    # dim >= 3: tensor a fresh 1-d draw per axis (keeps the spectrum a full box)
    parts = [random_decay_poly(rng, 1, max_degree, decay) for _ in range(dim)]
    return tensor(*parts)


def _random_block_frequency(rng: np.random.Generator, s: int, max_degree: int) -> int:
    lo = 2 ** (s - 1)
    hi = min(2**s - 1, max_degree)
    return int(rng.integers(lo, hi + 1))


def generate_corpus(seed: int, dim: int, max_degree: int, families=None) -> Corpus:
    """Deterministic reference corpus of zero-mean ring members.

    Families: "single_block" (one random frequency per dyadic block, tensored
    across axes), "lacunary" (geometric block profiles at rho = 0.5, 1, 2),
    "random_decay" (dense random spectra at two decay rates), and for dim >= 2
    "tensor" (products of distinct one-axis members).  The same seed always
    yields the same corpus, entry by entry.
    """
    if max_degree < 2:
        raise InvalidParams(f"max_degree must be >= 2, got {max_degree}")
    if families is None:
        families = ("single_block", "lacunary", "random_decay") + (
            ("tensor",) if dim >= 2 else ()
        )
    rng = np.random.default_rng(seed)
    functions: list[CorpusFunction] = []
    smax = int(max_degree).bit_length()  # block index of max_degree

    def add(family, poly):
        fid = f"{family}/{sum(1 for g in functions if g.family == family)}"
        if not poly.is_ring_member():
            raise InvalidParams(f"corpus member {fid} is not a zero-mean ring member")
        functions.append(CorpusFunction(fid=fid, family=family, poly=poly))

    for family in families:
        if family == "single_block":
            if dim == 1:
                for s in range(1, smax + 1):
                    add(family, cosine(_random_block_frequency(rng, s, max_degree)))
            else:
                picks = [(1,) * dim, (min(2, smax),) * dim, (smax,) * dim]
                picks += [(1,) + (smax,) * (dim - 1), (smax,) + (1,) * (dim - 1)]
                seen = set()
                for s_vec in picks:
                    if s_vec in seen:
                        continue
                    seen.add(s_vec)
                    parts = [
                        cosine(_random_block_frequency(rng, s, max_degree)) for s in s_vec
                    ]
                    add(family, tensor(*parts))
        elif family == "lacunary":
            top = max_degree.bit_length() - 1  # largest s with 2^s <= max_degree
            for rho in (0.5, 1.0, 2.0):
                one = lacunary(rho, top)
                add(family, one if dim == 1 else tensor(*[one] * dim))
        elif family == "random_decay":
            for decay in (0.5, 1.5):
                add(family, random_decay_poly(rng, dim, max_degree, decay))
        elif family == "tensor":
            if dim < 2:
                raise InvalidParams("tensor family needs dim >= 2")
            a = random_decay_poly(rng, 1, max_degree, 1.0)
            b = lacunary(1.0, max_degree.bit_length() - 1)
            c = cosine(_random_block_frequency(rng, min(2, smax), max_degree))
            add(family, tensor(a, *([b] * (dim - 1))))
            add(family, tensor(c, *([a] * (dim - 1))))
        else:
            raise InvalidParams(f"unknown corpus family {family!r}")
    return Corpus(seed=int(seed), dim=int(dim), max_degree=int(max_degree), functions=tuple(functions))


# ---------------------------------------------------------------------------
# configuration and reports


@dataclass(frozen=True)
class VerifyConfig:
    """Harness knobs; defaults match the frozen reference run."""

    h_grid: int = 9
    stability: bool = True
    stability_factor: float = 2.0
    threads: int = 1
    windows: dict | None = None
    thm5_truncation: int | None = None
    subadd_tolerance: float = 1e-9

    def window_for(self, check: str, dim: int):
        if not self.windows:
            return None
        entry = self.windows.get(check)
        if entry is None:
            return None
        got = entry.get(str(dim))
        return tuple(got) if got is not None else None


def load_golden_windows() -> dict:
    """Frozen ratio windows from the reference run (packaged JSON)."""
    ref = resources.files("mixsmooth").joinpath("data/golden_windows.json")
    with ref.open("r", encoding="utf-8") as fh:
        return json.load(fh)["windows"]


@dataclass(frozen=True)
class RatioRow:
    fid: str
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float | None:
        if self.rhs == 0.0:
            return None
        return self.lhs / self.rhs


def _row_stats(rows) -> tuple[dict | None, int, list[str]]:
    ratios = []
    zero_zero = 0
    failures = []
    for row in rows:
        if row.rhs == 0.0:
            if row.lhs == 0.0:
                zero_zero += 1
            else:
                failures.append(f"{row.fid}: nonzero lhs {row.lhs!r} over zero rhs")
        else:
            ratios.append(row.lhs / row.rhs)
    if not ratios:
        return None, zero_zero, failures
    stats = {
        "count": len(ratios),
        "min": float(np.min(ratios)),
        "median": float(np.median(ratios)),
        "max": float(np.max(ratios)),
    }
    return stats, zero_zero, failures


@dataclass(frozen=True)
class RatioReport:
    check: str
    dim: int
    max_degree: int
    seed: int
    params: dict
    rows: tuple[RatioRow, ...]
    stats: dict | None
    zero_zero: int
    failures: tuple[str, ...]
    stability: dict | None
    window: tuple[float, float] | None
    verdict: str
    notes: str = ""
    aux: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "check": self.check,
            "dim": self.dim,
            "max_degree": self.max_degree,
            "seed": self.seed,
            "params": self.params,
            "rows": [
                {"fid": r.fid, "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio}
                for r in self.rows
            ],
            "stats": self.stats,
            "zero_zero": self.zero_zero,
            "failures": list(self.failures),
            "stability": self.stability,
            "window": list(self.window) if self.window else None,
            "verdict": self.verdict,
            "notes": self.notes,
            "aux": self.aux,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check", "dim", "fid", "lhs", "rhs", "ratio"])
        for r in self.rows:
            ratio = "" if r.ratio is None else repr(r.ratio)
            writer.writerow([self.check, self.dim, r.fid, repr(r.lhs), repr(r.rhs), ratio])
        return buf.getvalue()

    def summary_line(self) -> str:
        if self.stats:
            span = f"ratios [{self.stats['min']:.4g}, {self.stats['max']:.4g}] n={self.stats['count']}"
        else:
            span = "no ratios"
        extra = f" zero/zero={self.zero_zero}" if self.zero_zero else ""
        growth = ""
        if self.stability and self.stability.get("spread_growth") is not None:
            growth = f" doubling-growth={self.stability['spread_growth']:.3f}"
        note = f" ({self.notes})" if self.notes else ""
        return f"{self.check}: {self.verdict} {span}{extra}{growth}{note}"


# ---------------------------------------------------------------------------
# workspace: per-corpus caches so each quantity is computed once


def _pow2_shape(f: TrigPoly) -> tuple[int, ...]:
    """Smallest power-of-two alias-free grid for f (at least 16 per axis)."""
    out = []
    for n in f.degree:
        size = 16
        while size < 2 * n + 1:
            size *= 2
        out.append(size)
    return tuple(out)


class Workspace:
    """Caches per-function quantities of one corpus instance.

    All cache keys carry the defining parameters, so one workspace serves
    every (p, tau, theta, b) combination of a run without recomputation.
    """

    def __init__(self, corpus: Corpus, config: VerifyConfig):
        self.corpus = corpus
        self.config = config
        self._cache: dict[tuple, object] = {}
        self._polys = {cf.fid: cf.poly for cf in corpus}

    def poly(self, fid: str) -> TrigPoly:
        return self._polys[fid]

    def shape(self, fid: str) -> tuple[int, ...]:
        key = ("shape", fid)
        return self._get(key, lambda: _pow2_shape(self.poly(fid)))

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    @staticmethod
    def _lp_key(lp: LorentzParams):
        return (lp.p, lp.tau)

    @staticmethod
    def _sp_key(sp: SmoothParams):
        return (sp.theta, sp.b, sp.k)

    def norm(self, fid: str, lp: LorentzParams) -> float:
        key = ("norm", fid, self._lp_key(lp))
        return self._get(key, lambda: poly_norm(self.poly(fid), lp, self.shape(fid)))

    def deriv_norm(self, fid: str, lp: LorentzParams, alpha: tuple[int, ...]) -> float:
        key = ("deriv", fid, self._lp_key(lp), tuple(alpha))
        return self._get(
            key, lambda: poly_norm(derivative(self.poly(fid), alpha), lp, self.shape(fid))
        )

    def block_norms(self, fid: str, lp: LorentzParams) -> dict:
        key = ("blocks", fid, self._lp_key(lp))
        return self._get(key, lambda: block_norms(self.poly(fid), lp, self.shape(fid)))

    def tails(self, fid: str, lp: LorentzParams) -> np.ndarray:
        key = ("tails", fid, self._lp_key(lp))
        return self._get(key, lambda: tail_square_norms(self.poly(fid), lp, self.shape(fid)))

    def y_at(self, fid: str, lp: LorentzParams, cutoff: tuple) -> float:
        cutoff = tuple(float(c) for c in cutoff)
        key = ("y", fid, self._lp_key(lp), cutoff)

        def build():
            return float(
                angle_residual_norms(self.poly(fid), [cutoff], lp, self.shape(fid))[0]
            )

        return self._get(key, build)

    def kernel_residual(self, fid: str, lp: LorentzParams, l: tuple, k: tuple) -> float:
        key = ("kres", fid, self._lp_key(lp), tuple(l), tuple(k))

        def build():
            f = self.poly(fid)
            return lorentz_norm(f - direct_approximant(f, l, k), lp, self.shape(fid))

        return self._get(key, build)

    def mod_grid(self, fid: str, lp: LorentzParams, k: tuple) -> ModulusGrid:
        key = ("mgrid", fid, self._lp_key(lp), tuple(k))

        def build():
            f = self.poly(fid)
            box = tuple(max(int(n).bit_length() + 6, 8) for n in f.tight_degree())
            return modulus_grid(f, k, lp, box, h_grid=self.config.h_grid, shape=self.shape(fid))

        return self._get(key, build)

    def modulus(self, fid: str, lp: LorentzParams, k: tuple, t: tuple) -> float:
        t = tuple(float(v) for v in t)
        key = ("mod", fid, self._lp_key(lp), tuple(k), t)

        def build():
            return mixed_modulus(
                self.poly(fid), t, k, lp,
                h_grid=self.config.h_grid, shape=self.shape(fid), refine=False,
            )

        return self._get(key, build)

    def semi(self, fid: str, lp: LorentzParams, sp: SmoothParams):
        key = ("semi", fid, self._lp_key(lp), self._sp_key(sp))

        def build():
            return log_modulus_seminorm(
                self.poly(fid), sp, lp,
                h_grid=self.config.h_grid, shape=self.shape(fid),
                grid=self.mod_grid(fid, lp, sp.k),
            )

        return self._get(key, build)

    def bold(self, fid: str, lp: LorentzParams, sp: SmoothParams) -> float:
        return self.norm(fid, lp) + self.semi(fid, lp, sp).value

    def seq_norm(self, fid: str, lp: LorentzParams, sp: SmoothParams) -> float:
        key = ("seqB", fid, self._lp_key(lp), self._sp_key(sp))
        return self._get(
            key, lambda: seq_norm_B(self.poly(fid), lp, sp, shape=self.shape(fid))
        )

    def thm1_rhs(self, fid: str, lp: LorentzParams, sp: SmoothParams) -> float:
        key = ("t1rhs", fid, self._lp_key(lp), self._sp_key(sp))
        return self._get(
            key, lambda: theorem1_rhs(self.poly(fid), lp, sp, shape=self.shape(fid))
        )

    def thm2_rhs(self, fid: str, lp: LorentzParams, sp: SmoothParams) -> float:
        key = ("t2rhs", fid, self._lp_key(lp), self._sp_key(sp))
        return self._get(
            key, lambda: theorem2_rhs(self.poly(fid), lp, sp, shape=self.shape(fid))
        )

    def thm3(self, fid: str, lp: LorentzParams, sp: SmoothParams, side: str) -> float:
        key = ("t3", fid, self._lp_key(lp), self._sp_key(sp), side)
        return self._get(
            key, lambda: theorem3_norm(self.poly(fid), lp, sp, side, shape=self.shape(fid))
        )


# ---------------------------------------------------------------------------
# check bodies: each returns (rows, aux) and may raise UncoveredParams/Inconclusive


def _diag(t: float, dim: int) -> tuple[float, ...]:
    return (float(t),) * dim


def _dyadic_cutoff_levels(dim: int, max_degree: int) -> list[tuple[float, ...]]:
    out = []
    l = 1
    while l <= max_degree:
        out.append((float(l),) * dim)
        l = 2 * l + 1
    return out


def _check_lemma1_monotone(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    for cf in corpus:
        grid = ws.mod_grid(cf.fid, lp, sp.k)
        vals = grid.values
        best = None  # (ratio, finer, coarser) with the largest finer/coarser
        for axis in range(vals.ndim):
            finer = np.take(vals, range(1, vals.shape[axis]), axis=axis).ravel()
            coarser = np.take(vals, range(0, vals.shape[axis] - 1), axis=axis).ravel()
            ok = coarser > 0
            if not np.any(ok):
                continue
            r = finer[ok] / coarser[ok]
            i = int(np.argmax(r))
            if best is None or r[i] > best[0]:
                best = (float(r[i]), float(finer[ok][i]), float(coarser[ok][i]))
        if best is None:
            rows.append(RatioRow(cf.fid, 0.0, 0.0))
        else:
            rows.append(RatioRow(cf.fid, best[1], best[2]))
    return rows, {}


def _check_lemma1_subadd(corpus, lp, sp, cfg, ws: Workspace):
    # The inequality needs all three maxima taken over one common h-set, so
    # this check builds an explicit shared lattice instead of reusing the
    # degree-adapted lattices of mixed_modulus.
    rows = []
    members = list(corpus)
    for i, cf in enumerate(members):
        cg = members[(i + 1) % len(members)]
        if cg.fid == cf.fid:
            continue
        f, g = cf.poly, cg.poly
        if f.dim != g.dim:
            continue
        total = f + g
        for t in (0.75, 0.2):
            axes = [np.linspace(0.0, t, cfg.h_grid)] * f.dim
            h_list = np.stack(
                [a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=-1
            )
            lhs = float(
                np.max(difference_norms(total, h_list, sp.k, lp, _pow2_shape(total)))
            )
            rhs = float(
                np.max(difference_norms(f, h_list, sp.k, lp, _pow2_shape(f)))
            ) + float(np.max(difference_norms(g, h_list, sp.k, lp, _pow2_shape(g))))
            rows.append(RatioRow(f"{cf.fid}+{cg.fid}@t={t}", lhs, rhs))
    return rows, {}


def _check_lemma1_deriv(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    for cf in corpus:
        dnorm = ws.deriv_norm(cf.fid, lp, sp.k)
        for t in (0.5, 0.1, 0.02):
            tv = _diag(t, cf.poly.dim)
            lhs = ws.modulus(cf.fid, lp, sp.k, tv)
            rhs = float(np.prod([tj**kj for tj, kj in zip(tv, sp.k)])) * dnorm
            rows.append(RatioRow(f"{cf.fid}@t={t}", lhs, rhs))
    return rows, {}


def _check_lemma2_bernstein(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    for cf in corpus:
        n = cf.poly.tight_degree()
        lhs = ws.deriv_norm(cf.fid, lp, sp.k)
        rhs = float(np.prod([(nj + 1.0) ** kj for nj, kj in zip(n, sp.k)])) * ws.norm(
            cf.fid, lp
        )
        rows.append(RatioRow(cf.fid, lhs, rhs))
    return rows, {}


def _check_lemma3_sandwich(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    for cf in corpus:
        for l in _dyadic_cutoff_levels(cf.poly.dim, max(cf.poly.tight_degree())):
            lhs = ws.y_at(cf.fid, lp, l)
            rhs = ws.kernel_residual(cf.fid, lp, tuple(int(v) for v in l), sp.k)
            rows.append(RatioRow(f"{cf.fid}@l={int(l[0])}", lhs, rhs))
    return rows, {}


def _check_lemma4_direct(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    for cf in corpus:
        for l in _dyadic_cutoff_levels(cf.poly.dim, max(cf.poly.tight_degree())):
            lhs = ws.y_at(cf.fid, lp, l)
            t = tuple(1.0 / (v + 1.0) for v in l)
            rhs = ws.modulus(cf.fid, lp, sp.k, t)
            rows.append(RatioRow(f"{cf.fid}@l={int(l[0])}", lhs, rhs))
    return rows, {}


def _check_lemma5_inverse(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    for cf in corpus:
        dim = cf.poly.dim
        for n in (3, 7):
            if n > max(cf.poly.tight_degree()):
                continue
            lhs = ws.modulus(cf.fid, lp, sp.k, _diag(1.0 / (n + 1.0), dim))
            acc = 0.0
            for nu in np.ndindex(*([n + 1] * dim)):
                w = float(np.prod([(v + 1.0) ** (kj - 1.0) for v, kj in zip(nu, sp.k)]))
                acc += w * ws.y_at(cf.fid, lp, tuple(float(v) for v in nu))
            rhs = float(np.prod([float(n) ** (-kj) for kj in sp.k])) * acc
            rows.append(RatioRow(f"{cf.fid}@n={n}", lhs, rhs))
    return rows, {}


def _log_weight_integral(nu: int, beta: float) -> float:
    u_hi = 1.0 + nu * math.log(2.0)
    u_lo = 1.0 + (nu - 1.0) * math.log(2.0)
    if abs(beta + 1.0) < 1e-12:
        return math.log(u_hi / u_lo)
    return (u_hi ** (beta + 1.0) - u_lo ** (beta + 1.0)) / (beta + 1.0)


def _check_rel_2_2_weight(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    for nu in range(1, 21):
        for tb in (-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0):
            lhs = _log_weight_integral(nu, tb)
            rhs = float(nu) ** tb
            rows.append(RatioRow(f"nu={nu},tb={tb}", lhs, rhs))
    return rows, {}


def _check_thm1(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    semi_ratios = []
    for cf in corpus:
        bold = ws.bold(cf.fid, lp, sp)
        rhs_sum = ws.thm1_rhs(cf.fid, lp, sp)
        rows.append(RatioRow(cf.fid, bold, ws.norm(cf.fid, lp) + rhs_sum))
        if rhs_sum > 0:
            semi_ratios.append(ws.semi(cf.fid, lp, sp).value / rhs_sum)
    aux = {}
    if semi_ratios:
        aux["seminorm_only"] = {
            "min": float(np.min(semi_ratios)),
            "median": float(np.median(semi_ratios)),
            "max": float(np.max(semi_ratios)),
        }
    return rows, aux


def _check_thm2(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    for cf in corpus:
        rows.append(RatioRow(cf.fid, ws.bold(cf.fid, lp, sp), ws.thm2_rhs(cf.fid, lp, sp)))
    return rows, {}


def _check_thm3(corpus, lp, sp, cfg, ws: Workspace):
    # both displays carry the plain norm inside the brace; theorem3_norm
    # already includes it
    rows = []
    for cf in corpus:
        bold = ws.bold(cf.fid, lp, sp)
        rows.append(RatioRow(f"{cf.fid}/lower", ws.thm3(cf.fid, lp, sp, "lower"), bold))
        rows.append(RatioRow(f"{cf.fid}/upper", bold, ws.thm3(cf.fid, lp, sp, "upper")))
    return rows, {}


def _thm4_exponents(lp, sp) -> EmbeddingExponents:
    ee = embedding_exponents(lp, sp)
    if not ee.covered:
        raise UncoveredParams(ee.reason)
    return ee


def _check_thm4_lower(corpus, lp, sp, cfg, ws: Workspace):
    ee = _thm4_exponents(lp, sp)
    sp_u = SmoothParams(sp.theta, ee.u, sp.k)
    rows = []
    for cf in corpus:
        rows.append(RatioRow(cf.fid, ws.seq_norm(cf.fid, lp, sp_u), ws.bold(cf.fid, lp, sp)))
    return rows, {"u": list(ee.u), "gamma": ee.gamma}


def _check_thm4_upper(corpus, lp, sp, cfg, ws: Workspace):
    ee = _thm4_exponents(lp, sp)
    sp_v = SmoothParams(sp.theta, ee.v, sp.k)
    rows = []
    for cf in corpus:
        rows.append(RatioRow(cf.fid, ws.bold(cf.fid, lp, sp), ws.seq_norm(cf.fid, lp, sp_v)))
    return rows, {"v": list(ee.v), "beta": ee.beta}


def _check_thm5_1(corpus, lp, sp, cfg, ws: Workspace):
    tau2 = 1.0 + (lp.tau - 1.0) / 2.0
    if not tau2 < lp.tau:
        raise UncoveredParams(f"tau = {lp.tau} leaves no room for tau2 < tau")
    lp2 = LorentzParams(lp.p, tau2)
    sp2 = SmoothParams(sp.theta, tuple(bj + 0.5 for bj in sp.b), sp.k)
    rows = []
    for cf in corpus:
        rows.append(
            RatioRow(cf.fid, ws.seq_norm(cf.fid, lp, sp), ws.seq_norm(cf.fid, lp2, sp2))
        )
    return rows, {"tau2": tau2, "b2": list(sp2.b)}


def _thm5_23_params(lp, sp):
    theta1 = sp.theta if sp.theta > 1.5 else 1.5
    theta2 = 2.0 if math.isinf(theta1) else 0.75 * theta1
    tau1 = lp.tau
    tau2 = 1.0 + (tau1 - 1.0) / 2.0
    if not tau2 < tau1:
        raise UncoveredParams(f"tau = {tau1} leaves no room for tau2 < tau")
    if math.isinf(theta1):
        scale = theta2
    else:
        eta = theta1 / theta2
        scale = theta2 * eta / (eta - 1.0)
    b_gap = (1.0 / tau2 - 1.0 / tau1) * scale
    # Margin 1.4 in exponent units: the comparison-sum bands then decay like
    # 2^-0.4, fast enough to certify at the default truncations, while the
    # theta2 = 3/4 theta1 choice keeps b2 above its -1/theta2 floor for every
    # admissible b except those within ~0.23/theta1 of b's own floor.
    delta = (1.4 + b_gap) / scale
    b2 = tuple(bj - delta for bj in sp.b)
    floor2 = -1.0 / theta2
    if any(v <= floor2 for v in b2):
        raise UncoveredParams(
            f"shifted weights {b2} violate b > {floor2} required by theta2 = {theta2}"
        )
    return LorentzParams(lp.p, tau2), theta1, theta2, b2


def _check_thm5_23(corpus, lp, sp, cfg, ws: Workspace):
    lp2, theta1, theta2, b2 = _thm5_23_params(lp, sp)
    sp1 = SmoothParams(theta1, sp.b, sp.k)
    sp2 = SmoothParams(theta2, b2, sp.k)
    rows = []
    aux = {"theta1": theta1, "theta2": theta2, "tau2": lp2.tau, "b2": list(b2)}
    cond_seq = theorem5_condition(
        sp.b, b2, lp.tau, lp2.tau, theta1, theta2, truncation=cfg.thm5_truncation
    )
    aux["condition_sequence"] = {
        "converges": cond_seq.converges,
        "partial_sum": cond_seq.partial_sum,
        "last_ratio": cond_seq.last_ratio,
    }
    if not cond_seq.converges:
        raise UncoveredParams("sequence-form comparison sum diverges; embedding not claimed")
    for cf in corpus:
        rows.append(
            RatioRow(
                f"{cf.fid}/seq", ws.seq_norm(cf.fid, lp2, sp2), ws.seq_norm(cf.fid, lp, sp1)
            )
        )
    try:
        cond_dyad = theorem5_condition(
            sp.b, b2, lp.tau, lp2.tau, theta1, theta2,
            truncation=cfg.thm5_truncation, dyadic=True,
        )
        aux["condition_dyadic"] = {
            "converges": cond_dyad.converges,
            "partial_sum": cond_dyad.partial_sum,
            "last_ratio": cond_dyad.last_ratio,
        }
        dyad_ok = cond_dyad.converges
    except Inconclusive as exc:
        aux["condition_dyadic"] = {"inconclusive": str(exc)}
        dyad_ok = False
    hypo_ok = all(
        b1j + 1.0 / lp.tau > b2j + 1.0 / lp2.tau for b1j, b2j in zip(sp.b, b2)
    )
    if dyad_ok and hypo_ok:
        for cf in corpus:
            rows.append(
                RatioRow(
                    f"{cf.fid}/bold",
                    ws.bold(cf.fid, lp2, sp2),
                    ws.bold(cf.fid, lp, sp1),
                )
            )
    else:
        aux["bold_variant"] = "skipped (dyadic condition not certified)"
    return rows, aux


def _check_lp_equivalence(corpus, lp, sp, cfg, ws: Workspace):
    rows = []
    for cf in corpus:
        sig = ws.tails(cf.fid, lp)
        rows.append(RatioRow(cf.fid, float(sig[(0,) * cf.poly.dim]), ws.norm(cf.fid, lp)))
    return rows, {}


# name -> (body, corpus_based, sided); "upper" checks assert lhs <= C * rhs
# (their ratio minimum may legitimately sink toward zero as degrees grow, so
# the doubling probe tracks max growth), "both" checks assert an equivalence
# window (the probe tracks max/min spread growth).
_CHECK_BODIES = {
    "lemma1_monotone": (_check_lemma1_monotone, True, "upper"),
    "lemma1_subadd": (_check_lemma1_subadd, True, "upper"),
    "lemma1_deriv": (_check_lemma1_deriv, True, "upper"),
    "lemma2_bernstein": (_check_lemma2_bernstein, True, "upper"),
    "lemma3_sandwich": (_check_lemma3_sandwich, True, "upper"),
    "lemma4_direct": (_check_lemma4_direct, True, "upper"),
    "lemma5_inverse": (_check_lemma5_inverse, True, "upper"),
    "rel_2_2_weight": (_check_rel_2_2_weight, False, "both"),
    "thm1": (_check_thm1, True, "both"),
    "thm2": (_check_thm2, True, "both"),
    "thm3": (_check_thm3, True, "upper"),
    "thm4_lower": (_check_thm4_lower, True, "upper"),
    "thm4_upper": (_check_thm4_upper, True, "upper"),
    "thm5_1": (_check_thm5_1, True, "upper"),
    "thm5_23": (_check_thm5_23, True, "upper"),
    "lp_equivalence": (_check_lp_equivalence, True, "both"),
}


def check_sided(check: str) -> str:
    if check not in _CHECK_BODIES:
        raise UnknownCheck(f"{check!r} is not a registered check (see CHECK_NAMES)")
    return _CHECK_BODIES[check][2]


def _params_dict(lp: LorentzParams, sp: SmoothParams) -> dict:
    return {
        "p": lp.p,
        "tau": lp.tau,
        "theta": "inf" if math.isinf(sp.theta) else sp.theta,
        "b": list(sp.b),
        "k": list(sp.k),
    }


def _spread(stats: dict | None) -> float | None:
    if not stats:
        return None
    if stats["min"] <= 0.0:
        return None
    return stats["max"] / stats["min"]


def run_check(
    check: str,
    corpus: Corpus,
    lp: LorentzParams,
    sp: SmoothParams,
    config: VerifyConfig | None = None,
    workspace: Workspace | None = None,
    doubled_workspace: Workspace | None = None,
) -> RatioReport:
    """Run one registered check over the corpus and assemble its report.

    The stability probe reruns the same check on a corpus regenerated at twice
    max_degree (same seed and families) and compares the ratio spread; growth
    at or beyond the configured factor fails the verdict.  Checks whose
    hypotheses exclude the given parameters report verdict "skipped".
    """
    if check not in _CHECK_BODIES:
        raise UnknownCheck(f"{check!r} is not a registered check (see CHECK_NAMES)")
    config = config or VerifyConfig()
    if lp.tau <= 1.0:
        raise InvalidParams("the verification harness requires 1 < tau < inf")
    validate_params(lp, sp, corpus.dim)
    body, corpus_based, sided = _CHECK_BODIES[check]
    ws = workspace if workspace is not None else Workspace(corpus, config)
    common = {
        "check": check,
        "dim": corpus.dim,
        "max_degree": corpus.max_degree,
        "seed": corpus.seed,
        "params": _params_dict(lp, sp),
    }
    window = config.window_for(check, corpus.dim)
    try:
        rows, aux = body(corpus, lp, sp, config, ws)
    except (UncoveredParams, Inconclusive) as exc:
        return RatioReport(
            rows=(),
            stats=None,
            zero_zero=0,
            failures=(),
            stability=None,
            window=window,
            verdict="skipped",
            notes=f"{type(exc).__name__}: {exc}",
            **common,
        )
    stats, zero_zero, failures = _row_stats(rows)
    stability = None
    notes = []
    if corpus_based and config.stability:
        doubled = (
            doubled_workspace.corpus
            if doubled_workspace is not None
            else generate_corpus(corpus.seed, corpus.dim, corpus.max_degree * 2)
        )
        ws2 = doubled_workspace if doubled_workspace is not None else Workspace(doubled, config)
        try:
            rows2, _ = body(ws2.corpus, lp, sp, config, ws2)
            stats2, zz2, fail2 = _row_stats(rows2)
            growth = None
            if sided == "upper":
                if stats and stats2:
                    if stats["max"] > 0:
                        growth = stats2["max"] / stats["max"]
                    elif stats2["max"] > 0:
                        growth = math.inf
            else:
                s1, s2 = _spread(stats), _spread(stats2)
                if s1 is not None and s2 is not None:
                    growth = s2 / s1
                elif stats and stats2 and stats["max"] > 0:
                    growth = stats2["max"] / stats["max"]
            stability = {
                "max_degree": ws2.corpus.max_degree,
                "stats": stats2,
                "zero_zero": zz2,
                "spread_growth": growth,
            }
            failures = tuple(failures) + tuple(f"doubled: {m}" for m in fail2)
        except (UncoveredParams, Inconclusive) as exc:
            stability = {"skipped": f"{type(exc).__name__}: {exc}"}
    verdict = "pass"
    if failures:
        verdict = "fail"
        notes.append("nonzero/zero ratio present")
    elif stats is None:
        verdict = "skipped"
        notes.append("no ratio rows" if not rows else "all rows 0/0")
    if verdict != "skipped" and window and stats:
        if stats["min"] < window[0] or stats["max"] > window[1]:
            verdict = "fail"
            notes.append(
                f"ratios [{stats['min']:.6g}, {stats['max']:.6g}] escape window {list(window)}"
            )
    if (
        verdict != "skipped"
        and stability
        and stability.get("spread_growth") is not None
        and stability["spread_growth"] >= config.stability_factor
    ):
        verdict = "fail"
        notes.append(
            f"ratio spread grew {stability['spread_growth']:.3f}x under degree doubling"
        )
    return RatioReport(
        rows=tuple(rows),
        stats=stats,
        zero_zero=zero_zero,
        failures=tuple(failures),
        stability=stability,
        window=window,
        verdict=verdict,
        notes="; ".join(notes),
        aux=aux,
        **common,
    )
