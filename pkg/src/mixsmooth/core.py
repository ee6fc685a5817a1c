"""Trigonometric polynomials on the m-torus and shared parameter bundles.

Functions are finite Fourier sums f(y) = sum_k a_k exp(i <k, y>) with
frequency vectors k in the box prod_j [-n_j, n_j].  Throughout the package
the torus is parameterized by the unit cube: samples are taken at
y = 2*pi*x with x on the uniform grid {i/N}, so the sampling measure has
total mass one and discrete p-norms carry no 2*pi factors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "InvalidParams",
    "GridTooCoarse",
    "LorentzParams",
    "SmoothParams",
    "TrigPoly",
    "validate_params",
    "evaluate_on_grid",
    "evaluate_coeff_batch",
    "default_grid_shape",
    "cosine",
    "tensor",
]

# Degrees above this bound are rejected unless explicitly allowed; grid work
# grows like prod(2 n_j + 1) * log and silently huge inputs are usually bugs.
DEGREE_GUARD = 128

# Relative bound on the imaginary residue of samples of a real polynomial.
REAL_RESIDUE = 1e-10


class InvalidParams(ValueError):
    """Raised when a parameter bundle violates its admissible range."""


class GridTooCoarse(ValueError):
    """Raised when a sampling grid cannot resolve the polynomial (aliasing)."""


def _as_int_tuple(value, dim: int, name: str) -> tuple[int, ...]:
    if np.isscalar(value):
        value = (value,) * dim
    out = tuple(int(v) for v in value)
    if len(out) != dim:
        raise InvalidParams(f"{name} must have one entry per axis, got {out}")
    return out


def _as_float_tuple(value, dim: int, name: str) -> tuple[float, ...]:
    if np.isscalar(value):
        value = (value,) * dim
    out = tuple(float(v) for v in value)
    if len(out) != dim:
        raise InvalidParams(f"{name} must have one entry per axis, got {out}")
    return out


@dataclass(frozen=True)
class LorentzParams:
    """Exponent pair (p, tau) of the Lorentz norm, 1 < p < inf, 1 <= tau < inf."""

    p: float
    tau: float

    def __post_init__(self):
        if not (1.0 < self.p < math.inf):
            raise InvalidParams(f"p must lie in (1, inf), got {self.p}")
        if not (1.0 <= self.tau < math.inf):
            raise InvalidParams(f"tau must lie in [1, inf), got {self.tau}")


@dataclass(frozen=True)
class SmoothParams:
    """Smoothness bundle: summation exponent theta, weight exponents b, orders k.

    theta is an extended real in (0, inf] (math.inf selects the sup form of
    every theta-sum).  b has one real entry per axis with b_j > -1/theta
    (b_j > 0 when theta is inf).  k has one integer entry per axis, k_j >= 1;
    it is the order of the axis-j difference.
    """

    theta: float
    b: tuple[float, ...]
    k: tuple[int, ...]

    def __init__(self, theta: float, b, k=1):
        object.__setattr__(self, "theta", float(theta))
        dim = 1 if np.isscalar(b) else len(tuple(b))
        object.__setattr__(self, "b", _as_float_tuple(b, dim, "b"))
        object.__setattr__(self, "k", _as_int_tuple(k, dim, "k"))
        self._validate()

    def _validate(self):
        if not (0.0 < self.theta):
            raise InvalidParams(f"theta must lie in (0, inf], got {self.theta}")
        floor = 0.0 if math.isinf(self.theta) else -1.0 / self.theta
        for j, bj in enumerate(self.b):
            if not (bj > floor):
                raise InvalidParams(
                    f"b[{j}] = {bj} violates b > {floor} required by theta = {self.theta}"
                )
        for j, kj in enumerate(self.k):
            if kj < 1:
                raise InvalidParams(f"k[{j}] must be a positive integer, got {kj}")

    @property
    def dim(self) -> int:
        return len(self.b)


def validate_params(lp: LorentzParams, sp: SmoothParams, dim: int) -> None:
    """Check that a (LorentzParams, SmoothParams) pair is admissible for dim axes."""
    if not isinstance(lp, LorentzParams):
        raise InvalidParams("lp must be a LorentzParams")
    if not isinstance(sp, SmoothParams):
        raise InvalidParams("sp must be a SmoothParams")
    if sp.dim != dim:
        raise InvalidParams(f"smoothness bundle has {sp.dim} axes, function has {dim}")


class TrigPoly:
    """Immutable trigonometric polynomial on the m-torus.

    Parameters
    ----------
    dim : int
        Number of axes m >= 1.
    degree : int or sequence of int
        Declared per-axis degree box n_j >= 0; coefficients live on
        prod_j [-n_j, n_j].
    coeffs : ndarray, complex, shape (2 n_1 + 1, ..., 2 n_m + 1)
        Coefficient tensor, axis j indexed by k_j + n_j.
    real : bool, optional
        Declare the polynomial real-valued.  Hermitian symmetry
        a_{-k} == conj(a_k) is verified at construction.  Default: detect.
    allow_large : bool, optional
        Accept degrees above the performance guard (128 per axis).
    """

    __slots__ = ("dim", "degree", "coeffs", "real")

    def __init__(self, dim, degree, coeffs, real=None, allow_large=False):
        dim = int(dim)
        if dim < 1:
            raise InvalidParams(f"dim must be >= 1, got {dim}")
        degree = _as_int_tuple(degree, dim, "degree")
        for n in degree:
            if n < 0:
                raise InvalidParams(f"degree entries must be >= 0, got {degree}")
            if n > DEGREE_GUARD and not allow_large:
                raise InvalidParams(
                    f"degree {n} exceeds the guard {DEGREE_GUARD}; "
                    "pass allow_large=True to override"
                )
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        want = tuple(2 * n + 1 for n in degree)
        if coeffs.shape != want:
            raise InvalidParams(f"coeffs shape {coeffs.shape} != {want} for degree {degree}")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        if real is None:
            real = _is_hermitian(coeffs)
        elif real and not _is_hermitian(coeffs):
            raise InvalidParams("real=True but coefficients are not Hermitian-symmetric")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "real", bool(real))

    def __setattr__(self, name, value):
        raise AttributeError("TrigPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int, degree=0) -> "TrigPoly":
        degree = _as_int_tuple(degree, dim, "degree")
        shape = tuple(2 * n + 1 for n in degree)
        return cls(dim, degree, np.zeros(shape, dtype=np.complex128), real=True)

    @classmethod
    def from_entries(
        cls, dim: int, degree, entries: Iterable, real=None, allow_large=False
    ) -> "TrigPoly":
        """Build from an iterable of (k, value) or (k, re, im) entries."""
        degree = _as_int_tuple(degree, dim, "degree")
        shape = tuple(2 * n + 1 for n in degree)
        coeffs = np.zeros(shape, dtype=np.complex128)
        for entry in entries:
            if len(entry) == 2:
                k, value = entry
                value = complex(value)
            else:
                k, re, im = entry
                value = complex(float(re), float(im))
            idx = tuple(int(kj) + n for kj, n in zip(k, degree))
            for kj, n in zip(k, degree):
                if abs(int(kj)) > n:
                    raise InvalidParams(f"frequency {tuple(k)} outside degree box {degree}")
            coeffs[idx] = value
        return cls(dim, degree, coeffs, real=real, allow_large=allow_large)

    # -- basic queries -----------------------------------------------------

    def freqs(self, axis: int) -> np.ndarray:
        """Frequency values along one axis, -n_j .. n_j."""
        n = self.degree[axis]
        return np.arange(-n, n + 1)

    def coeff(self, k: Sequence[int]) -> complex:
        idx = tuple(int(kj) + n for kj, n in zip(k, self.degree))
        return complex(self.coeffs[idx])

    def nonzero_entries(self) -> Iterator[tuple[tuple[int, ...], complex]]:
        """Yield (k, a_k) over nonzero coefficients in lexicographic k order."""
        it = np.ndindex(self.coeffs.shape)
        for idx in it:
            value = self.coeffs[idx]
            if value != 0:
                k = tuple(i - n for i, n in zip(idx, self.degree))
                yield k, complex(value)

    def tight_degree(self) -> tuple[int, ...]:
        """Smallest degree box containing every nonzero coefficient."""
        nz = np.nonzero(self.coeffs)
        out = []
        for axis, n in enumerate(self.degree):
            if nz[0].size == 0:
                out.append(0)
            else:
                out.append(int(np.max(np.abs(nz[axis] - n))))
        return tuple(out)

    def is_ring_member(self) -> bool:
        """True when every axis-mean vanishes: a_k == 0 whenever some k_j == 0.

        For a Fourier sum, integrating out the j-th variable keeps exactly the
        coefficients with k_j == 0, so the zero-mean ring condition is a
        statement about coordinate hyperplanes of the spectrum.
        """
        for axis, n in enumerate(self.degree):
            plane = np.take(self.coeffs, n, axis=axis)
            if np.any(plane != 0):
                return False
        return True

    def ring_violation_axes(self) -> list[int]:
        """Axes (0-based) whose mean over the corresponding variable is nonzero."""
        bad = []
        for axis, n in enumerate(self.degree):
            plane = np.take(self.coeffs, n, axis=axis)
            if np.any(plane != 0):
                bad.append(axis)
        return bad

    # -- arithmetic --------------------------------------------------------

    def _with_coeffs(self, coeffs, real=None) -> "TrigPoly":
        return TrigPoly(self.dim, self.degree, coeffs, real=real, allow_large=True)

    def apply_multiplier(self, mult: np.ndarray, real=None) -> "TrigPoly":
        """Multiply the coefficient tensor elementwise (same degree box)."""
        return self._with_coeffs(self.coeffs * mult, real=real)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            return NotImplemented
        if other.dim != self.dim:
            raise InvalidParams("cannot add polynomials of different dim")
        degree = tuple(max(a, b) for a, b in zip(self.degree, other.degree))
        shape = tuple(2 * n + 1 for n in degree)
        coeffs = np.zeros(shape, dtype=np.complex128)
        _embed(coeffs, self.coeffs, self.degree, degree)
        _embed_add(coeffs, other.coeffs, other.degree, degree)
        return TrigPoly(self.dim, degree, coeffs, allow_large=True)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self.__add__((-1.0) * other)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return self._with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self._with_coeffs(-self.coeffs)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        entries = [
            [list(k), value.real, value.imag] for k, value in self.nonzero_entries()
        ]
        return {"dim": self.dim, "degree": list(self.degree), "entries": entries}

    @classmethod
    def from_json_dict(cls, data: dict, allow_large=False) -> "TrigPoly":
        try:
            dim = int(data["dim"])
            degree = data["degree"]
            entries = data["entries"]
        except (KeyError, TypeError) as exc:
            raise InvalidParams(f"malformed polynomial document: {exc}") from exc
        return cls.from_entries(dim, degree, entries, allow_large=allow_large)

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str, allow_large=False) -> "TrigPoly":
        return cls.from_json_dict(json.loads(text), allow_large=allow_large)

    def __repr__(self):
        nnz = int(np.count_nonzero(self.coeffs))
        return f"TrigPoly(dim={self.dim}, degree={self.degree}, nnz={nnz}, real={self.real})"


def _is_hermitian(coeffs: np.ndarray) -> bool:
    flipped = coeffs[tuple(slice(None, None, -1) for _ in range(coeffs.ndim))]
    return bool(np.array_equal(coeffs, np.conj(flipped)))


def _embed(target: np.ndarray, source: np.ndarray, sdeg, tdeg) -> None:
    sl = tuple(slice(t - s, t + s + 1) for s, t in zip(sdeg, tdeg))
    target[sl] = source


def _embed_add(target: np.ndarray, source: np.ndarray, sdeg, tdeg) -> None:
    sl = tuple(slice(t - s, t + s + 1) for s, t in zip(sdeg, tdeg))
    target[sl] += source


def cosine(freq: int, amplitude: float = 1.0) -> TrigPoly:
    """One-axis polynomial amplitude * cos(freq * y).

    freq = 0 gives the constant (not a zero-mean ring member; useful for
    negative tests of the mean-zero validation).
    """
    freq = int(freq)
    if freq < 0:
        raise InvalidParams("freq must be >= 0")
    half = amplitude / 2.0
    if freq == 0:
        return TrigPoly.from_entries(1, 0, [((0,), amplitude)], real=True)
    return TrigPoly.from_entries(
        1, freq, [((-freq,), half), ((freq,), half)], real=True, allow_large=freq > DEGREE_GUARD
    )


def tensor(*factors: TrigPoly) -> TrigPoly:
    """Tensor product of one-axis (or lower-dim) polynomials: f(x) = prod f_i(x_i)."""
    if not factors:
        raise InvalidParams("tensor needs at least one factor")
    dim = sum(f.dim for f in factors)
    degree = tuple(n for f in factors for n in f.degree)
    coeffs = factors[0].coeffs
    for f in factors[1:]:
        # broadcasting ufunc multiply, not tensordot: BLAS complex products
        # are Hermitian only to rounding, which would break the exact
        # symmetry check for real factors
        coeffs = coeffs[(...,) + (None,) * f.coeffs.ndim] * f.coeffs
    real = all(f.real for f in factors)
    return TrigPoly(dim, degree, coeffs, real=real if real else None, allow_large=True)


def default_grid_shape(dim: int, degree) -> tuple[int, ...]:
    """Default sampling resolution per axis.

    1024 points for one axis, 256 for two, 64 for three or more; bumped to
    the next power of two whenever the alias-free bound 2 n_j + 1 demands it.
    """
    degree = _as_int_tuple(degree, dim, "degree")
    base = {1: 1024, 2: 256}.get(dim, 64)
    out = []
    for n in degree:
        need = 2 * n + 1
        size = base
        while size < need:
            size *= 2
        out.append(size)
    return tuple(out)


def evaluate_on_grid(f: TrigPoly, shape=None) -> np.ndarray:
    """Sample f(2*pi*x) on the uniform grid x in prod_j {0, 1/N_j, ..., (N_j-1)/N_j}.

    Uses the inverse FFT of the coefficient tensor scattered to wrapped bins.
    Requires N_j >= 2 n_j + 1 on every axis (raises GridTooCoarse otherwise);
    at that resolution the embedding is alias-free and the samples are exact
    up to roundoff.  Real polynomials return float64 samples after checking
    that the imaginary residue is below 1e-10 times the coefficient scale.
    """
    if shape is None:
        shape = default_grid_shape(f.dim, f.degree)
    shape = _as_int_tuple(shape, f.dim, "shape")
    for N, n in zip(shape, f.degree):
        if N < 2 * n + 1:
            raise GridTooCoarse(
                f"grid {shape} cannot resolve degree {f.degree}: need N_j >= 2*n_j+1"
            )
    values = _ifft_box(f.coeffs, f.degree, shape)
    if f.real:
        scale = float(np.max(np.abs(f.coeffs))) or 1.0
        residue = float(np.max(np.abs(values.imag)))
        if residue > REAL_RESIDUE * scale * np.prod([2 * n + 1 for n in f.degree]):
            raise ArithmeticError(
                f"imaginary residue {residue:.3e} too large for a real polynomial"
            )
        return values.real.copy()
    return values


def _ifft_box(coeffs: np.ndarray, degree, shape) -> np.ndarray:
    spread = np.zeros(shape, dtype=np.complex128)
    wrap = tuple(np.arange(-n, n + 1) % N for n, N in zip(degree, shape))
    spread[np.ix_(*wrap)] = coeffs
    return np.fft.ifftn(spread) * float(np.prod(shape))


def evaluate_coeff_batch(degree, coeff_batch: np.ndarray, shape) -> np.ndarray:
    """Sample a stack of coefficient tensors; returns magnitudes, shape (B, prod N).

    coeff_batch has shape (B, 2 n_1 + 1, ..., 2 n_m + 1).  Each row is
    scattered to wrapped FFT bins and inverted in one batched transform, the
    workhorse behind difference-lattice sweeps and per-block evaluations.
    """
    degree = tuple(int(n) for n in degree)
    shape = tuple(int(N) for N in shape)
    for N, n in zip(shape, degree):
        if N < 2 * n + 1:
            raise GridTooCoarse(
                f"grid {shape} cannot resolve degree {degree}: need N_j >= 2*n_j+1"
            )
    batch = coeff_batch.shape[0]
    spread = np.zeros((batch,) + shape, dtype=np.complex128)
    wrap = tuple(np.arange(-n, n + 1) % N for n, N in zip(degree, shape))
    spread[(slice(None),) + np.ix_(*wrap)] = coeff_batch
    axes = tuple(range(1, len(shape) + 1))
    values = np.fft.ifftn(spread, axes=axes) * float(np.prod(shape))
    return np.abs(values).reshape(batch, -1)
