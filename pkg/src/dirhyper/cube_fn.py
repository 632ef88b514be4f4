"""Real functions on {0,1}^d, p-biased measures, norms and the p-biased Fourier transform.

A function on the cube is a dense array of length ``2**d``; entry ``values[x]``
is the value at the point whose coordinate ``i`` is bit ``i`` of ``x``.  Subset
masks ``S`` use the same convention, so coefficient ``coeffs[S]`` multiplies
``chi_S``.

The array kernels (``*_array``) accept any leading batch shape and act on the
last axis; the ``CubeFunction``/``Spectrum`` wrappers are thin and validate.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, InvalidParameterError

MAX_EXACT_DIM = int(os.environ.get("DIRHYPER_MAX_DIM", "26"))


def check_dim(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or d < 0:
        raise InvalidParameterError(f"dimension must be a nonnegative integer, got {d!r}")
    if d > MAX_EXACT_DIM:
        raise CapacityError(
            f"exact operations are capped at d <= {MAX_EXACT_DIM} (got d={d}); "
            "use the sampling paths in dirhyper.instances"
        )
    return int(d)


def check_bias(p: float) -> float:
    """Validate a bias for basis/transform use: the open interval (0, 1)."""
    p = float(p)
    if not (0.0 < p < 1.0):
        raise InvalidParameterError(f"bias p must lie in (0, 1), got {p}")
    return p


def _dim_of_length(n: int) -> int:
    d = n.bit_length() - 1
    if n <= 0 or (1 << d) != n:
        raise InvalidParameterError(f"length {n} is not a power of two")
    return d


@lru_cache(maxsize=64)
def _weights_cached(d: int) -> np.ndarray:
    w = np.bitwise_count(np.arange(1 << d, dtype=np.uint64)).astype(np.int64)
    w.flags.writeable = False
    return w


def hamming_weights(d: int) -> np.ndarray:
    """Hamming weight of every mask in ``range(2**d)`` (read-only array)."""
    return _weights_cached(check_dim(d))


def hamming_weight(x: int) -> int:
    return int(x).bit_count()


def lower_half_mask(d: int) -> np.ndarray:
    """Boolean array marking L = {x : H(x) <= d/2} (ties included)."""
    return 2 * hamming_weights(d) <= d


def upper_half_mask(d: int) -> np.ndarray:
    """Boolean array marking U = {x : H(x) >= d/2} (ties included)."""
    return 2 * hamming_weights(d) >= d


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True, eq=False)
class CubeFunction:
    """A real-valued function on {0,1}^dim stored densely by point mask."""

    dim: int
    values: np.ndarray

    def __post_init__(self):
        check_dim(self.dim)
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.shape != (1 << self.dim,):
            raise InvalidParameterError(
                f"values must have shape ({1 << self.dim},), got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidParameterError("function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values) -> "CubeFunction":
        values = np.asarray(values, dtype=np.float64)
        return cls(_dim_of_length(values.shape[-1]), values)

    @classmethod
    def constant(cls, dim: int, c: float = 1.0) -> "CubeFunction":
        return cls(dim, np.full(1 << check_dim(dim), float(c)))

    @classmethod
    def indicator(cls, dim: int, points) -> "CubeFunction":
        """Indicator of a set of masks, or of a boolean array of length 2^dim."""
        check_dim(dim)
        points = np.asarray(points)
        if points.dtype == bool:
            return cls(dim, points.astype(np.float64))
        vals = np.zeros(1 << dim)
        vals[points.astype(np.int64)] = 1.0
        return cls(dim, vals)

    def __call__(self, x: int) -> float:
        return float(self.values[x])

    @property
    def size(self) -> int:
        return 1 << self.dim

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def is_indicator(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))

    def allclose(self, other: "CubeFunction", rtol=1e-10, atol=1e-12) -> bool:
        return self.dim == other.dim and np.allclose(self.values, other.values, rtol=rtol, atol=atol)


@dataclass(frozen=True)
class BiasedMeasure:
    """The product measure kappa_p putting mass p on bit value 1."""

    p: float

    def __post_init__(self):
        check_bias(self.p)

    @property
    def pbar(self) -> float:
        return min(self.p, 1.0 - self.p)

    def weight(self, x: int, d: int) -> float:
        return measure_weight(self.p, x, d)

    def weights(self, d: int) -> np.ndarray:
        return measure_weights(self.p, d)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients of a function in the ``bias``-biased basis, indexed by subset mask."""

    dim: int
    bias: float
    coeffs: np.ndarray

    def __post_init__(self):
        check_dim(self.dim)
        check_bias(self.bias)
        c = np.array(self.coeffs, dtype=np.float64, copy=True)
        if c.shape != (1 << self.dim,):
            raise InvalidParameterError(f"coeffs must have shape ({1 << self.dim},), got {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def energy(self) -> float:
        return float(np.dot(self.coeffs, self.coeffs))

    def level_weights(self) -> np.ndarray:
        """Sum of squared coefficients at each level |S| = 0..dim."""
        return np.bincount(hamming_weights(self.dim), weights=self.coeffs**2, minlength=self.dim + 1)


# --------------------------------------------------------------------------
# measures and norms


def measure_weight(p: float, x: int, d: int) -> float:
    """kappa_p(x) = p^H(x) (1-p)^(d-H(x))."""
    p = check_bias(p)
    if not 0 <= x < (1 << d):
        raise InvalidParameterError(f"mask {x} out of range for d={d}")
    h = hamming_weight(x)
    return p**h * (1.0 - p) ** (d - h)


def measure_weights(p: float, d: int) -> np.ndarray:
    """kappa_p over every mask of {0,1}^d."""
    p = check_bias(p)
    h = hamming_weights(d)
    # log-space keeps tiny weights accurate at large d
    return np.exp(h * math.log(p) + (d - h) * math.log1p(-p))


def expectation(f: CubeFunction, p: float) -> float:
    return float(measure_weights(p, f.dim) @ f.values)


def norm_array(values: np.ndarray, p: float, j: float) -> np.ndarray:
    """(sum_x kappa_p(x) |f(x)|^j)^(1/j) along the last axis."""
    j = float(j)
    if not j >= 1.0:
        raise InvalidParameterError(f"norm exponent must be >= 1, got {j}")
    values = np.asarray(values, dtype=np.float64)
    w = measure_weights(p, _dim_of_length(values.shape[-1]))
    return (np.abs(values) ** j @ w) ** (1.0 / j)


def norm(f: CubeFunction, p: float, j: float) -> float:
    return float(norm_array(f.values, p, j))


# --------------------------------------------------------------------------
# basis and transforms


def chi(p: float, S: int, x: int) -> float:
    """Biased parity character chi_S^p evaluated at the point x."""
    p = check_bias(p)
    zero_val = math.sqrt(p / (1.0 - p))
    one_val = -math.sqrt((1.0 - p) / p)
    ones = hamming_weight(S & x)
    zeros = hamming_weight(S & ~x)
    return zero_val**zeros * one_val**ones


def biased_fourier_array(values: np.ndarray, p: float) -> np.ndarray:
    """p-biased Fourier coefficients along the last axis, by per-coordinate butterfly.

    Coordinates are processed in order 0..d-1, so results are deterministic.
    """
    p = check_bias(p)
    out = np.array(values, dtype=np.float64, copy=True)
    n = out.shape[-1]
    d = _dim_of_length(n)
    lead = out.shape[:-1]
    s = math.sqrt(p * (1.0 - p))
    for i in range(d):
        v = out.reshape(*lead, n >> (i + 1), 2, 1 << i)
        f0 = v[..., 0, :].copy()
        f1 = v[..., 1, :]
        v[..., 0, :] = (1.0 - p) * f0 + p * f1
        v[..., 1, :] = s * (f0 - f1)
    return out


def inverse_fourier_array(coeffs: np.ndarray, p: float) -> np.ndarray:
    """Inverse of :func:`biased_fourier_array`: f = sum_S c_S chi_S^p."""
    p = check_bias(p)
    out = np.array(coeffs, dtype=np.float64, copy=True)
    n = out.shape[-1]
    d = _dim_of_length(n)
    lead = out.shape[:-1]
    zero_val = math.sqrt(p / (1.0 - p))
    one_val = math.sqrt((1.0 - p) / p)
    for i in range(d):
        v = out.reshape(*lead, n >> (i + 1), 2, 1 << i)
        c0 = v[..., 0, :].copy()
        c1 = v[..., 1, :]
        v[..., 0, :] = c0 + zero_val * c1
        v[..., 1, :] = c0 - one_val * c1
    return out


def biased_fourier(f: CubeFunction, p: float) -> Spectrum:
    return Spectrum(f.dim, check_bias(p), biased_fourier_array(f.values, p))


def inverse_fourier(spec: Spectrum) -> CubeFunction:
    return CubeFunction(spec.dim, inverse_fourier_array(spec.coeffs, spec.bias))
