"""Perturbation mass gamma into cells, and empirical checks of the shattering bounds.

gamma_y(A) = Pr[nu_{eps, eps/mu}(y) in A] is computed exactly for every y at
once as R(eps, eps/mu) applied to the indicator of A, so the shattering checks carry
no sampling error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cube_fn import CubeFunction, check_dim, lower_half_mask
from .errors import InvalidParameterError
from .noise import apply_asymmetric_array


@dataclass(frozen=True)
class ShatterParams:
    eps: float
    mu: float
    c0: float = 0.01
    c1: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise InvalidParameterError(f"eps must lie in (0, 1), got {self.eps}")
        if not self.mu >= 1.0:
            raise InvalidParameterError(f"mu must be >= 1, got {self.mu}")
        for name in ("c0", "c1"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise InvalidParameterError(f"{name} must lie in (0, 1)")

    @property
    def mu_at_least_inv_eps(self) -> bool:
        return self.mu * self.eps >= 1.0 - 1e-12

    @property
    def p1(self) -> float:
        return self.eps

    @property
    def p2(self) -> float:
        return self.eps / self.mu


@dataclass(frozen=True, eq=False)
class Partition:
    """Cells A_0..A_{m-1} of {0,1}^dim given by a cell id per mask."""

    dim: int
    cell_of: np.ndarray
    m: int
    kind: str = "custom"

    def __post_init__(self):
        check_dim(self.dim)
        cells = np.asarray(self.cell_of, dtype=np.int64)
        if cells.shape != (1 << self.dim,):
            raise InvalidParameterError(f"cell_of must have length {1 << self.dim}")
        if self.m < 1 or cells.min() < 0 or cells.max() >= self.m:
            raise InvalidParameterError(f"cell ids must lie in [0, {self.m})")
        cells.flags.writeable = False
        object.__setattr__(self, "cell_of", cells)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.cell_of, minlength=self.m)

    def light_cells(self, threshold: str = "sqrt") -> np.ndarray:
        """Ids of cells with |A_i| <= 2^d / sqrt(m) (or 2^d / m with threshold='linear').

        A single cell (m = 1) is the whole cube and never counts as light.
        """
        if self.m == 1:
            return np.array([], dtype=np.int64)
        cap = (1 << self.dim) / (math.sqrt(self.m) if threshold == "sqrt" else self.m)
        return np.flatnonzero(self.sizes() <= cap)

    def to_json(self) -> dict:
        return {"dim": self.dim, "m": self.m, "kind": self.kind, "cell_of": self.cell_of.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Partition":
        return cls(obj["dim"], np.asarray(obj["cell_of"]), obj["m"], obj.get("kind", "custom"))


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def make_partition(kind: str, d: int, rng: np.random.Generator | None = None,
                   k: int | None = None, m: int | None = None, seed: int = 0) -> Partition:
    """Experimental partitions standing in for data-structure cells.

    ``bit-sample`` (k): cell = the low k coordinates.  ``random-balanced`` (m):
    round-robin over a shuffled mask order.  ``seeded-hash`` (m): a 64-bit
    mix of the mask and ``seed``, reduced mod m.
    """
    check_dim(d)
    n = 1 << d
    masks = np.arange(n, dtype=np.int64)
    if kind == "bit-sample":
        if k is None or not 0 <= k <= d:
            raise InvalidParameterError(f"bit-sample needs 0 <= k <= d, got k={k}")
        return Partition(d, masks & ((1 << k) - 1), 1 << k, kind)
    if m is None or not 1 <= m <= n:
        raise InvalidParameterError(f"need 1 <= m <= 2^d = {n}, got m={m}")
    if kind == "random-balanced":
        rng = rng if rng is not None else np.random.default_rng(seed)
        cells = np.empty(n, dtype=np.int64)
        cells[rng.permutation(n)] = masks % m
        return Partition(d, cells, m, kind)
    if kind == "seeded-hash":
        h = _splitmix64(masks.astype(np.uint64) ^ _splitmix64(np.full(n, seed, dtype=np.uint64)))
        return Partition(d, (h % np.uint64(m)).astype(np.int64), m, kind)
    raise InvalidParameterError(f"unknown partition kind {kind!r}")


# --------------------------------------------------------------------------
# gamma and the heavy set


def gamma_all_array(indicators: np.ndarray, params: ShatterParams) -> np.ndarray:
    """R(eps, eps/mu) applied to one or many 0/1 indicator rows."""
    indicators = np.asarray(indicators, dtype=np.float64)
    if not np.all((indicators == 0.0) | (indicators == 1.0)):
        raise InvalidParameterError("gamma needs a 0/1 indicator")
    return apply_asymmetric_array(indicators, params.p1, params.p2)


def gamma_all(A: CubeFunction, params: ShatterParams) -> CubeFunction:
    """gamma_y(A) for every y, as a function on the cube."""
    return CubeFunction(A.dim, gamma_all_array(A.values, params))


def _check_density(A: CubeFunction, a: float):
    if not 0.0 < a <= 1.0:
        raise InvalidParameterError(f"a must lie in (0, 1], got {a}")
    size = int(np.count_nonzero(A.values))
    if size > a * A.size * (1 + 1e-12):
        raise InvalidParameterError(f"|A| = {size} exceeds a 2^d = {a * A.size}")


@dataclass
class HeavySet:
    points: np.ndarray
    fraction: float
    threshold: float


def heavy_set(A: CubeFunction, params: ShatterParams, a: float) -> HeavySet:
    """B = {y in L : gamma_y(A) >= a^(c0 eps)}."""
    _check_density(A, a)
    thr = a ** (params.c0 * params.eps)
    g = gamma_all_array(A.values, params)
    hit = (g >= thr) & lower_half_mask(A.dim)
    pts = np.flatnonzero(hit)
    return HeavySet(pts, len(pts) / A.size, thr)


@dataclass
class ShatterResult:
    holds: bool
    lhs: float
    rhs: float
    c1_max: float
    heavy_threshold: float


def largest_c1(lhs: float, a: float, eps: float) -> float:
    """Largest c1 with lhs <= a^(1 + c1 eps); inf when no finite constant binds."""
    if lhs <= 0.0 or a >= 1.0:
        return math.inf
    return (math.log(lhs) / math.log(a) - 1.0) / eps


def shattering_report(A: CubeFunction, params: ShatterParams, a: float) -> ShatterResult:
    """Compare |B|/2^d with a^(1 + c1 eps)."""
    hs = heavy_set(A, params, a)
    rhs = a ** (1.0 + params.c1 * params.eps)
    return ShatterResult(bool(hs.fraction <= rhs), hs.fraction, rhs,
                         largest_c1(hs.fraction, a, params.eps), hs.threshold)


@dataclass
class PartitionReport:
    m: int
    light_cells: int
    applicable: bool
    violation_fraction: float = math.nan
    threshold: float = math.nan
    bound: float = math.nan
    holds: bool | None = None
    c1_max: float = math.nan
    notes: list = field(default_factory=list)


def partition_shatter(part: Partition, params: ShatterParams, threshold: str = "sqrt",
                      chunk: int = 256) -> PartitionReport:
    """Fraction of y in L whose largest light-cell gamma reaches m^(-c0 eps/2).

    Compared against m^(-c1 eps/2).  A partition with no light cells yields a
    report with ``applicable=False``.
    """
    light = part.light_cells(threshold)
    m = part.m
    if threshold != "sqrt":
        notes = ["light-cell threshold 2^d/m used instead of 2^d/sqrt(m)"]
    else:
        notes = []
    if len(light) == 0:
        return PartitionReport(m, 0, False, notes=notes + ["no light cells"])
    L = lower_half_mask(part.dim)
    if part.kind == "bit-sample" and len(light) == m:
        best = _bit_sample_max_gamma(part, params)
    else:
        best = max_gamma_over_cells(part, light, params, chunk)
    thr = m ** (-params.c0 * params.eps / 2.0)
    bound = m ** (-params.c1 * params.eps / 2.0)
    frac = float(np.mean(best[L] >= thr))
    if frac <= 0.0 or m == 1:
        c1_max = math.inf
    else:
        c1_max = -2.0 * math.log(frac) / (params.eps * math.log(m))
    notes.append(f"max light-cell gamma over L: {float(best[L].max()):.6g}")
    return PartitionReport(m, len(light), True, frac, thr, bound, bool(frac < bound), c1_max, notes)


def max_gamma_over_cells(part: Partition, cells: np.ndarray, params: ShatterParams,
                         chunk: int = 256) -> np.ndarray:
    """Pointwise max over the given cells of gamma_y(A_i), in cell-id order."""
    best = np.zeros(1 << part.dim)
    for start in range(0, len(cells), chunk):
        ids = cells[start:start + chunk]
        ind = (part.cell_of[None, :] == ids[:, None]).astype(np.float64)
        best = np.maximum(best, gamma_all_array(ind, params).max(axis=0))
    return best


def _bit_sample_max_gamma(part: Partition, params: ShatterParams) -> np.ndarray:
    # gamma_y(cell c) is a product over the k sampled bits, so the max over c
    # factorizes into the per-bit max of the transition kernel row.
    k = int(round(math.log2(part.m)))
    stay0 = max(1.0 - params.p1, params.p1)
    stay1 = max(1.0 - params.p2, params.p2)
    masks = np.arange(1 << part.dim, dtype=np.int64)
    ones = np.bitwise_count(masks & ((1 << k) - 1)).astype(np.int64)
    return stay1 ** ones * stay0 ** (k - ones)


# --------------------------------------------------------------------------
# test families


def random_subcube(d: int, k: int, rng: np.random.Generator) -> CubeFunction:
    """Indicator of a subcube fixing k random coordinates to random values (density 2^-k)."""
    coords = rng.choice(d, size=k, replace=False)
    vals = rng.integers(0, 2, size=k)
    masks = np.arange(1 << d, dtype=np.int64)
    ok = np.ones(1 << d, dtype=bool)
    for c, v in zip(coords, vals):
        ok &= ((masks >> c) & 1) == v
    return CubeFunction.indicator(d, ok)


def random_subset(d: int, a: float, rng: np.random.Generator) -> CubeFunction:
    """Indicator of floor(a 2^d) masks chosen uniformly without replacement."""
    size = int(math.floor(a * (1 << d)))
    return CubeFunction.indicator(d, rng.choice(1 << d, size=size, replace=False))


def hamming_ball(d: int, center: int, radius: int) -> CubeFunction:
    masks = np.arange(1 << d, dtype=np.int64)
    return CubeFunction.indicator(d, np.bitwise_count(masks ^ center) <= radius)
