"""Scalar Bregman generators, decomposable divergences and the Bregman cube.

Covers the asymmetry measure mu (by grid search and by the Hessian ratio), the
asymmetric cube metric, the pseudo-Hamming-cube embedding and the reduction
from partial match (dominance) queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import xlogy

from .errors import DomainError, InvalidParameterError


@dataclass(frozen=True)
class Generator:
    """A strictly convex scalar phi with closed-form first and second derivatives.

    ``lower``/``upper`` bound the domain.  ``closed_lower``/``closed_upper``
    say whether the endpoint is admissible as the *first* argument of the
    divergence (phi finite there); the second argument must always be interior,
    since phi' diverges at those endpoints.
    """

    name: str
    lower: float
    upper: float
    phi: Callable
    dphi: Callable
    d2phi: Callable
    div: Callable | None = None
    closed_lower: bool = False
    closed_upper: bool = False
    monotone_d2phi: bool = True

    def in_domain(self, x, interior=False) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        lo_ok = x > self.lower
        hi_ok = x < self.upper
        if not interior and self.closed_lower:
            lo_ok = lo_ok | (x == self.lower)
        if not interior and self.closed_upper:
            hi_ok = hi_ok | (x == self.upper)
        return np.isfinite(x) & lo_ok & hi_ok

    def check(self, x, interior=False, label="x"):
        x = np.asarray(x, dtype=np.float64)
        ok = self.in_domain(x, interior)
        if not np.all(ok):
            idx = int(np.flatnonzero(~np.atleast_1d(ok))[0])
            bad = float(np.atleast_1d(x)[idx])
            raise DomainError(
                f"{self.name}: coordinate {idx} of {label} ({bad}) lies outside the "
                f"{'interior of the ' if interior else ''}domain ({self.lower}, {self.upper})"
            )
        return x


def _xlogx(x):
    return xlogy(x, x)


GENERATORS: dict[str, Generator] = {
    "l2": Generator(
        "l2", -math.inf, math.inf,
        phi=lambda x: 0.5 * np.square(x),
        dphi=lambda x: np.asarray(x, dtype=np.float64),
        d2phi=lambda x: np.ones_like(np.asarray(x, dtype=np.float64)),
        div=lambda x, y: 0.5 * np.square(x - y),
    ),
    "kl": Generator(
        "kl", 0.0, math.inf,
        phi=_xlogx,
        dphi=lambda x: np.log(x) + 1.0,
        d2phi=lambda x: 1.0 / np.asarray(x, dtype=np.float64),
        div=lambda x, y: xlogy(x, x / y) - x + y,
        closed_lower=True,
    ),
    "itakura-saito": Generator(
        "itakura-saito", 0.0, math.inf,
        phi=lambda x: -np.log(x),
        dphi=lambda x: -1.0 / np.asarray(x, dtype=np.float64),
        d2phi=lambda x: 1.0 / np.square(x),
        div=lambda x, y: x / y - np.log(x / y) - 1.0,
    ),
    "exponential": Generator(
        "exponential", -math.inf, math.inf,
        phi=np.exp,
        dphi=np.exp,
        d2phi=np.exp,
        div=lambda x, y: np.exp(x) - (x - y + 1.0) * np.exp(y),
    ),
    "bit-entropy": Generator(
        "bit-entropy", 0.0, 1.0,
        phi=lambda x: _xlogx(x) + _xlogx(1.0 - np.asarray(x, dtype=np.float64)),
        dphi=lambda x: np.log(x) - np.log1p(-np.asarray(x, dtype=np.float64)),
        d2phi=lambda x: 1.0 / (np.asarray(x, dtype=np.float64) * (1.0 - np.asarray(x, dtype=np.float64))),
        div=lambda x, y: xlogy(x, x / y) + xlogy(1.0 - x, (1.0 - x) / (1.0 - y)),
        closed_lower=True,
        closed_upper=True,
        monotone_d2phi=False,
    ),
}


def get_generator(name: str) -> Generator:
    try:
        return GENERATORS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}"
        ) from None


def _gen(gen) -> Generator:
    return get_generator(gen) if isinstance(gen, str) else gen


# --------------------------------------------------------------------------
# divergences


def definitional_divergence(gen, x, y) -> np.ndarray:
    """Elementwise phi(x) - phi(y) - phi'(y) (x - y), straight from the generator."""
    gen = _gen(gen)
    x = gen.check(x, label="x")
    y = gen.check(y, interior=True, label="y")
    return gen.phi(x) - gen.phi(y) - gen.dphi(y) * (x - y)


def scalar_divergence(gen, x, y) -> np.ndarray:
    """Elementwise D_phi(x, y), with domain checks; uses the closed form when available."""
    gen = _gen(gen)
    if gen.div is None:
        out = definitional_divergence(gen, x, y)
    else:
        x = gen.check(x, label="x")
        y = gen.check(y, interior=True, label="y")
        out = gen.div(x, y)
    # rounding can leave tiny negatives near x == y
    return np.maximum(out, 0.0)


def divergence(gen, x, y) -> float:
    """Decomposable divergence: sum of scalar divergences over coordinates."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape:
        raise InvalidParameterError(f"length mismatch: {x.shape} vs {y.shape}")
    return float(np.sum(scalar_divergence(gen, x, y)))


def _check_interval(gen: Generator, interval):
    lo, hi = (float(v) for v in interval)
    if not lo < hi:
        raise InvalidParameterError(f"degenerate interval [{lo}, {hi}]")
    gen.check(np.array([lo, hi]), interior=True, label="interval")
    return lo, hi


def asymmetry_grid(gen, interval, grid_n: int) -> float:
    """max D(x,y)/D(y,x) over ordered pairs of an evenly spaced grid on ``interval``.

    Pairs with x == y or D(y,x) < 1e-300 are skipped; the ratio is formed in
    log space.
    """
    gen = _gen(gen)
    lo, hi = _check_interval(gen, interval)
    if grid_n < 2:
        raise InvalidParameterError("grid_n must be >= 2")
    g = np.linspace(lo, hi, int(grid_n))
    best = 0.0  # log of the running max ratio; ratio >= 1 always exists
    chunk = max(1, 4_000_000 // len(g))
    for start in range(0, len(g), chunk):
        xs = g[start:start + chunk, None]
        fwd = scalar_divergence(gen, xs, g[None, :])
        bwd = scalar_divergence(gen, g[None, :], xs)
        ok = (fwd > 1e-300) & (bwd > 1e-300)
        if np.any(ok):
            best = max(best, float(np.max(np.log(fwd[ok]) - np.log(bwd[ok]))))
    return math.exp(best)


def asymmetry_hessian(gen, interval, grid_n: int = 100_001) -> float:
    """sup phi'' / inf phi'' over ``interval``: an upper bound on the grid asymmetry."""
    gen = _gen(gen)
    lo, hi = _check_interval(gen, interval)
    if gen.monotone_d2phi:
        pts = np.array([lo, hi])
    else:
        pts = np.linspace(lo, hi, grid_n)
    h = gen.d2phi(pts)
    return float(np.max(h) / np.min(h))


# --------------------------------------------------------------------------
# Bregman cube


@dataclass(frozen=True)
class CubeMetricParams:
    """Asymmetric cube metric: mu per 0 -> 1 disagreement, 1 per 1 -> 0."""

    mu: float
    dim: int

    def __post_init__(self):
        if not self.mu >= 1.0:
            raise InvalidParameterError(f"mu must be >= 1, got {self.mu}")
        if self.dim < 0:
            raise InvalidParameterError("dim must be nonnegative")


def cube_distance(params: CubeMetricParams, x: int, y: int) -> float:
    """mu |{i : y_i > x_i}| + |{j : x_j > y_j}|."""
    full = (1 << params.dim) - 1
    if not (0 <= x <= full and 0 <= y <= full):
        raise InvalidParameterError(f"masks must lie in [0, 2^{params.dim})")
    up = (~x & y & full).bit_count()
    down = (x & ~y & full).bit_count()
    return params.mu * up + down


def cube_distance_matrix(mu: float, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """All pairwise cube distances between rows of two 0/1 matrices (n, d) and (m, d)."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    up = (1.0 - X) @ Y.T
    down = X @ (1.0 - Y).T
    return mu * up + down


class InducedCube(NamedTuple):
    scale: float
    mu: float
    a: float
    b: float


def induced_cube_params(gen, a: float, b: float) -> InducedCube:
    """Scale and mu of the cube metric realized on {a, b}^d.

    Anchors are relabelled so that D(b, a) <= D(a, b); bit 0 maps to ``a`` and
    bit 1 to ``b``, so a 0 -> 1 disagreement costs ``scale * mu``.
    """
    gen = _gen(gen)
    a, b = float(a), float(b)
    if a == b:
        raise InvalidParameterError("anchors must differ")
    gen.check(np.array([a, b]), interior=True, label="anchors")
    dba = float(scalar_divergence(gen, b, a))
    dab = float(scalar_divergence(gen, a, b))
    if dba > dab:
        a, b, dba, dab = b, a, dab, dba
    return InducedCube(dba, dab / dba, a, b)


def cube_point(anchors: InducedCube, x: int, d: int) -> np.ndarray:
    """Image of a mask in {a, b}^d under bit 0 -> a, bit 1 -> b."""
    bits = (int(x) >> np.arange(d)) & 1
    return np.where(bits == 1, anchors.b, anchors.a).astype(np.float64)


@dataclass(frozen=True)
class EmbeddingAnchors:
    """Anchor pair for the pseudo-Hamming cube and its scale c0 = D(b,a) + D(a,b)."""

    a: float
    b: float
    c0: float

    def __post_init__(self):
        if self.a == self.b:
            raise InvalidParameterError("anchors must differ")
        if not self.c0 > 0:
            raise InvalidParameterError(f"c0 must be positive, got {self.c0}")

    @classmethod
    def for_generator(cls, gen, a: float, b: float) -> "EmbeddingAnchors":
        gen = _gen(gen)
        if a == b:
            raise InvalidParameterError("anchors must differ")
        gen.check(np.array([a, b], dtype=np.float64), interior=True, label="anchors")
        c0 = float(scalar_divergence(gen, b, a) + scalar_divergence(gen, a, b))
        return cls(float(a), float(b), c0)


def pseudo_cube_embed(anchors: EmbeddingAnchors, x: int, d: int) -> np.ndarray:
    """Coordinates (2i, 2i+1) are (a, b) when bit i of x is 0, else (b, a)."""
    bits = (int(x) >> np.arange(d)) & 1
    out = np.empty(2 * d)
    out[0::2] = np.where(bits == 1, anchors.b, anchors.a)
    out[1::2] = np.where(bits == 1, anchors.a, anchors.b)
    return out


def _embed_all(anchors: EmbeddingAnchors, masks: np.ndarray, d: int) -> np.ndarray:
    bits = (masks[:, None] >> np.arange(d)[None, :]) & 1
    out = np.empty((len(masks), 2 * d))
    out[:, 0::2] = np.where(bits == 1, anchors.b, anchors.a)
    out[:, 1::2] = np.where(bits == 1, anchors.a, anchors.b)
    return out


def verify_embedding(gen, anchors: EmbeddingAnchors, d: int, trials: int = 10_000,
                     rng: np.random.Generator | None = None, exhaustive_max_dim: int = 12) -> float:
    """Max of |D(embed x, embed y) - c0 hamming(x, y)| / max(1, c0 d).

    Exhaustive over all pairs when d <= ``exhaustive_max_dim``, otherwise
    ``trials`` random pairs.
    """
    gen = _gen(gen)
    gen.check(np.array([anchors.a, anchors.b]), interior=True, label="anchors")
    scale = max(1.0, anchors.c0 * d)
    if d <= exhaustive_max_dim:
        xs = np.arange(1 << d, dtype=np.int64)
        ys = xs
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        xs = rng.integers(0, 1 << min(d, 62), size=trials, dtype=np.int64)
        ys = rng.integers(0, 1 << min(d, 62), size=trials, dtype=np.int64)
    ex = _embed_all(anchors, xs, d)
    ey = _embed_all(anchors, ys, d)
    worst = 0.0
    paired = d > exhaustive_max_dim
    chunk = max(1, 2_000_000 // max(1, len(ys) * 2 * d)) if not paired else len(xs)
    for start in range(0, len(xs), chunk):
        bx = ex[start:start + chunk]
        hx = xs[start:start + chunk]
        if paired:
            div = scalar_divergence(gen, bx, ey).sum(axis=-1)
            ham = np.bitwise_count(hx ^ ys)
        else:
            div = scalar_divergence(gen, bx[:, None, :], ey[None, :, :]).sum(axis=-1)
            ham = np.bitwise_count(hx[:, None] ^ ys[None, :])
        worst = max(worst, float(np.max(np.abs(div - anchors.c0 * ham))))
    return worst / scale


# --------------------------------------------------------------------------
# partial match


def dominates(q: int, p: int) -> bool:
    """True iff q_i >= p_i for every coordinate."""
    return (p & ~q) == 0


@dataclass(frozen=True)
class PMCheck:
    pm_answer: bool
    ann_answer: bool
    consistent: bool
    min_distance: float
    mu: float


def pm_reduction_check(P, q: int, d: int, mu: float | None = None) -> PMCheck:
    """Compare the dominance answer with the Bregman-cube near-neighbour answer.

    With mu >= 2d + 1 a dominated point is within distance d of q and every
    other point is at distance >= 2d + 1, so even a 2-approximate minimiser
    (distance <= 2 * min) separates the two cases.
    """
    P = [int(p) for p in P]
    if not P:
        raise InvalidParameterError("P must be nonempty")
    mu = float(2 * d + 1) if mu is None else float(mu)
    if mu < 2 * d + 1:
        raise InvalidParameterError(f"reduction needs mu >= 2d + 1 = {2 * d + 1}")
    params = CubeMetricParams(mu, d)
    pm = any(dominates(q, p) for p in P)
    dmin = min(cube_distance(params, q, p) for p in P)
    ann = dmin <= d
    if pm:
        separated = 2 * dmin < 2 * d + 1
    else:
        separated = dmin >= 2 * d + 1
    return PMCheck(pm, ann, pm == ann and separated, dmin, mu)
