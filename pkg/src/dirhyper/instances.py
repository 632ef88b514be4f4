"""Hard gap instances on the Bregman cube, sampled without enumerating {0,1}^d.

Points are 0/1 ``uint8`` rows of length d, so d may be far beyond 64.  Every
random draw comes from a Philox stream keyed by ``(seed, point index, role)``,
which makes instances independent of evaluation order and thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bregman import cube_distance_matrix
from .errors import InvalidParameterError
from .noise import NoiseParams

ROLE_S, ROLE_P, ROLE_Q, ROLE_U = 0, 1, 2, 3


def default_workers() -> int:
    return max(1, int(os.environ.get("DIRHYPER_THREADS", "1")))


def stream(seed: int, index: int, role: int) -> np.random.Generator:
    """Independent generator for one (point, role); a counter-based bit generator."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index), int(role)))
    return np.random.Generator(np.random.Philox(ss))


def mask_to_bits(x: int, d: int) -> np.ndarray:
    return ((int(x) >> np.arange(d, dtype=np.int64)) & 1).astype(np.uint8) if d <= 62 else \
        np.array([(int(x) >> i) & 1 for i in range(d)], dtype=np.uint8)


def bits_to_mask(bits) -> int:
    return sum(1 << i for i, b in enumerate(np.asarray(bits)) if b)


def perturb(x, params: NoiseParams, rng: np.random.Generator) -> np.ndarray:
    """Flip each 0 to 1 with probability p1 and each 1 to 0 with probability p2."""
    x = np.asarray(x, dtype=np.uint8)
    u = rng.random(x.shape[-1])
    flip = np.where(x == 0, u < params.p1, u < params.p2)
    return x ^ flip.astype(np.uint8)


def sample_lower_half(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of L = {x : H(x) <= d/2}, by rejection from the uniform cube."""
    if d < 1:
        raise InvalidParameterError("d must be >= 1")
    while True:
        x = rng.integers(0, 2, size=d, dtype=np.uint8)
        if 2 * int(x.sum()) <= d:
            return x


@dataclass(frozen=True)
class GapInstanceConfig:
    dim: int
    n: int
    eps: float
    mu: float
    seed: int = 0
    concentration_c: float = 1.0
    perturb_mu: float | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParameterError("dim must be >= 1")
        if self.n < 1:
            raise InvalidParameterError("n must be >= 1")
        if not 0.0 <= self.eps < 1.0:
            raise InvalidParameterError(f"eps must lie in [0, 1), got {self.eps}")
        if not self.mu >= 1.0:
            raise InvalidParameterError(f"mu must be >= 1, got {self.mu}")
        if self.perturb_mu is not None and not self.perturb_mu >= 1.0:
            raise InvalidParameterError("perturb_mu must be >= 1")

    @property
    def mu_at_least_inv_eps(self) -> bool:
        """The standing assumption mu >= 1/eps; reported, not enforced."""
        return self.eps == 0 or self.mu * self.eps >= 1.0 - 1e-12

    @property
    def noise_mu(self) -> float:
        """The mu used inside the perturbations (may differ from the metric's mu)."""
        return self.mu if self.perturb_mu is None else self.perturb_mu

    @property
    def data_noise(self) -> NoiseParams:
        return NoiseParams(self.eps / self.noise_mu, self.eps)

    @property
    def query_noise(self) -> NoiseParams:
        return NoiseParams(self.eps, self.eps / self.noise_mu)

    @property
    def concentration_ratio(self) -> float:
        """(eps/mu) d / ln n; the concentration regime needs this >= concentration_c."""
        return (self.eps / self.noise_mu) * self.dim / math.log(max(self.n, 2))

    @property
    def in_concentration_regime(self) -> bool:
        return self.concentration_ratio >= self.concentration_c


@dataclass(frozen=True, eq=False)
class GapInstance:
    """S sampled from the lower half; P = data perturbation of S; Q = query perturbation of S."""

    S: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    config: GapInstanceConfig

    def __post_init__(self):
        n, d = self.config.n, self.config.dim
        for name in ("S", "P", "Q"):
            if getattr(self, name).shape != (n, d):
                raise InvalidParameterError(f"{name} must have shape ({n}, {d})")

    def to_json(self) -> dict:
        def enc(M):
            return [np.packbits(row, bitorder="little").tobytes().hex() for row in M]
        return {"config": asdict(self.config), "S": enc(self.S), "P": enc(self.P), "Q": enc(self.Q)}

    @classmethod
    def from_json(cls, obj: dict) -> "GapInstance":
        config = GapInstanceConfig(**obj["config"])

        def dec(rows):
            return np.stack([
                np.unpackbits(np.frombuffer(bytes.fromhex(h), dtype=np.uint8),
                              count=config.dim, bitorder="little")
                for h in rows
            ])
        return cls(dec(obj["S"]), dec(obj["P"]), dec(obj["Q"]), config)


def _generate_point(config: GapInstanceConfig, i: int):
    s = sample_lower_half(config.dim, stream(config.seed, i, ROLE_S))
    p = perturb(s, config.data_noise, stream(config.seed, i, ROLE_P))
    q = perturb(s, config.query_noise, stream(config.seed, i, ROLE_Q))
    return s, p, q


def generate(config: GapInstanceConfig, workers: int | None = None) -> GapInstance:
    """Sample a gap instance; the result depends only on ``config``."""
    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(lambda i: _generate_point(config, i), range(config.n)))
    else:
        rows = [_generate_point(config, i) for i in range(config.n)]
    S, P, Q = (np.stack(col) for col in zip(*rows))
    return GapInstance(S, P, Q, config)


def paired_bit_moments(eps: float, metric_mu: float, noise_mu: float) -> tuple[float, float]:
    """Mean and variance of the per-coordinate distance D(q^j, p^j).

    The coordinate costs 1 when q^j = 1, p^j = 0 and mu when q^j = 0, p^j = 1;
    the two events have the same probabilities whatever s^j is.
    """
    a = eps * (1.0 - eps / noise_mu)
    b = (1.0 - eps) * eps / noise_mu
    mean = a + metric_mu * b
    return mean, a + metric_mu**2 * b - mean**2


@dataclass
class GapThresholds:
    ratio_low: float = 1.0
    ratio_high: float = 3.0
    max_outside_fraction: float = 0.01
    separation_factor: float = 10.0
    min_separated_fraction: float = 0.99
    max_z: float = 3.0


@dataclass
class GapReport:
    config: GapInstanceConfig
    thresholds: GapThresholds
    paired: np.ndarray
    min_cross: np.ndarray
    min_cross_uniform: np.ndarray
    metrics: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def rows(self) -> list[dict]:
        return [
            {"index": i, "paired": float(self.paired[i]), "min_cross": float(self.min_cross[i]),
             "ratio": float(self.min_cross[i] / self.paired[i]) if self.paired[i] > 0 else math.inf,
             "min_cross_uniform": float(self.min_cross_uniform[i])}
            for i in range(len(self.paired))
        ]


def _summary(x: np.ndarray) -> dict:
    return {"mean": float(np.mean(x)), "min": float(np.min(x)), "max": float(np.max(x))}


def gap_statistics(inst: GapInstance, thresholds: GapThresholds | None = None) -> GapReport:
    """Paired and cross distances of an instance against the analytic per-bit mean.

    Cross distances are reported against the data set P and, separately,
    against an independent sample drawn uniformly from the whole cube.
    """
    cfg = inst.config
    th = thresholds or GapThresholds()
    n, d = cfg.n, cfg.dim
    if n < 2:
        raise InvalidParameterError("gap statistics need n >= 2 (no cross distances otherwise)")
    D = cube_distance_matrix(cfg.mu, inst.Q, inst.P)
    paired = np.diag(D).copy()
    off = D + np.diag(np.full(n, np.inf))
    min_cross = off.min(axis=1)

    U = np.stack([stream(cfg.seed, i, ROLE_U).integers(0, 2, size=d, dtype=np.uint8) for i in range(n)])
    min_cross_u = cube_distance_matrix(cfg.mu, inst.Q, U).min(axis=1)

    mean_bit, var_bit = paired_bit_moments(cfg.eps, cfg.mu, cfg.noise_mu)
    emp_bit = float(paired.sum() / (n * d))
    se = math.sqrt(var_bit / (n * d)) if var_bit > 0 else 0.0
    z = abs(emp_bit - mean_bit) / se if se > 0 else (0.0 if emp_bit == mean_bit else math.inf)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(paired > 0, min_cross / paired, np.inf)
        scaled = paired / (cfg.eps * d) if cfg.eps > 0 else np.zeros(n)
    outside = float(np.mean((scaled < th.ratio_low) | (scaled > th.ratio_high))) if cfg.eps > 0 else 0.0
    separated = float(np.mean(min_cross > th.separation_factor * paired))

    metrics = {
        "paired_per_bit_mean": emp_bit,
        "analytic_per_bit_mean": mean_bit,
        "analytic_per_bit_mean_closed_form": 2 * cfg.eps - cfg.eps**2 - cfg.eps**2 / cfg.mu,
        "per_bit_standard_error": se,
        "z_score": z,
        "paired": _summary(paired),
        "paired_over_eps_d": _summary(scaled),
        "fraction_outside_ratio_band": outside,
        "min_cross": _summary(min_cross),
        "cross_per_bit_mean": float(D[~np.eye(n, dtype=bool)].mean() / d),
        "cross_constant_mu_d": float(np.mean(min_cross) / (cfg.mu * d)),
        "min_cross_uniform": _summary(min_cross_u),
        "min_ratio": float(np.min(ratio)),
        "separated_fraction": separated,
        "concentration_ratio": cfg.concentration_ratio,
        "in_concentration_regime": cfg.in_concentration_regime,
        "mu_at_least_inv_eps": cfg.mu_at_least_inv_eps,
    }
    checks = {
        "per_bit_mean_within_z": z <= th.max_z,
        "paired_concentration": outside <= th.max_outside_fraction,
        "separation": separated >= th.min_separated_fraction,
    }
    if cfg.eps == 0:
        checks = {"degenerate_paired_zero": bool(np.all(paired == 0))}
    return GapReport(cfg, th, paired, min_cross, min_cross_u, metrics, checks)
