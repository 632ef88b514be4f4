"""Symmetric and directed noise operators, their identities, and hypercontractivity checks.

``R(p1, p2)`` averages a function over independent bit flips that take a 0 to
a 1 with probability ``p1`` and a 1 to a 0 with probability ``p2``.  The
symmetric operator ``T_delta`` is ``R(delta, delta)``; ``tau_delta`` is the
Fourier multiplier ``delta^|S|`` in a p-biased basis.

All hypercontractive exponents use base-2 logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cube_fn import (
    CubeFunction,
    _dim_of_length,
    biased_fourier_array,
    check_bias,
    hamming_weights,
    inverse_fourier_array,
    lower_half_mask,
    norm_array,
    upper_half_mask,
)
from .errors import InvalidParameterError, NotApplicable

LOG2E = math.log2(math.e)


def _check_prob(name, x):
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise InvalidParameterError(f"{name} must lie in [0, 1], got {x}")
    return x


@dataclass(frozen=True)
class NoiseParams:
    """Directed flip probabilities: ``p1`` for 0 -> 1, ``p2`` for 1 -> 0."""

    p1: float
    p2: float

    def __post_init__(self):
        object.__setattr__(self, "p1", _check_prob("p1", self.p1))
        object.__setattr__(self, "p2", _check_prob("p2", self.p2))

    @property
    def decomposable(self) -> bool:
        return self.p1 >= self.p2 and self.p1 <= 1.0 - self.p2 and self.p2 < 0.5

    def transition_matrix(self) -> np.ndarray:
        """Row-stochastic per-coordinate kernel; rows are x_i, columns y_i."""
        return np.array([[1.0 - self.p1, self.p1], [self.p2, 1.0 - self.p2]])


# --------------------------------------------------------------------------
# operators


def apply_asymmetric_array(values: np.ndarray, p1: float, p2: float) -> np.ndarray:
    """[R(p1,p2) f](x) = E_{y ~ nu(x)} f(y), along the last axis."""
    p1 = _check_prob("p1", p1)
    p2 = _check_prob("p2", p2)
    out = np.array(values, dtype=np.float64, copy=True)
    n = out.shape[-1]
    d = _dim_of_length(n)
    lead = out.shape[:-1]
    for i in range(d):
        v = out.reshape(*lead, n >> (i + 1), 2, 1 << i)
        f0 = v[..., 0, :].copy()
        f1 = v[..., 1, :].copy()
        v[..., 0, :] = (1.0 - p1) * f0 + p1 * f1
        v[..., 1, :] = p2 * f0 + (1.0 - p2) * f1
    return out


def apply_asymmetric(f: CubeFunction, params: NoiseParams) -> CubeFunction:
    return CubeFunction(f.dim, apply_asymmetric_array(f.values, params.p1, params.p2))


def apply_symmetric(f: CubeFunction, delta: float) -> CubeFunction:
    """T_delta: flip every bit independently with probability ``delta``."""
    return apply_asymmetric(f, NoiseParams(delta, delta))


def apply_tau_array(values: np.ndarray, delta: float, p: float) -> np.ndarray:
    """Scale the p-biased coefficient at S by delta^|S|."""
    values = np.asarray(values, dtype=np.float64)
    d = _dim_of_length(values.shape[-1])
    coeffs = biased_fourier_array(values, p)
    coeffs *= float(delta) ** hamming_weights(d)
    return inverse_fourier_array(coeffs, p)


def apply_tau(f: CubeFunction, delta: float, p: float) -> CubeFunction:
    return CubeFunction(f.dim, apply_tau_array(f.values, delta, p))


def restrict_lower_half(f: CubeFunction) -> CubeFunction:
    """Zero f outside L = {x : H(x) <= d/2}."""
    return CubeFunction(f.dim, np.where(lower_half_mask(f.dim), f.values, 0.0))


def restrict_upper_half(f: CubeFunction) -> CubeFunction:
    """Zero f outside U = {x : H(x) >= d/2}."""
    return CubeFunction(f.dim, np.where(upper_half_mask(f.dim), f.values, 0.0))


# --------------------------------------------------------------------------
# identities


def decompose(params: NoiseParams) -> tuple[float, float]:
    """Split R(p1,p2) into a directed flip R(p_dir, 0) followed by T_{p_sym}; returns (p_sym, p_dir).

    The order is that of the noise acting on points: flip 0 -> 1 with p_dir,
    then flip every bit with p_sym.  On functions this is R_dir(T f).
    """
    p1, p2 = params.p1, params.p2
    if not params.decomposable:
        raise InvalidParameterError(
            f"decomposition needs p1 >= p2, p1 <= 1 - p2 and p2 < 1/2; got ({p1}, {p2})"
        )
    return p2, (p1 - p2) / (1.0 - 2.0 * p2)


def decomposition_residual_array(values: np.ndarray, params: NoiseParams, swapped: bool = False) -> np.ndarray:
    """Per-row max |R(p1,p2) f - staged f|; ``swapped`` stages the function operators as T(R_dir f)."""
    p_sym, p_dir = decompose(params)
    values = np.asarray(values, dtype=np.float64)
    direct = apply_asymmetric_array(values, params.p1, params.p2)
    if swapped:
        staged = apply_asymmetric_array(apply_asymmetric_array(values, p_dir, 0.0), p_sym, p_sym)
    else:
        staged = apply_asymmetric_array(apply_asymmetric_array(values, p_sym, p_sym), p_dir, 0.0)
    return np.max(np.abs(direct - staged), axis=-1)


def verify_decomposition(f: CubeFunction, params: NoiseParams) -> float:
    """Max absolute deviation between R(p1,p2) f and the staged point-noise composition."""
    return float(decomposition_residual_array(f.values, params))


def reversed_order_residual(f: CubeFunction, params: NoiseParams) -> float:
    """As :func:`verify_decomposition` with the function operators swapped, T(R_dir f).

    Nonzero in general: the two stages do not commute.
    """
    return float(decomposition_residual_array(f.values, params, swapped=True))


def transform_attenuation(p: float) -> float:
    """sqrt((1-p)/(1+p)), the per-level factor relating directed noise to a biased basis."""
    return math.sqrt((1.0 - p) / (1.0 + p))


_DIRECTED_FORMS = (("R(p,0)", lambda p: (p, 0.0, (1.0 + p) / 2.0)),
                   ("R(0,p)", lambda p: (0.0, p, (1.0 - p) / 2.0)))


def transform_relation_residual_array(values: np.ndarray, p: float) -> np.ndarray:
    """Per-row max coefficient mismatch over both directed forms.

    Uniform-basis coefficients of R(p,0) f must equal the ((1+p)/2)-biased
    coefficients of f scaled by attenuation^|S|; likewise R(0,p) f against
    the ((1-p)/2)-biased coefficients.
    """
    p = check_bias(p)
    values = np.asarray(values, dtype=np.float64)
    d = values.shape[-1].bit_length() - 1
    scale = transform_attenuation(p) ** hamming_weights(d)
    worst = np.zeros(values.shape[:-1])
    for _, form in _DIRECTED_FORMS:
        p1, p2, bias = form(p)
        lhs = biased_fourier_array(apply_asymmetric_array(values, p1, p2), 0.5)
        rhs = scale * biased_fourier_array(values, bias)
        worst = np.maximum(worst, np.max(np.abs(lhs - rhs), axis=-1))
    return worst


def transform_relation_residual(f: CubeFunction, p: float) -> float:
    return float(transform_relation_residual_array(f.values, p))


def norm_identity_residual_array(values: np.ndarray, p: float) -> np.ndarray:
    """|‖R(p,0) f‖_{2,1/2} - ‖tau f‖_{2,(1+p)/2}| per row, maxed with the R(0,p) counterpart."""
    p = check_bias(p)
    values = np.asarray(values, dtype=np.float64)
    delta = transform_attenuation(p)
    worst = np.zeros(values.shape[:-1])
    for _, form in _DIRECTED_FORMS:
        p1, p2, bias = form(p)
        lhs = norm_array(apply_asymmetric_array(values, p1, p2), 0.5, 2.0)
        rhs = norm_array(apply_tau_array(values, delta, bias), bias, 2.0)
        worst = np.maximum(worst, np.abs(lhs - rhs))
    return worst


def norm_identity_residual(f: CubeFunction, p: float) -> float:
    return float(norm_identity_residual_array(f.values, p))


# --------------------------------------------------------------------------
# hypercontractive exponents


def keller_condition(pbar: float, delta: float) -> bool:
    """Validity of the biased bound: delta^2 sqrt(pbar log(1/pbar) / (1-pbar)) <= 1.

    Also requires delta <= 1: for delta > 1 the bound fails already at d = 1
    even where the square-root condition admits it (e.g. pbar = 0.05,
    delta = 1.2).
    """
    if not 0.0 <= delta <= 1.0:
        return False
    return delta**2 * math.sqrt(pbar * math.log2(1.0 / pbar) / (1.0 - pbar)) <= 1.0


def keller_exponent(pbar: float, delta: float) -> float:
    return 1.0 + delta**2 * (1.0 - pbar) / (pbar * math.log2(1.0 / pbar))


def directed_exponent(p: float) -> float:
    """1 + 1/(1 - log2(1-p)): admissible exponent for R(p,0) on the lower half."""
    return 1.0 + 1.0 / (1.0 - math.log2(1.0 - p))


def general_exponent(p1: float, p2: float) -> float:
    return 1.0 + (1.0 - 2.0 * p2) ** 2 / (1.0 - math.log2((1.0 - p1 - p2) / (1.0 - 2.0 * p2)))


def asymptotic_exponent(p: float, c2: float = 2.0) -> float:
    """Second-order form 2 - p log2(e) + c2 p^2 of :func:`directed_exponent`."""
    return 2.0 - p * LOG2E + c2 * p * p


def asymptotic_fit(ps) -> dict:
    """Measure how closely the exact exponent tracks 2 - p log2(e).

    Returns the residuals and the smallest constant C with
    |residual| <= C p^2 on the supplied grid.
    """
    ps = np.asarray(ps, dtype=np.float64)
    exact = np.array([directed_exponent(p) for p in ps])
    resid = exact - (2.0 - ps * LOG2E)
    return {
        "p": ps.tolist(),
        "exponent": exact.tolist(),
        "residual": resid.tolist(),
        "max_c": float(np.max(np.abs(resid) / ps**2)),
    }


VARIANTS = (
    "keller",
    "biased-tau",
    "measure-comparison",
    "half-cube-R",
    "asymptotic",
    "general-R",
    "unrestricted-R",
)


@dataclass(frozen=True)
class HypercontractivityCase:
    """One inequality instance together with the internal quantities of its proof.

    Build with the classmethods rather than directly.  ``side`` is ``"lower"``
    for R(p,0) acting on functions supported on the lower half (or the
    (1+p)/2 bias labelling), ``"upper"`` for the mirrored statement.
    """

    variant: str
    params: dict
    exponent: float
    side: str = "lower"
    delta: float | None = None
    bias: float | None = None
    pbar: float | None = None
    p_dir: float | None = None
    delta1: float | None = None
    delta2: float | None = None
    keller_ok: bool = True
    needs_keller: bool = True
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidParameterError(f"unknown variant {self.variant!r}")
        if self.side not in ("lower", "upper"):
            raise InvalidParameterError(f"side must be 'lower' or 'upper', got {self.side!r}")
        if not self.exponent > 1.0:
            raise InvalidParameterError(f"exponent must exceed 1, got {self.exponent}")

    @property
    def applicable(self) -> bool:
        return self.keller_ok or not self.needs_keller

    @classmethod
    def keller(cls, p: float, delta: float):
        """‖tau_delta f‖_{2,p} <= ‖f‖_{keller exponent, p}."""
        p = check_bias(p)
        delta = float(delta)
        if delta < 0:
            raise InvalidParameterError("delta must be nonnegative")
        pbar = min(p, 1.0 - p)
        return cls("keller", {"p": p, "delta": delta}, keller_exponent(pbar, delta),
                   delta=delta, bias=p, pbar=pbar, keller_ok=keller_condition(pbar, delta))

    @classmethod
    def biased_tau(cls, p: float, side: str = "lower"):
        """‖tau f‖_{2,q} <= ‖f‖_{1+1/(1-log2(1-p)), q} with q = (1±p)/2."""
        p = check_bias(p)
        delta = transform_attenuation(p)
        bias = (1.0 + p) / 2.0 if side == "lower" else (1.0 - p) / 2.0
        pbar = (1.0 - p) / 2.0
        return cls("biased-tau", {"p": p}, directed_exponent(p), side=side, delta=delta,
                   bias=bias, pbar=pbar, keller_ok=keller_condition(pbar, delta))

    @classmethod
    def measure_comparison(cls, p: float, exponent: float, side: str = "lower"):
        """‖f_L‖^r_{r,p} <= ‖f_L‖^r_{r,1/2} for p >= 1/2 (mirrored for f_U, p <= 1/2)."""
        p = float(p)
        if not 0.0 < p < 1.0:
            raise InvalidParameterError(f"bias p must lie in (0, 1), got {p}")
        if side == "lower" and p < 0.5 or side == "upper" and p > 0.5:
            raise InvalidParameterError(f"side {side!r} requires p on the matching side of 1/2")
        return cls("measure-comparison", {"p": p, "exponent": float(exponent)}, float(exponent),
                   side=side, bias=p, needs_keller=False)

    @classmethod
    def half_cube(cls, p: float, side: str = "lower"):
        """‖R(p,0) f_L‖_{2,1/2} <= ‖f_L‖_{1+1/(1-log2(1-p)), 1/2} (R(0,p), f_U for 'upper')."""
        p = check_bias(p)
        delta = transform_attenuation(p)
        pbar = (1.0 - p) / 2.0
        return cls("half-cube-R", {"p": p}, directed_exponent(p), side=side, delta=delta,
                   pbar=pbar, p_dir=p, keller_ok=keller_condition(pbar, delta))

    @classmethod
    def asymptotic(cls, p: float, side: str = "lower", c2: float = 2.0):
        """Half-cube bound with the second-order exponent 2 - p log2(e) + c2 p^2."""
        p = check_bias(p)
        delta = transform_attenuation(p)
        pbar = (1.0 - p) / 2.0
        return cls("asymptotic", {"p": p, "c2": c2}, asymptotic_exponent(p, c2), side=side,
                   delta=delta, pbar=pbar, p_dir=p, keller_ok=keller_condition(pbar, delta))

    @classmethod
    def general(cls, p1: float, p2: float):
        """‖R(p1,p2) f_L‖_{2,1/2} <= ‖f_L‖_{general exponent, 1/2}, p1 >= p2, both <= 1/4."""
        params = NoiseParams(p1, p2)
        if not (params.p1 >= params.p2 and params.p1 <= 0.25):
            raise InvalidParameterError(f"need p1 >= p2 and p1, p2 <= 1/4; got ({p1}, {p2})")
        p_sym, p_dir = decompose(params)
        delta1 = transform_attenuation(p_dir)
        delta2 = 1.0 - 2.0 * p_sym
        pbar = (1.0 - p_dir) / 2.0
        delta = delta1 * delta2
        return cls("general-R", {"p1": params.p1, "p2": params.p2},
                   general_exponent(params.p1, params.p2), delta=delta, pbar=pbar, p_dir=p_dir,
                   delta1=delta1, delta2=delta2, keller_ok=keller_condition(pbar, delta))

    @classmethod
    def unrestricted(cls, p: float, exponent: float = 2.0):
        """R(p,0) on an arbitrary f, with a pinned exponent; not a theorem."""
        return cls("unrestricted-R", {"p": _check_prob("p", p), "exponent": float(exponent)},
                   float(exponent), p_dir=float(p), needs_keller=False)


def _check_support(values: np.ndarray, side: str):
    d = _dim_of_length(values.shape[-1])
    allowed = lower_half_mask(d) if side == "lower" else upper_half_mask(d)
    if np.any(values[..., ~allowed] != 0.0):
        half = "L = {H(x) <= d/2}" if side == "lower" else "U = {H(x) >= d/2}"
        raise InvalidParameterError(f"function has support outside {half}")


def hypercontractivity_gap_array(values: np.ndarray, case: HypercontractivityCase) -> np.ndarray:
    """RHS - LHS of the case's inequality, along the last axis.

    Nonnegative (up to ~1e-12 of float noise) certifies the inequality for that
    function.  Raises :class:`NotApplicable` when the biased-bound precondition
    fails and :class:`InvalidParameterError` for half-cube variants on functions
    with support in the wrong half.
    """
    if not case.applicable:
        raise NotApplicable(f"{case.variant} {case.params}: Keller precondition fails")
    values = np.asarray(values, dtype=np.float64)
    r = case.exponent
    v = case.variant
    if v in ("keller", "biased-tau"):
        lhs = norm_array(apply_tau_array(values, case.delta, case.bias), case.bias, 2.0)
        rhs = norm_array(values, case.bias, r)
    elif v == "measure-comparison":
        _check_support(values, case.side)
        lhs = norm_array(values, case.bias, r) ** r
        rhs = norm_array(values, 0.5, r) ** r
    elif v in ("half-cube-R", "asymptotic"):
        _check_support(values, case.side)
        p1, p2 = (case.p_dir, 0.0) if case.side == "lower" else (0.0, case.p_dir)
        lhs = norm_array(apply_asymmetric_array(values, p1, p2), 0.5, 2.0)
        rhs = norm_array(values, 0.5, r)
    elif v == "general-R":
        _check_support(values, "lower")
        lhs = norm_array(apply_asymmetric_array(values, case.params["p1"], case.params["p2"]), 0.5, 2.0)
        rhs = norm_array(values, 0.5, r)
    else:  # unrestricted-R
        lhs = norm_array(apply_asymmetric_array(values, case.p_dir, 0.0), 0.5, 2.0)
        rhs = norm_array(values, 0.5, r)
    return rhs - lhs


def hypercontractivity_gap(f: CubeFunction, case: HypercontractivityCase) -> float:
    return float(hypercontractivity_gap_array(f.values, case))
