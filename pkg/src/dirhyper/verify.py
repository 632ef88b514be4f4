"""Sweep drivers: Fourier checks, operator identities and hypercontractivity grids.

Each driver returns a :class:`CheckResult` per grid cell.  Cells are evaluated
in a fixed order (optionally on a thread pool) and every random function is
drawn from a stream keyed by the cell index, so results do not depend on
scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cube_fn import (
    biased_fourier_array,
    check_bias,
    inverse_fourier_array,
    lower_half_mask,
    measure_weights,
    norm_array,
    upper_half_mask,
)
from .noise import (
    HypercontractivityCase,
    NoiseParams,
    apply_asymmetric_array,
    asymptotic_fit,
    decomposition_residual_array,
    hypercontractivity_gap_array,
    norm_identity_residual_array,
    transform_relation_residual_array,
)

GAP_SLACK = -1e-12
IDENTITY_TOL = 1e-10


@dataclass
class CheckResult:
    """Outcome of one grid cell: ``status`` is pass, violation or not-applicable."""

    check: str
    params: dict
    trials: int
    worst: float
    status: str
    witness: dict | None = None

    def row(self) -> dict:
        return {"check": self.check, **{k: self.params[k] for k in sorted(self.params)},
                "trials": self.trials, "worst": self.worst, "status": self.status}


@dataclass
class SweepSummary:
    results: list = field(default_factory=list)

    @property
    def trials(self) -> int:
        return sum(r.trials for r in self.results)

    @property
    def violations(self) -> list:
        return [r for r in self.results if r.status == "violation"]

    @property
    def skipped(self) -> list:
        return [r for r in self.results if r.status == "not-applicable"]

    def by_check(self) -> dict:
        out: dict = {}
        for r in self.results:
            c = out.setdefault(r.check, {"cells": 0, "trials": 0, "violations": 0, "skipped": 0})
            c["cells"] += 1
            c["trials"] += r.trials
            c["violations"] += r.status == "violation"
            c["skipped"] += r.status == "not-applicable"
        return out


def worker_count() -> int:
    return max(1, int(os.environ.get("DIRHYPER_THREADS", "1")))


def cell_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def random_functions(d: int, count: int, rng: np.random.Generator, support=None) -> np.ndarray:
    """Half uniform [0,1] values, half random indicators of density 2^-k, k = 1..max(1, d//2).

    ``support`` restricts all functions to a boolean mask of the cube.
    """
    n = 1 << d
    n_uniform = count // 2
    F = np.empty((count, n))
    F[:n_uniform] = rng.uniform(size=(n_uniform, n))
    ks = np.arange(1, max(1, d // 2) + 1)
    dens = 2.0 ** -ks[np.arange(count - n_uniform) % len(ks)]
    F[n_uniform:] = (rng.uniform(size=(count - n_uniform, n)) < dens[:, None]).astype(np.float64)
    if support is not None:
        F *= support
    return F


def _map(fn, items, workers=None):
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


def _status(ok: bool) -> str:
    return "pass" if ok else "violation"


# --------------------------------------------------------------------------
# Fourier


def naive_fourier_array(values: np.ndarray, p: float) -> np.ndarray:
    """Coefficients straight from the definition, O(4^d): sum_x kappa(x) f(x) chi_S(x)."""
    p = check_bias(p)
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[-1]
    d = n.bit_length() - 1
    masks = np.arange(n, dtype=np.int64)
    S = masks[:, None]
    x = masks[None, :]
    ones = np.bitwise_count(S & x)
    zeros = np.bitwise_count(S & ~x & (n - 1))
    chi = math.sqrt(p / (1 - p)) ** zeros * (-math.sqrt((1 - p) / p)) ** ones
    return (values * measure_weights(p, d)) @ chi.T


def fourier_checks(dims, ps, count: int, seed: int = 0, naive_max_dim: int = 8,
                   ortho_max_dim: int = 5, tol: float = IDENTITY_TOL) -> SweepSummary:
    """Parseval, round trip, butterfly-vs-naive and Gram-matrix orthonormality."""
    cells = [(d, p) for d in dims for p in ps]

    def run(idx_cell):
        idx, (d, p) = idx_cell
        F = random_functions(d, count, cell_rng(seed, 0, idx))
        coeffs = biased_fourier_array(F, p)
        energy = norm_array(F, p, 2.0) ** 2
        pars = float(np.max(np.abs((coeffs**2).sum(axis=-1) - energy) / np.maximum(energy, 1e-300)))
        back = inverse_fourier_array(coeffs, p)
        scale = np.maximum(np.max(np.abs(F), axis=-1, keepdims=True), 1e-300)
        rt = float(np.max(np.abs(back - F) / scale))
        out = [
            CheckResult("parseval", {"d": d, "p": p}, count, pars, _status(pars <= tol)),
            CheckResult("round-trip", {"d": d, "p": p}, count, rt, _status(rt <= tol)),
        ]
        if d <= naive_max_dim:
            naive = naive_fourier_array(F, p)
            cs = np.maximum(np.max(np.abs(naive), axis=-1, keepdims=True), 1e-300)
            bf = float(np.max(np.abs(coeffs - naive) / cs))
            out.append(CheckResult("butterfly-vs-naive", {"d": d, "p": p}, count, bf, _status(bf <= tol)))
        if d <= ortho_max_dim:
            basis = inverse_fourier_array(np.eye(1 << d), p)  # row S is chi_S
            gram = (basis * measure_weights(p, d)) @ basis.T
            og = float(np.max(np.abs(gram - np.eye(1 << d))))
            out.append(CheckResult("orthonormality", {"d": d, "p": p}, (1 << d) ** 2, og, _status(og <= tol)))
        return out

    summary = SweepSummary()
    for res in _map(run, list(enumerate(cells))):
        summary.results.extend(res)
    return summary


# --------------------------------------------------------------------------
# operator identities


def decomposition_grid(ps):
    """(p1, p2) pairs from ``ps`` with p1 >= p2, p1 <= 1 - p2, p2 < 1/2, plus p2 = 0."""
    vals = sorted(set([0.0, *ps]))
    return [(p1, p2) for p1 in vals for p2 in vals
            if p1 > 0 and NoiseParams(p1, p2).decomposable]


def identity_checks(dims, ps, count: int, seed: int = 0, tol: float = IDENTITY_TOL) -> SweepSummary:
    """Decomposition, transform relation (both directions) and norm identity residuals."""
    cells = []
    for d in dims:
        for p1, p2 in decomposition_grid(ps):
            cells.append(("decomposition", d, {"p1": p1, "p2": p2}))
        for p in ps:
            cells.append(("transform-relation", d, {"p": p}))
            cells.append(("norm-identity", d, {"p": p}))

    def run(idx_cell):
        idx, (check, d, params) = idx_cell
        F = random_functions(d, count, cell_rng(seed, 1, idx))
        F[: count // 4] *= lower_half_mask(d)  # include half-cube functions
        if check == "decomposition":
            res = decomposition_residual_array(F, NoiseParams(params["p1"], params["p2"]))
        elif check == "transform-relation":
            res = transform_relation_residual_array(F, params["p"])
        else:
            res = norm_identity_residual_array(F, params["p"])
        i = int(np.argmax(res))
        worst = float(res[i])
        ok = worst <= tol
        witness = None if ok else {"values": F[i].tolist(), **params}
        return CheckResult(check, {"d": d, **params}, count, worst, _status(ok), witness)

    return SweepSummary(_map(run, list(enumerate(cells))))


# --------------------------------------------------------------------------
# hypercontractivity


def hypercontractivity_cases(ps, keller_ps=None, keller_deltas=None,
                             measure_ps=None, measure_exponents=None):
    """Every inequality instance of the default sweep, including Keller-invalid ones."""
    keller_ps = keller_ps if keller_ps is not None else sorted(set(ps) | {0.3, 0.5, 0.7, 0.9})
    keller_deltas = keller_deltas if keller_deltas is not None else (0.25, 0.5, 0.75, 1.0, 1.25)
    measure_ps = measure_ps if measure_ps is not None else (0.5, 0.6, 0.75, 0.9, 0.99)
    measure_exponents = measure_exponents if measure_exponents is not None else (1.5, 2.0, 3.0)
    cases = []
    for p in keller_ps:
        for delta in keller_deltas:
            cases.append(HypercontractivityCase.keller(p, delta))
    for p in ps:
        for side in ("lower", "upper"):
            cases.append(HypercontractivityCase.biased_tau(p, side))
            cases.append(HypercontractivityCase.half_cube(p, side))
            cases.append(HypercontractivityCase.asymptotic(p, side))
    for q in measure_ps:
        for r in measure_exponents:
            cases.append(HypercontractivityCase.measure_comparison(q, r, "lower"))
            cases.append(HypercontractivityCase.measure_comparison(1.0 - q, r, "upper"))
    gen_vals = sorted({0.0, *[p for p in ps if p <= 0.25]})
    for p1 in gen_vals:
        for p2 in gen_vals:
            if p1 > 0 and p1 >= p2:
                cases.append(HypercontractivityCase.general(p1, p2))
    return cases


def _case_support(case: HypercontractivityCase, d: int):
    if case.variant in ("half-cube-R", "asymptotic", "measure-comparison"):
        return lower_half_mask(d) if case.side == "lower" else upper_half_mask(d)
    if case.variant == "general-R":
        return lower_half_mask(d)
    return None


def hypercontractivity_sweep(dims, cases, count: int, seed: int = 0,
                             slack: float = GAP_SLACK) -> SweepSummary:
    """Evaluate every case on ``count`` random functions per dimension."""
    cells = [(d, c) for d in dims for c in cases]

    def run(idx_cell):
        idx, (d, case) = idx_cell
        params = {"d": d, "variant": case.variant, "side": case.side, **case.params,
                  "exponent": case.exponent}
        if not case.applicable:
            return CheckResult("hypercontractivity", params, 0, math.nan, "not-applicable")
        F = random_functions(d, count, cell_rng(seed, 2, idx), _case_support(case, d))
        gaps = hypercontractivity_gap_array(F, case)
        i = int(np.argmin(gaps))
        worst = float(gaps[i])
        ok = worst >= slack
        witness = None if ok else {"values": F[i].tolist(), **params}
        return CheckResult("hypercontractivity", params, count, worst, _status(ok), witness)

    return SweepSummary(_map(run, list(enumerate(cells))))


def counterexample(p: float) -> CheckResult:
    """The one-bit function f(0)=0, f(1)=1 against unrestricted exponent-2 contraction.

    ``worst`` holds RHS - LHS; a negative value is the expected failure.  The
    squared norm of R(p,0) f is compared with (p^2 + 1)/2.
    """
    f = np.array([0.0, 1.0])
    case = HypercontractivityCase.unrestricted(p, 2.0)
    gap = float(hypercontractivity_gap_array(f, case))
    sq = float(norm_array(apply_asymmetric_array(f, p, 0.0), 0.5, 2.0) ** 2)
    params = {"d": 1, "p": p, "exponent": 2.0, "norm_sq": sq, "expected_norm_sq": (p * p + 1) / 2}
    status = "violation" if gap < 0 else "pass"
    return CheckResult("counterexample", params, 1, gap, status,
                       {"values": f.tolist(), "p": p, "exponent": 2.0} if gap < 0 else None)


def asymptotic_check(ps, c_max: float = 2.0) -> CheckResult:
    fit = asymptotic_fit(ps)
    return CheckResult("asymptotic-fit", {"p_max": float(max(ps)), "c_max": c_max}, len(ps),
                       fit["max_c"], _status(fit["max_c"] <= c_max))


__all__ = [
    "CheckResult",
    "SweepSummary",
    "random_functions",
    "naive_fourier_array",
    "fourier_checks",
    "identity_checks",
    "hypercontractivity_cases",
    "hypercontractivity_sweep",
    "counterexample",
    "asymptotic_check",
]
