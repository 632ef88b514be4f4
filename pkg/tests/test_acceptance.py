"""Acceptance criteria 1-8, each printing one PASS/FAIL line.

Run under pytest or directly: ``python tests/test_acceptance.py``.
"""

import sys
import time

import pytest

from dirhyper import bregman, instances, shatter, verify
from dirhyper.cli import pm_sweep, shatter_families

P_GRID = [round(0.05 + 0.1 * i, 2) for i in range(10)]
NOISE_PS = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3]
LINES = []


def report(n, ok, detail, capsys=None):
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} | {detail}"
    LINES.append(line)
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


def criterion_1():
    t = time.perf_counter()
    s = verify.fourier_checks(range(1, 13), P_GRID, 200, seed=1, naive_max_dim=8, ortho_max_dim=5)
    dt = time.perf_counter() - t
    worst = {c: max(r.worst for r in s.results if r.check == c)
             for c in ("parseval", "orthonormality", "round-trip", "butterfly-vs-naive")}
    ok = not s.violations and all(v <= 1e-10 for v in worst.values()) and dt <= 60
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f"; {s.trials} trials; {dt:.1f}s"
    return ok, detail


def criterion_2():
    t = time.perf_counter()
    s = verify.identity_checks(range(1, 11), NOISE_PS + [0.45], 200, seed=2)
    dt = time.perf_counter() - t
    worst = {c: max(r.worst for r in s.results if r.check == c)
             for c in ("decomposition", "transform-relation", "norm-identity")}
    ok = not s.violations and all(v <= 1e-10 for v in worst.values()) and dt <= 60
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f"; {len(s.results)} cells; {dt:.1f}s"
    return ok, detail


def criterion_3():
    t = time.perf_counter()
    cases = verify.hypercontractivity_cases([0.01, 0.02, 0.05, 0.1, 0.15, 0.2])
    s = verify.hypercontractivity_sweep(range(1, 13), cases, 100, seed=3, slack=-1e-12)
    fit = verify.asymptotic_check([0.001 * i for i in range(1, 21)], c_max=2.0)
    dt = time.perf_counter() - t
    applied = [r for r in s.results if r.status != "not-applicable"]
    worst = min(r.worst for r in applied)
    variants = sorted({r.params["variant"] for r in applied})
    ok = (not s.violations and s.trials >= 10_000 and fit.status == "pass" and dt <= 300
          and all(r.trials == 0 for r in s.skipped))
    detail = (f"{s.trials} trials over {variants}; worst gap {worst:.1e}; {len(s.skipped)} Keller-invalid "
              f"cells skipped; asymptotic C = {fit.worst:.3f} (<= 2); {dt:.1f}s")
    return ok, detail


def criterion_4():
    rows = [verify.counterexample(p) for p in (0.1, 0.5, 0.9)]
    ok = all(abs(r.params["norm_sq"] - r.params["expected_norm_sq"]) <= 1e-15 and r.worst < 0 for r in rows)
    detail = "; ".join(f"p={r.params['p']}: ||Rf||^2={r.params['norm_sq']:.6f} vs (p^2+1)/2, gap {r.worst:.4f}"
                       for r in rows)
    return ok, detail


def criterion_5():
    t = time.perf_counter()
    cfg = instances.GapInstanceConfig(10_000, 100, 0.01, 10.0, seed=42)
    rep = instances.gap_statistics(instances.generate(cfg))
    dt = time.perf_counter() - t
    m = rep.metrics
    ok = m["z_score"] <= 3 and m["separated_fraction"] >= 0.99 and dt <= 30
    detail = (f"per-bit mean {m['paired_per_bit_mean']:.6f} vs {m['analytic_per_bit_mean']:.6f} "
              f"(z = {m['z_score']:.2f}); separated {m['separated_fraction']:.2%}; {dt:.1f}s")
    return ok, detail


def criterion_6():
    t = time.perf_counter()
    d = 14
    fam_total, fam_fail, part_fail, c1s = 0, 0, [], []
    for ci, (eps, mu) in enumerate([(e, m) for e in (0.05, 0.1) for m in (10.0, 20.0)]):
        sp = shatter.ShatterParams(eps, mu, 0.01, 0.01)
        rng = verify.cell_rng(6, ci)
        for fam, a, A in shatter_families(d, 200, rng, 4, 7):
            res = shatter.shattering_report(A, sp, a)
            fam_total += 1
            fam_fail += not res.holds
            c1s.append(res.c1_max)
        for part in (shatter.make_partition("bit-sample", d, k=7),
                     shatter.make_partition("random-balanced", d, rng=verify.cell_rng(6, ci, 1), m=128)):
            pr = shatter.partition_shatter(part, sp)
            if not (pr.applicable and pr.holds):
                part_fail.append((part.kind, eps, mu))
    dt = time.perf_counter() - t
    ok = fam_fail == 0 and not part_fail and dt <= 300
    detail = (f"{fam_total} families, {fam_fail} heavy-set violations, min c1_max {min(c1s)}; "
              f"partition failures {part_fail}; {dt:.1f}s")
    return ok, detail


def criterion_7():
    worst = {}
    for name in bregman.GENERATORS:
        anchors = bregman.EmbeddingAnchors.for_generator(name, 0.2, 0.7)
        worst[name] = bregman.verify_embedding(name, anchors, 8)
    pm = pm_sweep(10_000, 12, 8, seed=7)
    bad = sum(not r.consistent for _, _, r in pm)
    ok = all(v <= 1e-9 for v in worst.values()) and bad == 0 and len(pm) == 10_000
    detail = f"max embedding residual {max(worst.values()):.1e}; partial match {bad}/{len(pm)} inconsistent"
    return ok, detail


def criterion_8():
    is_grid = bregman.asymmetry_grid("itakura-saito", (1.0, 4.0), 2001)
    is_hess = bregman.asymmetry_hessian("itakura-saito", (1.0, 4.0))
    l2 = bregman.asymmetry_grid("l2", (-3.0, 3.0), 2001)
    rel = abs(is_grid - is_hess) / is_hess
    ok = rel <= 0.02 and l2 == 1.0
    detail = (f"itakura-saito grid {is_grid:.4f} vs Hessian {is_hess:.1f} (rel gap {rel:.1%}, need <= 2%); "
              f"l2 grid {l2!r}")
    return ok, detail


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8]


@pytest.mark.parametrize("n", range(1, 9))
def test_acceptance(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    assert report(n, ok, detail, capsys), detail


if __name__ == "__main__":
    results = [report(i + 1, *fn()) for i, fn in enumerate(CRITERIA)]
    sys.exit(0 if all(results) else 1)
