"""Gap-instance statistics over a small (d, eps, mu) grid, one line per configuration."""

import argparse
import time

from dirhyper.instances import GapInstanceConfig, gap_statistics, generate

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=100)
ap.add_argument("--seed", type=int, default=42)
args = ap.parse_args()

print("d      eps    mu     z      outside  separated  min-ratio  cross/(mu d)  regime  secs")
for d in (2_000, 10_000, 30_000):
    for eps, mu in ((0.01, 10.0), (0.01, 100.0), (0.05, 20.0)):
        t = time.perf_counter()
        cfg = GapInstanceConfig(d, args.n, eps, mu, seed=args.seed)
        m = gap_statistics(generate(cfg)).metrics
        print(f"{d:<6} {eps:<6} {mu:<6} {m['z_score']:<6.2f} {m['fraction_outside_ratio_band']:<8.2f} "
              f"{m['separated_fraction']:<10.2f} {m['min_ratio']:<10.1f} {m['cross_constant_mu_d']:<13.4f} "
              f"{str(cfg.in_concentration_regime):<7} {time.perf_counter() - t:.1f}")
