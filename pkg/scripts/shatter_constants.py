"""Heavy-set sizes and the empirical c1 as the heavy threshold constant c0 grows.

At the default c0 = 0.01 the threshold a^(c0 eps) is within 0.3% of 1 and no
point is heavy; larger c0 gives nonempty heavy sets and a finite c1_max.
"""

import argparse

from dirhyper import shatter, verify
from dirhyper.cli import shatter_families

ap = argparse.ArgumentParser()
ap.add_argument("--dim", type=int, default=14)
ap.add_argument("--families", type=int, default=100)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

print("c0     eps    mu    max|B|/2^d   min c1_max")
for c0 in (0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99):
    for eps, mu in ((0.05, 10.0), (0.05, 20.0), (0.1, 10.0), (0.1, 20.0)):
        sp = shatter.ShatterParams(eps, mu, c0, 0.01)
        rng = verify.cell_rng(args.seed, 8)
        res = [shatter.shattering_report(A, sp, a)
               for _, a, A in shatter_families(args.dim, args.families, rng, 4, 7)]
        print(f"{c0:<6} {eps:<6} {mu:<5} {max(r.lhs for r in res):<12.5f} {min(r.c1_max for r in res):.4g}")
