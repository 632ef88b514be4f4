"""Grid asymmetry vs Hessian ratio for every generator, at several grid sizes."""

import argparse

from dirhyper.bregman import asymmetry_grid, asymmetry_hessian

ap = argparse.ArgumentParser()
ap.add_argument("--grids", default="101,1001,4001")
args = ap.parse_args()
grids = [int(g) for g in args.grids.split(",")]

CASES = [("l2", (-3, 3)), ("kl", (0.1, 1)), ("itakura-saito", (1, 4)), ("itakura-saito", (0.1, 10)),
         ("exponential", (0, 1)), ("exponential", (-2, 2)), ("bit-entropy", (0.1, 0.9))]
print("generator       interval     hessian   " + "  ".join(f"grid{g:<7}" for g in grids))
for name, iv in CASES:
    cols = "  ".join(f"{asymmetry_grid(name, iv, g):<11.6f}" for g in grids)
    print(f"{name:<15} {str(iv):<12} {asymmetry_hessian(name, iv):<9.4f} {cols}")
