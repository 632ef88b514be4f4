"""Search small cubes for violations of the biased tau bound, inside and outside its stated range.

For each (pbar, delta) the scale-free gap 1 - ||tau_delta f||_{2,p} / ||f||_{r,p}
is minimized over f with Nelder-Mead from random starts.  Cells where the square-root
condition holds but delta > 1 show negative gaps already at d = 1.
"""

import argparse
import math

import numpy as np
from scipy.optimize import minimize

from dirhyper.cube_fn import norm_array
from dirhyper.noise import apply_tau_array, keller_exponent

ap = argparse.ArgumentParser()
ap.add_argument("--dims", default="1,2")
ap.add_argument("--starts", type=int, default=20)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()
rng = np.random.default_rng(args.seed)


def sqrt_condition(pbar, delta):
    return delta**2 * math.sqrt(pbar * math.log2(1 / pbar) / (1 - pbar)) <= 1


print("d  pbar   delta  sqrt-cond  min-rel-gap")
for d in (int(x) for x in args.dims.split(",")):
    for pbar in (0.01, 0.05, 0.1, 0.3, 0.5):
        for delta in (0.5, 1.0, 1.1, 1.2):
            r = keller_exponent(pbar, delta)

            def gap(v):
                den = float(norm_array(v, pbar, r))
                if den < 1e-12:
                    return 0.0
                return 1.0 - float(norm_array(apply_tau_array(v, delta, pbar), pbar, 2.0)) / den

            best = min(minimize(gap, rng.uniform(size=1 << d), method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000}).fun
                       for _ in range(args.starts))
            print(f"{d}  {pbar:<5}  {delta:<5}  {str(sqrt_condition(pbar, delta)):<9}  {best:+.3e}")
