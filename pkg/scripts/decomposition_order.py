"""Residuals of R(p1,p2) against both orders of composing the symmetric and directed stages."""

import numpy as np

from dirhyper.cube_fn import CubeFunction
from dirhyper.noise import NoiseParams, reversed_order_residual, verify_decomposition

rng = np.random.default_rng(0)
print("p1     p2     R_dir(T f)   T(R_dir f)")
for p1, p2 in ((0.3, 0.1), (0.2, 0.05), (0.05, 0.01), (0.5, 0.2)):
    F = [CubeFunction(8, rng.uniform(size=256)) for _ in range(50)]
    a = max(verify_decomposition(f, NoiseParams(p1, p2)) for f in F)
    b = max(reversed_order_residual(f, NoiseParams(p1, p2)) for f in F)
    print(f"{p1:<6} {p2:<6} {a:<12.2e} {b:.2e}")
