"""The classic divergent case: phi(z) = (1-z)(1+z) with a_n = 1 - 1/(n+2)^2.

Weights converging to 1 this fast leave the first column of the
re-expansion matrix bounded away from zero, so its column norms grow like
sqrt(N) and the matrix cannot be bounded.
"""

import numpy as np

from bandkern import BoundaryConfig, WeightSequence, c_column

cfg = BoundaryConfig.from_angles(["0", "1/2"])
weights = WeightSequence.power_law(2.0)

col = c_column(0, 4096, cfg, weights).real

print("entry (2,0) =", col[2], "   exact value: -7/16 =", -7 / 16)
print()
print("even entries of column 0 approach a nonzero limit:")
for m in (1, 5, 20, 100, 200, 1000, 2000):
    print(f"  c_(2m,0) at m={m:5d}: {col[2 * m]:+.10f}")

print()
norms = {N: float(np.linalg.norm(col[:N])) for N in (256, 1024, 4096)}
for N, v in norms.items():
    print(f"  l2 norm of column 0 over first {N:4d} rows: {v:8.4f}")
print(f"  growth 1024 -> 4096: {norms[4096] / norms[1024] - 1.0:+.1%}")
