"""The rank-one form u -> <x|u><u|y> on unit vectors.

Its supremum is at least 1/2 for any unit x, y; the witness
u = (x + e^{-i theta} y)/||.|| reaches (1 + |<x|y>|)/2.  Over real unit u the
values fill an interval of length one.

Run: python demos/04_radius_witness.py
"""

import math

import numpy as np

from antidual_lab import (
    Vector,
    WeightedSpace,
    inner_product,
    norm,
    numerical_radius_witness,
    real_range_extremes,
    real_range_interval,
    sample_real_range,
)

e = Vector.basis
space = WeightedSpace()
rng = np.random.default_rng(3)

for x, y in [(e(1), e(2)), (e(1), 1j * e(1)), (e(1), (e(1) + math.sqrt(3) * e(2)) / 2)]:
    u, value = numerical_radius_witness(space, x, y)
    print(f"x={x}  y={y}\n  witness u={u}  value {value:.6f}  (1+|<x|y>|)/2 = {(1 + abs(inner_product(space, x, y))) / 2:.6f}")

x = Vector({1: 0.6, 2: 0.8j})
y = Vector({2: 1 / math.sqrt(2), 4: -1j / math.sqrt(2)})
_, value = numerical_radius_witness(space, x, y)
best = 0.0
for _ in range(20_000):
    c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    u = Vector(dict(zip(range(1, 5), c.tolist())))
    u = u / norm(space, u)
    best = max(best, abs(inner_product(space, x, u) * inner_product(space, u, y)))
print(f"\nrandom search over 20000 unit vectors: best {best:.6f} <= witness {value:.6f}")

x, y = e(1), (e(1) + math.sqrt(3) * e(2)) / 2
lo, hi = real_range_interval(space, x, y)
s = sample_real_range(space, x, y, 10_000, rng)
(vlo, _), (vhi, _) = real_range_extremes(space, x, y)
print(f"\nreal range for x=e1, y=(e1+sqrt3 e2)/2: [{lo:.4f}, {hi:.4f}]")
print(f"  10000 samples span [{s.min():.4f}, {s.max():.4f}]; optimizer attains {vlo:.6f} and {vhi:.6f}")
