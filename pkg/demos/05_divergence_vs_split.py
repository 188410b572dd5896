"""One pair, two answers.

xi = ones on even indices, eta = ones on odd indices.  Along chains that keep
even and odd coordinates apart every approximant <xi_M|eta_M> is exactly 0.
Along general chains the approximants can be pushed up by more than 1/2 at
every step, so the full net has no limit.  Both facts are computed below.

Run: python demos/05_divergence_vs_split.py
"""

import json

from antidual_lab import (
    Constant,
    IndexSet,
    Subspace,
    WeightedSpace,
    check_certificate,
    divergence_certificate,
    divergence_step,
    mask,
    split_partial_inner_product,
)

space = WeightedSpace()
even, odd = IndexSet.even(), IndexSet.odd()
xi, eta = mask(Constant(1), even), mask(Constant(1), odd)

o = split_partial_inner_product(space, xi, eta, even)
print(f"split chain: {o.verdict.value}, value {o.value}, error {o.error_bound}, "
      f"{len(o.trace)} approximants all zero: {not o.trace.values.any()}")

M = Subspace.coordinate(space, [1, 2, 3, 4])
u, N = divergence_step(space, xi, eta, M)
print(f"\none step from span{{e1..e4}}: u = {u}")

cert = divergence_certificate(space, xi, eta, k=10)
running = 0j
print("\ncertificate, 10 steps:")
for j, s in enumerate(cert.steps, 1):
    running += s.jump
    print(f"  step {j:2d}: dim {s.M.dim:2d} -> {s.M.dim + 1:2d}, jump {s.jump.real:+.3f}, <xi_M|eta_M> = {running.real:.3f}")
problems = check_certificate(space, cert, xi, eta)
print("independent re-check:", "clean" if not problems else problems)
print(f"serialized certificate: {len(json.dumps(cert.to_json()))} bytes of JSON")
