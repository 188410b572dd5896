"""Restricting an antifunctional to a finite subspace, and growing it one direction at a time.

Run: python demos/01_riesz_restriction.py
"""

import math

from antidual_lab import (
    FiniteSupport,
    PowerLaw,
    Subspace,
    Vector,
    WeightedSpace,
    evaluate,
    extend,
    hyperplane_update,
    inner_product,
    norm,
    orthonormalize,
    riesz_restrict,
)

e = Vector.basis

# weight 4 on the second coordinate: <x|y> = conj(x1) y1 + 4 conj(x2) y2 + ...
space = WeightedSpace(1.0, {2: 4.0})
zeta = FiniteSupport({1: 2, 2: 2})
M = Subspace.coordinate(space, [1, 2])
zM = riesz_restrict(space, zeta, M)
print("representative of zeta on span{e1, e2}:", zM)
for z in (e(1), e(2), e(1) - 3j * e(2)):
    print(f"  zeta({z}) = {evaluate(space, zeta, z)}   <z|zeta_M> = {inner_product(space, z, zM)}")

# a tilted subspace: the representative is the projection of the coefficient data
flat = WeightedSpace()
tilted = orthonormalize(flat, [e(1) + e(2)])
print("\nrestricted to span{e1 + e2}:", riesz_restrict(flat, FiniteSupport({1: 1, 2: 3}), tilted))

# one new direction at a time: zeta_N = zeta_M + zeta(u) u
basel = PowerLaw(1.0)
M, zM = Subspace.zero(), Vector()
print("\nadding e1..e6 to the 1/i functional, norm^2 against the Basel partial sums:")
for k in range(1, 7):
    M, u = extend(flat, M, e(k))
    zM = hyperplane_update(flat, basel, zM, u)
    partial = sum(1 / i ** 2 for i in range(1, k + 1))
    print(f"  k={k}  ||zeta_M||^2 = {norm(flat, zM) ** 2:.12f}   sum 1/i^2 = {partial:.12f}")
print(f"  limit pi^2/6 = {math.pi ** 2 / 6:.12f}")
