"""The partial inner product [xi|eta] = lim <xi_M|eta_M> and two consistency checks.

* On embedded vectors it is the inner product, and once the chain contains x
  the approximants are exactly constant.
* For bounded pairs it agrees with the value rebuilt from four operator norms.

Run: python demos/03_pairing_and_polarization.py
"""

from antidual_lab import (
    Constant,
    PowerLaw,
    SubspaceChain,
    Vector,
    WeightedSpace,
    embed,
    pairing_check,
    partial_inner_product,
    polarization_reconstruct,
    power_law_tail,
)

e = Vector.basis
space = WeightedSpace()
prefix = SubspaceChain.prefix()

x = 2 * e(1) - 1j * e(3)
r = pairing_check(space, x, Constant(1 + 1j), prefix)
print(f"[x'|eta] along the prefix chain: {r.chain_value} from step {r.first_step} on; eta(x) = {r.direct_value}")

h = PowerLaw(1.0, tail_bound=lambda n: 1 / n)
o = partial_inner_product(space, h, h, prefix, 1e-6, steps=2_000_000)
print(f"[h|h] for h_i = 1/i: {o.verdict.value}, {o.value.real:.9f} +- {o.error_bound:.1e} "
      f"(certified={o.certified}, {len(o.trace)} steps)")

o = partial_inner_product(space, PowerLaw(2.0), PowerLaw(2.0), prefix, 1e-10)
print(f"without tail bounds the verdict is heuristic: certified={o.certified}, value {o.value.real:.10f}")

z = PowerLaw(1.5, tail_bound=power_law_tail(1.5))
xi, eta = z, PowerLaw(2.0, 1j, tail_bound=power_law_tail(2.0, 1j))
pol = polarization_reconstruct(space, xi, eta, prefix, 1e-6)
pip = partial_inner_product(space, xi, eta, prefix, 1e-6, steps=1_000_000)
print(f"polarization {pol:.8f}  vs  direct {pip.value:.8f}  (bound {pip.error_bound:.1e})")
print(f"zeta(3) by polarization: {polarization_reconstruct(space, z, z, prefix, 1e-6).real:.8f}")

o = partial_inner_product(space, Constant(1), Constant(1), prefix, steps=2000)
print(f"all-ones with itself: {o.verdict.value} after {len(o.trace)} steps, last value {o.trace.values[-1].real:g}")
o = partial_inner_product(space, Constant(1), embed(space, e(2)), prefix)
print(f"all-ones against an embedded e2: {o.verdict.value}, value {o.value.real:g}, error {o.error_bound}")
