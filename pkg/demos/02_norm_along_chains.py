"""Operator norms as limits of ||zeta_M|| along a nested chain.

A rigorous tail bound turns the monotone sequence into a certified
interval; without one the estimator only reports that it stabilized, and an
unbounded functional shows up as steady growth.

Run: python demos/02_norm_along_chains.py
"""

import math

from antidual_lab import Constant, PowerLaw, SubspaceChain, operator_norm_estimate, power_law_tail
from antidual_lab import WeightedSpace

space = WeightedSpace()
prefix = SubspaceChain.prefix()

est = operator_norm_estimate(space, PowerLaw(1.0, tail_bound=lambda n: 1 / n), prefix, 10_000, 1e-4)
print(f"c_i = 1/i      {est.verdict.value}: {est.value:.7f} <= ||zeta|| <= {est.value + est.error:.7f}"
      f"  after {est.steps} steps   (pi/sqrt 6 = {math.pi / math.sqrt(6):.7f})")

s = 1.5
est = operator_norm_estimate(space, PowerLaw(s, tail_bound=power_law_tail(s)), prefix, 1_000_000, 1e-5)
print(f"c_i = i^-1.5   {est.verdict.value}: {est.value:.7f} (+{est.error:.1e}), squared ~ zeta(3) = 1.2020569")

est = operator_norm_estimate(space, PowerLaw(2.0), prefix, 10_000, 1e-8)
print(f"c_i = 1/i^2    {est.verdict.value} (no tail bound): {est.value:.9f}, error {est.error}")

est = operator_norm_estimate(space, Constant(1), prefix, 4096)
print(f"c_i = 1        {est.verdict.value}: ||zeta_Mn||^2 = {est.squared[:5].tolist()} ..., "
      f"fitted exponent {est.exponent:.4f}")
