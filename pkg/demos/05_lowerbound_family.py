"""
How much must independent rounding lose?
========================================

A family of instances where assigning jobs to machines independently by the
fractional marginals is provably wasteful: 1/eps + 1 identical machines,
1/eps huge jobs, and a stream of unit jobs whose weights decay so that
every integral plan in the fractional solution's support costs at most
(1 - 1/e)(T + 1).

Independent rounding occasionally sends a huge job on top of a machine's
unit-job stream; even scheduling each machine optimally afterwards, the
expected cost approaches e/(e-1) ~ 1.581 times the bound as T grows and
eps shrinks.  Desk-scale runs sit visibly below the limit but the upward
march in T is already clear.
"""

import math

from alphasched import build_lb_instance, run_lb_experiment

eps, T = 0.5, 8
inst, plan = build_lb_instance(eps, T)
print(f"small family (eps={eps}, T={T}): {inst.num_machines} machines, "
      f"{inst.num_jobs} jobs ({int(1/eps)} big of size {T} + {T} unit jobs)")
print(f"prescribed fractional plan costs {plan.objective:.4f} "
      f"<= (1 - 1/e)(T + 1) = {(1 - 1/math.e) * (T + 1):.4f}")

print("\nratio of independent rounding vs the bound (200 trials each):")
eps = 0.1
for T in (500, 1000, 2000, 4000):
    res = run_lb_experiment(eps, T, trials=200, seed=11)
    print(f"  eps={eps} T={T:5d}: ratio {res.ratio_main:.4f} +- {res.ratio_sem:.4f}"
          f"   (with the spare machine counted: {res.ratio_full:.4f})")
print(f"\nasymptotic limit: e/(e-1) = {math.e / (math.e - 1):.4f}")
