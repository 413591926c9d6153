"""
Chain LP by column generation and preemptive rounding
=====================================================

A chain lists the exact unit slots one job occupies on one machine, so a
fractional chain assignment is an LP over exponentially many columns.  The
restricted master grows columns on demand: the pricing step finds, for each
(machine, job, completion time), the cheapest chain under the current
duals.

The rounded schedule is non-preemptive even though the relaxation allows
preemption: each job samples a chain and an offset, and machines run jobs
in pseudo-release order.  With a clipped-uniform offset law the expected
cost stays below 1.99971 times the chain LP value.
"""

import numpy as np

from alphasched import (
    Instance,
    brute_force_nonpreemptive,
    brute_force_preemptive,
    estimate_ratio_preemptive,
    evaluate_schedule,
    round_preemptive_once,
    solve_chain_lp,
    solve_interval_lp,
)

# A release-heavy single machine: an urgent short job arrives while a long
# cheap one is already running, so preemption genuinely helps.
inst = Instance(
    num_machines=1,
    num_jobs=3,
    sizes=[[5], [1], [2]],
    releases=[0, 2, 3],
    weights=[1.0, 10.0, 4.0],
)

chain = solve_chain_lp(inst)
interval = solve_interval_lp(inst)
opt_p, sched_p = brute_force_preemptive(inst)
opt_np, _ = brute_force_nonpreemptive(inst)
print(f"chain LP      {chain.objective:9.4f}   (after {chain.iterations} pricing rounds)")
print(f"interval LP   {interval.objective:9.4f}   (chains relax intervals, so chain <= interval)")
print(f"preemptive OPT{opt_p:9.4f}")
print(f"non-preempt OPT{opt_np:8.4f}   (preemption saves {opt_np - opt_p:.4f} here)")

print("\nchain LP support (machine, job, z, slots):")
for c, z in sorted(chain.chains, key=lambda cz: (cz[0].job, cz[0].slots)):
    print(f"  m{c.machine} j{c.job}  z={z:.3f}  slots={c.slots}")

print("\noptimal preemptive schedule slots per job:", list(sched_p.chains))

# Rounding: the emitted schedule is non-preemptive and release-feasible.
sched, frac_obj, int_obj, tau = round_preemptive_once(inst, chain, rng=np.random.default_rng(3))
print(f"\none trial: analysis cost {frac_obj:.4f}, emitted integral schedule costs "
      f"{evaluate_schedule(inst, sched).objective:.4f}")

est = estimate_ratio_preemptive(inst, chain, trials=20_000, seed=5)
print(f"20k trials: mean ratio vs chain LP = {est.mean_ratio:.4f} +- {est.std_error:.4f} "
      f"(certified bound 1.99971)")
