"""Rounding chain LP solutions into non-preemptive schedules.

Each job samples one of its chains with probability z (renormalized when a
job's chain mass exceeds 1), draws theta from a clipped-uniform distribution
(default clip 1/5100), and takes pseudo-release tau = A(theta * p).  Machines
run their jobs in increasing tau order with every start held at or after tau;
that fractional-start schedule is the object the ratio bound is proven for
and is the cost used by the estimator.  The emitted schedule additionally
rounds each start up to the next integer and re-packs in the same order,
which never violates a release (tau always exceeds it).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain_lp import ChainLpError, ChainSolution
from .chains import chain_eval_many
from .distributions import OffsetDistribution
from .instance import Instance, NonPreemptiveSchedule

DEFAULT_CLIP = 1.0 / 5100.0


def default_offset_distribution() -> OffsetDistribution:
    return OffsetDistribution.clipped_uniform(DEFAULT_CLIP)


@dataclass(frozen=True)
class PreemptiveRatioEstimate:
    mean_ratio: float
    std_error: float
    lp_objective: float
    mean_objective: float
    mean_integral_objective: float
    trials: int


class _ChainSampler:
    """Per-job categorical over solution chains, padded for vector lookups."""

    def __init__(self, inst: Instance, sol: ChainSolution):
        self.inst = inst
        groups = sol.support_by_job(inst.num_jobs)
        self.per_job = []
        for j, group in enumerate(groups):
            if not group:
                raise ChainLpError(f"job {j} has no chain in the solution")
            mass = sum(z for _, z in group)
            if mass < 1.0 - 1e-6:
                raise ChainLpError(f"job {j} chain mass {mass:.8f} below 1")
            probs = np.array([z for _, z in group]) / mass
            machines = np.array([c.machine for c, _ in group], dtype=np.int64)
            sizes = np.array([len(c.slots) for c, _ in group], dtype=np.int64)
            width = int(sizes.max())
            slot_matrix = np.zeros((len(group), width), dtype=np.int64)
            for k, (c, _) in enumerate(group):
                slot_matrix[k, : len(c.slots)] = c.slots
            self.per_job.append((np.cumsum(probs), machines, sizes, slot_matrix))

    def draw(self, rng: np.random.Generator, trials: int):
        n = self.inst.num_jobs
        machine = np.empty((trials, n), dtype=np.int64)
        size = np.empty((trials, n), dtype=np.int64)
        chain_idx = np.empty((trials, n), dtype=np.int64)
        slot_matrices = []
        for j, (cdf, machines, sizes, slot_matrix) in enumerate(self.per_job):
            k = np.searchsorted(cdf, rng.random(trials), side="right")
            np.clip(k, 0, len(cdf) - 1, out=k)
            chain_idx[:, j] = k
            machine[:, j] = machines[k]
            size[:, j] = sizes[k]
            slot_matrices.append(slot_matrix)
        return machine, size, chain_idx, slot_matrices


def simulate_preemptive_rounding(
    inst: Instance,
    sol: ChainSolution,
    dist: OffsetDistribution,
    rng: np.random.Generator,
    trials: int,
):
    """Returns (fractional-start completions, integral completions, tau)."""
    sampler = _ChainSampler(inst, sol)
    machine, size, chain_idx, slot_matrices = sampler.draw(rng, trials)
    n = inst.num_jobs
    theta = dist.sample(rng, (trials, n))
    tau = np.empty((trials, n))
    for j in range(n):
        work = theta[:, j] * size[:, j]
        tau[:, j] = chain_eval_many(slot_matrices[j], chain_idx[:, j], work)

    sizef = size.astype(float)
    span = float(tau.max(initial=0.0)) + 1.0
    order = np.argsort(machine * span + tau, axis=1, kind="stable")
    mach_sorted = np.take_along_axis(machine, order, axis=1)
    tau_sorted = np.take_along_axis(tau, order, axis=1)
    size_sorted = np.take_along_axis(sizef, order, axis=1)
    frac_sorted = np.empty((trials, n))
    int_sorted = np.empty((trials, n))
    prev_frac = np.zeros(trials)
    prev_int = np.zeros(trials)
    prev_mach = np.full(trials, -1, dtype=np.int64)
    for k in range(n):
        same = mach_sorted[:, k] == prev_mach
        begin_frac = np.maximum(tau_sorted[:, k], np.where(same, prev_frac, 0.0))
        begin_int = np.maximum(np.ceil(tau_sorted[:, k]), np.where(same, prev_int, 0.0))
        frac_sorted[:, k] = begin_frac + size_sorted[:, k]
        int_sorted[:, k] = begin_int + size_sorted[:, k]
        prev_frac = frac_sorted[:, k]
        prev_int = int_sorted[:, k]
        prev_mach = mach_sorted[:, k]
    completion_frac = np.empty((trials, n))
    completion_int = np.empty((trials, n))
    np.put_along_axis(completion_frac, order, frac_sorted, axis=1)
    np.put_along_axis(completion_int, order, int_sorted, axis=1)
    return completion_frac, completion_int, (machine, tau)


def round_preemptive_once(
    inst: Instance,
    sol: ChainSolution,
    dist: OffsetDistribution | None = None,
    rng: np.random.Generator | None = None,
):
    """One trial; returns the integral schedule plus (fractional objective,
    integral objective, tau draws)."""
    dist = dist or default_offset_distribution()
    rng = rng if rng is not None else np.random.default_rng()
    frac, integral, (machine, tau) = simulate_preemptive_rounding(inst, sol, dist, rng, 1)
    sizes = inst.sizes[np.arange(inst.num_jobs), machine[0]]
    starts = np.rint(integral[0] - sizes).astype(np.int64)
    sched = NonPreemptiveSchedule(machine=machine[0], start=starts)
    w = inst.weights
    return sched, float(frac[0] @ w), float(integral[0] @ w), tau[0]


def estimate_ratio_preemptive(
    inst: Instance,
    sol: ChainSolution,
    trials: int,
    seed: int,
    dist: OffsetDistribution | None = None,
) -> PreemptiveRatioEstimate:
    """Monte Carlo mean of (fractional-start objective) / (chain LP value)."""
    if trials < 1:
        raise ValueError("need at least one trial")
    dist = dist or default_offset_distribution()
    rng = np.random.default_rng(seed)
    frac, integral, _ = simulate_preemptive_rounding(inst, sol, dist, rng, trials)
    w = inst.weights
    objectives = frac @ w
    ratios = objectives / sol.objective
    sem = float(ratios.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return PreemptiveRatioEstimate(
        mean_ratio=float(ratios.mean()),
        std_error=sem,
        lp_objective=sol.objective,
        mean_objective=float(objectives.mean()),
        mean_integral_objective=float((integral @ w).mean()),
        trials=trials,
    )
