"""Configuration LP over chains, solved by column generation.

The master has one variable per generated chain, a covering row per job
(total chain mass at least 1) and a capacity row per occupied (machine,
slot).  Pricing is exact: for fixed machine, job and completion time C the
cheapest chain takes the p - 1 slots with the smallest slot duals before C
plus the slot ending at C; a sweep over C with a running smallest-(p-1)
multiset finds the best completion in O(horizon log horizon).

Column generation terminates cleanly when no chain prices below -1e-7 (the
master duals are then feasible for the full dual, certifying optimality,
re-checked by an independent post-hoc pass), or through the Lagrangian
pricing bound once it proves the master objective is within 1e-6 relative of
the true optimum.  Pricing runs against smoothed duals to damp the
oscillation degenerate masters produce.

For horizons too long to index slot by slot, the timeline can be compressed
into blocks with geometrically growing lengths: capacity is aggregated per
block, a chain's charged completion time becomes the right endpoint of its
last block, and pricing picks slot counts per block.  Concrete slots are
materialized greedily (earliest first) inside each chosen block.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .chains import Chain, earliest_chain
from .instance import Instance, horizon as instance_horizon
from .simplex import LinearProgram, solve_lp

PRICE_TOL = 1e-7
POSTHOC_TOL = 1e-6
MASS_TOL = 1e-6


class ChainLpError(RuntimeError):
    """Master infeasibility, stalled generation, or a failed certificate."""


@dataclass
class ChainSolution:
    chains: list  # [(Chain, z)]
    objective: float
    eta: np.ndarray  # dual per job
    xi: dict  # (machine, slot or block) -> dual, zero entries omitted
    horizon: int
    compressed: bool = False
    blocks: np.ndarray | None = None  # block endpoints when compressed
    iterations: int = 0
    gap_bound: float = 0.0  # certified distance to the true LP optimum

    def completion_cost(self, chain: Chain) -> float:
        """Charged completion: actual slot for exact mode, right endpoint of
        the final block in compressed mode."""
        if not self.compressed:
            return float(chain.completion)
        k = int(np.searchsorted(self.blocks, chain.completion, side="left"))
        return float(self.blocks[k])

    def support_by_job(self, num_jobs: int):
        groups = [[] for _ in range(num_jobs)]
        for chain, z in self.chains:
            groups[chain.job].append((chain, z))
        return groups

    def to_csv(self) -> str:
        lines = ["machine,job,z,slots"]
        for chain, z in sorted(self.chains, key=lambda cz: (cz[0].machine, cz[0].job, cz[0].slots)):
            slot_str = " ".join(str(t) for t in chain.slots)
            lines.append(f"{chain.machine},{chain.job},{z:.12g},{slot_str}")
        return "\n".join(lines) + "\n"


def enumerate_chains(release: int, size: int, horizon: int):
    """All slot tuples for a job of the given size (test-scale oracle)."""
    from itertools import combinations

    return combinations(range(release + 1, horizon + 1), size)


def price_chain(
    machine: int,
    job: int,
    xi_row: np.ndarray,
    eta_j: float,
    weight: float,
    size: int,
    release: int,
    horizon: int,
) -> tuple[Chain | None, float]:
    """Cheapest chain by reduced cost w * C + sum(xi over slots) - eta.

    xi_row[t - 1] is the dual of slot (t - 1, t].  Returns (chain, reduced
    cost) when the best chain prices below -1e-7, else (None, best cost).
    The sweep holds the p - 1 smallest duals seen so far in a two-heap
    selected/reserve structure.
    """
    p = size
    first_c = release + p
    if first_c > horizon:
        return None, math.inf
    # selected: max-heap (as negatives) of the p-1 cheapest slots in the
    # window; reserve: min-heap of the rest.
    selected: list = []
    reserve: list = []
    sel_sum = 0.0
    best_cost = math.inf
    best_c = -1
    for t in range(release + 1, first_c):
        heapq.heappush(selected, -xi_row[t - 1])
        sel_sum += xi_row[t - 1]
    for C in range(first_c, horizon + 1):
        if C > first_c:
            v = xi_row[C - 2]  # slot C-1 enters the window
            if len(selected) < p - 1:
                heapq.heappush(selected, -v)
                sel_sum += v
            elif selected and v < -selected[0]:
                worst = -heapq.heapreplace(selected, -v)
                sel_sum += v - worst
                heapq.heappush(reserve, worst)
            else:
                heapq.heappush(reserve, v)
        cost = weight * C + sel_sum + xi_row[C - 1] - eta_j
        if cost < best_cost - 1e-15:
            best_cost = cost
            best_c = C
    if best_cost >= -PRICE_TOL:
        return None, best_cost
    return _chain_for_completion(machine, job, xi_row, release, p, best_c), best_cost


def _chain_for_completion(machine, job, xi_row, release, p, C) -> Chain:
    """Cheapest chain completing exactly at C: the p - 1 smallest duals in
    the window plus the final slot."""
    window = xi_row[release : C - 1]
    order = np.argsort(window, kind="stable")[: p - 1]
    slots = sorted(int(release + 1 + k) for k in order)
    slots.append(C)
    return Chain(machine=machine, job=job, slots=tuple(slots))


def price_chain_multi(
    machine: int,
    job: int,
    xi_row: np.ndarray,
    eta_j: float,
    weight: float,
    size: int,
    release: int,
    horizon: int,
    buckets: int = 4,
) -> tuple[list, float]:
    """Like price_chain but returns the best violating chain per completion
    bucket (diverse columns speed up column generation); also returns the
    overall minimum reduced cost."""
    p = size
    first_c = release + p
    if first_c > horizon:
        return [], math.inf
    span = horizon - first_c + 1
    selected: list = []
    reserve: list = []
    sel_sum = 0.0
    best = [(math.inf, -1)] * buckets
    for t in range(release + 1, first_c):
        heapq.heappush(selected, -xi_row[t - 1])
        sel_sum += xi_row[t - 1]
    for C in range(first_c, horizon + 1):
        if C > first_c:
            v = xi_row[C - 2]
            if len(selected) < p - 1:
                heapq.heappush(selected, -v)
                sel_sum += v
            elif selected and v < -selected[0]:
                worst = -heapq.heapreplace(selected, -v)
                sel_sum += v - worst
                heapq.heappush(reserve, worst)
            else:
                heapq.heappush(reserve, v)
        cost = weight * C + sel_sum + xi_row[C - 1] - eta_j
        b = (C - first_c) * buckets // span
        if cost < best[b][0] - 1e-15:
            best[b] = (cost, C)
    overall = min(cost for cost, _ in best)
    out = []
    for cost, C in best:
        if C >= 0 and cost < -PRICE_TOL:
            out.append((_chain_for_completion(machine, job, xi_row, release, p, C), cost))
    return out, overall


def _greedy_disjoint_chains(inst: Instance, horizon: int) -> list[Chain]:
    """A feasible integral chain per job: fastest machine, earliest free
    slots.  Guarantees the initial master is feasible."""
    rel = inst.release_matrix()
    free = [np.ones(horizon + 1, dtype=bool) for _ in range(inst.num_machines)]
    chains = []
    order = sorted(range(inst.num_jobs), key=lambda j: (rel[j].min(), j))
    for j in order:
        sizes = np.where(inst.allowed_mask()[j], inst.sizes[j], np.iinfo(np.int64).max)
        i = int(np.argmin(sizes))
        p = inst.size(j, i)
        slots = []
        t = int(rel[j, i]) + 1
        while len(slots) < p:
            if t > horizon:
                raise ChainLpError(f"no room for job {j} by horizon {horizon}")
            if free[i][t]:
                free[i][t] = False
                slots.append(t)
            t += 1
        chains.append(Chain(machine=i, job=j, slots=tuple(slots)))
    return chains


def _solve_master(inst: Instance, columns: list[Chain], costs: np.ndarray):
    """LP over the current columns; returns (solution, eta, xi dict, slot key list)."""
    slot_keys = sorted({(c.machine, t) for c in columns for t in c.slots})
    slot_pos = {key: k for k, key in enumerate(slot_keys)}
    lp = LinearProgram(num_vars=len(columns))
    lp.set_objective(costs)
    for j in range(inst.num_jobs):
        idx = [k for k, c in enumerate(columns) if c.job == j]
        lp.add_row(np.array(idx), np.ones(len(idx)), ">=", 1.0)
    rows: list[list[int]] = [[] for _ in slot_keys]
    for k, c in enumerate(columns):
        for t in c.slots:
            rows[slot_pos[(c.machine, t)]].append(k)
    for members in rows:
        lp.add_row(np.array(members), np.ones(len(members)), "<=", 1.0)
    res = solve_lp(lp)
    if res.status != "optimal":
        raise ChainLpError(f"restricted master is {res.status}")
    eta = np.maximum(res.duals[: inst.num_jobs], 0.0)
    xi = {}
    for k, key in enumerate(slot_keys):
        v = -res.duals[inst.num_jobs + k]
        if v > 1e-12:
            xi[key] = float(v)
    return res, eta, xi


def _xi_matrix(inst: Instance, xi: dict, horizon: int) -> np.ndarray:
    mat = np.zeros((inst.num_machines, horizon))
    for (i, t), v in xi.items():
        mat[i, t - 1] = v
    return mat


def _price_all(inst: Instance, ximat: np.ndarray, eta: np.ndarray, H: int, seen: set):
    """Price every (machine, job) pair against the given duals.

    Returns (new chains, per-job cheapest chain cost mu_j).  The mu values
    certify a Lagrangian lower bound sum_j mu_j - sum xi on the LP optimum.
    """
    rel = inst.release_matrix()
    new_cols = []
    mu = np.full(inst.num_jobs, np.inf)
    for j in range(inst.num_jobs):
        for i in range(inst.num_machines):
            if not inst.allowed(j, i):
                continue
            found, best_rc = price_chain_multi(
                i, j, ximat[i], float(eta[j]), float(inst.weights[j]),
                inst.size(j, i), int(rel[j, i]), H,
            )
            mu[j] = min(mu[j], best_rc + float(eta[j]))
            for chain, _ in found:
                key = (chain.machine, chain.job, chain.slots)
                if key not in seen:
                    new_cols.append(chain)
                    seen.add(key)
    return new_cols, mu


SMOOTHING = 0.8  # weight on the dual stability center while pricing
GAP_REL_TOL = 1e-6


def solve_chain_lp(inst: Instance, horizon: int | None = None, max_rounds: int = 2000) -> ChainSolution:
    """Column generation to optimality of the chain LP.

    Termination is certified either way: cleanly, when no chain prices below
    -1e-7 against the master duals, or by the Lagrangian pricing bound
    sum_j mu_j - sum xi once it proves the master objective is within 1e-6
    relative of the true optimum.  Pricing runs against duals smoothed
    toward the best-bound stability center, which stops the tailing-off that
    raw degenerate master duals produce.
    """
    H = instance_horizon(inst) if horizon is None else int(horizon)
    rel = inst.release_matrix()
    base = _greedy_disjoint_chains(inst, H)
    columns = list(base)
    if inst.num_jobs * inst.num_machines <= 200:
        for j in range(inst.num_jobs):
            for i in range(inst.num_machines):
                if inst.allowed(j, i):
                    columns.append(earliest_chain(i, j, int(rel[j, i]), inst.size(j, i)))
    seen = {(c.machine, c.job, c.slots) for c in columns}
    base_keys = {(c.machine, c.job, c.slots) for c in base}
    born = [0] * len(columns)

    best_lb = -np.inf
    center_eta = None
    center_xi = None
    gap_bound = np.inf
    clean = False
    iterations = 0
    for _ in range(max_rounds):
        iterations += 1
        costs = np.array([inst.weights[c.job] * c.completion for c in columns])
        res, eta, xi = _solve_master(inst, columns, costs)
        ximat = _xi_matrix(inst, xi, H)
        if center_eta is None:
            center_eta, center_xi = eta, ximat

        new_cols = None
        for alpha in (SMOOTHING, 0.0):
            eta_s = alpha * center_eta + (1 - alpha) * eta
            xi_s = alpha * center_xi + (1 - alpha) * ximat
            cols, mu = _price_all(inst, xi_s, eta_s, H, seen)
            lb = float(mu.sum() - xi_s.sum())
            if lb > best_lb:
                best_lb = lb
                center_eta, center_xi = eta_s, xi_s
            gap_bound = max(res.objective - best_lb, 0.0)
            if gap_bound <= GAP_REL_TOL * (1.0 + abs(res.objective)):
                new_cols = []
                break
            if cols:
                new_cols = cols
                break
            if alpha == 0.0:
                # no chain priced below tolerance against the true duals
                clean = True
                new_cols = []
        if not new_cols:
            break

        if len(columns) > 900:
            # Purge stale zero columns; the feasibility base always stays.
            keep = [
                k
                for k, (c, z) in enumerate(zip(columns, res.x))
                if z > 1e-9
                or (c.machine, c.job, c.slots) in base_keys
                or born[k] >= iterations - 3
            ]
            dropped = set(range(len(columns))) - set(keep)
            for k in dropped:
                c = columns[k]
                seen.discard((c.machine, c.job, c.slots))
            columns = [columns[k] for k in keep]
            born = [born[k] for k in keep]
        columns.extend(new_cols)
        born.extend([iterations] * len(new_cols))
    else:
        raise ChainLpError(f"column generation did not converge in {max_rounds} rounds")

    if clean:
        # Independent certificate: re-price everything against the final duals.
        gap_bound = 0.0
        ximat = _xi_matrix(inst, xi, H)
        _, mu = _price_all(inst, ximat, eta, H, set())
        worst = float((mu - eta).min())
        if worst < -POSTHOC_TOL:
            raise ChainLpError(f"pricing certificate failed at {worst:.2e}")
    elif gap_bound > GAP_REL_TOL * (1.0 + abs(res.objective)):
        raise ChainLpError(f"gap certificate {gap_bound:.2e} above tolerance")

    support = [(c, float(z)) for c, z in zip(columns, res.x) if z > 1e-9]
    sol = ChainSolution(
        chains=support,
        objective=float(res.objective),
        eta=eta,
        xi=xi,
        horizon=H,
        iterations=iterations,
        gap_bound=float(gap_bound),
    )
    validate_chain_solution(inst, sol)
    return sol


def validate_chain_solution(inst: Instance, sol: ChainSolution) -> None:
    rel = inst.release_matrix()
    mass = np.zeros(inst.num_jobs)
    occupancy: dict = {}
    for chain, z in sol.chains:
        chain.validate(int(rel[chain.job, chain.machine]), sol.horizon, inst.size(chain.job, chain.machine))
        mass[chain.job] += z
        if not sol.compressed:
            for t in chain.slots:
                key = (chain.machine, t)
                occupancy[key] = occupancy.get(key, 0.0) + z
    if (mass < 1.0 - MASS_TOL).any():
        j = int(np.argmin(mass))
        raise ChainLpError(f"job {j} covered only to {mass[j]:.8f}")
    if occupancy and max(occupancy.values()) > 1.0 + MASS_TOL:
        key = max(occupancy, key=occupancy.get)
        raise ChainLpError(f"slot {key} overloaded: {occupancy[key]:.8f}")
    if sol.compressed:
        # Per-block aggregated capacity instead of per-slot occupancy.
        ends = sol.blocks
        load: dict = {}
        for chain, z in sol.chains:
            ks = np.searchsorted(ends, np.array(chain.slots), side="left")
            for k in ks:
                key = (chain.machine, int(k))
                load[key] = load.get(key, 0.0) + z
        starts = np.concatenate(([0], ends[:-1]))
        for (i, k), v in load.items():
            cap = float(ends[k] - starts[k])
            if v > cap + MASS_TOL:
                raise ChainLpError(f"block {(i, k)} overloaded: {v:.6f} > {cap:g}")


# -- compressed timeline -------------------------------------------------


@dataclass
class CompressedTimeline:
    """Partition of (0, T] into blocks (ends[k-1], ends[k]]."""

    ends: np.ndarray  # strictly increasing, last entry = horizon
    epsilon: float

    @property
    def starts(self) -> np.ndarray:
        return np.concatenate(([0], self.ends[:-1]))

    @property
    def lengths(self) -> np.ndarray:
        return self.ends - self.starts


def build_compressed_timeline(inst: Instance, eps: float, horizon: int | None = None) -> CompressedTimeline:
    """Block endpoints: all release times plus ceil((1+eps)^k), capped at the
    horizon."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    H = instance_horizon(inst) if horizon is None else int(horizon)
    pts = {H}
    rel = inst.release_matrix()
    for r in np.unique(rel):
        if 0 < r <= H:
            pts.add(int(r))
    k = 0
    while True:
        v = math.ceil((1.0 + eps) ** k)
        if v >= H:
            break
        pts.add(v)
        k += 1
    ends = np.array(sorted(pts), dtype=np.int64)
    return CompressedTimeline(ends=ends, epsilon=eps)


def _price_chain_blocks(
    machine: int,
    job: int,
    xi_blocks: np.ndarray,
    eta_j: float,
    weight: float,
    size: int,
    release: int,
    timeline: CompressedTimeline,
):
    """Cheapest block allocation: for each completion block k*, take one slot
    there plus the p - 1 cheapest remaining slots in blocks up to k*."""
    ends, starts = timeline.ends, timeline.starts
    avail = np.maximum(ends - np.maximum(starts, release), 0).astype(np.int64)
    best = (math.inf, None)
    K = len(ends)
    for kstar in range(K):
        if avail[kstar] < 1:
            continue
        total_avail = int(avail[: kstar + 1].sum())
        if total_avail < size:
            continue
        order = np.argsort(xi_blocks[: kstar + 1], kind="stable")
        need = size - 1
        cost = weight * float(ends[kstar]) + xi_blocks[kstar] - eta_j
        counts = np.zeros(kstar + 1, dtype=np.int64)
        counts[kstar] = 1
        for k in order:
            if need == 0:
                break
            take = int(min(avail[k] - counts[k], need))
            if take > 0:
                counts[k] += take
                need -= take
                cost += take * xi_blocks[k]
        if need > 0:
            continue
        if cost < best[0] - 1e-15:
            best = (cost, counts)
    if best[1] is None or best[0] >= -PRICE_TOL:
        return None, best[0]
    counts = best[1]
    slots = []
    for k in np.flatnonzero(counts):
        lo = int(max(starts[k], release)) + 1
        slots.extend(range(lo, lo + int(counts[k])))
    return Chain(machine=machine, job=job, slots=tuple(sorted(slots))), best[0]


def solve_chain_lp_compressed(inst: Instance, eps: float, max_rounds: int = 500) -> ChainSolution:
    """Column generation over the block-compressed timeline.

    Chain cost charges the right endpoint of the chain's final block, so the
    objective lies within a (1 + eps) factor of the exact chain LP.
    """
    H = instance_horizon(inst)
    timeline = build_compressed_timeline(inst, eps, H)
    ends, starts = timeline.ends, timeline.starts
    rel = inst.release_matrix()

    def block_of(t: int) -> int:
        return int(np.searchsorted(ends, t, side="left"))

    def chain_cost(c: Chain) -> float:
        return float(inst.weights[c.job] * ends[block_of(c.completion)])

    columns = _greedy_disjoint_chains(inst, H)
    seen = {(c.machine, c.job, c.slots) for c in columns}

    def solve_master(cols):
        keys = sorted({(c.machine, block_of(t)) for c in cols for t in c.slots})
        pos = {key: k for k, key in enumerate(keys)}
        lp = LinearProgram(num_vars=len(cols))
        lp.set_objective(np.array([chain_cost(c) for c in cols]))
        for j in range(inst.num_jobs):
            idx = [k for k, c in enumerate(cols) if c.job == j]
            lp.add_row(np.array(idx), np.ones(len(idx)), ">=", 1.0)
        use: list[dict] = [dict() for _ in keys]
        for k, c in enumerate(cols):
            for t in c.slots:
                d = use[pos[(c.machine, block_of(t))]]
                d[k] = d.get(k, 0) + 1
        for key, d in zip(keys, use):
            i, blk = key
            cap = float(ends[blk] - starts[blk])
            lp.add_row(np.array(list(d)), np.array([float(v) for v in d.values()]), "<=", cap)
        res = solve_lp(lp)
        if res.status != "optimal":
            raise ChainLpError(f"compressed master is {res.status}")
        eta = np.maximum(res.duals[: inst.num_jobs], 0.0)
        xi = np.zeros((inst.num_machines, len(ends)))
        for k, (i, blk) in enumerate(keys):
            xi[i, blk] = max(-res.duals[inst.num_jobs + k], 0.0)
        return res, eta, xi

    iterations = 0
    for _ in range(max_rounds):
        iterations += 1
        res, eta, xi = solve_master(columns)
        new_cols = []
        for j in range(inst.num_jobs):
            for i in range(inst.num_machines):
                if not inst.allowed(j, i):
                    continue
                chain, _ = _price_chain_blocks(
                    i, j, xi[i], float(eta[j]), float(inst.weights[j]),
                    inst.size(j, i), int(rel[j, i]), timeline,
                )
                if chain is not None:
                    key = (chain.machine, chain.job, chain.slots)
                    if key not in seen:
                        new_cols.append(chain)
                        seen.add(key)
        if not new_cols:
            break
        columns.extend(new_cols)
    else:
        raise ChainLpError(f"compressed generation did not converge in {max_rounds} rounds")

    support = [(c, float(z)) for c, z in zip(columns, res.x) if z > 1e-9]
    xi_dict = {
        (i, k): float(xi[i, k])
        for i in range(inst.num_machines)
        for k in range(len(ends))
        if xi[i, k] > 1e-12
    }
    sol = ChainSolution(
        chains=support,
        objective=float(res.objective),
        eta=eta,
        xi=xi_dict,
        horizon=H,
        compressed=True,
        blocks=ends,
        iterations=iterations,
    )
    validate_chain_solution(inst, sol)
    return sol
