"""Dense two-phase revised simplex with dual values.

Solves ``min c.x  s.t.  rows, lb <= x <= ub`` and returns primal and dual
optima.  The implementation is deliberately self-contained: dual values per
row are needed downstream for column generation, and desk-scale problems
(a few thousand variables, a few hundred rows) are comfortably inside dense
linear algebra territory.

Pivoting uses Dantzig's rule with an automatic switch to Bland's rule once a
degeneracy stall is detected; the basis inverse is refactorized periodically
and before the solution is extracted.  Numerical failure raises, never
returns silently wrong answers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
OPT_TOL = 1e-7
REFACTOR_EVERY = 120

_SENSES = ("<=", "==", ">=")


class LpError(ValueError):
    """Malformed linear program (dimension mismatch, bad sense, non-finite)."""


class NumericalError(RuntimeError):
    """Simplex failed to converge or the factorization went bad."""


@dataclass
class LinearProgram:
    """Sparse-row LP in minimization form.

    Rows are (indices, coefficients, sense, rhs).  Variables default to
    ``x >= 0``; per-variable lower/upper bounds may be set.
    """

    num_vars: int
    objective: np.ndarray = None
    rows: list = field(default_factory=list)
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        n = int(self.num_vars)
        if n < 1:
            raise LpError("LP needs at least one variable")
        if self.objective is None:
            self.objective = np.zeros(n)
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (n,):
            raise LpError(f"objective must have shape ({n},)")
        if self.lower is None:
            self.lower = np.zeros(n)
        self.lower = np.asarray(self.lower, dtype=float)
        if self.upper is None:
            self.upper = np.full(n, np.inf)
        self.upper = np.asarray(self.upper, dtype=float)
        if not np.isfinite(self.objective).all() or not np.isfinite(self.lower).all():
            raise LpError("objective and lower bounds must be finite")

    def set_objective(self, coeffs) -> None:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.num_vars,):
            raise LpError("objective dimension mismatch")
        self.objective = coeffs

    def add_row(self, indices, coeffs, sense: str, rhs: float) -> int:
        """Append a constraint row; returns its index."""
        idx = np.asarray(indices, dtype=np.int64)
        val = np.asarray(coeffs, dtype=float)
        if idx.shape != val.shape or idx.ndim != 1:
            raise LpError("row indices and coefficients must be 1-d and aligned")
        if idx.size and (idx.min() < 0 or idx.max() >= self.num_vars):
            raise LpError("row index out of range")
        if sense not in _SENSES:
            raise LpError(f"unknown sense {sense!r}")
        if not np.isfinite(val).all() or not np.isfinite(rhs):
            raise LpError("row coefficients and rhs must be finite")
        self.rows.append((idx, val, sense, float(rhs)))
        return len(self.rows) - 1


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    x: np.ndarray = None
    objective: float = np.nan
    duals: np.ndarray = None
    iterations: int = 0


def lp_to_text(lp: LinearProgram) -> str:
    """Debug dump in LP text format for cross-checking with other solvers."""
    out = ["Minimize", " obj: " + _expr(np.arange(lp.num_vars), lp.objective)]
    out.append("Subject To")
    op = {"<=": "<=", ">=": ">=", "==": "="}
    for k, (idx, val, sense, rhs) in enumerate(lp.rows):
        out.append(f" c{k}: " + _expr(idx, val) + f" {op[sense]} {rhs:.12g}")
    out.append("Bounds")
    for j in range(lp.num_vars):
        hi = "+inf" if not np.isfinite(lp.upper[j]) else f"{lp.upper[j]:.12g}"
        out.append(f" {lp.lower[j]:.12g} <= x{j} <= {hi}")
    out.append("End")
    return "\n".join(out) + "\n"


def _expr(idx, val) -> str:
    terms = []
    for j, v in zip(idx, val):
        if v == 0:
            continue
        sign = "-" if v < 0 else ("+" if terms else "")
        terms.append(f"{sign} {abs(v):.12g} x{int(j)}")
    return " ".join(terms) if terms else "0 x0"


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve the LP; on ``optimal`` the solution carries a dual value per
    original row (>= rows have non-negative duals, <= rows non-positive).

    A numerically troubled run is retried once in a conservative mode
    (Bland's rule throughout, frequent refactorization) before giving up.
    """
    try:
        return _solve(lp, safe=False)
    except NumericalError:
        return _solve(lp, safe=True)


def _solve(lp: LinearProgram, safe: bool) -> LpSolution:
    n = lp.num_vars
    n_rows = len(lp.rows)

    # Shift lower bounds to zero, turn finite upper bounds into extra rows.
    shift = lp.lower.copy()
    ub_rows = [(j, lp.upper[j] - shift[j]) for j in range(n) if np.isfinite(lp.upper[j])]
    if any(u < -FEAS_TOL for _, u in ub_rows):
        return LpSolution(status="infeasible")
    m = n_rows + len(ub_rows)
    if m == 0:
        # Only bounds: optimum at lower bound (or unbounded if a negative
        # cost variable has no upper bound, which ub_rows would have caught).
        if (lp.objective < -OPT_TOL).any():
            return LpSolution(status="unbounded")
        x = shift.copy()
        return LpSolution(status="optimal", x=x, objective=float(lp.objective @ x), duals=np.zeros(0))

    A = np.zeros((m, n))
    b = np.zeros(m)
    senses = []
    for k, (idx, val, sense, rhs) in enumerate(lp.rows):
        np.add.at(A[k], idx, val)
        b[k] = rhs - (val * shift[idx]).sum()
        senses.append(sense)
    for k, (j, u) in enumerate(ub_rows):
        A[n_rows + k, j] = 1.0
        b[n_rows + k] = u
        senses.append("<=")

    # Orient every row so b >= 0; remember flips to restore dual signs.
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    swap = {"<=": ">=", ">=": "<=", "==": "=="}
    senses = [swap[s] if f else s for s, f in zip(senses, flip)]

    # Column layout: structural | slack/surplus | artificial.
    slack_cols = []
    art_rows = []
    for k, s in enumerate(senses):
        if s == "<=":
            slack_cols.append((k, 1.0))
        elif s == ">=":
            slack_cols.append((k, -1.0))
            art_rows.append(k)
        else:
            art_rows.append(k)
    n_slack = len(slack_cols)
    n_art = len(art_rows)
    total = n + n_slack + n_art
    T = np.zeros((m, total))
    T[:, :n] = A
    for c, (k, sgn) in enumerate(slack_cols):
        T[k, n + c] = sgn
    for c, k in enumerate(art_rows):
        T[k, n + n_slack + c] = 1.0

    basis = np.empty(m, dtype=np.int64)
    for c, (k, sgn) in enumerate(slack_cols):
        if sgn > 0:
            basis[k] = n + c
    for c, k in enumerate(art_rows):
        basis[k] = n + n_slack + c

    art_mask = np.zeros(total, dtype=bool)
    art_mask[n + n_slack :] = True

    state = _State(T, b, basis, refactor_every=20 if safe else REFACTOR_EVERY)

    if n_art:
        c1 = np.zeros(total)
        c1[art_mask] = 1.0
        status = _iterate(state, c1, locked=np.zeros(total, dtype=bool), bland=safe)
        if status == "unbounded":  # cannot happen: phase-1 objective >= 0
            raise NumericalError("phase 1 reported unbounded")
        if state.objective(c1) > FEAS_TOL:
            return LpSolution(status="infeasible", iterations=state.iters)
        _evict_artificials(state, art_mask)

    c2 = np.zeros(total)
    c2[:n] = lp.objective
    status = _iterate(state, c2, locked=art_mask, bland=safe)
    if status == "unbounded":
        return LpSolution(status="unbounded", iterations=state.iters)

    state.refactor()
    xb = state.xb()
    x_full = np.zeros(total)
    x_full[state.basis] = xb
    if x_full[art_mask].max(initial=0.0) > FEAS_TOL:
        raise NumericalError("artificial variable positive at optimum")
    x = x_full[:n] + shift

    resid = T @ x_full - b
    if np.abs(resid).max(initial=0.0) > 1e2 * FEAS_TOL:
        raise NumericalError(f"feasibility residual {np.abs(resid).max():.3e}")

    y = c2[state.basis] @ state.binv
    dual_obj = float(y @ b) + float(lp.objective @ shift)
    primal_obj = float(lp.objective @ x)
    gap = abs(primal_obj - dual_obj)
    if gap > 1e-6 * (1.0 + abs(primal_obj)):
        raise NumericalError(f"duality gap {gap:.3e} at objective {primal_obj:.6g}")

    duals = np.where(flip[:n_rows], -y[:n_rows], y[:n_rows])
    return LpSolution(
        status="optimal", x=x, objective=primal_obj, duals=duals, iterations=state.iters
    )


class _State:
    def __init__(self, T: np.ndarray, b: np.ndarray, basis: np.ndarray, refactor_every: int = REFACTOR_EVERY):
        self.T = T
        self.b = b
        self.basis = basis
        self.m = T.shape[0]
        self.binv = np.eye(self.m)
        self.iters = 0
        self.since_refactor = 0
        self.refactor_every = refactor_every

    def xb(self) -> np.ndarray:
        return self.binv @ self.b

    def objective(self, c: np.ndarray) -> float:
        return float(c[self.basis] @ self.xb())

    def refactor(self) -> None:
        B = self.T[:, self.basis]
        try:
            self.binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("singular basis during refactorization") from exc
        self.since_refactor = 0

    def pivot(self, row: int, col: int, direction: np.ndarray) -> None:
        piv = direction[row]
        if abs(piv) < PIVOT_TOL:
            raise NumericalError("pivot element below tolerance")
        self.binv[row] /= piv
        other = np.arange(self.m) != row
        self.binv[other] -= np.outer(direction[other], self.binv[row])
        self.basis[row] = col
        self.iters += 1
        self.since_refactor += 1
        if self.since_refactor >= self.refactor_every:
            self.refactor()


def _iterate(state: _State, c: np.ndarray, locked: np.ndarray, bland: bool = False) -> str:
    """Run simplex iterations to optimality of cost vector ``c``.

    Dantzig pricing; Bland's rule engages permanently after the objective
    stalls (anti-cycling).  The ratio test breaks ties toward the largest
    pivot element, which keeps the basis inverse well conditioned.  Locked
    columns never enter.
    """
    m = state.m
    total = state.T.shape[1]
    stall = 0
    stall_limit = 3 * m + 50
    max_iters = 60 * (m + total) + 10_000
    last_obj = np.inf
    start_iters = state.iters

    while True:
        if state.iters - start_iters > max_iters:
            raise NumericalError("simplex iteration limit exceeded")
        y = c[state.basis] @ state.binv
        reduced = c - y @ state.T
        reduced[locked] = 0.0
        candidates = np.flatnonzero(reduced < -OPT_TOL)
        if candidates.size == 0:
            return "optimal"
        if bland:
            enter = int(candidates[0])
        else:
            enter = int(candidates[np.argmin(reduced[candidates])])

        direction = state.binv @ state.T[:, enter]
        positive = np.flatnonzero(direction > PIVOT_TOL)
        if positive.size == 0:
            return "unbounded"
        xb = np.maximum(state.xb(), 0.0)
        ratios = xb[positive] / direction[positive]
        best = ratios.min()
        ties = positive[np.flatnonzero(ratios <= best + 1e-9 * (1.0 + abs(best)))]
        if bland:
            leave = int(ties[np.argmin(state.basis[ties])])
        else:
            leave = int(ties[np.argmax(direction[ties])])
        state.pivot(leave, enter, direction)

        obj = state.objective(c)
        if obj < last_obj - 1e-12:
            last_obj = obj
            stall = 0
        else:
            stall += 1
            if stall > stall_limit and not bland:
                bland = True
                stall = 0


def _evict_artificials(state: _State, art_mask: np.ndarray) -> None:
    """Pivot basic artificials out where possible; redundant rows keep a
    zero-level artificial which stays locked for phase 2."""
    for row in range(state.m):
        col = state.basis[row]
        if not art_mask[col]:
            continue
        row_of_binv = state.binv[row]
        entries = row_of_binv @ state.T
        entries[art_mask] = 0.0
        nz = np.flatnonzero(np.abs(entries) > 1e3 * PIVOT_TOL)
        nz = nz[nz != col]
        if nz.size:
            enter = int(nz[0])
            direction = state.binv @ state.T[:, enter]
            state.pivot(row, enter, direction)
