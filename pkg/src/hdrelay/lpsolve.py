"""Deterministic dense two-phase simplex for the small LPs used here.

Problems are stated as maximization over nonnegative variables with a mix
of ``<=`` and ``==`` rows.  The solver runs the classic two-phase tableau
simplex: Dantzig pricing while progress is being made, with a permanent
switch to Bland's rule after a degenerate stall so cycling cannot occur.
Identical inputs always produce bit-identical outputs.

These LPs are heavily degenerate (most right-hand sides are zero), which
is why the stall detection matters in practice.  ``solve`` takes the
dict-based :class:`LinearProgram`; ``solve_dense`` takes prebuilt arrays
and is the entry point for callers that re-solve structurally identical
problems many times.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["LinearProgram", "LpSolution", "solve", "solve_dense", "lp_to_text"]

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
MAX_NONZEROS = 50_000
STALL_LIMIT = 1000


@dataclass
class LinearProgram:
    """max c.x subject to rows of (coeffs, relation, rhs); x >= 0, optional uppers.

    ``coeffs`` maps variable index -> coefficient.  ``relation`` is "<=" or
    "==".  Upper bounds, when given, are enforced as extra rows.
    """

    num_vars: int
    objective: dict[int, float] = field(default_factory=dict)
    constraints: list[tuple[dict[int, float], str, float]] = field(default_factory=list)
    upper_bounds: dict[int, float] = field(default_factory=dict)
    names: list[str] | None = None

    def add(self, coeffs: dict[int, float], relation: str, rhs: float) -> None:
        if relation not in ("<=", "=="):
            raise ValueError(f"unsupported relation {relation!r}")
        self.constraints.append((coeffs, relation, rhs))

    def nonzeros(self) -> int:
        return sum(len(c) for c, _, _ in self.constraints) + len(self.upper_bounds)

    def var_name(self, j: int) -> str:
        if self.names and j < len(self.names):
            return self.names[j]
        return f"x{j}"


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    objective: float
    x: np.ndarray
    max_violation: float
    iterations: int


def solve_dense(
    c: np.ndarray,
    A: np.ndarray,
    eq_mask: np.ndarray,
    b: np.ndarray,
) -> LpSolution:
    """max c.x s.t. A[eq] x == b[eq], A[~eq] x <= b[~eq], x >= 0."""
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    is_eq = np.asarray(eq_mask, dtype=bool).copy()
    m, n = A.shape

    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    needs_ge = flip & ~is_eq  # flipped "<=" rows become ">="

    slack_rows = np.where(~is_eq & ~needs_ge)[0]
    surplus_rows = np.where(needs_ge)[0]
    art_rows = np.where(is_eq | needs_ge)[0]
    n_slack = len(slack_rows)
    n_surp = len(surplus_rows)
    n_art = len(art_rows)
    total = n + n_slack + n_surp + n_art

    # Tableau: m constraint rows, then phase-2 and phase-1 objective rows.
    T = np.zeros((m + 2, total + 1))
    T[:m, :n] = A
    T[:m, total] = b
    for k, r in enumerate(slack_rows):
        T[r, n + k] = 1.0
    for k, r in enumerate(surplus_rows):
        T[r, n + n_slack + k] = -1.0
    art_col = {}
    for k, r in enumerate(art_rows):
        col = n + n_slack + n_surp + k
        T[r, col] = 1.0
        art_col[r] = col

    basis = np.empty(m, dtype=int)
    for k, r in enumerate(slack_rows):
        basis[r] = n + k
    for r in art_rows:
        basis[r] = art_col[r]

    OBJ2, OBJ1 = m, m + 1
    T[OBJ2, :n] = c
    if n_art:
        T[OBJ1] = T[art_rows].sum(axis=0)
        T[OBJ1, n + n_slack + n_surp : total] = 0.0

    artificial = np.zeros(total, dtype=bool)
    artificial[n + n_slack + n_surp : total] = True

    iters = 0
    max_iters = 200 * (m + n) + 20_000

    def pivot(r: int, col: int) -> None:
        prow = T[r] / T[r, col]
        column = T[:, col].copy()
        column[r] = 0.0
        np.subtract(T, np.outer(column, prow), out=T)
        T[r] = prow
        basis[r] = col

    def run_phase(obj_row: int) -> str:
        nonlocal iters
        stall = 0
        bland = False
        last_obj = T[obj_row, total]
        while True:
            red = T[obj_row, :total].copy()
            red[artificial] = 0.0
            if bland:
                cand = np.where(red > PIVOT_TOL)[0]
                if cand.size == 0:
                    return "optimal"
                enter = int(cand[0])
            else:
                enter = int(np.argmax(red))
                if red[enter] <= PIVOT_TOL:
                    return "optimal"
            colvals = T[:m, enter]
            pos = np.where(colvals > PIVOT_TOL)[0]
            if pos.size == 0:
                return "unbounded"
            ratios = T[pos, total] / colvals[pos]
            tied = pos[ratios <= ratios.min() + 1e-12]
            if tied.size == 1:
                leave = tied[0]
            else:
                # Prefer the largest pivot among ties: numerically safest and
                # empirically avoids the long degenerate stalls Bland crawls
                # out of; Bland remains the terminating backstop.
                strongest = tied[colvals[tied] >= colvals[tied].max() - 1e-12]
                leave = strongest[np.argmin(basis[strongest])]
            pivot(int(leave), enter)
            iters += 1
            if iters > max_iters:
                return "iteration_limit"
            obj = T[obj_row, total]
            if not bland:
                if abs(obj - last_obj) <= 1e-12:
                    stall += 1
                    if stall > STALL_LIMIT:
                        bland = True
                else:
                    stall = 0
                last_obj = obj

    if n_art:
        status = run_phase(OBJ1)
        if status == "iteration_limit":
            return LpSolution(status, 0.0, np.zeros(n), np.inf, iters)
        if T[OBJ1, total] > FEAS_TOL:
            return LpSolution("infeasible", 0.0, np.zeros(n), np.inf, iters)
        # Drive zero-level artificials out of the basis where possible.
        for r in range(m):
            if artificial[basis[r]]:
                nonz = np.where(np.abs(T[r, : n + n_slack + n_surp]) > PIVOT_TOL)[0]
                if nonz.size:
                    pivot(r, int(nonz[0]))

    status = run_phase(OBJ2)
    if status == "iteration_limit":
        return LpSolution(status, 0.0, np.zeros(n), np.inf, iters)

    x = np.zeros(n)
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T[r, total]
    np.maximum(x, 0.0, out=x)
    if status == "unbounded":
        return LpSolution("unbounded", np.inf, x, np.inf, iters)

    resid = A @ x - b
    worst = 0.0
    if (~is_eq).any():
        worst = max(worst, float(resid[~is_eq].max(initial=0.0)))
    if is_eq.any():
        worst = max(worst, float(np.abs(resid[is_eq]).max(initial=0.0)))
    return LpSolution("optimal", float(c @ x), x, worst, iters)


def solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp``; never raises on degenerate or infeasible input."""
    if lp.nonzeros() > MAX_NONZEROS:
        raise ValueError(f"problem too large: {lp.nonzeros()} nonzeros > {MAX_NONZEROS}")

    n = lp.num_vars
    rows: list[tuple[dict[int, float], str, float]] = list(lp.constraints)
    rows.extend(({j: 1.0}, "<=", ub) for j, ub in sorted(lp.upper_bounds.items()))
    m = len(rows)

    A = np.zeros((m, n))
    b = np.zeros(m)
    eq_mask = np.zeros(m, dtype=bool)
    for r, (coeffs, rel, rhs) in enumerate(rows):
        for j, a in coeffs.items():
            A[r, j] = a
        b[r] = rhs
        eq_mask[r] = rel == "=="
    c = np.zeros(n)
    for j, a in lp.objective.items():
        c[j] = a
    return solve_dense(c, A, eq_mask, b)


def lp_to_text(lp: LinearProgram) -> str:
    """Human-readable dump for debugging."""

    def term(j: int, a: float) -> str:
        return f"{a:+.6g} {lp.var_name(j)}"

    lines = ["maximize"]
    lines.append("  " + " ".join(term(j, a) for j, a in sorted(lp.objective.items())))
    lines.append("subject to")
    for coeffs, rel, rhs in lp.constraints:
        lhs = " ".join(term(j, a) for j, a in sorted(coeffs.items()))
        lines.append(f"  {lhs} {rel} {rhs:.6g}")
    for j, ub in sorted(lp.upper_bounds.items()):
        lines.append(f"  {lp.var_name(j)} <= {ub:.6g}")
    lines.append("bounds: all variables >= 0")
    return "\n".join(lines)
