"""End-to-end rate optimization: flows, time shares, and power splits.

The master problem maximizes the source-sink rate over per-state link
flows and state time shares, subject to flow conservation at every node,
a unit time budget, and each state's rate region scaled by its share.
For interference avoidance, common broadcast, and dirty-paper coding the
problem is one linear program.  Superposition coding adds the per-state
power splits, which enter the region right-hand sides nonlinearly; those
are handled by a derivative-free multistart search around the inner LP.

Every constraint is kept in multiplied-through form (flows against
``share * cap``), so zero-share states never cause a division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .capacity import awgn_half_capacity
from .cutset import SolverError
from .lpsolve import LinearProgram, solve, solve_dense
from .netmodel import Network
from .regions import (
    ConstraintSet,
    admissible_dpc_receivers,
    cb_region,
    dpc_region,
    sc_region,
)
from .states import State, StateView, default_mdf_states, ia_states, state_label, view

__all__ = [
    "FlowProblem",
    "SchemeSolution",
    "SearchConfig",
    "build_problem",
    "solve_linear_scheme",
    "solve_sc",
    "solve_dpc",
    "compute_rate",
    "brute_force_rate",
    "check_solution",
    "solution_report",
]

SCHEMES = ("ia", "cb", "sc", "dpc")
SHARE_EPS = 1e-9


@dataclass(frozen=True)
class ConfiguredState:
    """A state as one scheme actually runs it (DPC states carry their receiver)."""

    state: State
    kind: str  # "cb" | "dpc" | "sc"
    r: int | None = None

    def label(self) -> str:
        base = state_label(self.state)
        return f"{base} dpc->{self.r}" if self.kind == "dpc" else base


@dataclass
class FlowProblem:
    net: Network
    states: list[State]
    scheme: str
    dpc_source_interference: str = "reject"

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if not self.states:
            raise ValueError("state list must be nonempty")
        if self.scheme == "ia":
            bad = [s for s in self.states if len(s.tx) != 1]
            if bad:
                raise ValueError(
                    f"interference avoidance allows single-transmitter states only; got {state_label(bad[0])}"
                )


@dataclass
class SchemeSolution:
    scheme: str
    rate: float
    shares: np.ndarray
    configured: list[ConfiguredState]
    flows: list[dict[tuple[int, int], float]]
    totals: list[dict[int, float]]
    alpha: dict[tuple[int, int], np.ndarray] | None = None
    status: str = "optimal"
    skipped_restarts: int = 0
    lp_iterations: int = 0

    def active(self, tol: float = SHARE_EPS) -> list[tuple[int, float]]:
        return [(k, float(v)) for k, v in enumerate(self.shares) if v > tol]


def build_problem(
    net: Network,
    scheme: str,
    states: list[State] | None = None,
    dpc_source_interference: str = "reject",
) -> FlowProblem:
    """Assemble a problem with the default state set when none is given."""
    if states is None:
        states = ia_states(net) if scheme == "ia" else default_mdf_states(net)
    return FlowProblem(net, list(states), scheme, dpc_source_interference)


def _configure(problem: FlowProblem) -> list[ConfiguredState]:
    """Expand states per scheme; DPC states get one entry per admissible receiver."""
    out = []
    for s in problem.states:
        if problem.scheme in ("ia", "cb"):
            out.append(ConfiguredState(s, "cb"))
        elif problem.scheme == "sc":
            out.append(ConfiguredState(s, "sc"))
        else:
            if problem.net.source not in s.tx:
                out.append(ConfiguredState(s, "cb"))
                continue
            if problem.dpc_source_interference == "noise":
                rs = list(view(problem.net, s).receivers_of[problem.net.source])
            else:
                rs = admissible_dpc_receivers(problem.net, s)
            if rs:
                out.extend(ConfiguredState(s, "dpc", r) for r in rs)
            else:
                out.append(ConfiguredState(s, "cb"))
    return out


def _allowed_links(net: Network, cs: ConfiguredState, v: StateView) -> dict[int, tuple[int, ...]]:
    """Flow-carrying links per transmitter under the configured scheme."""
    links = {}
    for i in cs.state.tx:
        receivers = v.receivers_of[i]
        if cs.kind == "dpc":
            if i == net.source:
                receivers = (cs.r,)
            else:
                receivers = tuple(j for j in receivers if j != cs.r)
        links[i] = receivers
    return links


def _region_for(net: Network, cs: ConfiguredState, noise_mode: str) -> ConstraintSet:
    if cs.kind == "dpc":
        return dpc_region(net, cs.state, cs.r, source_interference=noise_mode)
    return cb_region(net, cs.state)


class _LinearAssembly:
    """Column layout and LP for the CB/IA/DPC master problem."""

    def __init__(self, problem: FlowProblem, configured: list[ConfiguredState]):
        net = problem.net
        self.problem = problem
        self.configured = configured
        self.views = [view(net, cs.state) for cs in configured]
        self.links = [_allowed_links(net, cs, v) for cs, v in zip(configured, self.views)]

        ncols = 1 + len(configured)  # R, shares
        self.share_col = {k: 1 + k for k in range(len(configured))}
        self.total_col: dict[tuple[int, int], int] = {}
        self.link_col: dict[tuple[int, int, int], int] = {}
        for k, cs in enumerate(configured):
            for i, receivers in sorted(self.links[k].items()):
                if not receivers:
                    continue
                self.total_col[k, i] = ncols
                ncols += 1
                for j in receivers:
                    self.link_col[k, i, j] = ncols
                    ncols += 1
        self.ncols = ncols

    def lp(self, fix_shares: dict[int, float] | None = None) -> LinearProgram:
        problem, configured = self.problem, self.configured
        net = problem.net
        lp = LinearProgram(num_vars=self.ncols, objective={0: 1.0})

        # Flow conservation at every node: outflow - inflow - R[source] + R[sink] = 0.
        for node in range(1, net.node_count + 1):
            coeffs: dict[int, float] = {}
            for (k, i, j), col in self.link_col.items():
                if i == node:
                    coeffs[col] = coeffs.get(col, 0.0) + 1.0
                elif j == node:
                    coeffs[col] = coeffs.get(col, 0.0) - 1.0
            if node == net.source:
                coeffs[0] = coeffs.get(0, 0.0) - 1.0
            elif node == net.sink:
                coeffs[0] = coeffs.get(0, 0.0) + 1.0
            if coeffs:
                lp.add(coeffs, "==", 0.0)

        lp.add({col: 1.0 for col in self.share_col.values()}, "<=", 1.0)
        if fix_shares:
            for k, value in fix_shares.items():
                lp.add({self.share_col[k]: 1.0}, "==", float(value))

        for k, cs in enumerate(configured):
            share = self.share_col[k]
            for i, receivers in sorted(self.links[k].items()):
                if not receivers:
                    continue
                row = {self.link_col[k, i, j]: 1.0 for j in receivers}
                row[self.total_col[k, i]] = -1.0
                lp.add(row, "<=", 0.0)
            region = _region_for(net, cs, problem.dpc_source_interference)
            for variables, rhs in region.rows:
                row = {}
                skip = False
                for var in variables:
                    if var[0] == "src":
                        col = self.total_col.get((k, net.source))
                    else:
                        col = self.total_col.get((k, var[1]))
                    if col is None:
                        # Transmitter carries no flow in this state; its rate is 0.
                        continue
                    row[col] = 1.0
                if not row:
                    skip = True
                if not skip:
                    row[share] = -rhs
                    lp.add(row, "<=", 0.0)
        return lp

    def extract(self, x: np.ndarray) -> tuple[list[dict], list[dict]]:
        flows: list[dict] = [dict() for _ in self.configured]
        totals: list[dict] = [dict() for _ in self.configured]
        for (k, i, j), col in self.link_col.items():
            if x[col] > 1e-12:
                flows[k][(i, j)] = float(x[col])
        for (k, i), col in self.total_col.items():
            if x[col] > 1e-12:
                totals[k][i] = float(x[col])
        return flows, totals


def solve_linear_scheme(
    problem: FlowProblem,
    fix_shares: dict[int, float] | None = None,
) -> SchemeSolution:
    """Solve the IA/CB/DPC-CB master LP (SC is handled by :func:`solve_sc`).

    ``fix_shares`` pins chosen configured-state shares (by index) for
    verifying specific schedules.
    """
    if problem.scheme == "sc":
        raise ValueError("superposition coding needs solve_sc")
    configured = _configure(problem)
    asm = _LinearAssembly(problem, configured)
    sol = solve(asm.lp(fix_shares))
    if sol.status != "optimal":
        raise SolverError(_failure_message(problem, sol.status))
    flows, totals = asm.extract(sol.x)
    shares = np.array([sol.x[asm.share_col[k]] for k in range(len(configured))])
    return SchemeSolution(
        scheme=problem.scheme,
        rate=float(sol.objective),
        shares=shares,
        configured=configured,
        flows=flows,
        totals=totals,
        status=sol.status,
        lp_iterations=sol.iterations,
    )


def solve_dpc(problem: FlowProblem, fix_shares: dict[int, float] | None = None) -> SchemeSolution:
    """DPC-CB entry point: expansion happens inside the linear solve."""
    if problem.scheme != "dpc":
        raise ValueError("solve_dpc expects a dpc problem")
    return solve_linear_scheme(problem, fix_shares)


def _failure_message(problem: FlowProblem, status: str) -> str:
    return (
        f"{problem.scheme} master LP ended with status {status} "
        f"on {len(problem.states)} states"
    )


# ---------------------------------------------------------------------------
# Superposition coding
# ---------------------------------------------------------------------------


@dataclass
class SearchConfig:
    """Knobs for the power-split search; defaults fit the built-in networks."""

    seed: int = 0
    random_restarts: int = 16
    step_grid: tuple[float, ...] = (0.25, 0.125, 0.0625, 0.03125, 0.015625)
    cycle_tol: float = 1e-7
    refine_top: int = 3
    max_cycles_per_step: int = 2
    support_restricted: bool = True
    initial_splits: list[dict[tuple[int, int], np.ndarray]] = field(default_factory=list)


class _ScAssembly:
    """Vectorized SC master LP whose share-column entries depend on the splits.

    Columns: R, one share per state, then one flow per codeword link, laid
    out transmitter-block by transmitter-block in receiver-rank order, so a
    state's split vector aligns exactly with its link block.

    The joint SIC caps form one family per receiver, exponential in its
    decoded-codeword count, so the LP carries a working pool per family
    (singletons and the full set initially) and lazily adds any subset the
    current solution violates; a solution is only returned once it clears
    the exhaustive family.
    """

    def __init__(self, net: Network, states: list[State]):
        self.net = net
        self.states = states
        self.views = [view(net, s) for s in states]
        self.P = net.power
        self.noise = net.noise

        ncols = 1 + len(states)
        self.link_index: list[list[tuple[int, int]]] = []
        self.link_cols: list[np.ndarray] = []
        self.tx_slice: list[dict[int, slice]] = []
        for k, s in enumerate(states):
            v = self.views[k]
            idx = []
            slices = {}
            for i in s.tx:
                start = len(idx)
                for j in v.receivers_of[i]:
                    idx.append((i, j))
                slices[i] = slice(start, len(idx))
            self.link_index.append(idx)
            self.tx_slice.append(slices)
            self.link_cols.append(np.arange(ncols, ncols + len(idx)))
            ncols += len(idx)
        self.ncols = ncols

        base_rows: list[np.ndarray] = []
        for node in range(1, net.node_count + 1):
            row = np.zeros(ncols)
            any_term = False
            for k in range(len(states)):
                for local, (i, j) in enumerate(self.link_index[k]):
                    col = int(self.link_cols[k][local])
                    if i == node:
                        row[col] += 1.0
                        any_term = True
                    elif j == node:
                        row[col] -= 1.0
                        any_term = True
            if node == net.source:
                row[0] -= 1.0
                any_term = True
            elif node == net.sink:
                row[0] += 1.0
                any_term = True
            if any_term:
                # Zero-rhs equalities as paired inequalities: keeps the
                # whole LP slack-basis feasible, so phase 1 is never needed.
                base_rows.append(row)
                base_rows.append(-row)
        sched = np.zeros(ncols)
        sched[1 : 1 + len(states)] = 1.0
        base_rows.append(sched)
        self.base_A = np.vstack(base_rows)
        self.n_eq = 0
        self.base_b = np.zeros(len(base_rows))
        self.base_b[-1] = 1.0

        # Per-state structures for the split-dependent right-hand sides.
        self.gains: list[np.ndarray] = []
        self.groups: list[list[dict]] = []
        for k, s in enumerate(states):
            v = self.views[k]
            link_pos = {link: n for n, link in enumerate(self.link_index[k])}
            self.gains.append(
                np.array([net.gain(i, j) for i, j in self.link_index[k]], dtype=float)
            )
            state_groups = []
            for j in s.rx:
                decoded = [
                    link_pos[(p, q)]
                    for p in v.transmitters_of[j]
                    for q in v.weaker_or_self(p, j)
                ]
                if not decoded:
                    continue
                nd = len(decoded)
                if nd > 16:
                    raise ValueError(f"receiver {j}: SIC group of {nd} exceeds guard")
                weights = np.array(
                    [net.gain(self.link_index[k][d][0], j) ** 2 * self.P for d in decoded]
                )
                den_w = np.zeros(len(self.link_index[k]))
                for p in v.transmitters_of[j]:
                    for l in v.stronger(p, j):
                        den_w[link_pos[(p, l)]] += net.gain(p, j) ** 2 * self.P
                pool = sorted({(1 << t) - 1 for t in range(nd)} | {2**nd - 2})
                state_groups.append(
                    {
                        "decoded": np.array(decoded, dtype=int),
                        "weights": weights,
                        "den_w": den_w,
                        "masks": _subset_masks(nd),
                        "pool": pool,
                    }
                )
            self.groups.append(state_groups)
        self.c = np.zeros(ncols)
        self.c[0] = 1.0

    def flatten(self, k: int, splits: dict[tuple[int, int], np.ndarray]) -> np.ndarray:
        out = np.zeros(len(self.link_index[k]))
        for i, sl in self.tx_slice[k].items():
            out[sl] = splits[(k, i)]
        return out

    def link_rhs(self, k: int, alpha_flat: np.ndarray) -> np.ndarray:
        """Per-codeword caps for state k (interference from same-sender stronger codewords)."""
        g2P = self.gains[k] ** 2 * self.P
        per_link = np.empty(len(alpha_flat))
        for i, sl in self.tx_slice[k].items():
            a = alpha_flat[sl]
            before = np.concatenate(([0.0], np.cumsum(a)[:-1]))
            per_link[sl] = g2P[sl] * a / (self.noise + g2P[sl] * before)
        return 0.5 * np.log2(1.0 + per_link)

    def group_rhs(self, grp: dict, alpha_flat: np.ndarray, rows) -> np.ndarray:
        powers = grp["weights"] * alpha_flat[grp["decoded"]]
        den = self.noise + float(grp["den_w"] @ alpha_flat)
        nums = grp["masks"][rows] @ powers
        return 0.5 * np.log2(1.0 + nums / den)

    def _assemble(self, splits, live: list[int], pools: dict):
        """Stack base + per-link + pooled joint rows for the chosen states."""
        blocks = [self.base_A]
        bs = [self.base_b]
        for k in live:
            alpha_flat = self.flatten(k, splits)
            cols = self.link_cols[k]
            n_l = len(cols)
            if n_l:
                block = np.zeros((n_l, self.ncols))
                block[np.arange(n_l), cols] = 1.0
                block[:, 1 + k] = -self.link_rhs(k, alpha_flat)
                blocks.append(block)
                bs.append(np.zeros(n_l))
            for gi, grp in enumerate(self.groups[k]):
                pool = pools[(k, gi)]
                sub = np.zeros((len(pool), self.ncols))
                sub[:, cols[grp["decoded"]]] = grp["masks"][pool].astype(float)
                sub[:, 1 + k] = -self.group_rhs(grp, alpha_flat, pool)
                blocks.append(sub)
                bs.append(np.zeros(len(pool)))
        A = np.vstack(blocks)
        b = np.concatenate(bs)
        eq = np.zeros(len(b), dtype=bool)
        eq[: self.n_eq] = True
        return A, b, eq

    def _violations(self, x, splits, live: list[int], pools: dict, tol: float = 1e-9) -> int:
        """Add the most-violated joint subset per family; return additions."""
        added = 0
        for k in live:
            lam = x[1 + k]
            alpha_flat = self.flatten(k, splits)
            cols = self.link_cols[k]
            for gi, grp in enumerate(self.groups[k]):
                rates = x[cols[grp["decoded"]]]
                lhs = grp["masks"] @ rates
                rhs = self.group_rhs(grp, alpha_flat, slice(None))
                gap = lhs - lam * rhs
                worst = int(np.argmax(gap))
                pool = pools[(k, gi)]
                if gap[worst] > tol and worst not in pool:
                    pool.append(worst)
                    pool.sort()
                    added += 1
        return added

    def _fresh_pools(self, live: list[int]) -> dict:
        return {
            (k, gi): list(grp["pool"])
            for k in live
            for gi, grp in enumerate(self.groups[k])
        }

    def _solve(
        self,
        splits,
        live: list[int],
        keep_cols: np.ndarray | None,
        max_rounds: int = 60,
        pools: dict | None = None,
    ):
        if pools is None:
            pools = self._fresh_pools(live)
        last = None
        for _ in range(max_rounds):
            A, b, eq = self._assemble(splits, live, pools)
            if keep_cols is None:
                sol = solve_dense(self.c, A, eq, b)
                x_full = sol.x
            else:
                sol = solve_dense(self.c[keep_cols], A[:, keep_cols], eq, b)
                x_full = np.zeros(self.ncols)
                if sol.status == "optimal":
                    x_full[keep_cols] = sol.x
            if sol.status != "optimal":
                return sol
            last = sol
            if not self._violations(x_full, splits, live, pools):
                return sol
        if max_rounds < 60 and last is not None:
            return last
        raise SolverError("superposition-coding row generation did not settle")

    def solve_full(self, splits) -> "LpSolution":
        """Exact solve over every state (scratch cut pools; history-free)."""
        return self._solve(splits, list(range(len(self.states))), None)

    def solve_relaxed(self, splits) -> float:
        """One-pass optimistic value (initial pools only); used to rank starts."""
        sol = self._solve(splits, list(range(len(self.states))), None, max_rounds=1)
        return sol.objective if sol.status == "optimal" else -math.inf

    def solve_support(self, splits, live: list[int], pools: dict | None = None) -> float:
        """Objective restricted to the ``live`` states (a lower bound on the full LP).

        A caller-held ``pools`` dict lets a run of related probes reuse and
        extend one working cut pool instead of rebuilding it per probe.
        """
        keep = np.array(
            [0]
            + [1 + k for k in live]
            + [int(c) for k in live for c in self.link_cols[k]],
            dtype=int,
        )
        sol = self._solve(splits, live, keep, pools=pools)
        return sol.objective if sol.status == "optimal" else -math.inf


_MASK_CACHE: dict[int, np.ndarray] = {}


def _subset_masks(n: int) -> np.ndarray:
    """(2^n - 1) x n boolean matrix of nonempty subsets, in stable order."""
    if n not in _MASK_CACHE:
        counts = np.arange(1, 2**n)
        _MASK_CACHE[n] = (counts[:, None] >> np.arange(n)[None, :]) & 1 == 1
    return _MASK_CACHE[n]


def _project_capped_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {a >= 0, sum a <= 1}."""
    y = np.maximum(x, 0.0)
    if y.sum() <= 1.0:
        return y
    # Project onto the unit simplex boundary (sorted threshold rule).
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, len(x) + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(x - theta, 0.0)


def _structured_splits(asm: _ScAssembly, which: str) -> dict[tuple[int, int], np.ndarray]:
    out = {}
    for k, s in enumerate(asm.states):
        v = asm.views[k]
        for i in s.tx:
            d = v.degree(i)
            if d == 0:
                out[(k, i)] = np.zeros(0)
            elif which == "equal":
                out[(k, i)] = np.full(d, 1.0 / d)
            else:
                a = np.zeros(d)
                a[0 if which == "strongest" else d - 1] = 1.0
                out[(k, i)] = a
    return out


def _random_split(asm: _ScAssembly, rng: np.random.Generator) -> dict:
    out = {}
    for k, s in enumerate(asm.states):
        v = asm.views[k]
        for i in s.tx:
            d = v.degree(i)
            out[(k, i)] = rng.dirichlet(np.ones(d)) if d else np.zeros(0)
    return out


def _ia_mimic_split(problem: FlowProblem, asm: _ScAssembly) -> dict | None:
    """Power splits that reproduce the interference-avoidance optimum exactly.

    On each active single-transmitter state the split is filled receiver by
    receiver, strongest first, so each codeword meets the IA flow target;
    the resulting point is feasible for the SC region, which pins the
    search's floor at the IA rate.
    """
    singles = [k for k, s in enumerate(problem.states) if len(s.tx) == 1]
    if not singles:
        return None
    sub = FlowProblem(problem.net, [problem.states[k] for k in singles], "ia")
    try:
        ia_sol = solve_linear_scheme(sub)
    except SolverError:
        return None
    splits = _structured_splits(asm, "equal")
    net = problem.net
    for pos, k in enumerate(singles):
        lam = ia_sol.shares[pos]
        if lam <= SHARE_EPS:
            continue
        (i,) = problem.states[k].tx
        v = asm.views[k]
        targets = [
            ia_sol.flows[pos].get((i, j), 0.0) / lam for j in v.receivers_of[i]
        ]
        alloc = np.zeros(len(targets))
        used = 0.0
        for pos_j, (j, r) in enumerate(zip(v.receivers_of[i], targets)):
            s_j = net.gain(i, j) ** 2 * net.power
            if r <= 0 or s_j <= 0:
                continue
            need = (2.0 ** (2.0 * r) - 1.0) * (net.noise + s_j * used) / s_j
            alloc[pos_j] = need
            used += need
        total = alloc.sum()
        if total > 1.0:
            alloc /= total
        splits[(k, i)] = alloc
    return splits


def solve_sc(problem: FlowProblem, search: SearchConfig | None = None) -> SchemeSolution:
    """Best found superposition-coding solution (a lower bound on SC capacity).

    Multistart over power splits (uniform, all-to-strongest,
    all-to-weakest, an interference-avoidance mimic, and seeded random
    simplex samples), each refined by cyclic coordinate ascent over the
    transmitter splits with a halving step grid, projecting back onto the
    power simplex.  Deterministic for a fixed seed.
    """
    if problem.scheme != "sc":
        raise ValueError("solve_sc expects an sc problem")
    cfg = search or SearchConfig()
    asm = _ScAssembly(problem.net, problem.states)

    starts: list[dict] = [
        _structured_splits(asm, "equal"),
        _structured_splits(asm, "strongest"),
        _structured_splits(asm, "weakest"),
    ]
    mimic = _ia_mimic_split(problem, asm)
    if mimic is not None:
        starts.append(mimic)
    starts.extend(dict(s) for s in cfg.initial_splits)
    for t in range(cfg.random_restarts):
        rng = np.random.default_rng((cfg.seed, t))
        starts.append(_random_split(asm, rng))

    # Rank starts by a one-pass optimistic value, then evaluate the leaders
    # exactly; only those get the coordinate-ascent treatment.
    ranked = sorted(
        ((asm.solve_relaxed(splits), n, splits) for n, splits in enumerate(starts)),
        key=lambda t: (-t[0], t[1]),
    )
    skipped = sum(1 for val, _, _ in ranked if val == -math.inf)
    if skipped == len(ranked):
        raise SolverError(_failure_message(problem, "no feasible restart"))
    top = max(1, cfg.refine_top)
    scored = []
    for val, n, splits in ranked[: top + 2]:
        if val == -math.inf:
            continue
        sol = asm.solve_full(splits)
        if sol.status == "optimal":
            scored.append((sol.objective, n, splits, sol))
    scored.sort(key=lambda t: (-t[0], t[1]))
    # Equal-value leaders land on the same vertex; refining one is enough.
    deduped = []
    for entry in scored:
        if all(abs(entry[0] - kept[0]) > 1e-9 for kept in deduped):
            deduped.append(entry)
    scored = deduped or scored[:1]

    best_obj, _, best_splits, best_sol = scored[0]
    splittable = [
        (k, i)
        for k, s in enumerate(asm.states)
        for i in s.tx
        if asm.views[k].degree(i) >= 2
    ]

    for _, _, splits0, sol0 in scored[:top]:
        splits = {key: a.copy() for key, a in splits0.items()}
        cur_splits, cur_sol = dict(splits), sol0
        work_pools = asm._fresh_pools(range(len(asm.states)))
        for step in cfg.step_grid:
            improved_step = False
            for _ in range(cfg.max_cycles_per_step):
                lam_max = float(cur_sol.x[1 : 1 + len(asm.states)].max(initial=0.0))
                floor = max(SHARE_EPS, 0.005 * lam_max)
                live = [k for k in range(len(asm.states)) if cur_sol.x[1 + k] > floor]
                if not live:
                    break
                base = asm.solve_support(splits, live, work_pools)
                before = base
                for k, i in splittable:
                    if k not in live:
                        continue
                    block = splits[(k, i)]
                    for c in range(len(block)):
                        for sign in (1.0, -1.0):
                            cand = _project_capped_simplex(
                                block + sign * step * _unit(len(block), c)
                            )
                            if np.allclose(cand, block, atol=1e-12):
                                continue
                            trial = dict(splits)
                            trial[(k, i)] = cand
                            val = asm.solve_support(trial, live, work_pools)
                            if val > base + 1e-9:
                                splits = trial
                                block = cand
                                base = val
                if base - before < cfg.cycle_tol:
                    break
                improved_step = True
            if improved_step:
                full = asm.solve_full(splits)
                if full.status == "optimal" and full.objective > cur_sol.objective + 1e-12:
                    cur_splits, cur_sol = dict(splits), full
        if cur_sol.objective > best_obj + 1e-12:
            best_obj, best_splits, best_sol = cur_sol.objective, cur_splits, cur_sol

    configured = [ConfiguredState(s, "sc") for s in asm.states]
    shares = best_sol.x[1 : 1 + len(asm.states)].copy()
    flows: list[dict] = [dict() for _ in asm.states]
    for k in range(len(asm.states)):
        for local, (i, j) in enumerate(asm.link_index[k]):
            val = best_sol.x[int(asm.link_cols[k][local])]
            if val > 1e-12:
                flows[k][(i, j)] = float(val)
    return SchemeSolution(
        scheme="sc",
        rate=float(best_obj),
        shares=shares,
        configured=configured,
        flows=flows,
        totals=[{i: sum(f[l] for l in f if l[0] == i) for i in s.tx} for s, f in zip(asm.states, flows)],
        alpha={key: a.copy() for key, a in best_splits.items()},
        status="optimal",
        skipped_restarts=skipped,
        lp_iterations=best_sol.iterations,
    )


def _unit(n: int, c: int) -> np.ndarray:
    e = np.zeros(n)
    e[c] = 1.0
    return e


def compute_rate(
    net: Network,
    scheme: str,
    states: list[State] | None = None,
    seed: int = 0,
    dpc_source_interference: str = "reject",
    search: SearchConfig | None = None,
) -> SchemeSolution:
    """One-call scheme rate with default state selection."""
    problem = build_problem(net, scheme, states, dpc_source_interference)
    if scheme == "sc":
        cfg = search or SearchConfig(seed=seed)
        return solve_sc(problem, cfg)
    return solve_linear_scheme(problem)


# ---------------------------------------------------------------------------
# Brute-force oracle (tests only)
# ---------------------------------------------------------------------------


def _share_grid(n_states: int, grid: int):
    """All share vectors with entries k/grid summing to 1."""

    def rec(remaining: int, slots: int):
        if slots == 1:
            yield (remaining,)
            return
        for take in range(remaining + 1):
            for rest in rec(remaining - take, slots - 1):
                yield (take, *rest)

    for combo in rec(grid, n_states):
        yield np.array(combo, dtype=float) / grid


def brute_force_rate(
    net: Network,
    states: list[State],
    scheme: str,
    grid: int = 50,
) -> float:
    """Exhaustive share-grid oracle for the linear schemes.

    Walks every time-share vector on a grid of resolution ``1/grid`` and
    solves the remaining flow problem exactly with an independent LP
    backend (scipy/HiGHS).  Guards keep it to test-sized inputs.
    """
    if scheme not in ("ia", "cb", "dpc"):
        raise ValueError("oracle supports the linear schemes only")
    if net.node_count > 4:
        raise ValueError("oracle limited to 4 nodes")
    if grid > 200:
        raise ValueError("oracle grid limited to 1/200")
    problem = FlowProblem(net, list(states), scheme)
    configured = _configure(problem)
    if len(configured) > 3:
        raise ValueError("oracle limited to 3 configured states")

    from scipy.optimize import linprog

    net_ = problem.net
    views = [view(net_, cs.state) for cs in configured]
    links = [_allowed_links(net_, cs, v) for cs, v in zip(configured, views)]
    cols: dict = {"R": 0}
    for k, cs in enumerate(configured):
        for i, receivers in sorted(links[k].items()):
            if receivers:
                cols[("t", k, i)] = len(cols)
            for j in receivers:
                cols[("x", k, i, j)] = len(cols)
    ncols = len(cols)

    A_eq = []
    for node in range(1, net_.node_count + 1):
        row = np.zeros(ncols)
        for key, col in cols.items():
            if key == "R" or key[0] != "x":
                continue
            _, k, i, j = key
            if i == node:
                row[col] += 1.0
            elif j == node:
                row[col] -= 1.0
        if node == net_.source:
            row[0] -= 1.0
        elif node == net_.sink:
            row[0] += 1.0
        A_eq.append(row)
    A_eq = np.array(A_eq)
    b_eq = np.zeros(len(A_eq))

    regions = [_region_for(net_, cs, problem.dpc_source_interference) for cs in configured]
    best = 0.0
    for shares in _share_grid(len(configured), grid):
        A_ub, b_ub = [], []
        for k, cs in enumerate(configured):
            for i, receivers in sorted(links[k].items()):
                if not receivers:
                    continue
                row = np.zeros(ncols)
                for j in receivers:
                    row[cols[("x", k, i, j)]] = 1.0
                row[cols[("t", k, i)]] = -1.0
                A_ub.append(row)
                b_ub.append(0.0)
            for variables, rhs in regions[k].rows:
                row = np.zeros(ncols)
                touched = False
                for var in variables:
                    i = net_.source if var[0] == "src" else var[1]
                    col = cols.get(("t", k, i))
                    if col is not None:
                        row[col] = 1.0
                        touched = True
                if touched:
                    A_ub.append(row)
                    b_ub.append(float(shares[k] * rhs))
        res = linprog(
            c=-np.eye(ncols)[0],
            A_ub=np.array(A_ub),
            b_ub=np.array(b_ub),
            A_eq=A_eq,
            b_eq=b_eq,
            bounds=[(0, None)] * ncols,
            method="highs",
        )
        if res.status == 0:
            best = max(best, float(-res.fun))
    return best


# ---------------------------------------------------------------------------
# Certificates and reports
# ---------------------------------------------------------------------------


@dataclass
class Certificate:
    flow_residual: float
    share_sum: float
    region_violation: float

    def ok(self, tol: float = 1e-8) -> bool:
        return (
            self.flow_residual <= tol
            and self.share_sum <= 1.0 + 1e-9
            and self.region_violation <= tol
        )


def check_solution(problem: FlowProblem, sol: SchemeSolution) -> Certificate:
    """Re-verify a solution against the reference region generators."""
    net = problem.net
    balance = {v: 0.0 for v in range(1, net.node_count + 1)}
    for k, f in enumerate(sol.flows):
        for (i, j), val in f.items():
            balance[i] += val
            balance[j] -= val
    balance[net.source] -= sol.rate
    balance[net.sink] += sol.rate
    flow_residual = max(abs(v) for v in balance.values())

    worst = 0.0
    for k, cs in enumerate(sol.configured):
        lam = float(sol.shares[k])
        if cs.kind == "sc":
            v = view(net, cs.state)
            split = {i: np.asarray(sol.alpha[(k, i)]) for i in cs.state.tx}
            region = sc_region(net, cs.state, split)
            rates = {("link", i, j): val for (i, j), val in sol.flows[k].items()}
        else:
            region = _region_for(net, cs, problem.dpc_source_interference)
            totals: dict[int, float] = {}
            for (i, j), val in sol.flows[k].items():
                totals[i] = totals.get(i, 0.0) + val
            rates = {("tx", i): val for i, val in totals.items()}
            rates[("src",)] = totals.get(net.source, 0.0)
        for variables, rhs in region.rows:
            lhs = sum(rates.get(var, 0.0) for var in variables)
            worst = max(worst, lhs - lam * rhs)
    return Certificate(flow_residual, float(sol.shares.sum()), worst)


def solution_report(sol: SchemeSolution) -> str:
    """Plain-text summary: rate, active states with shares, flows, splits."""
    lines = [f"scheme: {sol.scheme}", f"rate: {sol.rate:.9g} bits/use"]
    if sol.skipped_restarts:
        lines.append(f"skipped restarts: {sol.skipped_restarts}")
    for k, lam in sol.active():
        cs = sol.configured[k]
        lines.append(f"state {cs.label()}  share={lam:.9g}")
        for (i, j), val in sorted(sol.flows[k].items()):
            lines.append(f"  flow {i}->{j}: {val:.9g}")
        if sol.alpha is not None:
            for i in cs.state.tx:
                arr = sol.alpha.get((k, i))
                if arr is not None and len(arr) >= 2:
                    vals = ", ".join(f"{a:.4g}" for a in arr)
                    lines.append(f"  split tx {i}: [{vals}]")
    return "\n".join(lines) + "\n"
