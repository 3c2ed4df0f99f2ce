"""Cheap-relay cut-set upper bound for half-duplex time-sharing schedules.

For every source-side cut and every state, the information that can cross
the cut is bounded by the mutual information of the induced channel
between the cut's active transmitters and the far side's active receivers,
with the far side's own transmissions conditioned away.  Known sum-rate
capacities are used where the channel specializes (point-to-point, MAC,
degraded broadcast); otherwise the MIMO log-det with independent
equal-power inputs serves as the upper bound.  The bound itself is the LP
``max R  s.t.  R <= sum_k lambda_k C[cut][k]`` over time shares.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .capacity import (
    awgn_half_capacity,
    mimo_cooperative_capacity,
    mimo_equal_power_capacity,
)
from .lpsolve import LinearProgram, solve
from .netmodel import Network
from .states import State, state_label

__all__ = [
    "Cut",
    "SolverError",
    "enumerate_cuts",
    "cut_capacity",
    "capacity_table",
    "cutset_bound",
    "table_to_csv",
]

MAX_CUT_NODES = 22

BC_RULES = ("bc-sum", "simo-coop")
MIMO_RULES = ("equal-power", "cooperative")


class SolverError(RuntimeError):
    """LP backend failed on a problem that should be solvable."""


@dataclass(frozen=True)
class Cut:
    """Source-side node set; the sink always lies on the far side."""

    inside: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "inside", tuple(sorted(self.inside)))

    def label(self) -> str:
        return "{" + ",".join(map(str, self.inside)) + "}"


def enumerate_cuts(net: Network) -> list[Cut]:
    """All 2^(m-2) cuts with the source inside and the sink outside."""
    if net.node_count > MAX_CUT_NODES:
        raise ValueError(f"cut enumeration limited to {MAX_CUT_NODES} nodes")
    relays = [v for v in range(1, net.node_count + 1) if v not in (net.source, net.sink)]
    cuts = []
    for size in range(len(relays) + 1):
        for extra in combinations(relays, size):
            cuts.append(Cut((net.source, *extra)))
    return cuts


def cut_capacity(
    net: Network,
    cut: Cut,
    s: State,
    bc_rule: str = "bc-sum",
    mimo_rule: str = "equal-power",
) -> tuple[float, str]:
    """Crossing capacity of one (cut, state) pair, with a classification tag.

    Transmitters outside the cut are conditioned on, so they contribute no
    interference; receivers inside the cut are ignored.
    """
    if bc_rule not in BC_RULES:
        raise ValueError(f"bc_rule must be one of {BC_RULES}")
    if mimo_rule not in MIMO_RULES:
        raise ValueError(f"mimo_rule must be one of {MIMO_RULES}")
    inside = set(cut.inside)
    senders = [i for i in s.tx if i in inside]
    hearers = [j for j in s.rx if j not in inside]
    if not senders or not hearers:
        return 0.0, "empty"
    H = np.array([[net.gain(i, j) for i in senders] for j in hearers])
    if not (H > 0).any():
        return 0.0, "empty"
    scale = net.snr_scale
    if len(senders) == 1 and len(hearers) == 1:
        return awgn_half_capacity(float(H[0, 0]) ** 2 * scale), "point-to-point"
    if len(hearers) == 1:
        return awgn_half_capacity(float((H[0] ** 2).sum()) * scale), "MAC"
    if len(senders) == 1:
        if bc_rule == "bc-sum":
            return awgn_half_capacity(float((H[:, 0] ** 2).max()) * scale), "broadcast"
        return awgn_half_capacity(float((H[:, 0] ** 2).sum()) * scale), "broadcast"
    if mimo_rule == "equal-power":
        return mimo_equal_power_capacity(H, scale), "MIMO"
    return mimo_cooperative_capacity(H, net.power, net.noise), "MIMO"


def capacity_table(
    net: Network,
    states: list[State],
    cuts: list[Cut] | None = None,
    bc_rule: str = "bc-sum",
    mimo_rule: str = "equal-power",
) -> tuple[np.ndarray, list[list[str]], list[Cut]]:
    """Fill the (cut x state) capacity matrix; entries are independent."""
    if cuts is None:
        cuts = enumerate_cuts(net)
    table = np.zeros((len(cuts), len(states)))
    tags = [[""] * len(states) for _ in cuts]
    for a, cut in enumerate(cuts):
        for k, s in enumerate(states):
            value, tag = cut_capacity(net, cut, s, bc_rule, mimo_rule)
            table[a, k] = value
            tags[a][k] = tag
    return table, tags, cuts


def cutset_bound(
    net: Network,
    states: list[State],
    bc_rule: str = "bc-sum",
    mimo_rule: str = "equal-power",
) -> tuple[float, np.ndarray]:
    """Best time-sharing value of the cut-set bound over the given states.

    Returns the optimum and one optimizing share vector (indexed like
    ``states``).  Raises :class:`SolverError` if the LP backend fails.
    """
    if not states:
        raise ValueError("cutset_bound needs a nonempty state list")
    table, _, _ = capacity_table(net, states, None, bc_rule, mimo_rule)
    n_cuts, n_states = table.shape
    # Variables: R, then one share per state.
    lp = LinearProgram(num_vars=1 + n_states, objective={0: 1.0})
    for a in range(n_cuts):
        row = {0: 1.0}
        for k in range(n_states):
            if table[a, k] > 0.0:
                row[1 + k] = -table[a, k]
        lp.add(row, "<=", 0.0)
    lp.add({1 + k: 1.0 for k in range(n_states)}, "<=", 1.0)
    sol = solve(lp)
    if sol.status != "optimal":
        raise SolverError(f"cut-set LP ended with status {sol.status}")
    return float(sol.objective), sol.x[1:].copy()


def table_to_csv(
    table: np.ndarray, tags: list[list[str]], cuts: list[Cut], states: list[State]
) -> str:
    """CSV dump of the per-(cut, state) capacities for debugging."""
    header = "cut," + ",".join(state_label(s) for s in states)
    lines = [header]
    for a, cut in enumerate(cuts):
        cells = [f"{table[a, k]:.9g}[{tags[a][k]}]" for k in range(len(states))]
        lines.append(cut.label() + "," + ",".join(cells))
    return "\n".join(lines) + "\n"
