"""Half-duplex operating states and per-state connectivity views.

A state assigns every node one of transmit / receive / idle, subject to the
half-duplex role constraints: the source never receives and the sink never
transmits.  Raw enumeration therefore yields ``2 * 2 * 3^(m-2)`` states for
an ``m``-node network.  Active transmitters form an interference network
with the active receivers; :class:`StateView` exposes the bipartite
neighbor sets and the gain-ordered receiver ranking that the coding-scheme
regions are written against.

Pruned enumeration is transmitter-driven: each admissible transmitter set
is paired with the full set of eligible listeners, transmitters with no
connected receiver are dropped, and duplicates are merged.  That mirrors
how schedules are described for these networks (a state is named by who
talks; everyone connected listens).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations, product

from .netmodel import Network

__all__ = [
    "State",
    "StateView",
    "enumerate_states",
    "ia_states",
    "default_mdf_states",
    "path_schedule",
    "view",
    "parse_state_list",
    "state_label",
]


@dataclass(frozen=True)
class State:
    """One half-duplex operating mode: transmitter set and receiver set."""

    tx: tuple[int, ...]
    rx: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tx", tuple(sorted(self.tx)))
        object.__setattr__(self, "rx", tuple(sorted(self.rx)))
        if set(self.tx) & set(self.rx):
            raise ValueError(f"state {self}: a node cannot transmit and receive at once")


def state_label(s: State) -> str:
    tx = ",".join(map(str, s.tx))
    rx = ",".join(map(str, s.rx))
    return f"({{{tx}}} -> {{{rx}}})"


def check_roles(net: Network, s: State) -> None:
    if net.source in s.rx:
        raise ValueError(f"state {state_label(s)}: source cannot receive")
    if net.sink in s.tx:
        raise ValueError(f"state {state_label(s)}: sink cannot transmit")
    for node in (*s.tx, *s.rx):
        if not 1 <= node <= net.node_count:
            raise ValueError(f"state {state_label(s)}: node id {node} out of range")


def _state_sort_key(s: State):
    return (len(s.tx), s.tx, s.rx)


def enumerate_states(
    net: Network,
    max_tx: int | None = None,
    prune: bool = False,
) -> list[State]:
    """All role-constrained states, optionally pruned.

    Without pruning this is the raw mode enumeration (relays in
    {transmit, receive, idle}, source in {transmit, idle}, sink in
    {receive, idle}), filtered to ``len(tx) <= max_tx``; the count is
    ``2^2 * 3^(m-2)`` when unbounded.  With pruning, one state per
    nondegenerate transmitter set is returned, each with its full eligible
    listener set, deduplicated and with empty states dropped.

    Ordering is deterministic: by transmitter count, then lexicographically.
    """
    m = net.node_count
    limit = m if max_tx is None else max_tx
    if prune:
        return _enumerate_pruned(net, limit)

    relays = [v for v in range(1, m + 1) if v not in (net.source, net.sink)]
    out = []
    src_modes = ("t", "i")
    snk_modes = ("r", "i")
    relay_modes = ("t", "r", "i")
    for src_mode, snk_mode in product(src_modes, snk_modes):
        for modes in product(relay_modes, repeat=len(relays)):
            tx = [net.source] if src_mode == "t" else []
            rx = [net.sink] if snk_mode == "r" else []
            for node, mode in zip(relays, modes):
                if mode == "t":
                    tx.append(node)
                elif mode == "r":
                    rx.append(node)
            if len(tx) > limit:
                continue
            out.append(State(tuple(tx), tuple(rx)))
    out.sort(key=_state_sort_key)
    return out


def _prune_tx_set(net: Network, tx_set: tuple[int, ...]) -> State | None:
    """Pair a transmitter set with its full listener set; drop deaf transmitters."""
    tx = set(tx_set)
    while True:
        rx = set()
        for i in tx:
            for j in net.neighbors(i):
                if j not in tx and j != net.source:
                    rx.add(j)
        deaf = {i for i in tx if not any(j in rx for j in net.neighbors(i))}
        if not deaf:
            break
        tx -= deaf
    if not tx or not rx:
        return None
    return State(tuple(tx), tuple(rx))


def _enumerate_pruned(net: Network, max_tx: int) -> list[State]:
    candidates = [v for v in range(1, net.node_count + 1) if v != net.sink]
    seen: set[State] = set()
    out = []
    for size in range(1, min(max_tx, len(candidates)) + 1):
        for tx_set in combinations(candidates, size):
            s = _prune_tx_set(net, tx_set)
            if s is not None and s not in seen:
                seen.add(s)
                out.append(s)
    out.sort(key=_state_sort_key)
    return out


def ia_states(net: Network) -> list[State]:
    """Single-transmitter states (no receiver ever sees interference)."""
    return enumerate_states(net, max_tx=1, prune=True)


def default_mdf_states(net: Network) -> list[State]:
    """Default schedule candidates for small networks.

    Single-transmitter states, all pruned two-transmitter states, and the
    pruned three-transmitter states in which the source transmits and the
    sink receives.  Larger networks (m > 8) must supply an explicit state
    list or a path schedule.
    """
    if net.node_count > 8:
        raise ValueError(
            "default state selection is limited to 8 nodes; "
            "use path_schedule or an explicit state list"
        )
    picked = enumerate_states(net, max_tx=2, prune=True)
    chosen = set(picked)
    for s in enumerate_states(net, max_tx=3, prune=True):
        if len(s.tx) == 3 and net.source in s.tx and net.sink in s.rx and s not in chosen:
            picked.append(s)
            chosen.add(s)
    picked.sort(key=_state_sort_key)
    return picked


def path_schedule(net: Network, paths: list[list[int]]) -> list[State]:
    """Round-robin hop schedule over vertex-disjoint source-sink paths.

    With ``n`` paths of ``L`` hops each, builds one state per hop offset
    ``r``: path ``p`` activates its hop ``(r + p) mod L``.  When the number
    of paths equals the hop count, the source transmits and the sink
    receives in every state.  Paths must be vertex-disjoint away from the
    endpoints, start at the source, end at the sink, and follow edges.
    """
    if not paths:
        raise ValueError("need at least one path")
    for p_idx, path in enumerate(paths):
        if len(path) < 2:
            raise ValueError(f"paths[{p_idx}]: too short")
        if path[0] != net.source or path[-1] != net.sink:
            raise ValueError(f"paths[{p_idx}]: must run source -> sink")
        for a, b in zip(path, path[1:]):
            if net.gain(a, b) <= 0.0:
                raise ValueError(f"paths[{p_idx}]: ({a},{b}) is not an edge")
    interiors = [set(p[1:-1]) for p in paths]
    for (i, a), (j, b) in combinations(enumerate(interiors), 2):
        if a & b:
            raise ValueError(f"paths[{i}] and paths[{j}] overlap at {sorted(a & b)}")

    hops = len(paths[0]) - 1
    if any(len(p) - 1 != hops for p in paths):
        raise ValueError("paths must all have the same hop count")
    if len(paths) == 1:
        warnings.warn(
            "single-path schedule: the source idles in all but one state",
            stacklevel=2,
        )
    elif len(paths) != hops:
        warnings.warn(
            f"{len(paths)} paths with {hops} hops: the source may idle in some states",
            stacklevel=2,
        )

    out = []
    for r in range(hops):
        tx, rx = set(), set()
        for p_idx, path in enumerate(paths):
            hop = (r - p_idx) % hops
            tx.add(path[hop])
            rx.add(path[hop + 1])
        s = State(tuple(tx), tuple(rx))
        check_roles(net, s)
        out.append(s)
    return out


class StateView:
    """Bipartite connectivity of one state, with gain-ordered receiver lists.

    ``receivers_of[i]`` lists the receivers connected to transmitter ``i``
    in descending gain order (ties broken by ascending node id), which is
    the decoding order the superposition-coding region assumes.
    """

    def __init__(self, net: Network, s: State):
        check_roles(net, s)
        self.state = s
        self.net = net
        recv: dict[int, tuple[int, ...]] = {}
        for i in s.tx:
            conn = [j for j in s.rx if net.gain(i, j) > 0.0]
            conn.sort(key=lambda j: (-net.gain(i, j), j))
            recv[i] = tuple(conn)
        self.receivers_of = recv
        trans: dict[int, tuple[int, ...]] = {}
        for j in s.rx:
            trans[j] = tuple(i for i in s.tx if net.gain(i, j) > 0.0)
        self.transmitters_of = trans
        self._rank = {
            (i, j): pos + 1 for i, js in recv.items() for pos, j in enumerate(js)
        }

    def degree(self, i: int) -> int:
        return len(self.receivers_of[i])

    def rank(self, i: int, j: int) -> int:
        """1-based position of receiver j in transmitter i's ordered list."""
        return self._rank[i, j]

    def stronger(self, i: int, j: int) -> tuple[int, ...]:
        """Receivers of i ranked strictly above j."""
        return self.receivers_of[i][: self.rank(i, j) - 1]

    def weaker_or_self(self, i: int, j: int) -> tuple[int, ...]:
        """Receiver j and the receivers of i ranked below it."""
        return self.receivers_of[i][self.rank(i, j) - 1 :]


def view(net: Network, s: State) -> StateView:
    return StateView(net, s)


def parse_state_list(text: str, net: Network) -> list[State]:
    """Load a pinned schedule: JSON ``{"states": [{"tx": [...], "rx": [...]}]}``."""
    import json

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON state list: {exc}") from exc
    items = raw.get("states") if isinstance(raw, dict) else None
    if not isinstance(items, list) or not items:
        raise ValueError("state list: expected a nonempty 'states' array")
    out = []
    for idx, item in enumerate(items):
        if not isinstance(item, dict) or "tx" not in item or "rx" not in item:
            raise ValueError(f"states[{idx}]: expected an object with 'tx' and 'rx'")
        s = State(tuple(item["tx"]), tuple(item["rx"]))
        check_roles(net, s)
        out.append(s)
    return out
