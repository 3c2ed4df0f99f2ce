"""Achievable rate regions per state for the three coding schemes.

All receivers run successive interference cancellation, so every region is
a list of sum-rate caps (coefficients are 0/1) over per-state rate
variables:

* common broadcast: each transmitter sends one message all its connected
  receivers must decode; the caps are the SIC multiple-access constraints
  at every receiver, over every transmitter subset.
* superposition coding: each transmitter splits power across independent
  per-receiver codewords.  A receiver decodes its own codeword and every
  codeword aimed at receivers ranked below it at that transmitter;
  codewords for stronger-ranked receivers stay as noise.
* source dirty-paper coding: the source pre-cancels relay interference at
  one chosen receiver, which then decodes only the source message; relays
  broadcast common messages decoded by everyone else.

Variables are local to one state: ``("tx", i)`` is transmitter i's common
rate, ``("link", i, j)`` a superposition codeword rate, ``("src",)`` the
dirty-paper-coded source rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import chain, combinations

import numpy as np

from .capacity import awgn_half_capacity
from .netmodel import Network
from .states import State, StateView, view

__all__ = [
    "ConstraintSet",
    "cb_region",
    "sc_region",
    "dpc_region",
    "ia_region",
    "admissible_dpc_receivers",
    "validate_split",
    "equal_split",
    "region_to_csv",
]

MAX_RECEIVER_DEGREE = 20
MAX_SIC_GROUP = 16
SPLIT_TOL = 1e-9

RateVar = tuple  # ("tx", i) | ("link", i, j) | ("src",)


@dataclass
class ConstraintSet:
    """Sum-rate caps for one (scheme, state); rhs in bits per channel use."""

    scheme: str
    state: State
    rows: list[tuple[tuple[RateVar, ...], float]] = field(default_factory=list)
    dpc_receiver: int | None = None

    def add(self, variables: tuple[RateVar, ...], rhs: float) -> None:
        self.rows.append((variables, rhs))


def _nonempty_subsets(items):
    return chain.from_iterable(combinations(items, k) for k in range(1, len(items) + 1))


def cb_region(net: Network, s: State) -> ConstraintSet:
    """Common-broadcast region: SIC-MAC caps at every receiver."""
    v = view(net, s)
    scale = net.snr_scale
    region = ConstraintSet("cb", s)
    for j in s.rx:
        senders = v.transmitters_of[j]
        if len(senders) > MAX_RECEIVER_DEGREE:
            raise ValueError(f"receiver {j} degree {len(senders)} exceeds guard")
        for group in _nonempty_subsets(senders):
            snr = sum(net.gain(i, j) ** 2 for i in group) * scale
            region.add(tuple(("tx", i) for i in group), awgn_half_capacity(snr))
    return region


def ia_region(net: Network, s: State) -> ConstraintSet:
    """Interference-avoidance region: the single-transmitter case of CB."""
    if len(s.tx) != 1:
        raise ValueError(f"interference avoidance needs a single transmitter, got {len(s.tx)}")
    region = cb_region(net, s)
    region.scheme = "ia"
    return region


def equal_split(v: StateView) -> dict[int, np.ndarray]:
    """Uniform power split at every transmitter (a valid default)."""
    return {
        i: np.full(d, 1.0 / d) if (d := v.degree(i)) else np.zeros(0)
        for i in v.state.tx
    }


def validate_split(v: StateView, split: dict[int, np.ndarray]) -> None:
    for i in v.state.tx:
        alloc = np.asarray(split.get(i, np.zeros(0)), dtype=float)
        if alloc.shape != (v.degree(i),):
            raise ValueError(
                f"transmitter {i}: split length {alloc.shape} != degree {v.degree(i)}"
            )
        if (alloc < -SPLIT_TOL).any() or alloc.sum() > 1.0 + SPLIT_TOL:
            raise ValueError(f"transmitter {i}: power split outside the simplex")


def sc_region(net: Network, s: State, split: dict[int, np.ndarray]) -> ConstraintSet:
    """Superposition-coding region for one fixed power split.

    ``split[i]`` gives the power fractions for transmitter i's codewords in
    the order of ``view(net, s).receivers_of[i]`` (descending gain).  Rows
    are the per-codeword SIC caps and, per receiver, the joint caps over
    every subset of the codewords it decodes.
    """
    v = view(net, s)
    validate_split(v, split)
    P, var = net.power, net.noise
    region = ConstraintSet("sc", s)

    def alpha(i: int, j: int) -> float:
        return float(split[i][v.rank(i, j) - 1])

    # Per-codeword cap: interference only from the same transmitter's
    # codewords for stronger-ranked receivers, seen through the same link.
    for i in s.tx:
        for j in v.receivers_of[i]:
            g2 = net.gain(i, j) ** 2
            interference = g2 * P * sum(alpha(i, l) for l in v.stronger(i, j))
            num = g2 * alpha(i, j) * P
            region.add((("link", i, j),), awgn_half_capacity(num / (var + interference)))

    # Joint caps at each receiver over the codewords it decodes (its own
    # and all weaker-ranked ones from every connected transmitter); noise
    # includes every undecoded (stronger-ranked) codeword.
    for j in s.rx:
        decoded = [
            (p, q) for p in v.transmitters_of[j] for q in v.weaker_or_self(p, j)
        ]
        if len(decoded) > MAX_SIC_GROUP:
            raise ValueError(f"receiver {j}: SIC group of {len(decoded)} exceeds guard")
        den = var + sum(
            net.gain(p, j) ** 2 * P * alpha(p, l)
            for p in v.transmitters_of[j]
            for l in v.stronger(p, j)
        )
        for group in _nonempty_subsets(decoded):
            num = sum(net.gain(p, j) ** 2 * alpha(p, q) * P for p, q in group)
            region.add(
                tuple(("link", p, q) for p, q in group),
                awgn_half_capacity(num / den),
            )
    return region


def admissible_dpc_receivers(net: Network, s: State) -> list[int]:
    """Receivers the source can serve with DPC without leaking interference.

    The relay constraints carry no source-interference term, so a choice of
    r is valid only when the source has no edge to any other active
    receiver.
    """
    if net.source not in s.tx:
        return []
    v = view(net, s)
    out = []
    for r in v.receivers_of[net.source]:
        if all(net.gain(net.source, j) == 0.0 for j in s.rx if j != r):
            out.append(r)
    return out


def dpc_region(
    net: Network,
    s: State,
    r: int,
    source_interference: str = "reject",
) -> ConstraintSet:
    """Dirty-paper source + common-broadcast relays, for DPC receiver ``r``.

    With ``source_interference="noise"``, states where the source is heard
    by another active receiver are admitted by adding the source's power to
    that receiver's noise instead of rejecting the state.
    """
    if source_interference not in ("reject", "noise"):
        raise ValueError("source_interference must be 'reject' or 'noise'")
    v = view(net, s)
    src = net.source
    if src not in s.tx:
        raise ValueError("dirty-paper coding needs the source transmitting")
    if r not in v.receivers_of.get(src, ()):
        raise ValueError(f"receiver {r} is not connected to the source in this state")
    leaks = [j for j in s.rx if j != r and net.gain(src, j) > 0.0]
    if leaks and source_interference == "reject":
        raise ValueError(
            f"source also reaches active receivers {leaks}; "
            "state invalid for DPC (use source_interference='noise')"
        )
    P, var = net.power, net.noise
    region = ConstraintSet("dpc", s, dpc_receiver=r)
    region.add((("src",),), awgn_half_capacity(net.gain(src, r) ** 2 * P / var))
    for j in s.rx:
        if j == r:
            continue
        senders = tuple(i for i in v.transmitters_of[j] if i != src)
        if len(senders) > MAX_RECEIVER_DEGREE:
            raise ValueError(f"receiver {j} degree {len(senders)} exceeds guard")
        noise_j = var + (net.gain(src, j) ** 2 * P if j in leaks else 0.0)
        for group in _nonempty_subsets(senders):
            snr = sum(net.gain(i, j) ** 2 for i in group) * P / noise_j
            region.add(tuple(("tx", i) for i in group), awgn_half_capacity(snr))
    return region


def region_to_csv(region: ConstraintSet) -> str:
    """Debug dump: one row per constraint, variables then rhs."""
    lines = ["variables,rhs"]
    for variables, rhs in region.rows:
        label = "+".join(
            "R_src" if kind[0] == "src" else
        ("R_" + "_".join(map(str, kind[1:])))
            for kind in variables
        )
        lines.append(f"{label},{rhs:.9g}")
    return "\n".join(lines) + "\n"
