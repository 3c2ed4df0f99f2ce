"""Wireless network instances: nodes, classed edge gains, file format.

A network is an undirected graph with a single source and sink, a common
per-node transmit power and per-receiver noise variance, and a nonnegative
gain on every edge.  Edge gains are either literal numbers or references to
a named gain class, so parameter sweeps can rebind one class value without
touching the topology.

File format (JSON, one object per network)::

    {
      "nodes": 6,
      "source": 1,
      "sink": 6,
      "power": 3.0,
      "noise": 1.0,
      "classes": {"alpha": 1.0, "beta": 1.0},
      "edges": [
        {"u": 1, "v": 2, "class": "alpha"},
        {"u": 2, "v": 4, "gain": 0.5}
      ]
    }

Node ids are 1-based.  Each edge carries exactly one of ``gain`` (literal,
>= 0) or ``class`` (name present in ``classes``).  ``serialize_network``
emits a canonical form: sorted keys, fixed 12-significant-digit floats, so
identical networks serialize to identical bytes.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace

__all__ = [
    "Edge",
    "Network",
    "NetworkError",
    "parse_network",
    "serialize_network",
    "set_class",
]


class NetworkError(ValueError):
    """Raised for malformed network descriptions; message carries the field path."""


@dataclass(frozen=True)
class Edge:
    """Undirected edge; ``gain`` is a literal value or a class name string."""

    u: int
    v: int
    gain: float | str

    def key(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


@dataclass(frozen=True)
class Network:
    """Immutable problem instance; safe to share across concurrent solves."""

    node_count: int
    source: int
    sink: int
    power: float
    noise: float
    edges: tuple[Edge, ...]
    classes: dict[str, float] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        _validate(self)

    @property
    def snr_scale(self) -> float:
        """Power over noise; every rate in the model depends on gains only via h^2 * this."""
        return self.power / self.noise

    def resolved_gain(self, edge: Edge) -> float:
        if isinstance(edge.gain, str):
            return self.classes[edge.gain]
        return float(edge.gain)

    def gain(self, i: int, j: int) -> float:
        """Resolved gain h_ij for the pair (i, j); 0 for non-edges; symmetric."""
        for node in (i, j):
            if not 1 <= node <= self.node_count:
                raise NetworkError(f"node id {node} out of range 1..{self.node_count}")
        return self._gain_map().get((i, j) if i < j else (j, i), 0.0)

    def neighbors(self, i: int) -> tuple[int, ...]:
        """Nodes adjacent to i through a positive-gain edge, ascending."""
        out = []
        for e in self.edges:
            if i in (e.u, e.v) and self.resolved_gain(e) > 0.0:
                out.append(e.v if e.u == i else e.u)
        return tuple(sorted(out))

    def gain_matrix(self):
        """Symmetric node_count x node_count gain matrix (1-based ids on axes 0..n-1)."""
        import numpy as np

        g = np.zeros((self.node_count, self.node_count))
        for e in self.edges:
            h = self.resolved_gain(e)
            g[e.u - 1, e.v - 1] = h
            g[e.v - 1, e.u - 1] = h
        return g

    def _gain_map(self) -> dict[tuple[int, int], float]:
        return {e.key(): self.resolved_gain(e) for e in self.edges}

    def has_route(self) -> bool:
        """True when a positive-gain path connects source to sink."""
        seen = {self.source}
        frontier = [self.source]
        while frontier:
            node = frontier.pop()
            for nbr in self.neighbors(node):
                if nbr not in seen:
                    seen.add(nbr)
                    frontier.append(nbr)
        return self.sink in seen


def _validate(net: Network) -> None:
    if net.node_count < 2:
        raise NetworkError("nodes: need at least 2 nodes")
    for label, node in (("source", net.source), ("sink", net.sink)):
        if not 1 <= node <= net.node_count:
            raise NetworkError(f"{label}: node id {node} out of range 1..{net.node_count}")
    if net.source == net.sink:
        raise NetworkError("sink: source and sink must differ")
    if not (net.power > 0 and math.isfinite(net.power)):
        raise NetworkError("power: must be positive and finite")
    if not (net.noise > 0 and math.isfinite(net.noise)):
        raise NetworkError("noise: must be positive and finite")
    for name, value in net.classes.items():
        if not (math.isfinite(value) and value >= 0):
            raise NetworkError(f"classes.{name}: gain must be finite and >= 0")
    seen: set[tuple[int, int]] = set()
    for idx, e in enumerate(net.edges):
        path = f"edges[{idx}]"
        for which, node in (("u", e.u), ("v", e.v)):
            if not 1 <= node <= net.node_count:
                raise NetworkError(f"{path}.{which}: node id {node} out of range")
        if e.u == e.v:
            raise NetworkError(f"{path}: self-loop at node {e.u}")
        if e.key() in seen:
            raise NetworkError(f"{path}: duplicate edge {e.key()}")
        seen.add(e.key())
        if isinstance(e.gain, str):
            if e.gain not in net.classes:
                raise NetworkError(f"{path}.class: unknown class {e.gain!r}")
        elif not (math.isfinite(e.gain) and e.gain >= 0):
            raise NetworkError(f"{path}.gain: must be finite and >= 0")
    if not net.has_route():
        warnings.warn(
            f"network {net.name or '<unnamed>'}: no source-sink path; all rates will be 0",
            stacklevel=3,
        )


def set_class(net: Network, name: str, value: float) -> Network:
    """Return a copy of ``net`` with gain class ``name`` rebound to ``value``.

    Edges with literal gains are unaffected.  Raises for unknown classes and
    negative or non-finite values.
    """
    if name not in net.classes:
        raise NetworkError(f"classes.{name}: unknown class")
    if not (math.isfinite(value) and value >= 0):
        raise NetworkError(f"classes.{name}: gain must be finite and >= 0")
    classes = dict(net.classes)
    classes[name] = float(value)
    return replace(net, classes=classes)


def _field(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise NetworkError(f"{path}{key}: missing")
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise NetworkError(f"{path}{key}: expected a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise NetworkError(f"{path}{key}: expected an integer")
        return value
    if not isinstance(value, kind):
        raise NetworkError(f"{path}{key}: expected {kind.__name__}")
    return value


def parse_network(text: str, name: str = "") -> Network:
    """Parse the JSON network format into a validated :class:`Network`.

    Class references stay symbolic so :func:`set_class` can rebind them
    later.  Schema violations raise :class:`NetworkError` with the offending
    field path in the message.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise NetworkError("top level: expected an object")

    classes_raw = raw.get("classes", {})
    if not isinstance(classes_raw, dict):
        raise NetworkError("classes: expected an object")
    classes = {}
    for key, value in classes_raw.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise NetworkError(f"classes.{key}: expected a number")
        classes[str(key)] = float(value)

    edges_raw = raw.get("edges", [])
    if not isinstance(edges_raw, list):
        raise NetworkError("edges: expected a list")
    edges = []
    for idx, item in enumerate(edges_raw):
        path = f"edges[{idx}]."
        if not isinstance(item, dict):
            raise NetworkError(f"edges[{idx}]: expected an object")
        u = _field(item, "u", int, path)
        v = _field(item, "v", int, path)
        if ("gain" in item) == ("class" in item):
            raise NetworkError(f"edges[{idx}]: exactly one of 'gain' or 'class' required")
        if "gain" in item:
            gain: float | str = _field(item, "gain", float, path)
        else:
            gain = _field(item, "class", str, path)
        edges.append(Edge(u, v, gain))

    return Network(
        node_count=_field(raw, "nodes", int, ""),
        source=_field(raw, "source", int, ""),
        sink=_field(raw, "sink", int, ""),
        power=_field(raw, "power", float, ""),
        noise=_field(raw, "noise", float, ""),
        edges=tuple(edges),
        classes=classes,
        name=name or str(raw.get("name", "")),
    )


def _fmt(x: float) -> str:
    # 12 significant digits keeps the serializer byte-stable across runs.
    out = format(float(x), ".12g")
    return out


def serialize_network(net: Network) -> str:
    """Canonical text for ``net``: sorted keys, 12-significant-digit floats."""
    lines = ["{"]
    lines.append(f'  "classes": {{')
    cls_lines = [f'    "{k}": {_fmt(v)}' for k, v in sorted(net.classes.items())]
    lines.append(",\n".join(cls_lines))
    lines.append("  },")
    edge_lines = []
    for e in sorted(net.edges, key=lambda e: e.key()):
        u, v = e.key()
        if isinstance(e.gain, str):
            edge_lines.append(f'    {{"class": "{e.gain}", "u": {u}, "v": {v}}}')
        else:
            edge_lines.append(f'    {{"gain": {_fmt(e.gain)}, "u": {u}, "v": {v}}}')
    lines.append('  "edges": [')
    lines.append(",\n".join(edge_lines))
    lines.append("  ],")
    if net.name:
        lines.append(f'  "name": "{net.name}",')
    lines.append(f'  "nodes": {net.node_count},')
    lines.append(f'  "noise": {_fmt(net.noise)},')
    lines.append(f'  "power": {_fmt(net.power)},')
    lines.append(f'  "sink": {net.sink},')
    lines.append(f'  "source": {net.source}')
    lines.append("}")
    return "\n".join(lines) + "\n"
