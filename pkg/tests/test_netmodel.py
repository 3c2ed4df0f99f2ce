import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import hdrelay as hd
from hdrelay.netmodel import (
    Edge,
    Network,
    NetworkError,
    parse_network,
    serialize_network,
    set_class,
)

TWO_NODE = """
{
  "nodes": 2, "source": 1, "sink": 2, "power": 3.0, "noise": 1.0,
  "edges": [{"u": 1, "v": 2, "gain": 1.0}]
}
"""


def test_parse_minimal_two_node():
    net = parse_network(TWO_NODE)
    assert net.node_count == 2
    assert net.source == 1 and net.sink == 2
    assert len(net.edges) == 1
    assert net.gain(1, 2) == 1.0


def test_builtin_twostage_shape():
    net = hd.load_builtin("twostage")
    assert net.node_count == 6
    assert (net.source, net.sink) == (1, 6)
    # Reconstructed two-stage topology: both stage-internal edges present.
    assert len(net.edges) == 10
    assert set(net.classes) == {"alpha", "beta", "gamma"}
    assert net.gain(1, 2) == 1.0
    assert net.gain(2, 3) == 1.0  # first-stage internal edge
    assert net.gain(4, 5) == 1.0  # second-stage internal edge


@pytest.mark.parametrize(
    "mutation, fragment",
    [
        ('{"nodes": 2, "source": 1, "sink": 2, "power": 3, "noise": 1, "edges": [{"u": 1, "v": 1, "gain": 1}]}', "self-loop"),
        ('{"nodes": 2, "source": 1, "sink": 1, "power": 3, "noise": 1, "edges": []}', "differ"),
        ('{"nodes": 2, "source": 1, "sink": 2, "power": 3, "noise": 1, "edges": [{"u": 1, "v": 2, "class": "zeta"}]}', "zeta"),
        ('{"nodes": 2, "source": 1, "sink": 2, "power": 3, "noise": 1, "edges": [{"u": 1, "v": 2, "gain": 1}, {"u": 2, "v": 1, "gain": 2}]}', "duplicate"),
        ('{"nodes": 2, "source": 1, "sink": 2, "power": -1, "noise": 1, "edges": []}', "power"),
        ('{"nodes": 2, "source": 3, "sink": 2, "power": 3, "noise": 1, "edges": []}', "out of range"),
    ],
)
def test_parse_errors_carry_field_context(mutation, fragment):
    with pytest.raises(NetworkError) as err:
        parse_network(mutation)
    assert fragment in str(err.value)


def test_missing_route_warns():
    text = '{"nodes": 3, "source": 1, "sink": 3, "power": 3, "noise": 1, "edges": [{"u": 1, "v": 2, "gain": 1}]}'
    with pytest.warns(UserWarning, match="no source-sink path"):
        parse_network(text)


def test_set_class_rebinds_only_class_edges():
    net = hd.load_builtin("twostage")
    hot = set_class(net, "beta", 10.0)
    assert hot.gain(2, 4) == 10.0
    assert hot.gain(1, 2) == 1.0
    assert net.gain(2, 4) == 1.0  # original untouched
    zero = set_class(net, "beta", 0.0)
    assert zero.gain(2, 4) == 0.0
    assert len(zero.edges) == len(net.edges)


def test_set_class_errors():
    net = hd.load_builtin("twostage")
    with pytest.raises(NetworkError):
        set_class(net, "delta", 1.0)
    with pytest.raises(NetworkError):
        set_class(net, "beta", -2.0)


def test_gain_symmetry_and_bounds():
    net = hd.load_builtin("twostage")
    for i in range(1, 7):
        for j in range(1, 7):
            assert net.gain(i, j) == net.gain(j, i)
    assert net.gain(1, 6) == 0.0  # non-edge
    with pytest.raises(NetworkError):
        net.gain(0, 1)
    with pytest.raises(NetworkError):
        net.gain(1, 7)


def _gains(draw_floats):
    return draw_floats


@st.composite
def networks(draw):
    m = draw(st.integers(min_value=2, max_value=6))
    pairs = [(u, v) for u in range(1, m + 1) for v in range(u + 1, m + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=1))
    gains = draw(
        st.lists(
            st.floats(min_value=0.01, max_value=100.0, allow_nan=False),
            min_size=len(chosen),
            max_size=len(chosen),
        )
    )
    # Representable at the serializer's 12 significant digits.
    edges = tuple(
        Edge(u, v, float(format(g, ".12g"))) for (u, v), g in zip(chosen, gains)
    )
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Network(
            node_count=m,
            source=1,
            sink=m,
            power=draw(st.sampled_from([1.0, 3.0, 10.0])),
            noise=1.0,
            edges=edges,
            classes={},
        )


@given(networks())
@settings(max_examples=60, deadline=None)
def test_serialize_round_trip(net):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        back = parse_network(serialize_network(net))
    assert back.node_count == net.node_count
    assert back.source == net.source and back.sink == net.sink
    assert back.power == net.power and back.noise == net.noise
    assert sorted(e.key() for e in back.edges) == sorted(e.key() for e in net.edges)
    for e in net.edges:
        assert back.gain(e.u, e.v) == net.resolved_gain(e)


def test_serializer_is_stable():
    net = hd.load_builtin("twostage")
    assert serialize_network(net) == serialize_network(parse_network(serialize_network(net)))


@given(networks())
@settings(max_examples=30, deadline=None)
def test_gain_symmetry_property(net):
    for i in range(1, net.node_count + 1):
        for j in range(1, net.node_count + 1):
            if i != j:
                assert net.gain(i, j) == net.gain(j, i)


def test_builtin_names():
    for name in hd.BUILTIN_NETWORKS:
        net = hd.load_builtin(name)
        assert net.node_count >= 2
    with pytest.raises(NetworkError):
        hd.load_builtin("nonesuch")
