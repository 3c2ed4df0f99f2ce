import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import hdrelay as hd
from hdrelay.states import State, enumerate_states, ia_states, path_schedule, view


def _net(text):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return hd.parse_network(text)


def test_twostage_raw_count_is_324():
    net = hd.load_builtin("twostage")
    assert len(enumerate_states(net)) == 4 * 3**4 == 324


def test_two_node_raw_states():
    net = hd.load_builtin("twonode")
    states = enumerate_states(net)
    assert len(states) == 4
    assert State((1,), (2,)) in states
    assert State((), ()) in states


@given(st.integers(min_value=2, max_value=7))
@settings(max_examples=6, deadline=None)
def test_raw_count_formula(m):
    edges = ",".join(f'{{"u": {i}, "v": {i+1}, "gain": 1}}' for i in range(1, m))
    net = _net(
        f'{{"nodes": {m}, "source": 1, "sink": {m}, "power": 3, "noise": 1, "edges": [{edges}]}}'
    )
    assert len(enumerate_states(net)) == 4 * 3 ** (m - 2)


def test_role_constraints_hold_everywhere():
    net = hd.load_builtin("twostage")
    for s in enumerate_states(net):
        assert net.source not in s.rx
        assert net.sink not in s.tx
        assert not set(s.tx) & set(s.rx)


def test_ia_states_line():
    net = hd.load_builtin("line")
    assert ia_states(net) == [State((1,), (2,)), State((2,), (3,))]


def test_ia_states_two_node():
    net = hd.load_builtin("twonode")
    assert ia_states(net) == [State((1,), (2,))]


def test_ia_states_isolated_nodes():
    net = _net(
        '{"nodes": 3, "source": 1, "sink": 3, "power": 3, "noise": 1, "edges": []}'
    )
    assert ia_states(net) == []


def test_pruned_single_tx_gets_full_neighborhood():
    net = hd.load_builtin("twostage")
    singles = enumerate_states(net, max_tx=1, prune=True)
    # One state per eligible transmitter, each with every connected listener.
    assert len(singles) == 5
    by_tx = {s.tx[0]: s for s in singles}
    assert by_tx[1].rx == (2, 3)
    assert by_tx[2].rx == (3, 4, 5)  # R1 reaches R2, R3, R4
    assert by_tx[4].rx == (2, 3, 5, 6)


def test_pruned_drops_deaf_transmitters():
    net = hd.load_builtin("diamond")
    pruned = enumerate_states(net, max_tx=3, prune=True)
    # {source, both relays} prunes to the two-relay state: the source
    # cannot reach anyone once both relays transmit.
    assert State((1, 2, 3), (4,)) not in pruned
    assert State((2, 3), (4,)) in pruned


def test_default_mdf_set_twostage():
    net = hd.load_builtin("twostage")
    mdf = hd.default_mdf_states(net)
    assert len(mdf) == 20
    assert sum(1 for s in mdf if len(s.tx) == 1) == 5
    assert sum(1 for s in mdf if len(s.tx) == 2) == 10
    three = [s for s in mdf if len(s.tx) == 3]
    assert len(three) == 5
    for s in three:
        assert net.source in s.tx and net.sink in s.rx
    assert State((1, 2, 4), (3, 5, 6)) in three  # the paper pair S1 ...
    assert State((1, 3, 5), (2, 4, 6)) in three  # ... and S2


def test_default_mdf_rejects_large_networks():
    net = hd.load_builtin("grid4x3")
    with pytest.raises(ValueError, match="path_schedule"):
        hd.default_mdf_states(net)


def test_path_schedule_grid_matches_known_states():
    net = hd.load_builtin("grid4x3")
    states = path_schedule(net, hd.GRID_DEFAULT_PATHS)
    assert states == [
        State((2, 6, 8), (4, 9, 11)),
        State((2, 4, 9), (5, 7, 11)),
        State((2, 5, 7), (6, 8, 11)),
    ]
    for s in states:
        assert net.source in s.tx and net.sink in s.rx


def test_path_schedule_diamond():
    net = hd.load_builtin("diamond")
    states = path_schedule(net, [[1, 2, 4], [1, 3, 4]])
    assert set(states) == {State((1, 2), (3, 4)), State((1, 3), (2, 4))}


def test_path_schedule_single_path_warns():
    net = hd.load_builtin("line")
    with pytest.warns(UserWarning, match="single-path"):
        states = path_schedule(net, [[1, 2, 3]])
    assert states == [State((1,), (2,)), State((2,), (3,))]


def test_path_schedule_rejects_bad_paths():
    net = hd.load_builtin("grid4x3")
    with pytest.raises(ValueError, match="overlap"):
        path_schedule(net, [[2, 5, 8, 11], [2, 5, 8, 11]])
    with pytest.raises(ValueError, match="not an edge"):
        path_schedule(net, [[2, 7, 11]])
    with pytest.raises(ValueError, match="source"):
        path_schedule(net, [[4, 7, 11]])


def test_view_orders_receivers_by_gain_then_id():
    net = hd.set_class(hd.load_builtin("twostage"), "gamma", 0.5)
    s1 = State((1, 2, 4), (3, 5, 6))
    v = view(net, s1)
    # Transmitter 4 reaches 5 and 6 at gain 1 and 3 at gain 0.5.
    assert v.receivers_of[4] == (5, 6, 3)
    assert v.rank(4, 5) == 1 and v.rank(4, 3) == 3
    assert v.stronger(4, 6) == (5,)
    assert v.weaker_or_self(4, 6) == (6, 3)


def test_view_tie_break_by_node_id():
    net = hd.load_builtin("twostage")  # all gains equal
    v = view(net, State((4,), (2, 3, 6)))
    assert v.receivers_of[4] == (2, 3, 6)


def test_view_is_consistent_bipartite():
    net = hd.load_builtin("twostage")
    for s in hd.default_mdf_states(net):
        v = view(net, s)
        for i, js in v.receivers_of.items():
            for j in js:
                assert i in v.transmitters_of[j]
        for j, is_ in v.transmitters_of.items():
            for i in is_:
                assert j in v.receivers_of[i]


def test_single_receiver_degree():
    net = hd.load_builtin("line")
    v = view(net, State((1,), (2,)))
    assert v.degree(1) == 1
    assert v.receivers_of[1] == (2,)


def test_state_rejects_overlap():
    with pytest.raises(ValueError):
        State((1, 2), (2, 3))


def test_parse_state_list_roundtrip():
    net = hd.load_builtin("twostage")
    text = '{"states": [{"tx": [1, 3, 4], "rx": [2, 5, 6]}, {"tx": [1, 2, 5], "rx": [3, 4, 6]}]}'
    states = hd.parse_state_list(text, net)
    assert states == [State((1, 3, 4), (2, 5, 6)), State((1, 2, 5), (3, 4, 6))]
    with pytest.raises(ValueError):
        hd.parse_state_list('{"states": []}', net)
    with pytest.raises(ValueError):
        hd.parse_state_list('{"states": [{"tx": [6], "rx": [1]}]}', net)
