"""Achievable rates and cut-set bounds for multihop half-duplex relay networks."""

from importlib import resources

from .cutset import Cut, SolverError, cut_capacity, cutset_bound, enumerate_cuts
from .flowopt import (
    FlowProblem,
    SchemeSolution,
    SearchConfig,
    brute_force_rate,
    build_problem,
    check_solution,
    compute_rate,
    solve_dpc,
    solve_linear_scheme,
    solve_sc,
)
from .netmodel import Edge, Network, NetworkError, parse_network, serialize_network, set_class
from .regions import cb_region, dpc_region, ia_region, sc_region
from .states import (
    State,
    StateView,
    default_mdf_states,
    enumerate_states,
    ia_states,
    path_schedule,
    parse_state_list,
    view,
)

__version__ = "0.1.0"

BUILTIN_NETWORKS = ("twonode", "line", "diamond", "twostage", "grid4x3")

GRID_DEFAULT_PATHS = [[2, 4, 7, 11], [2, 5, 8, 11], [2, 6, 9, 11]]


def load_builtin(name: str) -> Network:
    """Load one of the bundled example networks by name."""
    if name not in BUILTIN_NETWORKS:
        raise NetworkError(f"unknown built-in network {name!r}; choose from {BUILTIN_NETWORKS}")
    text = resources.files("hdrelay.data").joinpath(f"{name}.json").read_text()
    return parse_network(text, name=name)
