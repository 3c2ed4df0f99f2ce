"""Command-line frontend.

Subcommands::

    hdrelay net validate NET
    hdrelay states enum NET [--max-tx N] [--prune]
    hdrelay bound NET [options]
    hdrelay rate NET --scheme {ia,cb,sc,dpc} [options]
    hdrelay sweep NET --vary CLASS --from A --to B --points N [options]

``NET`` is either a path to a network file or one of the built-in names
(twonode, line, diamond, twostage, grid4x3).  Exit codes: 0 success,
2 parse or validation error, 3 solver failure.  Set ``HDRELAY_LOG`` to a
logging level name (e.g. ``debug``) for diagnostics on stderr.

The sweep command writes CSV with one row per parameter value and one
column per requested quantity; reruns with the same seed are
byte-identical.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import BUILTIN_NETWORKS, GRID_DEFAULT_PATHS, load_builtin
from .cutset import SolverError, capacity_table, cutset_bound, enumerate_cuts, table_to_csv
from .flowopt import (
    SearchConfig,
    build_problem,
    check_solution,
    compute_rate,
    solution_report,
    solve_linear_scheme,
    solve_sc,
)
from .netmodel import Network, NetworkError, parse_network, set_class
from .states import (
    State,
    default_mdf_states,
    enumerate_states,
    ia_states,
    parse_state_list,
    path_schedule,
    state_label,
)

log = logging.getLogger("hdrelay")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3

SCHEME_ORDER = ("ia", "cb", "sc", "dpc", "bound")


def _setup_logging() -> None:
    level = os.environ.get("HDRELAY_LOG", "warning").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.WARNING))


def _load_network(spec: str) -> Network:
    if spec in BUILTIN_NETWORKS:
        return load_builtin(spec)
    path = Path(spec)
    if not path.exists():
        raise NetworkError(f"no such network file or built-in name: {spec}")
    return parse_network(path.read_text(), name=path.stem)


def _apply_sets(net: Network, assignments: list[str]) -> Network:
    for item in assignments:
        if "=" not in item:
            raise NetworkError(f"--set expects class=value, got {item!r}")
        name, _, raw = item.partition("=")
        try:
            value = float(raw)
        except ValueError as exc:
            raise NetworkError(f"--set {name}: {raw!r} is not a number") from exc
        net = set_class(net, name.strip(), value)
    return net


def _parse_paths(raw: str) -> list[list[int]]:
    paths = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            paths.append([int(x) for x in chunk.replace("-", ",").split(",") if x.strip()])
        except ValueError as exc:
            raise NetworkError(f"--paths: bad path {chunk!r}") from exc
    if not paths:
        raise NetworkError("--paths: no paths given")
    return paths


def _resolve_states(net: Network, args, scheme: str | None) -> list[State] | None:
    """Return an explicit state list, or None for the per-command default."""
    if getattr(args, "paths", None):
        return path_schedule(net, _parse_paths(args.paths))
    source = getattr(args, "states", "auto")
    if source == "auto":
        if net.name == "grid4x3":
            return path_schedule(net, GRID_DEFAULT_PATHS)
        return None
    if source == "ia-only":
        return ia_states(net)
    return parse_state_list(Path(source).read_text(), net)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("network", help="network file or built-in name")
    p.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="CLASS=VALUE",
        help="rebind a gain class (repeatable)",
    )
    p.add_argument(
        "--states",
        default="auto",
        help="state source: auto, ia-only, or a state-list file",
    )
    p.add_argument("--paths", help='path schedule, e.g. "2,4,7,11;2,5,8,11;2,6,9,11"')
    p.add_argument("--max-tx", type=int, default=None, help="transmitter-count cap")


def make_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="hdrelay", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    p_net = sub.add_parser("net", help="network utilities")
    net_sub = p_net.add_subparsers(dest="net_command", required=True)
    p_val = net_sub.add_parser("validate", help="parse and validate a network file")
    p_val.add_argument("network")
    p_val.add_argument("--set", action="append", default=[], metavar="CLASS=VALUE")

    p_states = sub.add_parser("states", help="state enumeration")
    st_sub = p_states.add_subparsers(dest="states_command", required=True)
    p_enum = st_sub.add_parser("enum", help="list half-duplex states")
    _add_common(p_enum)
    p_enum.add_argument("--prune", action="store_true", help="drop degenerate states")

    p_bound = sub.add_parser("bound", help="cheap-relay cut-set upper bound")
    _add_common(p_bound)
    p_bound.add_argument("--bc-rule", choices=("bc-sum", "simo-coop"), default="bc-sum")
    p_bound.add_argument("--mimo-rule", choices=("equal-power", "cooperative"), default="equal-power")
    p_bound.add_argument("--dump-table", metavar="FILE", help="write the (cut x state) capacity CSV")

    p_rate = sub.add_parser("rate", help="achievable rate for one scheme")
    _add_common(p_rate)
    p_rate.add_argument("--scheme", required=True, choices=("ia", "cb", "sc", "dpc"))
    p_rate.add_argument("--seed", type=int, default=0)
    p_rate.add_argument("--restarts", type=int, default=None, help="random restarts for sc")
    p_rate.add_argument(
        "--dpc-source-interference",
        choices=("reject", "noise"),
        default="reject",
    )

    p_sweep = sub.add_parser("sweep", help="vary a gain class and tabulate rates")
    _add_common(p_sweep)
    p_sweep.add_argument("--vary", required=True, metavar="CLASS")
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--points", type=int, required=True)
    spacing = p_sweep.add_mutually_exclusive_group()
    spacing.add_argument("--log", dest="spacing", action="store_const", const="log", default="log")
    spacing.add_argument("--linear", dest="spacing", action="store_const", const="linear")
    p_sweep.add_argument("--schemes", default="ia,cb,sc,dpc,bound")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--out", help="CSV output path (default: stdout)")
    p_sweep.add_argument(
        "--dpc-source-interference",
        choices=("reject", "noise"),
        default="reject",
    )
    return top


def _bound_states(net: Network, args) -> tuple[list[State], bool]:
    explicit = _resolve_states(net, args, None)
    if explicit is not None:
        return explicit, True
    if net.node_count > 8:
        raise NetworkError(
            "full state enumeration is limited to 8 nodes; pass --states or --paths"
        )
    return enumerate_states(net, max_tx=getattr(args, "max_tx", None)), False


def cmd_bound(args) -> int:
    net = _apply_sets(_load_network(args.network), args.set)
    states, restricted = _bound_states(net, args)
    value, shares = cutset_bound(net, states, args.bc_rule, args.mimo_rule)
    print(f"cut-set bound: {value:.9g} bits/use")
    if restricted:
        print("note: bound relative to the given states, not the full enumeration")
    for k, lam in enumerate(shares):
        if lam > 1e-9:
            print(f"  share {lam:.9g}  state {state_label(states[k])}")
    table, tags, cuts = capacity_table(net, states, None, args.bc_rule, args.mimo_rule)
    weighted = table @ shares
    for a, cut in enumerate(cuts):
        if weighted[a] <= value + 1e-7:
            print(f"  binding cut {cut.label()}  capacity {weighted[a]:.9g}")
    if args.dump_table:
        Path(args.dump_table).write_text(table_to_csv(table, tags, cuts, states))
        print(f"capacity table written to {args.dump_table}")
    return EXIT_OK


def cmd_rate(args) -> int:
    net = _apply_sets(_load_network(args.network), args.set)
    states = _resolve_states(net, args, args.scheme)
    search = None
    if args.scheme == "sc":
        search = SearchConfig(seed=args.seed)
        if args.restarts is not None:
            search.random_restarts = args.restarts
    sol = compute_rate(
        net,
        args.scheme,
        states=states,
        seed=args.seed,
        dpc_source_interference=args.dpc_source_interference,
        search=search,
    )
    sys.stdout.write(solution_report(sol))
    problem = build_problem(net, args.scheme, states, args.dpc_source_interference)
    cert = check_solution(problem, sol)
    if not cert.ok():
        print(
            f"warning: certificate residuals flow={cert.flow_residual:.2e} "
            f"region={cert.region_violation:.2e}",
            file=sys.stderr,
        )
    return EXIT_OK


def _sweep_values(args) -> np.ndarray:
    if args.points < 2:
        raise NetworkError("--points must be at least 2")
    if args.spacing == "log":
        if args.start <= 0 or args.stop <= 0:
            raise NetworkError("log spacing needs positive --from/--to")
        return np.geomspace(args.start, args.stop, args.points)
    return np.linspace(args.start, args.stop, args.points)


def _sweep_schemes(raw: str) -> list[str]:
    names = [s.strip() for s in raw.split(",") if s.strip()]
    bad = [s for s in names if s not in SCHEME_ORDER]
    if bad:
        raise NetworkError(f"unknown scheme(s) {bad}; choose from {SCHEME_ORDER}")
    return [s for s in SCHEME_ORDER if s in names]


def cmd_sweep(args) -> int:
    net0 = _apply_sets(_load_network(args.network), args.set)
    if args.vary not in net0.classes:
        raise NetworkError(f"--vary: unknown class {args.vary!r}")
    schemes = _sweep_schemes(args.schemes)
    values = _sweep_values(args)
    explicit = _resolve_states(net0, args, None)

    lines = ["param," + ",".join(schemes)]
    prev_alpha = None
    error: Exception | None = None
    for idx, value in enumerate(values):
        try:
            net = set_class(net0, args.vary, float(value))
            cells = []
            for scheme in schemes:
                if scheme == "bound":
                    bound_states = explicit
                    if bound_states is None:
                        bound_states = enumerate_states(net)
                    r, _ = cutset_bound(net, bound_states)
                elif scheme == "sc":
                    cfg = SearchConfig(
                        seed=args.seed + idx,
                        random_restarts=4,
                        refine_top=1,
                        initial_splits=[prev_alpha] if prev_alpha else [],
                    )
                    states = explicit if explicit is not None else default_mdf_states(net)
                    sol = solve_sc(build_problem(net, "sc", states), cfg)
                    prev_alpha = sol.alpha
                    r = sol.rate
                else:
                    states = explicit
                    if scheme == "ia":
                        states = ia_states(net) if explicit is None else [
                            s for s in explicit if len(s.tx) == 1
                        ] or ia_states(net)
                    sol = compute_rate(
                        net,
                        scheme,
                        states=states,
                        dpc_source_interference=args.dpc_source_interference,
                    )
                    r = sol.rate
                cells.append(f"{r:.9g}")
            lines.append(f"{value:.9g}," + ",".join(cells))
        except (NetworkError, SolverError, ValueError) as exc:
            error = exc
            lines.append(f"{value:.9g},error:{type(exc).__name__}")
            break
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if error is not None:
        print(f"sweep aborted: {error}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_net_validate(args) -> int:
    net = _apply_sets(_load_network(args.network), args.set)
    print(
        f"ok: {net.node_count} nodes, {len(net.edges)} edges, "
        f"source {net.source}, sink {net.sink}, "
        f"P/sigma^2 = {net.snr_scale:.6g}"
    )
    if not net.has_route():
        print("warning: no source-sink path", file=sys.stderr)
    return EXIT_OK


def cmd_states_enum(args) -> int:
    net = _apply_sets(_load_network(args.network), args.set)
    states = enumerate_states(net, max_tx=args.max_tx, prune=args.prune)
    for s in states:
        print(state_label(s))
    print(f"total: {len(states)}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = make_parser().parse_args(argv)
    try:
        if args.command == "net":
            return cmd_net_validate(args)
        if args.command == "states":
            return cmd_states_enum(args)
        if args.command == "bound":
            return cmd_bound(args)
        if args.command == "rate":
            return cmd_rate(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        raise AssertionError(f"unhandled command {args.command}")
    except (NetworkError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
