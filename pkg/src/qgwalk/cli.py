"""Command-line reports over the walk library, written as CSV files.

Subcommands (each reads a JSON config and writes into --out):

* evolve            distribution.csv     per-step vertex probabilities
* verify            identities.csv       operator-identity residuals
* szegedy           spectrum.csv, matching.csv
* qg-scan           scan.csv, roots.csv
* qg-eigenfunction  eigenfunction.csv, boundary.csv, equivalences.csv
* partitions        partitions.csv

Exit code 0 on success, 1 when a requested verification fails, 2 on invalid
configuration or input.  Floats are printed with repr-faithful precision
(%.17g) and files are written atomically, so repeated runs with the same
config and seed produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile

import numpy as np

from .coins import (
    DIRICHLET,
    QuantumGraphParams,
    TransitionMatrix,
    VertexWeights,
    grover_coins,
    identity_coins,
    projector_coins,
    quantum_graph_coins,
    szegedy_coins,
)
from .dynamics import evolve, finding_probability, from_arc_amplitudes, local_state, point_mass
from .graphs import (
    Graph,
    Partition,
    build_arc_space,
    complete_graph,
    cycle_graph,
    enumerate_partitions,
    flip_flop_partition,
    path_graph,
    random_partition,
    star_graph,
)
from .operators import (
    CoinSet,
    adjacency_support_report,
    a_type_reduction_residual,
    evolution,
    g_type_reduction_residual,
    inverse_walk_residual,
    partition_change_residual,
    random_unitary_coins,
    shift_duality_residual,
    shift_operator,
    unitarity_defect,
)
from .quantum_graph import (
    boundary_condition_report,
    sample_eigenfunction,
    scan_roots,
    stationarity_equivalences,
    stationary_vector,
)
from .szegedy import (
    compare_spectra,
    direct_spectrum,
    random_reversible_transition,
    szegedy_spectrum,
    szegedy_walk,
)

MAX_ARCS = 2000


class ConfigError(ValueError):
    """The JSON config is malformed or inconsistent."""


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _atomic_write_csv(path: str, header: list, rows: list) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_keys(section: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {where}; allowed: {sorted(allowed)}")


def _load_config(path: str, sections: set) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(cfg, sections, "config")
    return cfg


def _section(cfg: dict, name: str, required: bool = True) -> dict:
    if name not in cfg:
        if required:
            raise ConfigError(f"config is missing the '{name}' section")
        return {}
    if not isinstance(cfg[name], dict):
        raise ConfigError(f"'{name}' section must be a JSON object")
    return cfg[name]


def _arc_key(raw: str) -> tuple[int, int]:
    parts = str(raw).split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected a 'u,v' key, got {raw!r}")
    return int(parts[0]), int(parts[1])


def _as_complex(raw) -> complex:
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2:
        return complex(float(raw[0]), float(raw[1]))
    raise ConfigError(f"expected a number or [re, im] pair, got {raw!r}")


def _build_graph(cfg: dict) -> Graph:
    section = _section(cfg, "graph")
    _check_keys(section, {"vertices", "edges", "family", "n"}, "graph")
    if "family" in section:
        _check_keys(section, {"family", "n"}, "graph")
        family, n = section["family"], int(section.get("n", 0))
        builders = {"cycle": cycle_graph, "path": path_graph, "complete": complete_graph,
                    "star": lambda m: star_graph(m - 1)}
        if family not in builders:
            raise ConfigError(f"unknown graph family {family!r}; "
                              f"choose from {sorted(builders)}")
        g = builders[family](n)
    else:
        if "vertices" not in section or "edges" not in section:
            raise ConfigError("graph section needs 'vertices' and 'edges' (or 'family')")
        g = Graph.from_edges(int(section["vertices"]),
                             [(int(e[0]), int(e[1])) for e in section["edges"]])
    if 2 * len(g.edges) > MAX_ARCS:
        raise ConfigError(f"graph has {2 * len(g.edges)} arcs, over the {MAX_ARCS} limit")
    return g


def _build_partition(g: Graph, spec) -> Partition:
    if spec == "flip-flop":
        return flip_flop_partition(g)
    if isinstance(spec, dict) and "successors" in spec:
        _check_keys(spec, {"successors"}, "partition")
        succ = {_arc_key(key): int(val) for key, val in spec["successors"].items()}
        return Partition.from_successors(g, succ)
    if isinstance(spec, dict) and "random_seed" in spec:
        _check_keys(spec, {"random_seed"}, "partition")
        return random_partition(g, np.random.default_rng(int(spec["random_seed"])))
    raise ConfigError("partition must be 'flip-flop', {'successors': ...}, "
                      "or {'random_seed': ...}")


def _build_transition(g: Graph, spec) -> TransitionMatrix:
    if spec == "uniform":
        return TransitionMatrix.uniform(g)
    if isinstance(spec, list):
        return TransitionMatrix(g, np.array(spec, dtype=float))
    if isinstance(spec, dict) and "random_seed" in spec:
        _check_keys(spec, {"random_seed"}, "transition")
        return random_reversible_transition(g, np.random.default_rng(int(spec["random_seed"])))
    raise ConfigError("transition must be 'uniform', a row matrix, or {'random_seed': ...}")


def _lam_value(raw) -> float:
    if isinstance(raw, str):
        if raw.lower() in ("dirichlet", "inf", "infinity"):
            return DIRICHLET
        raise ConfigError(f"unknown coupling value {raw!r}")
    return float(raw)


def _build_qg(g: Graph, cfg: dict) -> QuantumGraphParams:
    section = _section(cfg, "quantum_graph")
    _check_keys(section, {"lengths", "lambdas", "potentials"}, "quantum_graph")

    def edge_values(name: str, default: float):
        raw = section.get(name, default)
        if isinstance(raw, dict):
            return {_arc_key(key): float(val) for key, val in raw.items()}
        return float(raw)

    raw_lam = section.get("lambdas", 0.0)
    if isinstance(raw_lam, dict):
        lam = {int(v): _lam_value(x) for v, x in raw_lam.items()}
    else:
        lam = _lam_value(raw_lam)
    return QuantumGraphParams.build(g, edge_values("lengths", 1.0), lam,
                                    edge_values("potentials", 0.0))


def _build_weights(g: Graph, spec) -> VertexWeights:
    if spec is None or spec == "uniform":
        return VertexWeights.uniform(g)
    if isinstance(spec, dict):
        return VertexWeights(g, {int(v): np.array([_as_complex(x) for x in vec])
                                 for v, vec in spec.items()})
    raise ConfigError("weights must be 'uniform' or a per-vertex map")


def _build_coins(g: Graph, cfg: dict, spec: dict, seed: int):
    _check_keys(spec, {"family", "transition", "k", "weights", "seed", "blocks"}, "coins")
    family = spec.get("family", "grover")
    if family == "identity":
        return identity_coins(g)
    if family == "grover":
        return grover_coins(g)
    if family == "random":
        return random_unitary_coins(g, np.random.default_rng(int(spec.get("seed", seed))))
    if family == "szegedy":
        if "transition" not in spec:
            raise ConfigError("szegedy coins need a 'transition' entry")
        return szegedy_coins(g, _build_transition(g, spec["transition"]))
    if family in ("quantum-graph", "projector"):
        if "k" not in spec:
            raise ConfigError(f"{family} coins need a wavenumber 'k'")
        q = _build_qg(g, cfg)
        k = float(spec["k"])
        if family == "quantum-graph":
            return quantum_graph_coins(g, q, k)
        return projector_coins(g, q, _build_weights(g, spec.get("weights")), k)
    if family == "explicit":
        if "blocks" not in spec:
            raise ConfigError("explicit coins need a 'blocks' entry")
        blocks = {}
        for v, rows in spec["blocks"].items():
            blocks[int(v)] = np.array([[_as_complex(x) for x in row] for row in rows])
        return CoinSet(blocks)
    raise ConfigError(f"unknown coin family {family!r}")


def _build_walk(g: Graph, cfg: dict, seed: int):
    section = _section(cfg, "walk", required=False)
    _check_keys(section, {"kind", "partition", "coins"}, "walk")
    kind = section.get("kind", "G")
    if kind not in ("G", "A"):
        raise ConfigError(f"walk kind must be 'G' or 'A', got {kind!r}")
    p = _build_partition(g, section.get("partition", "flip-flop"))
    coins = _build_coins(g, cfg, section.get("coins", {"family": "grover"}), seed)
    return p, coins, kind


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_evolve(args) -> int:
    cfg = _load_config(args.config, {"graph", "walk", "evolve", "quantum_graph"})
    g = _build_graph(cfg)
    space = build_arc_space(g)
    p, coins, kind = _build_walk(g, cfg, args.seed)
    op = evolution(space, p, coins, kind)

    section = _section(cfg, "evolve")
    _check_keys(section, {"steps", "initial"}, "evolve")
    steps = int(section.get("steps", 10))
    if steps < 0:
        raise ConfigError("steps must be nonnegative")
    initial = section.get("initial", {"arc": list(space.arcs[0])})
    _check_keys(initial, {"arc", "local", "amplitudes"}, "evolve.initial")
    if "arc" in initial:
        state = point_mass(space, tuple(int(x) for x in initial["arc"]))
    elif "local" in initial:
        loc = initial["local"]
        _check_keys(loc, {"vertex", "amplitudes"}, "evolve.initial.local")
        state = local_state(space, int(loc["vertex"]),
                            np.array([_as_complex(x) for x in loc["amplitudes"]]))
    elif "amplitudes" in initial:
        state = from_arc_amplitudes(
            space, {_arc_key(key): _as_complex(val)
                    for key, val in initial["amplitudes"].items()})
    else:
        raise ConfigError("evolve.initial needs 'arc', 'local', or 'amplitudes'")

    rows = []
    for step in range(steps + 1):
        for v, prob in zip(g.vertices, finding_probability(state)):
            rows.append([step, v, _fmt(prob)])
        if step < steps:
            state = evolve(op, state, 1)
    _atomic_write_csv(os.path.join(args.out, "distribution.csv"),
                      ["step", "vertex", "probability"], rows)
    return 0


def _cmd_verify(args) -> int:
    cfg = _load_config(args.config, {"graph", "walk", "verify", "quantum_graph"})
    g = _build_graph(cfg)
    space = build_arc_space(g)
    section = _section(cfg, "verify", required=False)
    _check_keys(section, {"steps", "other_partition"}, "verify")
    steps = int(section.get("steps", 3))

    walk_section = _section(cfg, "walk", required=False)
    _check_keys(walk_section, {"kind", "partition", "coins"}, "walk")
    p = _build_partition(g, walk_section.get("partition", "flip-flop"))
    coins = _build_coins(g, cfg, walk_section.get("coins", {"family": "random"}), args.seed)
    p2 = _build_partition(g, section.get("other_partition", {"random_seed": args.seed + 1}))

    tol = args.tol if args.tol is not None else 1e-10
    support = adjacency_support_report(space, p, coins)
    checks = [
        ("unitarity_g", unitarity_defect(evolution(space, p, coins, "G").matrix)),
        ("unitarity_a", unitarity_defect(evolution(space, p, coins, "A").matrix)),
        (f"shift_duality_{steps}_steps", shift_duality_residual(space, p, coins, steps)),
        ("inverse_flip_flop", inverse_walk_residual(space, coins)),
        ("partition_change", partition_change_residual(space, p, p2, coins)),
        ("g_type_reduction", g_type_reduction_residual(space, p, coins)),
        ("a_type_reduction", a_type_reduction_residual(space, p, coins)),
        ("adjacency_support", support.max_leak),
    ]
    rows = [[name, _fmt(residual), _fmt(tol), str(residual <= tol)]
            for name, residual in checks]
    _atomic_write_csv(os.path.join(args.out, "identities.csv"),
                      ["identity", "residual", "tolerance", "pass"], rows)
    return 0 if all(residual <= tol for _, residual in checks) else 1


def _cmd_szegedy(args) -> int:
    cfg = _load_config(args.config, {"graph", "szegedy"})
    g = _build_graph(cfg)
    space = build_arc_space(g)
    section = _section(cfg, "szegedy", required=False)
    _check_keys(section, {"transition"}, "szegedy")
    t = _build_transition(g, section.get("transition", "uniform"))

    tol = args.tol if args.tol is not None else 1e-8
    predicted = szegedy_spectrum(space, t)
    computed = direct_spectrum(szegedy_walk(space, t))
    match = compare_spectra(predicted.eigenvalues, computed, tol)
    lift_residual = max((l.residual for l in predicted.lifts if l.genuine), default=0.0)

    rows = [[i, _fmt(pv.real), _fmt(pv.imag), _fmt(cv.real), _fmt(cv.imag)]
            for i, (pv, cv) in enumerate(zip(predicted.eigenvalues, computed))]
    _atomic_write_csv(os.path.join(args.out, "spectrum.csv"),
                      ["index", "predicted_re", "predicted_im",
                       "computed_re", "computed_im"], rows)
    _atomic_write_csv(os.path.join(args.out, "matching.csv"),
                      ["case", "size", "max_angle_error", "shift",
                       "max_lift_residual", "ok"],
                      [[predicted.case, space.size, _fmt(match.max_angle_error),
                        match.shift, _fmt(lift_residual), str(match.ok)]])
    return 0 if match.ok else 1


def _cmd_qg_scan(args) -> int:
    cfg = _load_config(args.config, {"graph", "quantum_graph", "scan"})
    g = _build_graph(cfg)
    q = _build_qg(g, cfg)
    section = _section(cfg, "scan")
    _check_keys(section, {"k_min", "k_max", "grid_points", "bracket_threshold",
                          "refine_tol", "root_tol"}, "scan")
    if "k_min" not in section or "k_max" not in section:
        raise ConfigError("scan section needs 'k_min' and 'k_max'")

    scan = scan_roots(
        g, q, float(section["k_min"]), float(section["k_max"]),
        grid_points=int(section["grid_points"]) if "grid_points" in section else None,
        refine_tol=float(section.get("refine_tol", 1e-10)),
        root_tol=float(section.get("root_tol", 1e-9)),
        bracket_threshold=float(section.get("bracket_threshold", 0.1)))

    rows = [[_fmt(k), _fmt(ind), _fmt(det.real), _fmt(det.imag),
             _fmt(red.real), _fmt(red.imag)]
            for k, ind, det, red in zip(scan.ks, scan.indicators,
                                        scan.determinants, scan.reduced_determinants)]
    _atomic_write_csv(os.path.join(args.out, "scan.csv"),
                      ["k", "indicator", "det_re", "det_im",
                       "reduced_re", "reduced_im"], rows)
    _atomic_write_csv(os.path.join(args.out, "roots.csv"),
                      ["k", "indicator", "multiplicity"],
                      [[_fmt(r.k), _fmt(r.indicator), r.multiplicity]
                       for r in scan.roots])
    return 0


def _cmd_qg_eigenfunction(args) -> int:
    cfg = _load_config(args.config, {"graph", "quantum_graph", "eigenfunction"})
    g = _build_graph(cfg)
    q = _build_qg(g, cfg)
    section = _section(cfg, "eigenfunction")
    _check_keys(section, {"k", "samples_per_edge", "root_tol"}, "eigenfunction")
    if "k" not in section:
        raise ConfigError("eigenfunction section needs 'k'")

    tol = args.tol if args.tol is not None else 1e-8
    # always build the report from the least-defect vector; an off-root k is
    # a verification failure (exit 1 below), not a config error
    root_tol = float(section.get("root_tol", 1e-9))
    sv = stationary_vector(g, q, float(section["k"]), root_tol=math.inf)
    root_ok = sv.defect <= root_tol
    sample = sample_eigenfunction(sv, q, int(section.get("samples_per_edge", 33)))
    report = boundary_condition_report(sample, q, tol)
    # the four-way check expects the A-type stationary vector, the shift of
    # the G-type one returned by stationary_vector
    shift = shift_operator(sv.space, flip_flop_partition(g))
    equiv = stationarity_equivalences(g, q, sv.k, shift @ sv.amplitudes)

    rows = []
    for (u, v) in g.edges:
        for x, val in zip(sample.edge_xs[(u, v)], sample.edge_values[(u, v)]):
            rows.append([u, v, _fmt(x), _fmt(val.real), _fmt(val.imag)])
    _atomic_write_csv(os.path.join(args.out, "eigenfunction.csv"),
                      ["edge_u", "edge_v", "x", "value_re", "value_im"], rows)
    _atomic_write_csv(os.path.join(args.out, "boundary.csv"),
                      ["vertex", "condition", "residual", "ok"],
                      [[r.vertex, r.condition, _fmt(r.residual), str(r.ok)]
                       for r in report.rows])
    names = ["a_type", "g_type_dagger", "a_type_dagger_shifted", "g_type_shifted"]
    eq_rows = [[name, _fmt(value)] for name, value in zip(names, equiv)]
    eq_rows.append(["max_spread", _fmt(max(equiv) - min(equiv))])
    _atomic_write_csv(os.path.join(args.out, "equivalences.csv"),
                      ["form", "defect"], eq_rows)
    if not root_ok:
        print(f"k={sv.k!r} is not a root: stationarity defect {sv.defect:.3e} "
              f"exceeds {root_tol:g}")
    return 0 if (root_ok and report.ok) else 1


def _cmd_partitions(args) -> int:
    cfg = _load_config(args.config, {"graph", "partitions"})
    g = _build_graph(cfg)
    section = _section(cfg, "partitions", required=False)
    _check_keys(section, {"cap"}, "partitions")
    parts = enumerate_partitions(g, cap=int(section.get("cap", 1_000_000)))
    rows = []
    for i, p in enumerate(parts):
        lengths = sorted((len(c) for c in p.cycles), reverse=True)
        rows.append([i, len(p.cycles), ";".join(str(x) for x in lengths),
                     str(p.is_flip_flop)])
    _atomic_write_csv(os.path.join(args.out, "partitions.csv"),
                      ["index", "cycle_count", "cycle_lengths", "is_flip_flop"], rows)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


_COMMANDS = {
    "evolve": _cmd_evolve,
    "verify": _cmd_verify,
    "szegedy": _cmd_szegedy,
    "qg-scan": _cmd_qg_scan,
    "qg-eigenfunction": _cmd_qg_eigenfunction,
    "partitions": _cmd_partitions,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgwalk",
        description="Coined walks on graphs: evolution, identity checks, "
                    "spectra, and metric-graph eigenproblems.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--out", default=".", help="directory for CSV output")
        p.add_argument("--seed", type=int, default=0, help="seed for random pieces")
        p.add_argument("--tol", type=float, default=None,
                       help="pass/fail tolerance override")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    os.makedirs(args.out, exist_ok=True)
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
