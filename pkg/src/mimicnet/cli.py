"""Command-line front end.

Exit codes: 0 success, 1 usage or I/O error, 2 no perfect matching,
3 input outside the supported graph family.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import networkx as nx

from .decompose import decompose, decompose_exhaustive
from .engine import run_matching
from .errors import FormatError, MimicError, NotFound, NotInFamily
from .flowengine import run_max_flow
from .generators import FAMILIES, GenSpec, generate
from .graph import Graph, format_edge_list, is_perfect_matching, parse_dimacs_flow, parse_edge_list
from .heavypath import heavy_path_decomposition
from .mimic_matching import entry_to_json, matching_pattern, search_mimicking_network
from .oracle import (
    EXHAUSTIVE_LIMIT,
    oracle_matching_pattern,
    oracle_max_flow,
    oracle_min_weight_pm,
    oracle_perfect_matching,
)
from .pattern import MatchingPattern

EXIT_OK, EXIT_USAGE, EXIT_NO_PM, EXIT_NOT_IN_FAMILY = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    input_digest: str | None = None
    status: str = "ok"
    timings: dict[str, float] = field(default_factory=dict)
    witness_records: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1) + "\n"


class _Timer:
    def __init__(self, report: RunReport, stage: str) -> None:
        self.report, self.stage = report, stage

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.report.timings[self.stage] = round(time.perf_counter() - self.t0, 6)
        return False


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _read_text(path: str, report: RunReport) -> str:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    report.input_digest = "sha256:" + hashlib.sha256(text.encode()).hexdigest()
    return text


def _read_graph(path: str, report: RunReport) -> Graph:
    return parse_edge_list(_read_text(path, report))


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise UsageError(f"expected a list of integers, got {text!r}") from exc


def _range(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    lo, sep, hi = text.partition(":")
    try:
        pair = (int(lo), int(hi))
    except ValueError as exc:
        raise UsageError(f"expected LO:HI, got {text!r}") from exc
    if not sep or pair[0] > pair[1]:
        raise UsageError(f"expected LO:HI with LO <= HI, got {text!r}")
    return pair


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    if path == "-":
        sys.stderr.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _reference_matching(g: Graph, weighted: bool):
    """Independent answer: exhaustive when small, networkx blossom otherwise.

    Returns ``None`` for no perfect matching, else the weight (0 when unweighted).
    """
    if g.n <= EXHAUSTIVE_LIMIT:
        if weighted:
            res = oracle_min_weight_pm(g)
            return None if res is None else res[0]
        return None if oracle_perfect_matching(g) is None else 0
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    best: dict[tuple[int, int], int] = {}
    for e, (u, v) in enumerate(g.edges):
        w = g.weight(e) if weighted else 0
        key = (min(u, v), max(u, v))
        best[key] = min(best.get(key, w), w)
    # shift weights positive so max weight with max cardinality minimizes
    shift = 1 + max((abs(w) for w in best.values()), default=0)
    for (u, v), w in best.items():
        h.add_edge(u, v, weight=shift - w)
    m = nx.max_weight_matching(h, maxcardinality=True)
    if 2 * len(m) != g.n:
        return None
    return sum(best[(min(u, v), max(u, v))] for u, v in m) if weighted else 0


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_decompose(args, report: RunReport, out) -> int:
    g = _read_graph(args.file, report)
    with _Timer(report, "decompose"):
        tree = decompose_exhaustive(g) if args.exhaustive else decompose(g)
    for x in tree.nodes:
        if x.kind == "piece":
            out.write(f"node {x.id} piece {x.label} " + " ".join(map(str, x.vertices)) + "\n")
        else:
            out.write(f"node {x.id} clique " + " ".join(map(str, x.vertices)) + "\n")
    for a in range(len(tree.nodes)):
        for b in tree.adj[a]:
            if a < b:
                out.write(f"tree {a} {b}\n")
    if args.heavy:
        weight = [1 if x.kind == "piece" else 0 for x in tree.nodes]
        hpd = heavy_path_decomposition(tree.children(), tree.root, weight)
        for pid, path in enumerate(hpd.paths):
            out.write(f"path {pid} rank {hpd.rank[pid]} " + " ".join(map(str, path)) + "\n")
    return EXIT_OK


def _matching_command(args, report: RunReport, out, weighted: bool) -> int:
    g = _read_graph(args.file, report)
    if weighted and g.weights is None:
        raise UsageError("wmatch needs a weighted edge list")
    with _Timer(report, "engine"):
        run = run_matching(g, weighted, args.threads)
    report.witness_records = sum(len(log.records) for log in run.logs)
    if args.dump_witness:
        _write(args.dump_witness, "".join(log.dump() for log in run.logs))
    if args.oracle_check:
        with _Timer(report, "oracle"):
            ref = _reference_matching(g, weighted)
        mine = None if run.matching is None else (run.weight if weighted else 0)
        if ref != mine:
            raise AssertionError(f"reference answer {ref} differs from engine answer {mine}")
    if run.matching is None:
        report.status = "no-perfect-matching"
        out.write("no perfect matching\n")
        return EXIT_NO_PM
    eids = run.matching.sorted_edges()
    if not is_perfect_matching(g, eids):  # pragma: no cover - the engine is checked end to end
        raise AssertionError("engine output is not a perfect matching")
    if weighted:
        out.write(f"weight {run.weight}\n")
    for e in eids:
        u, v = g.edges[e]
        out.write(f"{u} {v}" + (f" {g.weight(e)}" if weighted else "") + "\n")
    return EXIT_OK


def cmd_match(args, report, out) -> int:
    return _matching_command(args, report, out, False)


def cmd_wmatch(args, report, out) -> int:
    return _matching_command(args, report, out, True)


def cmd_maxflow(args, report: RunReport, out) -> int:
    text = _read_text(args.file, report)
    if args.dimacs:
        g, s, t = parse_dimacs_flow(text)
    else:
        g = parse_edge_list(text)
        s, t = args.s, args.t
    if args.s is not None:
        s = args.s
    if args.t is not None:
        t = args.t
    if s is None or t is None:
        raise UsageError("maxflow needs -s and -t")
    if g.capacities is None:
        raise UsageError("maxflow needs a capacitated edge list")
    if s == t or not (0 <= s < g.n and 0 <= t < g.n):
        raise UsageError("source and sink must be distinct vertices of the graph")
    with _Timer(report, "engine"):
        run = run_max_flow(g, s, t, args.threads)
    if run.log is not None:
        report.witness_records = len(run.log.records)
        if args.dump_mimicks:
            _write(args.dump_mimicks, run.log.dump())
    if args.oracle_check:
        with _Timer(report, "oracle"):
            ref, _ = oracle_max_flow(g, s, t)
        if ref != run.value:
            raise AssertionError(f"reference value {ref} differs from engine value {run.value}")
    out.write(f"value {run.value}\n")
    for e in range(g.m):
        u, v = g.edges[e]
        out.write(f"{u} {v} {run.flow[e]}\n")
    return EXIT_OK


def cmd_pattern(args, report: RunReport, out) -> int:
    g = _read_graph(args.file, report)
    T = _int_list(args.terminals)
    if len(T) > 3 or len(set(T)) != len(T) or any(not 0 <= v < g.n for v in T):
        raise UsageError("terminals must be at most three distinct vertices of the graph")
    with _Timer(report, "pattern"):
        p = matching_pattern(g, T)
    if args.oracle_check:
        with _Timer(report, "oracle"):
            ref = oracle_matching_pattern(g, T)
        if ref != p:
            raise AssertionError(f"reference pattern {ref.subsets} differs from {p.subsets}")
    for mask in p.subsets:
        out.write("set" + "".join(f" {T[i]}" for i in range(len(T)) if mask >> i & 1) + "\n")
    return EXIT_OK


def cmd_mimick_search(args, report: RunReport, out) -> int:
    if args.file is not None:
        g = _read_graph(args.file, report)
        T = _int_list(args.terminals or "")
        if len(set(T)) != len(T) or any(not 0 <= v < g.n for v in T):
            raise UsageError("terminals must be distinct vertices of the graph")
        p = matching_pattern(g, T)
    else:
        if args.k is None or args.masks is None:
            raise UsageError("give either a graph file with --terminals or --k with --masks")
        masks = _int_list(args.masks)
        if any(not 0 <= m < 1 << args.k for m in masks):
            raise UsageError("a mask does not fit the terminal count")
        p = MatchingPattern.of(args.k, masks)
    with _Timer(report, "search"):
        try:
            net = search_mimicking_network(p, args.max_size)
        except NotFound as exc:
            report.status = "not-found"
            out.write(f"{exc}\n")
            return EXIT_USAGE
    doc = entry_to_json(net)
    doc["outerplanar"], doc["unique"] = net.outerplanar, net.unique
    out.write(json.dumps(doc, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_gen(args, report: RunReport, out) -> int:
    spec = GenSpec(
        args.n, args.family, args.seed, args.plant_pm,
        weight_range=_range(args.weights), capacity_range=_range(args.capacities),
    )
    with _Timer(report, "generate"):
        inst = generate(spec)
    text = format_edge_list(inst.graph)
    report.input_digest = "sha256:" + hashlib.sha256(text.encode()).hexdigest()
    out.write(text)
    return EXIT_OK


def cmd_verify(args, report: RunReport, out) -> int:
    agree = 0
    for i in range(args.trials):
        seed = args.seed * 1_000_003 + i
        mode = args.mode
        spec = GenSpec(
            args.n, args.family, seed, plant_pm=(i % 2 == 0),
            weight_range=(-50, 50) if mode == "wmatch" else None,
            capacity_range=(1, 20) if mode == "flow" else None,
        )
        g = generate(spec).graph
        if mode == "flow":
            s, t = 0, g.n - 1
            got = run_max_flow(g, s, t, args.threads)
            ok = got.value == oracle_max_flow(g, s, t)[0] and _flow_valid(g, s, t, got.value, got.flow)
        else:
            weighted = mode == "wmatch"
            run = run_matching(g, weighted, args.threads)
            mine = None if run.matching is None else (run.weight if weighted else 0)
            ok = mine == _reference_matching(g, weighted)
            if run.matching is not None:
                ok = ok and is_perfect_matching(g, run.matching.edges)
        agree += ok
        if not ok:
            out.write(f"trial {i} (seed {seed}) disagrees\n")
    out.write(f"{agree}/{args.trials} agree\n")
    report.status = "ok" if agree == args.trials else "disagree"
    return EXIT_OK if agree == args.trials else EXIT_USAGE


def _flow_valid(g: Graph, s: int, t: int, value: int, flow: dict[int, int]) -> bool:
    excess = [0] * g.n
    for e, (u, v) in enumerate(g.edges):
        f = flow.get(e, 0)
        if abs(f) > g.capacities[e]:
            return False
        excess[u] -= f
        excess[v] += f
    return all(excess[v] == 0 for v in range(g.n) if v not in (s, t)) and excess[t] == value


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common(suppress: bool) -> argparse.ArgumentParser:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--threads", type=int, default=d(1), help="worker threads for same-rank paths")
    p.add_argument("--seed", type=int, default=d(0), help="random seed")
    p.add_argument("--report", metavar="PATH", default=d(None), help="write a JSON run report")
    p.add_argument("--oracle-check", action="store_true", default=d(False),
                   help="compare the answer with an independent reference")
    p.add_argument("--dump-witness", metavar="PATH", default=d(None),
                   help="write the witness log ('-' for stderr)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mimicnet", parents=[_common(False)],
                                     description="Matchings and flows by mimicking-network replacement.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_common(True)]

    p = sub.add_parser("decompose", parents=common, help="print the clique-sum decomposition tree")
    p.add_argument("file")
    p.add_argument("--heavy", action="store_true", help="also print heavy paths with ranks")
    p.add_argument("--exhaustive", action="store_true", help="use the laminar-family route")
    p.set_defaults(func=cmd_decompose)

    for name, func, text in (("match", cmd_match, "find a perfect matching"),
                             ("wmatch", cmd_wmatch, "find a minimum-weight perfect matching")):
        p = sub.add_parser(name, parents=common, help=text)
        p.add_argument("file")
        p.set_defaults(func=func)

    p = sub.add_parser("maxflow", parents=common, help="maximum s-t flow")
    p.add_argument("file")
    p.add_argument("-s", type=int, default=None)
    p.add_argument("-t", type=int, default=None)
    p.add_argument("--dimacs", action="store_true", help="read DIMACS max-flow input")
    p.add_argument("--dump-mimicks", metavar="PATH", default=None,
                   help="write the intermediate flow networks ('-' for stderr)")
    p.set_defaults(func=cmd_maxflow)

    p = sub.add_parser("pattern", parents=common, help="matching pattern on up to three terminals")
    p.add_argument("file")
    p.add_argument("--terminals", required=True, help="comma-separated vertex ids")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("mimick-search", parents=common, help="smallest network with a given pattern")
    p.add_argument("file", nargs="?")
    p.add_argument("--terminals")
    p.add_argument("--k", type=int)
    p.add_argument("--masks", help="comma-separated subset masks")
    p.add_argument("--max-size", type=int, default=7)
    p.set_defaults(func=cmd_mimick_search)

    p = sub.add_parser("gen", parents=common, help="generate an instance")
    p.add_argument("--family", choices=FAMILIES, default="k33-free")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--plant-pm", action="store_true")
    p.add_argument("--weights", metavar="LO:HI")
    p.add_argument("--capacities", metavar="LO:HI")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=common, help="compare the engine with a reference on generated instances")
    p.add_argument("--family", choices=FAMILIES, default="k33-free")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--mode", choices=("match", "wmatch", "flow"), default="match")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    report = RunReport(args.command)
    code = EXIT_USAGE
    try:
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        code = args.func(args, report, out)
    except (UsageError, FormatError) as exc:
        report.status = "usage-error"
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except NotInFamily as exc:
        report.status = "not-in-family"
        print(f"not in family: {exc}", file=sys.stderr)
        code = EXIT_NOT_IN_FAMILY
    except (MimicError, AssertionError) as exc:
        report.status = "error"
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    if args.report:
        try:
            _write(args.report, report.to_json())
        except UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            code = EXIT_USAGE
    return code


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_exit()
