"""Matching patterns and the small networks that reproduce them.

A network ``N`` with terminals ``t_0..t_{k-1}`` mimics a graph ``G`` with
terminals ``T`` when both have the same matching pattern.  For ``k <= 3``
every realizable pattern has a tiny representative; :func:`catalog` holds
one per class, loaded from ``data/catalog.json`` (rebuilt and compared in
the test suite by :func:`build_catalog`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import combinations, combinations_with_replacement, product
from typing import Mapping, Sequence

import networkx as nx

from .errors import NotAFace, NotFound, UnanchoredDiffs
from .graph import Graph, embedding_is_planar, face_darts, planar_embedding
from .pattern import MatchingPattern, canonical_pattern, invert_permutation
from .solvers import perfect_matching

SEARCH_LIMIT = 7
ENUM_LIMIT = {1: 3, 2: 4, 3: 7}


@dataclass(frozen=True)
class MimickingNetwork:
    graph: Graph
    terminals: tuple[int, ...]
    pattern: MatchingPattern
    embedding: tuple[tuple[int, ...], ...] | None = None
    outerplanar: bool = False
    unique: bool = False
    matchings: Mapping[int, tuple[int, ...]] = field(default_factory=dict, compare=False)

    @property
    def k(self) -> int:
        return len(self.terminals)

    def nonterminals(self) -> list[int]:
        ts = set(self.terminals)
        return [v for v in range(self.graph.n) if v not in ts]

    def relabelled(self, perm: Sequence[int]) -> "MimickingNetwork":
        """The same network with terminal ``i`` listed at position ``perm[i]``."""
        inv = invert_permutation(perm)
        terms = tuple(self.terminals[inv[j]] for j in range(self.k))
        return MimickingNetwork(
            self.graph,
            terms,
            self.pattern.permuted(perm),
            self.embedding,
            self.outerplanar,
            self.unique,
            {_perm_mask(x, perm): m for x, m in self.matchings.items()},
        )

    def with_weights(self, weights: Sequence[int]) -> "MimickingNetwork":
        return MimickingNetwork(
            self.graph.with_weights(weights),
            self.terminals,
            self.pattern,
            self.embedding,
            self.outerplanar,
            self.unique,
            self.matchings,
        )


def _perm_mask(mask: int, perm: Sequence[int]) -> int:
    return sum(1 << perm[i] for i in range(len(perm)) if mask >> i & 1)


# ---------------------------------------------------------------------------
# patterns
# ---------------------------------------------------------------------------


def matching_pattern(g: Graph, T: Sequence[int]) -> MatchingPattern:
    """Pattern by one perfect-matching test per terminal subset.

    An empty result is returned as a value: it means no matching covers
    every nonterminal, so no perfect matching exists around ``g`` either.
    """
    k = len(T)
    tset = set(T)
    if len(tset) != k:
        raise ValueError("terminals must be distinct")
    inner = [v for v in range(g.n) if v not in tset]
    edges = [(u, v, 0, e) for e, (u, v) in enumerate(g.edges)]
    masks = []
    for x in range(1 << k):
        cover = inner + [T[i] for i in range(k) if x >> i & 1]
        if perfect_matching(cover, edges) is not None:
            masks.append(x)
    return MatchingPattern.of(k, masks)


def _pm_counts(n: int, edges: Sequence[tuple[int, int]]) -> list[int]:
    """Number of perfect matchings of every induced vertex subset (bitmask index)."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    cnt = [0] * (1 << n)
    cnt[0] = 1
    for s in range(1, 1 << n):
        if bin(s).count("1") & 1:
            continue
        v = (s & -s).bit_length() - 1
        rest = s & ~(1 << v)
        total = 0
        for w in adj[v]:
            if rest >> w & 1:
                total += cnt[rest & ~(1 << w)]
        cnt[s] = total
    return cnt


def small_pattern(n: int, edges: Sequence[tuple[int, int]], k: int) -> tuple[MatchingPattern, bool]:
    """Pattern of a tiny graph whose terminals are ``0..k-1``, and whether it is unique.

    Unique means every subset in the pattern is covered by exactly one
    matching (together with all nonterminals).
    """
    cnt = _pm_counts(n, edges)
    inner = ((1 << n) - 1) & ~((1 << k) - 1)
    masks = [x for x in range(1 << k) if cnt[inner | x]]
    unique = all(cnt[inner | x] == 1 for x in masks)
    return MatchingPattern.of(k, masks), unique


# ---------------------------------------------------------------------------
# realizable patterns by exhausting small graphs
# ---------------------------------------------------------------------------


def _atlas_by_order(j: int) -> list[list[tuple[int, int]]]:
    return [sorted(h.edges()) for h in nx.graph_atlas_g() if h.number_of_nodes() == j]


def _realized_patterns(k: int, max_vertices: int) -> dict[MatchingPattern, tuple[int, list]]:
    """Canonical patterns of all graphs on at most ``max_vertices`` vertices with ``k`` terminals.

    Nonterminal parts are taken up to isomorphism from the graph atlas;
    terminal attachments range over sorted tuples and terminal-terminal
    edges over all choices.  Returns one realizing graph per class, found first.
    """
    found: dict[MatchingPattern, tuple[int, list]] = {}
    tpairs = list(combinations(range(k), 2))
    for j in range(0, max_vertices - k + 1):
        for hedges in _atlas_by_order(j):
            cnt = _pm_counts(j, hedges)
            full = (1 << j) - 1
            good = [cnt[full & ~u] > 0 for u in range(1 << j)]
            memo: dict[tuple[int, ...], bool] = {}

            def can(masks: tuple[int, ...], used: int = 0) -> bool:
                key = (used, *masks)
                if key in memo:
                    return memo[key]
                if not masks:
                    res = good[used]
                else:
                    first, rest = masks[0], masks[1:]
                    res = False
                    avail = first & ~used
                    while avail and not res:
                        b = avail & -avail
                        avail ^= b
                        res = can(rest, used | b)
                memo[key] = res
                return res

            # relabelling terminals permutes attachments, so sorted tuples suffice
            for attach in combinations_with_replacement(range(1 << j), k):
                for tsel in range(1 << len(tpairs)):
                    tedges = [tpairs[i] for i in range(len(tpairs)) if tsel >> i & 1]
                    masks = []
                    for x in range(1 << k):
                        xs = [i for i in range(k) if x >> i & 1]
                        ok = can(tuple(attach[i] for i in xs))
                        if not ok:
                            for a, b in tedges:
                                if a in xs and b in xs:
                                    rest = tuple(attach[i] for i in xs if i not in (a, b))
                                    if can(rest):
                                        ok = True
                                        break
                        if ok:
                            masks.append(x)
                    p = MatchingPattern.of(k, masks)
                    if p.is_empty:
                        continue
                    canon, _ = canonical_pattern(p)
                    if canon not in found:
                        edges = list(tedges)
                        for i in range(k):
                            for u in range(j):
                                if attach[i] >> u & 1:
                                    edges.append((i, k + u))
                        edges += [(k + a, k + b) for a, b in hedges]
                        found[canon] = (k + j, edges)
    return found


def enumerate_realizable_patterns(k: int, max_vertices: int | None = None) -> list[MatchingPattern]:
    """Canonical nonempty patterns realized by some graph on few vertices, sorted."""
    if not 1 <= k <= 3:
        raise ValueError("only 1 to 3 terminals are supported")
    limit = ENUM_LIMIT[k] if max_vertices is None else max_vertices
    return sorted(_realized_patterns(k, limit))


def realizing_graphs(k: int, max_vertices: int | None = None) -> dict[MatchingPattern, Graph]:
    """One small graph (terminals ``0..k-1``) realizing each canonical class."""
    limit = ENUM_LIMIT[k] if max_vertices is None else max_vertices
    return {p: Graph(n, e) for p, (n, e) in _realized_patterns(k, limit).items()}


# ---------------------------------------------------------------------------
# outerplanarity
# ---------------------------------------------------------------------------


def outerplanar_embedding(g: Graph, on_face: Sequence[int] | None = None) -> list[list[int]] | None:
    """Rotation system with every vertex of ``on_face`` (default: all) on one face.

    Built by embedding ``g`` plus an apex joined to those vertices and then
    deleting the apex.
    """
    verts = list(range(g.n)) if on_face is None else list(on_face)
    apex = g.n
    aug = Graph(g.n + 1, list(g.edges) + [(v, apex) for v in verts])
    rot = planar_embedding(aug)
    if rot is None:
        return None
    return [[e for e in rot[v] if e < g.m] for v in range(g.n)]


def is_outerplanar(g: Graph) -> bool:
    return outerplanar_embedding(g) is not None


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


def _make_network(n: int, edges: list[tuple[int, int]], k: int, p: MatchingPattern) -> MimickingNetwork:
    g = Graph(n, edges)
    rot = outerplanar_embedding(g)
    _, unique = small_pattern(n, edges, k)
    return MimickingNetwork(
        g,
        tuple(range(k)),
        p,
        None if rot is None else tuple(tuple(r) for r in rot),
        rot is not None,
        unique,
        _unique_matchings(g, k, p) if unique else {},
    )


def _unique_matchings(g: Graph, k: int, p: MatchingPattern) -> dict[int, tuple[int, ...]]:
    out = {}
    edges = [(u, v, 0, e) for e, (u, v) in enumerate(g.edges)]
    inner = list(range(k, g.n))
    for x in p.subsets:
        cover = inner + [i for i in range(k) if x >> i & 1]
        m = perfect_matching(cover, edges)
        out[x] = tuple(sorted(e[3] for e in m))
    return out


def search_mimicking_network(p: MatchingPattern, max_size: int = SEARCH_LIMIT) -> MimickingNetwork:
    """Smallest network realizing ``p`` (terminals are vertices ``0..k-1``).

    Candidates are ordered by vertex count, then edge count, then edge
    list.  Within the smallest vertex count that realizes ``p``, networks
    that are outerplanar and have a unique matching per subset are
    preferred.
    """
    k = p.terminal_count
    if p.is_empty or not p.parity_consistent():
        raise NotFound(f"pattern {p.subsets} is not realizable")
    for n in range(max(k, 1), max_size + 1):
        if (n - k) % 2 != p.parity() % 2:
            continue
        pairs = list(combinations(range(n), 2))
        fallback = None
        for m in range(len(pairs) + 1):
            for combo in combinations(pairs, m):
                got, unique = small_pattern(n, combo, k)
                if got != p:
                    continue
                if unique and is_outerplanar(Graph(n, combo)):
                    return _make_network(n, list(combo), k, p)
                if fallback is None:
                    fallback = list(combo)
        if fallback is not None:
            return _make_network(n, fallback, k, p)
    raise NotFound(f"no network on at most {max_size} vertices realizes {p.subsets}")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def entry_to_json(net: MimickingNetwork) -> dict:
    return {
        "terminals": net.k,
        "pattern": list(net.pattern.subsets),
        "vertices": net.graph.n,
        "edges": [list(e) for e in net.graph.edges],
        "embedding": None if net.embedding is None else [list(r) for r in net.embedding],
    }


def _entry_from_json(d: dict) -> MimickingNetwork:
    k = d["terminals"]
    p = MatchingPattern.of(k, d["pattern"])
    g = Graph(d["vertices"], [tuple(e) for e in d["edges"]])
    _, unique = small_pattern(g.n, g.edges, k)
    emb = d.get("embedding")
    return MimickingNetwork(
        g,
        tuple(range(k)),
        p,
        None if emb is None else tuple(tuple(r) for r in emb),
        emb is not None,
        unique,
        _unique_matchings(g, k, p) if unique else {},
    )


def build_catalog(max_size: int = SEARCH_LIMIT) -> dict[int, dict[MatchingPattern, MimickingNetwork]]:
    """Search a network for every realizable class with 1 to 3 terminals."""
    return {
        k: {p: search_mimicking_network(p, max_size) for p in enumerate_realizable_patterns(k)}
        for k in (1, 2, 3)
    }


def catalog_to_json(cat: dict[int, dict[MatchingPattern, MimickingNetwork]]) -> str:
    doc = {
        "version": 1,
        "entries": [entry_to_json(cat[k][p]) for k in sorted(cat) for p in sorted(cat[k])],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


@lru_cache(maxsize=None)
def _load_catalog() -> dict[int, dict[MatchingPattern, MimickingNetwork]]:
    text = resources.files("mimicnet").joinpath("data/catalog.json").read_text()
    doc = json.loads(text)
    out: dict[int, dict[MatchingPattern, MimickingNetwork]] = {1: {}, 2: {}, 3: {}}
    for d in doc["entries"]:
        net = _entry_from_json(d)
        out[net.k][net.pattern] = net
    return out


def catalog(k: int) -> dict[MatchingPattern, MimickingNetwork]:
    """Canonical pattern to network, for ``k`` terminals."""
    if not 1 <= k <= 3:
        raise ValueError("the catalog covers 1 to 3 terminals")
    return dict(_load_catalog()[k])


def network_for(p: MatchingPattern) -> MimickingNetwork:
    """Catalog network whose terminal ``i`` plays the role of terminal ``i`` of ``p``."""
    k = p.terminal_count
    if k == 0:
        if p.subsets != (0,):
            raise NotFound("an empty terminal set only realizes the pattern {{}}")
        return MimickingNetwork(Graph(0, []), (), p, (), True, True, {0: ()})
    canon, perm = canonical_pattern(p)
    net = _load_catalog()[k].get(canon)
    if net is None:
        raise NotFound(f"pattern {p.subsets} has no catalog entry")
    # canonical index perm[i] corresponds to our index i
    out = net.relabelled(invert_permutation(perm))
    if out.pattern != p:  # pragma: no cover - permutation bookkeeping guard
        raise AssertionError("catalog relabelling changed the pattern")
    return out


def verify_equivalence(g: Graph, T: Sequence[int], net: MimickingNetwork) -> bool:
    if len(T) != net.k:
        raise ValueError("terminal counts differ")
    mine = matching_pattern(g, T)
    return mine == net.pattern and matching_pattern(net.graph, net.terminals) == net.pattern


# ---------------------------------------------------------------------------
# gluing into a face
# ---------------------------------------------------------------------------


def _face_angles(host: Graph, rot: Sequence[Sequence[int]], walk) -> dict[int, list[int]]:
    """For each vertex of a facial walk, the positions in its rotation where the face sits.

    Position ``i`` means "just after ``rot[v][i]``"; isolated vertices get
    position ``-1``.
    """
    angles: dict[int, list[int]] = {}
    for idx, (u, e) in enumerate(walk):
        # the walk arrives at u along the previous dart and leaves along e
        pu, pe = walk[idx - 1]
        order = rot[u]
        angles.setdefault(u, []).append(order.index(pe))
    return angles


def glue_into_face(
    host: Graph,
    host_rot: Sequence[Sequence[int]],
    face_terminals: Sequence[int],
    net: MimickingNetwork,
) -> tuple[Graph, list[list[int]]]:
    """Glue ``net`` onto ``host`` inside a face holding all of ``face_terminals``.

    Terminal ``i`` of ``net`` is identified with ``face_terminals[i]``.
    Host vertices and edges keep their ids; nonterminals of ``net`` become
    ``host.n, host.n + 1, ...`` in increasing order and its edges are
    appended after the host edges in their own order.  Weights and
    capacities are carried over when present on both graphs.
    """
    k = net.k
    if len(face_terminals) != k or len(set(face_terminals)) != k:
        raise ValueError("need one distinct host vertex per terminal")
    tmap = {net.terminals[i]: face_terminals[i] for i in range(k)}
    vmap = dict(tmap)
    nxt = host.n
    for v in range(net.graph.n):
        if v not in vmap:
            vmap[v] = nxt
            nxt += 1
    new_edges = list(host.edges) + [(vmap[u], vmap[v]) for u, v in net.graph.edges]
    ws = None
    if host.weights is not None or net.graph.weights is not None:
        ws = [host.weight(e) for e in range(host.m)] + [net.graph.weight(e) for e in range(net.graph.m)]
    cs = None
    if host.capacities is not None and net.graph.capacities is not None:
        cs = list(host.capacities) + list(net.graph.capacities)
    union = Graph(nxt, new_edges, ws, cs)

    # rotation of the net with all terminals on one face (apex trick)
    apex = net.graph.n
    aug = Graph(apex + 1, list(net.graph.edges) + [(t, apex) for t in net.terminals])
    nrot = planar_embedding(aug)
    if nrot is None:
        raise NotAFace("network cannot be drawn with its terminals on one face")
    off = host.m

    def lin(v: int, mirror: bool) -> list[int]:
        order = list(nrot[v])
        if mirror:
            order.reverse()
        if v in tmap:
            cut = next(i for i, e in enumerate(order) if e >= net.graph.m)
            order = order[cut + 1 :] + order[:cut]
        return [e + off for e in order if e < net.graph.m]

    target = set(face_terminals)
    walks = []
    if host.m:
        for walk in face_darts(host, host_rot):
            verts = {u for u, _ in walk}
            if target <= verts:
                walks.append(walk)
    else:
        walks.append([])
    if not walks and host.m:
        raise NotAFace(f"vertices {sorted(target)} do not share a face")
    walks.sort(key=len)
    for walk in walks:
        angles = _face_angles(host, host_rot, walk) if walk else {}
        choices = [angles.get(t, [-1]) for t in face_terminals]
        for mirror in (False, True):
            for pick in product(*choices):
                rot = [list(r) for r in host_rot] + [[] for _ in range(nxt - host.n)]
                for v in range(net.graph.n):
                    seq = lin(v, mirror)
                    hv = vmap[v]
                    if v in tmap:
                        pos = pick[net.terminals.index(v)]
                        rot[hv][pos + 1 : pos + 1] = seq
                    else:
                        rot[hv] = seq
                if embedding_is_planar(union, rot):
                    return union, rot
    raise NotAFace(f"no face around {sorted(target)} accepts the network")


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


def _solve_rational(rows: list[list[int]], rhs: list[int], nvars: int) -> list[Fraction] | None:
    """Some solution of ``rows @ w = rhs`` (free variables set to zero)."""
    a = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(a)):
        if a[i][-1] != 0:
            return None
    w = [Fraction(0)] * nvars
    for i, c in enumerate(pivots):
        w[c] = a[i][-1]
    return w


def assign_weights(net: MimickingNetwork, target_diffs: Mapping[int, int]) -> MimickingNetwork:
    """Integer edge weights realizing the given differences between subsets.

    For every pair of subsets ``X, Y`` of the pattern, the cheapest
    matching covering ``X`` minus the cheapest covering ``Y`` equals
    ``target_diffs[X] - target_diffs[Y]``.  Only differences are fixed.
    """
    if not target_diffs:
        raise UnanchoredDiffs("no target differences given")
    subsets = list(net.pattern.subsets)
    missing = [x for x in subsets if x not in target_diffs]
    if missing:
        raise UnanchoredDiffs(f"no target for subsets {missing}")
    if not net.unique:
        raise ValueError("weights can only be assigned to unique-matching networks")
    m = net.graph.m
    if len(subsets) == 1:
        return net.with_weights([0] * m)
    match = {x: set(net.matchings[x]) for x in subsets}
    w = _unique_edge_weights(subsets, match, target_diffs, m)
    if w is None:
        w = _linear_weights(subsets, match, target_diffs, m)
    return net.with_weights(w)


def _unique_edge_weights(subsets, match, diffs, m) -> list[int] | None:
    """Peel off subsets whose matching owns a private edge, then set that edge last."""
    order = []
    live = list(subsets)
    while len(live) > 1:
        for x in live:
            others = set().union(*(match[y] for y in live if y != x))
            private = sorted(match[x] - others)
            if private:
                order.append((x, private[0]))
                live.remove(x)
                break
        else:
            return None
    (base,) = live
    w = [0] * m
    # the last survivor fixes the additive constant
    shift = -diffs[base]
    for x, e in reversed(order):
        rest = sum(w[f] for f in match[x] if f != e)
        w[e] = diffs[x] + shift - rest
    return w


def _linear_weights(subsets, match, diffs, m) -> list[int]:
    # weight(M_X) - weight(M_base) = d_X - d_base, one row per X != base
    base = subsets[0]
    rows, rhs = [], []
    for x in subsets[1:]:
        rows.append([(e in match[x]) - (e in match[base]) for e in range(m)])
        rhs.append(diffs[x] - diffs[base])
    sol = _solve_rational(rows, rhs, m)
    if sol is None or any(v.denominator != 1 for v in sol):
        raise ValueError("difference system has no integer solution for this network")
    return [int(v) for v in sol]


def min_cover_weights(g: Graph, T: Sequence[int]) -> dict[int, int]:
    """Cheapest matching weight covering each subset (with all nonterminals), by enumeration."""
    from .oracle import oracle_min_weight_pm  # local import: the oracle is test plumbing
    from .graph import induced_subgraph

    tset = set(T)
    inner = [v for v in range(g.n) if v not in tset]
    out = {}
    for x in range(1 << len(T)):
        h, _, _ = induced_subgraph(g, inner + [T[i] for i in range(len(T)) if x >> i & 1])
        r = oracle_min_weight_pm(h)
        if r is not None:
            out[x] = r[0]
    return out
