"""Clique-sum decomposition along minimal separators of size at most three.

Two routes produce a :class:`DecompositionTree`:

* the exhaustive route lists every minimal separator of size <= 3
  (:func:`minimal_separators_up_to_3`), extracts a maximal laminar family
  (:func:`laminar_family`) and splits along it
  (:func:`build_decomposition_tree`);
* the search route (:func:`decompose`) finds separators on the fly inside
  the current torsos (cut vertices, low-degree neighbourhoods, then
  vertex-disjoint path counting) and splits until no torso has one left.

Both share the splitting step.  Splitting a torso ``P`` at a separator
``S`` keeps the largest full component of ``P - S`` in place and peels
every other component ``C`` off as a new torso ``C + N(C)``, completing
``N(C)`` into a clique of virtual edges.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from ._separators import minimal_separators_csr
from .errors import NotInFamily
from .graph import Graph, embedding_is_planar, face_darts, planar_embedding
from .treewidth import TreeDecomposition, treewidth_at_most_adj

DEFAULT_TW_BOUND = 8
SMALL_TORSO = 9

Separator = tuple  # sorted tuple of 1-3 vertex ids


# ---------------------------------------------------------------------------
# tree types
# ---------------------------------------------------------------------------


@dataclass
class PieceNode:
    id: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]  # original edge ids owned by this piece
    torso: Graph  # local ids: vertex i is vertices[i]
    torso_virtual: tuple[bool, ...]  # per torso edge: True when no real edge joins the pair
    label: str = "planar"  # "planar" or "bounded-treewidth"
    embedding: list | None = None  # rotation system of the torso
    td: TreeDecomposition | None = None  # over global vertex ids
    kind: str = field(default="piece", init=False)

    def local(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertices)}


@dataclass
class CliqueNode:
    id: int
    vertices: tuple[int, ...]
    kept: tuple[int, ...]  # real edges between clique vertices owned by this node
    kind: str = field(default="clique", init=False)


@dataclass
class DecompositionTree:
    nodes: list
    adj: list[list[int]]
    root: int
    family: list[Separator]

    @property
    def pieces(self) -> list[PieceNode]:
        return [x for x in self.nodes if x.kind == "piece"]

    @property
    def cliques(self) -> list[CliqueNode]:
        return [x for x in self.nodes if x.kind == "clique"]

    def children(self) -> list[list[int]]:
        """Children lists of the tree rooted at ``root``."""
        kids: list[list[int]] = [[] for _ in self.nodes]
        seen = {self.root}
        order = [self.root]
        for x in order:
            for y in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    kids[x].append(y)
                    order.append(y)
        return kids

    def parents(self) -> list[int]:
        par = [-1] * len(self.nodes)
        for x, ks in enumerate(self.children()):
            for y in ks:
                par[y] = x
        return par

    def edges_of(self, node_id: int) -> tuple[int, ...]:
        x = self.nodes[node_id]
        return x.edges if x.kind == "piece" else x.kept


# ---------------------------------------------------------------------------
# helpers on dict-of-set adjacency
# ---------------------------------------------------------------------------


def _components(adj: dict, removed: Iterable[int]) -> list[set[int]]:
    gone = set(removed)
    seen = set(gone)
    comps = []
    for s in sorted(adj):
        if s in seen:
            continue
        seen.add(s)
        comp = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def _full_count(adj: dict, S: Sequence[int]) -> int:
    sset = set(S)
    n = 0
    for comp in _components(adj, sset):
        touched = set()
        for v in comp:
            touched |= adj[v] & sset
        if touched == sset:
            n += 1
    return n


def is_minimal_separator(adj: dict, S: Sequence[int]) -> bool:
    return _full_count(adj, S) >= 2


def articulation_points(adj: dict) -> list[int]:
    """Cut vertices of the graph given by ``adj`` (iterative Tarjan)."""
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    cuts: set[int] = set()
    timer = 0
    for root in sorted(adj):
        if root in disc:
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        stack = [(root, -1, iter(sorted(adj[root])))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w in disc:
                    low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, v, iter(sorted(adj[w]))))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[v])
                if p == root:
                    root_children += 1
                elif low[v] >= disc[p]:
                    cuts.add(p)
        if root_children >= 2:
            cuts.add(root)
    return sorted(cuts)


def vertex_cut(adj: dict, x: int, y: int, limit: int = 3) -> set[int] | None:
    """A set of at most ``limit`` vertices separating non-adjacent ``x`` and ``y``.

    Counts vertex-disjoint paths with unit vertex capacities; returns
    ``None`` once ``limit + 1`` disjoint paths exist.  The cut returned is
    the one closest to ``x``.
    """
    thru: set[int] = set()
    flow: set[tuple[int, int]] = set()
    for _ in range(limit + 1):
        start, goal = (x, 1), (y, 0)
        prev = {start: None}
        dq = deque([start])
        found = False
        while dq and not found:
            st = dq.popleft()
            v, side = st
            if side == 1:
                for w in adj[v]:
                    nxt = (w, 0)
                    if nxt not in prev and (v, w) not in flow:
                        prev[nxt] = st
                        if nxt == goal:
                            found = True
                            break
                        dq.append(nxt)
                if not found and v in thru and (v, 0) not in prev:
                    prev[(v, 0)] = st
                    dq.append((v, 0))
            else:
                if v not in thru and v != x and (v, 1) not in prev:
                    prev[(v, 1)] = st
                    dq.append((v, 1))
                for u in adj[v]:
                    if (u, v) in flow and (u, 1) not in prev:
                        prev[(u, 1)] = st
                        dq.append((u, 1))
        if not found:
            return _cut_from_residual(adj, x, thru, flow)
        st = goal
        while prev[st] is not None:
            p = prev[st]
            (a, sa), (b, sb) = p, st
            if sa == 1 and sb == 0:
                if a == b:
                    thru.discard(a)
                else:
                    flow.add((a, b))
            elif sa == 0 and sb == 1:
                if a == b:
                    thru.add(a)
                else:
                    flow.discard((b, a))
            st = p
    return None


def _cut_from_residual(adj: dict, x: int, thru: set[int], flow: set[tuple[int, int]]) -> set[int]:
    # edge arcs have unbounded capacity, so only vertex arcs may be cut
    seen = {(x, 1)}
    stack = [(x, 1)]
    while stack:
        v, side = stack.pop()
        if side == 1:
            nxt = [(w, 0) for w in adj[v]]
            if v in thru:
                nxt.append((v, 0))
        else:
            nxt = [(u, 1) for u in adj[v] if (u, v) in flow]
            if v not in thru and v != x:
                nxt.append((v, 1))
        for st in nxt:
            if st not in seen:
                seen.add(st)
                stack.append(st)
    return {v for (v, side) in seen if side == 0 and v != x and (v, 1) not in seen}


# ---------------------------------------------------------------------------
# exhaustive route
# ---------------------------------------------------------------------------


def _graph_adj(g: Graph, vertices: Iterable[int] | None = None) -> dict[int, set[int]]:
    if vertices is None:
        return {v: set(g.neighbor_sets[v]) for v in range(g.n)}
    keep = set(vertices)
    return {v: g.neighbor_sets[v] & keep for v in keep}


def minimal_separators_up_to_3(g: Graph, vertices: Iterable[int] | None = None) -> list[Separator]:
    """Every minimal separator of size 1-3, sorted by size then vertex ids."""
    adj = _graph_adj(g, vertices)
    verts = sorted(adj)
    local = {v: i for i, v in enumerate(verts)}
    indptr = np.zeros(len(verts) + 1, np.int64)
    indices = []
    for i, v in enumerate(verts):
        nbrs = sorted(local[w] for w in adj[v])
        indices.extend(nbrs)
        indptr[i + 1] = indptr[i] + len(nbrs)
    found = minimal_separators_csr(indptr, np.asarray(indices, np.int64), len(verts), 3)
    return [tuple(verts[i] for i in S) for S in found]


def _labels_without(adj: dict, S: Sequence[int]) -> dict[int, int]:
    lab = {}
    for i, comp in enumerate(_components(adj, S)):
        for v in comp:
            lab[v] = i
    return lab


def _splits(lab: dict[int, int], S1: Sequence[int], S2: Sequence[int]) -> bool:
    """True when ``S2`` separates two vertices of ``S1``."""
    rest = [v for v in S1 if v not in S2]
    comps = {lab[v] for v in rest}
    return len(comps) > 1


def laminar_conflicts(g: Graph, seps: Sequence[Separator], vertices=None) -> list[set[int]]:
    adj = _graph_adj(g, vertices)
    labs = [_labels_without(adj, S) for S in seps]
    conflicts: list[set[int]] = [set() for _ in seps]
    for i in range(len(seps)):
        for j in range(i + 1, len(seps)):
            if _splits(labs[j], seps[i], seps[j]) or _splits(labs[i], seps[j], seps[i]):
                conflicts[i].add(j)
                conflicts[j].add(i)
    return conflicts


def laminar_family(
    g: Graph,
    seps: Sequence[Separator],
    mode: str = "greedy",
    seed: int = 0,
    vertices=None,
) -> list[Separator]:
    """A maximal pairwise-laminar subfamily of ``seps``.

    ``greedy`` scans in the given order; ``random`` runs Luby-style rounds
    of random priorities (deterministic for a fixed seed).  Either way the
    result is a maximal independent set of the conflict graph.
    """
    seps = [tuple(sorted(S)) for S in seps]
    conflicts = laminar_conflicts(g, seps, vertices)
    chosen: list[int] = []
    if mode == "greedy":
        blocked: set[int] = set()
        for i in range(len(seps)):
            if i not in blocked:
                chosen.append(i)
                blocked |= conflicts[i]
    elif mode == "random":
        rng = random.Random(seed)
        live = set(range(len(seps)))
        while live:
            prio = {i: rng.random() for i in sorted(live)}
            pick = [
                i for i in sorted(live)
                if all(prio[i] < prio[j] for j in conflicts[i] if j in live)
            ]
            chosen.extend(pick)
            for i in pick:
                live.discard(i)
                live -= conflicts[i]
        chosen.sort()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return [seps[i] for i in chosen]


# ---------------------------------------------------------------------------
# splitting machinery
# ---------------------------------------------------------------------------


class _Work:
    __slots__ = ("id", "adj", "cliques", "two_connected")

    def __init__(self, wid: int, adj: dict, two_connected: bool = False) -> None:
        self.id = wid
        self.adj = adj
        self.cliques: dict[frozenset, int] = {}
        self.two_connected = two_connected


def _explore(adj: dict, S: set[int]) -> tuple[list[set[int]], set[int] | None]:
    """Components of ``adj - S`` found by interleaved searches.

    Every component except possibly the largest is returned complete; the
    search stops as soon as a single component is still growing, which is
    returned as a partial vertex set (``None`` if every search finished).
    """
    seeds = sorted({w for s in S for w in adj[s] if w not in S})
    k = len(seeds)
    if k == 0:
        return [], None
    uf = list(range(k))
    members = [[x] for x in seeds]
    queues: list[deque | None] = [deque([x]) for x in seeds]
    owner = {x: i for i, x in enumerate(seeds)}

    def find(i: int) -> int:
        while uf[i] != i:
            uf[i] = uf[uf[i]]
            i = uf[i]
        return i

    alive = set(range(k))
    turn = deque(range(k))
    finished = []
    while len(alive) > 1:
        i = turn.popleft()
        if i not in alive:
            continue
        q = queues[i]
        if not q:
            alive.discard(i)
            finished.append(i)
            continue
        v = q.popleft()
        for w in adj[v]:
            if w in S:
                continue
            o = owner.get(w)
            if o is None:
                owner[w] = i
                members[i].append(w)
                q.append(w)
            else:
                r = find(o)
                if r != i:
                    uf[r] = i
                    members[i].extend(members[r])
                    q.extend(queues[r])
                    queues[r] = None
                    members[r] = []
                    alive.discard(r)
        turn.append(i)
    comps = [set(members[i]) for i in finished]
    big = None
    if alive:
        (r,) = alive
        big = set(members[r])
        if not queues[r]:
            comps.append(big)
            big = None
    return comps, big


class _Splitter:
    """Shared state while cutting torsos apart."""

    def __init__(self, g: Graph) -> None:
        self.g = g
        self.works: dict[int, _Work] = {}
        self.clique_verts: dict[int, frozenset] = {}
        self.clique_members: dict[int, list[int]] = {}
        self.v_cliques: dict[int, set[int]] = {}
        self.family: list[Separator] = []
        self._next_work = 0
        self._next_clique = 0

    def new_work(self, adj: dict, two_connected: bool = False) -> _Work:
        w = _Work(self._next_work, adj, two_connected)
        self._next_work += 1
        self.works[w.id] = w
        return w

    def new_clique(self, verts: frozenset) -> int:
        cid = self._next_clique
        self._next_clique += 1
        self.clique_verts[cid] = verts
        self.clique_members[cid] = []
        for v in verts:
            self.v_cliques.setdefault(v, set()).add(cid)
        self.family.append(tuple(sorted(verts)))
        return cid

    def attach(self, work: _Work, cid: int) -> None:
        work.cliques[self.clique_verts[cid]] = cid
        self.clique_members[cid].append(work.id)
        verts = self.clique_verts[cid]
        for a in verts:
            work.adj[a].update(verts - {a})

    def _nbhd(self, adj: dict, comp: set[int], S: set[int]) -> frozenset:
        out = set()
        for v in comp:
            out |= adj[v] & S
        return frozenset(out)

    def split(self, P: _Work, S: Iterable[int]) -> list[_Work] | None:
        """Split ``P`` at ``S`` (made minimal first); returns the peeled torsos."""
        S = set(S)
        adj = P.adj
        comps, big = _explore(adj, S)
        if len(comps) + (big is not None) < 2:
            return None
        nbr = [self._nbhd(adj, c, S) for c in comps]
        fs = frozenset(S)
        big_full = False
        if big is not None:
            done = set().union(*comps) if comps else set()
            big_n = frozenset(
                s for s in S if any(w not in S and w not in done for w in adj[s])
            )
            big_full = big_n == fs
        full = [i for i, N in enumerate(nbr) if N == fs]
        if len(full) + big_full < 2:
            order = sorted(range(len(comps)), key=lambda i: (len(comps[i]), min(comps[i])))
            first = order[0]
            if nbr[first] != fs:
                return self.split(P, nbr[first])
            others = [nbr[i] for i in order[1:]]
            if big is not None:
                others.append(big_n)
            return self.split(P, others[0])
        if big is not None and not big_full:
            comps = _components({v: adj[v] for v in adj}, S)
            big = None
            nbr = [self._nbhd(adj, c, S) for c in comps]
            full = [i for i, N in enumerate(nbr) if N == fs]
        if big is None:
            keep = max(full, key=lambda i: (len(comps[i]), -min(comps[i])))
            peel = [i for i in range(len(comps)) if i != keep]
        else:
            peel = list(range(len(comps)))
        peel.sort(key=lambda i: min(comps[i]))
        out = []
        for i in peel:
            out.append(self._peel(P, comps[i], nbr[i]))
        return out

    def _peel(self, P: _Work, C: set[int], K: frozenset) -> _Work:
        adj = P.adj
        qadj: dict[int, set[int]] = {k: set(K - {k}) for k in K}
        for c in C:
            qadj[c] = set(adj[c])
            for w in adj[c]:
                if w in K:
                    qadj[w].add(c)
        Q = self.new_work(qadj, P.two_connected)
        for c in C:
            for w in adj[c]:
                if w not in C:
                    adj[w].discard(c)
        for c in C:
            del adj[c]
        # cliques of P meeting C move to Q
        moved = set()
        for c in C:
            for cid in self.v_cliques.get(c, ()):
                if cid in moved:
                    continue
                key = self.clique_verts[cid]
                if P.cliques.get(key) == cid:
                    moved.add(cid)
                    del P.cliques[key]
                    Q.cliques[key] = cid
                    mem = self.clique_members[cid]
                    mem[mem.index(P.id)] = Q.id
        cid = P.cliques.get(K)
        if cid is None:
            cid = self.new_clique(K)
            self.attach(P, cid)
        self.attach(Q, cid)
        return Q


def _find_separator(work: _Work, seed: int) -> set[int] | None:
    adj = work.adj
    n = len(adj)
    if n <= SMALL_TORSO:
        verts = sorted(adj)
        for r in (1, 2, 3):
            if n - r < 2:
                break
            for S in combinations(verts, r):
                if len(_components(adj, S)) >= 2:
                    return set(S)
        return None
    if not work.two_connected:
        cuts = articulation_points(adj)
        if cuts:
            return {cuts[0]}
        work.two_connected = True
    v = min(adj, key=lambda x: (len(adj[x]), x))
    if len(adj[v]) <= 3:
        return set(adj[v])
    rng = random.Random(seed * 1000003 + n)
    others = [w for w in sorted(adj) if w != v and w not in adj[v]]
    rng.shuffle(others)
    for w in others:
        cut = vertex_cut(adj, v, w, 3)
        if cut is not None:
            return cut
    nb = sorted(adj[v])
    for i, x in enumerate(nb):
        for y in nb[i + 1 :]:
            if y not in adj[x]:
                cut = vertex_cut(adj, x, y, 3)
                if cut is not None:
                    return cut
    return None


def torso_has_separator(adj: dict) -> bool:
    """Exact test for a separator of size <= 3 (used for maximality checks)."""
    w = _Work(-1, adj, False)
    return _find_separator(w, 0) is not None


# ---------------------------------------------------------------------------
# building the tree
# ---------------------------------------------------------------------------


def _blocks(sp: _Splitter, adj: dict) -> list[_Work]:
    """Split a connected graph into its blocks along cut vertices."""
    h = nx.Graph()
    h.add_nodes_from(adj)
    for v, ns in adj.items():
        for w in ns:
            if v < w:
                h.add_edge(v, w)
    if h.number_of_nodes() == 1:
        return [sp.new_work({v: set() for v in adj}, True)]
    blocks = sorted((sorted(b) for b in nx.biconnected_components(h)), key=lambda b: b)
    if len(blocks) == 1:
        return [sp.new_work({v: set(ns) for v, ns in adj.items()}, True)]
    works = []
    cut_clique: dict[int, int] = {}
    for b in blocks:
        bset = set(b)
        w = sp.new_work({v: adj[v] & bset for v in b}, True)
        works.append(w)
    # block-cut tree: a cut vertex becomes a clique node shared by its blocks
    owners: dict[int, list[_Work]] = {}
    for w in works:
        for v in w.adj:
            owners.setdefault(v, []).append(w)
    for v in sorted(owners):
        if len(owners[v]) < 2:
            continue
        cid = sp.new_clique(frozenset((v,)))
        cut_clique[v] = cid
        for w in owners[v]:
            sp.attach(w, cid)
    return works


def _run_search(sp: _Splitter, works: list[_Work]) -> None:
    queue = deque(works)
    while queue:
        w = queue.popleft()
        while True:
            S = _find_separator(w, w.id)
            if S is None:
                break
            peeled = sp.split(w, S)
            if not peeled:  # pragma: no cover - a found separator always splits
                raise AssertionError("separator search returned a non-separator")
            queue.extend(peeled)


def _run_family(sp: _Splitter, works: list[_Work], family: Sequence[Separator]) -> None:
    for S in family:
        sset = set(S)
        for w in list(sp.works.values()):
            if sset <= w.adj.keys() and len(_components(w.adj, sset)) >= 2:
                sp.split(w, sset)
                break


def _finish(
    g: Graph, sp: _Splitter, tw_bound: int, split_nonfacial: bool = True
) -> DecompositionTree:
    # split planar torsos along non-facial incident triangles first
    if split_nonfacial:
        changed = True
        while changed:
            changed = False
            for w in list(sp.works.values()):
                tri = _nonfacial_triangle(w)
                if tri is not None:
                    sp.split(w, tri)
                    changed = True

    works = sorted(sp.works.values(), key=lambda w: tuple(sorted(w.adj)))
    if not works:
        raise ValueError("empty graph")
    root_work = works[0]
    # node ids: BFS from the root piece, neighbours ordered by vertex tuple
    w_of_clique = sp.clique_members
    order: list[tuple[str, int]] = [("p", root_work.id)]
    seen = {("p", root_work.id)}
    for kind, ident in order:
        if kind == "p":
            nbrs = [("c", cid) for cid in sp.works[ident].cliques.values()]
        else:
            nbrs = [("p", wid) for wid in w_of_clique[ident]]
        nbrs.sort(key=lambda x: (_verts_key(sp, x), x))
        for x in nbrs:
            if x not in seen:
                seen.add(x)
                order.append(x)
    if len(order) != len(sp.works) + len(sp.clique_verts):  # pragma: no cover
        raise AssertionError("decomposition pieces are not connected into one tree")
    node_id = {x: i for i, x in enumerate(order)}

    # edge ownership
    piece_edges: dict[int, list[int]] = {wid: [] for wid in sp.works}
    kept: dict[int, list[int]] = {cid: [] for cid in sp.clique_verts}
    v_works: dict[int, list[int]] = {}
    for wid, w in sp.works.items():
        for v in w.adj:
            v_works.setdefault(v, []).append(wid)
    for eid, (u, v) in enumerate(g.edges):
        if u not in v_works:
            continue  # another component
        both = sp.v_cliques.get(u, set()) & sp.v_cliques.get(v, set())
        if both:
            cid = min(both, key=lambda c: node_id[("c", c)])
            kept[cid].append(eid)
            continue
        homes = [wid for wid in v_works.get(u, ()) if v in sp.works[wid].adj]
        if len(homes) != 1:  # pragma: no cover
            raise AssertionError(f"edge {eid} is not inside exactly one piece")
        piece_edges[homes[0]].append(eid)

    nodes: list = [None] * len(order)
    adj_out: list[list[int]] = [[] for _ in order]
    for kind, ident in order:
        i = node_id[(kind, ident)]
        if kind == "p":
            nodes[i] = _make_piece(g, i, sp.works[ident], piece_edges[ident], tw_bound)
            for cid in sp.works[ident].cliques.values():
                j = node_id[("c", cid)]
                adj_out[i].append(j)
                adj_out[j].append(i)
        else:
            nodes[i] = CliqueNode(i, tuple(sorted(sp.clique_verts[ident])), tuple(sorted(kept[ident])))
    for lst in adj_out:
        lst.sort()
    family = sorted(set(sp.family), key=lambda S: (len(S), S))
    return DecompositionTree(nodes, adj_out, 0, family)


def _verts_key(sp: _Splitter, x: tuple[str, int]) -> tuple:
    kind, ident = x
    if kind == "p":
        return (0, tuple(sorted(sp.works[ident].adj)))
    return (1, tuple(sorted(sp.clique_verts[ident])))


def _torso_graph(g: Graph, vertices: tuple[int, ...], adj: dict) -> tuple[Graph, tuple[bool, ...]]:
    index = {v: i for i, v in enumerate(vertices)}
    pairs = sorted({(min(a, b), max(a, b)) for a in adj for b in adj[a]})
    edges = [(index[a], index[b]) for a, b in pairs]
    virtual = tuple(not g.has_edge(a, b) for a, b in pairs)
    return Graph(len(vertices), edges), virtual


def _nonfacial_triangle(w: _Work) -> set[int] | None:
    tris = [k for k in w.cliques if len(k) == 3]
    if not tris or len(w.adj) <= 4:
        return None
    vertices = tuple(sorted(w.adj))
    index = {v: i for i, v in enumerate(vertices)}
    pairs = sorted({(min(a, b), max(a, b)) for a in w.adj for b in w.adj[a]})
    torso = Graph(len(vertices), [(index[a], index[b]) for a, b in pairs])
    rot = planar_embedding(torso)
    if rot is None:
        return None
    facial = {frozenset(vertices[u] for u, _ in walk) for walk in face_darts(torso, rot) if len(walk) == 3}
    for k in sorted(tris, key=sorted):
        if k not in facial and len(_components(w.adj, k)) >= 2:
            return set(k)
    return None


def _make_piece(g: Graph, i: int, w: _Work, edges: list[int], tw_bound: int) -> PieceNode:
    vertices = tuple(sorted(w.adj))
    torso, virtual = _torso_graph(g, vertices, w.adj)
    piece = PieceNode(i, vertices, tuple(sorted(edges)), torso, virtual)
    rot = planar_embedding(torso)
    if rot is not None:
        piece.label = "planar"
        piece.embedding = rot
        return piece
    td = treewidth_at_most_adj({v: set(ns) for v, ns in w.adj.items()}, tw_bound)
    if td is None:
        raise NotInFamily(
            f"piece on {len(vertices)} vertices is neither planar nor of treewidth <= {tw_bound}"
        )
    piece.label = "bounded-treewidth"
    piece.td = td
    return piece


def _check_connected(g: Graph, vertices: Iterable[int] | None) -> dict[int, set[int]]:
    adj = _graph_adj(g, vertices)
    if not adj:
        raise ValueError("cannot decompose an empty graph")
    if len(_components(adj, ())) != 1:
        raise ValueError("decomposition requires a connected graph; split components first")
    return adj


def decompose(
    g: Graph, vertices: Iterable[int] | None = None, tw_bound: int = DEFAULT_TW_BOUND
) -> DecompositionTree:
    """Decomposition tree of a connected graph (or connected vertex subset) by separator search."""
    adj = _check_connected(g, vertices)
    sp = _Splitter(g)
    works = _blocks(sp, adj)
    _run_search(sp, works)
    return _finish(g, sp, tw_bound)


def build_decomposition_tree(
    g: Graph,
    family: Sequence[Separator],
    vertices: Iterable[int] | None = None,
    tw_bound: int = DEFAULT_TW_BOUND,
) -> DecompositionTree:
    """Decomposition tree obtained by splitting along a given laminar family."""
    adj = _check_connected(g, vertices)
    sp = _Splitter(g)
    w = sp.new_work({v: set(ns) for v, ns in adj.items()})
    _run_family(sp, [w], sorted(family, key=lambda S: (len(S), tuple(sorted(S)))))
    return _finish(g, sp, tw_bound)


def decompose_exhaustive(
    g: Graph, vertices: Iterable[int] | None = None, tw_bound: int = DEFAULT_TW_BOUND
) -> DecompositionTree:
    seps = minimal_separators_up_to_3(g, vertices)
    fam = laminar_family(g, seps, vertices=vertices)
    return build_decomposition_tree(g, fam, vertices, tw_bound)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def reassemble(tree: DecompositionTree, g: Graph) -> Graph:
    """Glue the nodes back together keeping only real edges.

    Pieces contribute their owned edges and clique nodes their kept edges;
    virtual pairs are dropped.  Raises ``AssertionError`` if an edge is
    claimed twice, never claimed, or claimed by a node missing one of its
    endpoints.
    """
    claimed: dict[int, int] = {}
    for x in tree.nodes:
        verts = set(x.vertices)
        for eid in tree.edges_of(x.id):
            if eid in claimed:
                raise AssertionError(f"edge {eid} owned by nodes {claimed[eid]} and {x.id}")
            u, v = g.edges[eid]
            if u not in verts or v not in verts:
                raise AssertionError(f"edge {eid} assigned to node {x.id} without its endpoints")
            claimed[eid] = x.id
    covered = {v for x in tree.nodes for v in x.vertices}
    missing = {e for e, (u, _) in enumerate(g.edges) if u in covered} - claimed.keys()
    if missing:
        raise AssertionError(f"edges {sorted(missing)} are not owned by any node")
    n = max((v for x in tree.nodes for v in x.vertices), default=-1) + 1
    return Graph(max(n, g.n), [g.edges[e] for e in sorted(claimed)])


def check_tree(tree: DecompositionTree, g: Graph) -> list[str]:
    """Structural problems of ``tree`` as a decomposition of ``g`` (empty when sound)."""
    problems = []
    nodes = tree.nodes
    # bipartite tree
    nedges = sum(len(a) for a in tree.adj) // 2
    if nedges != len(nodes) - 1:
        problems.append("node adjacency is not a tree (edge count)")
    for i, nb in enumerate(tree.adj):
        for j in nb:
            if nodes[i].kind == nodes[j].kind:
                problems.append(f"nodes {i} and {j} have the same colour")
            if i not in tree.adj[j]:
                problems.append(f"adjacency {i}-{j} not symmetric")
            if nodes[i].kind == "clique" and not set(nodes[i].vertices) <= set(nodes[j].vertices):
                problems.append(f"clique {i} not contained in neighbour {j}")
    seen = {tree.root}
    stack = [tree.root]
    while stack:
        x = stack.pop()
        for y in tree.adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != len(nodes):
        problems.append("tree is disconnected")
    # each vertex's nodes form a connected subtree
    holders: dict[int, set[int]] = {}
    for x in nodes:
        for v in x.vertices:
            holders.setdefault(v, set()).add(x.id)
    for v, hs in holders.items():
        start = min(hs)
        reach = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in tree.adj[x]:
                if y in hs and y not in reach:
                    reach.add(y)
                    stack.append(y)
        if reach != hs:
            problems.append(f"vertex {v} occupies a disconnected set of nodes")
    # edge partition
    count = [0] * g.m
    for x in nodes:
        for eid in tree.edges_of(x.id):
            count[eid] += 1
            u, v = g.edges[eid]
            if u not in x.vertices or v not in x.vertices:
                problems.append(f"edge {eid} assigned to node {x.id} missing an endpoint")
    covered = {v for x in nodes for v in x.vertices}
    for eid, c in enumerate(count):
        if g.edges[eid][0] not in covered:
            continue
        if c != 1:
            problems.append(f"edge {eid} owned {c} times")
    # planar pieces: incident triangles are faces of the stored embedding
    for x in tree.pieces:
        if x.label == "planar":
            if x.embedding is None or not embedding_is_planar(x.torso, x.embedding):
                problems.append(f"piece {x.id} lacks a valid planar embedding")
                continue
            facial = {
                frozenset(x.vertices[u] for u, _ in walk)
                for walk in face_darts(x.torso, x.embedding)
                if len(walk) == 3
            }
            for y in tree.adj[x.id]:
                k = nodes[y].vertices
                if len(k) == 3 and len(x.vertices) > 3 and frozenset(k) not in facial:
                    problems.append(f"triangle {k} is not a face of piece {x.id}")
        else:
            adj = {}
            loc = x.vertices
            for a, b in x.torso.edges:
                adj.setdefault(loc[a], set()).add(loc[b])
                adj.setdefault(loc[b], set()).add(loc[a])
            for v in loc:
                adj.setdefault(v, set())
            if x.td is None or not x.td.is_valid_for(adj):
                problems.append(f"piece {x.id} lacks a valid tree decomposition")
    return problems
