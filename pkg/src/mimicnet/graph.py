"""Core graph type, clique-sums, planarity, faces and edge-list I/O.

Graphs are undirected multigraphs on the vertex set ``0..n-1``.  Every
edge has a stable id (its index in ``edges``).  Weights and capacities are
optional per-edge integer tuples.

An embedding is a rotation system: ``rot[v]`` lists the ids of the edges
incident to ``v`` in clockwise order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import BadIdentification, FormatError, InvalidEmbedding, NotAClique

Rotation = list  # list[list[int]]: per-vertex clockwise list of edge ids


class Graph:
    """Immutable undirected multigraph with optional weights/capacities."""

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        weights: Sequence[int] | None = None,
        capacities: Sequence[int] | None = None,
    ) -> None:
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        es = []
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            es.append((u, v))
        self.n = n
        self.edges = tuple(es)
        if weights is not None:
            weights = tuple(int(w) for w in weights)
            if len(weights) != len(es):
                raise ValueError("weights length differs from edge count")
        if capacities is not None:
            capacities = tuple(int(c) for c in capacities)
            if len(capacities) != len(es):
                raise ValueError("capacities length differs from edge count")
            if any(c < 0 for c in capacities):
                raise ValueError("capacities must be non-negative")
        self.weights = weights
        self.capacities = capacities

    # -- basic accessors -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def adj(self) -> list[list[tuple[int, int]]]:
        """``adj[v]`` is a list of ``(neighbor, edge id)`` pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for eid, (u, v) in enumerate(self.edges):
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        return adj

    @cached_property
    def neighbor_sets(self) -> list[set[int]]:
        return [{w for w, _ in nbrs} for nbrs in self.adj]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def other(self, eid: int, v: int) -> int:
        a, b = self.edges[eid]
        return b if v == a else a

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def weight(self, eid: int) -> int:
        return 0 if self.weights is None else self.weights[eid]

    def with_weights(self, weights: Sequence[int] | None) -> "Graph":
        return Graph(self.n, self.edges, weights, self.capacities)

    def with_capacities(self, capacities: Sequence[int] | None) -> "Graph":
        return Graph(self.n, self.edges, self.weights, capacities)

    def to_networkx(self) -> nx.Graph:
        """Simple networkx graph (parallel edges merged)."""
        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        h.add_edges_from(self.edges)
        return h

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edges == other.edges
            and self.weights == other.weights
            and self.capacities == other.capacities
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.weights, self.capacities))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Matching:
    """A set of edge ids of some graph, plus the vertices they cover."""

    edges: frozenset
    covered: frozenset

    @classmethod
    def from_edges(cls, g: Graph, eids: Iterable[int]) -> "Matching":
        eids = frozenset(eids)
        covered: set[int] = set()
        for e in eids:
            u, v = g.edges[e]
            if u in covered or v in covered:
                raise ValueError("edges share an endpoint")
            covered.add(u)
            covered.add(v)
        return cls(eids, frozenset(covered))

    def weight(self, g: Graph) -> int:
        return sum(g.weight(e) for e in self.edges)

    def sorted_edges(self) -> list[int]:
        return sorted(self.edges)


def is_matching(g: Graph, eids: Iterable[int]) -> bool:
    seen: set[int] = set()
    for e in eids:
        if not 0 <= e < g.m:
            return False
        u, v = g.edges[e]
        if u in seen or v in seen:
            return False
        seen.add(u)
        seen.add(v)
    return True


def is_perfect_matching(g: Graph, eids: Iterable[int]) -> bool:
    """Matching predicate: disjoint edges of ``g`` covering every vertex."""
    eids = list(eids)
    if len(set(eids)) != len(eids) or not is_matching(g, eids):
        return False
    return 2 * len(eids) == g.n


# -- connectivity --------------------------------------------------------


def connected_components(g: Graph, removed: Iterable[int] = ()) -> list[list[int]]:
    """Components of ``g`` minus ``removed``, each sorted, ordered by least vertex."""
    gone = set(removed)
    seen = [False] * g.n
    for v in gone:
        seen[v] = True
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        stack = [s]
        while stack:
            u = stack.pop()
            for w, _ in g.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        comp.sort()
        comps.append(comp)
    return comps


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, list[int], list[int]]:
    """Subgraph induced on ``vertices`` relabelled to ``0..k-1``.

    Returns ``(h, vmap, emap)`` where ``vmap[i]`` is the original id of new
    vertex ``i`` and ``emap[j]`` the original id of new edge ``j``.
    """
    vmap = sorted(set(vertices))
    index = {v: i for i, v in enumerate(vmap)}
    edges, emap = [], []
    for eid, (u, v) in enumerate(g.edges):
        if u in index and v in index:
            edges.append((index[u], index[v]))
            emap.append(eid)
    w = None if g.weights is None else [g.weights[e] for e in emap]
    c = None if g.capacities is None else [g.capacities[e] for e in emap]
    return Graph(len(vmap), edges, w, c), vmap, emap


# -- clique-sum ----------------------------------------------------------


def clique_sum(
    g1: Graph,
    g2: Graph,
    identify: Mapping[int, int],
    drop_edges: Iterable[tuple[int, int]] = (),
) -> Graph:
    """Glue ``g2`` onto ``g1`` along a clique of at most three vertices.

    ``identify`` maps vertices of ``g1`` to vertices of ``g2``.  Edges of
    ``g2`` inside the identified clique duplicate edges of ``g1`` and are
    merged into them; ``drop_edges`` (pairs of ``g1`` ids) are then deleted.
    Vertex ids of ``g1`` are kept; the remaining vertices of ``g2`` get ids
    ``g1.n, g1.n + 1, ...`` in increasing order of their ``g2`` id.
    """
    ident = dict(identify)
    if len(ident) > 3:
        raise BadIdentification("clique-sums identify at most three vertices")
    if len(set(ident.values())) != len(ident):
        raise BadIdentification("identification is not injective")
    for a, b in ident.items():
        if not (0 <= a < g1.n and 0 <= b < g2.n):
            raise BadIdentification(f"identified pair ({a}, {b}) names a missing vertex")
    k1 = list(ident)
    for i in range(len(k1)):
        for j in range(i + 1, len(k1)):
            a, b = k1[i], k1[j]
            if not g1.has_edge(a, b):
                raise NotAClique(f"vertices {a}, {b} of the first graph are not adjacent")
            if not g2.has_edge(ident[a], ident[b]):
                raise NotAClique(
                    f"vertices {ident[a]}, {ident[b]} of the second graph are not adjacent"
                )
    drops = set()
    for a, b in drop_edges:
        if a not in ident or b not in ident or a == b:
            raise BadIdentification(f"dropped pair ({a}, {b}) is not inside the clique")
        drops.add(frozenset((a, b)))

    back = {b: a for a, b in ident.items()}
    rest = [v for v in range(g2.n) if v not in back]
    vmap = dict(back)
    for i, v in enumerate(rest):
        vmap[v] = g1.n + i

    has_w = g1.weights is not None or g2.weights is not None
    has_c = g1.capacities is not None or g2.capacities is not None
    edges, ws, cs = [], [], []
    for eid, (u, v) in enumerate(g1.edges):
        if frozenset((u, v)) in drops:
            continue
        edges.append((u, v))
        ws.append(g1.weight(eid))
        cs.append(0 if g1.capacities is None else g1.capacities[eid])
    for eid, (u, v) in enumerate(g2.edges):
        if u in back and v in back:
            continue  # duplicate of a clique edge of g1
        edges.append((vmap[u], vmap[v]))
        ws.append(g2.weight(eid))
        cs.append(0 if g2.capacities is None else g2.capacities[eid])
    return Graph(
        g1.n + len(rest),
        edges,
        ws if has_w else None,
        cs if has_c else None,
    )


# -- planarity and faces -------------------------------------------------


def is_planar(g: Graph) -> bool:
    if g.n >= 3 and len(set(map(frozenset, g.edges))) > 3 * g.n - 6:
        return False
    planar, _ = nx.check_planarity(g.to_networkx())
    return planar


def planar_embedding(g: Graph) -> Rotation | None:
    """A rotation system for ``g`` or ``None`` when ``g`` is not planar."""
    planar, emb = nx.check_planarity(g.to_networkx())
    if not planar:
        return None
    parallel: dict[tuple[int, int], list[int]] = {}
    for eid, (u, v) in enumerate(g.edges):
        parallel.setdefault((min(u, v), max(u, v)), []).append(eid)
    rot: Rotation = []
    for v in range(g.n):
        order = []
        for w in emb.neighbors_cw_order(v) if v in emb else ():
            group = parallel[(min(v, w), max(v, w))]
            # parallel copies nest, so the two ends list them in opposite order
            order.extend(group if v < w else reversed(group))
        rot.append(order)
    return rot


def _dart_successor_table(g: Graph, rot: Rotation) -> dict[tuple[int, int], int]:
    if len(rot) != g.n:
        raise InvalidEmbedding("rotation system has the wrong number of vertices")
    pos: dict[tuple[int, int], int] = {}
    for v, order in enumerate(rot):
        expected = sorted(e for _, e in g.adj[v])
        if sorted(order) != expected:
            raise InvalidEmbedding(f"rotation at vertex {v} does not list its incident edges")
        for i, e in enumerate(order):
            pos[(v, e)] = i
    return pos


def face_darts(g: Graph, rot: Rotation) -> list[list[tuple[int, int]]]:
    """Facial walks as lists of darts ``(tail vertex, edge id)``.

    A dart leaving ``u`` along ``e`` arrives at ``v``; the walk continues
    along the clockwise successor of ``e`` at ``v``.
    """
    pos = _dart_successor_table(g, rot)
    used: set[tuple[int, int]] = set()
    walks = []
    for u in range(g.n):
        for e in rot[u]:
            if (u, e) in used:
                continue
            walk = []
            d = (u, e)
            while d not in used:
                used.add(d)
                walk.append(d)
                x, f = d
                y = g.other(f, x)
                order = rot[y]
                d = (y, order[(pos[(y, f)] + 1) % len(order)])
            if d != (u, e):
                raise InvalidEmbedding("facial walk does not close on its starting dart")
            walks.append(walk)
    return walks


def faces(g: Graph, rot: Rotation) -> list[list[int]]:
    """Facial walks as vertex sequences."""
    return [[u for u, _ in walk] for walk in face_darts(g, rot)]


def embedding_is_planar(g: Graph, rot: Rotation) -> bool:
    """Euler check of a rotation system, component by component."""
    try:
        walks = face_darts(g, rot)
    except InvalidEmbedding:
        return False
    comp_of = {}
    for i, comp in enumerate(connected_components(g)):
        for v in comp:
            comp_of[v] = i
    nf: dict[int, int] = {}
    for walk in walks:
        c = comp_of[walk[0][0]]
        nf[c] = nf.get(c, 0) + 1
    ne: dict[int, int] = {}
    for u, _ in g.edges:
        ne[comp_of[u]] = ne.get(comp_of[u], 0) + 1
    nv: dict[int, int] = {}
    for v in range(g.n):
        nv[comp_of[v]] = nv.get(comp_of[v], 0) + 1
    for c, vcount in nv.items():
        if ne.get(c, 0) == 0:
            continue
        if vcount - ne[c] + nf.get(c, 0) != 2:
            return False
    return True


def drawing_face_count(g: Graph, rot: Rotation) -> int:
    """Faces of the plane drawing: outer faces of all components coincide."""
    walks = face_darts(g, rot)
    with_edges = {
        tuple(c) for c in connected_components(g) if any(g.adj[v] for v in c)
    }
    return len(walks) - len(with_edges) + 1


# -- edge-list I/O -------------------------------------------------------


def format_edge_list(g: Graph) -> str:
    kind = ""
    values = None
    if g.capacities is not None:
        kind, values = " capacitated", g.capacities
    elif g.weights is not None:
        kind, values = " weighted", g.weights
    lines = [f"p {g.n} {g.m}{kind}"]
    for eid, (u, v) in enumerate(g.edges):
        lines.append(f"e {u} {v}" + (f" {values[eid]}" if values is not None else ""))
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    n = m = None
    kind = ""
    edges, values = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("c", "#")):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None or len(parts) not in (3, 4):
                raise FormatError(f"line {lineno}: bad header")
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError as exc:
                raise FormatError(f"line {lineno}: bad header") from exc
            kind = parts[3] if len(parts) == 4 else ""
            if kind not in ("", "weighted", "capacitated"):
                raise FormatError(f"line {lineno}: unknown graph kind {kind!r}")
        elif parts[0] == "e":
            if n is None:
                raise FormatError(f"line {lineno}: edge before header")
            want = 4 if kind else 3
            if len(parts) != want:
                raise FormatError(f"line {lineno}: expected {want} fields")
            try:
                nums = [int(x) for x in parts[1:]]
            except ValueError as exc:
                raise FormatError(f"line {lineno}: non-integer field") from exc
            u, v = nums[0], nums[1]
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise FormatError(f"line {lineno}: bad endpoints")
            if kind:
                if abs(nums[2]) > 10**9:
                    raise FormatError(f"line {lineno}: value exceeds 1e9 in magnitude")
                if kind == "capacitated" and nums[2] < 0:
                    raise FormatError(f"line {lineno}: negative capacity")
                values.append(nums[2])
            edges.append((u, v))
        else:
            raise FormatError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise FormatError("missing header line")
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges, found {len(edges)}")
    return Graph(
        n,
        edges,
        values if kind == "weighted" else None,
        values if kind == "capacitated" else None,
    )


def parse_dimacs_flow(text: str) -> tuple[Graph, int, int]:
    """DIMACS max-flow input; arcs become undirected capacitated edges."""
    n = None
    s = t = None
    edges, caps = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "p":
                n = int(parts[2])
            elif parts[0] == "n":
                v = int(parts[1]) - 1
                if parts[2] == "s":
                    s = v
                elif parts[2] == "t":
                    t = v
            elif parts[0] == "a":
                u, v, c = int(parts[1]) - 1, int(parts[2]) - 1, int(parts[3])
                if u != v:
                    edges.append((u, v))
                    caps.append(c)
            else:
                raise FormatError(f"line {lineno}: unknown record {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise FormatError(f"line {lineno}: malformed record") from exc
    if n is None or s is None or t is None:
        raise FormatError("DIMACS input lacks a header or source/sink lines")
    return Graph(n, edges, capacities=caps), s, t
