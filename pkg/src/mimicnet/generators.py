"""Random graphs inside clique-sum closed families.

Instances are assembled piece by piece: each new piece is glued to a
random earlier piece along a vertex, an edge or (for ``k5-free``) a
facial triangle.  Every piece draws from its own child stream of a
PCG64 seed sequence, so a seed fixes the output.

With ``plant_pm`` each piece's new vertices (those not glued) carry a
perfect matching of their own, so the union of these matchings is a
perfect matching of the whole graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, connected_components, face_darts, planar_embedding
from .solvers import perfect_matching

FAMILIES = ("planar", "k33-free", "k5-free", "bounded-tw")


@dataclass(frozen=True)
class GenSpec:
    n: int
    family: str = "k33-free"
    seed: int = 0
    plant_pm: bool = False
    weight_range: tuple[int, int] | None = None
    capacity_range: tuple[int, int] | None = None
    sporadic_rate: float = 0.15  # chance that a new piece is K5 / the Wagner graph
    max_piece: int = 12

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.n < 1:
            raise ValueError("n must be positive")


@dataclass
class Instance:
    graph: Graph
    planted: list[int] = field(default_factory=list)  # edge ids, when planted
    pieces: list[tuple[int, ...]] = field(default_factory=list)  # vertex sets (after relabelling)
    sporadic: list[tuple[int, ...]] = field(default_factory=list)


def wagner_graph() -> Graph:
    """The Moebius ladder on eight vertices: an 8-cycle plus its four long diagonals."""
    edges = [(i, (i + 1) % 8) for i in range(8)] + [(i, i + 4) for i in range(4)]
    return Graph(8, [(min(a, b), max(a, b)) for a, b in edges])


def k5() -> Graph:
    return Graph(5, [(a, b) for a in range(5) for b in range(a + 1, 5)])


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(ss))


def _triangulation(n: int, rng: np.random.Generator) -> set[tuple[int, int]]:
    """Random triangulation: stacked insertions followed by random flips."""
    edges = {(0, 1), (0, 2), (1, 2)}
    faces = [(0, 1, 2), (0, 2, 1)]  # both sides of the starting triangle
    for v in range(3, n):
        i = int(rng.integers(len(faces)))
        a, b, c = faces[i]
        faces[i] = (a, b, v)
        faces.append((b, c, v))
        faces.append((c, a, v))
        edges.update({(min(a, v), v), (min(b, v), v), (min(c, v), v)})
    # flips: an edge ab between faces (a, b, c) and (b, a, d) becomes cd
    for _ in range(2 * n):
        i = int(rng.integers(len(faces)))
        a, b, c = faces[i]
        j = next((j for j, f in enumerate(faces) if j != i and _has_dir(f, b, a)), None)
        if j is None:
            continue
        d = next(x for x in faces[j] if x not in (a, b))
        key = (min(c, d), max(c, d))
        if c == d or key in edges:
            continue
        edges.discard((min(a, b), max(a, b)))
        edges.add(key)
        faces[i] = (a, d, c)
        faces[j] = (b, c, d)
    return edges


def _has_dir(face: tuple[int, int, int], x: int, y: int) -> bool:
    a, b, c = face
    return (a, b) == (x, y) or (b, c) == (x, y) or (c, a) == (x, y)


def _thin(n: int, edges: set[tuple[int, int]], rng: np.random.Generator, keep: float) -> list[tuple[int, int]]:
    """Drop random edges while staying connected; ``keep`` is the target kept fraction."""
    order = sorted(edges)
    rng.shuffle(order)
    adj = {v: set() for v in range(n)}
    for a, b in order:
        adj[a].add(b)
        adj[b].add(a)
    target = max(n - 1, int(round(keep * len(order))))
    current = len(order)
    for a, b in list(order):
        if current <= target:
            break
        adj[a].discard(b)
        adj[b].discard(a)
        if _reaches(adj, a, b):
            current -= 1
            edges.discard((a, b))
        else:
            adj[a].add(b)
            adj[b].add(a)
    return sorted(edges)


def _reaches(adj: dict, s: int, t: int) -> bool:
    seen = {s}
    stack = [s]
    while stack:
        v = stack.pop()
        if v == t:
            return True
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def random_planar(n: int, seed=0, keep: float = 0.7) -> tuple[Graph, list[list[int]]]:
    """Connected planar graph (a thinned random triangulation) and an embedding of it."""
    if n < 3:
        raise ValueError("random_planar needs at least three vertices")
    rng = _rng(seed)
    edges = _thin(n, _triangulation(n, rng), rng, keep)
    g = Graph(n, edges)
    return g, planar_embedding(g)


def _random_partial_ktree(n: int, k: int, rng: np.random.Generator, keep: float) -> list[tuple[int, int]]:
    edges = {(a, b) for a in range(min(n, k + 1)) for b in range(a + 1, min(n, k + 1))}
    cliques = [tuple(range(min(n, k + 1)))]
    for v in range(k + 1, n):
        base = cliques[int(rng.integers(len(cliques)))]
        drop = int(rng.integers(len(base)))
        sub = tuple(x for i, x in enumerate(base) if i != drop)
        for x in sub:
            edges.add((x, v))
        cliques.append(tuple(sorted(sub + (v,))))
    return _thin(n, edges, rng, keep)


# ---------------------------------------------------------------------------
# assembling pieces
# ---------------------------------------------------------------------------


class _Builder:
    def __init__(self, spec: GenSpec) -> None:
        self.spec = spec
        self.ss = np.random.SeedSequence(spec.seed)
        self.rng = _rng(self.ss.spawn(1)[0])
        self.n = 0
        self.edges: set[tuple[int, int]] = set()
        self.planted: set[tuple[int, int]] = set()
        self.pieces: list[dict] = []

    def child(self) -> np.random.Generator:
        return _rng(self.ss.spawn(1)[0])

    def _piece(self, size: int, rng: np.random.Generator, sporadic: bool) -> tuple[Graph, list | None, str]:
        fam = self.spec.family
        if sporadic and fam == "k33-free":
            return k5(), None, "k5"
        if sporadic and fam == "k5-free":
            return wagner_graph(), None, "wagner"
        if fam == "bounded-tw":
            return Graph(size, _random_partial_ktree(size, 3, rng, 0.8)), None, "tw"
        keep = 0.9 if fam == "k5-free" else 0.75
        g, rot = random_planar(size, rng, keep)
        return g, rot, "planar"

    def _triangles(self, g: Graph, rot) -> list[tuple[int, int, int]]:
        if rot is None:
            return []
        out = []
        for walk in face_darts(g, rot):
            if len(walk) == 3:
                tri = tuple(sorted(u for u, _ in walk))
                if len(set(tri)) == 3:
                    out.append(tri)
        return sorted(set(out))

    def _clique_choices(self, g: Graph, rot, kind: str, size_limit: int) -> list[tuple[int, ...]]:
        fam = self.spec.family
        out: list[tuple[int, ...]] = []
        if size_limit >= 1:
            out += [(v,) for v in range(g.n)]
        if size_limit >= 2:
            out += sorted({(min(a, b), max(a, b)) for a, b in g.edges})
        if size_limit >= 3 and fam in ("k5-free", "bounded-tw") and kind in ("planar", "tw"):
            if kind == "planar":
                out += self._triangles(g, rot)
            else:
                es = {(min(a, b), max(a, b)) for a, b in g.edges}
                out += [t for t in _all_triangles(g) if all((t[i], t[j]) in es for i, j in ((0, 1), (0, 2), (1, 2)))]
        return out

    def _max_sum(self, kind: str) -> int:
        fam = self.spec.family
        if fam == "planar":
            return 1  # vertex sums of planar graphs stay planar
        if fam == "k33-free":
            return 2
        if kind == "wagner":
            return 2
        return 3

    def add_piece(self, target_left: int) -> bool:
        spec = self.spec
        rng = self.child()
        sporadic = spec.family in ("k33-free", "k5-free") and rng.random() < spec.sporadic_rate
        first = not self.pieces
        for _attempt in range(20):
            size = int(rng.integers(3, max(4, spec.max_piece) + 1))
            if first:
                size = max(3, min(size, target_left))
            piece, rot, kind = self._piece(size, rng, sporadic)
            if first:
                glue_host, host_clique, own_clique = None, (), ()
            else:
                limit = min(self._max_sum(kind), 3)
                host = self.pieces[int(rng.integers(len(self.pieces)))]
                lim = min(limit, self._max_sum(host["kind"]))
                size_pick = int(rng.integers(1, lim + 1))
                hc = [c for c in self._clique_choices(host["graph"], host["rot"], host["kind"], lim) if len(c) == size_pick]
                oc = [c for c in self._clique_choices(piece, rot, kind, lim) if len(c) == size_pick]
                if not hc or not oc:
                    continue
                host_clique = tuple(host["verts"][x] for x in hc[int(rng.integers(len(hc)))])
                own_clique = oc[int(rng.integers(len(oc)))]
                own_clique = tuple(own_clique[i] for i in rng.permutation(len(own_clique)))
            fresh = [v for v in range(piece.n) if v not in own_clique]
            if not first and len(fresh) > target_left + 2:
                continue
            plant = None
            if spec.plant_pm:
                if len(fresh) % 2:
                    continue
                plant = perfect_matching(fresh, [(a, b, 0, (a, b)) for a, b in piece.edges])
                if plant is None:
                    continue
            self._glue(piece, rot, kind, own_clique, host_clique, fresh, plant, rng)
            return True
        return False

    def _glue(self, piece, rot, kind, own_clique, host_clique, fresh, plant, rng) -> None:
        vmap = {a: b for a, b in zip(own_clique, host_clique)}
        for v in fresh:
            vmap[v] = self.n
            self.n += 1
        for a, b in piece.edges:
            x, y = vmap[a], vmap[b]
            self.edges.add((min(x, y), max(x, y)))
        if plant:
            for e in plant:
                a, b = e[3]
                x, y = vmap[a], vmap[b]
                self.planted.add((min(x, y), max(x, y)))
        # sometimes drop a glued clique edge that is not planted
        if len(host_clique) >= 2 and rng.random() < 0.3:
            pairs = [(min(a, b), max(a, b)) for i, a in enumerate(host_clique) for b in host_clique[i + 1 :]]
            drop = pairs[int(rng.integers(len(pairs)))]
            if drop not in self.planted and self._stays_connected(drop):
                self.edges.discard(drop)
        self.pieces.append(
            {"graph": piece, "rot": rot, "kind": kind, "verts": [vmap[v] for v in range(piece.n)]}
        )

    def _stays_connected(self, drop: tuple[int, int]) -> bool:
        adj: dict[int, set[int]] = {v: set() for v in range(self.n)}
        for a, b in self.edges:
            if (a, b) != drop:
                adj[a].add(b)
                adj[b].add(a)
        return _reaches(adj, drop[0], drop[1])


def _all_triangles(g: Graph) -> list[tuple[int, int, int]]:
    nb = g.neighbor_sets
    out = set()
    for a, b in g.edges:
        for c in nb[a] & nb[b]:
            out.add(tuple(sorted((a, b, c))))
    return sorted(out)


def generate(spec: GenSpec) -> Instance:
    """Random instance with its planted matching and piece layout."""
    if spec.n <= 2:
        return Instance(Graph(spec.n, [(0, 1)] if spec.n == 2 else []), [0] if spec.n == 2 and spec.plant_pm else [])
    b = _Builder(spec)
    stalls = 0
    while b.n < spec.n and stalls < 50:
        if b.add_piece(spec.n - b.n):
            stalls = 0
        else:
            stalls += 1
    rng = b.rng
    perm = rng.permutation(b.n)
    edges = sorted((int(min(perm[a], perm[c])), int(max(perm[a], perm[c]))) for a, c in b.edges)
    order = rng.permutation(len(edges))
    edges = [edges[i] for i in order]
    weights = caps = None
    if spec.weight_range is not None:
        lo, hi = spec.weight_range
        weights = [int(x) for x in rng.integers(lo, hi + 1, size=len(edges))]
    if spec.capacity_range is not None:
        lo, hi = spec.capacity_range
        caps = [int(x) for x in rng.integers(lo, hi + 1, size=len(edges))]
    g = Graph(b.n, edges, weights, caps)
    planted_pairs = {(int(min(perm[a], perm[c])), int(max(perm[a], perm[c]))) for a, c in b.planted}
    planted = sorted(i for i, e in enumerate(edges) if e in planted_pairs)
    pieces = [tuple(sorted(int(perm[v]) for v in p["verts"])) for p in b.pieces]
    sporadic = [pieces[i] for i, p in enumerate(b.pieces) if p["kind"] in ("k5", "wagner")]
    return Instance(g, planted, pieces, sporadic)


def random_in_family(spec: GenSpec) -> Graph:
    """Connected graph of about ``spec.n`` vertices from the requested family."""
    return generate(spec).graph


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) <= 1
