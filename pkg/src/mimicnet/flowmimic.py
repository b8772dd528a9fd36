"""Flow-mimicking networks: collapse a capacitated graph onto its terminal cuts.

For every nontrivial bipartition of the terminals take the minimum cut
with the smallest source side; vertices lying on the same side of all
these cuts are merged.  The merged network has the same minimum cut value
for every terminal bipartition.

Networks built here remember how they were made (:class:`FlowRecord`), so
a flow on the small network can be pushed back down to the original
edges with :func:`expand_flow`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .errors import MissingCapacities, TooManyTerminals
from .flowalgo import feasible_flow, min_cut_side
from .graph import Graph
from .oracle import bipartition_masks

MAX_TERMINALS = 6


@dataclass
class FlowMimick:
    """Capacitated network whose local vertex ``i < k`` is terminal ``terminals[i]``."""

    graph: Graph
    terminals: tuple[Hashable, ...]
    external_cuts: dict[int, int]
    record: "FlowRecord | None" = field(default=None, repr=False, compare=False)

    @property
    def k(self) -> int:
        return len(self.terminals)


@dataclass
class FlowRecord:
    """How a mimick was produced: the uncollapsed union of its parts.

    ``union`` has terminals ``0..k-1`` like the mimick.  Each part is
    ``("edges", eids, local_ends)`` for original edges (``local_ends[j]``
    are the union vertices of edge ``eids[j]``, which is union edge
    ``offset + j``) or ``("net", FlowMimick, vertex_map, offset)`` for a
    sub-network whose edges occupy union edges from ``offset`` on.
    """

    union: Graph
    parts: list = field(default_factory=list)


def external_cuts(g: Graph, k: int) -> dict[int, int]:
    """Min cut of every terminal bipartition, terminals being vertices ``0..k-1``."""
    if g.capacities is None:
        raise MissingCapacities("the network has no capacities")
    out = {}
    for mask in bipartition_masks(k):
        src = [i for i in range(k) if mask >> i & 1]
        snk = [i for i in range(k) if not mask >> i & 1]
        out[mask], _ = min_cut_side(g.n, g.edges, g.capacities, src, snk)
    return out


def _collapse(g: Graph, k: int) -> tuple[Graph, dict[int, int], list[int]]:
    """Merge vertices by their sides across all terminal cuts.

    Returns the collapsed network, the cut values, and the class of every
    vertex of ``g``.  Terminal ``i`` stays vertex ``i``.
    """
    sides = []
    cuts = {}
    for mask in bipartition_masks(k):
        src = [i for i in range(k) if mask >> i & 1]
        snk = [i for i in range(k) if not mask >> i & 1]
        cuts[mask], side = min_cut_side(g.n, g.edges, g.capacities, src, snk)
        sides.append(side)
    sig = [tuple(v in s for s in sides) for v in range(g.n)]
    cls: dict[tuple, int] = {}
    for i in range(k):
        cls.setdefault(sig[i], i)
    cid = []
    for v in range(g.n):
        if sig[v] not in cls:
            cls[sig[v]] = len(cls)
        cid.append(cls[sig[v]])
    merged: dict[tuple[int, int], int] = {}
    for (u, v), c in zip(g.edges, g.capacities):
        a, b = cid[u], cid[v]
        if a == b or c == 0:
            continue
        key = (min(a, b), max(a, b))
        merged[key] = merged.get(key, 0) + c
    keys = sorted(merged)
    return Graph(len(cls), keys, None, [merged[e] for e in keys]), cuts, cid


def flow_mimick(g: Graph, T: Sequence[int]) -> FlowMimick:
    """Collapse ``g`` onto terminals ``T`` (vertex ids of ``g``)."""
    if g.capacities is None:
        raise MissingCapacities("the network has no capacities")
    if len(T) > MAX_TERMINALS:
        raise TooManyTerminals(f"{len(T)} terminals; at most {MAX_TERMINALS} are supported")
    if len(set(T)) != len(T):
        raise ValueError("terminals must be distinct")
    # renumber so the terminals come first
    order = list(T) + [v for v in range(g.n) if v not in set(T)]
    pos = {v: i for i, v in enumerate(order)}
    h = Graph(g.n, [(pos[u], pos[v]) for u, v in g.edges], None, list(g.capacities))
    small, cuts, _ = _collapse(h, len(T))
    return FlowMimick(small, tuple(T), cuts)


def _union(parts: Sequence[tuple], terminals: Sequence[Hashable]) -> tuple[Graph, list]:
    """Glue labelled pieces; ``parts`` are ``("edges", eids, ends, caps)`` or ``("net", FlowMimick)``.

    Vertices with equal labels are identified; result terminal ``i`` is
    local vertex ``i``.
    """
    label_id: dict[Hashable, int] = {t: i for i, t in enumerate(terminals)}
    if len(label_id) != len(terminals):
        raise ValueError("terminals must be distinct")
    nxt = len(terminals)

    def vid(label: Hashable) -> int:
        nonlocal nxt
        if label not in label_id:
            label_id[label] = nxt
            nxt += 1
        return label_id[label]

    edges: list[tuple[int, int]] = []
    caps: list[int] = []
    rec_parts = []
    fresh = 0
    for part in parts:
        if part[0] == "edges":
            _, eids, ends, pcaps = part
            local = [(vid(a), vid(b)) for a, b in ends]
            rec_parts.append(("edges", tuple(eids), local, len(edges)))
            edges.extend(local)
            caps.extend(pcaps)
        else:
            net: FlowMimick = part[1]
            vmap = []
            for v in range(net.graph.n):
                if v < net.k:
                    vmap.append(vid(net.terminals[v]))
                else:
                    vmap.append(vid(("inner", fresh)))
                    fresh += 1
            rec_parts.append(("net", net, vmap, len(edges)))
            edges.extend((vmap[a], vmap[b]) for a, b in net.graph.edges)
            caps.extend(net.graph.capacities)
    return Graph(nxt, edges, None, caps), rec_parts


def mimick_parts(parts: Sequence[tuple], terminals: Sequence[Hashable]) -> FlowMimick:
    """Union of labelled parts collapsed onto ``terminals``; keeps a record for expansion."""
    if len(terminals) > MAX_TERMINALS:
        raise TooManyTerminals(f"{len(terminals)} terminals; at most {MAX_TERMINALS} are supported")
    union, rec_parts = _union(parts, terminals)
    small, cuts, _ = _collapse(union, len(terminals))
    return FlowMimick(small, tuple(terminals), cuts, FlowRecord(union, rec_parts))


def combine(
    m1: FlowMimick,
    m2: FlowMimick,
    shared: Sequence[Hashable],
    terminals: Sequence[Hashable] | None = None,
) -> FlowMimick:
    """Glue two mimicks on their ``shared`` terminals and collapse the union.

    The result's terminals default to every terminal of either network
    that is not shared.
    """
    common = set(m1.terminals) & set(m2.terminals)
    if set(shared) != common:
        raise ValueError("shared vertices must be exactly the common terminals")
    if terminals is None:
        terminals = [t for t in (*m1.terminals, *m2.terminals) if t not in common]
    if len(terminals) > MAX_TERMINALS:
        raise TooManyTerminals(f"{len(terminals)} terminals; at most {MAX_TERMINALS} are supported")
    return mimick_parts([("net", m1), ("net", m2)], terminals)


def planar_flow_mimick3(g: Graph, T: Sequence[int]) -> FlowMimick:
    """Three-terminal mimick drawable with all terminals on one face.

    Uses the collapsed network when it already has that property and a
    star with one centre otherwise; the star realizes any three cut values
    because each is at most the sum of the other two.
    """
    from .mimic_matching import outerplanar_embedding

    if len(T) != 3:
        raise ValueError("exactly three terminals expected")
    m = flow_mimick(g, T)
    if outerplanar_embedding(m.graph, [0, 1, 2]) is not None:
        return m
    c = [m.external_cuts[mask] for mask in (0b001, 0b011, 0b101)]
    # cut({0}) = c0, cut({0,1}) = cut({2}), cut({0,2}) = cut({1})
    single = [c[0], c[2], c[1]]
    star = Graph(4, [(0, 3), (1, 3), (2, 3)], None, single)
    return FlowMimick(star, tuple(T), external_cuts(star, 3))


# ---------------------------------------------------------------------------
# pushing flows back down
# ---------------------------------------------------------------------------


def expand_flow(m: FlowMimick, demand: Mapping[Hashable, int], out: dict[int, int]) -> None:
    """Turn terminal demands on ``m`` into flows on original edges, written to ``out``.

    ``demand[t]`` is the net flow leaving terminal ``t`` into the network.
    Raises ``AssertionError`` if the record cannot carry the demands.
    """
    rec = m.record
    if rec is None:
        raise ValueError("mimick has no record to expand")
    u = rec.union
    dem = {i: demand.get(t, 0) for i, t in enumerate(m.terminals)}
    flows = feasible_flow(list(range(u.n)), [(a, b, c) for (a, b), c in zip(u.edges, u.capacities)], dem)
    if flows is None:  # pragma: no cover - cut preservation makes this feasible
        raise AssertionError("terminal demands are infeasible in the recorded union")
    for part in rec.parts:
        if part[0] == "edges":
            _, eids, local, off = part
            for j, e in enumerate(eids):
                out[e] = out.get(e, 0) + flows[off + j]
        else:
            _, net, vmap, off = part
            sub: dict[Hashable, int] = {}
            for j, (a, b) in enumerate(net.graph.edges):
                f = flows[off + j]
                if a < net.k:
                    sub[net.terminals[a]] = sub.get(net.terminals[a], 0) + f
                if b < net.k:
                    sub[net.terminals[b]] = sub.get(net.terminals[b], 0) - f
            if any(sub.values()):
                expand_flow(net, sub, out)
