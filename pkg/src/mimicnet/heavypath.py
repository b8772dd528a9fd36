"""Heavy path decomposition of rooted trees, with path ranks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass
class HeavyPathDecomposition:
    paths: list[list[int]]  # each path listed top (rootward) to bottom (leafward)
    rank: list[int]
    parent_path: list[int | None]
    path_of: dict[int, int]
    descend_count: dict[int, int]

    def ranks_in_order(self) -> list[int]:
        return sorted(set(self.rank))

    def paths_with_rank(self, r: int) -> list[int]:
        return [i for i, x in enumerate(self.rank) if x == r]


def _floor_log2(k: int) -> int:
    return k.bit_length() - 1


def _preorder(children: Sequence[Sequence[int]], roots: Sequence[int]) -> list[int]:
    order = []
    stack = list(reversed(roots))
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(children[v]))
    return order


def descendant_counts(
    children: Sequence[Sequence[int]],
    root: int | Sequence[int],
    weight: Sequence[int] | None = None,
) -> dict[int, int]:
    """Number of descendants of every node reachable from ``root``, counting itself.

    With ``weight`` each node contributes its weight instead of one.
    """
    roots = [root] if isinstance(root, int) else list(root)
    order = _preorder(children, roots)
    count: dict[int, int] = {}
    for v in reversed(order):
        count[v] = (1 if weight is None else weight[v]) + sum(count[c] for c in children[v])
    return count


def heavy_path_decomposition(
    children: Sequence[Sequence[int]],
    root: int | Sequence[int],
    weight: Sequence[int] | None = None,
) -> HeavyPathDecomposition:
    """Split the tree (or forest) below ``root`` into heavy paths.

    At every internal node the child with the largest descendant count
    continues the path; ties go to the smallest node id.  Paths are
    numbered in preorder of their top nodes.
    """
    roots = [root] if isinstance(root, int) else list(root)
    count = descendant_counts(children, roots, weight)
    heavy: dict[int, int] = {}
    for v in count:
        if children[v]:
            heavy[v] = min(children[v], key=lambda c: (-count[c], c))
    paths: list[list[int]] = []
    rank: list[int] = []
    parent_path: list[int | None] = []
    path_of: dict[int, int] = {}
    for v in _preorder(children, roots):
        if v in path_of:
            continue
        pid = len(paths)
        path = [v]
        while path[-1] in heavy:
            path.append(heavy[path[-1]])
        for x in path:
            path_of[x] = pid
        paths.append(path)
        rank.append(_floor_log2(max(count[v], 1)))
        parent_path.append(None)
    parent_of = {c: v for v in count for c in children[v]}
    for pid, path in enumerate(paths):
        top = path[0]
        if top in parent_of:
            parent_path[pid] = path_of[parent_of[top]]
    return HeavyPathDecomposition(paths, rank, parent_path, path_of, count)


def check_decomposition(
    children: Sequence[Sequence[int]], root: int, hpd: HeavyPathDecomposition
) -> list[str]:
    """Violated invariants of ``hpd`` (empty when all hold)."""
    problems = []
    nodes = list(descendant_counts(children, root))
    seen: dict[int, int] = {}
    for pid, path in enumerate(hpd.paths):
        for v in path:
            if v in seen:
                problems.append(f"node {v} lies on paths {seen[v]} and {pid}")
            seen[v] = pid
        for a, b in zip(path, path[1:]):
            if b not in children[a]:
                problems.append(f"path {pid} is not a downward path at {a}->{b}")
    if set(seen) != set(nodes):
        problems.append("paths do not cover the tree")
    n = len(nodes)
    for pid, path in enumerate(hpd.paths):
        expect = _floor_log2(hpd.descend_count[path[0]])
        if hpd.rank[pid] != expect:
            problems.append(f"path {pid} has rank {hpd.rank[pid]}, expected {expect}")
        if not 0 <= hpd.rank[pid] <= _floor_log2(n):
            problems.append(f"path {pid} rank out of range")
        pp = hpd.parent_path[pid]
        if pp is not None and hpd.rank[pid] >= hpd.rank[pp]:
            problems.append(f"path {pid} rank does not drop below its parent path {pp}")
    return problems
