"""Listing minimal separators of size at most three.

For each removed set ``R`` of zero, one or two vertices, one depth-first
search of ``G - R`` finds every vertex ``c`` such that ``R + {c}`` leaves at
least two components adjacent to all of ``R + {c}``.  Those components are
read off the search tree: the subtree of a child ``w`` of ``c`` is a
component of ``G - R - c`` exactly when ``low[w] >= disc[c]``, and the rest
of the search component (when ``c`` is not the root) is one more.  Counting
neighbours of ``R`` inside a subtree is a difference of prefix sums over
preorder positions.

The kernel is compiled with numba when it is available; the same code runs
as plain Python otherwise.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def _scan(indptr, indices, n, a, b, out, count, work):
    """Append every ``c`` making ``{a, b, c}`` (``-1`` = absent) a minimal separator.

    Only ``c`` greater than both removed vertices is reported so each set
    is produced once.  Returns the new length of ``out``.  ``work`` is a
    scratch array of shape ``(15, n + 1)``.
    """
    removed = work[0]
    need_a, need_b = work[1], work[2]
    disc, low, parent, size, order = work[3], work[4], work[5], work[6], work[7]
    pref_a, pref_b = work[8], work[9]
    stack, edge_pos = work[10], work[11]
    sep_a, sep_b, full = work[12], work[13], work[14]
    removed[:] = 0
    need_a[:] = 0
    need_b[:] = 0
    disc[:] = -1
    parent[:] = -1
    size[:] = 1
    if a >= 0:
        removed[a] = 1
        for k in range(indptr[a], indptr[a + 1]):
            need_a[indices[k]] = 1
    else:
        need_a[:] = 1
    if b >= 0:
        removed[b] = 1
        for k in range(indptr[b], indptr[b + 1]):
            need_b[indices[k]] = 1
    else:
        need_b[:] = 1
    lo_bound = max(a, b)
    pref_a[0] = 0
    pref_b[0] = 0
    t = 0
    for root in range(n):
        if removed[root] or disc[root] >= 0:
            continue
        start = t
        disc[root] = t
        low[root] = t
        order[t] = root
        t += 1
        top = 0
        stack[0] = root
        edge_pos[root] = indptr[root]
        while top >= 0:
            v = stack[top]
            if edge_pos[v] < indptr[v + 1]:
                w = indices[edge_pos[v]]
                edge_pos[v] += 1
                if removed[w]:
                    continue
                if disc[w] < 0:
                    parent[w] = v
                    disc[w] = t
                    low[w] = t
                    order[t] = w
                    t += 1
                    edge_pos[w] = indptr[w]
                    top += 1
                    stack[top] = w
                elif w != parent[v] and disc[w] < low[v]:
                    low[v] = disc[w]
            else:
                top -= 1
                p = parent[v]
                if p >= 0:
                    size[p] += size[v]
                    if low[v] < low[p]:
                        low[p] = low[v]
        # prefix sums of neighbours of a and b over this component's preorder
        for i in range(start, t):
            pref_a[i + 1] = pref_a[i] + need_a[order[i]]
            pref_b[i + 1] = pref_b[i] + need_b[order[i]]
        tot_a = pref_a[t] - pref_a[start]
        tot_b = pref_b[t] - pref_b[start]
        for i in range(start, t):
            v = order[i]
            sep_a[v] = 0
            sep_b[v] = 0
            full[v] = 0
        for i in range(start + 1, t):
            w = order[i]
            p = parent[w]
            if low[w] >= disc[p]:
                lo, hi = disc[w], disc[w] + size[w]
                ca = pref_a[hi] - pref_a[lo]
                cb = pref_b[hi] - pref_b[lo]
                sep_a[p] += ca
                sep_b[p] += cb
                if ca > 0 and cb > 0:
                    full[p] += 1
        for i in range(start, t):
            c = order[i]
            if c <= lo_bound:
                continue
            f = full[c]
            if c != root:
                ra = tot_a - need_a[c] - sep_a[c]
                rb = tot_b - need_b[c] - sep_b[c]
                if ra > 0 and rb > 0:
                    f += 1
            if f >= 2:
                out[count] = c
                count += 1
    return count


@njit(cache=True)
def _all_separators(indptr, indices, n, max_size):
    """Rows ``(a, b, c)``: removed vertices (``-1`` when absent) and the found ``c``."""
    pairs = [(-1, -1)]
    if max_size >= 2:
        for a in range(n):
            pairs.append((a, -1))
    if max_size >= 3:
        for a in range(n):
            for b in range(a + 1, n):
                pairs.append((a, b))
    cap = 4 * n + 16
    rows = -np.ones((cap, 3), np.int64)
    m = 0
    buf = np.zeros(n, np.int64)
    work = np.zeros((15, n + 1), np.int64)
    for a, b in pairs:
        k = _scan(indptr, indices, n, a, b, buf, 0, work)
        for j in range(k):
            if m == cap:
                grown = -np.ones((2 * cap, 3), np.int64)
                grown[:cap] = rows
                rows = grown
                cap *= 2
            rows[m, 0] = a
            rows[m, 1] = b
            rows[m, 2] = buf[j]
            m += 1
    return rows[:m]


def minimal_separators_csr(indptr: np.ndarray, indices: np.ndarray, n: int, max_size: int = 3) -> list[tuple[int, ...]]:
    """Minimal separators of size ``1..max_size`` of the graph in CSR form."""
    if n == 0:
        return []
    rows = _all_separators(indptr.astype(np.int64), indices.astype(np.int64), n, max_size)
    out = [tuple(int(x) for x in row if x >= 0) for row in rows]
    return sorted(out, key=lambda S: (len(S), S))
