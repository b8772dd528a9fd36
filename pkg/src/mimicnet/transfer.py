"""Transfer matrices over the Boolean and (min, +) semirings.

A node with leafward side ``L`` and rootward side ``U`` gets a matrix whose
row ``X`` is the set of ``L`` vertices already covered by nodes below it
and whose column ``Y`` is the set of ``U`` vertices covered by it or by
nodes below.  Entry ``(X, Y)`` says whether (or how cheaply) the node's own
subgraph can cover

* every vertex that belongs to neither side,
* every vertex of ``L`` outside ``U`` and outside ``X``,
* the vertices of ``Y`` not already in ``X``,

and nothing else.  A vertex in both sides that is covered below must stay
covered, so entries with ``X & U`` not inside ``Y`` are empty.  Under this
convention the matrices of consecutive nodes multiply directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import DimensionMismatch

BOOLEAN = "boolean"
TROPICAL = "tropical"
INF = float("inf")


def zero(semiring: str):
    return False if semiring == BOOLEAN else INF


def one(semiring: str):
    return True if semiring == BOOLEAN else 0


def is_zero(value, semiring: str) -> bool:
    return value is False if semiring == BOOLEAN else value == INF


@dataclass
class TransferMatrix:
    row_side: tuple[int, ...]
    rows: tuple[int, ...]  # masks over row_side
    col_side: tuple[int, ...]
    cols: tuple[int, ...]  # masks over col_side
    entries: list[list]
    semiring: str = BOOLEAN
    witness: list[list[int | None]] | None = None  # middle index per entry, for products
    left: "TransferMatrix | None" = field(default=None, repr=False)
    right: "TransferMatrix | None" = field(default=None, repr=False)
    leaf: int | None = None  # position in the multiplied list, for factors

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def entry(self, row_mask: int, col_mask: int):
        return self.entries[self.rows.index(row_mask)][self.cols.index(col_mask)]

    def row_vector(self) -> dict[int, object]:
        if len(self.rows) != 1:
            raise DimensionMismatch("not a row vector")
        return dict(zip(self.cols, self.entries[0]))


def side_masks(side: Sequence[int], parity: int | None) -> tuple[int, ...]:
    """Subsets of ``side`` (as masks), optionally only those of one parity."""
    out = []
    for m in range(1 << len(side)):
        if parity is None or bin(m).count("1") % 2 == parity % 2:
            out.append(m)
    return tuple(out)


def cover_set(
    interior: Sequence[int],
    lo: Sequence[int],
    hi: Sequence[int],
    row: int,
    col: int,
) -> list[int] | None:
    """Vertices the node itself must cover for entry ``(row, col)``, or ``None`` if impossible."""
    X = {v for i, v in enumerate(lo) if row >> i & 1}
    Y = {v for i, v in enumerate(hi) if col >> i & 1}
    U = set(hi)
    if not (X & U) <= Y:
        return None
    cover = list(interior)
    for v in lo:
        if v not in U and v not in X:
            cover.append(v)
    for v in hi:
        if v in Y and v not in X:
            cover.append(v)
    return cover


def transfer_matrix(
    solve: Callable[[list[int]], object],
    interior: Sequence[int],
    lo: Sequence[int],
    hi: Sequence[int],
    semiring: str = BOOLEAN,
    row_parity: int | None = None,
    col_parity: int | None = None,
) -> TransferMatrix:
    """Matrix of a node given a cover solver.

    ``solve(cover)`` returns ``True``/``False`` (Boolean) or a weight or
    ``INF`` (tropical) for a matching of the node subgraph covering
    exactly ``cover``.
    """
    lo, hi = tuple(lo), tuple(hi)
    rows = side_masks(lo, row_parity)
    cols = side_masks(hi, col_parity)
    z = zero(semiring)
    entries = []
    for r in rows:
        line = []
        for c in cols:
            cover = cover_set(interior, lo, hi, r, c)
            line.append(z if cover is None or len(cover) % 2 else solve(cover))
        entries.append(line)
    return TransferMatrix(lo, rows, hi, cols, entries, semiring)


def multiply(a: TransferMatrix, b: TransferMatrix) -> TransferMatrix:
    """Product with the least middle index recorded per nonzero entry."""
    if a.semiring != b.semiring:
        raise DimensionMismatch("semirings differ")
    if a.col_side != b.row_side or a.cols != b.rows:
        raise DimensionMismatch(
            f"cannot multiply {a.shape} by {b.shape}: inner indices differ"
        )
    sr = a.semiring
    entries, wit = [], []
    for i in range(len(a.rows)):
        line, wline = [], []
        for j in range(len(b.cols)):
            best, arg = zero(sr), None
            for k in range(len(a.cols)):
                x, y = a.entries[i][k], b.entries[k][j]
                if sr == BOOLEAN:
                    if x and y:
                        best, arg = True, k
                        break
                else:
                    v = x + y
                    if v < best:
                        best, arg = v, k
            line.append(best)
            wline.append(arg)
        entries.append(line)
        wit.append(wline)
    return TransferMatrix(a.row_side, a.rows, b.col_side, b.cols, entries, sr, wit, a, b)


def semiring_product(matrices: Sequence[TransferMatrix], semiring: str | None = None) -> TransferMatrix:
    """Balanced-tree product of ``matrices`` in the given order.

    Factors are tagged with their position so :func:`trace` can map an
    entry of the product back to one entry per factor.
    """
    if not matrices:
        raise DimensionMismatch("empty product")
    if semiring is not None and any(m.semiring != semiring for m in matrices):
        raise DimensionMismatch("semiring mismatch")
    for i, m in enumerate(matrices):
        m.leaf = i

    def build(lo: int, hi: int) -> TransferMatrix:
        if hi - lo == 1:
            return matrices[lo]
        mid = (lo + hi + 1) // 2
        return multiply(build(lo, mid), build(mid, hi))

    return build(0, len(matrices))


def left_fold_product(matrices: Sequence[TransferMatrix]) -> TransferMatrix:
    acc = matrices[0]
    for m in matrices[1:]:
        acc = multiply(acc, m)
    return acc


def trace(product: TransferMatrix, row: int, col: int) -> dict[int, tuple[int, int]]:
    """Factor entries ``(row index, col index)`` that produced a nonzero product entry."""
    out: dict[int, tuple[int, int]] = {}
    stack = [(product, row, col)]
    while stack:
        m, i, j = stack.pop()
        if m.left is None:
            out[m.leaf] = (i, j)
            continue
        k = m.witness[i][j]
        if k is None:
            raise ValueError("entry has no witness")
        stack.append((m.left, i, k))
        stack.append((m.right, k, j))
    return out
