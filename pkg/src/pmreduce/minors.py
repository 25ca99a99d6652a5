"""Exact integer determinants and principal-minor enumeration.

Everything here works on integer matrices (lists of lists of ``int``).  Callers
holding rational matrices clear denominators first; since the scale factor is
positive, signs are unaffected.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Iterator, Sequence

IntMatrix = Sequence[Sequence[int]]


def bareiss_det(matrix: IntMatrix) -> int:
    """Fraction-free Gaussian elimination; exact for integer input.

    Row swaps handle zero pivots.  The empty matrix has determinant 1.
    """
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            aik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - aik * row_k[j]) // prev
        prev = pivot
    return sign * a[n - 1][n - 1]


def submatrix(matrix: IntMatrix, indices: Sequence[int]) -> list[list[int]]:
    return [[matrix[i][j] for j in indices] for i in indices]


def iter_principal_minors(matrix: IntMatrix) -> Iterator[tuple[int, int]]:
    """Yield ``(mask, det)`` for every principal minor, empty subset included.

    Subsets are grown one index at a time in increasing index order and the
    Bareiss elimination is carried along the search tree: after pivoting on
    S, the reduced diagonal entry at j is det(M[S+j]).  Each node therefore
    costs O(r^2) for r remaining indices instead of a fresh O(|S|^3).

    A zero minor cannot serve as the next divisor; its subtree falls back to
    :func:`bareiss_det` per subset.
    """
    n = len(matrix)
    full = [list(row) for row in matrix]
    yield 0, 1
    for j in range(n):
        rest = list(range(j + 1, n))
        yield from _descend(full, j, rest, 0, 1,
                            [full[j][j]] + [full[j][l] for l in rest],
                            [[full[i][j]] + [full[i][l] for l in rest] for i in rest])


def _descend(full, j, rest, mask, prev, pivot_row, rows):
    # pivot_row: reduced row of the new pivot j over [j] + rest
    # rows: reduced rows of indices in `rest`, over columns [j] + rest
    det = pivot_row[0]
    mask |= 1 << j
    yield mask, det
    if not rest:
        return
    if det == 0:
        members = [i for i in range(len(full)) if mask >> i & 1]
        for size in range(1, len(rest) + 1):
            for extra in combinations(rest, size):
                m = mask
                for e in extra:
                    m |= 1 << e
                yield m, bareiss_det(submatrix(full, members + list(extra)))
        return
    r = len(rest)
    reduced = []
    for a in range(r):
        row = rows[a]
        lead = row[0]
        reduced.append([(det * row[b + 1] - lead * pivot_row[b + 1]) // prev for b in range(r)])
    for a in range(r):
        yield from _descend(full, rest[a], rest[a + 1:], mask, det,
                            reduced[a][a:],
                            [reduced[c][a:] for c in range(a + 1, r)])


def _prefix_subtree(matrix: IntMatrix, j: int, l: int | None) -> Iterator[tuple[int, int]]:
    """Minors of {j} alone (``l is None``) or of every subset whose two smallest indices are j < l."""
    full = [list(row) for row in matrix]
    n = len(full)
    if l is None:
        yield 1 << j, full[j][j]
        return
    pivot = full[j][j]
    rest = list(range(l + 1, n))
    if pivot == 0:
        head = [j, l]
        yield (1 << j) | (1 << l), bareiss_det(submatrix(full, head))
        for size in range(1, len(rest) + 1):
            for extra in combinations(rest, size):
                m = (1 << j) | (1 << l)
                for e in extra:
                    m |= 1 << e
                yield m, bareiss_det(submatrix(full, head + list(extra)))
        return
    cols = [l] + rest
    red = lambda i, c: pivot * full[i][c] - full[i][j] * full[j][c]
    yield from _descend(full, l, rest, 1 << j, pivot,
                        [red(l, c) for c in cols],
                        [[red(i, c) for c in cols] for i in rest])


def _nonpositive_from(args) -> list[int]:
    matrix, j, l = args
    return [m for m, d in _prefix_subtree(matrix, j, l) if d <= 0]


def nonpositive_minor_masks(matrix: IntMatrix, jobs: int = 1) -> list[int]:
    """Masks of all nonempty subsets with det <= 0, sorted ascending.

    ``jobs > 1`` splits the search tree by the two smallest indices across
    processes; the result does not depend on ``jobs``.
    """
    n = len(matrix)
    if jobs <= 1 or n < 3:
        found = [m for m, d in iter_principal_minors(matrix) if d <= 0]
    else:
        plain = [list(row) for row in matrix]
        units = [(plain, j, None) for j in range(n)]
        units += [(plain, j, l) for j in range(n) for l in range(j + 1, n)]
        # largest subtrees first
        units.sort(key=lambda u: -1 if u[2] is None else u[2])
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            found = [m for part in pool.map(_nonpositive_from, units, chunksize=4) for m in part]
    return sorted(found)
