"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here imports pmreduce internals; each function recomputes its answer
from first principles.
"""
from fractions import Fraction
from itertools import combinations, product
from math import log2


def cofactor_det(m):
    """Laplace expansion along the first row, exact over Fractions."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(m[0][0])
    total = Fraction(0)
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * Fraction(m[0][j]) * cofactor_det(minor)
    return total


def all_minors(m):
    """{mask: det} over all 2^n principal submatrices."""
    n = len(m)
    out = {}
    for mask in range(1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        out[mask] = cofactor_det([[m[i][j] for j in idx] for i in idx])
    return out


def sat_models(var_count, clauses):
    """Models in lexicographic order (x1 most significant, False < True)."""
    out = []
    for bits in product((False, True), repeat=var_count):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            out.append(bits)
    return out


def subset_sum_solutions(items, target):
    """All index subsets with digit-wise sums equal to target, as frozensets."""
    width = len(target)
    out = set()
    for r in range(len(items) + 1):
        for combo in combinations(range(len(items)), r):
            if all(sum(items[i][c] for i in combo) == target[c] for c in range(width)):
                out.add(frozenset(combo))
    return out


def mutual_information(joint):
    """I(X;Y) in bits from a dict {(x, y): p}."""
    px, py = {}, {}
    for (x, y), p in joint.items():
        px[x] = px.get(x, 0.0) + p
        py[y] = py.get(y, 0.0) + p
    return sum(p * log2(p / (px[x] * py[y])) for (x, y), p in joint.items() if p > 0)
