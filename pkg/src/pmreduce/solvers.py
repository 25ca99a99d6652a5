"""Search procedures for each representation, with uniform trial accounting."""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ExhaustiveLimitError, InvalidParameterError
from .reduction import Assignment, CnfFormula, SubsetSumInstance
from .seeds import substream

SAT_ENUM_LIMIT = 22
BRUTE_FORCE_LIMIT = 24
MITM_LIMIT = 40

PartialAssignment = tuple[Optional[bool], ...]


@dataclass
class TrialLog:
    representation: str
    n: int
    d: int
    seed: int | None
    trials: int
    outcome: str  # found | exhausted
    table_entries: int = 0
    millis: float | None = field(default=None, compare=False)

    def to_json_line(self, timing: bool = True) -> str:
        doc = asdict(self)
        if not timing:
            doc["millis"] = None
        elif doc["millis"] is not None:
            doc["millis"] = round(doc["millis"], 3)
        return json.dumps(doc)


class SizeLimitError(ExhaustiveLimitError):
    def __init__(self, what: str, size: int, limit: int, hint: str = ""):
        super().__init__(what, size, limit)
        if hint:
            self.args = (f"{self.args[0]}; {hint}",)


# SAT

def sat_enumerate(formula: CnfFormula, limit: int = SAT_ENUM_LIMIT) -> list[Assignment]:
    """Every model, in lexicographic order with x1 most significant and False < True."""
    n = formula.var_count
    if n > limit:
        raise SizeLimitError("sat_enumerate", n, limit)
    found: list[Assignment] = []
    total = 1 << n
    chunk = 1 << 16
    shifts = np.array([n - v for v in range(1, n + 1)], dtype=np.int64)
    for start in range(0, total, chunk):
        r = np.arange(start, min(total, start + chunk), dtype=np.int64)
        bits = ((r[:, None] >> shifts[None, :]) & 1).astype(bool)
        ok = np.ones(len(r), dtype=bool)
        for clause in formula.clauses:
            sat = np.zeros(len(r), dtype=bool)
            for lit in clause:
                col = bits[:, abs(lit) - 1]
                sat |= col if lit > 0 else ~col
            ok &= sat
        for row in bits[ok]:
            found.append(tuple(bool(b) for b in row))
    return found


def _occurrences(formula: CnfFormula) -> list[list[int]]:
    occ: list[list[int]] = [[] for _ in range(formula.var_count + 1)]
    for ci, clause in enumerate(formula.clauses):
        for var in {abs(l) for l in clause}:
            occ[var].append(ci)
    return occ


def _propagate(clauses, occ, values: list, pending: list[int] | None) -> bool:
    """Unit propagation in place.  Returns False on conflict.

    ``pending`` lists variables assigned since the last fixpoint; ``None``
    scans every clause first.
    """
    queue = list(range(len(clauses))) if pending is None else [ci for v in pending for ci in occ[v]]
    while queue:
        ci = queue.pop()
        unassigned = None
        free = 0
        satisfied = False
        for lit in set(clauses[ci]):
            val = values[abs(lit) - 1]
            if val is None:
                free += 1
                unassigned = lit
            elif val == (lit > 0):
                satisfied = True
                break
        if satisfied or free > 1:
            continue
        if free == 0:
            return False
        var = abs(unassigned)
        values[var - 1] = unassigned > 0
        queue.extend(occ[var])
    return True


def unit_propagate(formula: CnfFormula,
                   partial: Sequence[Optional[bool]] | None = None) -> tuple[PartialAssignment, str]:
    """Fixpoint of unit propagation; status is ``"stable"`` or ``"conflict"``."""
    values = [None] * formula.var_count if partial is None else list(partial)
    if len(values) != formula.var_count:
        raise InvalidParameterError("partial assignment width differs from var_count")
    ok = _propagate(formula.clauses, _occurrences(formula), values, None)
    return tuple(values), "stable" if ok else "conflict"


def ppsz_solve(formula: CnfFormula, seed: int = 0, max_trials: int = 100_000,
               accept: Callable[[Assignment], bool] | None = None,
               n: int | None = None) -> tuple[Assignment | None, TrialLog]:
    """PPSZ-style randomized search with unit propagation as the inference rule.

    Each trial walks a fresh random variable order; a variable already forced
    by propagation keeps its value, otherwise it gets a fair coin.  ``accept``
    is an optional extra success test applied to complete models (used to
    plant a hidden target in clause-free formulas).
    """
    if max_trials < 1:
        raise InvalidParameterError("max_trials must be at least 1")
    t0 = time.perf_counter()
    rng = substream(seed, "ppsz")
    clauses = formula.clauses
    occ = _occurrences(formula)
    nv = formula.var_count
    order = list(range(1, nv + 1))

    root = [None] * nv
    root_ok = _propagate(clauses, occ, root, None)
    result = None
    trials = 0
    while trials < max_trials:
        trials += 1
        if not root_ok:
            continue
        values = list(root)
        rng.shuffle(order)
        ok = True
        for var in order:
            if values[var - 1] is not None:
                continue
            values[var - 1] = bool(rng.getrandbits(1))
            if not _propagate(clauses, occ, values, [var]):
                ok = False
                break
        if not ok:
            continue
        model = tuple(values)
        if formula.is_satisfied_by(model) and (accept is None or accept(model)):
            result = model
            break
    log = TrialLog("3-SAT (PPSZ-style)", nv if n is None else n, nv, seed, trials,
                   "found" if result is not None else "exhausted", 0,
                   (time.perf_counter() - t0) * 1000)
    return result, log


# Subset Sum

def _item_matrix(ss: SubsetSumInstance) -> np.ndarray:
    return np.array(ss.items, dtype=np.int32).reshape(len(ss.items), ss.width)


def brute_force_subset_sum(ss: SubsetSumInstance, limit: int = BRUTE_FORCE_LIMIT) -> list[tuple[int, ...]]:
    """All item subsets whose column sums equal the target, by exhaustive check.

    Subsets come back as sorted index tuples ordered by their bitmask
    (item i is bit i).
    """
    count = len(ss.items)
    if count > limit:
        raise SizeLimitError("brute_force_subset_sum", count, limit)
    low = min(count, 16)
    high = count - low
    items = _item_matrix(ss)
    target = np.array(ss.target, dtype=np.int32)
    # column sums of every subset of the first `low` items, row index = mask
    low_sums = np.zeros((1 << low, ss.width), dtype=np.int32)
    for i in range(low):
        half = 1 << i
        low_sums[half:2 * half] = low_sums[:half] + items[i]
    found = []
    for hmask in range(1 << high):
        offset = np.zeros(ss.width, dtype=np.int32)
        for i in range(high):
            if hmask >> i & 1:
                offset += items[low + i]
        hits = np.flatnonzero(np.all(low_sums == target - offset, axis=1))
        found.extend(int(h) | (hmask << low) for h in hits)
    found.sort()
    return [tuple(i for i in range(count) if m >> i & 1) for m in found]


def _packed_sums(vectors: Sequence[tuple[int, ...]], shift: int) -> list[int]:
    """Packed column sums of every subset, list index = subset mask."""
    sums = [0]
    for vec in vectors:
        p = 0
        for d in vec:
            p = (p << shift) | d
        sums += [s + p for s in sums]
    return sums


def mitm_subset_sum(ss: SubsetSumInstance, limit: int = MITM_LIMIT,
                    seed: int | None = None) -> tuple[tuple[int, ...] | None, TrialLog]:
    """Horowitz-Sahni split: enumerate both halves, sort, merge.

    Column sums are packed into one integer per subset with enough bits per
    column that no column can overflow into its neighbour, so packed equality
    is digit-exact equality.
    """
    count = len(ss.items)
    if count > limit:
        raise SizeLimitError("mitm_subset_sum", count, limit,
                             "use brute force for small instances or solve the SAT form instead")
    t0 = time.perf_counter()
    split = (count + 1) // 2
    shift = max(count * (ss.base - 1), ss.base - 1).bit_length()
    left = _packed_sums(ss.items[:split], shift)
    right = _packed_sums(ss.items[split:], shift)
    target = _packed_sums([ss.target], shift)[1]

    lkeys = sorted((s, m) for m, s in enumerate(left))
    rkeys = sorted((target - s, m) for m, s in enumerate(right))
    solution = None
    i = j = 0
    while i < len(lkeys) and j < len(rkeys):
        if lkeys[i][0] < rkeys[j][0]:
            i += 1
        elif lkeys[i][0] > rkeys[j][0]:
            j += 1
        else:
            lm, rm = lkeys[i][1], rkeys[j][1]
            solution = tuple([k for k in range(split) if lm >> k & 1]
                             + [split + k for k in range(count - split) if rm >> k & 1])
            break
    if solution is not None and not ss.is_solution(solution):
        raise AssertionError(f"meet-in-the-middle produced a non-solution {solution}")
    log = TrialLog("Subset Sum (meet-in-the-middle)", count, count, seed, 1,
                   "found" if solution is not None else "exhausted", len(left),
                   (time.perf_counter() - t0) * 1000)
    return solution, log


def planted_subset_sum(num_items: int, width: int, seed: int,
                       max_digit: int = 2) -> tuple[SubsetSumInstance, tuple[int, ...]]:
    """Random carry-free instance with a planted nonempty solution.

    Each column receives digits in ``0..max_digit`` while its running total
    stays at most ``base - 1``.
    """
    if num_items < 1 or width < 1:
        raise InvalidParameterError("need at least one item and one column")
    rng = substream(seed, "planted")
    cols = []
    for _ in range(width):
        budget = 9
        col = [0] * num_items
        for i in rng.sample(range(num_items), num_items):
            d = min(rng.randint(0, max_digit), budget)
            col[i] = d
            budget -= d
        cols.append(col)
    items = tuple(tuple(cols[c][i] for c in range(width)) for i in range(num_items))
    size = rng.randint(1, num_items)
    planted = tuple(sorted(rng.sample(range(num_items), size)))
    target = tuple(sum(items[i][c] for i in planted) for c in range(width))
    return SubsetSumInstance(width, items, target), planted


# Complexity formulas

@dataclass(frozen=True)
class ComplexityRow:
    stage: str
    d: int
    time_exponent: float
    space_exponent: float | None
    mechanism: str
    n: int

    @property
    def trials(self) -> float:
        return 2.0 ** (self.time_exponent * self.d)

    @property
    def ratio(self) -> float:
        return self.trials / 2.0 ** self.n

    @property
    def space(self) -> float | None:
        return None if self.space_exponent is None else 2.0 ** (self.space_exponent * self.d)


def sig3(x: float) -> str:
    """Three significant figures; ``3.12e4`` style from 1000 up."""
    if abs(float(f"{x:.3g}")) < 1000:
        return f"{x:.3g}"
    mant, exp = f"{x:.2e}".split("e")
    return f"{mant}e{int(exp)}"


def trial_ratio_table(n: int) -> list[ComplexityRow]:
    """Published exponents evaluated at the nominal dimensions N, 3N, 8N."""
    if n < 1:
        raise InvalidParameterError("N must be at least 1")
    return [
        ComplexityRow("Direct Matrix", n, 1.0, None, "direct witness search", n),
        ComplexityRow("3-SAT (PPSZ-style)", 3 * n, 0.386, None, "clause propagation", n),
        ComplexityRow("Subset Sum (HGJ-style)", 8 * n, 0.311, 0.256, "representation merging", n),
        ComplexityRow("Subset Sum (BBSS-style)", 8 * n, 0.24, 0.222, "hierarchical filtering", n),
    ]
