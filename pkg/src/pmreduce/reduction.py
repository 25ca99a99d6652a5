"""P-matrix violation -> 3-SAT -> Subset Sum, with decoders and size accounting.

Variables are 1-based signed integers (DIMACS convention).  Assignments are
tuples of bools where position ``i`` holds variable ``i + 1``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DecodeError, DimensionMismatchError, FormatError, MissingWitnessError, TautologyError
from .instance import PMatrixInstance, SubsetMask

SUBSET_SUM_VERSION = 1
VARMAP_VERSION = 1
BASE = 10

Clause = tuple[int, int, int]
Assignment = tuple[bool, ...]


@dataclass(frozen=True)
class CnfFormula:
    var_count: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.var_count < 0:
            raise ValueError("var_count must be non-negative")
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} does not have exactly 3 literal slots")
            for lit in c:
                if lit == 0 or abs(lit) > self.var_count:
                    raise ValueError(f"literal {lit} outside 1..{self.var_count}")

    @classmethod
    def from_clauses(cls, var_count: int, clauses: Iterable[Sequence[int]]) -> "CnfFormula":
        """Pad short clauses to width 3 by repeating their last literal."""
        padded = []
        for c in clauses:
            c = list(c)
            if not c or len(c) > 3:
                raise ValueError(f"cannot pad clause {c} to width 3")
            padded.append(tuple(c + [c[-1]] * (3 - len(c))))
        return cls(var_count, tuple(padded))

    def is_satisfied_by(self, assignment: Sequence[bool]) -> bool:
        if len(assignment) != self.var_count:
            raise DimensionMismatchError(
                f"assignment has {len(assignment)} values, formula has {self.var_count} variables")
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)


@dataclass(frozen=True)
class VarMap:
    """Variable blocks of the witness-aware encoding: x, a (match), b (chain)."""

    n: int

    @property
    def witness_vars(self) -> range:
        return range(1, self.n + 1)

    @property
    def aux_match(self) -> range:
        return range(self.n + 1, 2 * self.n + 1)

    @property
    def aux_chain(self) -> range:
        return range(2 * self.n + 1, 3 * self.n + 1)

    @property
    def aux_count(self) -> int:
        return 2 * self.n

    def to_dict(self) -> dict:
        return {
            "version": VARMAP_VERSION,
            "n": self.n,
            "witness_vars": [self.witness_vars.start, self.witness_vars.stop - 1],
            "aux_match": [self.aux_match.start, self.aux_match.stop - 1],
            "aux_chain": [self.aux_chain.start, self.aux_chain.stop - 1],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VarMap":
        try:
            vm = cls(int(doc["n"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed variable map: {exc}") from exc
        if doc.get("witness_vars", [1, vm.n]) != [1, vm.n]:
            raise FormatError("variable map blocks are inconsistent with n")
        return vm


def encode_sat(instance: PMatrixInstance) -> tuple[CnfFormula, VarMap]:
    """Witness-aware 3-CNF over 3N variables with a single model.

    With ``L_i = x_i`` for witness indices and ``~x_i`` otherwise, the clauses
    state ``a_i <-> L_i``, ``b_1 <-> a_1``, ``b_i <-> (b_{i-1} & a_i)`` and
    the unit ``b_N``.  Two-literal clauses repeat their last literal.
    """
    if instance.witness is None:
        raise MissingWitnessError(
            "the SAT encoding is solution-aware and needs the instance witness; got a redacted instance")
    n = instance.n
    vm = VarMap(n)
    x = lambda i: i + 1
    a = lambda i: n + i + 1
    b = lambda i: 2 * n + i + 1
    clauses: list[Clause] = []
    for i in range(n):
        lit = x(i) if i in instance.witness else -x(i)
        clauses.append((-a(i), lit, lit))
        clauses.append((a(i), -lit, -lit))
        if i == 0:
            clauses.append((-b(0), a(0), a(0)))
            clauses.append((b(0), -a(0), -a(0)))
        else:
            clauses.append((-b(i), b(i - 1), b(i - 1)))
            clauses.append((-b(i), a(i), a(i)))
            clauses.append((b(i), -b(i - 1), -a(i)))
    clauses.append((b(n - 1),) * 3)
    return CnfFormula(3 * n, tuple(clauses)), vm


def decode_sat_solution(assignment: Sequence[bool], varmap: VarMap) -> SubsetMask:
    if len(assignment) < 3 * varmap.n:
        raise DimensionMismatchError("assignment does not cover all encoded variables")
    return SubsetMask.from_indices((v - 1 for v in varmap.witness_vars if assignment[v - 1]), varmap.n)


# Subset Sum

@dataclass(frozen=True)
class ItemLabel:
    kind: str  # variable-true | variable-false | slack-1 | slack-2 | item
    index: int  # 1-based variable or clause index

    KINDS = ("variable-true", "variable-false", "slack-1", "slack-2", "item")

    def __str__(self) -> str:
        return f"{self.kind}:{self.index}"

    @classmethod
    def parse(cls, text: str) -> "ItemLabel":
        kind, _, index = text.rpartition(":")
        if kind not in cls.KINDS or not index.isdigit():
            raise FormatError(f"bad item label {text!r}")
        return cls(kind, int(index))


@dataclass(frozen=True)
class SubsetSumInstance:
    """Digit-vector Subset Sum, most significant digit first, no carries."""

    width: int
    items: tuple[tuple[int, ...], ...]
    target: tuple[int, ...]
    labels: tuple[ItemLabel, ...] = ()
    base: int = BASE

    def __post_init__(self):
        if len(self.target) != self.width or any(len(it) != self.width for it in self.items):
            raise DimensionMismatchError("all digit vectors must have length `width`")
        if self.labels and len(self.labels) != len(self.items):
            raise DimensionMismatchError("one label per item")
        for vec in (*self.items, self.target):
            if any(not 0 <= d < self.base for d in vec):
                raise ValueError(f"digit outside 0..{self.base - 1} in {vec}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(ItemLabel("item", i + 1) for i in range(len(self.items))))

    def __len__(self) -> int:
        return len(self.items)

    def column_sums(self, chosen: Iterable[int] | None = None) -> tuple[int, ...]:
        idx = range(len(self.items)) if chosen is None else chosen
        sums = [0] * self.width
        for i in idx:
            for c, d in enumerate(self.items[i]):
                sums[c] += d
        return tuple(sums)

    def is_carry_free(self) -> bool:
        return all(s < self.base for s in self.column_sums())

    def is_solution(self, chosen: Iterable[int]) -> bool:
        """Digit-exact comparison of column sums with the target."""
        return self.column_sums(chosen) == self.target


@dataclass(frozen=True)
class DecodeMap:
    n_vars: int
    n_clauses: int
    labels: tuple[ItemLabel, ...]

    def __post_init__(self):
        seen = {}
        for pos, lab in enumerate(self.labels):
            if lab in seen:
                raise DecodeError(f"duplicate item label {lab}")
            seen[lab] = pos
        for v in range(1, self.n_vars + 1):
            for kind in ("variable-true", "variable-false"):
                if ItemLabel(kind, v) not in seen:
                    raise DecodeError(f"missing {kind} item for variable {v}")
        for j in range(1, self.n_clauses + 1):
            for kind in ("slack-1", "slack-2"):
                if ItemLabel(kind, j) not in seen:
                    raise DecodeError(f"missing {kind} item for clause {j}")
        object.__setattr__(self, "_position", seen)

    def position(self, label: ItemLabel) -> int:
        return self._position[label]

    def correspondence(self, item: int) -> tuple[str, int, int]:
        """``("variable", var, polarity)`` or ``("clause", clause, slack value)``."""
        lab = self.labels[item]
        if lab.kind.startswith("variable"):
            return "variable", lab.index, int(lab.kind == "variable-true")
        if lab.kind.startswith("slack"):
            return "clause", lab.index, int(lab.kind[-1])
        raise DecodeError(f"item {item} ({lab}) is not part of the reduction")

    def to_dict(self) -> dict:
        entries = []
        for i in range(len(self.labels)):
            kind, idx, val = self.correspondence(i)
            key = "polarity" if kind == "variable" else "slack"
            entries.append({"item": i, "label": str(self.labels[i]), kind: idx, key: val})
        return {"version": SUBSET_SUM_VERSION, "n_vars": self.n_vars, "n_clauses": self.n_clauses,
                "entries": entries}

    @classmethod
    def from_dict(cls, doc: dict) -> "DecodeMap":
        try:
            entries = sorted(doc["entries"], key=lambda e: e["item"])
            labels = tuple(ItemLabel.parse(e["label"]) for e in entries)
            return cls(int(doc["n_vars"]), int(doc["n_clauses"]), labels)
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed decode map: {exc}") from exc


def encode_subset_sum(formula: CnfFormula) -> tuple[SubsetSumInstance, DecodeMap]:
    """Classical 3-SAT to Subset Sum digit construction.

    Columns: one per variable, then one per clause.  Per variable a true item
    and a false item; per clause slacks worth 1 and 2 and a clause target of 4,
    so any satisfied clause (1 to 3 distinct true literals) can be topped up in
    exactly one way.  Repeated literals count once.
    """
    n, m = formula.var_count, len(formula.clauses)
    width = n + m
    occurrences = []
    for j, clause in enumerate(formula.clauses):
        lits = set(clause)
        if any(-l in lits for l in lits):
            raise TautologyError(f"clause {j + 1} {clause} contains a literal and its negation")
        occurrences.append(lits)

    items, labels = [], []
    for v in range(1, n + 1):
        for polarity, kind in ((1, "variable-true"), (-1, "variable-false")):
            digits = [0] * width
            digits[v - 1] = 1
            for j, lits in enumerate(occurrences):
                if polarity * v in lits:
                    digits[n + j] = 1
            items.append(tuple(digits))
            labels.append(ItemLabel(kind, v))
    for j in range(m):
        for value in (1, 2):
            digits = [0] * width
            digits[n + j] = value
            items.append(tuple(digits))
            labels.append(ItemLabel(f"slack-{value}", j + 1))
    target = (1,) * n + (4,) * m
    labels_t = tuple(labels)
    return (SubsetSumInstance(width, tuple(items), target, labels_t),
            DecodeMap(n, m, labels_t))


def decode_subset_sum_solution(chosen: Iterable[int], dmap: DecodeMap) -> Assignment:
    chosen = set(chosen)
    out = []
    for v in range(1, dmap.n_vars + 1):
        t = dmap.position(ItemLabel("variable-true", v)) in chosen
        f = dmap.position(ItemLabel("variable-false", v)) in chosen
        if t == f:
            which = "both" if t else "neither"
            raise DecodeError(f"variable {v}: {which} polarity items chosen")
        out.append(t)
    return tuple(out)


def encode_assignment(formula: CnfFormula, dmap: DecodeMap, assignment: Sequence[bool]) -> list[int]:
    """Item subset for a satisfying assignment, slacks filled in as forced.

    Raises :class:`DecodeError` if some clause is unsatisfied (no slack choice
    reaches 4).
    """
    chosen = []
    for v in range(1, formula.var_count + 1):
        kind = "variable-true" if assignment[v - 1] else "variable-false"
        chosen.append(dmap.position(ItemLabel(kind, v)))
    for j, clause in enumerate(formula.clauses, start=1):
        true_lits = sum(1 for l in set(clause) if assignment[abs(l) - 1] == (l > 0))
        need = 4 - true_lits
        slacks = {3: (1, 2), 2: (2,), 1: (1,)}.get(need)
        if slacks is None:
            raise DecodeError(f"clause {j} is not satisfied by the assignment")
        chosen.extend(dmap.position(ItemLabel(f"slack-{s}", j)) for s in slacks)
    return sorted(chosen)


# Dimensional accounting

STAGE_DIRECT = "Direct Matrix"
STAGE_SAT = "3-SAT (Tseytin-style)"
STAGE_SUBSET_SUM = "Subset Sum (via 3-SAT encoding)"


@dataclass(frozen=True)
class ExpansionRow:
    stage: str
    aux: int
    dim: int
    n: int

    def __post_init__(self):
        if self.dim != self.n + self.aux:
            raise ValueError(f"{self.stage}: d={self.dim} but N+M={self.n + self.aux}")

    @property
    def ratio(self) -> float:
        return self.aux / self.n


@dataclass(frozen=True)
class ExpansionReport:
    n: int
    mode: str  # nominal | measured
    rows: tuple[ExpansionRow, ...]
    clauses: int | None = None  # clause count the Subset Sum row was built from

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["stage", "M", "ratio", "d", "mode"])
        for r in self.rows:
            w.writerow([r.stage, r.aux, f"{r.ratio:.1f}", r.dim, self.mode])
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = ["| Reduction Shape | Auxiliary Coordinates (M) | Ratio (M/N) | Total Dimension (d) |",
                 "|---|---:|---:|---:|"]
        lines += [f"| {r.stage} | {r.aux} | {r.ratio:.1f} | {r.dim} |" for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"n": self.n, "mode": self.mode, "clauses": self.clauses,
                "rows": [{"stage": r.stage, "M": r.aux, "ratio": round(r.ratio, 1), "d": r.dim}
                         for r in self.rows]}


def expansion_nominal(n: int) -> ExpansionReport:
    """Textbook estimates: 3N variables for SAT, 2(3N) + 2N items assuming m ~ N."""
    if n < 1:
        raise ValueError("N must be at least 1")
    rows = (ExpansionRow(STAGE_DIRECT, 0, n, n),
            ExpansionRow(STAGE_SAT, 2 * n, 3 * n, n),
            ExpansionRow(STAGE_SUBSET_SUM, 7 * n, 8 * n, n))
    return ExpansionReport(n, "nominal", rows, clauses=n)


def expansion_measured(formula: CnfFormula, ss: SubsetSumInstance, n: int) -> ExpansionReport:
    rows = (ExpansionRow(STAGE_DIRECT, 0, n, n),
            ExpansionRow(STAGE_SAT, formula.var_count - n, formula.var_count, n),
            ExpansionRow(STAGE_SUBSET_SUM, len(ss) - n, len(ss), n))
    return ExpansionReport(n, "measured", rows, clauses=len(formula.clauses))


# Serialization

def emit_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.var_count} {len(formula.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in formula.clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses, current = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(f"line {lineno}: bad problem line {line!r}")
            try:
                header = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise FormatError(f"line {lineno}: bad problem line {line!r}") from exc
            continue
        if header is None:
            raise FormatError(f"line {lineno}: clause before problem line")
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: non-integer literal") from exc
        for lit in lits:
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if header is None:
        raise FormatError("missing 'p cnf' problem line")
    if current:
        raise FormatError("last clause is not 0-terminated")
    n_vars, n_clauses = header
    if len(clauses) != n_clauses:
        raise FormatError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    try:
        return CnfFormula.from_clauses(n_vars, clauses)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def _digits_str(vec: Sequence[int]) -> str:
    return "".join(map(str, vec))


def _parse_digits(text, width: int, base: int) -> tuple[int, ...]:
    if not isinstance(text, str) or len(text) != width or not text.isdigit():
        raise FormatError(f"digit string {text!r} must have exactly {width} decimal digits")
    out = tuple(int(ch) for ch in text)
    if any(d >= base for d in out):
        raise FormatError(f"digit string {text!r} has digits outside base {base}")
    return out


def subset_sum_to_dict(ss: SubsetSumInstance) -> dict:
    return {
        "version": SUBSET_SUM_VERSION,
        "digits": ss.width,
        "base": ss.base,
        "items": [{"label": str(lab), "digits": _digits_str(it)} for lab, it in zip(ss.labels, ss.items)],
        "target": _digits_str(ss.target),
    }


def emit_subset_sum(ss: SubsetSumInstance) -> str:
    return json.dumps(subset_sum_to_dict(ss), indent=2) + "\n"


def parse_subset_sum(text: str) -> SubsetSumInstance:
    try:
        doc = json.loads(text)
        if doc["version"] != SUBSET_SUM_VERSION:
            raise FormatError(f"unsupported subset-sum version {doc['version']!r}")
        width, base = int(doc["digits"]), int(doc["base"])
        if base != BASE:
            raise FormatError(f"only base {BASE} is supported")
        items = tuple(_parse_digits(it["digits"], width, base) for it in doc["items"])
        labels = tuple(ItemLabel.parse(it["label"]) for it in doc["items"])
        target = _parse_digits(doc["target"], width, base)
    except json.JSONDecodeError as exc:
        raise FormatError(f"subset-sum file is not valid JSON: {exc}") from exc
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed subset-sum document: {exc}") from exc
    return SubsetSumInstance(width, items, target, labels, base)
