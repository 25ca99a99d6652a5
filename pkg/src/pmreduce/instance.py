"""Unique-witness P-matrix violation instances.

An instance is ``A = base + u v^T`` with ``base`` a P-matrix and exactly one
index subset (the witness) whose principal minor of ``A`` is non-positive.
All arithmetic is exact: rationals are cleared to integers by ``scale`` and
determinants come from fraction-free elimination.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import (
    DimensionMismatchError,
    ExhaustiveLimitError,
    FormatError,
    InvalidInstanceError,
    InvalidParameterError,
    UniquenessViolationError,
)
from .minors import bareiss_det, iter_principal_minors, nonpositive_minor_masks, submatrix
from .seeds import substream

EXHAUSTIVE_LIMIT = 20
FORMAT_VERSION = 1


@dataclass(frozen=True, order=True)
class SubsetMask:
    """A subset of ``{0..n-1}`` stored as an integer bitmask."""

    bits: int
    n: int

    def __post_init__(self):
        if self.n < 0 or self.bits < 0 or self.bits >> self.n:
            raise DimensionMismatchError(f"mask {self.bits:#b} does not fit in {self.n} bits")

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> "SubsetMask":
        bits = 0
        for i in indices:
            if not 0 <= i < n:
                raise DimensionMismatchError(f"index {i} outside 0..{n - 1}")
            bits |= 1 << i
        return cls(bits, n)

    @classmethod
    def empty(cls, n: int) -> "SubsetMask":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "SubsetMask":
        return cls((1 << n) - 1, n)

    def indices(self) -> list[int]:
        return [i for i in range(self.n) if self.bits >> i & 1]

    def complement(self) -> "SubsetMask":
        return SubsetMask(self.bits ^ ((1 << self.n) - 1), self.n)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.n and bool(self.bits >> i & 1)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.indices())) + "}"


def all_masks(n: int) -> Iterator[SubsetMask]:
    for bits in range(1 << n):
        yield SubsetMask(bits, n)


def _lcm_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


@dataclass(frozen=True, eq=False)
class PMatrixInstance:
    n: int
    base: tuple[tuple[Fraction, ...], ...]
    u: tuple[Fraction, ...]
    v: tuple[Fraction, ...]
    witness: SubsetMask | None
    scale: int
    k: int | None = None
    seed: int | None = None

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise InvalidParameterError("dimension must be at least 1")
        if len(self.base) != n or any(len(row) != n for row in self.base):
            raise DimensionMismatchError("base must be n x n")
        if len(self.u) != n or len(self.v) != n:
            raise DimensionMismatchError("u and v must have length n")
        if self.witness is not None and self.witness.n != n:
            raise DimensionMismatchError("witness mask width differs from n")
        if self.scale <= 0:
            raise InvalidInstanceError("scale must be a positive integer")
        if any((x * self.scale).denominator != 1 for row in self.matrix for x in row):
            raise InvalidInstanceError(f"scale {self.scale} does not clear all denominators")

    @cached_property
    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        """The perturbed matrix ``base + u v^T``."""
        return tuple(
            tuple(self.base[i][j] + self.u[i] * self.v[j] for j in range(self.n))
            for i in range(self.n)
        )

    @cached_property
    def scaled(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(x * self.scale) for x in row) for row in self.matrix)

    def redacted(self) -> "PMatrixInstance":
        return PMatrixInstance(self.n, self.base, self.u, self.v, None, self.scale, self.k, self.seed)

    def with_witness(self, witness: SubsetMask | None) -> "PMatrixInstance":
        return PMatrixInstance(self.n, self.base, self.u, self.v, witness, self.scale, self.k, self.seed)

    def __eq__(self, other):
        if not isinstance(other, PMatrixInstance):
            return NotImplemented
        return (self.n, self.base, self.u, self.v, self.witness, self.scale, self.k, self.seed) == (
            other.n, other.base, other.u, other.v, other.witness, other.scale, other.k, other.seed)

    __hash__ = None


def make_instance(base, u, v, witness=None, *, k=None, seed=None) -> PMatrixInstance:
    """Build an instance from anything ``Fraction`` accepts; picks the minimal scale."""
    base_t = tuple(tuple(Fraction(x) for x in row) for row in base)
    u_t = tuple(Fraction(x) for x in u)
    v_t = tuple(Fraction(x) for x in v)
    n = len(base_t)
    entries = [base_t[i][j] + u_t[i] * v_t[j] for i in range(n) for j in range(n)]
    if witness is not None and not isinstance(witness, SubsetMask):
        witness = SubsetMask.from_indices(witness, n)
    return PMatrixInstance(n, base_t, u_t, v_t, witness, _lcm_denominators(entries), k, seed)


def _check_mask(instance: PMatrixInstance, subset: SubsetMask) -> None:
    if subset.n != instance.n:
        raise DimensionMismatchError(f"subset has width {subset.n}, instance has n={instance.n}")


def principal_minor(instance: PMatrixInstance, subset: SubsetMask) -> Fraction:
    """Exact determinant of ``(base + u v^T)`` restricted to ``subset``."""
    _check_mask(instance, subset)
    idx = subset.indices()
    det = bareiss_det(submatrix(instance.scaled, idx))
    return Fraction(det, instance.scale ** len(idx))


def is_p_matrix(matrix: Sequence[Sequence], limit: int = EXHAUSTIVE_LIMIT) -> bool:
    """True iff every nonempty principal minor is strictly positive."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise DimensionMismatchError("matrix must be square")
    if n > limit:
        raise ExhaustiveLimitError("is_p_matrix", n, limit)
    rows = [[Fraction(x) for x in row] for row in matrix]
    scale = _lcm_denominators(x for row in rows for x in row)
    ints = [[int(x * scale) for x in row] for row in rows]
    return all(d > 0 for _, d in iter_principal_minors(ints))


def generate_unique_violation(n: int, k: int, seed: int) -> PMatrixInstance:
    """Closed-form unique-violation instance with ``base = I``.

    For ``base = I`` the principal minor over S is ``1 + sum_{i in S} u_i v_i``.
    Inside the witness each product is ``-(2k+1)/(2k^2)``, so the full witness
    sums to ``-(1 + 1/(2k))``; any proper part stays above -1 and any subset
    touching an outside index (+2) is positive.
    """
    if not 1 <= k <= n:
        raise InvalidParameterError(f"need 1 <= k <= n, got n={n}, k={k}")
    rng = substream(seed, "witness")
    witness = SubsetMask.from_indices(rng.sample(range(n), k), n)
    inside = Fraction(-(2 * k + 1), 2 * k * k)
    u = [inside if i in witness else Fraction(2) for i in range(n)]
    v = [Fraction(1)] * n
    base = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    return make_instance(base, u, v, witness, k=k, seed=seed)


def verify_unique_violation(instance: PMatrixInstance, limit: int = EXHAUSTIVE_LIMIT,
                            jobs: int = 1) -> SubsetMask:
    """Brute-force ground truth: the only subset with a non-positive minor.

    Raises :class:`UniquenessViolationError` if there are zero or several such
    subsets, or if a stored witness disagrees with the one found.
    """
    n = instance.n
    if n > limit:
        raise ExhaustiveLimitError("verify_unique_violation", n, limit)
    bad = [SubsetMask(m, n) for m in nonpositive_minor_masks(instance.scaled, jobs)]
    if len(bad) != 1:
        listed = ", ".join(map(str, bad[:8])) + (" ..." if len(bad) > 8 else "")
        raise UniquenessViolationError(
            f"expected exactly one non-positive principal minor, found {len(bad)}"
            + (f": {listed}" if bad else ""), bad)
    found = bad[0]
    if instance.witness is not None and instance.witness != found:
        raise UniquenessViolationError(
            f"stored witness {instance.witness} has a positive minor; the violation is at {found}",
            bad)
    return found


def oracle_query_sign(instance: PMatrixInstance, guess: SubsetMask) -> bool:
    return principal_minor(instance, guess) <= 0


def oracle_query_equality(instance: PMatrixInstance, guess: SubsetMask) -> bool:
    """Does ``guess`` equal the hidden witness?  Falls back to the sign test when redacted."""
    _check_mask(instance, guess)
    if instance.witness is None:
        return oracle_query_sign(instance, guess)
    return guess == instance.witness


def direct_search(instance: PMatrixInstance, order: str = "lexicographic",
                  seed: int = 0) -> tuple[SubsetMask, int]:
    """Query subsets one at a time until the sign oracle fires.

    ``order`` is ``"lexicographic"`` (increasing bitmask, empty set first) or
    ``"random"`` (a uniform permutation of all 2^n subsets).  Returns the
    witness and the number of queries issued.
    """
    n = instance.n
    if order == "lexicographic":
        candidates: Iterable[int] = range(1 << n)
    elif order in ("random", "uniform-random-permutation"):
        perm = list(range(1 << n))
        substream(seed, "direct-order").shuffle(perm)
        candidates = perm
    else:
        raise InvalidParameterError(f"unknown enumeration order {order!r}")
    for trials, bits in enumerate(candidates, start=1):
        guess = SubsetMask(bits, n)
        if oracle_query_sign(instance, guess):
            return guess, trials
    raise InvalidInstanceError(f"no violating subset among all {1 << n} subsets")


# serialization

def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_frac(s) -> Fraction:
    if not isinstance(s, str):
        raise FormatError(f"rational must be a 'p/q' string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {s!r}") from exc


def instance_to_dict(instance: PMatrixInstance) -> dict:
    return {
        "version": FORMAT_VERSION,
        "n": instance.n,
        "k": instance.k,
        "seed": instance.seed,
        "base": [[_frac_str(x) for x in row] for row in instance.base],
        "u": [_frac_str(x) for x in instance.u],
        "v": [_frac_str(x) for x in instance.v],
        "witness": None if instance.witness is None else instance.witness.indices(),
        "scale": instance.scale,
    }


def instance_from_dict(doc: dict) -> PMatrixInstance:
    try:
        if doc["version"] != FORMAT_VERSION:
            raise FormatError(f"unsupported instance version {doc['version']!r}")
        n = int(doc["n"])
        base = tuple(tuple(_parse_frac(x) for x in row) for row in doc["base"])
        u = tuple(_parse_frac(x) for x in doc["u"])
        v = tuple(_parse_frac(x) for x in doc["v"])
        w = doc["witness"]
        witness = None if w is None else SubsetMask.from_indices(w, n)
        return PMatrixInstance(n, base, u, v, witness, int(doc["scale"]),
                               doc.get("k"), doc.get("seed"))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed instance document: {exc}") from exc


def dump_instance(instance: PMatrixInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def load_instance(text: str) -> PMatrixInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"instance is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("instance document must be a JSON object")
    return instance_from_dict(doc)
