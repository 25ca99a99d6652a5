"""Witness entropy, per-query information and eliminative information, in bits."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

from .errors import InvalidParameterError
from .instance import SubsetMask, generate_unique_violation, oracle_query_equality
from .seeds import substream


@dataclass(frozen=True)
class Prior:
    """Prior over witnesses: all 2^n subsets, or all size-k subsets."""

    size: int | None = None

    @classmethod
    def parse(cls, text: str) -> "Prior":
        if text == "uniform-all-subsets":
            return cls()
        prefix = "uniform-size-"
        if text.startswith(prefix) and text[len(prefix):].isdigit():
            return cls(int(text[len(prefix):]))
        raise InvalidParameterError(f"unknown prior {text!r}")

    def __str__(self) -> str:
        return "uniform-all-subsets" if self.size is None else f"uniform-size-{self.size}"

    def support(self, n: int) -> int:
        if n < 1:
            raise InvalidParameterError("n must be at least 1")
        if self.size is None:
            return 1 << n
        if not 0 <= self.size <= n:
            raise InvalidParameterError(f"witness size {self.size} outside 0..{n}")
        return math.comb(n, self.size)


ALL_SUBSETS = Prior()


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"probability {p} outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def witness_entropy(n: int, prior: Prior = ALL_SUBSETS) -> float:
    return math.log2(prior.support(n))


def query_success_prob(n: int, prior: Prior = ALL_SUBSETS) -> float:
    """Chance that one fixed guess in the prior's support hits the witness."""
    return 1.0 / prior.support(n)


def per_query_information(n: int, prior: Prior = ALL_SUBSETS) -> float:
    """I(W; Y) for one equality query.  Y is a function of W, so this is H(Y)."""
    return binary_entropy(query_success_prob(n, prior))


def eliminative_information(n: int, failed_queries: int) -> float:
    """Bits gained after ``failed_queries`` distinct misses under the uniform prior."""
    if n < 1:
        raise InvalidParameterError("n must be at least 1")
    total = 1 << n
    if not 0 <= failed_queries < total:
        raise InvalidParameterError(f"need 0 <= q < 2^n = {total}, got {failed_queries}")
    return n - math.log2(total - failed_queries)


@dataclass
class AccessibilityProfile:
    n: int
    prior: str
    entropy_bits: float
    success_prob: float
    per_query_bits: float
    queries_examined: int = 0
    successes: int = 0
    empirical_success: float | None = None
    standard_error: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


def analytic_profile(n: int, prior: Prior = ALL_SUBSETS) -> AccessibilityProfile:
    return AccessibilityProfile(n, str(prior), witness_entropy(n, prior),
                                query_success_prob(n, prior), per_query_information(n, prior))


def empirical_query_experiment(n: int, k: int | None, num_instances: int,
                               queries_per_instance: int, seed: int) -> AccessibilityProfile:
    """Fresh uniform equality queries against generated instances.

    With ``k`` set, witnesses and guesses are both uniform size-k subsets;
    with ``k=None`` guesses range over all 2^n subsets (and instance witness
    sizes are drawn uniformly from 1..n).  Guesses are drawn with replacement.
    """
    if num_instances < 1 or queries_per_instance < 0:
        raise InvalidParameterError("need num_instances >= 1 and queries_per_instance >= 0")
    prior = Prior(k)
    profile = analytic_profile(n, prior)
    if queries_per_instance == 0:
        return profile
    hits = 0
    for t in range(num_instances):
        rng = substream(seed, f"queries:{t}")
        size = k if k is not None else rng.randint(1, n)
        instance = generate_unique_violation(n, size, rng.getrandbits(64))
        for _ in range(queries_per_instance):
            if k is None:
                guess = SubsetMask(rng.getrandbits(n), n)
            else:
                guess = SubsetMask.from_indices(rng.sample(range(n), k), n)
            hits += oracle_query_equality(instance, guess)
    total = num_instances * queries_per_instance
    freq = hits / total
    profile.queries_examined = total
    profile.successes = hits
    profile.empirical_success = freq
    profile.standard_error = math.sqrt(profile.success_prob * (1 - profile.success_prob) / total)
    return profile


def accessibility_rows(n: int, prior: Prior = ALL_SUBSETS, eliminative_samples: int = 5) -> list[dict]:
    """Rows for the accessibility report: one per sampled failed-query count."""
    total = 1 << n
    qs = sorted({min(total - 1, round(i * (total - 1) / (eliminative_samples - 1)))
                 for i in range(eliminative_samples)}) if eliminative_samples > 1 else [0]
    h, p, info = witness_entropy(n, prior), query_success_prob(n, prior), per_query_information(n, prior)
    return [{"n": n, "prior": str(prior), "H(W)": h, "Pr(Y=1)": p, "I_per_query": info,
             "failed_queries": q, "eliminative_bits": eliminative_information(n, q)} for q in qs]


def render_accessibility(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    cols = ["n", "prior", "H(W)", "Pr(Y=1)", "I_per_query", "failed_queries", "eliminative_bits"]
    cell = lambda v: f"{v:.6g}" if isinstance(v, float) else str(v)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([cell(r[c]) for c in cols])
        return buf.getvalue()
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    lines += ["| " + " | ".join(cell(r[c]) for c in cols) + " |" for r in rows]
    return "\n".join(lines) + "\n"
