"""Seed splitting.

Every randomized stage draws from its own substream so that adding a stage
never perturbs another.  A substream seed is the first eight bytes of
``sha256(f"{seed}:{label}")`` read big-endian; labels are fixed strings per
stage ("witness", "direct-order", "ppsz", "queries", ...), optionally suffixed
with a counter such as ``"queries:17"``.
"""
import hashlib
import random


def derive_seed(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def substream(seed: int, label: str) -> random.Random:
    return random.Random(derive_seed(seed, label))
