"""Deterministic seed splitting.

Every stochastic component draws from its own random.Random instance whose
seed is derived from the single top-level run seed plus a label. The
derivation goes through sha256 rather than hash() so sub-seeds are stable
across processes, platforms and Python versions.
"""
from __future__ import annotations

import hashlib
import random


def split_seed(seed: int, label: str) -> int:
    """Derive a 64-bit sub-seed for the component named by `label`."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def component_rng(seed: int, label: str) -> random.Random:
    """A fresh Mersenne Twister stream for one component of a run."""
    return random.Random(split_seed(seed, label))
