"""Deterministic seed derivation.

Every random stream in a run is seeded by hashing a path of labels under
the plan seed, so adding or reordering batches never perturbs the streams
of existing ones.
"""

from __future__ import annotations

import hashlib


def child_seed(*parts: int | str) -> int:
    """64-bit seed derived from a label path (ints and strings)."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
