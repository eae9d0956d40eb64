"""Internal parallelism cap, controlled by the REWIRE_THREADS env var.

REWIRE_THREADS unset or "1" runs serially; "0" means auto (one worker per
CPU); any other positive integer caps the worker count. Results never depend
on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("REWIRE_THREADS", "1").strip()
    try:
        value = int(raw)
    except ValueError:
        return 1
    if value == 0:
        return os.cpu_count() or 1
    return max(1, value)


def map_chunks(fn, chunks):
    """Apply fn to each chunk, fanning out across threads when permitted."""
    chunks = list(chunks)
    cap = min(thread_cap(), len(chunks)) if chunks else 1
    if cap <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, chunks))
