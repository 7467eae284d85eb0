"""Optional thread fan-out controlled by ``HYPERMONO_THREADS``.

Results always come back in input order, so reductions over them are
independent of scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    raw = os.environ.get("HYPERMONO_THREADS", "0")
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


def pmap(fn, items):
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
