import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "ADIA_THREADS"


def worker_count(requested: int | None = None) -> int:
    """Worker cap: explicit request, else ``$ADIA_THREADS``, else 1."""
    if requested is None:
        raw = os.environ.get(ENV_VAR, "").strip()
        requested = int(raw) if raw else 1
    return max(1, int(requested))


def ordered_map(fn, items, workers: int | None = None) -> list:
    # results keep input order whatever the worker count
    items = list(items)
    n = worker_count(workers)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
