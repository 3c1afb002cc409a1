import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    """Worker cap from ``GEOSTRAIN_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("GEOSTRAIN_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def pmap(fn, items, min_items=64):
    """Order-preserving map; threads only for batches big enough to pay off."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1 or len(items) < min_items:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
