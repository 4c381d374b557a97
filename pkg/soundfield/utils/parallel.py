"""
Ordered parallel map for batch work.

Results always come back in item order, never completion order, so the output of a
batch does not depend on how many workers ran it.
"""

import logging
import os

from tqdm import tqdm
from tqdm.contrib.concurrent import process_map

logger = logging.getLogger(__name__)


def default_workers():
    return os.cpu_count() or 1


def ordered_map(func, items, workers=None, desc=None, progress=True):
    items = list(items)
    workers = default_workers() if workers is None else max(1, int(workers))
    if not items:
        return []
    if workers == 1 or len(items) == 1:
        return [func(item) for item in tqdm(items, desc=desc, disable=not progress)]
    logger.info(f"Mapping {len(items)} items over {workers} worker processes")
    return process_map(
        func,
        items,
        max_workers=min(workers, len(items)),
        chunksize=1,
        desc=desc,
        disable=not progress,
    )


def celery_map(task, argument_tuples, timeout=None):
    """Run `task` once per argument tuple as a Celery group, results in input order."""
    from celery import group

    argument_tuples = list(argument_tuples)
    if not argument_tuples:
        return []
    logger.info(f"Dispatching {len(argument_tuples)} '{task.name}' tasks to Celery")
    result = group(task.s(*args) for args in argument_tuples).apply_async()
    return result.get(timeout=timeout, disable_sync_subtasks=False)
