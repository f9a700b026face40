"""Fan-out of independent jobs: inline, a local process pool, or Celery queues.

Results always come back in payload order, so callers can aggregate by index.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor

from app.config import get_settings

logger = logging.getLogger(__name__)

Payload = dict
Job = Callable[[Payload], dict]


def dispatch(job: Job, payloads: list[Payload], *, task_name: str, workers: int | None = None) -> list[dict]:
    """Run ``job`` over every payload.

    With ``redis_url`` configured the payloads are sent to the Celery task ``task_name``;
    otherwise they run inline (``workers <= 1``) or in a process pool of ``workers``.
    """
    settings = get_settings()
    workers = workers if workers is not None else settings.workers
    if not payloads:
        return []

    if settings.redis_url:
        from app.workers.celery_app import celery_app

        logger.info("sending %d %s jobs to celery", len(payloads), task_name)
        pending = [celery_app.send_task(task_name, args=[payload]) for payload in payloads]
        return [result.get() for result in pending]

    if workers <= 1 or len(payloads) == 1:
        return [job(payload) for payload in payloads]

    logger.info("running %d %s jobs on %d processes", len(payloads), task_name, workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, payloads))
