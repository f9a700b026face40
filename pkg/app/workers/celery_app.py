"""Celery application configuration."""

from celery import Celery

from app.config import get_settings

settings = get_settings()

celery_app = Celery(
    "dropattack",
    broker=settings.redis_url or "memory://",
    backend=settings.redis_url or "cache+memory://",
    include=[
        "app.workers.training_tasks",
        "app.workers.landscape_tasks",
    ],
)

# Celery configuration
celery_app.conf.update(
    task_serializer="json",
    accept_content=["json"],
    result_serializer="json",
    timezone="UTC",
    enable_utc=True,
    task_track_started=True,
    task_time_limit=3600,  # 1 hour max per training run
    task_soft_time_limit=3300,
    worker_prefetch_multiplier=1,  # runs are long; don't prefetch
    task_routes={
        # Route tasks by custom name prefix
        "train:*": {"queue": "train"},
        "landscape:*": {"queue": "landscape"},
    },
)
