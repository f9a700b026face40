"""Training run tasks."""

from app.training.experiments import run_payload
from app.workers.celery_app import celery_app


@celery_app.task(bind=True, name="train:run")
def train_run(self, payload: dict) -> dict:
    """Train one model from a serialized run request and return its summary."""
    if not self.request.called_directly and not self.request.is_eager:
        self.update_state(state="PROGRESS", meta={"seed": payload.get("seed")})
    return run_payload(payload)
