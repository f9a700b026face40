"""Loss-landscape tasks."""

from app.analysis.landscape import row_payload
from app.workers.celery_app import celery_app


@celery_app.task(bind=True, name="landscape:row")
def landscape_row(self, payload: dict) -> dict:
    """Evaluate one row of a landscape grid."""
    if not self.request.called_directly and not self.request.is_eager:
        self.update_state(state="PROGRESS", meta={"row": payload["row"]})
    return row_payload(payload)
