from app.schemas.data import TwoMoonsSource
from app.schemas.run import RunRequest
from app.schemas.train import TrainConfig
from app.training import run_payload
from app.workers.celery_app import celery_app
from app.workers.pool import dispatch
from app.workers.training_tasks import train_run


def _payload(seed: int) -> dict:
    request = RunRequest(
        model={"arch": "mlp", "layer_sizes": [2, 4, 2], "input_shape": [2]},
        data=TwoMoonsSource(n=60, noise=0.2, fractions=(0.6, 0.2, 0.2)),
        train=TrainConfig(epochs=1, batch_size=8, learning_rate=0.05),
        seed=seed,
    )
    return request.model_dump(mode="json")


def _echo(payload: dict) -> dict:
    return {"index": payload["index"]}


def test_inline_dispatch_keeps_payload_order():
    results = dispatch(_echo, [{"index": i} for i in range(5)], task_name="test:echo", workers=1)
    assert [r["index"] for r in results] == list(range(5))


def test_dispatch_of_nothing():
    assert dispatch(_echo, [], task_name="test:echo") == []


def test_process_pool_matches_inline():
    payloads = [_payload(seed) for seed in range(3)]
    inline = dispatch(run_payload, payloads, task_name="train:run", workers=1)
    pooled = dispatch(run_payload, payloads, task_name="train:run", workers=2)
    assert pooled == inline
    assert [r["seed"] for r in pooled] == [0, 1, 2]


def test_celery_task_runs_eagerly():
    payload = _payload(4)
    assert train_run.apply(args=[payload]).get() == run_payload(payload)


def test_task_routes():
    routes = celery_app.conf.task_routes
    assert routes["train:*"]["queue"] == "train"
    assert routes["landscape:*"]["queue"] == "landscape"
