import json
import logging
from pathlib import Path

import pytest

from app.main import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from app.utils.storage import file_sha256

CONFIGS_DIR = Path(__file__).resolve().parent.parent / "configs"

DROPATTACK = {"method": "dropattack", "eps": 1.0, "p": 0.7}
LANDSCAPE = """
[landscape]
resolution = 3
span = 0.5
center_window = 3
split = "test"
"""


def manifest(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_missing_config_exits_with_usage_error(tmp_path, caplog):
    with caplog.at_level(logging.ERROR):
        code = main(["train", "--config", str(tmp_path / "absent.toml"), "--out", str(tmp_path / "out")])
    assert code == EXIT_USAGE
    assert "absent.toml" in caplog.text


def test_unknown_flag_is_an_argparse_error():
    with pytest.raises(SystemExit) as info:
        main(["train", "--bogus"])
    assert info.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["train", "--config", "experiment.toml", "--seed", "-1"],
        ["sweep", "--config", "experiment.toml", "--grid", "grid.toml", "--workers", "0"],
        ["data", "gen", "--kind", "two-moons", "--seed", "-2", "--out", "moons.csv"],
        ["gradcheck", "--seeds", "0"],
    ],
)
def test_out_of_range_integer_flags_are_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == EXIT_USAGE
    assert "must be >=" in capsys.readouterr().err


def test_config_validation_error_names_the_field(tmp_path, write_config, caplog):
    path = write_config(
        """
[model]
arch = "mlp"
layer_sizes = [2, 8, 2]
input_shape = [2]

[data]
kind = "two_moons"
n = 50
noise = 0.1

[train]
epochs = 1
batch_size = 8
learning_rate = 0.01

[train.regularizer]
kind = "attack"

[train.regularizer.attack]
method = "dropattack"
eps_x = 1.0
p_x = 0.5
p_theta = 0.5
"""
    )
    with caplog.at_level(logging.ERROR):
        assert main(["train", "--config", str(path), "--out", str(tmp_path / "out")]) == EXIT_USAGE
    assert "eps_theta" in caplog.text


def test_train_is_byte_reproducible(tmp_path, moons_config):
    path = moons_config(attack=DROPATTACK)
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert main(["train", "--config", str(path), "--out", str(out)]) == EXIT_OK
        outputs.append(out)
    first, second = outputs
    assert (first / "metrics.csv").read_bytes() == (second / "metrics.csv").read_bytes()
    assert (first / "checkpoint.json").read_bytes() == (second / "checkpoint.json").read_bytes()

    info = manifest(first / "manifest.json")
    assert info["status"] == "completed"
    assert info["config_sha256"] == file_sha256(path)
    assert info["metrics"]["seed_0.fb_count"] == 2 * 5 * 4
    header = (first / "metrics.csv").read_text().splitlines()[0]
    assert header == "epoch,train_loss,train_acc,val_loss,val_acc,seconds,fb_count"


def test_train_writes_one_directory_per_seed(tmp_path, moons_config):
    path = moons_config(seeds=(0, 1), epochs=1)
    assert main(["train", "--config", str(path), "--out", str(tmp_path / "out")]) == EXIT_OK
    assert (tmp_path / "out" / "seed_0" / "metrics.csv").exists()
    assert (tmp_path / "out" / "seed_1" / "checkpoint.json").exists()
    assert "mean_test_accuracy" in manifest(tmp_path / "out" / "manifest.json")["metrics"]


def test_seed_override(tmp_path, moons_config):
    path = moons_config(seeds=(0, 1), epochs=1)
    assert main(["train", "--config", str(path), "--seed", "7", "--out", str(tmp_path / "out")]) == EXIT_OK
    assert manifest(tmp_path / "out" / "manifest.json")["seeds"] == [7]


def test_numerical_failure_exits_3_with_aborted_manifest(tmp_path, moons_config, caplog):
    path = moons_config(init='init = { kind = "gaussian", scale = 1e300 }')
    with caplog.at_level(logging.ERROR):
        code = main(["train", "--config", str(path), "--out", str(tmp_path / "out")])
    assert code == EXIT_NUMERICAL
    assert "epoch 1, batch 0" in caplog.text
    assert manifest(tmp_path / "out" / "manifest.json")["status"] == "aborted"


def test_landscape_from_trained_checkpoint(tmp_path, moons_config):
    path = moons_config(extra=LANDSCAPE)
    assert main(["train", "--config", str(path), "--out", str(tmp_path / "train")]) == EXIT_OK
    checkpoint = tmp_path / "train" / "checkpoint.json"
    out = tmp_path / "landscape"
    assert main(["landscape", "--checkpoint", str(checkpoint), "--config", str(path), "--out", str(out)]) == EXIT_OK

    rows = (out / "landscape.csv").read_text().splitlines()
    assert rows[0] == "delta,eta,loss"
    assert len(rows) == 1 + 9
    info = json.loads((out / "landscape.json").read_text())
    assert info["checkpoint_id"] == file_sha256(checkpoint)
    assert info["resolution"] == 3


def test_sweep_writes_one_row_per_cell(tmp_path, moons_config, write_config):
    path = moons_config(epochs=1)
    grid = write_config("[grid]\nepsilon = [0.5, 2.0]\np = [0.7]\nk = [1]\nreplicates = 2\n", "grid.toml")
    assert main(["sweep", "--config", str(path), "--grid", str(grid), "--out", str(tmp_path / "out")]) == EXIT_OK
    rows = (tmp_path / "out" / "sweep.csv").read_text().splitlines()
    assert rows[0] == "epsilon,p,K,seed_count,mean_test_acc,std_test_acc"
    assert len(rows) == 3
    assert manifest(tmp_path / "out" / "manifest.json")["seeds"] == [0, 1]


def test_scaling_rejects_oversized_subsets(tmp_path, moons_config):
    path = moons_config(epochs=1)
    assert main(["scaling", "--config", str(path), "--sizes", "10,5000", "--out", str(tmp_path / "out")]) == EXIT_USAGE


def test_scaling_without_attack_is_a_usage_error(tmp_path, moons_config, caplog):
    path = moons_config(epochs=1)
    with caplog.at_level(logging.ERROR):
        code = main(["scaling", "--config", str(path), "--sizes", "20", "--out", str(tmp_path / "out")])
    assert code == EXIT_USAGE
    assert "train.regularizer" in caplog.text


def test_scaling_table(tmp_path, moons_config):
    path = moons_config(epochs=1, attack=DROPATTACK)
    assert main(["scaling", "--config", str(path), "--sizes", "20,40", "--out", str(tmp_path / "out")]) == EXIT_OK
    rows = (tmp_path / "out" / "scaling.csv").read_text().splitlines()
    assert rows[0] == "size,standard_acc,dropattack_acc,improvement"
    assert [row.split(",")[0] for row in rows[1:]] == ["20", "40"]


def test_verify_theory_on_shipped_config(tmp_path):
    out = tmp_path / "theory"
    assert main(["verify-theory", "--config", str(CONFIGS_DIR / "theory_default.toml"), "--out", str(out)]) == EXIT_OK
    slope = manifest(out / "manifest.json")["metrics"]["slope"]
    assert 1.8 <= slope <= 2.2
    assert (out / "equivalence.csv").read_text().startswith("epsilon,gap,surrogate,adversarial\n")


def test_gradcheck_command(tmp_path, capsys):
    assert main(["gradcheck", "--seeds", "1", "--out", str(tmp_path / "out")]) == EXIT_OK
    assert "arch:cnn_lenet_lite" in capsys.readouterr().out
    assert (tmp_path / "out" / "gradcheck.csv").exists()


def test_data_gen_writes_csv_and_manifest(tmp_path):
    target = tmp_path / "data" / "moons.csv"
    assert main(["data", "gen", "--kind", "two-moons", "--n", "40", "--seed", "3", "--out", str(target)]) == EXIT_OK
    lines = target.read_text().splitlines()
    assert lines[0] == "label,f0,f1"
    assert len(lines) == 41
    info = manifest(tmp_path / "data" / "moons.manifest.json")
    assert info["command"] == "data-gen" and info["metrics"]["n"] == 40


def test_data_gen_text(tmp_path):
    target = tmp_path / "text.csv"
    args = ["data", "gen", "--kind", "text", "--n", "10", "--vocab", "20", "--length", "5", "--rule", "keyword_majority"]
    assert main([*args, "--out", str(target)]) == EXIT_OK
    assert target.read_text().splitlines()[0] == "label,t0,t1,t2,t3,t4"
