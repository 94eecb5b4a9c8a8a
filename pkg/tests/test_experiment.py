import numpy as np
import pytest

import spdset.experiment as experiment
from spdset.cli import main
from spdset.datasets import load_dataset, synth_dataset
from spdset.exceptions import InsufficientSets, InvalidInput, InvalidResult
from spdset.experiment import (
    ExperimentConfig,
    ExperimentResult,
    config_from_mapping,
    emit_results,
    format_results,
    load_config,
    parse_key_values,
    parse_results,
    run_experiment,
    split_indices,
)


@pytest.fixture(scope="module")
def synth_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth")
    synth_dataset(root, classes=3, sets=10, frames=8, seed=0)
    return root


@pytest.fixture(scope="module")
def manifest(synth_root):
    return load_dataset(synth_root)


def test_parse_key_values():
    text = "# comment\nbeta = 0.9\nstride: 3  # trailing\n\n"
    assert parse_key_values(text) == {"beta": "0.9", "stride": "3"}
    with pytest.raises(InvalidInput):
        parse_key_values("just words")


def test_presets():
    virus = load_config("virus")
    assert virus.pipeline.beta == 14.0 and virus.pipeline.stride == 3
    cg = load_config("cg")
    assert cg.pipeline.beta == 0.05 and cg.k_orders == 1
    assert load_config("eth80").pipeline.beta == 0.9
    assert load_config("mdsd").pipeline.beta == 2.0
    assert cg.pipeline.orders == (0, 1, 2, 3) and cg.resize_to == (24, 24)


def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "exp.cfg"
    p.write_text("preset = eth80\nclassifier = nn-stein\nsplits = 3\n")
    cfg = load_config(p, {"seed": "9"})
    assert cfg.classifier == "nn-stein" and cfg.splits == 3 and cfg.seed == 9
    assert cfg.pipeline.beta == 0.9
    with pytest.raises(InvalidInput):
        config_from_mapping({"bogus": "1"})
    with pytest.raises(InvalidInput):
        config_from_mapping({"splits": "many"})
    with pytest.raises(InvalidInput):
        config_from_mapping({"classifier": "knn"})
    with pytest.raises(InvalidInput):
        load_config(tmp_path / "nope.cfg")


def test_result_format_example(tmp_path):
    res = ExperimentResult([50.0, 100.0], {"seed": "0"})
    text = format_results(res)
    assert "mean: 75.00, std: 35.36\n" in text
    assert "table: 75.00±35.36" in text
    out = emit_results(res, tmp_path / "r.txt")
    back = parse_results(out)
    assert back["accuracies"] == [50.0, 100.0]
    assert back["mean"] == 75.0
    assert back["std"] == pytest.approx(np.std([50, 100], ddof=1))
    assert back["config"] == {"seed": "0"}
    assert (tmp_path / "r.txt.timings").exists()


def test_result_refuses_empty(tmp_path):
    with pytest.raises(InvalidResult):
        emit_results(ExperimentResult([], {}), tmp_path / "r.txt")
    assert not (tmp_path / "r.txt").exists()


def test_single_split_std():
    assert ExperimentResult([80.0], {}).std == 0.0


def test_split_indices_reproducible():
    labels = np.repeat(["a", "b"], 6)
    a = split_indices(labels, ["a", "b"], 2, seed=4, split=1)
    b = split_indices(labels, ["a", "b"], 2, seed=4, split=1)
    c = split_indices(labels, ["a", "b"], 2, seed=4, split=2)
    np.testing.assert_array_equal(a[0], b[0])
    assert not np.array_equal(a[0], c[0])
    train, test = a
    assert len(train) == 4 and len(test) == 8
    assert set(train).isdisjoint(test)


def test_insufficient_sets(manifest):
    with pytest.raises(InsufficientSets):
        run_experiment(ExperimentConfig(train_per_class=10), manifest)


def test_weights_learned_on_training_sets_only(manifest, monkeypatch):
    seen = []
    real = experiment.learn_weights

    def spy(L, labels, k, orders=None):
        seen.append(len(labels))
        return real(L, labels, k, orders)

    monkeypatch.setattr(experiment, "learn_weights", spy)
    run_experiment(ExperimentConfig(splits=2, train_per_class=4), manifest)
    assert seen == [12, 12]


def test_synthetic_accuracy_and_determinism(synth_root, tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("descriptor = covds-s\nclassifier = ker-svm\ntrain_per_class = 5\n")
    outs = [tmp_path / "r1.txt", tmp_path / "r2.txt"]
    for o in outs:
        assert main(["run", "--config", str(cfg), "--data", str(synth_root), "--out", str(o)]) == 0
    assert outs[0].read_bytes() == outs[1].read_bytes()
    assert parse_results(outs[0])["mean"] >= 90.0


@pytest.mark.parametrize("rotation", [90, 180, 270])
def test_rotated_data_classifies_like_unrotated(manifest, rotation):
    cfg = ExperimentConfig(rotation=rotation)
    assert run_experiment(cfg, manifest).mean >= 90.0


def test_traditional_descriptor_runs(manifest):
    cfg = ExperimentConfig(descriptor="covds", classifier="nn-lem", splits=2,
                           resize_to=(8, 8))
    res = run_experiment(cfg, manifest)
    assert len(res.accuracies) == 2


def test_cli_exit_codes(tmp_path, synth_root, capsys):
    assert main(["validate", "--data", str(synth_root)]) == 0
    assert "30 image sets" in capsys.readouterr().out
    with pytest.raises(SystemExit) as info:
        main(["run", "--config", "eth80"])
    assert info.value.code == 1
    out = str(tmp_path / "r.txt")
    assert main(["run", "--config", "missing.cfg", "--data", str(synth_root), "--out", out]) == 1
    assert main(["run", "--config", "eth80", "--data", str(tmp_path / "none"), "--out", out]) == 2
    assert main(["run", "--config", "eth80", "--data", str(synth_root), "--out", out,
                 "--set", "train_per_class=10"]) == 2
    assert main(["synth", "--out", str(tmp_path / "s"), "--classes", "0"]) == 1


def test_cli_numerical_error_code(tmp_path, synth_root, monkeypatch):
    from spdset.exceptions import IllConditioned

    def boom(*a, **k):
        raise IllConditioned("forced")

    monkeypatch.setattr(experiment, "learn_weights", boom)
    out = str(tmp_path / "r.txt")
    assert main(["run", "--config", "eth80", "--data", str(synth_root), "--out", out,
                 "--set", "splits=2"]) == 3
