import os

import pandas as pd
import pytest

from conftest import quadrant_spec
from data_synthesizer import write_scene
from file_processor.label_map_processor import load_label_map
from orchestration import graph
from orchestration.graph import run_pipeline
from orchestration.stage import stage
from utils.config import load_pipeline_config
from utils.errors import DataError, PublishError, StageError

SMALL_SCENE = 'preset = "acceptance"\nseed = 5\nsize = 64\nblock_rows = 2\nblocks_per_row = 4\n'

SMALL_RUN = """
synth_spec = "scene.toml"
output_dir = "out"
seed = 7
overlay_model = "elm"

[merging]
scale = 0.0

[training]
pretrain_epochs = 1
finetune_epochs = 5
batch_size = 4
learning_rate = 0.1
n_layers = 2

[evaluation]
k = 2
models = ["sdae", "elm"]

[evaluation.grid.sdae]
hidden_width = [4, 8]

[evaluation.grid.elm]
hidden_width = [4, 8]
"""


def _leftover_staging(parent):
    return [name for name in os.listdir(parent) if name.startswith(".quakeseg_")]


def test_stage_wraps_failures():
    @stage("explode")
    def explode(state):
        raise DataError("bad bytes")

    with pytest.raises(StageError) as info:
        explode({})
    assert info.value.stage == "explode"
    assert isinstance(info.value.cause, DataError)
    assert info.value.exit_code == 3


def test_stage_passes_updates_through():
    @stage("ok")
    def ok(state):
        return {"artifacts": ["a"]}

    assert ok({}) == {"artifacts": ["a"]}


def test_small_synthetic_run(tmp_path):
    (tmp_path / "scene.toml").write_text(SMALL_SCENE)
    (tmp_path / "run.toml").write_text(SMALL_RUN)
    result = run_pipeline(load_pipeline_config(tmp_path / "run.toml"))

    out = tmp_path / "out"
    expected = {
        "labels_initial.pgm", "segments_initial.ppm", "labels_merged.pgm", "segments_merged.ppm",
        "features.csv", "report.csv", "comparison.csv", "model_sdae.txt", "model_elm.txt",
        "overlay_sdae.ppm", "overlay_elm.ppm", "overlay_truth.ppm", "predictions.csv",
    }
    assert set(os.listdir(out)) == expected
    assert set(result["published"]) == expected
    assert not _leftover_staging(tmp_path)

    # scale 0 keeps the initial partition
    assert load_label_map(out / "labels_merged.pgm") == load_label_map(out / "labels_initial.pgm")

    report = pd.read_csv(out / "report.csv")
    assert len(report) == 4 and set(report["model"]) == {"sdae", "elm"}
    comparison = pd.read_csv(out / "comparison.csv")
    assert comparison["model"].tolist() == ["sdae", "elm"]
    assert {"kappa", "f1", "accuracy"} <= set(comparison.columns)
    predictions = pd.read_csv(out / "predictions.csv")
    assert len(predictions) == result["features"].n_rows


def test_failed_stage_publishes_nothing(tmp_path):
    (tmp_path / "broken.qras").write_bytes(b"QRAS1 4 4 3\n\x00\x01")
    (tmp_path / "run.toml").write_text('input_raster = "broken.qras"\noutput_dir = "out"\n')
    with pytest.raises(StageError) as info:
        run_pipeline(load_pipeline_config(tmp_path / "run.toml"))
    assert info.value.stage == "load_inputs"
    assert info.value.exit_code == 3
    assert not (tmp_path / "out").exists()
    assert not _leftover_staging(tmp_path)


def test_run_without_truth_stops_after_features(tmp_path):
    write_scene(quadrant_spec(), tmp_path / "scene.qras", tmp_path / "truth.pgm", tmp_path / "classes.csv")
    (tmp_path / "run.toml").write_text(
        'input_raster = "scene.qras"\noutput_dir = "out"\n[merging]\nscale = 0.0\n[features]\nnir_index = 2\nred_index = 0\n'
    )
    result = run_pipeline(load_pipeline_config(tmp_path / "run.toml"))
    assert set(result["published"]) == {
        "labels_initial.pgm", "segments_initial.ppm", "labels_merged.pgm", "segments_merged.ppm", "features.csv",
    }
    assert "classifiers" not in result
    assert result["features"].classes is None


def test_identical_runs_write_identical_files(tmp_path):
    (tmp_path / "scene.toml").write_text(SMALL_SCENE)
    run = tmp_path / "run.toml"
    contents = {}
    for name in ("a", "b"):
        run.write_text(SMALL_RUN.replace('output_dir = "out"', f'output_dir = "{name}"'))
        run_pipeline(load_pipeline_config(run))
        contents[name] = {
            f: (tmp_path / name / f).read_bytes()
            for f in ("features.csv", "model_sdae.txt", "model_elm.txt", "report.csv", "comparison.csv")
        }
    assert contents["a"] == contents["b"]


def _staged(tmp_path, names):
    staging = tmp_path / "staging"
    staging.mkdir()
    for name in names:
        (staging / name).write_text(f"new {name}")
    return staging


def _fail_on(monkeypatch, staged_name):
    real_replace = os.replace

    def replace(src, dst):
        if os.path.basename(os.path.dirname(src)) == "staging" and os.path.basename(src) == staged_name:
            raise OSError("disk full")
        real_replace(src, dst)

    monkeypatch.setattr(graph.os, "replace", replace)


def test_failed_publish_restores_previous_outputs(tmp_path, monkeypatch):
    staging = _staged(tmp_path, ["a.csv", "b.csv", "c.csv"])
    out = tmp_path / "out"
    out.mkdir()
    (out / "a.csv").write_text("old a")
    (out / "keep.txt").write_text("untouched")
    _fail_on(monkeypatch, "b.csv")
    with pytest.raises(PublishError) as info:
        graph._publish(str(staging), str(out), ["a.csv", "b.csv", "c.csv"])
    assert info.value.exit_code == 3
    assert sorted(os.listdir(out)) == ["a.csv", "keep.txt"]
    assert (out / "a.csv").read_text() == "old a"


def test_failed_publish_leaves_no_fresh_output_dir(tmp_path, monkeypatch):
    staging = _staged(tmp_path, ["a.csv", "b.csv"])
    _fail_on(monkeypatch, "b.csv")
    with pytest.raises(PublishError):
        graph._publish(str(staging), str(tmp_path / "out"), ["a.csv", "b.csv"])
    assert not (tmp_path / "out").exists()


def test_publish_replaces_every_artifact(tmp_path):
    staging = _staged(tmp_path, ["a.csv", "b.csv"])
    out = tmp_path / "out"
    out.mkdir()
    (out / "a.csv").write_text("old a")
    published = graph._publish(str(staging), str(out), ["a.csv", "b.csv"])
    assert published == {"a.csv": str(out / "a.csv"), "b.csv": str(out / "b.csv")}
    assert (out / "a.csv").read_text() == "new a.csv"
    assert (out / "b.csv").read_text() == "new b.csv"
