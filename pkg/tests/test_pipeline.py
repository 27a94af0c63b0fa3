"""Manifest-to-report pipeline: extract, train, eval, infer, bench."""

import os

import numpy as np
import pytest

from wavescat import synth
from wavescat.errors import DataError
from wavescat.formats import load_model, read_features, read_manifest, save_model
from wavescat.mlp import TrainConfig, models_equal
from wavescat.pipeline import (
    HIDDEN,
    PipelineConfig,
    extract_features,
    load_labels,
    overlay_configs,
    run_bench,
    run_eval,
    run_extract,
    run_infer,
    run_train,
)
from wavescat.ppm import load_image_channel, write_ppm
from wavescat.scattering import ScatterConfig, feature_length

CFG64 = PipelineConfig(width=64, height=64)
QUICK = TrainConfig(learning_rate=0.01, epochs=30, batch_size=8, seed=0)


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth")
    manifest = synth.synth_dataset(root, per_class=6, width=64, height=64, seed=7)
    return manifest


@pytest.fixture(scope="module")
def features(dataset, tmp_path_factory):
    out = tmp_path_factory.mktemp("features") / "train.feat"
    report = run_extract(CFG64, dataset, out)
    assert report.failures == ()
    return out


@pytest.fixture(scope="module")
def trained(dataset, features, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.bin"
    model, report = run_train(CFG64, QUICK, features, dataset, path)
    return path, model, report


# ---------------------------------------------------------------------------
# configs


def test_pipeline_config_validation():
    with pytest.raises(DataError, match="dims must be positive"):
        PipelineConfig(width=0)
    with pytest.raises(DataError, match="channel"):
        PipelineConfig(channel="Q")
    with pytest.raises(DataError, match="unique"):
        PipelineConfig(classes=("a", "a"))
    with pytest.raises(DataError, match="threads"):
        PipelineConfig(threads=0)
    assert PipelineConfig(classes=["a", "b"]).classes == ("a", "b")


def test_overlay_configs_routes_keys():
    mapping = {
        "width": "96", "height": "64", "channel": "G", "threads": "2",
        "classes": "cat, dog",
        "depth": "2", "bases": "bior1.1,bior2.2", "boundary": "periodic",
        "decimate": "3", "variant": "classic", "selection": "S0,U1",
        "smooth_with": "last", "smooth_decimate": "off",
        "learning_rate": "0.5", "momentum": "0", "epochs": "7", "batch_size": "4",
    }
    p, t = overlay_configs(mapping)
    assert (p.width, p.height, p.channel, p.threads) == (96, 64, "G", 2)
    assert p.classes == ("cat", "dog")
    s = p.scatter
    assert (s.depth, s.level_bases, s.boundary) == (2, ("bior1.1", "bior2.2"), "periodic")
    assert (s.decimate, s.variant, s.selection) == (3, "classic", ("S0", "U1"))
    assert (s.smooth_with, s.smooth_decimate) == ("last", False)
    assert (t.learning_rate, t.momentum, t.epochs, t.batch_size) == (0.5, 0.0, 7, 4)


def test_overlay_configs_rejects_bad_input():
    with pytest.raises(DataError, match="unknown config key 'color'"):
        overlay_configs({"color": "blue"})
    with pytest.raises(DataError, match="expected an integer"):
        overlay_configs({"width": "wide"})
    with pytest.raises(DataError, match="expected a boolean"):
        overlay_configs({"smooth_decimate": "maybe"})
    # merged result is re-validated by the dataclass
    with pytest.raises(DataError, match="one basis per level"):
        overlay_configs({"depth": "2"})


def test_overlay_preserves_given_bases():
    base = PipelineConfig(width=64, height=64)
    p, _ = overlay_configs({"threads": "3"}, pipeline=base)
    assert p.scatter == base.scatter
    assert p.width == 64 and p.threads == 3


# ---------------------------------------------------------------------------
# synth corpus


def test_synth_writes_counted_valid_images(dataset):
    records = read_manifest(dataset)
    assert len(records) == 30
    labels = [r.label for r in records]
    assert labels == [c for c in synth.CLASSES for _ in range(6)]
    plane = load_image_channel(records[0].path, "B")
    assert plane.shape == (64, 64)
    assert 0.0 <= plane.min() and plane.max() <= 1.0


def test_synth_is_bitwise_deterministic(tmp_path):
    a = synth.synth_dataset(tmp_path / "a", per_class=2, seed=5)
    b = synth.synth_dataset(tmp_path / "b", per_class=2, seed=5)
    for ra, rb in zip(read_manifest(a), read_manifest(b)):
        assert os.path.basename(ra.path) == os.path.basename(rb.path)
        assert open(ra.path, "rb").read() == open(rb.path, "rb").read()
    c = synth.synth_dataset(tmp_path / "c", per_class=2, seed=6)
    diff = [open(r.path, "rb").read() != open(r2.path, "rb").read()
            for r, r2 in zip(read_manifest(a), read_manifest(c))]
    assert any(diff)


def test_synth_guards(tmp_path):
    with pytest.raises(DataError, match="at least 64x64"):
        synth.synth_dataset(tmp_path, width=32)
    with pytest.raises(DataError, match="per_class"):
        synth.synth_dataset(tmp_path, per_class=0)
    with pytest.raises(DataError, match="n_classes"):
        synth.synth_dataset(tmp_path, n_classes=9)
    with pytest.raises(DataError, match="unknown synth class"):
        synth.render_image("rocket", np.random.default_rng(0), 64, 64)


def test_load_labels_rejects_unknown(dataset):
    records = read_manifest(dataset)
    assert load_labels(records[:7], synth.CLASSES).tolist() == [0] * 6 + [1]
    with pytest.raises(DataError, match="label 'nest' not in configured classes"):
        load_labels(records[:1], ("cat", "dog"))


# ---------------------------------------------------------------------------
# extract


def test_extract_writes_aligned_features(dataset, features):
    vecs, header = read_features(features)
    assert vecs.shape == (30, feature_length(64, 64, CFG64.scatter))
    assert header["veclen"] == 1344
    records = read_manifest(dataset)
    for i in (0, 13, 29):
        plane = load_image_channel(records[i].path, "B")
        want = extract_features(plane, CFG64.scatter).astype(np.float32)
        assert np.array_equal(vecs[i], want)


def test_extract_thread_count_does_not_change_bytes(dataset, features, tmp_path):
    out = tmp_path / "threads4.feat"
    report = run_extract(PipelineConfig(width=64, height=64, threads=4), dataset, out)
    assert report.failures == ()
    assert out.read_bytes() == open(features, "rb").read()


def test_extract_records_failures_and_skips(dataset, tmp_path):
    records = read_manifest(dataset)
    work = tmp_path / "broken"
    work.mkdir()
    manifest = work / "manifest.tsv"
    rows = [f"{r.path}\t{r.label}" for r in records[:4]]
    truncated = work / "short.ppm"
    truncated.write_bytes(open(records[0].path, "rb").read()[:40])
    rows.insert(2, f"{truncated}\tkite")
    small = work / "small.ppm"
    write_ppm(small, np.zeros((8, 8, 3), dtype=np.uint8))
    rows.append(f"{small}\tnest")
    manifest.write_text("\n".join(rows) + "\n")

    out = work / "out.feat"
    report = run_extract(CFG64, manifest, out)
    assert report.written == 4
    assert [p for p, _ in report.failures] == [str(truncated), str(small)]
    assert "truncated raster" in report.failures[0][1]
    assert "image is 8x8, config expects 64x64" in report.failures[1][1]
    vecs, _ = read_features(out)
    assert len(vecs) == 4


def test_extract_validates_labels_before_work(dataset, tmp_path):
    records = read_manifest(dataset)
    manifest = tmp_path / "bad_labels.tsv"
    manifest.write_text(f"{records[0].path}\tufo\n")
    with pytest.raises(DataError, match="label 'ufo' not in configured classes"):
        run_extract(CFG64, manifest, tmp_path / "out.feat")
    assert not (tmp_path / "out.feat").exists()


# ---------------------------------------------------------------------------
# train / eval / infer


def test_train_report_shapes(trained):
    path, model, report = trained
    # per-class split: floor(0.8*6)=4 train, 2 test, 5 classes
    assert report.train_count == 20 and report.test_count == 10
    assert len(report.history) == QUICK.epochs
    assert model.dims == (1344, *HIDDEN, 5)
    assert report.matrix.total == 10
    assert len(report.per_class) == 5
    assert 0.0 <= report.train_accuracy <= 1.0
    assert 0.0 <= report.test_accuracy <= 1.0
    on_disk = load_model(path)
    assert models_equal(on_disk, model)


def test_train_is_deterministic(dataset, features, tmp_path):
    runs = []
    for name in ("one", "two"):
        p = tmp_path / f"{name}.bin"
        model, report = run_train(CFG64, QUICK, features, dataset, p)
        runs.append((p.read_bytes(), report))
    assert runs[0][0] == runs[1][0]
    assert runs[0][1].history == runs[1][1].history


def test_train_rejects_misaligned_manifest(dataset, features, tmp_path):
    records = read_manifest(dataset)
    manifest = tmp_path / "extra.tsv"
    manifest.write_text("\n".join(f"{r.path}\t{r.label}" for r in records)
                        + f"\n{records[0].path}\tnest\n")
    with pytest.raises(DataError, match="30 feature records, but manifest .* has 31"):
        run_train(CFG64, QUICK, features, manifest, tmp_path / "m.bin")


def test_train_needs_two_classes(tmp_path):
    manifest = synth.synth_dataset(tmp_path / "mono", per_class=4, seed=1, n_classes=1)
    feat = tmp_path / "mono.feat"
    run_extract(CFG64, manifest, feat)
    with pytest.raises(DataError, match="at least 2 classes"):
        run_train(CFG64, QUICK, feat, manifest, tmp_path / "m.bin")


def test_header_consistency_checks(dataset, features, tmp_path):
    wrong_dims = PipelineConfig(width=96, height=64)
    with pytest.raises(DataError, match="extracted from 64x64 images"):
        run_train(wrong_dims, QUICK, features, dataset, tmp_path / "m.bin")
    wrong_sel = PipelineConfig(width=64, height=64,
                               scatter=ScatterConfig(selection=("S0", "U1", "U2")))
    with pytest.raises(DataError, match="features select"):
        run_train(wrong_sel, QUICK, features, dataset, tmp_path / "m.bin")
    wrong_bases = PipelineConfig(width=64, height=64, scatter=ScatterConfig(
        level_bases=("bior1.1", "bior1.1", "bior1.1")))
    with pytest.raises(DataError, match="features use bases"):
        run_train(wrong_bases, QUICK, features, dataset, tmp_path / "m.bin")


def test_eval_full_set(dataset, features, trained):
    path, _, _ = trained
    report = run_eval(CFG64, features, dataset, path)
    assert report.count == 30
    assert report.matrix.total == 30
    assert 0.0 <= report.accuracy <= 1.0
    assert sorted(r[0] for r in report.per_class) == sorted(synth.CLASSES)


def test_eval_rejects_class_count_mismatch(dataset, features, trained, tmp_path):
    path, _, _ = trained
    two = PipelineConfig(width=64, height=64, classes=("nest", "kite"))
    manifest = tmp_path / "two.tsv"
    records = read_manifest(dataset)[:12]
    manifest.write_text("".join(f"{r.path}\t{r.label}\n" for r in records))
    feat = tmp_path / "two.feat"
    run_extract(two, manifest, feat)
    with pytest.raises(DataError, match="model has 5 outputs, config names 2"):
        run_eval(two, feat, manifest, path)


def test_infer_returns_probabilities(dataset, trained):
    path, model, _ = trained
    records = read_manifest(dataset)
    result = run_infer(CFG64, path, records[0].path)
    assert result.path == records[0].path
    assert result.label in synth.CLASSES
    assert len(result.scores) == 5
    assert abs(sum(result.scores) - 1.0) <= 1e-9
    assert result.label == synth.CLASSES[int(np.argmax(result.scores))]
    again = run_infer(CFG64, path, records[0].path)
    assert again == result


def test_infer_zero_model_gives_uniform_scores(dataset, tmp_path):
    from wavescat.mlp import MlpModel
    dims = (1344, *HIDDEN, 5)
    zero = MlpModel(dims, [np.zeros((dims[j], dims[j + 1])) for j in range(3)],
                    [np.zeros(dims[j + 1]) for j in range(3)])
    path = tmp_path / "zero.bin"
    save_model(zero, path)
    records = read_manifest(dataset)
    result = run_infer(CFG64, path, records[5].path)
    assert result.scores == (0.2,) * 5
    assert result.label == synth.CLASSES[0]


# ---------------------------------------------------------------------------
# bench


def test_bench_report_invariants(dataset, trained):
    path, _, _ = trained
    records = read_manifest(dataset)
    report = run_bench(CFG64, path, records[0].path, frames=3)
    assert report.image_dims == (64, 64)
    assert report.frames_processed == 3
    assert report.fps == 3 / report.wall_seconds
    extract_ms, classify_ms = report.per_stage_ms
    assert extract_ms > 0 and classify_ms > 0
    assert (extract_ms + classify_ms) * 3 <= report.wall_seconds * 1e3 * 1.5


def test_bench_guards(dataset, trained, tmp_path):
    path, _, _ = trained
    records = read_manifest(dataset)
    with pytest.raises(DataError, match="frames must be >= 1"):
        run_bench(CFG64, path, records[0].path, frames=0)
    hd = PipelineConfig()  # 1280x720
    with pytest.raises(DataError, match="image is 64x64, config expects 1280x720"):
        run_bench(hd, path, records[0].path, frames=1)


# ---------------------------------------------------------------------------
# end-to-end determinism


def test_end_to_end_bitwise_reproducible(tmp_path):
    blobs = []
    for side in ("left", "right"):
        work = tmp_path / side
        manifest = synth.synth_dataset(work / "data", per_class=3, seed=3)
        feat = work / "f.feat"
        run_extract(CFG64, manifest, feat)
        model_path = work / "m.bin"
        run_train(CFG64, TrainConfig(epochs=5, seed=3), feat, manifest, model_path)
        blobs.append((feat.read_bytes(), model_path.read_bytes()))
    assert blobs[0] == blobs[1]
