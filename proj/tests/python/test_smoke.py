"""Smoke tests for the python bindings and the CLI."""

import json
import os
import subprocess
import sys
import zlib

import pytest

import kolmac


def toy_matrix():
    triplets = [
        (0, 0, 5), (0, 1, 3), (0, 2, 4),
        (1, 0, 4), (1, 2, 2),
        (2, 1, 1), (2, 2, 5), (2, 3, 4),
        (3, 0, 2), (3, 3, 3),
    ]
    return kolmac.RatingMatrix.from_triplets(triplets, 4, 4)


def test_matrix_basics():
    m = toy_matrix()
    assert m.n_users == 4
    assert m.n_items == 4
    assert m.observed_count == 10
    assert m.at(0, 0) == 5
    assert m.at(1, 1) == 0
    assert m.row(1) == [(0, 4), (2, 2)]
    assert m.col(0) == [(0, 5), (1, 4), (3, 2)]


def test_from_triplets_rejects_duplicates():
    with pytest.raises(ValueError):
        kolmac.RatingMatrix.from_triplets([(0, 0, 5), (0, 0, 4)], 1, 1)


def test_description_and_similarities_match_zlib():
    m = toy_matrix()
    assert kolmac.encode_entity(m, "user", 1) == "0:4;2:2"
    profile = kolmac.CompressorProfile()
    data = "0:4;2:2"
    assert kolmac.compressed_length(data, profile) == len(zlib.compress(data.encode(), 9))

    x, y = "1:5;2:5;3:5", "1:1;2:1;3:1"
    cx = len(zlib.compress(x.encode(), 9))
    cy = len(zlib.compress(y.encode(), 9))
    cpair = (len(zlib.compress((x + y).encode(), 9)) + len(zlib.compress((y + x).encode(), 9))) / 2
    expected = 1.0 - (cpair - min(cx, cy)) / max(cx, cy)
    assert kolmac.compression_similarity(x, y) == pytest.approx(expected)
    assert kolmac.kolmogorov_similarity(x, y) == pytest.approx(1.0 / (1.0 + abs(cx - cy)))


def test_similarity_matrix_invariants():
    m = toy_matrix()
    for measure in ("ks", "cs"):
        s = kolmac.build_similarity(m, "user", measure)
        assert s.order == 4
        for i in range(4):
            assert s.at(i, i) == 1.0
            for j in range(4):
                assert s.at(i, j) == s.at(j, i)
                assert 0.0 <= s.at(i, j) <= 1.0


def test_complete_and_predict():
    m = toy_matrix()
    su = kolmac.build_similarity(m, "user", "ks")
    si = kolmac.build_similarity(m, "item", "ks")
    cfg = kolmac.CompletionConfig(alpha=0.5)

    done = kolmac.complete_matrix(m, su, si, cfg)
    assert len(done.predictions) == 16 - 10
    for cell in done.predictions:
        assert 1.0 <= cell.prediction.score <= 5.0
        lone = kolmac.predict(m, su, si, cfg, cell.user, cell.item)
        assert lone.score == cell.prediction.score

    ranked = kolmac.recommend_top_k(m, su, si, cfg, 1, 2)
    assert len(ranked) == 2
    assert ranked[0].prediction.score >= ranked[1].prediction.score


def test_cross_validate_and_rmse():
    m = kolmac.generate_synthetic(8, 10, (1, 5), seed=3)
    report = kolmac.cross_validate(m, k=5, seed=1, measure="ks", alpha=0.5)
    assert len(report.folds) == 5
    assert report.mean_rmse == pytest.approx(
        sum(f.rmse for f in report.folds) / 5.0
    )
    parsed = json.loads(report.to_json())
    assert parsed["method"] == "kolmac-ks"

    truth = [kolmac.RatedEntry(0, 0, 4), kolmac.RatedEntry(0, 1, 2)]
    assert kolmac.rmse(truth, {(0, 0): 4.0, (0, 1): 2.0}) == 0.0
    assert kolmac.rmse(truth, {(0, 0): 5.0, (0, 1): 1.0}) == pytest.approx(1.0)


def test_folds_partition():
    m = toy_matrix()
    folds = kolmac.split_folds(m, 5, seed=9)
    assert folds.k == 5
    assert sum(folds.fold_size(f) for f in range(1, 6)) == m.observed_count
    masked = kolmac.mask_fold(m, folds, 1)
    assert masked.train.observed_count + len(masked.test) == m.observed_count


# --- CLI ---------------------------------------------------------------

CLI = os.environ.get("KOLMAC_CLI")

needs_cli = pytest.mark.skipif(not CLI or not os.path.exists(CLI or ""),
                               reason="KOLMAC_CLI not set")


@needs_cli
def test_cli_synth_evaluate_roundtrip(tmp_path):
    out_dir = tmp_path / "syn"
    subprocess.run(
        [CLI, "synth", "--count", "1", "--rows", "8", "--cols", "10",
         "--seed", "5", "--out", str(out_dir)],
        check=True, capture_output=True)
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["rows"] == 8
    csv_path = out_dir / manifest["matrices"][0]["file"]

    # loaded back, the matrix is full and full-rank (numpy as the oracle)
    numpy = pytest.importorskip("numpy")
    loaded = kolmac.load_dataset(str(csv_path), "csv")
    dense = numpy.zeros((8, 10))
    for e in loaded.matrix.entries():
        dense[e.user, e.item] = e.rating
    assert loaded.matrix.observed_count == 80
    assert numpy.linalg.matrix_rank(dense) == 8

    def run_eval(stem):
        subprocess.run(
            [CLI, "evaluate", "--dataset", str(csv_path), "--format", "csv",
             "--measure", "ks", "--alpha", "0.5", "--folds", "5", "--seed", "2",
             "--out", str(tmp_path / stem)],
            check=True, capture_output=True)
        return json.loads((tmp_path / (stem + ".json")).read_text())

    first = run_eval("r1")
    second = run_eval("r2")
    assert first["mean_rmse"] == second["mean_rmse"]
    assert [f["rmse"] for f in first["folds"]] == [f["rmse"] for f in second["folds"]]
    assert len(first["folds"]) == 5


@needs_cli
def test_cli_validation_errors(tmp_path):
    bad = subprocess.run(
        [CLI, "evaluate", "--dataset", "x.csv", "--format", "csv", "--alpha", "1.5"],
        capture_output=True, text=True)
    assert bad.returncode != 0
    assert "--alpha" in bad.stderr

    missing_user = subprocess.run(
        [CLI, "recommend", "--dataset", "nope.csv", "--format", "csv", "--user", "1"],
        capture_output=True, text=True)
    assert missing_user.returncode == 1


@needs_cli
def test_cli_recommend_matches_complete(tmp_path):
    csv_path = tmp_path / "toy.csv"
    m = toy_matrix()
    kolmac.write_ratings_csv(str(csv_path), m)

    completed = subprocess.run(
        [CLI, "complete", "--dataset", str(csv_path), "--format", "csv",
         "--measure", "ks", "--alpha", "0.5"],
        check=True, capture_output=True, text=True).stdout
    scores = {}
    for line in completed.strip().splitlines()[1:]:
        user, item, score, source = line.split(",")
        if source != "observed" and user == "1":
            scores[int(item)] = float(score)

    ranked = subprocess.run(
        [CLI, "recommend", "--dataset", str(csv_path), "--format", "csv",
         "--measure", "ks", "--alpha", "0.5", "--user", "1", "--top-k", "10"],
        check=True, capture_output=True, text=True).stdout
    lines = ranked.strip().splitlines()[1:]
    assert len(lines) == len(scores)
    expected = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    for line, (item, score) in zip(lines, expected):
        _, got_item, got_score = line.split(",")
        assert int(got_item) == item
        assert float(got_score) == pytest.approx(score)
