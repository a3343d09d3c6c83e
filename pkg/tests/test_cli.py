import filecmp
import json

import pytest

from srsdkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def easy_data(tmp_path_factory):
    root = tmp_path_factory.mktemp("data") / "easy"
    code = main(["generate", "--set", "easy", "--rows", "200", "--seed", "3",
                 "--out", str(root)])
    assert code == 0
    return root


def test_generate_layout_and_manifest(easy_data, capsys):
    capsys.readouterr()
    dirs = [p for p in easy_data.iterdir() if p.is_dir()]
    assert len(dirs) == 30
    for name in ("train.txt", "val.txt", "test.txt", "true_eq.txt"):
        assert (easy_data / "I.12.1" / name).is_file()
    manifest = json.loads((easy_data / "manifest.json").read_text())
    assert manifest["config"]["master_seed"] == 3
    assert manifest["config"]["rows"] == 200
    assert len(manifest["problems"]) == 30
    ids = [p["id"] for p in manifest["problems"]]
    assert ids == sorted(ids)


def test_generate_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        code, _, _ = run(capsys, "generate", "--set", "easy", "--rows", "50",
                         "--seed", "9", "--out", str(out))
        assert code == 0
    mismatch = []
    for path in sorted(a.rglob("*")):
        if path.is_file():
            twin = b / path.relative_to(a)
            if not filecmp.cmp(path, twin, shallow=False):
                mismatch.append(path.name)
    assert mismatch == []


def test_generate_rejects_zero_rows(capsys):
    code, _, err = run(capsys, "generate", "--set", "easy", "--rows", "0",
                       "--out", "/tmp/nowhere")
    assert code == 1
    assert "rows" in err


def test_unknown_flag_is_usage_error(capsys):
    code, _, _ = run(capsys, "generate", "--frobnicate", "1", "--out", "/tmp/x")
    assert code == 1


def test_ned_golden_pair(tmp_path, capsys):
    pred = tmp_path / "pred.txt"
    truth = tmp_path / "truth.txt"
    pred.write_text("mul2 C pow X2 C\n")
    truth.write_text("mul3 C X1 pow X2 C\n")
    code, out, _ = run(capsys, "ned", "--pred", str(pred), "--truth", str(truth))
    assert code == 0
    payload = json.loads(out)
    assert payload["ned"] == 0.16667
    assert payload["edit_distance"] == 1.0
    assert payload["truth_nodes"] == 6


def test_ned_accepts_true_eq_files(easy_data, capsys):
    path = str(easy_data / "I.12.4" / "true_eq.txt")
    code, out, _ = run(capsys, "ned", "--pred", path, "--truth", path)
    assert code == 0
    assert json.loads(out)["ned"] == 0.0


def test_ned_missing_file_is_data_error(capsys):
    code, _, err = run(capsys, "ned", "--pred", "/nonexistent/p.txt",
                       "--truth", "/nonexistent/t.txt")
    assert code == 2
    assert err


def test_ned_malformed_tokens_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("add2 X1\n")
    code, _, _ = run(capsys, "ned", "--pred", str(bad), "--truth", str(bad))
    assert code == 2


def test_eval_identical_dirs(easy_data, capsys):
    code, out, _ = run(capsys, "eval", "--pred-dir", str(easy_data),
                       "--data-dir", str(easy_data))
    assert code == 0
    payload = json.loads(out)
    summary = payload["summary"]["easy"]
    assert summary["accuracy_rate"] == 1.0
    assert summary["solution_rate"] == 1.0
    assert summary["mean_normalized_edit_distance"] == 0.0
    assert summary["count"] == 30
    assert payload["problems"][0]["selection_score"] == 0.0


def test_eval_missing_predictions_is_data_error(tmp_path, easy_data, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    code, _, _ = run(capsys, "eval", "--pred-dir", str(empty),
                     "--data-dir", str(easy_data))
    assert code == 2


def test_complexity_rows_and_csv(tmp_path, capsys):
    csv_path = tmp_path / "scatter.csv"
    code, out, _ = run(capsys, "complexity", "--out", str(csv_path))
    assert code == 0
    payload = json.loads(out)
    assert len(payload["rows"]) == 120
    sets = {r["set"] for r in payload["rows"]}
    assert sets == {"easy", "medium", "hard"}
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "id,op_count,domain_range,set"
    assert len(lines) == 121


def test_synth_corpus_and_leakcheck(tmp_path, easy_data, capsys):
    corpus = tmp_path / "corpus"
    code, out, _ = run(capsys, "synth", "--n", "5", "--seed", "2", "--rows", "120",
                       "--out", str(corpus))
    assert code == 0
    manifest = json.loads(out)
    assert len(manifest["equations"]) == 5
    for entry in manifest["equations"]:
        assert (corpus / entry["equation_file"]).is_file()
        assert 1 <= len(entry["datasets"]) <= 10
        for d in entry["datasets"]:
            if d["status"] == "ok":
                assert (corpus / d["dir"] / "true_eq.txt").is_file()
                assert all(-8 <= k <= 8 for k in d["k"].values())

    code, out, _ = run(capsys, "leakcheck", "--corpus", str(easy_data),
                       "--catalog", str(easy_data))
    assert code == 0
    assert json.loads(out)["mean_iou"] == 1.0


def test_leakcheck_synth_vs_catalog(tmp_path, easy_data, capsys):
    corpus = tmp_path / "c2"
    run(capsys, "synth", "--n", "4", "--seed", "8", "--rows", "100", "--out", str(corpus))
    code, out, _ = run(capsys, "leakcheck", "--corpus", str(corpus),
                       "--catalog", str(easy_data))
    assert code == 0
    payload = json.loads(out)
    assert 0.0 <= payload["mean_iou"] <= 1.0


def test_discover_and_eval_roundtrip(tmp_path, easy_data, capsys):
    preds = tmp_path / "preds"
    code, out, _ = run(capsys, "discover", "--data-dir", str(easy_data),
                       "--problems", "I.12.1", "--seeds", "2", "--seed", "0",
                       "--out", str(preds))
    assert code == 0
    manifest = json.loads(out)
    assert manifest["problems"][0]["id"] == "I.12.1"
    assert (preds / "I.12.1.txt").is_file()
    code, out, _ = run(capsys, "eval", "--pred-dir", str(preds),
                       "--data-dir", str(easy_data))
    assert code == 0
    payload = json.loads(out)
    row = [p for p in payload["problems"] if p["id"] == "I.12.1"][0]
    assert row["symbolic_solution"] is True
    assert len(payload["skipped"]) == 29


def test_discover_rejects_bad_gp_config(tmp_path, easy_data, capsys):
    cfg = tmp_path / "gp.json"
    cfg.write_text(json.dumps({"population_size": 1}))
    code, _, _ = run(capsys, "discover", "--data-dir", str(easy_data),
                     "--gp-config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 1
    cfg.write_text(json.dumps({"nope": 3}))
    code, _, _ = run(capsys, "discover", "--data-dir", str(easy_data),
                     "--gp-config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 1


def test_seed_env_fallback(tmp_path, easy_data, capsys, monkeypatch):
    monkeypatch.setenv("SRSD_SEED", "77")
    out_dir = tmp_path / "env"
    code, out, _ = run(capsys, "generate", "--set", "easy", "--rows", "20",
                       "--out", str(out_dir))
    assert code == 0
    assert json.loads(out)["config"]["master_seed"] == 77


def test_generate_with_noise_perturbs_targets_only(tmp_path, capsys):
    clean_dir, noisy_dir = tmp_path / "clean", tmp_path / "noisy"
    run(capsys, "generate", "--set", "easy", "--rows", "100", "--seed", "6",
        "--out", str(clean_dir))
    code, out, _ = run(capsys, "generate", "--set", "easy", "--rows", "100",
                       "--seed", "6", "--noise", "0.01", "--out", str(noisy_dir))
    assert code == 0
    assert json.loads(out)["config"]["noise_level"] == 0.01
    import numpy as np
    from srsdkit.datagen import read
    clean = read(clean_dir / "I.12.1" / "train.txt")
    noisy = read(noisy_dir / "I.12.1" / "train.txt")
    assert (clean.X == noisy.X).all()
    assert not (clean.y == noisy.y).all()


def test_generate_custom_split_ratios(tmp_path, capsys):
    out_dir = tmp_path / "custom"
    code, out, _ = run(capsys, "generate", "--set", "easy", "--rows", "100",
                       "--seed", "2", "--split", "0.6,0.2,0.2", "--out", str(out_dir))
    assert code == 0
    entry = [p for p in json.loads(out)["problems"] if p["id"] == "I.12.1"][0]
    assert entry["splits"] == {"train": 60, "val": 20, "test": 20}
    code, _, _ = run(capsys, "generate", "--set", "easy", "--rows", "100",
                     "--split", "0.5,0.5,0.5", "--out", str(tmp_path / "bad"))
    assert code == 1  # invalid flag value is a usage error


def test_generate_from_custom_catalog_file(tmp_path, capsys):
    from srsdkit.catalog import builtin_problems, save

    catalog_path = tmp_path / "two.json"
    save(builtin_problems("easy")[:2], catalog_path)
    out_dir = tmp_path / "custom-data"
    code, out, _ = run(capsys, "generate", "--catalog", str(catalog_path),
                       "--set", "easy", "--rows", "50", "--seed", "1",
                       "--out", str(out_dir))
    assert code == 0
    assert len(json.loads(out)["problems"]) == 2
    code, _, _ = run(capsys, "generate", "--catalog", str(catalog_path),
                     "--set", "hard", "--rows", "50", "--out", str(tmp_path / "x"))
    assert code == 2  # no hard problems in that file


def test_complexity_set_filter(capsys):
    code, out, _ = run(capsys, "complexity", "--set", "medium")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 40
    assert {r["set"] for r in rows} == {"medium"}


def test_commands_do_not_mutate_inputs(tmp_path, easy_data, capsys):
    snapshot = {
        p: p.read_bytes() for p in sorted(easy_data.rglob("*")) if p.is_file()
    }
    run(capsys, "eval", "--pred-dir", str(easy_data), "--data-dir", str(easy_data))
    run(capsys, "leakcheck", "--corpus", str(easy_data), "--catalog", str(easy_data))
    run(capsys, "discover", "--data-dir", str(easy_data), "--problems", "I.12.1",
        "--seeds", "1", "--out", str(tmp_path / "p"))
    for path, before in snapshot.items():
        assert path.read_bytes() == before, path


def test_workers_do_not_change_output(tmp_path, capsys):
    a, b = tmp_path / "w1", tmp_path / "w2"
    run(capsys, "generate", "--set", "easy", "--rows", "40", "--seed", "5",
        "--out", str(a))
    run(capsys, "generate", "--set", "easy", "--rows", "40", "--seed", "5",
        "--workers", "2", "--out", str(b))
    for path in sorted(a.rglob("*.txt")):
        twin = b / path.relative_to(a)
        assert filecmp.cmp(path, twin, shallow=False), path
