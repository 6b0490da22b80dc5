from __future__ import annotations

import json
import random

import pytest

from procperf.cli import main
from procperf.ingest import bundled_fixture_path
from procperf.metrics import EvalSet, Sample
from procperf.report import dump_predictions

from .test_perf import C2D_G64

FIXTURE_HEADER = "model_type,backbone,top1,top5,auc_norm,j_max,k_at_jmax,t2,t4,t8,t16,t32,t64\n"


@pytest.fixture
def small_inputs(write, small_eval):
    classes = write("in/classes.txt", "applauding\nbaking\ncrashing\ndescending\n")
    preds = write("in/small.jsonl", dump_predictions(small_eval))
    return preds, classes


def _run(*argv):
    return main([str(a) for a in argv])


def _tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_evaluate_small(tmp_path, small_inputs):
    preds, classes = small_inputs
    out = tmp_path / "out"
    assert _run("evaluate", "--predictions", preds, "--classes", classes, "--out", out) == 0
    doc = json.loads((out / "metrics.json").read_text())
    assert doc["schema_version"] == 1
    assert round(doc["top1"], 4) == 0.6667
    assert round(doc["auc_norm"], 4) == 0.7083
    assert round(doc["j_max"], 4) == 0.4167 and doc["k_at_jmax"] == 1
    assert doc["top5"] is None
    assert doc["hits"] == [0, 2, 2, 3, 3]
    assert {p.name for p in out.iterdir()} == {"metrics.json", "table.md", "proc.svg", "youden.svg"}


def test_evaluate_csv_no_plots(tmp_path, small_inputs):
    preds, classes = small_inputs
    out = tmp_path / "out"
    assert _run("evaluate", "--predictions", preds, "--classes", classes, "--out", out,
                "--format", "csv", "--plots", "--with-chance") == 0
    assert {p.name for p in out.iterdir()} == {"metrics.json", "table.csv"}
    assert (out / "table.csv").read_text().splitlines()[1].startswith("random chance,")


def test_evaluate_missing_manifest(tmp_path, small_inputs, capsys):
    preds, _ = small_inputs
    missing = tmp_path / "nope.txt"
    out = tmp_path / "out"
    assert _run("evaluate", "--predictions", preds, "--classes", missing, "--out", out) == 1
    assert str(missing) in capsys.readouterr().err
    assert not out.exists()


def test_evaluate_invalid_writes_nothing(tmp_path, write, capsys):
    classes = write("c.txt", "a\nb\n")
    preds = write("p.jsonl", '{"id": "x", "label_index": 0, "scores": [1, 2]}\n{"id": "y", "label_index": 0, "scores": [1]}\n')
    out = tmp_path / "out"
    out.mkdir()
    assert _run("evaluate", "--predictions", preds, "--classes", classes, "--out", out) == 1
    err = capsys.readouterr().err
    assert ":2:" in err and "'y'" in err
    assert list(out.iterdir()) == []


def test_evaluate_random_339(tmp_path, write):
    rng = random.Random(2020)
    c, n = 339, 10_000
    classes = write("c.txt", "".join(f"class_{i}\n" for i in range(c)))
    lines = []
    for i in range(n):
        scores = [rng.randrange(1_000_000) for _ in range(c)]
        lines.append(json.dumps({"id": f"s{i}", "label_index": rng.randrange(c), "scores": scores}))
    preds = write("p.jsonl", "\n".join(lines) + "\n")
    out = tmp_path / "out"
    assert _run("evaluate", "--predictions", preds, "--classes", classes, "--out", out, "--plots") == 0
    doc = json.loads((out / "metrics.json").read_text())
    assert abs(doc["auc_norm"] - 0.5) <= 0.02


def _table3_g64_log(write):
    rows = ["model,gpus,epoch,seconds"]
    rows += ["ResNet50,64,0,335.4", "Inception-ResNet-v2,64,0,413.5", "MobileNet-v2,64,0,460.7"]
    return write("t.csv", "\n".join(rows) + "\n")


def test_perf_total_hours(tmp_path, write):
    out = tmp_path / "out"
    assert _run("perf", "--timings", _table3_g64_log(write), "--baseline-g", 64, "--out", out) == 0
    doc = json.loads((out / "perf.json").read_text())
    hours = {m: round(v["total_hours"]["64"], 2) for m, v in doc["models"].items()}
    assert hours == {"Inception-ResNet-v2": 7.47, "MobileNet-v2": 8.32, "ResNet50": 6.06}
    assert (out / "scaling.svg").exists() and (out / "perf.md").exists()


def test_perf_fixtures_default_baseline(tmp_path):
    out = tmp_path / "out"
    assert _run("perf", "--fixtures", "@table3", "--out", out) == 0
    doc = json.loads((out / "perf.json").read_text())
    r50 = doc["models"]["C2D ResNet50"]
    assert r50["speedup"]["2"] == 1.0
    assert round(r50["speedup"]["64"], 2) == 45.50
    assert round(r50["total_hours"]["64"], 2) == 6.06


def test_perf_single_group(tmp_path, write):
    log = write("t.csv", "model,gpus,epoch,seconds\nm,8,0,12.5\nm,8,1,12.5\n")
    out = tmp_path / "out"
    assert _run("perf", "--timings", log, "--baseline-g", 8, "--out", out) == 0
    assert json.loads((out / "perf.json").read_text())["models"]["m"]["speedup"] == {"8": 1.0}


def test_perf_missing_baseline(tmp_path, write, capsys):
    log = write("t.csv", "model,gpus,epoch,seconds\nlonely,8,0,12.5\n")
    assert _run("perf", "--timings", log, "--out", tmp_path / "out") == 1
    assert "lonely" in capsys.readouterr().err


def test_perf_exclude_first(tmp_path, write):
    log = write("t.csv", "model,gpus,epoch,seconds\nm,2,0,500\nm,2,1,100\nm,2,2,100\n")
    out = tmp_path / "out"
    assert _run("perf", "--timings", log, "--exclude-first", 1, "--out", out) == 0
    assert json.loads((out / "perf.json").read_text())["models"]["m"]["seconds_per_epoch"] == {"2": 100.0}


def _metrics_file(tmp_path, name, ev):
    d = tmp_path / name
    (d / "in").mkdir(parents=True)
    (d / "in" / "c.txt").write_text("".join(f"c{i}\n" for i in range(ev.num_classes)))
    (d / "in" / "p.jsonl").write_text(dump_predictions(ev))
    assert _run("evaluate", "--predictions", d / "in" / "p.jsonl", "--classes", d / "in" / "c.txt",
                "--model", name, "--out", d, "--plots") == 0
    return d / "metrics.json"


def _noisy_eval(c, n, seed):
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        label = rng.randrange(c)
        scores = [rng.random() + (0.6 if j == label else 0.0) for j in range(c)]
        rows.append((scores, label))
    return EvalSet.from_rows(c, rows)


def test_compare_mixed_class_counts(tmp_path):
    m15 = _metrics_file(tmp_path, "fifteen", _noisy_eval(15, 200, 1))
    m339 = _metrics_file(tmp_path, "big", _noisy_eval(339, 100, 2))
    out = tmp_path / "cmp"
    assert _run("compare", "--metrics", m15, m339, "--out", out) == 0
    doc = json.loads((out / "compare.json").read_text())
    ranking = doc["ranking"]
    assert {r["num_classes"] for r in ranking} == {15, 339}
    assert ranking[0]["auc_norm"] >= ranking[1]["auc_norm"]
    assert doc["pareto_front"] == [] and not (out / "tradeoff.svg").exists()


def test_compare_tied(tmp_path):
    ev = EvalSet(3, (Sample("a", 0, (3.0, 2.0, 1.0)), Sample("b", 1, (3.0, 2.0, 1.0))))
    zed = _metrics_file(tmp_path, "zed", ev)
    abe = _metrics_file(tmp_path, "abe", ev)
    out = tmp_path / "cmp"
    assert _run("compare", "--metrics", zed, abe, "--out", out) == 0
    ranking = json.loads((out / "compare.json").read_text())["ranking"]
    assert [(r["rank"], r["model"]) for r in ranking] == [(1, "abe"), (1, "zed")]


def test_compare_c2d_fixtures(tmp_path, write):
    lines = bundled_fixture_path().read_text().splitlines()
    c2d = [l for l in lines[1:] if l.startswith("C2D,")]
    assert len(c2d) == 9
    fixtures = write("c2d.csv", FIXTURE_HEADER + "\n".join(c2d) + "\n")
    out = tmp_path / "cmp"
    assert _run("compare", "--fixtures", fixtures, "--out", out) == 0
    doc = json.loads((out / "compare.json").read_text())
    assert doc["pareto_front"] == ["C2D ResNet50", "C2D Inception-ResNet-v2"]
    times = {r["model"].removeprefix("C2D "): (r["time_per_epoch"], r["auc_norm"]) for r in doc["ranking"]}
    assert times == C2D_G64
    assert (out / "tradeoff.svg").exists()


def test_compare_metrics_with_timings(tmp_path, write):
    fast = _metrics_file(tmp_path, "fast", _noisy_eval(10, 100, 3))
    slow = _metrics_file(tmp_path, "slow", _noisy_eval(10, 100, 4))
    log = write("t.csv", "model,gpus,epoch,seconds\nfast,64,0,10\nslow,64,0,20\n")
    out = tmp_path / "cmp"
    assert _run("compare", "--metrics", fast, slow, "--timings", log, "--out", out) == 0
    doc = json.loads((out / "compare.json").read_text())
    assert "fast" in doc["pareto_front"]
    assert (out / "tradeoff.svg").exists()


def test_report_from_metrics_dir(tmp_path, small_inputs):
    preds, classes = small_inputs
    runs = tmp_path / "runs"
    assert _run("evaluate", "--predictions", preds, "--classes", classes, "--out", runs / "a", "--plots") == 0
    out = tmp_path / "rep"
    assert _run("report", "--input", runs, "--out", out, "--plots", "proc") == 0
    assert {p.name for p in out.iterdir()} == {"proc.svg", "table.md"}


def test_report_empty_dir(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    assert _run("report", "--input", tmp_path / "empty", "--out", tmp_path / "rep") == 1
    assert "no metrics found" in capsys.readouterr().err


def test_report_bundled_fixtures(tmp_path):
    out = tmp_path / "rep"
    assert _run("report", "--fixtures", "@table3", "--out", out) == 0
    assert {p.name for p in out.iterdir()} == {"table.md", "scaling.svg", "tradeoff.svg"}


def test_idempotent(tmp_path, small_inputs):
    preds, classes = small_inputs
    out = tmp_path / "out"
    args = ("evaluate", "--predictions", preds, "--classes", classes, "--out", out)
    assert _run(*args) == 0
    first = _tree(out)
    assert _run(*args) == 0
    assert _tree(out) == first
