import json
import shutil
import subprocess

import pytest

from graphsumm.cli import main
from graphsumm.metrics import write_json


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A synthetic corpus plus one trained RGCN run, built via the CLI."""
    root = tmp_path_factory.mktemp("cli")
    write_json(root / "spec.json", {"n_meetings": 6, "nodes_min": 8,
                                    "nodes_max": 10, "embedding_dim": 4,
                                    "seed": 9})
    write_json(root / "config.json", {
        "model": {"kind": "RGCN", "input_dim": 4, "n_layers": 1, "hidden_dim": 4},
        "train": {"max_epochs": 2, "patience": 2, "seeds": [1]},
    })
    data = root / "data"
    assert main(["synth", "--config", str(root / "spec.json"),
                 "--out", str(data)]) == 0
    run = root / "run"
    assert main(["train",
                 "--corpus", str(data / "corpus"),
                 "--graphs", str(data / "graphs"),
                 "--embeddings", str(data / "embeddings"),
                 "--split", str(data / "split.json"),
                 "--config", str(root / "config.json"),
                 "--out", str(run)]) == 0
    return root


def _data_flags(root):
    data = root / "data"
    return ["--corpus", str(data / "corpus"),
            "--graphs", str(data / "graphs"),
            "--embeddings", str(data / "embeddings"),
            "--split", str(data / "split.json")]


def test_synth_wrote_expected_layout(workspace):
    data = workspace / "data"
    assert len(list((data / "corpus").glob("*.jsonl"))) == 6
    assert len(list((data / "graphs").glob("*.json"))) == 6
    assert len(list((data / "embeddings").glob("*.demb"))) == 6
    assert (data / "split.json").exists()
    assert (data / "spec.json").exists()


def test_train_wrote_metrics_and_checkpoints(workspace):
    run = workspace / "run"
    payload = json.loads((run / "metrics.json").read_text())
    assert payload["aggregate"]["n_runs"] == 1
    assert (run / "seed1.json").exists()
    assert (run / "seed1.bin").exists()


def test_evaluate_writes_report(workspace, tmp_path):
    code = main(["evaluate", *_data_flags(workspace),
                 "--checkpoint", str(workspace / "run" / "seed1"),
                 "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "evaluation.json").read_text())
    assert "classification" in report and "strategies" in report


def test_evaluate_prints_json_without_out(workspace, capsys):
    code = main(["evaluate", *_data_flags(workspace),
                 "--checkpoint", str(workspace / "run" / "seed1")])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report["classification"]) == {"precision", "recall", "f1"}


def test_summarize_writes_one_file_per_test_meeting(workspace, tmp_path):
    code = main(["summarize", *_data_flags(workspace),
                 "--checkpoint", str(workspace / "run" / "seed1"),
                 "--strategy", "RankByLogits",
                 "--out", str(tmp_path)])
    assert code == 0
    files = sorted(tmp_path.glob("*.RankByLogits.json"))
    assert len(files) == 1  # one test-split meeting in a 6-meeting corpus
    obj = json.loads(files[0].read_text())
    assert obj["strategy"] == "RankByLogits"
    assert obj["word_count"] <= 1000


def test_summarize_lead_baseline_needs_no_model_inputs(workspace, tmp_path):
    data = workspace / "data"
    code = main(["summarize",
                 "--corpus", str(data / "corpus"),
                 "--split", str(data / "split.json"),
                 "--strategy", "LeadN",
                 "--out", str(tmp_path)])
    assert code == 0
    files = sorted(tmp_path.glob("*.LeadN.json"))
    assert len(files) == 1
    obj = json.loads(files[0].read_text())
    assert obj["strategy"] == "LeadN"
    assert obj["word_count"] > 0


def test_missing_checkpoint_is_a_clean_error(workspace, tmp_path, capsys):
    code = main(["summarize", *_data_flags(workspace),
                 "--checkpoint", str(workspace / "run" / "no-such-prefix"),
                 "--strategy", "RankByLogits",
                 "--out", str(tmp_path)])
    assert code == 2
    assert "checkpoint not found" in capsys.readouterr().err


def test_ablate_hidden_edges(workspace, tmp_path):
    code = main(["ablate", *_data_flags(workspace),
                 "--config", str(workspace / "config.json"),
                 "--kind", "HiddenEdges",
                 "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "ablation.HiddenEdges.json").read_text())
    assert list(report["cells"]) == ["0.00", "0.25", "0.50", "0.75", "1.00"]
    assert (tmp_path / "ablation.HiddenEdges.csv").exists()


def test_stats_compares_dirs_and_buckets(workspace, tmp_path):
    data = workspace / "data"
    code = main(["stats", str(data / "graphs"),
                 "--corpus", str(data / "corpus"),
                 "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "stats.json").read_text())
    assert "graphs" in report["parsers"]
    assert set(report["centrality"]["buckets"]) == \
        {"0", "1", "2", "3", "4", "5plus"}


def test_missing_flags_exit_2(workspace, capsys):
    code = main(["train", *_data_flags(workspace)])
    assert code == 2
    assert "--config" in capsys.readouterr().err


def test_synth_requires_out(capsys):
    assert main(["synth"]) == 2
    assert "--out" in capsys.readouterr().err


def test_broken_corpus_exits_2(workspace, tmp_path, capsys):
    bad = tmp_path / "corpus"
    bad.mkdir()
    (bad / "m0.jsonl").write_text('{"index": 0, "speaker": "A"}\n')
    data = workspace / "data"
    code = main(["train",
                 "--corpus", str(bad),
                 "--embeddings", str(data / "embeddings"),
                 "--split", str(data / "split.json"),
                 "--config", str(workspace / "config.json"),
                 "--out", str(tmp_path / "run")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_console_script_is_installed():
    exe = shutil.which("graphsumm")
    assert exe is not None
    proc = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("train", "evaluate", "summarize", "ablate", "stats", "synth"):
        assert sub in proc.stdout
