import csv
import json

import numpy as np
import pytest

from graphsumm.errors import ContractError, DataError
from graphsumm.experiments import (DEFAULT_RATE_GRID, DEFAULT_RELATION_SETS,
                                   AblationPlan, cell_basis, centrality_report,
                                   evaluate_model, parser_comparison,
                                   run_rate_sweeps, run_relation_set_ablation,
                                   run_single_relation_ablation, save_sweep_csv,
                                   _meeting_seed)
from graphsumm.graphs import RelationType, mask_relations, save_graph
from graphsumm.models import ModelConfig
from graphsumm.synthetic import SyntheticSpec, generate_synthetic
from graphsumm.training import TrainConfig, aggregate_runs, train

from conftest import make_graph, make_meeting


@pytest.fixture(scope="module")
def corpus():
    return generate_synthetic(SyntheticSpec(n_meetings=6, nodes_min=8,
                                            nodes_max=10, embedding_dim=4,
                                            seed=17))


MODEL = ModelConfig(kind="RGCN", input_dim=4, n_layers=1, hidden_dim=4)
QUICK = TrainConfig(max_epochs=2, patience=2, seeds=(1,))


def test_ablation_plan_validation():
    with pytest.raises(ContractError):
        AblationPlan(kind="Shuffle")
    with pytest.raises(ContractError):
        AblationPlan(kind="HiddenEdges", rates=(0.5, 1.5))
    with pytest.raises(ContractError):
        AblationPlan(kind="SingleRelation", relations=("Unknown",))
    plan = AblationPlan(kind="SingleRelation", relations=("Result",))
    assert plan.rates == DEFAULT_RATE_GRID


def test_meeting_seed_is_stable_and_bounded():
    a = _meeting_seed("synth-000", 0)
    assert a == _meeting_seed("synth-000", 0)
    assert 0 <= a < 2 ** 31
    assert a != _meeting_seed("synth-001", 0)
    assert a != _meeting_seed("synth-000", 1)


def test_cell_basis_covers_present_relations_plus_unknown():
    g = make_graph(4, [(0, 1, "Result"), (1, 2, "Comment")])
    basis = cell_basis({"m": g})
    names = [r.value for r in basis.declared]
    assert names == ["Comment", "Result", "Unknown"]


def test_cell_basis_on_unlabeled_graphs():
    g = make_graph(3, [(0, 1, "Unknown")])
    basis = cell_basis({"m": g})
    assert [r.value for r in basis.declared] == ["Unknown"]


def test_single_relation_ablation_smoke(corpus):
    c = corpus
    report = run_single_relation_ablation(
        MODEL, QUICK, c.meetings, c.graphs, c.embeddings, c.split,
        relations=(RelationType.Result, RelationType.Elaboration))
    assert report["kind"] == "SingleRelation"
    assert report["seeds"] == [1]
    assert set(report["cells"]) == {"Result", "Elaboration", "None", "Randomized"}
    for cell in report["cells"].values():
        assert "f1_mean" in cell or "error" in cell
    assert report["cells"]["Randomized"]["transform_seed"] == 0


def test_none_cell_equals_all_unknown_training(corpus):
    c = corpus
    report = run_single_relation_ablation(
        MODEL, QUICK, c.meetings, c.graphs, c.embeddings, c.split, relations=())
    unk = {mid: mask_relations(g, set()) for mid, g in c.graphs.items()}
    runs = train(MODEL, QUICK, c.meetings, unk, c.embeddings, c.split,
                 basis=cell_basis(unk))
    direct = aggregate_runs(runs)
    assert report["cells"]["None"]["f1_mean"] == direct["f1_mean"]
    assert report["cells"]["None"]["test_loss_mean"] == direct["test_loss_mean"]


def test_relation_set_ablation_smoke(corpus):
    c = corpus
    sets = (("Continuation", "Elaboration", "Result"),)
    report = run_relation_set_ablation(MODEL, QUICK, c.meetings, c.graphs,
                                       c.embeddings, c.split, sets=sets)
    assert report["kind"] == "RelationSet"
    assert list(report["cells"]) == ["Continuation+Elaboration+Result"]


def test_default_relation_sets_are_sdrt():
    for names in DEFAULT_RELATION_SETS:
        for n in names:
            assert RelationType(n) not in (RelationType.Unknown, RelationType.Other)


def test_rate_sweep_validates_kind(corpus):
    c = corpus
    with pytest.raises(ContractError, match="rate sweep kind"):
        run_rate_sweeps("SingleRelation", MODEL, QUICK, c.meetings, c.graphs,
                        c.embeddings, c.split)


def test_rate_zero_cell_equals_unablated(corpus):
    c = corpus
    report = run_rate_sweeps("HiddenEdges", MODEL, QUICK, c.meetings, c.graphs,
                             c.embeddings, c.split, grid=(0.0,))
    runs = train(MODEL, QUICK, c.meetings, c.graphs, c.embeddings, c.split,
                 basis=cell_basis(c.graphs))
    direct = aggregate_runs(runs)
    assert report["cells"]["0.00"]["f1_mean"] == direct["f1_mean"]


def test_rate_one_hides_every_edge_and_still_trains(corpus):
    c = corpus
    report = run_rate_sweeps("HiddenEdges", MODEL, QUICK, c.meetings, c.graphs,
                             c.embeddings, c.split, grid=(1.0,))
    cell = report["cells"]["1.00"]
    assert "f1_mean" in cell


def test_failing_cell_reports_error_and_sweep_survives(corpus):
    c = corpus
    embeddings = dict(c.embeddings)
    del embeddings[c.split.train[0]]
    report = run_single_relation_ablation(
        MODEL, QUICK, c.meetings, c.graphs, embeddings, c.split, relations=())
    assert "error" in report["cells"]["None"]
    assert "validation failed" in report["cells"]["None"]["error"]


def test_hidden_relations_sweep_keys(corpus):
    c = corpus
    report = run_rate_sweeps("HiddenRelations", MODEL, QUICK, c.meetings,
                             c.graphs, c.embeddings, c.split, grid=(0.0, 0.5))
    assert list(report["cells"]) == ["0.00", "0.50"]
    assert report["kind"] == "HiddenRelations"


def test_centrality_report_star():
    g = make_graph(4, [(1, 0, "Result"), (2, 0, "Comment"), (3, 0, "Result")])
    m = make_meeting(["a", "b", "c", "d"], [1, 0, 0, 1])
    report = centrality_report({"m0": g}, {"m0": m})
    buckets = report["buckets"]
    assert buckets["3"] == {"in_summary": 1, "out_summary": 0, "share_in": 1.0}
    assert buckets["1"]["in_summary"] == 1
    assert buckets["1"]["out_summary"] == 2
    assert buckets["1"]["share_in"] == pytest.approx(1 / 3)
    assert buckets["0"] == {"in_summary": 0, "out_summary": 0, "share_in": 0.0}
    assert report["total_nodes"] == 4


def test_centrality_report_counts_every_node(corpus):
    c = corpus
    report = centrality_report(c.graphs, c.meetings)
    counted = sum(b["in_summary"] + b["out_summary"]
                  for b in report["buckets"].values())
    assert counted == report["total_nodes"] == sum(len(m) for m in c.meetings.values())


def test_centrality_report_validation():
    g = make_graph(3, [(0, 1, "Result")])
    m = make_meeting(["a", "b"], [0, 1])
    with pytest.raises(DataError, match="nodes vs"):
        centrality_report({"m0": g}, {"m0": m})
    with pytest.raises(ContractError, match="no graph"):
        centrality_report({}, {"m0": m})


def test_parser_comparison_structural_stats(tmp_path):
    tri = make_graph(3, [(0, 1, "Result"), (1, 2, "Result"), (0, 2, "Comment")])
    chain = make_graph(4, [(0, 1, "Elaboration"), (1, 2, "Elaboration"),
                           (2, 3, "Comment")])
    for name, graphs in [("alpha", {"m0": tri, "m1": chain}),
                         ("beta", {"m0": tri, "m1": chain})]:
        d = tmp_path / name
        d.mkdir()
        for mid, g in graphs.items():
            save_graph(mid, g, d / f"{mid}.json")
    report = parser_comparison([tmp_path / "alpha", tmp_path / "beta"])
    rows = report["parsers"]
    assert set(rows) == {"alpha", "beta"}
    assert rows["alpha"] == rows["beta"]
    a = rows["alpha"]
    assert a["n_graphs"] == 2
    assert a["mean_edge_count"] == pytest.approx(3.0)
    assert a["mean_density"] == pytest.approx((0.5 + 0.25) / 2)
    assert a["mean_avg_clustering"] == pytest.approx(0.5)
    assert a["relation_histogram"] == {"Comment": 2, "Elaboration": 2, "Result": 2}


def test_parser_comparison_empty_dir(tmp_path):
    (tmp_path / "empty").mkdir()
    with pytest.raises(DataError, match="no graphs"):
        parser_comparison([tmp_path / "empty"])


def test_evaluate_model_shape(corpus):
    c = corpus
    basis = cell_basis(c.graphs)
    runs = train(MODEL, QUICK, c.meetings, c.graphs, c.embeddings, c.split,
                 basis=basis)
    report = evaluate_model(MODEL, runs[0].params, basis, c.meetings, c.graphs,
                            c.embeddings, c.split.test)
    assert set(report) == {"classification", "strategies", "n_meetings"}
    assert set(report["classification"]) == {"precision", "recall", "f1"}
    assert set(report["strategies"]) == {"Threshold", "RankByLength",
                                         "RankByLogits", "LeadN"}
    for sums in report["strategies"].values():
        assert set(sums) == {"rouge1", "rouge2", "rougeL"}
        assert all(0.0 <= v <= 1.0 for v in sums.values())
    assert report["n_meetings"] == len(c.split.test)


def test_save_sweep_csv(tmp_path, corpus):
    c = corpus
    report = run_single_relation_ablation(
        MODEL, QUICK, c.meetings, c.graphs, c.embeddings, c.split, relations=())
    path = tmp_path / "sweep.csv"
    save_sweep_csv(report, path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["condition"] for r in rows] == ["None", "Randomized"]
    assert all(r["f1_mean"] for r in rows)
    assert rows[0]["error"] == ""
