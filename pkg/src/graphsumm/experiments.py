"""Ablation sweeps, centrality analysis, parser-graph comparison, and
model evaluation: everything downstream of a trained classifier.

Every sweep cell records the (seed, transformation seed, condition) triple
that reproduces it. Cells that fail keep the sweep alive and carry the
error message instead of metrics.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import CorpusSplit, EmbeddingMatrix, Meeting
from .errors import ContractError, DataError, GraphsummError
from .graphs import (SDRT_RELATIONS, DiscourseGraph, RelationType, graph_stats,
                     hide_edges, hide_relation_labels, load_graph_dir,
                     mask_relations, randomize_relations)
from .metrics import prf1, rouge_report, write_json
from .models import ModelConfig, RelationBasis, model_forward
from .summarization import (budgetize_prefix, lead_n, rank_by_length,
                            rank_by_logits, select_threshold, selection_summary)
from .training import TrainConfig, aggregate_runs, train

ABLATION_KINDS = ("SingleRelation", "RelationSet", "HiddenRelations",
                  "HiddenEdges", "RandomizedRelations", "NoRelations")

DEFAULT_RATE_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)

# Relation subsets studied together: the three most frequent ones, then
# three mixes anchored on Result / question answering.
DEFAULT_RELATION_SETS = (
    ("Acknowledgement", "Continuation", "Elaboration"),
    ("Continuation", "Elaboration", "Result"),
    ("QuestionAnswerPair", "Result", "Acknowledgement"),
    ("QuestionAnswerPair", "Explanation", "Elaboration", "Result"),
)


@dataclass(frozen=True)
class AblationPlan:
    kind: str
    relations: tuple[str, ...] = ()
    rates: tuple[float, ...] = DEFAULT_RATE_GRID
    transform_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if self.kind not in ABLATION_KINDS:
            raise ContractError(f"unknown ablation kind {self.kind!r}")
        if any(not 0.0 <= r <= 1.0 for r in self.rates):
            raise ContractError("rates must lie in [0, 1]")
        sdrt = {r.value for r in SDRT_RELATIONS}
        bad = [r for r in self.relations if r not in sdrt]
        if bad:
            raise ContractError(f"not SDRT relation types: {bad}")


def _meeting_seed(meeting_id: str, transform_seed: int) -> int:
    return (zlib.crc32(meeting_id.encode()) ^ transform_seed) & 0x7FFFFFFF


def cell_basis(graphs: dict[str, DiscourseGraph]) -> RelationBasis:
    """Smallest basis that covers the given graphs: relations present plus
    Unknown (so masked variants share a basis with their source)."""
    present = set()
    for g in graphs.values():
        present.update(g.relation_histogram())
    present.add(RelationType.Unknown)
    return RelationBasis(tuple(r for r in RelationType if r in present))


def _run_cell(model_cfg: ModelConfig, train_cfg: TrainConfig, meetings, graphs,
              embeddings, split, record: dict) -> dict:
    try:
        runs = train(model_cfg, train_cfg, meetings, graphs, embeddings, split,
                     basis=cell_basis(graphs))
        return {**record, **aggregate_runs(runs)}
    except GraphsummError as exc:
        return {**record, "error": str(exc)}


def _transform_graphs(graphs, fn) -> dict[str, DiscourseGraph]:
    return {mid: fn(mid, g) for mid, g in graphs.items()}


def run_single_relation_ablation(model_cfg: ModelConfig, train_cfg: TrainConfig,
                                 meetings, graphs, embeddings, split,
                                 relations: tuple[RelationType, ...] = SDRT_RELATIONS,
                                 transform_seed: int = 0) -> dict:
    """Train once per kept relation, plus None (all Unknown) and Randomized
    control conditions."""
    cells = {}
    for rel in relations:
        masked = _transform_graphs(graphs, lambda mid, g: mask_relations(g, {rel}))
        cells[rel.value] = _run_cell(model_cfg, train_cfg, meetings, masked,
                                     embeddings, split, {"condition": rel.value})
    none_graphs = _transform_graphs(graphs, lambda mid, g: mask_relations(g, set()))
    cells["None"] = _run_cell(model_cfg, train_cfg, meetings, none_graphs,
                              embeddings, split, {"condition": "None"})
    rand_graphs = _transform_graphs(
        graphs, lambda mid, g: randomize_relations(g, _meeting_seed(mid, transform_seed)))
    cells["Randomized"] = _run_cell(model_cfg, train_cfg, meetings, rand_graphs,
                                    embeddings, split,
                                    {"condition": "Randomized", "transform_seed": transform_seed})
    return {"kind": "SingleRelation", "seeds": list(train_cfg.seeds), "cells": cells}


def run_relation_set_ablation(model_cfg: ModelConfig, train_cfg: TrainConfig,
                              meetings, graphs, embeddings, split,
                              sets: tuple[tuple[str, ...], ...] = DEFAULT_RELATION_SETS) -> dict:
    cells = {}
    for names in sets:
        keep = {RelationType(n) for n in names}
        key = "+".join(sorted(names))
        masked = _transform_graphs(graphs, lambda mid, g: mask_relations(g, keep))
        cells[key] = _run_cell(model_cfg, train_cfg, meetings, masked,
                               embeddings, split, {"condition": key})
    return {"kind": "RelationSet", "seeds": list(train_cfg.seeds), "cells": cells}


def run_rate_sweeps(kind: str, model_cfg: ModelConfig, train_cfg: TrainConfig,
                    meetings, graphs, embeddings, split,
                    grid: tuple[float, ...] = DEFAULT_RATE_GRID,
                    transform_seed: int = 0) -> dict:
    if kind not in ("HiddenRelations", "HiddenEdges"):
        raise ContractError(f"rate sweep kind must be HiddenRelations or HiddenEdges, got {kind!r}")
    transform = hide_relation_labels if kind == "HiddenRelations" else hide_edges
    cells = {}
    for rate in grid:
        hidden = _transform_graphs(
            graphs, lambda mid, g: transform(g, rate, _meeting_seed(mid, transform_seed)))
        cells[f"{rate:.2f}"] = _run_cell(
            model_cfg, train_cfg, meetings, hidden, embeddings, split,
            {"condition": f"{kind}@{rate:.2f}", "transform_seed": transform_seed})
    return {"kind": kind, "seeds": list(train_cfg.seeds), "cells": cells}


_BUCKETS = ("0", "1", "2", "3", "4", "5plus")


def centrality_report(graphs: dict[str, DiscourseGraph],
                      meetings: dict[str, Meeting]) -> dict:
    """Share of in-summary nodes per undirected-degree bucket (0..4, 5+)."""
    counts = {b: {"in_summary": 0, "out_summary": 0} for b in _BUCKETS}
    for mid in sorted(meetings):
        m = meetings[mid]
        if mid not in graphs:
            raise ContractError(f"no graph for meeting {mid}")
        g = graphs[mid]
        if g.n_nodes != len(m):
            raise DataError(f"{mid}: {g.n_nodes} nodes vs {len(m)} EDUs")
        neighbors: dict[int, set[int]] = {v: set() for v in range(g.n_nodes)}
        for a, b in g.undirected_pairs():
            neighbors[a].add(b)
            neighbors[b].add(a)
        for v, label in enumerate(m.gold_labels):
            deg = len(neighbors[v])
            bucket = str(deg) if deg < 5 else "5plus"
            counts[bucket]["in_summary" if label else "out_summary"] += 1
    buckets = {}
    for b in _BUCKETS:
        total = counts[b]["in_summary"] + counts[b]["out_summary"]
        share = counts[b]["in_summary"] / total if total else 0.0
        buckets[b] = {**counts[b], "share_in": share}
    return {"buckets": buckets,
            "total_nodes": sum(len(m) for m in meetings.values())}


def parser_comparison(graph_dirs: list) -> dict:
    """Table of structural statistics per parser output directory."""
    rows = {}
    for d in graph_dirs:
        d = Path(d)
        graphs = load_graph_dir(d)
        if not graphs:
            raise DataError(f"no graphs in {d}")
        stats = [graph_stats(g) for g in graphs.values()]
        hist: dict[str, int] = {}
        for g in graphs.values():
            for rel, n in g.relation_histogram().items():
                hist[rel.value] = hist.get(rel.value, 0) + n
        rows[d.name] = {
            "n_graphs": len(graphs),
            "mean_edge_count": float(np.mean([s["edge_count"] for s in stats])),
            "mean_density": float(np.mean([s["density"] for s in stats])),
            "mean_avg_clustering": float(np.mean([s["avg_clustering"] for s in stats])),
            "relation_histogram": dict(sorted(hist.items())),
        }
    return {"parsers": rows}


def evaluate_model(model_cfg: ModelConfig, params, basis: RelationBasis,
                   meetings: dict[str, Meeting], graphs, embeddings,
                   ids, threshold: float = 0.5) -> dict:
    """Classification PRF plus per-strategy mean ROUGE against the gold
    extract, over the given meeting ids."""
    preds, golds = [], []
    rouge_sums = {s: {"rouge1": 0.0, "rouge2": 0.0, "rougeL": 0.0}
                  for s in ("Threshold", "RankByLength", "RankByLogits", "LeadN")}
    ids = sorted(ids)
    for mid in ids:
        m = meetings[mid]
        scores = model_forward(model_cfg, params, embeddings[mid].values,
                               graphs.get(mid), basis=basis)
        preds.append((scores >= threshold).astype(np.int64))
        golds.append(np.asarray(m.gold_labels, dtype=np.int64))
        gold_text = " ".join(m.edus[i].text for i, y in enumerate(m.gold_labels) if y)
        summaries = {
            "Threshold": budgetize_prefix(select_threshold(m, scores, threshold), m),
            "RankByLength": selection_summary(rank_by_length(m, scores, threshold), m),
            "RankByLogits": selection_summary(rank_by_logits(m, scores, threshold), m),
            "LeadN": lead_n(m),
        }
        for name, summary in summaries.items():
            for metric, value in rouge_report(summary.text, gold_text).items():
                rouge_sums[name][metric] += value
    classification = prf1(np.concatenate(preds), np.concatenate(golds))
    n = len(ids)
    return {
        "classification": classification.to_dict(),
        "strategies": {name: {metric: val / n for metric, val in sums.items()}
                       for name, sums in rouge_sums.items()},
        "n_meetings": n,
    }


def save_sweep_csv(report: dict, path) -> None:
    """One row per cell: condition plus the aggregate metric columns."""
    import csv

    fields = ["condition", "f1_mean", "f1_std", "precision_mean", "recall_mean",
              "n_runs", "n_failed", "error"]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for key in sorted(report["cells"]):
            cell = report["cells"][key]
            writer.writerow({"condition": key,
                             **{f: cell.get(f, "") for f in fields if f != "condition"}})


def save_report(report: dict, path) -> None:
    write_json(path, report)
