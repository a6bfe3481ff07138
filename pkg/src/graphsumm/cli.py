"""Command-line front end.

Exit codes: 0 success, 2 validation failure (bad inputs, broken corpus),
1 anything else.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import (apply_budget_default, load_corpus_dir, load_embedding_dir,
                     load_split, validate_corpus)
from .errors import GraphsummError
from .experiments import (centrality_report, evaluate_model, parser_comparison,
                          run_rate_sweeps, run_relation_set_ablation,
                          run_single_relation_ablation, save_report, save_sweep_csv)
from .graphs import load_graph_dir
from .metrics import read_json, write_json
from .models import ModelConfig, load_checkpoint
from .summarization import (budgetize_prefix, lead_n, rank_by_length,
                            rank_by_logits, save_summary, select_threshold,
                            selection_summary)
from .synthetic import SyntheticSpec, generate_synthetic, verify_planted_labels
from .training import TrainConfig, run_training_job
from .models import model_forward


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", help="directory of meeting .jsonl files")
    p.add_argument("--graphs", help="directory of graph .json files")
    p.add_argument("--embeddings", help="directory of .demb files")
    p.add_argument("--split", help="split JSON file")
    p.add_argument("--config", help="config JSON file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, default=None)


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise GraphsummError(f"missing required flags: {', '.join('--' + n for n in missing)}")


def _load_inputs(args, need_graphs: bool = True):
    meetings = load_corpus_dir(args.corpus)
    graphs = load_graph_dir(args.graphs) if args.graphs else {}
    if need_graphs and not graphs:
        raise GraphsummError("no graphs loaded; pass --graphs")
    embeddings = load_embedding_dir(args.embeddings, meetings)
    split = load_split(args.split)
    meetings = apply_budget_default(meetings, split.train)
    return meetings, graphs, embeddings, split


def _configs(args) -> tuple[ModelConfig, TrainConfig]:
    cfg = read_json(args.config) if args.config else {}
    if "model" not in cfg:
        raise GraphsummError("config file must contain a 'model' section")
    model_cfg = ModelConfig.from_dict(cfg["model"])
    train_cfg = TrainConfig.from_dict(cfg.get("train", {}))
    if args.seed is not None:
        train_cfg = TrainConfig.from_dict({**train_cfg.to_dict(), "seeds": [args.seed]})
    return model_cfg, train_cfg


def _cmd_train(args) -> int:
    _require(args, "corpus", "embeddings", "split", "config", "out")
    meetings, graphs, embeddings, split = _load_inputs(args, need_graphs=False)
    model_cfg, train_cfg = _configs(args)
    runs = run_training_job(model_cfg, train_cfg, meetings, graphs, embeddings,
                            split, args.out)
    ok = [r for r in runs if not r.failed]
    print(f"trained {len(ok)}/{len(runs)} runs; metrics in {args.out}/metrics.json")
    return 0 if ok else 1


def _cmd_evaluate(args) -> int:
    _require(args, "corpus", "embeddings", "split", "checkpoint")
    meetings, graphs, embeddings, split = _load_inputs(args, need_graphs=False)
    cfg, params, basis, _ = load_checkpoint(args.checkpoint)
    report = evaluate_model(cfg, params, basis, meetings, graphs, embeddings,
                            split.test, threshold=args.threshold)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        write_json(Path(args.out) / "evaluation.json", report)
        print(f"wrote {args.out}/evaluation.json")
    else:
        print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_summarize(args) -> int:
    lead = args.strategy == "LeadN"
    _require(args, "corpus", "out", *(() if lead else ("embeddings", "checkpoint")))
    meetings = load_corpus_dir(args.corpus)
    graphs = load_graph_dir(args.graphs) if args.graphs else {}
    embeddings = load_embedding_dir(args.embeddings, meetings) if args.embeddings else {}
    if args.split:
        split = load_split(args.split)
        meetings = apply_budget_default(meetings, split.train)
        ids = split.test
    else:
        meetings = apply_budget_default(meetings, sorted(meetings))
        ids = sorted(meetings)
    cfg, params, basis, _ = (None, None, None, None) if lead \
        else load_checkpoint(args.checkpoint)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for mid in sorted(ids):
        m = meetings[mid]
        if lead:
            save_summary(lead_n(m), out / f"{mid}.{args.strategy}.json")
            continue
        scores = model_forward(cfg, params, embeddings[mid].values,
                               graphs.get(mid), basis=basis)
        if args.strategy == "Threshold":
            summary = budgetize_prefix(select_threshold(m, scores, args.threshold), m)
        elif args.strategy == "RankByLength":
            summary = selection_summary(rank_by_length(m, scores, args.threshold), m)
        else:
            summary = selection_summary(rank_by_logits(m, scores, args.threshold), m)
        save_summary(summary, out / f"{mid}.{args.strategy}.json")
    print(f"wrote {len(ids)} summaries to {out}")
    return 0


def _cmd_ablate(args) -> int:
    _require(args, "corpus", "graphs", "embeddings", "split", "config", "out")
    meetings, graphs, embeddings, split = _load_inputs(args)
    model_cfg, train_cfg = _configs(args)
    kind = args.kind
    if kind == "SingleRelation":
        report = run_single_relation_ablation(model_cfg, train_cfg, meetings, graphs,
                                              embeddings, split,
                                              transform_seed=args.transform_seed)
    elif kind == "RelationSet":
        report = run_relation_set_ablation(model_cfg, train_cfg, meetings, graphs,
                                           embeddings, split)
    elif kind in ("HiddenRelations", "HiddenEdges"):
        report = run_rate_sweeps(kind, model_cfg, train_cfg, meetings, graphs,
                                 embeddings, split, transform_seed=args.transform_seed)
    else:
        raise GraphsummError(f"unsupported ablation kind {kind!r}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_report(report, out / f"ablation.{kind}.json")
    save_sweep_csv(report, out / f"ablation.{kind}.csv")
    print(f"wrote ablation report for {kind} to {out}")
    return 0


def _cmd_stats(args) -> int:
    if not args.graph_dirs and not args.graphs:
        raise GraphsummError("pass --graphs or one or more graph directories")
    dirs = list(args.graph_dirs) or [args.graphs]
    report = parser_comparison(dirs)
    if args.corpus:
        meetings = load_corpus_dir(args.corpus)
        graphs = load_graph_dir(dirs[0])
        report["centrality"] = centrality_report(
            {m: g for m, g in graphs.items() if m in meetings},
            {m: meetings[m] for m in meetings if m in graphs})
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        write_json(Path(args.out) / "stats.json", report)
        print(f"wrote {args.out}/stats.json")
    else:
        print(report)
    return 0


def _cmd_synth(args) -> int:
    _require(args, "out")
    spec_dict = read_json(args.config) if args.config else {}
    if args.seed is not None:
        spec_dict["seed"] = args.seed
    spec = SyntheticSpec.from_dict(spec_dict) if "relation_distribution" in spec_dict \
        else SyntheticSpec(**spec_dict)
    corpus = generate_synthetic(spec, out_dir=args.out)
    verify_planted_labels(corpus)
    report = validate_corpus(corpus.meetings, corpus.graphs, corpus.embeddings)
    if not report.ok:
        raise GraphsummError(f"generated corpus failed validation: {report.issues}")
    print(f"wrote synthetic corpus ({spec.n_meetings} meetings, rule {spec.rule}) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphsumm")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run the seeded training protocol")
    _add_common(p)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint on the test split")
    _add_common(p)
    p.add_argument("--checkpoint", help="checkpoint prefix (no extension)")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("summarize", help="emit budgetized summaries")
    _add_common(p)
    p.add_argument("--checkpoint", help="checkpoint prefix (no extension)")
    p.add_argument("--strategy", default="Threshold",
                   choices=["Threshold", "RankByLength", "RankByLogits", "LeadN"])
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(fn=_cmd_summarize)

    p = sub.add_parser("ablate", help="run an ablation sweep")
    _add_common(p)
    p.add_argument("--kind", required=True,
                   choices=["SingleRelation", "RelationSet", "HiddenRelations", "HiddenEdges"])
    p.add_argument("--transform-seed", type=int, default=0, dest="transform_seed")
    p.set_defaults(fn=_cmd_ablate)

    p = sub.add_parser("stats", help="graph statistics / parser comparison")
    _add_common(p)
    p.add_argument("graph_dirs", nargs="*", help="graph directories to compare")
    p.set_defaults(fn=_cmd_stats)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    _add_common(p)
    p.set_defaults(fn=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GraphsummError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
