"""
Everything through the file formats
===================================

The on-disk contract is three directories plus a split file: JSONL
corpora, JSON graphs, binary DEMB embeddings.  This script writes a
corpus, reloads it cold, trains, round-trips a checkpoint, and scores a
meeting from the reloaded artifacts alone -- the same path the command
line uses.
"""

import tempfile
from pathlib import Path

import numpy as np

from graphsumm import (ModelConfig, SyntheticSpec, TrainConfig,
                       generate_synthetic, load_checkpoint, load_corpus_dir,
                       load_split, model_forward, rank_by_logits,
                       save_checkpoint, validate_corpus)
from graphsumm.corpus import load_embedding_dir
from graphsumm.graphs import load_graph_dir
from graphsumm.summarization import save_summary, selection_summary
from graphsumm.training import train

root = Path(tempfile.mkdtemp(prefix="graphsumm-demo-"))
spec = SyntheticSpec(n_meetings=10, nodes_min=12, nodes_max=18,
                     embedding_dim=8, seed=21)

# generate_synthetic(out_dir=...) also writes corpus/, graphs/,
# embeddings/, split.json and spec.json under the target directory.
generate_synthetic(spec, out_dir=root / "data")
print("wrote", sorted(p.name for p in (root / "data").iterdir()))

# Cold reload.  Loading is strict: indices must be dense, embedding rows
# must match EDU counts, graphs must cover the same nodes.
meetings = load_corpus_dir(root / "data" / "corpus")
graphs = load_graph_dir(root / "data" / "graphs")
embeddings = load_embedding_dir(root / "data" / "embeddings", meetings)
split = load_split(root / "data" / "split.json")
report = validate_corpus(meetings, graphs, embeddings)
print("validate_corpus ok:", report.ok)

# Train briefly, then persist the best seed's parameters.  A checkpoint
# is a manifest JSON plus a DEMB blob of float32 tensors.
cfg = ModelConfig(kind="RGCN", input_dim=spec.embedding_dim, n_layers=2, hidden_dim=8)
runs = train(cfg, TrainConfig(max_epochs=10, patience=3, seeds=(11,)),
             meetings, graphs, embeddings, split)
best = runs[0]
save_checkpoint(str(root / "model"), cfg, best.params, seed=best.seed)
print("checkpoint files:", sorted(p.name for p in root.glob("model.*")))

# Reload and score a test meeting.  float32 storage is the precision
# contract, so reloaded scores match to ~1e-7, not bit-for-bit.
cfg2, params2, basis2, manifest = load_checkpoint(str(root / "model"))
mid = split.test[0]
h0 = embeddings[mid].values
fresh = model_forward(cfg, best.params, h0, graphs[mid])
reloaded = model_forward(cfg2, params2, h0, graphs[mid], basis=basis2)
print(f"max score drift after round-trip: {np.abs(fresh - reloaded).max():.2e}")
assert np.abs(fresh - reloaded).max() < 1e-6

# From scores to a budgeted summary on disk.
summary = selection_summary(rank_by_logits(meetings[mid], reloaded), meetings[mid])
save_summary(summary, root / f"{mid}.json")
print(f"{mid}: chose {summary.chosen_indices} "
      f"({summary.word_count}/{meetings[mid].budget_words} words)")
print("summary JSON at", root / f"{mid}.json")
