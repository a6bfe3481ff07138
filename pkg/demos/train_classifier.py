"""
Training a relational GCN on planted labels
===========================================

End-to-end training run: generate a corpus whose labels depend on Result
edges, train a relational GCN across seeds, and compare against an MLP
that never sees the graph.  The gap between the two is the point -- it
measures how much signal lives in the discourse structure.
"""

import numpy as np

from graphsumm import ModelConfig, SyntheticSpec, TrainConfig, generate_synthetic
from graphsumm.training import aggregate_runs, train

spec = SyntheticSpec(n_meetings=24, nodes_min=20, nodes_max=40,
                     embedding_dim=8, seed=5)
corpus = generate_synthetic(spec)
print(f"{spec.n_meetings} meetings, "
      f"{len(corpus.split.train)}/{len(corpus.split.validation)}/{len(corpus.split.test)} split")

train_cfg = TrainConfig(max_epochs=30, patience=6, seeds=(11, 12, 13))

# The relational model aggregates neighbors per relation type, with
# inverse and self edges handled as their own relation slots.
rgcn_cfg = ModelConfig(kind="RGCN", input_dim=spec.embedding_dim,
                       n_layers=2, hidden_dim=16)
runs = train(rgcn_cfg, train_cfg, corpus.meetings, corpus.graphs,
             corpus.embeddings, corpus.split)
for r in runs:
    print(f"  seed {r.seed}: best epoch {r.best_epoch:>2}, "
          f"test F1 {r.test.f1:.4f}")
rgcn = aggregate_runs(runs)
print(f"RGCN test F1: {rgcn['f1_mean']:.4f} +/- {rgcn['f1_std']:.4f}")

# The MLP baseline scores each node from its embedding alone.  On a
# relation-dependent corpus it can only learn the mixture half of the
# rule, so it plateaus well below the graph model.
mlp_cfg = ModelConfig(kind="MLP", input_dim=spec.embedding_dim,
                      n_layers=2, hidden_dim=16)
mlp = aggregate_runs(train(mlp_cfg, train_cfg, corpus.meetings, corpus.graphs,
                           corpus.embeddings, corpus.split))
print(f"MLP  test F1: {mlp['f1_mean']:.4f} +/- {mlp['f1_std']:.4f}")

gap = rgcn["f1_mean"] - mlp["f1_mean"]
print(f"structure gap: {gap:+.4f}")
assert gap > 0.05, "graph structure should matter on this corpus"

# Training is deterministic per seed: repeating a run reproduces every
# recorded number, not just the headline mean.
rerun = train(rgcn_cfg, train_cfg, corpus.meetings, corpus.graphs,
              corpus.embeddings, corpus.split)
assert [r.test.f1 for r in rerun] == [r.test.f1 for r in runs]
assert [r.val_f1 for r in rerun] == [r.val_f1 for r in runs]
print("re-training reproduced all per-seed curves exactly")
