"""
Relation ablations: which discourse relations carry the signal?
===============================================================

Ablations retrain the same model on transformed graphs.  On a corpus
whose labels are planted on Result edges, keeping only Result should
match the full model, keeping any other single relation should not, and
degrading edges gradually should degrade F1 gradually.
"""

from graphsumm import ModelConfig, RelationType, SyntheticSpec, TrainConfig, generate_synthetic
from graphsumm.experiments import run_rate_sweeps, run_single_relation_ablation

spec = SyntheticSpec(n_meetings=16, nodes_min=16, nodes_max=28,
                     embedding_dim=8, seed=3)
corpus = generate_synthetic(spec)

model_cfg = ModelConfig(kind="RGCN", input_dim=spec.embedding_dim,
                        n_layers=2, hidden_dim=16)
train_cfg = TrainConfig(max_epochs=20, patience=5, seeds=(11,))

# Single-relation cells: mask every edge except one kept relation, plus
# two controls -- None (every label masked) and Randomized (labels
# shuffled, structure kept).  Only the five drawable relations are worth
# sweeping here; the others never occur in this corpus.
drawable = tuple(RelationType(name) for name, p in spec.relation_distribution if p > 0)
report = run_single_relation_ablation(model_cfg, train_cfg, corpus.meetings,
                                      corpus.graphs, corpus.embeddings,
                                      corpus.split, relations=drawable)
print("single-relation cells (test F1):")
cells = report["cells"]
for name, cell in sorted(cells.items(), key=lambda kv: -kv[1]["f1_mean"]):
    print(f"  keep {name:<18} {cell['f1_mean']:.4f}")

planted = cells["Result"]["f1_mean"]
others = {k: v["f1_mean"] for k, v in cells.items()
          if k not in ("Result", "None", "Randomized")}
assert planted > max(others.values()), "planted relation should rank first"
print(f"Result ({planted:.4f}) beats every other single relation "
      f"(best other {max(others.values()):.4f})")

# Hidden-edge sweep: drop a growing fraction of edges before training.
# At full experiment scale (about 100 meetings and several seeds) the
# curve is monotone non-increasing; this pocket-sized run only shows the
# endpoints clearly -- the intact graph beats the edgeless one, whose
# floor is set by the embedding mixture alone.
sweep = run_rate_sweeps("HiddenEdges", model_cfg, train_cfg, corpus.meetings,
                        corpus.graphs, corpus.embeddings, corpus.split)
print("\nhidden-edge sweep (test F1):")
for rate, cell in sorted(sweep["cells"].items()):
    print(f"  rate {rate}: {cell['f1_mean']:.4f}")
assert sweep["cells"]["1.00"]["f1_mean"] < sweep["cells"]["0.00"]["f1_mean"]
print("edgeless floor sits below the intact graph")
