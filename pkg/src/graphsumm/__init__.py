"""Extractive meeting summarization by node classification over discourse
graphs: corpus handling, graph transforms, a small reverse-mode autodiff
engine, relational/multi-hop graph convolutions, training, budgetized
summary strategies, metrics, and ablation harnesses.
"""

from .corpus import (CorpusSplit, Edu, EmbeddingMatrix, Meeting, load_corpus_dir,
                     load_embeddings, load_meeting, load_split, validate_corpus)
from .errors import (AlignmentError, ContractError, DataError, GraphsummError,
                     ParseError, ShapeError)
from .graphs import (SDRT_RELATIONS, DiscourseGraph, Edge, RelationType,
                     degree_centrality, graph_stats, hide_edges,
                     hide_relation_labels, load_graph, mask_relations,
                     parse_relation, randomize_relations)
from .metrics import PRF, PreferenceMatrix, copeland, prf1, rouge_l, rouge_n
from .models import (ModelConfig, RelationBasis, load_checkpoint, model_forward,
                     save_checkpoint)
from .summarization import (Selection, Summary, budgetize_prefix, lead_n,
                            rank_by_length, rank_by_logits, select_threshold)
from .synthetic import SyntheticSpec, generate_synthetic, verify_planted_labels
from .training import RunResult, TrainConfig, bce_loss, train

__version__ = "0.1.0"

__all__ = [
    "AlignmentError", "ContractError", "CorpusSplit", "DataError",
    "DiscourseGraph", "Edge", "Edu", "EmbeddingMatrix", "GraphsummError",
    "Meeting", "ModelConfig", "PRF", "ParseError", "PreferenceMatrix",
    "RelationBasis", "RelationType", "RunResult", "SDRT_RELATIONS",
    "Selection", "ShapeError", "Summary", "SyntheticSpec", "TrainConfig",
    "bce_loss", "budgetize_prefix", "copeland", "degree_centrality",
    "generate_synthetic", "graph_stats", "hide_edges", "hide_relation_labels",
    "lead_n", "load_checkpoint", "load_corpus_dir", "load_embeddings",
    "load_graph", "load_meeting", "load_split", "mask_relations",
    "model_forward", "parse_relation", "prf1", "randomize_relations",
    "rank_by_length", "rank_by_logits", "rouge_l", "rouge_n",
    "save_checkpoint", "select_threshold", "train", "validate_corpus",
    "verify_planted_labels",
]
