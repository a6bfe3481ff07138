"""Seeded synthetic corpus with planted, brute-force-checkable labels.

Three planting rules:

- relation-dependent: a node is positive iff it has at least one incoming
  edge of the target relation AND its embedding comes from mixture A. Every
  node gets in-degree exactly 2, so degree alone carries no signal.
- embedding-only: positive iff mixture A; the graph is a red herring.
- structure-only: positive iff total degree >= degree_k.

Mixture membership is written into the embedding: coordinate 0 is a
constant 1.0 (bias), coordinate 1 is uniform in [0.5, 1.5] for mixture A
and [-1.5, -0.5] for B (disjoint supports, so the Bayes classifier is
exact), the rest is N(0, 0.3) noise.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import (CorpusSplit, Edu, EmbeddingMatrix, Meeting,
                     default_budget_words, save_embeddings, save_meeting, save_split)
from .errors import ContractError, DataError
from .graphs import (DiscourseGraph, Edge, RelationType, degree_centrality,
                     parse_relation, save_graph)
from .metrics import write_json

RULES = ("relation-dependent", "embedding-only", "structure-only")

DEFAULT_DISTRIBUTION = (
    ("Result", 0.35),
    ("Elaboration", 0.25),
    ("Continuation", 0.20),
    ("Acknowledgement", 0.10),
    ("QuestionAnswerPair", 0.10),
)

_SPEAKERS = ("A", "B", "C", "D")
_VOCAB = (
    "agenda budget remote design review launch metric survey draft issue "
    "deadline vendor update target scope risk demo client sprint backlog "
    "notes action plan owner status forecast revenue onboarding retro pilot"
).split()


@dataclass(frozen=True)
class SyntheticSpec:
    n_meetings: int = 12
    nodes_min: int = 20
    nodes_max: int = 40
    embedding_dim: int = 16
    relation_distribution: tuple[tuple[str, float], ...] = DEFAULT_DISTRIBUTION
    rule: str = "relation-dependent"
    target_relation: str = "Result"
    degree_k: int = 3
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "relation_distribution",
                           tuple((parse_relation(n).value, float(p))
                                 for n, p in self.relation_distribution))
        object.__setattr__(self, "target_relation",
                           parse_relation(self.target_relation).value)
        if self.n_meetings < 1 or self.nodes_min < 3 or self.embedding_dim < 2:
            raise ContractError("need n_meetings >= 1, nodes_min >= 3, embedding_dim >= 2")
        if self.nodes_min > self.nodes_max:
            raise ContractError("nodes_min > nodes_max")
        if self.rule not in RULES:
            raise ContractError(f"unknown rule {self.rule!r}; choose from {RULES}")
        probs = [p for _, p in self.relation_distribution]
        if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
            raise ContractError("relation_distribution must be non-negative and sum to 1")
        if self.rule == "relation-dependent":
            if self.target_relation not in {n for n, p in self.relation_distribution if p > 0}:
                raise ContractError(f"target relation {self.target_relation} cannot be drawn")
        if self.degree_k < 0:
            raise ContractError("degree_k must be >= 0")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["relation_distribution"] = [list(pair) for pair in self.relation_distribution]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        d = dict(d)
        d["relation_distribution"] = tuple(tuple(p) for p in d["relation_distribution"])
        return cls(**d)


@dataclass(frozen=True)
class SyntheticCorpus:
    spec: SyntheticSpec
    meetings: dict[str, Meeting]
    graphs: dict[str, DiscourseGraph]
    embeddings: dict[str, EmbeddingMatrix]
    split: CorpusSplit


def _draw_edges(rng: np.random.Generator, n: int, spec: SyntheticSpec) -> tuple[Edge, ...]:
    names = [name for name, _ in spec.relation_distribution]
    probs = np.array([p for _, p in spec.relation_distribution], dtype=np.float64)
    probs = probs / probs.sum()
    edges: list[Edge] = []
    for dst in range(n):
        if spec.rule == "structure-only":
            in_deg = int(rng.integers(0, 4))
        else:
            in_deg = 2
        if in_deg == 0:
            continue
        others = np.array([v for v in range(n) if v != dst])
        sources = rng.choice(others, size=in_deg, replace=False)
        for src in sources:
            rel = names[int(rng.choice(len(names), p=probs))]
            edges.append(Edge(int(src), dst, RelationType(rel)))
    return tuple(edges)


def _draw_embeddings(rng: np.random.Generator, n: int, mixture_a: np.ndarray,
                     dim: int) -> np.ndarray:
    values = rng.normal(0.0, 0.3, size=(n, dim))
    values[:, 0] = 1.0
    offsets = rng.uniform(0.5, 1.5, size=n)
    values[:, 1] = np.where(mixture_a, offsets, -offsets)
    return values.astype(np.float32)


def planted_labels(spec: SyntheticSpec, graph: DiscourseGraph,
                   embedding: EmbeddingMatrix) -> tuple[int, ...]:
    """Recompute labels from the rule and the artifacts alone (the checker)."""
    mixture_a = embedding.values[:, 1] > 0
    if spec.rule == "embedding-only":
        return tuple(int(a) for a in mixture_a)
    if spec.rule == "structure-only":
        deg = degree_centrality(graph)
        return tuple(int(d >= spec.degree_k) for d in deg)
    target = RelationType(spec.target_relation)
    has_incoming = np.zeros(graph.n_nodes, dtype=bool)
    for e in graph.edges:
        if e.relation is target:
            has_incoming[e.dst] = True
    return tuple(int(h and a) for h, a in zip(has_incoming, mixture_a))


def _draw_text(rng: np.random.Generator) -> str:
    n_words = int(rng.integers(3, 13))
    picks = rng.choice(len(_VOCAB), size=n_words)
    return " ".join(_VOCAB[int(i)] for i in picks)


def generate_synthetic(spec: SyntheticSpec, out_dir=None) -> SyntheticCorpus:
    """Deterministic generation; writing twice with one seed is byte-identical."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    meetings: dict[str, Meeting] = {}
    graphs: dict[str, DiscourseGraph] = {}
    embeddings: dict[str, EmbeddingMatrix] = {}

    for i in range(spec.n_meetings):
        mid = f"synth-{i:03d}"
        n = int(rng.integers(spec.nodes_min, spec.nodes_max + 1))
        mixture_a = rng.random(n) < 0.5
        emb = EmbeddingMatrix(_draw_embeddings(rng, n, mixture_a, spec.embedding_dim))
        graph = DiscourseGraph(n_nodes=n, edges=_draw_edges(rng, n, spec))
        labels = planted_labels(spec, graph, emb)
        edus = tuple(
            Edu(index=v, speaker=_SPEAKERS[v % len(_SPEAKERS)], text=_draw_text(rng))
            for v in range(n)
        )
        meetings[mid] = Meeting(meeting_id=mid, edus=edus, gold_labels=labels)
        graphs[mid] = graph
        embeddings[mid] = emb

    ids = sorted(meetings)
    n_train = max(1, int(round(len(ids) * 0.6)))
    n_val = max(1, int(round(len(ids) * 0.2)))
    if n_train + n_val >= len(ids):
        raise ContractError(f"{len(ids)} meetings cannot fill a train/val/test split")
    split = CorpusSplit(train=tuple(ids[:n_train]),
                        validation=tuple(ids[n_train:n_train + n_val]),
                        test=tuple(ids[n_train + n_val:]))

    budget = default_budget_words(meetings, split.train)
    meetings = {mid: dataclasses.replace(m, budget_words=budget)
                for mid, m in meetings.items()}

    corpus = SyntheticCorpus(spec, meetings, graphs, embeddings, split)
    if out_dir is not None:
        write_corpus(corpus, out_dir)
    return corpus


def write_corpus(corpus: SyntheticCorpus, out_dir) -> None:
    out = Path(out_dir)
    for sub in ("corpus", "graphs", "embeddings"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    for mid in sorted(corpus.meetings):
        save_meeting(corpus.meetings[mid], out / "corpus" / f"{mid}.jsonl")
        save_graph(mid, corpus.graphs[mid], out / "graphs" / f"{mid}.json")
        save_embeddings(corpus.embeddings[mid], out / "embeddings" / f"{mid}.demb")
    save_split(corpus.split, out / "split.json")
    write_json(out / "spec.json", corpus.spec.to_dict())


def verify_planted_labels(corpus: SyntheticCorpus) -> None:
    """Assert stored gold labels match a fresh rule recomputation."""
    bad = []
    for mid in sorted(corpus.meetings):
        expect = planted_labels(corpus.spec, corpus.graphs[mid], corpus.embeddings[mid])
        if tuple(corpus.meetings[mid].gold_labels) != expect:
            bad.append(mid)
    if bad:
        raise DataError(f"planted labels do not match rule for {bad}")
