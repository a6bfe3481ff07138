"""Discourse graph data model, structural transforms, and graph statistics.

Graph file format: JSON ``{"meeting_id": str, "n_nodes": int, "edges":
[[src, dst, "RelationName"], ...]}``. Relation names are matched
case-insensitively (separators ``-``, ``_`` and spaces are ignored) and
written back in canonical case.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ContractError, DataError, ParseError


class RelationType(Enum):
    """Edge labels: the 16 standard discourse relations plus two sentinels.

    ``Unknown`` marks a suppressed or hidden label (engine internal);
    ``Other`` is reserved for parser output that falls outside the 16.
    """

    Comment = "Comment"
    ClarificationQuestion = "ClarificationQuestion"
    Elaboration = "Elaboration"
    Acknowledgement = "Acknowledgement"
    Continuation = "Continuation"
    Explanation = "Explanation"
    Conditional = "Conditional"
    QuestionAnswerPair = "QuestionAnswerPair"
    Alternation = "Alternation"
    QuestionElaboration = "QuestionElaboration"
    Result = "Result"
    Background = "Background"
    Narration = "Narration"
    Correction = "Correction"
    Parallel = "Parallel"
    Contrast = "Contrast"
    Unknown = "Unknown"
    Other = "Other"


SDRT_RELATIONS: tuple[RelationType, ...] = tuple(
    r for r in RelationType if r not in (RelationType.Unknown, RelationType.Other)
)

_CANONICAL = {r.value.lower(): r for r in RelationType}


def parse_relation(name: str) -> RelationType:
    """Resolve a relation label; unrecognized names fail loudly."""
    key = name.replace("-", "").replace("_", "").replace(" ", "").lower()
    try:
        return _CANONICAL[key]
    except KeyError:
        raise DataError(f"unrecognized relation label {name!r}") from None


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    relation: RelationType

    def __post_init__(self):
        if self.src == self.dst:
            raise DataError(f"self edge at node {self.src}")
        if self.src < 0 or self.dst < 0:
            raise DataError(f"negative node index in edge ({self.src}, {self.dst})")


@dataclass(frozen=True)
class DiscourseGraph:
    """Directed labeled edges over EDU indices ``0..n_nodes-1``.

    Parallel edges with distinct relations are allowed; exact duplicate
    (src, dst, relation) triples are rejected at load but may arise from
    label-suppressing transforms, which preserve the edge multiset.
    """

    n_nodes: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.n_nodes < 0:
            raise DataError(f"n_nodes must be non-negative, got {self.n_nodes}")
        for e in self.edges:
            if e.src >= self.n_nodes or e.dst >= self.n_nodes:
                raise DataError(
                    f"edge ({e.src}, {e.dst}) outside node range 0..{self.n_nodes - 1}"
                )

    def relation_histogram(self) -> Counter:
        return Counter(e.relation for e in self.edges)

    def undirected_pairs(self) -> set[tuple[int, int]]:
        """Distinct undirected node pairs, ignoring relations and direction."""
        return {(min(e.src, e.dst), max(e.src, e.dst)) for e in self.edges}


def load_graph(path: str) -> tuple[str, DiscourseGraph]:
    """Load one graph file; returns (meeting_id, graph)."""
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc.msg})", line=exc.lineno) from exc
    missing = {"meeting_id", "n_nodes", "edges"} - obj.keys()
    if missing:
        raise ParseError(f"{path}: graph file missing keys {sorted(missing)}")
    edges = []
    seen: set[tuple[int, int, RelationType]] = set()
    for rec in obj["edges"]:
        if len(rec) != 3:
            raise ParseError(f"{path}: edge record {rec!r} is not [src, dst, relation]")
        src, dst, rel = int(rec[0]), int(rec[1]), parse_relation(str(rec[2]))
        triple = (src, dst, rel)
        if triple in seen:
            raise DataError(f"{path}: duplicate edge ({src}, {dst}, {rel.value})")
        seen.add(triple)
        edges.append(Edge(src, dst, rel))
    return str(obj["meeting_id"]), DiscourseGraph(n_nodes=int(obj["n_nodes"]), edges=tuple(edges))


def save_graph(meeting_id: str, graph: DiscourseGraph, path: str) -> None:
    obj = {
        "meeting_id": meeting_id,
        "n_nodes": graph.n_nodes,
        "edges": [[e.src, e.dst, e.relation.value] for e in graph.edges],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True)
        fh.write("\n")


def load_graph_dir(graphs_dir: str) -> dict[str, DiscourseGraph]:
    import os

    out: dict[str, DiscourseGraph] = {}
    for name in sorted(os.listdir(graphs_dir)):
        if not name.endswith(".json"):
            continue
        mid, graph = load_graph(os.path.join(graphs_dir, name))
        if mid in out:
            raise DataError(f"duplicate graph for meeting {mid!r}")
        out[mid] = graph
    return out


def mask_relations(g: DiscourseGraph, keep: set) -> DiscourseGraph:
    """Suppress labels outside ``keep``: structure kept, relation -> Unknown."""
    keep = set(keep)
    edges = tuple(
        e if e.relation in keep else Edge(e.src, e.dst, RelationType.Unknown)
        for e in g.edges
    )
    return DiscourseGraph(n_nodes=g.n_nodes, edges=edges)


def randomize_relations(g: DiscourseGraph, seed: int) -> DiscourseGraph:
    """Resample every edge label uniformly from the 16 standard relations."""
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.integers(0, len(SDRT_RELATIONS), size=len(g.edges))
    edges = tuple(
        Edge(e.src, e.dst, SDRT_RELATIONS[k]) for e, k in zip(g.edges, draws)
    )
    return DiscourseGraph(n_nodes=g.n_nodes, edges=edges)


def _pick(rng: np.random.Generator, n_edges: int, rate: float) -> np.ndarray:
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    k = int(np.floor(rate * n_edges))
    return rng.choice(n_edges, size=k, replace=False)


def hide_edges(g: DiscourseGraph, rate: float, seed: int) -> DiscourseGraph:
    """Remove ``floor(rate * |edges|)`` edges, chosen uniformly without replacement."""
    rng = np.random.Generator(np.random.PCG64(seed))
    drop = set(_pick(rng, len(g.edges), rate).tolist())
    edges = tuple(e for i, e in enumerate(g.edges) if i not in drop)
    return DiscourseGraph(n_nodes=g.n_nodes, edges=edges)


def hide_relation_labels(g: DiscourseGraph, rate: float, seed: int) -> DiscourseGraph:
    """Relabel ``floor(rate * |edges|)`` random edges to Unknown; structure kept."""
    rng = np.random.Generator(np.random.PCG64(seed))
    hit = set(_pick(rng, len(g.edges), rate).tolist())
    edges = tuple(
        Edge(e.src, e.dst, RelationType.Unknown) if i in hit else e
        for i, e in enumerate(g.edges)
    )
    return DiscourseGraph(n_nodes=g.n_nodes, edges=edges)


def degree_centrality(g: DiscourseGraph) -> np.ndarray:
    """Undirected degree per node: count of incident edges, in plus out."""
    deg = np.zeros(g.n_nodes, dtype=np.int64)
    for e in g.edges:
        deg[e.src] += 1
        deg[e.dst] += 1
    return deg


def _undirected_adjacency_sets(g: DiscourseGraph) -> list[set[int]]:
    nbrs: list[set[int]] = [set() for _ in range(g.n_nodes)]
    for a, b in g.undirected_pairs():
        nbrs[a].add(b)
        nbrs[b].add(a)
    return nbrs


def local_clustering(g: DiscourseGraph) -> np.ndarray:
    """Per-node fraction of neighbor pairs that are themselves connected.

    Computed on the undirected simplification; nodes of degree < 2 contribute 0.
    """
    nbrs = _undirected_adjacency_sets(g)
    coeff = np.zeros(g.n_nodes, dtype=np.float64)
    for v in range(g.n_nodes):
        k = len(nbrs[v])
        if k < 2:
            continue
        linked = 0
        neigh = sorted(nbrs[v])
        for i, u in enumerate(neigh):
            for w in neigh[i + 1:]:
                if w in nbrs[u]:
                    linked += 1
        coeff[v] = linked / (k * (k - 1) / 2)
    return coeff


def graph_stats(g: DiscourseGraph) -> dict:
    """Edge count, directed-simple-graph density, and mean local clustering."""
    if g.n_nodes < 2:
        raise ContractError(f"density undefined for {g.n_nodes} node(s)")
    directed_pairs = {(e.src, e.dst) for e in g.edges}
    density = len(directed_pairs) / (g.n_nodes * (g.n_nodes - 1))
    avg_clustering = float(np.mean(local_clustering(g))) if g.n_nodes else 0.0
    return {
        "edge_count": len(g.edges),
        "density": density,
        "avg_clustering": avg_clustering,
    }
