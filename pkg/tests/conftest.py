import numpy as np
import pytest

from graphsumm.corpus import Edu, EmbeddingMatrix, Meeting
from graphsumm.graphs import DiscourseGraph, Edge, RelationType


def make_meeting(texts, labels, meeting_id="m0", budget=None):
    edus = tuple(Edu(index=i, speaker="AB"[i % 2], text=t) for i, t in enumerate(texts))
    return Meeting(meeting_id=meeting_id, edus=edus, gold_labels=tuple(labels),
                   budget_words=budget)


def make_graph(n, triples):
    edges = tuple(Edge(s, d, RelationType(r) if isinstance(r, str) else r)
                  for s, d, r in triples)
    return DiscourseGraph(n_nodes=n, edges=edges)


def random_graph(rng, n, n_edges, relations=None):
    relations = relations or list(RelationType)[:16]
    triples = set()
    while len(triples) < n_edges:
        s, d = rng.integers(0, n, size=2)
        if s == d:
            continue
        triples.add((int(s), int(d), relations[int(rng.integers(len(relations)))]))
    return make_graph(n, sorted(triples, key=lambda t: (t[0], t[1], t[2].value)))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


@pytest.fixture
def tiny_meeting():
    return make_meeting(
        ["we should ship the beta", "agreed", "what about the budget",
         "finance signed off yesterday", "then we ship friday"],
        [1, 0, 0, 1, 1], budget=12)


@pytest.fixture
def tiny_graph():
    return make_graph(5, [(0, 1, "Acknowledgement"), (0, 2, "ClarificationQuestion"),
                          (2, 3, "QuestionAnswerPair"), (3, 4, "Result")])


@pytest.fixture
def tiny_embedding(tiny_meeting):
    rng = np.random.Generator(np.random.PCG64(7))
    return EmbeddingMatrix(rng.normal(size=(len(tiny_meeting), 4)).astype(np.float32))
