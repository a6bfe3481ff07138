"""Transcript, label, and embedding data model with validated file ingestion.

File formats:

* Meeting file: JSON lines. An optional first line ``{"meeting_id": ...,
  "budget_words": ...}`` is followed by one object per EDU:
  ``{"index": int, "speaker": str, "text": str, "label": 0|1}``.
* Embedding file: a single DEMB record (see :mod:`graphsumm.demb`).
* Split file: JSON ``{"train": [...], "validation": [...], "test": [...]}``.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import demb
from .errors import AlignmentError, ContractError, DataError, ParseError


@dataclass(frozen=True)
class Edu:
    """One elementary discourse unit: the atomic node/candidate-summary unit."""

    index: int
    speaker: str
    text: str
    word_count: int = field(init=False)

    def __post_init__(self):
        if self.index < 0:
            raise DataError(f"EDU index must be non-negative, got {self.index}")
        n_words = len(self.text.split())
        if n_words == 0:
            raise DataError(f"EDU {self.index} has empty text")
        object.__setattr__(self, "word_count", n_words)


@dataclass(frozen=True)
class Meeting:
    """An ordered EDU sequence with binary gold extract labels.

    ``budget_words`` is the target summary length; it may be None right
    after load and is then filled from the corpus-level default (see
    :func:`default_budget_words`).
    """

    meeting_id: str
    edus: tuple[Edu, ...]
    gold_labels: tuple[int, ...]
    budget_words: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "edus", tuple(self.edus))
        object.__setattr__(self, "gold_labels", tuple(int(x) for x in self.gold_labels))
        if len(self.gold_labels) != len(self.edus):
            raise AlignmentError(
                f"meeting {self.meeting_id}: {len(self.gold_labels)} labels "
                f"for {len(self.edus)} EDUs"
            )
        for lab in self.gold_labels:
            if lab not in (0, 1):
                raise DataError(f"meeting {self.meeting_id}: label {lab} not in {{0,1}}")
        indices = [e.index for e in self.edus]
        if indices != list(range(len(self.edus))):
            raise AlignmentError(
                f"meeting {self.meeting_id}: EDU indices must be 0..{len(self.edus) - 1} "
                "in order with no gaps"
            )
        if self.budget_words is not None and self.budget_words <= 0:
            raise DataError(f"meeting {self.meeting_id}: budget_words must be positive")

    def __len__(self) -> int:
        return len(self.edus)

    @property
    def total_words(self) -> int:
        return sum(e.word_count for e in self.edus)

    @property
    def gold_extract_words(self) -> int:
        """Word count of the gold extractive summary."""
        return sum(e.word_count for e, y in zip(self.edus, self.gold_labels) if y == 1)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Row i holds the embedding of EDU i. Values are finite float32."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float32)
        if arr.ndim != 2:
            raise DataError(f"embedding matrix must be 2-D, got shape {arr.shape}")
        bad = np.argwhere(~np.isfinite(arr))
        if bad.size:
            r, c = bad[0]
            raise DataError(f"non-finite embedding value at ({r}, {c})")
        object.__setattr__(self, "values", arr)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CorpusSplit:
    train: tuple[str, ...]
    validation: tuple[str, ...]
    test: tuple[str, ...]

    def __post_init__(self):
        for name in ("train", "validation", "test"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        seen: set[str] = set()
        for name in ("train", "validation", "test"):
            ids = getattr(self, name)
            overlap = seen.intersection(ids)
            if overlap:
                raise DataError(f"split portions overlap on {sorted(overlap)}")
            if len(set(ids)) != len(ids):
                raise DataError(f"duplicate ids inside split portion {name!r}")
            seen.update(ids)

    def all_ids(self) -> tuple[str, ...]:
        return self.train + self.validation + self.test

    def resolve(self, meetings: dict[str, Meeting]) -> None:
        """Raise unless every id maps to a loaded meeting."""
        missing = [m for m in self.all_ids() if m not in meetings]
        if missing:
            raise ContractError(f"split references unknown meetings: {missing}")


def load_meeting(path: str) -> Meeting:
    """Parse one JSON-lines meeting file.

    The meeting id defaults to the file stem when no header line is present.
    """
    meeting_id = os.path.splitext(os.path.basename(path))[0]
    budget_words = None
    edus: list[Edu] = []
    labels: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line=lineno) from exc
            if not isinstance(obj, dict):
                raise ParseError("expected a JSON object", line=lineno)
            if "meeting_id" in obj and "index" not in obj:
                if edus:
                    raise ParseError("header line must come first", line=lineno)
                meeting_id = str(obj["meeting_id"])
                if "budget_words" in obj and obj["budget_words"] is not None:
                    budget_words = int(obj["budget_words"])
                continue
            missing = {"index", "speaker", "text", "label"} - obj.keys()
            if missing:
                raise ParseError(f"EDU record missing keys {sorted(missing)}", line=lineno)
            try:
                edus.append(Edu(index=int(obj["index"]), speaker=str(obj["speaker"]),
                                text=str(obj["text"])))
                labels.append(int(obj["label"]))
            except (DataError, ValueError) as exc:
                raise ParseError(str(exc), line=lineno) from exc
    if not edus:
        raise ParseError(f"{path}: no EDU records found")
    order = sorted(range(len(edus)), key=lambda i: edus[i].index)
    return Meeting(
        meeting_id=meeting_id,
        edus=tuple(edus[i] for i in order),
        gold_labels=tuple(labels[i] for i in order),
        budget_words=budget_words,
    )


def save_meeting(meeting: Meeting, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header: dict = {"meeting_id": meeting.meeting_id}
        if meeting.budget_words is not None:
            header["budget_words"] = meeting.budget_words
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for edu, label in zip(meeting.edus, meeting.gold_labels):
            rec = {"index": edu.index, "speaker": edu.speaker,
                   "text": edu.text, "label": label}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_embeddings(path: str, expected_rows: int) -> EmbeddingMatrix:
    """Load one DEMB file and check its row count against the meeting."""
    with open(path, "rb") as fh:
        buf = fh.read()
    values, end = demb.decode_matrix(buf)
    if end != len(buf):
        raise ParseError(f"{path}: {len(buf) - end} trailing bytes after record")
    if values.shape[0] != expected_rows:
        raise AlignmentError(
            f"{path}: {values.shape[0]} embedding rows, expected {expected_rows}"
        )
    return EmbeddingMatrix(values=values)


def save_embeddings(matrix: EmbeddingMatrix | np.ndarray, path: str) -> None:
    values = matrix.values if isinstance(matrix, EmbeddingMatrix) else matrix
    with open(path, "wb") as fh:
        fh.write(demb.encode_matrix(values))


def load_split(path: str) -> CorpusSplit:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    missing = {"train", "validation", "test"} - obj.keys()
    if missing:
        raise ParseError(f"{path}: split file missing keys {sorted(missing)}")
    return CorpusSplit(train=obj["train"], validation=obj["validation"], test=obj["test"])


def save_split(split: CorpusSplit, path: str) -> None:
    obj = {"train": list(split.train), "validation": list(split.validation),
           "test": list(split.test)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def default_budget_words(meetings: dict[str, Meeting], train_ids) -> int:
    """Mean gold extract word count over the training split, rounded to nearest.

    Rounding is half away from zero so that e.g. a mean of 1979.8 gives 1980.
    """
    train_ids = list(train_ids)
    if not train_ids:
        raise ContractError("cannot compute a budget default from an empty train split")
    counts = [meetings[m].gold_extract_words for m in train_ids]
    return int(math.floor(sum(counts) / len(counts) + 0.5))


def apply_budget_default(meetings: dict[str, Meeting], train_ids) -> dict[str, Meeting]:
    """Fill missing budgets with the corpus default; explicit budgets are kept."""
    if all(m.budget_words is not None for m in meetings.values()):
        return dict(meetings)
    budget = default_budget_words(meetings, train_ids)
    out = {}
    for mid, meeting in meetings.items():
        if meeting.budget_words is None:
            meeting = Meeting(meeting.meeting_id, meeting.edus, meeting.gold_labels,
                              budget_words=budget)
        out[mid] = meeting
    return out


@dataclass(frozen=True)
class ValidationIssue:
    meeting_id: str
    kind: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def failing_ids(self) -> set[str]:
        return {issue.meeting_id for issue in self.issues}


def validate_corpus(meetings: dict[str, Meeting], graphs: dict, embeddings: dict) -> ValidationReport:
    """Cross-check node counts between meetings, graphs, and embeddings.

    Report-only: callers decide what to do with failing meetings (training
    refuses them).
    """
    issues: list[ValidationIssue] = []
    dims = {emb.dim for emb in embeddings.values()}
    if len(dims) > 1:
        for mid in sorted(embeddings):
            issues.append(ValidationIssue(mid, "dim-mismatch",
                                          f"corpus mixes embedding dims {sorted(dims)}"))
    for mid in sorted(meetings):
        meeting = meetings[mid]
        n = len(meeting)
        graph = graphs.get(mid)
        if graph is None:
            issues.append(ValidationIssue(mid, "missing-artifact", "no discourse graph"))
        else:
            if graph.n_nodes != n:
                issues.append(ValidationIssue(
                    mid, "node-count",
                    f"graph has {graph.n_nodes} nodes, meeting has {n} EDUs"))
            for edge in graph.edges:
                if edge.src >= n or edge.dst >= n:
                    issues.append(ValidationIssue(
                        mid, "edge-out-of-range",
                        f"edge ({edge.src}, {edge.dst}) outside 0..{n - 1}"))
                    break
        emb = embeddings.get(mid)
        if emb is None:
            issues.append(ValidationIssue(mid, "missing-artifact", "no embedding matrix"))
        elif emb.n_rows != n:
            issues.append(ValidationIssue(
                mid, "row-count",
                f"embedding has {emb.n_rows} rows, meeting has {n} EDUs"))
    return ValidationReport(issues=tuple(issues))


def load_corpus_dir(corpus_dir: str) -> dict[str, Meeting]:
    """Load every ``*.jsonl`` meeting in a directory, keyed by meeting id."""
    meetings: dict[str, Meeting] = {}
    for name in sorted(os.listdir(corpus_dir)):
        if not name.endswith(".jsonl"):
            continue
        meeting = load_meeting(os.path.join(corpus_dir, name))
        if meeting.meeting_id in meetings:
            raise DataError(f"duplicate meeting id {meeting.meeting_id!r}")
        meetings[meeting.meeting_id] = meeting
    return meetings


def load_embedding_dir(embeddings_dir: str, meetings: dict[str, Meeting]) -> dict[str, EmbeddingMatrix]:
    """Load ``<meeting_id>.demb`` for every meeting that has one."""
    out: dict[str, EmbeddingMatrix] = {}
    for mid, meeting in meetings.items():
        path = os.path.join(embeddings_dir, f"{mid}.demb")
        if os.path.exists(path):
            out[mid] = load_embeddings(path, expected_rows=len(meeting))
    return out
