"""Classification metrics, self-contained ROUGE-1/2/L, and Copeland
aggregation of pairwise preference counts."""
from __future__ import annotations

import csv
import json
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, DataError

_TOKEN_RE = re.compile(r"[0-9a-z]+")


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def _f1(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def prf1(predicted, gold) -> PRF:
    """Micro precision/recall/F1 of binary vectors; zero denominators give 0."""
    pred = np.asarray(predicted, dtype=np.int64).reshape(-1)
    true = np.asarray(gold, dtype=np.int64).reshape(-1)
    if pred.shape != true.shape:
        raise ContractError(f"length mismatch: {pred.shape[0]} predicted vs {true.shape[0]} gold")
    bad = set(np.unique(pred)) | set(np.unique(true))
    if not bad <= {0, 1}:
        raise DataError(f"labels must be 0/1, saw {sorted(bad - {0, 1})}")
    tp = int(np.sum((pred == 1) & (true == 1)))
    fp = int(np.sum((pred == 1) & (true == 0)))
    fn = int(np.sum((pred == 0) & (true == 1)))
    p = tp / (tp + fp) if tp + fp > 0 else 0.0
    r = tp / (tp + fn) if tp + fn > 0 else 0.0
    return PRF(p, r, _f1(p, r))


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs."""
    return _TOKEN_RE.findall(text.lower())


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int) -> float:
    """Clipped n-gram overlap F1; either side empty of n-grams gives 0."""
    if n not in (1, 2):
        raise ContractError(f"n must be 1 or 2, got {n}")
    cand = _ngrams(tokenize(candidate), n)
    ref = _ngrams(tokenize(reference), n)
    total_c, total_r = sum(cand.values()), sum(ref.values())
    if total_c == 0 or total_r == 0:
        return 0.0
    overlap = sum(min(count, ref[g]) for g, count in cand.items())
    return _f1(overlap / total_c, overlap / total_r)


def lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str) -> float:
    """Token-level longest-common-subsequence F1."""
    cand, ref = tokenize(candidate), tokenize(reference)
    if not cand or not ref:
        return 0.0
    lcs = lcs_length(cand, ref)
    return _f1(lcs / len(cand), lcs / len(ref))


def rouge_report(candidate: str, reference: str) -> dict[str, float]:
    return {
        "rouge1": rouge_n(candidate, reference, 1),
        "rouge2": rouge_n(candidate, reference, 2),
        "rougeL": rouge_l(candidate, reference),
    }


@dataclass(frozen=True)
class PreferenceMatrix:
    """wins[a][b] = how many times method a was preferred over method b."""

    methods: tuple[str, ...]
    wins: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        wins = np.asarray(self.wins, dtype=np.int64)
        object.__setattr__(self, "wins", wins)
        k = len(self.methods)
        if wins.shape != (k, k):
            raise ContractError(f"wins matrix {wins.shape} does not match {k} methods")
        if np.any(np.diag(wins) != 0):
            raise ContractError("preference matrix diagonal must be zero")
        if np.any(wins < 0):
            raise ContractError("preference counts must be non-negative")


def copeland(m: PreferenceMatrix) -> dict[str, int]:
    """Wins minus losses per method: row sum minus column sum."""
    scores = m.wins.sum(axis=1) - m.wins.sum(axis=0)
    return {name: int(s) for name, s in zip(m.methods, scores)}


def copeland_ranking(m: PreferenceMatrix) -> list[tuple[str, int]]:
    scores = copeland(m)
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))


def save_preference_csv(m: PreferenceMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", *m.methods])
        for name, row in zip(m.methods, m.wins):
            writer.writerow([name, *(int(v) for v in row)])


def load_preference_csv(path) -> PreferenceMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["method"]:
        raise DataError(f"{path}: expected a 'method' header column")
    methods = tuple(rows[0][1:])
    if len(rows) - 1 != len(methods):
        raise DataError(f"{path}: {len(rows) - 1} rows for {len(methods)} methods")
    wins = np.zeros((len(methods), len(methods)), dtype=np.int64)
    for i, row in enumerate(rows[1:]):
        if row[0] != methods[i]:
            raise DataError(f"{path}: row {i} is {row[0]!r}, expected {methods[i]!r}")
        try:
            wins[i] = [int(v) for v in row[1:]]
        except ValueError as exc:
            raise DataError(f"{path}: non-integer count in row {row[0]!r}") from exc
    return PreferenceMatrix(methods, wins)


def write_json(path, obj) -> None:
    """Stable, diff-friendly JSON: sorted keys, trailing newline."""
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())
