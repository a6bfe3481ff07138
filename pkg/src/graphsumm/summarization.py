"""Score-to-summary strategies: thresholding, two greedy rankings, and the
lead baseline, all constrained by the meeting's word budget.

The ranking strategies skip a candidate that would overflow the budget and
keep trying later ones (skip_on_overflow=False restores stop-at-first-
overflow). Mid-EDU truncation happens only in budgetize_prefix and lead_n;
the rankers only ever take whole EDUs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Meeting
from .errors import ContractError, DataError
from .metrics import write_json

STRATEGIES = ("Threshold", "RankByLength", "RankByLogits", "LeadN")


@dataclass(frozen=True)
class Selection:
    meeting_id: str
    chosen: tuple[int, ...]
    strategy: str
    scores: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "chosen", tuple(int(i) for i in self.chosen))
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        if self.strategy not in STRATEGIES:
            raise ContractError(f"unknown strategy {self.strategy!r}")
        n = len(self.scores)
        if any(not 0 <= i < n for i in self.chosen):
            raise ContractError(f"chosen index out of range for {n} nodes")
        if any(a >= b for a, b in zip(self.chosen, self.chosen[1:])):
            raise ContractError("chosen indices must be strictly increasing")


@dataclass(frozen=True)
class Summary:
    meeting_id: str
    strategy: str
    chosen_indices: tuple[int, ...]
    text: str
    word_count: int

    def to_dict(self) -> dict:
        return {
            "meeting_id": self.meeting_id,
            "strategy": self.strategy,
            "chosen_indices": list(self.chosen_indices),
            "text": self.text,
            "word_count": self.word_count,
        }


def _checked_scores(meeting: Meeting, scores) -> np.ndarray:
    arr = np.asarray(scores, dtype=np.float64).reshape(-1)
    if arr.shape[0] != len(meeting):
        raise ContractError(f"{arr.shape[0]} scores for {len(meeting)} EDUs")
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
        raise DataError("scores must lie in [0, 1]")
    return arr


def _budget(meeting: Meeting) -> int:
    if meeting.budget_words is None:
        raise ContractError(f"meeting {meeting.meeting_id} has no budget_words")
    return meeting.budget_words


def select_threshold(meeting: Meeting, scores, tau: float = 0.5) -> Selection:
    """All EDUs scoring at least tau, in transcript order. No budget here;
    pair with budgetize_prefix."""
    arr = _checked_scores(meeting, scores)
    chosen = tuple(int(i) for i in np.flatnonzero(arr >= tau))
    return Selection(meeting.meeting_id, chosen, "Threshold", tuple(arr))


def _greedy(meeting: Meeting, order: list[int], skip_on_overflow: bool) -> list[int]:
    budget = _budget(meeting)
    used = 0
    taken: list[int] = []
    for i in order:
        wc = meeting.edus[i].word_count
        if used + wc > budget:
            if skip_on_overflow:
                continue
            break
        taken.append(i)
        used += wc
    return sorted(taken)


def rank_by_length(meeting: Meeting, scores, tau: float = 0.5,
                   skip_on_overflow: bool = True) -> Selection:
    """Longest threshold-passing EDUs first (ties: lower index), greedily
    packed under the budget; output back in transcript order."""
    arr = _checked_scores(meeting, scores)
    candidates = [int(i) for i in np.flatnonzero(arr >= tau)]
    order = sorted(candidates, key=lambda i: (-meeting.edus[i].word_count, i))
    chosen = _greedy(meeting, order, skip_on_overflow)
    return Selection(meeting.meeting_id, tuple(chosen), "RankByLength", tuple(arr))


def rank_by_logits(meeting: Meeting, scores, tau: float = 0.5,
                   skip_on_overflow: bool = True) -> Selection:
    """Highest-scoring threshold-passing EDUs first (ties: lower index),
    greedily packed under the budget; output in transcript order."""
    arr = _checked_scores(meeting, scores)
    candidates = [int(i) for i in np.flatnonzero(arr >= tau)]
    order = sorted(candidates, key=lambda i: (-arr[i], i))
    chosen = _greedy(meeting, order, skip_on_overflow)
    return Selection(meeting.meeting_id, tuple(chosen), "RankByLogits", tuple(arr))


def _word_prefix(meeting: Meeting, indices, strategy: str, budget: int) -> Summary:
    words: list[str] = []
    chosen: list[int] = []
    for i in indices:
        room = budget - len(words)
        if room <= 0:
            break
        kept = meeting.edus[i].text.split()[:room]
        words.extend(kept)
        chosen.append(i)
    return Summary(meeting.meeting_id, strategy, tuple(chosen), " ".join(words), len(words))


def budgetize_prefix(sel: Selection, meeting: Meeting) -> Summary:
    """Longest word-prefix of the selected EDUs that fits the budget; the
    EDU on the boundary is cut at a word boundary."""
    return _word_prefix(meeting, sel.chosen, sel.strategy, _budget(meeting))


def lead_n(meeting: Meeting) -> Summary:
    """First budget_words words of the transcript."""
    return _word_prefix(meeting, range(len(meeting)), "LeadN", _budget(meeting))


def selection_summary(sel: Selection, meeting: Meeting) -> Summary:
    """Whole-EDU summary of an already-budgeted selection (rankers)."""
    text = " ".join(meeting.edus[i].text for i in sel.chosen)
    words = len(text.split())
    return Summary(meeting.meeting_id, sel.strategy, sel.chosen, " ".join(text.split()), words)


def save_summary(summary: Summary, path) -> None:
    write_json(path, summary.to_dict())
