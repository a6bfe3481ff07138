"""
Budgeted extraction strategies side by side
===========================================

Given per-node scores, a summary is a subset of EDUs under a hard word
budget.  This script builds one small meeting by hand and runs each
strategy on the same scores, so the selection rules and tie-breaks are
visible in the output.
"""

import numpy as np

from graphsumm import Meeting, Edu, lead_n, rank_by_length, rank_by_logits, select_threshold
from graphsumm.summarization import budgetize_prefix, selection_summary

edus = (
    Edu(0, "A", "kickoff agenda and attendance for the quarterly review"),   # 8 words
    Edu(1, "B", "the migration slipped two weeks"),                          # 5 words
    Edu(2, "C", "we agreed to freeze scope until the pilot ships"),          # 9 words
    Edu(3, "A", "lunch order reminder"),                                     # 3 words
    Edu(4, "B", "action item carlos owns the rollback plan"),                # 7 words
)
meeting = Meeting("demo-000", edus, gold_labels=(0, 1, 1, 0, 1),
                  budget_words=15)
scores = np.array([0.10, 0.80, 0.95, 0.05, 0.80])

print(f"budget: {meeting.budget_words} words")
for edu, s in zip(edus, scores):
    print(f"  [{edu.index}] score={s:.2f} {edu.word_count:>2} words  {edu.text!r}")

# Threshold: keep scores >= tau in transcript order, then cut the joined
# text to the budget mid-EDU if needed (a word-prefix summary).
sel = select_threshold(meeting, scores, tau=0.5)
summary = budgetize_prefix(sel, meeting)
print("\nThreshold(0.5) picked", sel.chosen)
print("  ->", summary.word_count, "words:", summary.text)

# RankByLength: among scores >= tau, greedily add longest-first while the
# whole EDU fits; overflowing candidates are skipped, not truncated.
# Ties break toward the lower index.
summary = selection_summary(rank_by_length(meeting, scores, tau=0.5), meeting)
print("\nRankByLength picked", summary.chosen_indices)
print("  ->", summary.word_count, "words:", summary.text)

# RankByLogits: same greedy budget walk but ordered by score.  EDUs 1 and
# 4 tie at 0.80; index 1 wins the tie, and after 2+1 the 7-word EDU 4 no
# longer fits.
summary = selection_summary(rank_by_logits(meeting, scores, tau=0.5), meeting)
print("\nRankByLogits picked", summary.chosen_indices)
print("  ->", summary.word_count, "words:", summary.text)

# LeadN ignores scores entirely: first budget_words words of the
# transcript, the classic lead baseline.
summary = lead_n(meeting)
print("\nLeadN")
print("  ->", summary.word_count, "words:", summary.text)

# Every strategy respects the budget as a hard cap.
for name, s in (("threshold", budgetize_prefix(select_threshold(meeting, scores), meeting)),
                ("by-length", selection_summary(rank_by_length(meeting, scores), meeting)),
                ("by-logits", selection_summary(rank_by_logits(meeting, scores), meeting)),
                ("lead", lead_n(meeting))):
    assert s.word_count <= meeting.budget_words, name
print("\nall strategies within budget")
