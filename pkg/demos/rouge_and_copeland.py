"""
Scoring summaries: ROUGE overlap and Copeland preference ranking
================================================================

Two complementary views of summary quality: lexical overlap against a
gold summary (ROUGE-1/2/L) and an ordinal ranking aggregated from
pairwise human preferences (Copeland).
"""

import numpy as np

from graphsumm import PreferenceMatrix, copeland, prf1, rouge_l, rouge_n
from graphsumm.metrics import copeland_ranking, rouge_report

# ROUGE-n is clipped n-gram F1.  "the cat sat" vs "the cat ran" shares
# two of three unigrams and one of two bigrams.
gold = "the cat sat"
cand = "the cat ran"
print("ROUGE-1:", rouge_n(cand, gold, 1))   # 2/3
print("ROUGE-2:", rouge_n(cand, gold, 2))   # 1/2

# ROUGE-L uses the longest common subsequence, so it rewards order
# without requiring contiguity: "a b c d" vs "a x c y" has LCS "a c".
print("ROUGE-L:", rouge_l("a x c y", "a b c d"))   # 0.5

# Clipping matters: a candidate can't farm credit by repeating a word
# more often than the reference contains it.
print("clipped:", rouge_n("a a a", "a a", 1))   # 4/5, not 6/5
print("report :", rouge_report(cand, gold))

# Classification quality of the underlying node selections is ordinary
# precision/recall/F1 over the binary choices.
print("\nPRF on picks:", prf1([1, 1, 0, 0], [1, 0, 1, 0]))

# Copeland ranking: wins[a][b] counts judges preferring summarizer a over
# b; the score is total wins minus total losses.  A method can lose every
# duel narrowly and still score deeply negative -- the ranking reflects
# dominance, not average margin.
methods = ("alpha", "beta", "gamma", "delta")
wins = np.array([
    [0, 6, 7, 9],
    [4, 0, 6, 8],
    [3, 4, 0, 7],
    [1, 2, 3, 0],
])
m = PreferenceMatrix(methods, wins)
print("\nCopeland scores:", copeland(m))
for rank, (name, score) in enumerate(copeland_ranking(m), 1):
    print(f"  {rank}. {name:<6} {score:+d}")

# Scores always sum to zero: every win is someone else's loss.
assert sum(copeland(m).values()) == 0
print("scores sum to zero")
