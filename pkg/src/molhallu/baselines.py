"""Reference text metrics for side-by-side comparison tables.

Sentence-level BLEU (with brevity penalty), ROUGE-N, ROUGE-L, and
METEOR over the toolkit's shared tokenization, so comparisons against
the Mol-Hallu score are like-for-like. Scores live on the 0-1 scale;
the report layer rescales to 0-100 for display.

METEOR here uses exact unigram matching only (no stemming or synonym
resource) with an in-order occurrence alignment: the i-th occurrence of
a word in the prediction pairs with the i-th remaining occurrence in
the reference. Chunks are maximal runs of pairs adjacent in both texts.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .textproc import tokenize

DEFAULT_THETA = 1e-5
DEFAULT_ROUGE_L_BETA = 1.2
DEFAULT_METEOR_GAMMA = 0.5
DEFAULT_METEOR_PENALTY_EXPONENT = 3


@dataclass(frozen=True)
class BaselineScores:
    """The standard metric bundle for one sample, all in [0, 1]."""

    bleu2: float
    bleu4: float
    rouge1: float
    rouge2: float
    rougeL: float
    meteor: float

    def to_dict(self) -> dict:
        return {
            "bleu2": self.bleu2,
            "bleu4": self.bleu4,
            "rouge1": self.rouge1,
            "rouge2": self.rouge2,
            "rougeL": self.rougeL,
            "meteor": self.meteor,
        }


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(
        tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1)
    )


def bleu(
    pred: Sequence[str],
    ref: Sequence[str],
    max_order: int = 4,
    weights: Optional[Sequence[float]] = None,
    theta: float = DEFAULT_THETA,
) -> float:
    """Sentence BLEU with clipped modified precisions and brevity penalty.

    Zero (or empty-candidate) order precisions are smoothed up to
    ``theta``. Weights default to uniform 1/max_order. An empty
    reference is an error; an empty prediction scores 0.
    """
    if not ref:
        raise ValueError("BLEU requires a non-empty reference")
    if not pred:
        return 0.0
    if weights is None:
        weights = [1.0 / max_order] * max_order
    if len(weights) != max_order:
        raise ValueError("need one weight per n-gram order")

    log_sum = 0.0
    for n in range(1, max_order + 1):
        cand = _ngram_counts(pred, n)
        total = sum(cand.values())
        if total == 0:
            p_n = 0.0
        else:
            ref_counts = _ngram_counts(ref, n)
            matched = sum(
                min(c, ref_counts.get(g, 0)) for g, c in cand.items()
            )
            p_n = matched / total
        log_sum += weights[n - 1] * math.log(max(p_n, theta))

    c, r = len(pred), len(ref)
    bp = 1.0 if c > r else math.exp(1.0 - r / c)
    return bp * math.exp(log_sum)


def rouge_n(pred: Sequence[str], ref: Sequence[str], n: int) -> float:
    """Recall-oriented n-gram co-occurrence: clipped matches over the
    reference n-gram total. A reference shorter than ``n`` scores 0."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ref_counts = _ngram_counts(ref, n)
    denom = sum(ref_counts.values())
    if denom == 0:
        return 0.0
    cand = _ngram_counts(pred, n)
    matched = sum(min(c, cand.get(g, 0)) for g, c in ref_counts.items())
    return matched / denom


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[len(b)]


def rouge_l(
    pred: Sequence[str], ref: Sequence[str], beta: float = DEFAULT_ROUGE_L_BETA
) -> float:
    """LCS F-measure with recall emphasis ``beta``."""
    lcs = _lcs_length(pred, ref)
    if lcs == 0:
        return 0.0
    recall = lcs / len(ref)
    precision = lcs / len(pred)
    beta_sq = beta * beta
    return (1.0 + beta_sq) * recall * precision / (recall + beta_sq * precision)


def _align_unigrams(
    pred: Sequence[str], ref: Sequence[str]
) -> list[tuple[int, int]]:
    """Pair pred token positions with ref positions, occurrence by
    occurrence, in reading order."""
    ref_positions: dict[str, deque[int]] = {}
    for j, w in enumerate(ref):
        ref_positions.setdefault(w, deque()).append(j)
    pairs: list[tuple[int, int]] = []
    for i, w in enumerate(pred):
        slots = ref_positions.get(w)
        if slots:
            pairs.append((i, slots.popleft()))
    return pairs


def meteor(
    pred: Sequence[str],
    ref: Sequence[str],
    gamma_m: float = DEFAULT_METEOR_GAMMA,
    penalty_exponent: int = DEFAULT_METEOR_PENALTY_EXPONENT,
) -> float:
    """Harmonic-mean unigram metric with a fragmentation penalty.

    Score = (1 - gamma_m * (chunks / matches) ** penalty_exponent)
            * 10 P R / (R + 9 P), 0 when nothing matches.
    """
    pairs = _align_unigrams(pred, ref)
    m = len(pairs)
    if m == 0:
        return 0.0
    precision = m / len(pred)
    recall = m / len(ref)
    fmean = 10.0 * precision * recall / (recall + 9.0 * precision)

    chunks = 0
    prev_i, prev_j = None, None
    for i, j in pairs:
        if prev_i is None or i != prev_i + 1 or j != prev_j + 1:
            chunks += 1
        prev_i, prev_j = i, j
    penalty = (chunks / m) ** penalty_exponent
    return (1.0 - gamma_m * penalty) * fmean


def compute_baselines(
    pred_text: str,
    ref_text: str,
    theta: float = DEFAULT_THETA,
    meteor_gamma: float = DEFAULT_METEOR_GAMMA,
    meteor_penalty_exponent: int = DEFAULT_METEOR_PENALTY_EXPONENT,
) -> BaselineScores:
    """Tokenize a (prediction, reference) pair and score all baselines."""
    pred = tokenize(pred_text).tokens
    ref = tokenize(ref_text).tokens
    return BaselineScores(
        bleu2=bleu(pred, ref, max_order=2, theta=theta),
        bleu4=bleu(pred, ref, max_order=4, theta=theta),
        rouge1=rouge_n(pred, ref, 1),
        rouge2=rouge_n(pred, ref, 2),
        rougeL=rouge_l(pred, ref),
        meteor=meteor(
            pred,
            ref,
            gamma_m=meteor_gamma,
            penalty_exponent=meteor_penalty_exponent,
        ),
    )
