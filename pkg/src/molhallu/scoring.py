"""The Mol-Hallu score: entity-entailment F1 for molecular QA text.

A sample is scored by comparing the predicted answer against the
ground-truth answer and, when available, the molecular description.
Precision blends two parts with an entity-error weight:

  * entity reward precision: each predicted entity scores 1 when the
    ground-truth answer contains it, otherwise 1 when the description
    contains it, otherwise 0; per-order means are combined by a
    geometric average over n-gram orders 1-4 (an entity span of k
    tokens participates at order min(k, 4));
  * non-entity precision: clipped (modified) n-gram precision over
    prediction n-grams that touch no entity token, against the equally
    filtered ground-truth n-grams.

The blend weight is gamma = 1 - sqrt(n_wrong / n_total), where a
predicted entity is wrong when neither the ground-truth answer nor the
description contains it. Recall is frequency-weighted clipped n-gram
recall against the full ground truth, geometric-averaged the same way.
Components below the smoothing floor are raised to it before the
geometric mean; orders with no material (no entities of that length, no
candidate n-grams) are dropped from the mean. The final score is the
F1 of precision and recall, and a corpus scores the arithmetic mean of
its samples' F1 values.

All functions here are pure; scoring the same sample twice produces
bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .lexicon import EntityLexicon
from .textproc import (
    MAX_NGRAM_ORDER,
    EntitySpan,
    NGramMultiset,
    TokenizedText,
    extract_entities,
    extract_ngrams,
    ngrams_outside_spans,
    tokenize,
)

DEFAULT_THETA = 1e-5

#: Blend orientation for combining non-entity and entity precision.
#: "as-printed" uses P = gamma * P_nonentity + (1 - gamma) * P_entity,
#: which shifts weight onto the entity term as the error rate grows;
#: "inverted" swaps the two weights.
GAMMA_AS_PRINTED = "as-printed"
GAMMA_INVERTED = "inverted"
GAMMA_ORIENTATIONS = (GAMMA_AS_PRINTED, GAMMA_INVERTED)


@dataclass(frozen=True)
class ScoringSample:
    """One QA record to score.

    ``smiles`` is opaque and never tokenized. ``answer_pred`` may be
    empty (it is scored, not rejected); ``answer_gt`` must not be.
    """

    id: str
    smiles: str
    question: str
    answer_pred: str
    answer_gt: str
    description: str = ""

    def __post_init__(self) -> None:
        if not self.answer_gt:
            raise ValueError(f"sample {self.id!r}: answer_gt must be non-empty")


@dataclass
class EntailmentContext:
    """Ground-truth side of a sample, precomputed once.

    ``desc_entities`` is empty whenever the description is empty.
    """

    gt_entities: frozenset[int]
    desc_entities: frozenset[int]
    gt_ngrams: tuple[NGramMultiset, ...]
    gt_spans: list[EntitySpan] = field(default_factory=list)
    gt_text: TokenizedText = field(default_factory=lambda: TokenizedText(()))


@dataclass(frozen=True)
class MolHalluScore:
    """Per-sample result.

    Per-order tuples hold the raw (pre-smoothing) order 1-4 components;
    None marks an order with no material ("absent").
    """

    precision: float
    recall: float
    f1: float
    gamma: float
    n_wrong: int
    n_total: int
    n_counterfactual: int
    per_order_entity_precision: tuple[Optional[float], ...]
    per_order_nonentity_precision: tuple[Optional[float], ...]
    per_order_recall: tuple[Optional[float], ...]

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "gamma": self.gamma,
            "n_wrong": self.n_wrong,
            "n_total": self.n_total,
            "n_counterfactual": self.n_counterfactual,
            "per_order_entity_precision": list(self.per_order_entity_precision),
            "per_order_nonentity_precision": list(self.per_order_nonentity_precision),
            "per_order_recall": list(self.per_order_recall),
        }


@dataclass
class CorpusScore:
    """Aggregate over a corpus: mean F1, per-sample table, N_c histogram."""

    mean_f1: float
    sample_ids: list[str]
    sample_scores: list[MolHalluScore]
    histogram: dict[int, int]


def build_context(
    answer_gt: str, description: str, lexicon: EntityLexicon
) -> EntailmentContext:
    """Tokenize and entity-scan the ground-truth answer and description."""
    gt_text = tokenize(answer_gt)
    gt_spans = extract_entities(gt_text, lexicon)
    if description:
        desc_spans = extract_entities(tokenize(description), lexicon)
        desc_ids = frozenset(s.record_id for s in desc_spans)
    else:
        desc_ids = frozenset()
    return EntailmentContext(
        gt_entities=frozenset(s.record_id for s in gt_spans),
        desc_entities=desc_ids,
        gt_ngrams=tuple(
            extract_ngrams(gt_text, n) for n in range(1, MAX_NGRAM_ORDER + 1)
        ),
        gt_spans=gt_spans,
        gt_text=gt_text,
    )


def entailment_weight(
    entities: Sequence[EntitySpan], desc_entities: frozenset[int] | set[int]
) -> float:
    """Fraction of the listed entities present in the description's set.

    Zero entities yield 0.0 by convention.
    """
    if not entities:
        return 0.0
    hits = sum(1 for e in entities if e.record_id in desc_entities)
    return hits / len(entities)


def entity_precision_order(
    spans: Sequence[EntitySpan], ctx: EntailmentContext
) -> Optional[float]:
    """Mean entity reward over the order-n predicted spans.

    A span scores 1 when the ground truth contains its entity, else 1
    when the description does, else 0. Returns None when no entity is
    attributed to this order.
    """
    if not spans:
        return None
    entailed = sum(
        1.0
        for s in spans
        if s.record_id in ctx.gt_entities or s.record_id in ctx.desc_entities
    )
    return entailed / len(spans)


def nonentity_precision_order(
    pred: TokenizedText,
    gt: TokenizedText,
    pred_spans: list[EntitySpan],
    gt_spans: list[EntitySpan],
    order: int,
) -> Optional[float]:
    """Clipped n-gram precision restricted to entity-free windows.

    Candidate windows come from the prediction, reference windows from
    the ground truth, each filtered by its own entity spans. Returns
    None when the prediction offers no candidate n-grams at this order.
    """
    cand = ngrams_outside_spans(pred, pred_spans, order)
    total = cand.total()
    if total == 0:
        return None
    ref = ngrams_outside_spans(gt, gt_spans, order)
    matched = sum(
        min(count, ref.counts.get(gram, 0)) for gram, count in cand.counts.items()
    )
    return matched / total


def recall_order(
    pred_ngrams: NGramMultiset, gt_ngrams: NGramMultiset
) -> Optional[float]:
    """Frequency-weighted clipped n-gram recall for one order.

    Ground-truth n-grams with higher counts weigh more. Returns None
    when the ground truth has no n-grams at this order.
    """
    denom = gt_ngrams.total()
    if denom == 0:
        return None
    matched = sum(
        min(count, pred_ngrams.counts.get(gram, 0))
        for gram, count in gt_ngrams.counts.items()
    )
    return matched / denom


def geometric_mean_smoothed(
    components: Iterable[Optional[float]], theta: float = DEFAULT_THETA
) -> Optional[float]:
    """Geometric mean with absent orders dropped and a smoothing floor.

    Components below ``theta`` are raised to ``theta`` before the log.
    Returns None when every component is absent.
    """
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    present = [c for c in components if c is not None]
    if not present:
        return None
    logs = [math.log(max(c, theta)) for c in present]
    return math.exp(sum(logs) / len(logs))


def gamma(n_wrong: int, n_total: int) -> float:
    """Entity-error weight 1 - sqrt(n_wrong / n_total); 1.0 for no entities."""
    if n_wrong > n_total:
        raise ValueError(f"n_wrong {n_wrong} exceeds n_total {n_total}")
    if n_total == 0:
        return 1.0
    return 1.0 - math.sqrt(n_wrong / n_total)


def combine_precision(
    g: float,
    p_nonentity: float,
    p_entity: float,
    orientation: str = GAMMA_AS_PRINTED,
) -> float:
    """Convex blend of non-entity and entity precision."""
    if orientation == GAMMA_AS_PRINTED:
        return g * p_nonentity + (1.0 - g) * p_entity
    if orientation == GAMMA_INVERTED:
        return (1.0 - g) * p_nonentity + g * p_entity
    raise ValueError(f"unknown gamma orientation {orientation!r}")


def counterfactual_count(
    pred_spans: Sequence[EntitySpan], ctx: EntailmentContext
) -> int:
    """Predicted entity spans found in neither the ground truth nor the
    description."""
    return sum(
        1
        for s in pred_spans
        if s.record_id not in ctx.gt_entities
        and s.record_id not in ctx.desc_entities
    )


def entailed_recall(
    pred: TokenizedText,
    gt: TokenizedText,
    theta: float = DEFAULT_THETA,
) -> tuple[float, tuple[Optional[float], ...]]:
    """Geometric-mean n-gram recall of ``pred`` against ``gt``.

    Returns the combined recall plus the raw per-order components.
    """
    per_order = tuple(
        recall_order(extract_ngrams(pred, n), extract_ngrams(gt, n))
        for n in range(1, MAX_NGRAM_ORDER + 1)
    )
    combined = geometric_mean_smoothed(per_order, theta)
    return (0.0 if combined is None else combined), per_order


def _spans_by_order(spans: Sequence[EntitySpan]) -> list[list[EntitySpan]]:
    """Group spans by n-gram order min(token length, 4); index 0 = order 1."""
    grouped: list[list[EntitySpan]] = [[] for _ in range(MAX_NGRAM_ORDER)]
    for span in spans:
        grouped[min(span.length, MAX_NGRAM_ORDER) - 1].append(span)
    return grouped


def score_sample(
    sample: ScoringSample,
    lexicon: EntityLexicon,
    theta: float = DEFAULT_THETA,
    gamma_orientation: str = GAMMA_AS_PRINTED,
) -> MolHalluScore:
    """Score one sample end to end.

    Deterministic; degenerate inputs (empty prediction, no entities
    anywhere, missing description) all produce defined scores in [0, 1].
    """
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    ctx = build_context(sample.answer_gt, sample.description, lexicon)
    pred = tokenize(sample.answer_pred)
    pred_spans = extract_entities(pred, lexicon)

    ent_components = tuple(
        entity_precision_order(group, ctx) for group in _spans_by_order(pred_spans)
    )
    nonent_components = tuple(
        nonentity_precision_order(pred, ctx.gt_text, pred_spans, ctx.gt_spans, n)
        for n in range(1, MAX_NGRAM_ORDER + 1)
    )
    p_entity = geometric_mean_smoothed(ent_components, theta)
    p_nonentity = geometric_mean_smoothed(nonent_components, theta)

    n_total = len(pred_spans)
    n_wrong = counterfactual_count(pred_spans, ctx)
    g = gamma(n_wrong, n_total)
    precision = combine_precision(
        g,
        0.0 if p_nonentity is None else p_nonentity,
        0.0 if p_entity is None else p_entity,
        gamma_orientation,
    )

    recall, recall_components = entailed_recall(pred, ctx.gt_text, theta)

    if precision + recall > 0.0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        f1 = 0.0

    return MolHalluScore(
        precision=precision,
        recall=recall,
        f1=f1,
        gamma=g,
        n_wrong=n_wrong,
        n_total=n_total,
        n_counterfactual=n_wrong,
        per_order_entity_precision=ent_components,
        per_order_nonentity_precision=nonent_components,
        per_order_recall=recall_components,
    )


def score_corpus(
    samples: Sequence[ScoringSample],
    lexicon: EntityLexicon,
    theta: float = DEFAULT_THETA,
    gamma_orientation: str = GAMMA_AS_PRINTED,
) -> CorpusScore:
    """Score a corpus and aggregate in sample order."""
    if not samples:
        raise ValueError("cannot score an empty corpus")
    scores = [
        score_sample(s, lexicon, theta=theta, gamma_orientation=gamma_orientation)
        for s in samples
    ]
    histogram: dict[int, int] = {}
    for sc in scores:
        histogram[sc.n_counterfactual] = histogram.get(sc.n_counterfactual, 0) + 1
    return CorpusScore(
        mean_f1=sum(sc.f1 for sc in scores) / len(scores),
        sample_ids=[s.id for s in samples],
        sample_scores=scores,
        histogram=histogram,
    )
