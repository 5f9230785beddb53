"""Independent reference implementations used only by tests.

Everything here works on plain token lists and plain dicts, written as
direct transcriptions of the metric definitions with no code shared
with the package under test. Deliberately naive: full DP tables,
exhaustive substring enumeration, dict-based counting.
"""

from __future__ import annotations

import math


def ngram_counts(tokens, n):
    counts = {}
    for i in range(len(tokens) - n + 1):
        key = tuple(tokens[i : i + n])
        counts[key] = counts.get(key, 0) + 1
    return counts


def clipped_overlap(cand_counts, ref_counts):
    total = 0
    for gram, count in cand_counts.items():
        total += min(count, ref_counts.get(gram, 0))
    return total


# ---------------------------------------------------------------- baselines


def naive_bleu(cand, ref, max_order, theta=1e-5):
    if not ref:
        raise ValueError("empty reference")
    if not cand:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_order + 1):
        cand_counts = ngram_counts(cand, n)
        total = sum(cand_counts.values())
        if total == 0:
            p = 0.0
        else:
            p = clipped_overlap(cand_counts, ngram_counts(ref, n)) / total
        log_sum += (1.0 / max_order) * math.log(max(p, theta))
    c, r = len(cand), len(ref)
    bp = 1.0 if c > r else math.exp(1.0 - r / c)
    return bp * math.exp(log_sum)


def naive_rouge_n(cand, ref, n):
    ref_counts = ngram_counts(ref, n)
    denom = sum(ref_counts.values())
    if denom == 0:
        return 0.0
    return clipped_overlap(ngram_counts(cand, n), ref_counts) / denom


def naive_lcs(a, b):
    # Full DP table, no rolling-row trick.
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[len(a)][len(b)]


def naive_rouge_l(cand, ref, beta=1.2):
    lcs = naive_lcs(cand, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    b2 = beta * beta
    return (1 + b2) * recall * precision / (recall + b2 * precision)


def naive_meteor(cand, ref, gamma_m=0.5, exponent=3):
    # Align each candidate unigram to the first unused reference
    # occurrence of the same word, scanning left to right.
    used = [False] * len(ref)
    pairs = []
    for i, word in enumerate(cand):
        for j, ref_word in enumerate(ref):
            if not used[j] and ref_word == word:
                used[j] = True
                pairs.append((i, j))
                break
    m = len(pairs)
    if m == 0:
        return 0.0
    precision = m / len(cand)
    recall = m / len(ref)
    fmean = 10.0 * precision * recall / (recall + 9.0 * precision)
    chunks = 0
    prev = None
    for i, j in pairs:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    penalty = gamma_m * (chunks / m) ** exponent
    return fmean * (1.0 - penalty)


# --------------------------------------------------------- entity matching


def naive_extract(tokens, table):
    """Exhaustive leftmost-longest scan. ``table`` maps token tuples to
    integer ids. Returns (start, length, id) triples."""
    max_len = max((len(key) for key in table), default=0)
    found = []
    i = 0
    while i < len(tokens):
        best = None
        for length in range(1, min(max_len, len(tokens) - i) + 1):
            key = tuple(tokens[i : i + length])
            if key in table:
                best = (length, table[key])
        if best is None:
            i += 1
        else:
            found.append((i, best[0], best[1]))
            i += best[0]
    return found


def table_from_rows(rows):
    """First-occurrence-wins token-tuple table from (surface tokens, id)
    pairs, mirroring lexicon dedup semantics."""
    table = {}
    for tokens, record_id in rows:
        key = tuple(tokens)
        if key and key not in table:
            table[key] = record_id
    return table


# ------------------------------------------------------- the full metric


def _geo_mean(values, theta):
    present = [v for v in values if v is not None]
    if not present:
        return None
    return math.exp(sum(math.log(max(v, theta)) for v in present) / len(present))


def _entity_free_runs(tokens, spans):
    covered = [False] * len(tokens)
    for start, length, _ in spans:
        for k in range(start, start + length):
            covered[k] = True
    runs = []
    current = []
    for i, token in enumerate(tokens):
        if covered[i]:
            if current:
                runs.append(current)
                current = []
        else:
            current.append(token)
    if current:
        runs.append(current)
    return runs


def naive_molhallu(pred, gt, desc, table, theta=1e-5):
    """Straight-from-the-definitions score over token lists.

    Returns a dict with precision, recall, f1, gamma, n_wrong, n_total
    and n_counterfactual.
    """
    pred_spans = naive_extract(pred, table)
    gt_spans = naive_extract(gt, table)
    desc_spans = naive_extract(desc, table)
    gt_ids = {rid for _, _, rid in gt_spans}
    desc_ids = {rid for _, _, rid in desc_spans}

    # per-order entity reward: 1 if entailed by the reference answer,
    # else 1 if entailed by the description, else 0
    rewards = {1: [], 2: [], 3: [], 4: []}
    for _, length, rid in pred_spans:
        order = min(length, 4)
        rewards[order].append(1.0 if (rid in gt_ids or rid in desc_ids) else 0.0)
    entity_components = [
        (sum(rewards[n]) / len(rewards[n])) if rewards[n] else None
        for n in (1, 2, 3, 4)
    ]
    p_entity = _geo_mean(entity_components, theta)

    pred_runs = _entity_free_runs(pred, pred_spans)
    gt_runs = _entity_free_runs(gt, gt_spans)
    nonentity_components = []
    for n in (1, 2, 3, 4):
        cand = {}
        for run in pred_runs:
            for gram, count in ngram_counts(run, n).items():
                cand[gram] = cand.get(gram, 0) + count
        ref = {}
        for run in gt_runs:
            for gram, count in ngram_counts(run, n).items():
                ref[gram] = ref.get(gram, 0) + count
        total = sum(cand.values())
        if total == 0:
            nonentity_components.append(None)
        else:
            nonentity_components.append(clipped_overlap(cand, ref) / total)
    p_nonentity = _geo_mean(nonentity_components, theta)

    n_total = len(pred_spans)
    n_wrong = sum(
        1 for _, _, rid in pred_spans if rid not in gt_ids and rid not in desc_ids
    )
    g = 1.0 if n_total == 0 else 1.0 - math.sqrt(n_wrong / n_total)

    precision = g * (p_nonentity if p_nonentity is not None else 0.0) + (1.0 - g) * (
        p_entity if p_entity is not None else 0.0
    )

    recall_components = []
    for n in (1, 2, 3, 4):
        ref = ngram_counts(gt, n)
        denom = sum(ref.values())
        if denom == 0:
            recall_components.append(None)
        else:
            recall_components.append(clipped_overlap(ngram_counts(pred, n), ref) / denom)
    recall = _geo_mean(recall_components, theta)
    recall = recall if recall is not None else 0.0

    if precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
    return {
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "gamma": g,
        "n_wrong": n_wrong,
        "n_total": n_total,
        "n_counterfactual": n_wrong,
    }
