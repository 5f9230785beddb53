"""Report rendering: comparison tables, counterfactual-count histograms,
and before/after attack diffs.

Table values are percentages rendered to one decimal place; the CSV and
JSON renderings carry identical rounded values so they round-trip. The
histogram buckets samples by their counterfactual entity count N_c and
also reports two bands: ``low`` (0 < N_c < 3) and ``high`` (N_c > 4).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .baselines import BaselineScores
from .scoring import CorpusScore, MolHalluScore

METRIC_COLUMNS = ("bleu2", "bleu4", "rouge1", "rouge2", "rougeL", "meteor", "mol_hallu")


@dataclass(frozen=True)
class ComparisonRow:
    """Per-sample metric row; metric values are percentages in [0, 100].
    ``n_counterfactual`` is integral for sample rows and a mean for the
    summary row."""

    id: str
    bleu2: float
    bleu4: float
    rouge1: float
    rouge2: float
    rougeL: float
    meteor: float
    mol_hallu: float
    n_counterfactual: float

    def rounded(self) -> dict:
        out: dict = {"id": self.id}
        for name in METRIC_COLUMNS:
            out[name] = round(getattr(self, name), 1)
        out["n_counterfactual"] = round(self.n_counterfactual, 1)
        return out


def comparison_table(
    corpus_score: CorpusScore,
    baselines_by_id: Mapping[str, BaselineScores],
) -> tuple[list[ComparisonRow], ComparisonRow]:
    """Join per-sample metric scores into rows plus a mean row. The
    baseline map must cover exactly the scored ids."""
    ids = list(corpus_score.sample_ids)
    missing = [i for i in ids if i not in baselines_by_id]
    extra = sorted(set(baselines_by_id) - set(ids))
    if missing or extra:
        raise ValueError(
            f"id mismatch between scores and baselines: missing={missing!r} "
            f"extra={extra!r}"
        )
    rows: list[ComparisonRow] = []
    ordered = sorted(zip(ids, corpus_score.sample_scores), key=lambda p: p[0])
    for sample_id, score in ordered:
        base = baselines_by_id[sample_id]
        rows.append(
            ComparisonRow(
                id=sample_id,
                bleu2=base.bleu2 * 100.0,
                bleu4=base.bleu4 * 100.0,
                rouge1=base.rouge1 * 100.0,
                rouge2=base.rouge2 * 100.0,
                rougeL=base.rougeL * 100.0,
                meteor=base.meteor * 100.0,
                mol_hallu=score.f1 * 100.0,
                n_counterfactual=score.n_counterfactual,
            )
        )
    n = len(rows)
    mean_row = ComparisonRow(
        id="mean",
        bleu2=sum(r.bleu2 for r in rows) / n,
        bleu4=sum(r.bleu4 for r in rows) / n,
        rouge1=sum(r.rouge1 for r in rows) / n,
        rouge2=sum(r.rouge2 for r in rows) / n,
        rougeL=sum(r.rougeL for r in rows) / n,
        meteor=sum(r.meteor for r in rows) / n,
        mol_hallu=sum(r.mol_hallu for r in rows) / n,
        n_counterfactual=sum(r.n_counterfactual for r in rows) / n,
    )
    return rows, mean_row


def write_comparison_csv(
    rows: Sequence[ComparisonRow], mean_row: ComparisonRow, path: str | Path
) -> None:
    header = ["id", *METRIC_COLUMNS, "n_counterfactual"]
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in (*rows, mean_row):
            data = row.rounded()
            nc = data["n_counterfactual"]
            writer.writerow(
                [data["id"]]
                + [f"{data[name]:.1f}" for name in METRIC_COLUMNS]
                + [f"{nc:g}"]
            )


def write_comparison_json(
    rows: Sequence[ComparisonRow], mean_row: ComparisonRow, path: str | Path
) -> None:
    payload = {
        "rows": [r.rounded() for r in rows],
        "mean": mean_row.rounded(),
    }
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


@dataclass
class HistogramReport:
    """Distribution of counterfactual entity counts across a corpus."""

    counts: dict[int, int] = field(default_factory=dict)
    total: int = 0

    @property
    def low_band(self) -> int:
        return sum(c for nc, c in self.counts.items() if 0 < nc < 3)

    @property
    def high_band(self) -> int:
        return sum(c for nc, c in self.counts.items() if nc > 4)

    def to_dict(self) -> dict:
        return {
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "total": self.total,
            "low_band": self.low_band,
            "high_band": self.high_band,
        }


def histogram_nc(scores: Sequence[MolHalluScore]) -> HistogramReport:
    report = HistogramReport()
    for score in scores:
        report.counts[score.n_counterfactual] = (
            report.counts.get(score.n_counterfactual, 0) + 1
        )
        report.total += 1
    return report


def render_histogram_text(report: HistogramReport, width: int = 40) -> str:
    """Fixed-width bar chart of the N_c distribution as plain text."""
    lines = ["N_c  count  bar"]
    peak = max(report.counts.values(), default=1)
    for nc in sorted(report.counts):
        count = report.counts[nc]
        bar = "#" * max(1, round(width * count / peak)) if count else ""
        lines.append(f"{nc:>3}  {count:>5}  {bar}")
    lines.append(
        f"low band (0 < N_c < 3): {report.low_band}   "
        f"high band (N_c > 4): {report.high_band}   total: {report.total}"
    )
    return "\n".join(lines) + "\n"


def render_histogram_png(report: HistogramReport, path: str | Path) -> None:
    """Bar chart written as PNG; imports matplotlib on demand."""
    try:
        import matplotlib
    except ImportError as exc:
        raise ValueError(
            "PNG charts need matplotlib; install molhallu[charts] or use --chart text"
        ) from exc

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ncs = sorted(report.counts)
    counts = [report.counts[nc] for nc in ncs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(ncs, counts, color="#4477aa")
    ax.set_xlabel("counterfactual entities per sample (N_c)")
    ax.set_ylabel("samples")
    ax.set_title("Counterfactual entity distribution")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def diff_report(
    before: CorpusScore,
    after: CorpusScore,
    baselines_before: Optional[Mapping[str, BaselineScores]] = None,
    baselines_after: Optional[Mapping[str, BaselineScores]] = None,
) -> dict:
    """Per-sample and corpus-level deltas between two scoring runs over
    the same ids (for example before and after an attack)."""
    if list(before.sample_ids) != list(after.sample_ids):
        raise ValueError("diff requires identical sample ids in identical order")
    per_sample = []
    for sample_id, b, a in zip(
        before.sample_ids, before.sample_scores, after.sample_scores
    ):
        entry = {
            "id": sample_id,
            "f1_before": b.f1,
            "f1_after": a.f1,
            "f1_delta": a.f1 - b.f1,
            "n_counterfactual_before": b.n_counterfactual,
            "n_counterfactual_after": a.n_counterfactual,
        }
        per_sample.append(entry)
    n = len(per_sample)
    mean_nc_before = sum(s.n_counterfactual for s in before.sample_scores) / n
    mean_nc_after = sum(s.n_counterfactual for s in after.sample_scores) / n
    out = {
        "mean_f1_before": before.mean_f1,
        "mean_f1_after": after.mean_f1,
        "mean_f1_delta": after.mean_f1 - before.mean_f1,
        "mean_n_counterfactual_before": mean_nc_before,
        "mean_n_counterfactual_after": mean_nc_after,
        "mean_n_counterfactual_delta": mean_nc_after - mean_nc_before,
        "per_sample": per_sample,
    }

    def _mean_baselines(by_id: Mapping[str, BaselineScores]) -> dict:
        vals = [by_id[i] for i in before.sample_ids]
        k = len(vals)
        return {
            name: sum(getattr(v, name) for v in vals) / k
            for name in ("bleu2", "bleu4", "rouge1", "rouge2", "rougeL", "meteor")
        }

    if baselines_before is not None and baselines_after is not None:
        mb = _mean_baselines(baselines_before)
        ma = _mean_baselines(baselines_after)
        out["baselines"] = {
            name: {
                "before": mb[name],
                "after": ma[name],
                "delta": ma[name] - mb[name],
            }
            for name in mb
        }
    return out
