import csv
import json

import pytest

from molhallu.baselines import compute_baselines
from molhallu.lexicon import build_lexicon
from molhallu.reports import (
    comparison_table,
    diff_report,
    histogram_nc,
    render_histogram_text,
    write_comparison_csv,
    write_comparison_json,
)
from molhallu.scoring import ScoringSample, score_corpus

LEX = build_lexicon([("ketone", "Structure"), ("lactam", "Structure")])


def _corpus_score(pairs):
    samples = [
        ScoringSample(
            id=f"s{i}", smiles="C", question="q", answer_pred=p, answer_gt=g
        )
        for i, (p, g) in enumerate(pairs)
    ]
    score = score_corpus(samples, LEX)
    baselines = {
        s.id: compute_baselines(s.answer_pred, s.answer_gt) for s in samples
    }
    return score, baselines


class TestComparisonTable:
    def test_rows_plus_mean(self):
        score, baselines = _corpus_score(
            [("same words here", "same words here"), ("other text", "some text")]
        )
        rows, mean_row = comparison_table(score, baselines)
        assert len(rows) == 2
        assert mean_row.id == "mean"

    def test_mean_is_arithmetic(self):
        score, baselines = _corpus_score(
            [("a b c", "a b d"), ("x y", "x z"), ("p q", "p q")]
        )
        rows, mean_row = comparison_table(score, baselines)
        assert mean_row.mol_hallu == pytest.approx(
            sum(r.mol_hallu for r in rows) / len(rows)
        )
        assert mean_row.bleu2 == pytest.approx(sum(r.bleu2 for r in rows) / len(rows))

    def test_percent_scale(self):
        score, baselines = _corpus_score([("same words here", "same words here")])
        rows, _ = comparison_table(score, baselines)
        assert rows[0].mol_hallu == pytest.approx(100.0)
        assert 0.0 <= rows[0].meteor <= 100.0

    def test_id_mismatch(self):
        score, baselines = _corpus_score([("a b", "a b")])
        baselines["ghost"] = baselines["s0"]
        with pytest.raises(ValueError):
            comparison_table(score, baselines)
        del baselines["ghost"]
        del baselines["s0"]
        with pytest.raises(ValueError):
            comparison_table(score, baselines)

    def test_ordered_by_id(self):
        score, baselines = _corpus_score(
            [("a b", "a b"), ("c d", "c d"), ("e f", "e f")]
        )
        score.sample_ids.reverse()
        score.sample_scores.reverse()
        rows, _ = comparison_table(score, baselines)
        assert [r.id for r in rows] == sorted(r.id for r in rows)


class TestComparisonFiles:
    def test_csv_json_round_trip(self, tmp_path):
        score, baselines = _corpus_score(
            [("some words", "some words"), ("alpha beta", "alpha gamma")]
        )
        rows, mean_row = comparison_table(score, baselines)
        csv_path = tmp_path / "cmp.csv"
        json_path = tmp_path / "cmp.json"
        write_comparison_csv(rows, mean_row, csv_path)
        write_comparison_json(rows, mean_row, json_path)

        with csv_path.open() as fh:
            csv_rows = list(csv.DictReader(fh))
        payload = json.loads(json_path.read_text())
        assert len(csv_rows) == 3  # 2 samples + mean
        assert csv_rows[-1]["id"] == "mean"
        for csv_row, json_row in zip(csv_rows, payload["rows"] + [payload["mean"]]):
            for field in ("bleu2", "rougeL", "meteor", "mol_hallu"):
                assert float(csv_row[field]) == pytest.approx(json_row[field])
            assert float(csv_row["n_counterfactual"]) == pytest.approx(
                json_row["n_counterfactual"]
            )

    def test_one_decimal_rendering(self, tmp_path):
        score, baselines = _corpus_score([("alpha beta", "alpha gamma")])
        rows, mean_row = comparison_table(score, baselines)
        path = tmp_path / "cmp.csv"
        write_comparison_csv(rows, mean_row, path)
        body = path.read_text().splitlines()[1]
        cells = body.split(",")[1:-1]
        for cell in cells:
            whole, _, frac = cell.partition(".")
            assert len(frac) == 1


class TestHistogram:
    def test_partition_and_bands(self):
        class Stub:
            def __init__(self, nc):
                self.n_counterfactual = nc

        scores = [Stub(nc) for nc in (0, 0, 2, 5)]
        hist = histogram_nc(scores)
        assert hist.counts == {0: 2, 2: 1, 5: 1}
        assert hist.total == 4
        assert hist.low_band == 1
        assert hist.high_band == 1
        assert sum(hist.counts.values()) == hist.total

    def test_all_zero(self):
        class Stub:
            n_counterfactual = 0

        hist = histogram_nc([Stub(), Stub()])
        assert hist.counts == {0: 2}
        assert hist.low_band == 0
        assert hist.high_band == 0

    def test_band_masses_bounded(self):
        class Stub:
            def __init__(self, nc):
                self.n_counterfactual = nc

        hist = histogram_nc([Stub(nc) for nc in (1, 2, 3, 4, 5, 6)])
        assert hist.low_band + hist.high_band <= hist.total

    def test_text_render(self):
        class Stub:
            def __init__(self, nc):
                self.n_counterfactual = nc

        text = render_histogram_text(histogram_nc([Stub(0), Stub(0), Stub(3)]))
        assert "N_c" in text
        assert "#" in text
        assert "total: 3" in text


class TestDiffReport:
    def test_identical_inputs_zero_deltas(self):
        score, _ = _corpus_score([("a b", "a b"), ("c d", "c e")])
        report = diff_report(score, score)
        assert report["mean_f1_delta"] == pytest.approx(0.0)
        assert report["mean_n_counterfactual_delta"] == pytest.approx(0.0)
        for entry in report["per_sample"]:
            assert entry["f1_delta"] == pytest.approx(0.0)

    def test_shift_direction(self):
        before, _ = _corpus_score([("has lactam here", "has ketone here")])
        after, _ = _corpus_score([("has ketone here", "has ketone here")])
        report = diff_report(before, after)
        assert report["mean_f1_delta"] > 0
        assert report["mean_n_counterfactual_delta"] < 0

    def test_delta_linearity(self):
        before, _ = _corpus_score([("a b", "a b"), ("x y", "x q")])
        after, _ = _corpus_score([("a b", "a b"), ("x q", "x q")])
        report = diff_report(before, after)
        mean_of_deltas = sum(e["f1_delta"] for e in report["per_sample"]) / 2
        assert report["mean_f1_delta"] == pytest.approx(mean_of_deltas)

    def test_id_mismatch(self):
        a, _ = _corpus_score([("a b", "a b")])
        b, _ = _corpus_score([("a b", "a b"), ("c", "c")])
        with pytest.raises(ValueError):
            diff_report(a, b)
