import json
import logging
from random import Random

import pytest

from molhallu.lexicon import (
    EntityType,
    LexiconError,
    NoReplacementError,
    build_lexicon,
    lexicon_stats,
    load_lexicon,
    lookup_longest,
    sample_replacement,
)
from molhallu.textproc import tokenize


class TestBuildLexicon:
    def test_basic(self):
        lex = build_lexicon([("Ketone", "Structure"), ("solubility", "Property")])
        assert len(lex) == 2
        assert lex.records[0].surface == "Ketone"
        assert lex.records[0].normalized == "ketone"
        assert lex.records[0].entity_type is EntityType.STRUCTURE

    def test_duplicate_first_wins(self, caplog):
        with caplog.at_level(logging.WARNING):
            lex = build_lexicon(
                [
                    ("ketone", "Structure"),
                    ("Ketone ", "Property"),
                    ("ester", "Structure"),
                ]
            )
        assert len(lex) == 2
        assert lex.load_report.duplicates == 1
        assert lex.records[0].entity_type is EntityType.STRUCTURE

    def test_unknown_type_skipped(self):
        lex = build_lexicon([("ketone", "Structure"), ("boom", "Reaction")])
        assert len(lex) == 1
        assert lex.load_report.skipped_unknown_type == 1

    def test_empty_surface_skipped(self):
        lex = build_lexicon([("ketone", "Structure"), ("   ", "Property")])
        assert len(lex) == 1
        assert lex.load_report.skipped_empty == 1

    def test_zero_valid_rows(self):
        with pytest.raises(LexiconError):
            build_lexicon([("", "Structure")])

    def test_type_counts_partition(self):
        lex = build_lexicon(
            [("a", "Structure"), ("b", "Structure"), ("c", "Source")]
        )
        assert sum(lex.type_counts.values()) == len(lex)


class TestLoadLexicon:
    def test_tsv(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text(
            "# comment line\nketone\tStructure\n\nsolubility\tProperty\n",
            encoding="utf-8",
        )
        lex = load_lexicon(path)
        assert len(lex) == 2

    def test_jsonl(self, tmp_path):
        path = tmp_path / "lex.jsonl"
        rows = [
            {"surface": "ketone", "type": "Structure"},
            {"surface": "green tea", "type": "Source"},
        ]
        path.write_text(
            "\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8"
        )
        lex = load_lexicon(path)
        assert len(lex) == 2
        assert lex.records[1].normalized == "green tea"

    def test_format_override(self, tmp_path):
        path = tmp_path / "weird.txt"
        path.write_text("ketone\tStructure\n", encoding="utf-8")
        lex = load_lexicon(path, fmt="tsv")
        assert len(lex) == 1

    def test_load_determinism(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("ketone\tStructure\nester\tStructure\n", encoding="utf-8")
        a = load_lexicon(path)
        b = load_lexicon(path)
        assert [r.id for r in a.records] == [r.id for r in b.records]
        assert [r.normalized for r in a.records] == [r.normalized for r in b.records]

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_lexicon(tmp_path / "nope.tsv")


class TestLookupLongest:
    def test_longest_match(self):
        lex = build_lexicon(
            [("ketone", "Structure"), ("ketone and lactone", "Structure")]
        )
        tokens = tokenize("ketone and lactone groups").tokens
        record_id, length = lookup_longest(tokens, 0, lex)
        assert length == 3

    def test_no_match(self):
        lex = build_lexicon([("ketone", "Structure")])
        assert lookup_longest(("x", "y"), 0, lex) is None

    def test_single_token(self):
        lex = build_lexicon([("ketone", "Structure")])
        record_id, length = lookup_longest(("ketone",), 0, lex)
        assert length == 1
        assert lex.records[record_id].normalized == "ketone"

    def test_out_of_range(self):
        lex = build_lexicon([("ketone", "Structure")])
        with pytest.raises(IndexError):
            lex.lookup_longest_at(("a",), 5)

    def test_index_finds_every_record(self, demo_lexicon):
        for record in demo_lexicon.records:
            tokens = tokenize(record.normalized).tokens
            hit = demo_lexicon.lookup_longest_at(tokens, 0)
            assert hit is not None
            record_id, length = hit
            assert length == len(tokens)
            found = demo_lexicon.records[record_id]
            assert tokenize(found.normalized).tokens == tokens


class TestSampleReplacement:
    def test_same_type_and_excluded(self):
        lex = build_lexicon(
            [("a", "Structure"), ("b", "Structure"), ("c", "Property")]
        )
        rng = Random(7)
        for _ in range(20):
            rec = sample_replacement(EntityType.STRUCTURE, {0}, rng, lex)
            assert rec.entity_type is EntityType.STRUCTURE
            assert rec.id != 0

    def test_determinism(self):
        lex = build_lexicon([(f"e{i}", "Structure") for i in range(10)])
        picks_a = [
            sample_replacement(EntityType.STRUCTURE, set(), Random(f"s:{i}"), lex).id
            for i in range(10)
        ]
        picks_b = [
            sample_replacement(EntityType.STRUCTURE, set(), Random(f"s:{i}"), lex).id
            for i in range(10)
        ]
        assert picks_a == picks_b

    def test_exhausted_pool(self):
        lex = build_lexicon([("a", "Structure"), ("b", "Property")])
        with pytest.raises(NoReplacementError):
            sample_replacement(EntityType.STRUCTURE, {0}, Random(1), lex)

    def test_missing_type(self):
        lex = build_lexicon([("a", "Structure")])
        with pytest.raises(NoReplacementError):
            sample_replacement(EntityType.SOURCE, set(), Random(1), lex)


class TestLexiconStats:
    def test_percentages(self):
        lex = build_lexicon(
            [
                ("a", "Structure"),
                ("b", "Structure"),
                ("c", "Property"),
                ("d", "Source"),
            ]
        )
        stats = lexicon_stats(lex)
        assert stats["Structure"] == pytest.approx(50.0)
        assert stats["Property"] == pytest.approx(25.0)
        assert stats["Source"] == pytest.approx(25.0)
        assert stats["Application"] == pytest.approx(0.0)
        assert sum(stats.values()) == pytest.approx(100.0, abs=0.1)

    def test_single_record(self):
        lex = build_lexicon([("a", "Application")])
        assert lexicon_stats(lex)["Application"] == pytest.approx(100.0)

    def test_demo_lexicon_structure_heavy(self, demo_lexicon):
        stats = lexicon_stats(demo_lexicon)
        assert stats["Structure"] > 50.0
        assert sum(stats.values()) == pytest.approx(100.0, abs=0.1)
