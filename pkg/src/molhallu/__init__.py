"""Hallucination-aware evaluation for molecular question answering.

The package scores generated answers about molecules with a metric that
rewards factually entailed scientific entities instead of surface
n-gram overlap, alongside standard BLEU/ROUGE/METEOR baselines. It also
ships corpus transforms that expose name-based knowledge shortcuts and
builders for preference-training datasets. See the ``molhallu`` CLI for
the file-level workflow.
"""

from importlib import resources

from .attacks import (
    AttackKind,
    AttackManifest,
    MASK_PHRASE,
    attack_corpus,
    distract_drug_names,
    mask_drug_names,
    mask_molecule,
)
from .baselines import BaselineScores, bleu, compute_baselines, meteor, rouge_l, rouge_n
from .corpus import CorpusError, CorpusRecord, read_corpus, write_corpus
from .lexicon import (
    EntityLexicon,
    EntityRecord,
    EntityType,
    LexiconError,
    NoReplacementError,
    build_lexicon,
    lexicon_stats,
    load_lexicon,
    sample_replacement,
)
from .prefdata import (
    PreferenceTriple,
    build_preference_dataset,
    build_sft_pairs,
    perturb_entities,
    write_preference_dataset,
    write_sft_dataset,
)
from .reports import (
    ComparisonRow,
    HistogramReport,
    comparison_table,
    diff_report,
    histogram_nc,
)
from .scoring import (
    CorpusScore,
    MolHalluScore,
    ScoringSample,
    gamma,
    score_corpus,
    score_sample,
)
from .textproc import TokenizedText, extract_entities, extract_ngrams, tokenize

__version__ = "0.1.0"


def demo_lexicon_path() -> str:
    """Path to the bundled demonstration entity lexicon (TSV)."""
    return str(resources.files(__package__) / "data" / "demo_lexicon.tsv")


def demo_corpus_path() -> str:
    """Path to the bundled demonstration corpus (JSONL)."""
    return str(resources.files(__package__) / "data" / "demo_corpus.jsonl")


__all__ = [
    "AttackKind",
    "AttackManifest",
    "BaselineScores",
    "ComparisonRow",
    "CorpusError",
    "CorpusRecord",
    "CorpusScore",
    "EntityLexicon",
    "EntityRecord",
    "EntityType",
    "HistogramReport",
    "LexiconError",
    "MASK_PHRASE",
    "MolHalluScore",
    "NoReplacementError",
    "PreferenceTriple",
    "ScoringSample",
    "TokenizedText",
    "attack_corpus",
    "bleu",
    "build_lexicon",
    "build_preference_dataset",
    "build_sft_pairs",
    "comparison_table",
    "compute_baselines",
    "demo_corpus_path",
    "demo_lexicon_path",
    "diff_report",
    "distract_drug_names",
    "extract_entities",
    "extract_ngrams",
    "gamma",
    "histogram_nc",
    "lexicon_stats",
    "load_lexicon",
    "mask_drug_names",
    "mask_molecule",
    "meteor",
    "perturb_entities",
    "read_corpus",
    "rouge_l",
    "rouge_n",
    "sample_replacement",
    "score_corpus",
    "score_sample",
    "tokenize",
    "write_corpus",
    "write_preference_dataset",
    "write_sft_dataset",
    "__version__",
]
