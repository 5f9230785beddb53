import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from molhallu import demo_corpus_path, demo_lexicon_path, load_lexicon, read_corpus


@pytest.fixture(scope="session")
def demo_lexicon():
    return load_lexicon(demo_lexicon_path())


@pytest.fixture(scope="session")
def demo_corpus():
    return read_corpus(demo_corpus_path())
