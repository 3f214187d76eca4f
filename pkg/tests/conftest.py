import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chapterseg.rules import generate_rules


@pytest.fixture(scope="session")
def inventory():
    return generate_rules()


@pytest.fixture(scope="session")
def acceptance_corpus(tmp_path_factory):
    """The 50-book synthetic corpus shared by the acceptance tests."""
    from chapterseg import synth

    out = tmp_path_factory.mktemp("corpus50")
    books = synth.generate_corpus(
        out, n_books=50, seed=20240, profile=synth.STANDARD_PROFILE,
        min_formats=20,
    )
    return out, books
