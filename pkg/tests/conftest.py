import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

CORPUS = Path(__file__).parent.parent / "src" / "s2cover" / "corpus"

CORPUS_NAMES = [
    "power.json",
    "basilica.json",
    "levy.json",
    "twocurve.json",
    "extension.json",
    "shsr.json",
]


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def corpus_docs():
    from s2cover.document import load_path

    return {name: load_path(str(CORPUS / name)) for name in CORPUS_NAMES}
