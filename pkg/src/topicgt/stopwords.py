"""Bundled English stopword list.

The default list is the 318-word Glasgow Information Retrieval Group
list (the one scikit-learn ships), stored at ``data/stopwords_en.txt``.
Projects can pass their own list through ``PreprocessConfig``.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = (
        resources.files("topicgt")
        .joinpath("data/stopwords_en.txt")
        .read_text(encoding="utf-8")
    )
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def load_stopwords(path) -> frozenset[str]:
    """Read one lowercase token per line; blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())
