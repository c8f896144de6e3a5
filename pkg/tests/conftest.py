import itertools

import numpy as np
import pytest

from topicgt.lda import LdaParams, run_lda

from oracles import encoded_from_token_ids, encoded_from_tokens

# Two documents, five tokens, three words: small enough that the exact
# posterior is computable by enumerating every assignment vector.
MICRO_TOKENS = [["apple", "banana", "apple"], ["banana", "cherry"]]


def letter_words(n):
    """Synthetic alphabetic tokens.

    All-consonant triples survive the whole text pipeline unchanged: the
    tokenizer keeps them (letters only, length >= 2), none collide with
    the stopword list, and the stemmer has no suffix to strip.
    """
    words = ["".join(t) for t in itertools.product("bcdfgh", repeat=3)]
    assert n <= len(words)
    return words[:n]


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    """Compile the numba sweep kernel once, before any timed test."""
    encoded = encoded_from_tokens([["apple", "banana"], ["banana", "apple"]])
    run_lda(encoded, LdaParams(num_topics=2, sweeps=2, seed=0))


@pytest.fixture(scope="session")
def micro_encoded():
    return encoded_from_tokens(MICRO_TOKENS)


@pytest.fixture(scope="session")
def fixture_encoded():
    """300-token corpus (12 docs x 25 tokens, 20 words) for invariant checks."""
    rng = np.random.Generator(np.random.PCG64(5))
    docs = [list(map(int, rng.integers(0, 20, size=25))) for _ in range(12)]
    return encoded_from_token_ids(docs, 20)


@pytest.fixture(scope="session")
def funnel_corpus():
    """Corpus sized for a 40-topic model: 30 docs x 40 tokens, 60 words."""
    rng = np.random.Generator(np.random.PCG64(7))
    docs = [list(map(int, rng.integers(0, 60, size=40))) for _ in range(30)]
    return encoded_from_token_ids(docs, 60)


@pytest.fixture(scope="session")
def funnel_model(funnel_corpus):
    return run_lda(funnel_corpus, LdaParams(num_topics=40, sweeps=30, seed=11))
