"""Collapsed Gibbs sampling for latent Dirichlet allocation.

Inference integrates out the topic-word and document-topic
distributions and resamples one token assignment at a time from

    p(z_i = k | z_-i, w) propto (n_wt[w,k] + beta) / (n_t[k] + W*beta)
                                * (n_dt[d,k] + alpha)

with the current token excluded from all counts (Griffiths & Steyvers'
estimator for the Blei-Ng-Jordan model). Runs are exactly reproducible:
randomness comes from a single seeded PCG64 generator, tokens are swept
in a fixed document-major, position-minor order, and the point
estimates are read off the final state, so identical (corpus, params)
always produce bit-identical assignments and matrices.

The per-sweep inner loop is compiled with numba; the generator stays in
numpy (one uniform draw per token, pre-drawn per sweep), which keeps
the random stream independent of the compiled code.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numba import njit
from scipy.special import gammaln

from .corpus import EncodedCorpus
from .errors import ContractViolation, CorruptFile

DEFAULT_ALPHA = 0.5
DEFAULT_BETA = 0.02
DEFAULT_TOP_N_WORDS = 10
DEFAULT_SWEEPS = 1000


@dataclass(frozen=True)
class LdaParams:
    num_topics: int
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    sweeps: int = DEFAULT_SWEEPS
    seed: int = 0
    top_n_words: int = DEFAULT_TOP_N_WORDS
    # 0 = point estimate from the final state; N > 0 averages the
    # estimators over the last N sweeps (still fully deterministic)
    average_last: int = 0

    def __post_init__(self):
        if self.num_topics < 1:
            raise ContractViolation("num_topics must be >= 1", field="num_topics")
        if not self.alpha > 0:
            raise ContractViolation("alpha must be > 0", field="alpha")
        if not self.beta > 0:
            raise ContractViolation("beta must be > 0", field="beta")
        if self.sweeps < 1:
            raise ContractViolation("sweeps must be >= 1", field="sweeps")
        if not 0 <= self.seed < 2**64:
            raise ContractViolation("seed must fit in 64 bits", field="seed")
        if self.top_n_words < 0:
            raise ContractViolation("top_n_words must be >= 0", field="top_n_words")
        if self.average_last < 0 or self.average_last > self.sweeps:
            raise ContractViolation(
                "average_last must be in [0, sweeps]", field="average_last"
            )

    def to_dict(self) -> dict:
        return {
            "num_topics": self.num_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "sweeps": self.sweeps,
            "seed": self.seed,
            "top_n_words": self.top_n_words,
            "average_last": self.average_last,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "LdaParams":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})


@dataclass
class SamplerState:
    """Token assignments plus the count tables they induce.

    Count-table invariants (checked by the test suite's recount oracle):
    column sums of n_wt equal n_t; row sums of n_dt equal n_d; per-word
    totals equal corpus frequencies; everything non-negative; n_t sums
    to the token count.
    """

    token_words: np.ndarray  # word id per token, document-major flat order
    token_docs: np.ndarray   # document index per token
    doc_offsets: np.ndarray  # doc d occupies [doc_offsets[d], doc_offsets[d+1])
    z: np.ndarray            # topic assignment per token
    n_wt: np.ndarray         # W x K
    n_dt: np.ndarray         # D x K
    n_t: np.ndarray          # K
    n_d: np.ndarray          # D
    rng: np.random.Generator

    @property
    def num_tokens(self) -> int:
        return int(self.token_words.shape[0])

    @property
    def num_docs(self) -> int:
        return int(self.n_dt.shape[0])

    @property
    def rng_state(self) -> dict:
        return self.rng.bit_generator.state

    def z_for_doc(self, doc: int) -> np.ndarray:
        lo, hi = self.doc_offsets[doc], self.doc_offsets[doc + 1]
        return self.z[lo:hi]


@dataclass
class TopicModel:
    params: LdaParams
    phi: np.ndarray    # K x W, rows sum to 1
    theta: np.ndarray  # D x K, rows sum to 1
    log_likelihood_trace: list[float]
    corpus_ref: str
    words: list[str]
    doc_ids: list[str]

    @property
    def num_topics(self) -> int:
        return int(self.phi.shape[0])

    @property
    def model_id(self) -> str:
        """Content hash of the serialized model, stable across reloads."""
        digest = hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()
        return "m" + digest[:12]

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "corpus_ref": self.corpus_ref,
            "words": self.words,
            "doc_ids": self.doc_ids,
            "topics": [
                top_words(self, k, self.params.top_n_words)
                for k in range(self.num_topics)
            ],
            "phi": self.phi.tolist(),
            "theta": self.theta.tolist(),
            "log_likelihood_trace": self.log_likelihood_trace,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Mapping) -> "TopicModel":
        try:
            return cls(
                params=LdaParams.from_dict(data["params"]),
                phi=np.asarray(data["phi"], dtype=np.float64),
                theta=np.asarray(data["theta"], dtype=np.float64),
                log_likelihood_trace=list(data["log_likelihood_trace"]),
                corpus_ref=data["corpus_ref"],
                words=list(data["words"]),
                doc_ids=list(data["doc_ids"]),
            )
        except (KeyError, TypeError) as exc:
            raise CorruptFile(f"topic model is missing or has invalid field: {exc}")

    @classmethod
    def from_json(cls, text: str) -> "TopicModel":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CorruptFile(f"topic model is not valid JSON: {exc}")
        return cls.from_dict(data)


def init_state(encoded_corpus: EncodedCorpus, params: LdaParams) -> SamplerState:
    """Assign every token a uniform random topic and tally the count tables."""
    if encoded_corpus.num_documents == 0 or encoded_corpus.total_tokens == 0:
        raise ContractViolation("encoded corpus has no tokens")
    if len(encoded_corpus.vocabulary) == 0:
        raise ContractViolation("encoded corpus has an empty vocabulary")

    W = len(encoded_corpus.vocabulary)
    K = params.num_topics
    D = encoded_corpus.num_documents

    lengths = [len(d) for d in encoded_corpus.docs]
    doc_offsets = np.zeros(D + 1, dtype=np.int64)
    np.cumsum(lengths, out=doc_offsets[1:])
    token_words = np.concatenate(
        [np.asarray(d, dtype=np.int64) for d in encoded_corpus.docs]
    )
    token_docs = np.repeat(np.arange(D, dtype=np.int64), lengths)

    rng = np.random.Generator(np.random.PCG64(params.seed))
    z = rng.integers(0, K, size=token_words.shape[0], dtype=np.int64)

    n_wt = np.zeros((W, K), dtype=np.int64)
    np.add.at(n_wt, (token_words, z), 1)
    n_dt = np.zeros((D, K), dtype=np.int64)
    np.add.at(n_dt, (token_docs, z), 1)
    n_t = np.bincount(z, minlength=K).astype(np.int64)
    n_d = np.bincount(token_docs, minlength=D).astype(np.int64)

    return SamplerState(
        token_words=token_words,
        token_docs=token_docs,
        doc_offsets=doc_offsets,
        z=z,
        n_wt=n_wt,
        n_dt=n_dt,
        n_t=n_t,
        n_d=n_d,
        rng=rng,
    )


def gibbs_conditional(
    state: SamplerState, params: LdaParams, doc: int, position: int
) -> np.ndarray:
    """Full conditional over topics for one token, that token excluded."""
    if not 0 <= doc < state.num_docs:
        raise IndexError(f"document index {doc} out of range")
    lo, hi = state.doc_offsets[doc], state.doc_offsets[doc + 1]
    if not 0 <= position < hi - lo:
        raise IndexError(f"position {position} out of range for document {doc}")
    i = int(lo) + position
    w = state.token_words[i]
    k_old = state.z[i]

    W = state.n_wt.shape[0]
    K = params.num_topics
    excl = np.zeros(K, dtype=np.int64)
    excl[k_old] = 1
    p = (
        (state.n_wt[w] - excl + params.beta)
        / (state.n_t - excl + W * params.beta)
        * (state.n_dt[doc] - excl + params.alpha)
    )
    return p / p.sum()


@njit(cache=True)
def _sweep_kernel(token_words, token_docs, z, n_wt, n_dt, n_t, alpha, beta, uniforms):
    W = n_wt.shape[0]
    K = n_wt.shape[1]
    wbeta = W * beta
    cum = np.empty(K, dtype=np.float64)
    for i in range(token_words.shape[0]):
        w = token_words[i]
        d = token_docs[i]
        k_old = z[i]
        n_wt[w, k_old] -= 1
        n_dt[d, k_old] -= 1
        n_t[k_old] -= 1

        total = 0.0
        for k in range(K):
            p = (n_wt[w, k] + beta) / (n_t[k] + wbeta) * (n_dt[d, k] + alpha)
            total += p
            cum[k] = total

        u = uniforms[i] * total
        k_new = 0
        while k_new < K - 1 and u >= cum[k_new]:
            k_new += 1

        z[i] = k_new
        n_wt[w, k_new] += 1
        n_dt[d, k_new] += 1
        n_t[k_new] += 1


def gibbs_sweep(state: SamplerState, params: LdaParams) -> SamplerState:
    """Resample every token once, document-major, position-minor."""
    uniforms = state.rng.random(state.num_tokens)
    _sweep_kernel(
        state.token_words,
        state.token_docs,
        state.z,
        state.n_wt,
        state.n_dt,
        state.n_t,
        params.alpha,
        params.beta,
        uniforms,
    )
    return state


def log_likelihood(state: SamplerState, params: LdaParams) -> float:
    """Joint log p(w | z) + log p(z) under the collapsed model."""
    alpha, beta = params.alpha, params.beta
    K = params.num_topics
    W = state.n_wt.shape[0]
    D = state.num_docs

    lw = K * (gammaln(W * beta) - W * gammaln(beta))
    lw += gammaln(state.n_wt + beta).sum() - gammaln(state.n_t + W * beta).sum()

    lz = D * (gammaln(K * alpha) - K * gammaln(alpha))
    lz += gammaln(state.n_dt + alpha).sum() - gammaln(state.n_d + K * alpha).sum()
    return float(lw + lz)


def _phi_from_counts(state: SamplerState, params: LdaParams) -> np.ndarray:
    W = state.n_wt.shape[0]
    return (state.n_wt.T + params.beta) / (
        state.n_t[:, None] + W * params.beta
    )


def _theta_from_counts(state: SamplerState, params: LdaParams) -> np.ndarray:
    K = params.num_topics
    return (state.n_dt + params.alpha) / (
        state.n_d[:, None] + K * params.alpha
    )


def run_lda(encoded_corpus: EncodedCorpus, params: LdaParams) -> TopicModel:
    """Initialize, run the configured number of sweeps, and estimate phi/theta."""
    state = init_state(encoded_corpus, params)
    trace: list[float] = []
    phi_acc = theta_acc = None
    avg_from = params.sweeps - params.average_last

    for sweep in range(params.sweeps):
        gibbs_sweep(state, params)
        trace.append(log_likelihood(state, params))
        if params.average_last and sweep >= avg_from:
            phi = _phi_from_counts(state, params)
            theta = _theta_from_counts(state, params)
            if phi_acc is None:
                phi_acc, theta_acc = phi, theta
            else:
                phi_acc += phi
                theta_acc += theta

    if params.average_last:
        phi = phi_acc / params.average_last
        theta = theta_acc / params.average_last
    else:
        phi = _phi_from_counts(state, params)
        theta = _theta_from_counts(state, params)

    return TopicModel(
        params=params,
        phi=phi,
        theta=theta,
        log_likelihood_trace=trace,
        corpus_ref=encoded_corpus.corpus_id,
        words=list(encoded_corpus.vocabulary.id_to_word),
        doc_ids=list(encoded_corpus.doc_ids),
    )


def top_words(model: TopicModel, topic: int, n: int) -> list[str]:
    """The n most probable words for a topic.

    Sorted by probability descending with lexicographic tie-breaks, so
    top_words(m, t, n) is always a prefix of top_words(m, t, n + k).
    """
    if not 0 <= topic < model.num_topics:
        raise IndexError(f"topic {topic} out of range")
    row = model.phi[topic]
    order = sorted(range(len(model.words)), key=lambda w: (-row[w], model.words[w]))
    return [model.words[w] for w in order[:n]]


def top_documents(model: TopicModel, topic: int, n: int) -> list[tuple[str, float]]:
    """Documents ranked by their weight on a topic, doc_id tie-breaks."""
    if not 0 <= topic < model.num_topics:
        raise IndexError(f"topic {topic} out of range")
    col = model.theta[:, topic]
    order = sorted(
        range(len(model.doc_ids)), key=lambda d: (-col[d], model.doc_ids[d])
    )
    return [(model.doc_ids[d], float(col[d])) for d in order[:n]]


def theta_csv(model: TopicModel) -> str:
    """Document-topic matrix as CSV: doc_id, topic_0 .. topic_{K-1}."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["doc_id"] + [f"topic_{k}" for k in range(model.num_topics)])
    for d, doc_id in enumerate(model.doc_ids):
        writer.writerow([doc_id] + [repr(float(v)) for v in model.theta[d]])
    return buf.getvalue()
