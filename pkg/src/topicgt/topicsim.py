"""Topic-set comparison across candidate topic counts.

Two models with different K are compared by greedily matching topics on
shared top words. Coverage is directional: coverage(A, B) is the
percentage of A's topics that found a partner in B, which is not the
same as coverage(B, A). Grids of such reports over a list of K values
drive the selection of a topic count: the K whose topic set is, on
average, best covered by the other candidates wins, with ties going to
the smaller K.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import EncodedCorpus
from .errors import ContractViolation, CorruptFile
from .lda import LdaParams, TopicModel, run_lda, top_words

DEFAULT_COVERAGE_THRESHOLD = 5

SELECTION_RULE = (
    "pick the K whose topic set has the highest mean directional coverage "
    "by the other candidate sets; ties break toward the smaller K"
)


@dataclass(frozen=True)
class TopicSet:
    model_ref: str
    topics: tuple  # of (topic_id, tuple of top words)

    def __post_init__(self):
        ids = [t[0] for t in self.topics]
        if len(ids) != len(set(ids)):
            raise ContractViolation("topic ids must be unique", field="topics")
        for topic_id, words in self.topics:
            if len(words) == 0:
                raise ContractViolation(
                    f"topic {topic_id} has an empty top-word list", field="topics"
                )
            if len(words) != len(set(words)):
                raise ContractViolation(
                    f"topic {topic_id} has duplicate top words", field="topics"
                )

    def __len__(self) -> int:
        return len(self.topics)

    @classmethod
    def from_model(cls, model: TopicModel, n: int | None = None) -> "TopicSet":
        n = model.params.top_n_words if n is None else n
        if n < 1:
            raise ContractViolation("top-word lists must be non-empty", field="n")
        topics = tuple(
            (k, tuple(top_words(model, k, n))) for k in range(model.num_topics)
        )
        return cls(model_ref=model.model_id, topics=topics)

    def to_dict(self) -> dict:
        return {
            "model_ref": self.model_ref,
            "topics": [[t, list(ws)] for t, ws in self.topics],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "TopicSet":
        return cls(
            model_ref=data["model_ref"],
            topics=tuple((int(t), tuple(ws)) for t, ws in data["topics"]),
        )


@dataclass(frozen=True)
class MatchPair:
    a_id: int
    b_id: int
    shared: int


@dataclass(frozen=True)
class Matching:
    pairs: tuple  # of MatchPair
    unmatched_a: tuple
    unmatched_b: tuple

    def total_overlap(self) -> int:
        return sum(p.shared for p in self.pairs)


@dataclass(frozen=True)
class CoverageReport:
    from_set: str
    to_set: str
    threshold: int
    # one (topic_id, matched_id or None, shared count) per from-topic;
    # fixture-built reports may leave this empty
    matches: tuple
    covered_count: int
    from_size: int
    coverage_percent: float

    def __post_init__(self):
        if not 0 <= self.covered_count <= self.from_size:
            raise ContractViolation("covered_count out of range")
        expected = 100.0 * self.covered_count / self.from_size
        if abs(self.coverage_percent - expected) > 1e-9:
            raise ContractViolation(
                "coverage_percent inconsistent with covered_count / from_size"
            )

    def to_dict(self) -> dict:
        return {
            "from_set": self.from_set,
            "to_set": self.to_set,
            "threshold": self.threshold,
            "matches": [[t, m, s] for t, m, s in self.matches],
            "covered_count": self.covered_count,
            "from_size": self.from_size,
            "coverage_percent": self.coverage_percent,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CoverageReport":
        return cls(
            from_set=data["from_set"],
            to_set=data["to_set"],
            threshold=int(data["threshold"]),
            matches=tuple(
                (t, m, s) for t, m, s in data.get("matches", [])
            ),
            covered_count=int(data["covered_count"]),
            from_size=int(data["from_size"]),
            coverage_percent=float(data["coverage_percent"]),
        )


def _overlap_table(set_a: TopicSet, set_b: TopicSet) -> dict:
    words_a = {t: frozenset(ws) for t, ws in set_a.topics}
    words_b = {t: frozenset(ws) for t, ws in set_b.topics}
    return {
        (a, b): len(wa & wb)
        for a, wa in words_a.items()
        for b, wb in words_b.items()
    }


def match_topics(set_a: TopicSet, set_b: TopicSet, threshold: int) -> Matching:
    """Greedy one-to-one matching on shared top-word counts.

    Repeatedly pairs the (a, b) with the largest shared count that is
    still >= threshold; ties break toward the lower a id, then the
    lower b id.
    """
    if len(set_a) == 0 or len(set_b) == 0:
        raise ContractViolation("topic sets must be non-empty")
    if threshold < 1:
        raise ContractViolation("threshold must be >= 1", field="threshold")

    overlap = _overlap_table(set_a, set_b)
    free_a = {t for t, _ in set_a.topics}
    free_b = {t for t, _ in set_b.topics}
    pairs = []
    while free_a and free_b:
        best = min(
            ((a, b) for a in free_a for b in free_b),
            key=lambda ab: (-overlap[ab], ab[0], ab[1]),
        )
        if overlap[best] < threshold:
            break
        pairs.append(MatchPair(best[0], best[1], overlap[best]))
        free_a.discard(best[0])
        free_b.discard(best[1])

    return Matching(
        pairs=tuple(pairs),
        unmatched_a=tuple(sorted(free_a)),
        unmatched_b=tuple(sorted(free_b)),
    )


def coverage(set_a: TopicSet, set_b: TopicSet, threshold: int) -> CoverageReport:
    """Directional coverage: the share of set_a topics matched in set_b."""
    matching = match_topics(set_a, set_b, threshold)
    by_a = {p.a_id: p for p in matching.pairs}
    matches = tuple(
        (t, by_a[t].b_id, by_a[t].shared) if t in by_a else (t, None, 0)
        for t, _ in set_a.topics
    )
    covered = len(matching.pairs)
    return CoverageReport(
        from_set=set_a.model_ref,
        to_set=set_b.model_ref,
        threshold=threshold,
        matches=matches,
        covered_count=covered,
        from_size=len(set_a),
        coverage_percent=100.0 * covered / len(set_a),
    )


def derive_seed(base_seed: int, k: int) -> int:
    """Per-K run seed: first 8 bytes of sha256(\"{base_seed}:{k}\"), big-endian."""
    digest = hashlib.sha256(f"{base_seed}:{k}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class ComparisonGrid:
    corpus_ref: str
    base_seed: int
    threshold: int
    k_list: list[int]
    topic_sets: dict  # K -> TopicSet
    reports: dict     # (from_k, to_k) -> CoverageReport

    def report(self, from_k: int, to_k: int) -> CoverageReport:
        return self.reports[(from_k, to_k)]

    def to_dict(self) -> dict:
        return {
            "corpus_ref": self.corpus_ref,
            "base_seed": self.base_seed,
            "threshold": self.threshold,
            "k_list": self.k_list,
            "topic_sets": {str(k): s.to_dict() for k, s in self.topic_sets.items()},
            "reports": [
                {"from_k": a, "to_k": b, **r.to_dict()}
                for (a, b), r in sorted(self.reports.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Mapping) -> "ComparisonGrid":
        try:
            return cls(
                corpus_ref=data["corpus_ref"],
                base_seed=int(data["base_seed"]),
                threshold=int(data["threshold"]),
                k_list=[int(k) for k in data["k_list"]],
                topic_sets={
                    int(k): TopicSet.from_dict(s)
                    for k, s in data.get("topic_sets", {}).items()
                },
                reports={
                    (int(r["from_k"]), int(r["to_k"])): CoverageReport.from_dict(r)
                    for r in data["reports"]
                },
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptFile(f"comparison grid is invalid: {exc}")

    @classmethod
    def from_json(cls, text: str) -> "ComparisonGrid":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CorruptFile(f"comparison grid is not valid JSON: {exc}")
        return cls.from_dict(data)

    def to_csv(self) -> str:
        """Coverage matrix: rows = from-K, columns = to-K, cells = percent."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        ks = self.k_list
        writer.writerow(["from_k\\to_k"] + [str(k) for k in ks])
        for a in ks:
            row = [str(a)]
            for b in ks:
                if a == b:
                    row.append("")
                else:
                    row.append(repr(float(self.reports[(a, b)].coverage_percent)))
            writer.writerow(row)
        return buf.getvalue()


def compare_grid(
    encoded_corpus: EncodedCorpus,
    k_list: Sequence[int],
    params: LdaParams,
    threshold: int = DEFAULT_COVERAGE_THRESHOLD,
) -> ComparisonGrid:
    """Run one model per K and report coverage for every ordered pair.

    Each run's seed derives from (params.seed, K), so the grid is fully
    reproducible from its inputs.
    """
    ks = sorted(set(int(k) for k in k_list))
    if len(ks) < 2:
        raise ContractViolation("k_list needs at least 2 distinct values", field="k_list")

    sets = {}
    for k in ks:
        run_params = LdaParams(
            num_topics=k,
            alpha=params.alpha,
            beta=params.beta,
            sweeps=params.sweeps,
            seed=derive_seed(params.seed, k),
            top_n_words=params.top_n_words,
            average_last=params.average_last,
        )
        sets[k] = TopicSet.from_model(run_lda(encoded_corpus, run_params))

    reports = {
        (a, b): coverage(sets[a], sets[b], threshold)
        for a in ks
        for b in ks
        if a != b
    }
    return ComparisonGrid(
        corpus_ref=encoded_corpus.corpus_id,
        base_seed=params.seed,
        threshold=threshold,
        k_list=ks,
        topic_sets=sets,
        reports=reports,
    )


@dataclass(frozen=True)
class KSelection:
    """Selected K plus the rationale: the rule, scores, and inputs."""

    selected_k: int
    rule: str
    scores: dict            # K -> mean coverage of K's set by the others
    coverages: dict         # (from_k, to_k) -> coverage_percent
    threshold: int

    def to_dict(self) -> dict:
        return {
            "selected_k": self.selected_k,
            "rule": self.rule,
            "scores": {str(k): v for k, v in sorted(self.scores.items())},
            "coverages": {
                f"{a}->{b}": v for (a, b), v in sorted(self.coverages.items())
            },
            "threshold": self.threshold,
        }


def select_k(grid: ComparisonGrid) -> KSelection:
    """Choose the K best covered, on average, by the other candidates."""
    ks = grid.k_list
    expected = {(a, b) for a in ks for b in ks if a != b}
    if set(grid.reports) != expected:
        missing = sorted(expected - set(grid.reports))
        raise ContractViolation(f"grid is incomplete, missing pairs {missing}")

    scores = {
        k: sum(grid.reports[(k, other)].coverage_percent for other in ks if other != k)
        / (len(ks) - 1)
        for k in ks
    }
    selected = min(ks, key=lambda k: (-scores[k], k))
    return KSelection(
        selected_k=selected,
        rule=SELECTION_RULE,
        scores=scores,
        coverages={pair: r.coverage_percent for pair, r in grid.reports.items()},
        threshold=grid.threshold,
    )
