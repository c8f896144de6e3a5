import json

import numpy as np
import pytest

from topicgt.errors import ContractViolation, CorruptFile
from topicgt.lda import LdaParams, run_lda
from topicgt.topicsim import (
    ComparisonGrid,
    CoverageReport,
    MatchPair,
    Matching,
    TopicSet,
    compare_grid,
    coverage,
    derive_seed,
    match_topics,
    select_k,
)

from oracles import exhaustive_best_matching, greedy_cosine_match, make_planted_corpus

GRID_PARAMS = LdaParams(num_topics=2, sweeps=10, seed=500, top_n_words=5)


def make_set(ref, topic_lists):
    return TopicSet(
        model_ref=ref,
        topics=tuple((i, tuple(words)) for i, words in enumerate(topic_lists)),
    )


# --- TopicSet ---------------------------------------------------------


def test_topicset_rejects_duplicate_ids():
    with pytest.raises(ContractViolation):
        TopicSet(model_ref="m", topics=((0, ("a", "b")), (0, ("c", "d"))))


def test_topicset_rejects_empty_word_list():
    with pytest.raises(ContractViolation):
        TopicSet(model_ref="m", topics=((0, ()),))


def test_topicset_rejects_duplicate_words_within_topic():
    with pytest.raises(ContractViolation):
        TopicSet(model_ref="m", topics=((0, ("a", "a")),))


def test_topicset_from_model(funnel_model):
    ts = TopicSet.from_model(funnel_model, n=10)
    assert len(ts.topics) == funnel_model.num_topics
    assert len(ts) == funnel_model.num_topics
    assert all(len(words) == 10 for _, words in ts.topics)
    assert ts.model_ref == funnel_model.model_id
    with pytest.raises(ContractViolation):
        TopicSet.from_model(funnel_model, n=0)


def test_topicset_from_model_defaults_to_params_top_n(funnel_model):
    ts = TopicSet.from_model(funnel_model)
    expected = funnel_model.params.top_n_words
    assert all(len(words) == expected for _, words in ts.topics)


def test_topicset_round_trip():
    ts = make_set("m1", [["a", "b"], ["c", "d"]])
    assert TopicSet.from_dict(ts.to_dict()) == ts


# --- match_topics -----------------------------------------------------


def test_match_self_is_perfect():
    ts = make_set("m", [["a", "b", "c", "d", "e"], ["f", "g", "h", "i", "j"]])
    matching = match_topics(ts, ts, threshold=5)
    assert {(p.a_id, p.b_id, p.shared) for p in matching.pairs} == {
        (0, 0, 5),
        (1, 1, 5),
    }
    assert matching.unmatched_a == () and matching.unmatched_b == ()


def test_match_disjoint_is_empty():
    a = make_set("a", [["a", "b", "c", "d", "e"]])
    b = make_set("b", [["v", "w", "x", "y", "z"]])
    matching = match_topics(a, b, threshold=1)
    assert matching.pairs == ()
    assert matching.unmatched_a == (0,) and matching.unmatched_b == (0,)


def test_match_respects_threshold():
    a = make_set("a", [["a", "b", "c", "d", "e", "f"]])
    b = make_set("b", [["a", "b", "c", "d", "x", "y"]])
    assert len(match_topics(a, b, threshold=4).pairs) == 1
    assert len(match_topics(a, b, threshold=5).pairs) == 0


def test_match_is_one_to_one():
    # one a-topic overlaps both b-topics; it may be used only once
    a = make_set("a", [["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"]])
    b = make_set(
        "b",
        [["a", "b", "c", "d", "e", "q", "r", "s", "t", "u"],
         ["f", "g", "h", "i", "j", "v", "w", "x", "y", "z"]],
    )
    matching = match_topics(a, b, threshold=5)
    assert len(matching.pairs) == 1
    assert matching.pairs[0].shared == 5
    assert len(matching.unmatched_b) == 1


def test_match_greedy_order_and_ties():
    # equal overlaps resolve to the lowest a id, then lowest b id
    a = make_set("a", [["a", "b"], ["a", "b"]])
    b = make_set("b", [["a", "b"], ["a", "b"]])
    matching = match_topics(a, b, threshold=2)
    assert [(p.a_id, p.b_id) for p in matching.pairs] == [(0, 0), (1, 1)]


def test_match_errors():
    ts = make_set("m", [["a", "b"]])
    empty = TopicSet(model_ref="m", topics=())
    with pytest.raises(ContractViolation):
        match_topics(ts, ts, threshold=0)
    with pytest.raises(ContractViolation):
        match_topics(empty, ts, threshold=1)
    with pytest.raises(ContractViolation):
        match_topics(ts, empty, threshold=1)


def test_match_agrees_with_exhaustive_on_small_instances():
    rng = np.random.default_rng(404)
    alphabet = [f"w{i:02d}" for i in range(14)]
    for trial in range(30):
        a_lists = [list(rng.choice(alphabet, size=6, replace=False)) for _ in range(3)]
        b_lists = [list(rng.choice(alphabet, size=6, replace=False)) for _ in range(4)]
        a = make_set("a", a_lists)
        b = make_set("b", b_lists)
        greedy = match_topics(a, b, threshold=2)
        best_total, _ = exhaustive_best_matching(a, b, threshold=2)
        assert greedy.total_overlap() <= best_total
        if best_total:
            assert greedy.total_overlap() >= 0.5 * best_total


def test_matching_total_overlap():
    m = Matching(
        pairs=(MatchPair(0, 1, 5), MatchPair(1, 0, 3)),
        unmatched_a=(),
        unmatched_b=(2,),
    )
    assert m.total_overlap() == 8


# --- coverage ---------------------------------------------------------


def test_coverage_self_is_100():
    ts = make_set("m", [[f"w{i}{j}" for j in range(6)] for i in range(4)])
    report = coverage(ts, ts, threshold=5)
    assert report.covered_count == 4
    assert report.from_size == 4
    assert report.coverage_percent == 100.0
    assert report.from_set == "m" and report.to_set == "m"
    assert all(matched == t for t, matched, _ in report.matches)


def test_coverage_disjoint_is_0():
    a = make_set("a", [["a", "b", "c", "d", "e"]])
    b = make_set("b", [["v", "w", "x", "y", "z"]])
    report = coverage(a, b, threshold=1)
    assert report.coverage_percent == 0.0
    assert report.matches == ((0, None, 0),)


def test_coverage_is_directional():
    shared = ["a", "b", "c", "d", "e"]
    a = make_set("a", [shared])
    b = make_set("b", [shared, ["q", "r", "s", "t", "u"]])
    assert coverage(a, b, threshold=5).coverage_percent == 100.0
    assert coverage(b, a, threshold=5).coverage_percent == 50.0


def test_coverage_monotone_in_threshold():
    rng = np.random.default_rng(11)
    alphabet = [f"w{i:02d}" for i in range(30)]
    a = make_set(
        "a", [list(rng.choice(alphabet, size=10, replace=False)) for _ in range(5)]
    )
    b = make_set(
        "b", [list(rng.choice(alphabet, size=10, replace=False)) for _ in range(5)]
    )
    percents = [coverage(a, b, threshold=t).coverage_percent for t in range(1, 11)]
    assert all(x >= y for x, y in zip(percents, percents[1:]))


def test_coverage_report_consistency_enforced():
    with pytest.raises(ContractViolation):
        CoverageReport(
            from_set="a",
            to_set="b",
            threshold=5,
            matches=(),
            covered_count=1,
            from_size=2,
            coverage_percent=42.0,
        )
    with pytest.raises(ContractViolation):
        CoverageReport(
            from_set="a",
            to_set="b",
            threshold=5,
            matches=(),
            covered_count=3,
            from_size=2,
            coverage_percent=150.0,
        )


def test_coverage_report_round_trip():
    a = make_set("a", [["a", "b", "c", "d", "e"], ["f", "g", "h", "i", "j"]])
    b = make_set("b", [["a", "b", "c", "d", "e"]])
    report = coverage(a, b, threshold=5)
    assert CoverageReport.from_dict(report.to_dict()) == report


# --- seeds and grids --------------------------------------------------


def test_derive_seed_is_deterministic_and_k_sensitive():
    assert derive_seed(1000, 40) == derive_seed(1000, 40)
    assert derive_seed(1000, 40) != derive_seed(1000, 50)
    assert derive_seed(1000, 40) != derive_seed(1001, 40)
    assert 0 <= derive_seed(1000, 40) < 2**64


def test_compare_grid_shape(funnel_corpus):
    grid = compare_grid(funnel_corpus, k_list=[2, 3, 4], params=GRID_PARAMS)
    assert grid.k_list == [2, 3, 4]
    assert grid.base_seed == 500
    assert grid.corpus_ref == funnel_corpus.corpus_id
    assert set(grid.reports) == {(2, 3), (2, 4), (3, 2), (3, 4), (4, 2), (4, 3)}
    assert set(grid.topic_sets) == {2, 3, 4}
    for k, ts in grid.topic_sets.items():
        assert len(ts) == k
    for (a, b), report in grid.reports.items():
        assert report.from_size == a
        assert report.from_set == grid.topic_sets[a].model_ref
        assert report.to_set == grid.topic_sets[b].model_ref


def test_compare_grid_needs_two_ks(funnel_corpus):
    with pytest.raises(ContractViolation):
        compare_grid(funnel_corpus, k_list=[3], params=GRID_PARAMS)
    with pytest.raises(ContractViolation):
        compare_grid(funnel_corpus, k_list=[3, 3], params=GRID_PARAMS)


def test_compare_grid_deduplicates_and_sorts(funnel_corpus):
    grid = compare_grid(funnel_corpus, k_list=[4, 2, 4], params=GRID_PARAMS)
    assert grid.k_list == [2, 4]


def test_compare_grid_uses_derived_seeds(funnel_corpus):
    grid = compare_grid(funnel_corpus, k_list=[2, 3], params=GRID_PARAMS)
    expected = run_lda(
        funnel_corpus,
        LdaParams(
            num_topics=2,
            sweeps=GRID_PARAMS.sweeps,
            seed=derive_seed(GRID_PARAMS.seed, 2),
            top_n_words=GRID_PARAMS.top_n_words,
        ),
    )
    assert grid.topic_sets[2].model_ref == expected.model_id
    assert grid.topic_sets[2] == TopicSet.from_model(expected)


def test_compare_grid_deterministic(funnel_corpus):
    g1 = compare_grid(funnel_corpus, k_list=[2, 3], params=GRID_PARAMS)
    g2 = compare_grid(funnel_corpus, k_list=[2, 3], params=GRID_PARAMS)
    assert g1.to_json() == g2.to_json()


def test_planted_corpus_directionality():
    """Fewer, coarser topics are better covered by a finer model than
    vice versa when the true structure has five planted topics."""
    encoded, phi_star = make_planted_corpus(seed=77)
    five = run_lda(encoded, LdaParams(num_topics=5, sweeps=300, seed=1))
    ten = run_lda(encoded, LdaParams(num_topics=10, sweeps=300, seed=2))
    assert greedy_cosine_match(five.phi, phi_star) > 0.8
    a = TopicSet.from_model(five, n=10)
    b = TopicSet.from_model(ten, n=10)
    forward = coverage(a, b, threshold=5).coverage_percent
    backward = coverage(b, a, threshold=5).coverage_percent
    assert forward >= backward


# --- serialization ----------------------------------------------------


def test_grid_json_round_trip(funnel_corpus):
    grid = compare_grid(funnel_corpus, k_list=[2, 3], params=GRID_PARAMS)
    loaded = ComparisonGrid.from_json(grid.to_json())
    assert loaded.to_json() == grid.to_json()
    assert loaded.report(2, 3) == grid.report(2, 3)


def test_grid_from_json_rejects_garbage():
    with pytest.raises(CorruptFile):
        ComparisonGrid.from_json("not json")
    with pytest.raises(CorruptFile):
        ComparisonGrid.from_json(json.dumps({"k_list": [2, 3]}))


def test_grid_csv_matrix(funnel_corpus):
    grid = compare_grid(funnel_corpus, k_list=[2, 3], params=GRID_PARAMS)
    lines = grid.to_csv().strip().splitlines()
    assert lines[0] == "from_k\\to_k,2,3"
    assert len(lines) == 3
    row2 = lines[1].split(",")
    assert row2[0] == "2" and row2[1] == ""  # empty diagonal
    assert float(row2[2]) == grid.report(2, 3).coverage_percent
    row3 = lines[2].split(",")
    assert row3[0] == "3" and row3[2] == ""
    assert float(row3[1]) == grid.report(3, 2).coverage_percent


def test_grid_report_lookup_errors(funnel_corpus):
    grid = compare_grid(funnel_corpus, k_list=[2, 3], params=GRID_PARAMS)
    with pytest.raises(KeyError):
        grid.report(2, 2)
    with pytest.raises(KeyError):
        grid.report(2, 9)


# --- K selection ------------------------------------------------------


def synthetic_report(from_k, to_k, covered):
    """Build a CoverageReport with the stated covered count without
    fabricating internals: run coverage() on sets that share exactly
    `covered` identical topics plus disjoint fillers."""
    shared = [[f"s{from_k}x{to_k}x{i}x{j}" for j in range(5)] for i in range(covered)]
    a_fill = [
        [f"a{from_k}x{to_k}x{i}x{j}" for j in range(5)] for i in range(from_k - covered)
    ]
    b_fill = [
        [f"b{from_k}x{to_k}x{i}x{j}" for j in range(5)] for i in range(to_k - covered)
    ]
    a = make_set(f"m{from_k}", shared + a_fill)
    b = make_set(f"m{to_k}", shared + b_fill)
    return coverage(a, b, threshold=5)


def fixture_sets(ks):
    return {
        k: make_set(f"m{k}", [[f"t{k}x{i}x{j}" for j in range(5)] for i in range(k)])
        for k in ks
    }


def reference_grid():
    counts = {
        (40, 50): 34, (40, 60): 35,
        (50, 40): 34, (50, 60): 39,
        (60, 40): 33, (60, 50): 39,
    }
    reports = {
        pair: synthetic_report(pair[0], pair[1], covered)
        for pair, covered in counts.items()
    }
    return ComparisonGrid(
        corpus_ref="c_fixture",
        base_seed=1000,
        threshold=5,
        k_list=[40, 50, 60],
        topic_sets=fixture_sets([40, 50, 60]),
        reports=reports,
    )


def test_select_k_on_reference_grid():
    selection = select_k(reference_grid())
    assert selection.selected_k == 40
    assert selection.scores[40] == pytest.approx((85.0 + 87.5) / 2)
    assert selection.scores[50] == pytest.approx((68.0 + 78.0) / 2)
    assert selection.scores[60] == pytest.approx((55.0 + 65.0) / 2)
    assert selection.coverages[(40, 50)] == pytest.approx(85.0)
    d = selection.to_dict()
    assert d["selected_k"] == 40
    assert d["coverages"]["40->50"] == pytest.approx(85.0)
    assert d["scores"]["40"] == pytest.approx(86.25)
    assert "rule" in d and isinstance(d["rule"], str)
    assert d["threshold"] == 5


def two_k_grid(counts):
    reports = {p: synthetic_report(p[0], p[1], c) for p, c in counts.items()}
    ks = sorted({k for pair in counts for k in pair})
    return ComparisonGrid(
        corpus_ref="c",
        base_seed=1,
        threshold=5,
        k_list=ks,
        topic_sets=fixture_sets(ks),
        reports=reports,
    )


def test_select_k_tie_prefers_smaller_k():
    grid = two_k_grid({(2, 3): 2, (3, 2): 3})
    selection = select_k(grid)
    assert selection.scores[2] == selection.scores[3] == 100.0
    assert selection.selected_k == 2


def test_select_k_prefers_better_covered():
    grid = two_k_grid({(2, 3): 1, (3, 2): 3})
    assert select_k(grid).selected_k == 3


def test_select_k_requires_complete_grid():
    reports = {
        p: synthetic_report(p[0], p[1], c) for p, c in {(2, 3): 2, (3, 2): 3}.items()
    }
    incomplete = ComparisonGrid(
        corpus_ref="c",
        base_seed=1,
        threshold=5,
        k_list=[2, 3, 4],
        topic_sets=fixture_sets([2, 3, 4]),
        reports=reports,
    )
    with pytest.raises(ContractViolation) as exc:
        select_k(incomplete)
    assert "(2, 4)" in str(exc.value)


def test_selection_round_trips_through_grid_json(funnel_corpus):
    grid = compare_grid(funnel_corpus, k_list=[2, 3], params=GRID_PARAMS)
    first = select_k(grid)
    second = select_k(ComparisonGrid.from_json(grid.to_json()))
    assert first.to_dict() == second.to_dict()
