"""Acceptance gate: one test per primary criterion, at stated tolerance.

Each test prints a single [PASS] line (visible under -rA / -s) with the
measured runtime; the assertion structure enforces both the numeric
tolerance and the runtime budget.
"""

import time

import numpy as np
import pytest

from topicgt.lda import LdaParams, gibbs_conditional, gibbs_sweep, init_state, run_lda, top_words
from topicgt.topicsim import ComparisonGrid, TopicSet, coverage, match_topics, select_k
from topicgt.workflow import average_rating, export_tables, load_project, projects_equal, replay_audit, save_project

import funnel
import oracles
from conftest import MICRO_TOKENS


class Budget:
    """Runtime budget: starts the clock on enter, enforces on exit."""

    def __init__(self, seconds):
        self.limit = seconds
        self.elapsed = None

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.elapsed = time.perf_counter() - self.start
        if exc_type is None:
            assert self.elapsed < self.limit, (
                f"runtime {self.elapsed:.2f}s exceeded budget {self.limit}s"
            )
        return False


def report(name, budget):
    print(f"[PASS] {name} (runtime {budget.elapsed:.3f}s)")


def test_criterion_1_gibbs_conditional_matches_recount_oracle():
    rng = np.random.default_rng(3)
    docs = [[int(rng.integers(0, 6)) for _ in range(10)] for _ in range(3)]
    encoded = oracles.encoded_from_token_ids(docs, num_words=6)
    assert encoded.total_tokens == 30

    with Budget(1.0) as budget:
        for k in range(1, 5):
            params = LdaParams(num_topics=k, sweeps=1, seed=k)
            state = init_state(encoded, params)
            for _ in range(3):
                gibbs_sweep(state, params)
            for doc in range(3):
                for position in range(10):
                    got = gibbs_conditional(state, params, doc, position)
                    want = oracles.conditional_oracle(state, params, doc, position)
                    np.testing.assert_allclose(got, want, atol=1e-12, rtol=0)
    report(
        "Gibbs conditional matches the from-scratch recount oracle on every "
        "position of a 30-token corpus for K=1..4 (tolerance 1e-12)",
        budget,
    )


def test_criterion_2_posterior_sanity_on_micro_corpus():
    encoded = oracles.encoded_from_tokens(MICRO_TOKENS)
    assert encoded.total_tokens == 5
    params = LdaParams(num_topics=2, alpha=0.5, beta=0.02, sweeps=1, seed=424242)
    token_words = [t for doc in encoded.docs for t in doc]
    token_docs = [d for d, doc in enumerate(encoded.docs) for _ in doc]

    with Budget(30.0) as budget:
        exact = oracles.enumerate_exact_marginal(
            token_words,
            token_docs,
            num_words=3,
            num_docs=2,
            num_topics=2,
            alpha=0.5,
            beta=0.02,
            token_index=0,
        )
        state = init_state(encoded, params)
        counts = np.zeros(2)
        sweeps = 10_000
        for _ in range(sweeps):
            gibbs_sweep(state, params)
            counts[state.z[0]] += 1
        empirical = counts / sweeps
        tv = 0.5 * float(np.abs(empirical - np.asarray(exact)).sum())
        assert tv <= 0.05, f"total variation {tv:.4f} > 0.05"
    report(
        f"empirical distribution of token 0 over 10,000 sweeps is within "
        f"TV 0.05 of exact enumeration (measured TV {tv:.4f})",
        budget,
    )


def test_criterion_3_determinism_and_seed_sensitivity():
    rng = np.random.default_rng(13)
    docs = [[int(rng.integers(0, 40)) for _ in range(50)] for _ in range(20)]
    encoded = oracles.encoded_from_token_ids(docs, num_words=40)
    assert encoded.total_tokens == 1000
    params = LdaParams(num_topics=5, sweeps=30, seed=97)

    with Budget(10.0) as budget:
        state_a = init_state(encoded, params)
        state_b = init_state(encoded, params)
        for _ in range(params.sweeps):
            gibbs_sweep(state_a, params)
            gibbs_sweep(state_b, params)
        assert np.array_equal(state_a.z, state_b.z)

        model_a = run_lda(encoded, params)
        model_b = run_lda(encoded, params)
        assert np.array_equal(model_a.phi, model_b.phi)
        assert np.array_equal(model_a.theta, model_b.theta)

        reseeded = LdaParams(num_topics=5, sweeps=30, seed=98)
        state_c = init_state(encoded, reseeded)
        for _ in range(reseeded.sweeps):
            gibbs_sweep(state_c, reseeded)
        assert not np.array_equal(state_a.z, state_c.z)
    report(
        "same corpus/params/seed give bit-identical z, phi, theta on a "
        "1,000-token corpus; changing only the seed changes z",
        budget,
    )


def test_criterion_4_planted_topic_recovery():
    encoded, phi_star = oracles.make_planted_corpus(
        num_topics=5, num_words=100, num_docs=200, doc_len=50, seed=1234
    )
    params = LdaParams(num_topics=5, sweeps=500, seed=2)

    with Budget(60.0) as budget:
        model = run_lda(encoded, params)
        score = oracles.greedy_cosine_match(model.phi, phi_star)
        assert score >= 0.8, f"mean matched cosine {score:.4f} < 0.8"
    report(
        f"500 sweeps on the planted corpus (K=5, W=100, D=200, 50 tokens/doc) "
        f"recover the planted topics at mean matched cosine {score:.4f} >= 0.8",
        budget,
    )


def test_criterion_5_count_conservation(fixture_encoded):
    params = LdaParams(num_topics=3, sweeps=1, seed=41)

    with Budget(5.0) as budget:
        state = init_state(fixture_encoded, params)
        oracles.assert_count_invariants(state, params, fixture_encoded)
        for _ in range(50):
            gibbs_sweep(state, params)
            oracles.assert_count_invariants(state, params, fixture_encoded)
    report(
        "count invariants (recount match, marginal sums, per-word totals, "
        "non-negativity, grand total) hold after init and after each of 50 sweeps",
        budget,
    )


def test_criterion_6_coverage_properties():
    def make_set(ref, topic_lists):
        return TopicSet(
            model_ref=ref,
            topics=tuple((i, tuple(w)) for i, w in enumerate(topic_lists)),
        )

    with Budget(5.0) as budget:
        own = make_set("m", [[f"w{i}{j}" for j in range(8)] for i in range(5)])
        assert coverage(own, own, threshold=5).coverage_percent == 100.0

        left = make_set("a", [["a", "b", "c", "d", "e"]])
        right = make_set("b", [["v", "w", "x", "y", "z"]])
        assert coverage(left, right, threshold=1).coverage_percent == 0.0

        rng = np.random.default_rng(11)
        alphabet = [f"w{i:02d}" for i in range(30)]
        rand_a = make_set(
            "a", [list(rng.choice(alphabet, size=10, replace=False)) for _ in range(5)]
        )
        rand_b = make_set(
            "b", [list(rng.choice(alphabet, size=10, replace=False)) for _ in range(5)]
        )
        percents = [
            coverage(rand_a, rand_b, threshold=t).coverage_percent
            for t in range(1, 11)
        ]
        assert all(x >= y for x, y in zip(percents, percents[1:]))

        rng = np.random.default_rng(1234)
        checked = 0
        for _ in range(40):
            alphabet = [f"w{i:02d}" for i in range(16)]
            na, nb = rng.integers(3, 7), rng.integers(3, 7)
            a = make_set(
                "a",
                [list(rng.choice(alphabet, size=8, replace=False)) for _ in range(na)],
            )
            b = make_set(
                "b",
                [list(rng.choice(alphabet, size=8, replace=False)) for _ in range(nb)],
            )
            greedy_total = match_topics(a, b, threshold=3).total_overlap()
            best_total, _ = oracles.exhaustive_best_matching(a, b, threshold=3)
            if best_total:
                assert greedy_total >= 0.9 * best_total
                checked += 1
        assert checked >= 30
    report(
        "coverage(S,S)=100%, disjoint sets 0%, coverage is monotone over "
        "thresholds 1..10, and greedy matching stays within 90% of the "
        f"exhaustive optimum on {checked} randomized fixtures (<=6 topics/side)",
        budget,
    )


def synthetic_report(from_k, to_k, covered):
    shared = [[f"s{from_k}x{to_k}x{i}x{j}" for j in range(5)] for i in range(covered)]
    a_fill = [
        [f"a{from_k}x{to_k}x{i}x{j}" for j in range(5)] for i in range(from_k - covered)
    ]
    b_fill = [
        [f"b{from_k}x{to_k}x{i}x{j}" for j in range(5)] for i in range(to_k - covered)
    ]
    a = TopicSet(
        model_ref=f"m{from_k}",
        topics=tuple((i, tuple(w)) for i, w in enumerate(shared + a_fill)),
    )
    b = TopicSet(
        model_ref=f"m{to_k}",
        topics=tuple((i, tuple(w)) for i, w in enumerate(shared + b_fill)),
    )
    return coverage(a, b, threshold=5)


def test_criterion_7_k_selection_replay():
    with Budget(1.0) as budget:
        counts = {
            (40, 50): 34, (40, 60): 35, (50, 60): 39,
            (50, 40): 34, (60, 40): 33, (60, 50): 39,
        }
        reports = {
            pair: synthetic_report(pair[0], pair[1], covered)
            for pair, covered in counts.items()
        }
        topic_sets = {
            k: TopicSet(
                model_ref=f"m{k}",
                topics=tuple(
                    (i, tuple(f"t{k}x{i}x{j}" for j in range(5))) for i in range(k)
                ),
            )
            for k in (40, 50, 60)
        }
        grid = ComparisonGrid(
            corpus_ref="c_fixture",
            base_seed=1000,
            threshold=5,
            k_list=[40, 50, 60],
            topic_sets=topic_sets,
            reports=reports,
        )
        selection = select_k(grid)
        assert selection.coverages[(40, 50)] == pytest.approx(85.0)
        assert selection.coverages[(40, 60)] == pytest.approx(87.5)
        assert selection.coverages[(50, 60)] == pytest.approx(78.0)
        assert selection.selected_k == 40
    report(
        "the reference grid (40->50: 85%, 40->60: 87.5%, 50->60: 78%) "
        "selects K=40",
        budget,
    )


def test_criterion_8_workflow_funnel_replay(funnel_model):
    with Budget(1.0) as budget:
        result = funnel.run_funnel(funnel_model)
        project = result["project"]
        counts = result["counts"]

        assert counts["initial_codes"] == 40
        assert counts["active_after_outliers"] == 34
        assert counts["labeled_codes"] == 34
        assert counts["removed_by_rating"] == 4
        assert counts["active_after_rating_prune"] == 30
        assert counts["categories_created"] == 10
        assert counts["singletons_removed"] == 4
        assert counts["categories_after_prune"] == 6
        assert counts["dimensions"] == 2

        assert len(project.active_codes()) == 30
        assert sorted(c.topic_id for c in result["removed_codes"]) == [30, 31, 32, 33]
        assert all(c.status == "RATING_REMOVED" for c in result["removed_codes"])
        outliers = [c for c in project.codes if c.status == "OUTLIER_REMOVED"]
        assert sorted(c.topic_id for c in outliers) == [34, 35, 36, 37, 38, 39]

        # a boundary code with average exactly at the threshold survives
        assert average_rating(project, funnel.BOUNDARY_TOPIC) == 2.0
        assert project.code(funnel.BOUNDARY_TOPIC).status == "ACTIVE"

        # every surviving code carries two expert labels and an agreed label
        for code in project.active_codes():
            assert len(code.expert_labels) == 2
            assert code.aggregate_label == f"agreed label {code.topic_id}"

        # one code held by three categories simultaneously
        holders = [
            c.name for c in project.categories
            if funnel.SHARED_TOPIC in c.member_codes
        ]
        assert len(holders) == 3

        core = [c for c in project.categories if c.kind == "CORE"]
        assert sorted(c.category_id for c in core) == list(funnel.CORE_CATEGORIES)
        assert project.category("cat_5").name == "background tooling"

        assert len(project.dimensions) == 2
        for dimension in project.dimensions:
            assert len(dimension.member_categories) == 2
            for category_id in dimension.member_categories:
                assert project.category(category_id).kind == "CORE"

        tables = export_tables(project)
        table2 = tables["table2"]
        assert len(table2) == 30
        shared_row = next(
            r for r in table2 if r["topic_number"] == f"topic_{funnel.SHARED_TOPIC}"
        )
        assert len(shared_row["categories"].split("; ")) == 3
        assert shared_row["label"] == f"agreed label {funnel.SHARED_TOPIC}"

        table3 = tables["table3"]
        assert len(table3) == 6
        assert set(table3[0]) == {"topic_numbers", "category", "aggregate_dimension"}
        with_dimension = [r for r in table3 if r["aggregate_dimension"]]
        assert len(with_dimension) == 4
        dimension_names = {r["aggregate_dimension"] for r in with_dimension}
        assert dimension_names == {name for name, _ in funnel.DIMENSION_PLAN}
        assert all(r["topic_numbers"] for r in table3)
    report(
        "funnel replay: 40 codes -> 6 outliers -> 34 doubly-labeled -> 4 "
        "pruned below rating 2 -> 30 active; 10 categories -> 6 after "
        "singleton pruning; one code in 3 categories; 4 CORE categories in "
        "2 dimensions; exported tables match the expected structure",
        budget,
    )


def test_criterion_9_audit_replay_and_round_trip(funnel_model, tmp_path):
    result = funnel.run_funnel(funnel_model)
    project = result["project"]

    with Budget(1.0) as budget:
        replayed = replay_audit(project.audit_log)
        assert projects_equal(project, replayed)

        path = tmp_path / "funnel_project.json"
        save_project(project, path)
        loaded = load_project(path)
        assert projects_equal(project, loaded)
        assert projects_equal(replayed, loaded)
    report(
        "replaying the audit log reproduces a structurally equal project, "
        "as does a save/load round trip",
        budget,
    )


def test_criterion_10_top_word_prefix_stability(funnel_model, fixture_encoded):
    small_model = run_lda(
        fixture_encoded, LdaParams(num_topics=3, sweeps=10, seed=77, top_n_words=10)
    )

    with Budget(1.0) as budget:
        for model in (funnel_model, small_model):
            for topic in range(model.num_topics):
                ten = top_words(model, topic, 10)
                twelve = top_words(model, topic, 12)
                assert twelve[:10] == ten
                assert len(twelve) == 12
    report(
        "for every topic of both fixture models, top_words(topic, 10) is a "
        "prefix of top_words(topic, 12)",
        budget,
    )
