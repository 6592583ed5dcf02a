import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nocl.errors import MetricError, PredictionFormatError
from nocl.scoring import (
    MetricsReport,
    PredictionRecord,
    accuracy,
    normalize_response,
    parse_link_response,
    read_predictions,
    reports_to_json,
    reports_to_text,
    roc_auc,
    score_preds,
)
from nocl.taskgen import InstructionExample

YES_LINK = "Yes, these two nodes should be connected."
NO_LINK = "Nope, these two nodes have no relation."


def auc_bruteforce(scores, labels):
    """Independent oracle: fraction of (pos, neg) pairs won, ties half credit."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def gold_example(example_id, task="NodeCls", response="A", gold=None):
    return InstructionExample(
        example_id=example_id,
        dataset="ds",
        task=task,
        query="q",
        response=response,
        concept_refs=[],
        split="test",
        gold_label=gold if gold is not None else response,
    )


class TestNormalize:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("  Yes. ", "yes"),
            ("Nope,  these two nodes have no relation.", "nope, these two nodes have no relation"),
            ("", ""),
            ("A  B\tC", "a b c"),
            ("cs.LG", "cs.lg"),
        ],
    )
    def test_examples(self, raw, expected):
        assert normalize_response(raw) == expected


class TestParseLinkResponse:
    def test_canonical_yes(self):
        assert parse_link_response(YES_LINK) == "yes"

    def test_canonical_no(self):
        assert parse_link_response(NO_LINK) == "no"

    @pytest.mark.parametrize("text,verdict", [("maybe", "unknown"), ("", "unknown"),
                                              ("No.", "no"), ("YES!", "yes")])
    def test_fallbacks(self, text, verdict):
        assert parse_link_response(text) == verdict


class TestAccuracy:
    def test_three_of_four(self):
        gold = [gold_example(f"e{i}", response=r) for i, r in enumerate("ABCD")]
        preds = [
            PredictionRecord("e0", "A"),
            PredictionRecord("e1", "B"),
            PredictionRecord("e2", "C"),
            PredictionRecord("e3", "X"),
        ]
        assert accuracy(preds, gold).accuracy == 0.75

    def test_all_empty_unparsed(self):
        gold = [gold_example(f"e{i}") for i in range(3)]
        preds = [PredictionRecord(f"e{i}", "") for i in range(3)]
        report = accuracy(preds, gold)
        assert report.accuracy == 0.0 and report.unparsed == 3

    def test_case_fold_matches(self):
        gold = [gold_example("e0", response="cs.LG")]
        assert accuracy([PredictionRecord("e0", "cs.lg")], gold).accuracy == 1.0

    def test_alias_matches_gold_label(self):
        gold = [gold_example("e0", response="cs.LG")]
        preds = [PredictionRecord("e0", "machine learning")]
        report = accuracy(preds, gold, aliases={"machine learning": "cs.LG"})
        assert report.accuracy == 1.0

    def test_lenient_substring_single_category(self):
        gold = [gold_example("e0", response="cs.LG")]
        preds = [PredictionRecord("e0", "This paper belongs to cs.LG")]
        assert accuracy(preds, gold).accuracy == 0.0
        report = accuracy(preds, gold, lenient_categories=["cs.LG", "cs.CV"])
        assert report.accuracy == 1.0

    def test_lenient_ambiguous_not_counted(self):
        gold = [gold_example("e0", response="cs.LG")]
        preds = [PredictionRecord("e0", "cs.LG or cs.CV")]
        assert accuracy(preds, gold, lenient_categories=["cs.LG", "cs.CV"]).accuracy == 0.0

    def test_unknown_id_rejected(self):
        with pytest.raises(PredictionFormatError, match="ghost"):
            accuracy([PredictionRecord("ghost", "x")], [gold_example("e0")])

    def test_perfect_copy_of_gold(self):
        gold = [gold_example(f"e{i}", response=f"label{i}") for i in range(10)]
        preds = [PredictionRecord(ex.example_id, ex.response) for ex in gold]
        assert accuracy(preds, gold).accuracy == 1.0


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([0.9, 0.1], [1, 0]) == 1.0

    def test_all_ties_is_half(self):
        assert roc_auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]) == 0.5

    def test_hand_computed_three_quarters(self):
        # brute force over 4 pos-neg pairs: 3 wins, 1 loss
        assert roc_auc([0.8, 0.6, 0.4, 0.2], [1, 0, 1, 0]) == 0.75

    def test_single_class_undefined(self):
        with pytest.raises(MetricError):
            roc_auc([0.1, 0.2], [1, 1])

    @given(st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=120, deadline=None)
    def test_matches_bruteforce_oracle(self, seed):
        import random

        rng = random.Random(seed)
        n = rng.randint(2, 200)
        # heavy ties: draw scores from a small value pool half of the time
        pool = [rng.random() for _ in range(rng.randint(1, 6))]
        scores = [
            rng.choice(pool) if rng.random() < 0.5 else rng.random() for _ in range(n)
        ]
        labels = [rng.randint(0, 1) for _ in range(n)]
        if sum(labels) in (0, n):
            labels[0] = 1 - labels[0]
        assert abs(roc_auc(scores, labels) - auc_bruteforce(scores, labels)) < 1e-12

    @given(st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=60, deadline=None)
    def test_monotone_transform_invariance(self, seed):
        import math
        import random

        rng = random.Random(seed)
        n = rng.randint(2, 100)
        scores = [rng.uniform(-5, 5) for _ in range(n)]
        labels = [rng.randint(0, 1) for _ in range(n)]
        if sum(labels) in (0, n):
            labels[0] = 1 - labels[0]
        transformed = [math.exp(0.5 * s) + 3.0 for s in scores]
        assert abs(roc_auc(scores, labels) - roc_auc(transformed, labels)) < 1e-12

    @given(st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=60, deadline=None)
    def test_negation_symmetry_tie_free(self, seed):
        import random

        rng = random.Random(seed)
        n = rng.randint(2, 100)
        scores = rng.sample(range(10 * n), n)  # distinct -> tie-free
        labels = [rng.randint(0, 1) for _ in range(n)]
        if sum(labels) in (0, n):
            labels[0] = 1 - labels[0]
        a = roc_auc([float(s) for s in scores], labels)
        b = roc_auc([-float(s) for s in scores], labels)
        assert abs(a + b - 1.0) < 1e-12


class TestScoreRun:
    def link_gold(self, n=8):
        out = []
        for i in range(n):
            positive = i % 2 == 0
            out.append(
                gold_example(
                    f"L{i}",
                    task="LinkPred",
                    response=YES_LINK if positive else NO_LINK,
                    gold="pos" if positive else "neg",
                )
            )
        return out

    def test_node_run_accuracy_only(self):
        gold = [gold_example(f"e{i}") for i in range(4)]
        preds = [PredictionRecord(ex.example_id, ex.response) for ex in gold]
        (report,) = score_preds(preds, gold)
        assert report.task == "NodeCls"
        assert report.accuracy == 1.0 and report.roc_auc is None

    def test_link_run_with_scores_has_both(self):
        gold = self.link_gold()
        preds = [
            PredictionRecord(ex.example_id, ex.response, score=1.0 if ex.gold_label == "pos" else 0.0)
            for ex in gold
        ]
        (report,) = score_preds(preds, gold)
        assert report.accuracy == 1.0 and report.roc_auc == 1.0

    def test_link_text_fallback_scores(self):
        gold = self.link_gold()
        preds = [PredictionRecord(ex.example_id, ex.response) for ex in gold]
        (report,) = score_preds(preds, gold)
        assert report.roc_auc == 1.0  # yes->1.0, no->0.0 fallback mapping
        assert report.unparsed == 0

    def test_link_unknowns_counted(self):
        gold = self.link_gold(4)
        preds = [PredictionRecord(ex.example_id, "maybe") for ex in gold]
        (report,) = score_preds(preds, gold)
        assert report.unparsed == 4 and report.accuracy == 0.0

    def test_absent_ids_listed(self):
        gold = [gold_example("e0")]
        preds = [PredictionRecord(f"bad{i}", "x") for i in range(15)]
        with pytest.raises(PredictionFormatError, match="bad0") as err:
            score_preds(preds, gold)
        assert "bad9" in str(err.value) and "bad10" not in str(err.value)

    def test_empty_preds_rejected(self):
        with pytest.raises(PredictionFormatError, match="no records"):
            score_preds([], [gold_example("e0")])

    def test_mixed_tasks_two_reports(self):
        gold = [gold_example("n0"), gold_example("c0", task="NodeCount", response="3")]
        preds = [PredictionRecord("n0", "A"), PredictionRecord("c0", "3")]
        reports = score_preds(preds, gold)
        assert [r.task for r in reports] == ["NodeCls", "NodeCount"]

    def test_permutation_null_auc_near_half(self):
        # scores independent of labels over 400 link examples -> AUC ~ 0.5
        import random

        rng = random.Random(12)
        gold = self.link_gold(400)
        preds = [PredictionRecord(ex.example_id, ex.response, score=rng.random()) for ex in gold]
        (report,) = score_preds(preds, gold)
        assert abs(report.roc_auc - 0.5) < 0.1


class TestPredictionIO:
    def test_read_and_validate(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text(
            '# header\n{"example_id": "a", "response_text": "x"}\n'
            '{"example_id": "b", "score": 0.25}\n'
        )
        preds = read_predictions(path)
        assert len(preds) == 2 and preds[1].score == 0.25

    def test_record_without_payload_rejected(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text('{"example_id": "a"}\n')
        with pytest.raises(PredictionFormatError, match=":1"):
            read_predictions(path)

    def test_missing_id_rejected(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text('{"response_text": "x"}\n')
        with pytest.raises(PredictionFormatError, match="example_id"):
            read_predictions(path)


class TestReportRendering:
    def test_text_and_json(self):
        reports = [MetricsReport(task="NodeCls", n=4, accuracy=0.75, unparsed=1)]
        text = reports_to_text(reports)
        assert "NodeCls" in text and "0.7500" in text
        assert '"accuracy": 0.75' in reports_to_json(reports)
