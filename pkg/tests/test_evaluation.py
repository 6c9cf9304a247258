import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilmevents.errors import DatasetError
from nilmevents.evaluation import (
    ConfusionCounts,
    MetricsRow,
    confusion,
    metrics,
    parse_csv,
    published_reference,
    render_csv,
    render_table,
)
from oracles import brute_force_confusion, brute_force_metrics


class TestConfusion:
    def test_enumerated_example(self):
        c = confusion([1, 0, 1, 0], [1, 0, 0, 1])
        assert (c.tp, c.fp, c.fn, c.tn) == (1, 1, 1, 1)

    def test_perfect_predictions(self):
        c = confusion([1, 0, 1], [1, 0, 1])
        assert c.fp == 0 and c.fn == 0

    def test_all_zero_predictions(self):
        truth = [1, 0, 1, 1, 0]
        c = confusion([0] * 5, truth)
        assert c.tp == 0 and c.fn == 3 and c.tn == 2

    def test_length_mismatch(self):
        with pytest.raises(DatasetError):
            confusion([1, 0], [1])

    def test_counts_partition_the_samples(self):
        rng = np.random.default_rng(0)
        preds = rng.integers(0, 2, 500)
        truth = rng.integers(0, 2, 500)
        assert confusion(preds, truth).total == 500


class TestMetrics:
    def test_perfect_detector(self):
        scores = metrics(ConfusionCounts(tp=1, fp=0, fn=0, tn=0))
        assert scores.precision == scores.recall == scores.f_measure == 1.0
        assert scores.undefined == ()

    def test_degenerate_zero_tp(self):
        scores = metrics(ConfusionCounts(tp=0, fp=3, fn=2, tn=5))
        assert scores.precision == scores.recall == scores.f_measure == 0.0
        assert "f_measure" in scores.undefined

    def test_hand_arithmetic(self):
        scores = metrics(ConfusionCounts(tp=3, fp=1, fn=2, tn=0))
        assert scores.precision == pytest.approx(0.75)
        assert scores.recall == pytest.approx(0.6)
        assert scores.f_measure == pytest.approx(2 * 0.45 / 1.35)
        assert scores.f_measure == pytest.approx(0.6667, abs=1e-4)

    def test_no_predictions_no_truth(self):
        scores = metrics(ConfusionCounts(tp=0, fp=0, fn=0, tn=9))
        assert scores.undefined == ("precision", "recall", "f_measure")
        assert scores.f_measure == 0.0

    @given(st.integers(0, 200), st.integers(0, 200), st.integers(0, 200))
    @settings(max_examples=100)
    def test_scores_bounded_and_between_pr_re(self, tp, fp, fn):
        scores = metrics(ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=0))
        for value in (scores.precision, scores.recall, scores.f_measure):
            assert 0.0 <= value <= 1.0
        if scores.precision + scores.recall > 0:
            lo = min(scores.precision, scores.recall)
            hi = max(scores.precision, scores.recall)
            assert lo - 1e-12 <= scores.f_measure <= hi + 1e-12

    @given(st.integers(0, 100), st.integers(0, 100), st.integers(0, 100))
    @settings(max_examples=100)
    def test_f_measure_symmetric_under_fp_fn_swap(self, tp, fp, fn):
        a = metrics(ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=0)).f_measure
        b = metrics(ConfusionCounts(tp=tp, fp=fn, fn=fp, tn=0)).f_measure
        assert a == pytest.approx(b)

    def test_exhaustive_agreement_with_brute_force_up_to_length_8(self):
        # every prediction/truth pair of length 1..8: 87380 cases
        for n in range(1, 9):
            for bits in range(4**n):
                preds = [(bits >> (2 * i)) & 1 for i in range(n)]
                truth = [(bits >> (2 * i + 1)) & 1 for i in range(n)]
                counts = confusion(preds, truth)
                tp, fp, fn, tn = brute_force_confusion(preds, truth)
                assert (counts.tp, counts.fp, counts.fn, counts.tn) == (tp, fp, fn, tn)
                scores = metrics(counts)
                pr, re, fm = brute_force_metrics(tp, fp, fn)
                assert scores.precision == pr
                assert scores.recall == re
                assert scores.f_measure == fm

    def test_invariant_under_joint_permutation(self):
        rng = np.random.default_rng(4)
        preds = rng.integers(0, 2, 100)
        truth = rng.integers(0, 2, 100)
        base = metrics(confusion(preds, truth))
        perm = rng.permutation(100)
        shuffled = metrics(confusion(preds[perm], truth[perm]))
        assert base == shuffled


class TestReport:
    def test_single_cell_table(self):
        rows = [MetricsRow.from_counts("house_x", "REFR", "dnn",
                                       ConfusionCounts(tp=8, fp=2, fn=1, tn=100))]
        table = render_table(rows)
        assert "house_x" in table and "REFR" in table and "dnn" in table

    def test_csv_round_trip(self):
        rows = [
            MetricsRow.from_counts("house_1", "REFR", "dnn",
                                   ConfusionCounts(tp=8, fp=2, fn=1, tn=100)),
            MetricsRow(house="house_1", appliance="REFR", model="gsp_published",
                       f_measure=0.88),
        ]
        text = render_csv(rows)
        back = parse_csv(text)
        assert len(back) == 2
        assert back[0].counts == rows[0].counts
        assert back[0].f_measure == pytest.approx(rows[0].f_measure, abs=1e-6)
        assert back[1].counts is None
        assert back[1].model == "gsp_published"

    def test_published_reference_house1_gsp_row(self):
        rows = published_reference(houses={"house_1"})
        gsp = {r.appliance: r.f_measure for r in rows if r.model == "gsp_published"}
        assert gsp == {"REFR": 0.88, "MW": 0.70, "DW": 0.57, "KO": 0.39, "WD": 0.89}

    def test_published_reference_covers_14_cells_per_model(self):
        rows = published_reference()
        nn = [r for r in rows if r.model == "nn_published"]
        assert len(nn) == 14  # 5 + 4 + 5 appliances over the three houses
        assert {r.house for r in rows} == {"house_1", "house_2", "house_6"}

    def test_empty_report_rejected(self):
        with pytest.raises(DatasetError):
            render_table([])
