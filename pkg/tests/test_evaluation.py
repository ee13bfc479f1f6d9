"""Coverage, efficiency, grouped errors, and the confidence sweep."""

import math

import pytest

from cpkit.calibration import calibrate_lac, decode_model, encode_model
from cpkit.core import LabeledExample, ProbabilityVector
from cpkit.errors import (
    EmptyCalibration,
    EmptyInput,
    FewerThanTwoGroups,
    LengthMismatch,
    ValidationError,
)
from cpkit.evaluation import (
    efficiency_report,
    empirical_coverage_intervals,
    empirical_coverage_sets,
    format_threshold_table,
    grouped_standard_error,
    per_class_coverage,
    sweep_thresholds,
)
from cpkit.prediction import (
    PredictionInterval,
    PredictionSet,
    predict_set_lac,
)


def sets_from_masks(masks, class_count=3):
    return [PredictionSet(m, class_count) for m in masks]


class TestEmpiricalCoverage:
    def test_sets_plain_fraction(self):
        sets = sets_from_masks([0b001, 0b010, 0b111, 0b000])
        report = empirical_coverage_sets(sets, [0, 0, 2, 1])
        assert report.coverage == 2 / 4
        assert report.n == 4
        assert report.standard_error is None
        assert report.per_group is None

    def test_intervals_inclusive_bounds(self):
        ivs = [PredictionInterval(0.0, 1.0)] * 3
        report = empirical_coverage_intervals(ivs, [0.0, 1.0, 1.1])
        assert report.coverage == 2 / 3

    def test_lengths_must_match(self):
        with pytest.raises(LengthMismatch):
            empirical_coverage_sets(sets_from_masks([0b1]), [0, 1])
        with pytest.raises(EmptyInput):
            empirical_coverage_sets([], [])

    def test_grouped_reporting(self):
        sets = sets_from_masks([0b001, 0b000, 0b010, 0b010])
        report = empirical_coverage_sets(
            sets, [0, 0, 1, 1], groups=["a", "a", "b", "b"]
        )
        assert report.coverage == 3 / 4
        assert report.group_count == 2
        assert report.per_group == {"a": 0.5, "b": 1.0}
        # stdev([0.5, 1.0], ddof=1) / sqrt(2) = sqrt(0.125 / 2) = 0.25
        assert report.standard_error == pytest.approx(0.25)

    def test_single_group_gives_no_se(self):
        sets = sets_from_masks([0b001, 0b000])
        report = empirical_coverage_sets(sets, [0, 0], groups=["a", "a"])
        assert report.group_count == 1
        assert report.standard_error is None


class TestGroupedStandardError:
    def test_hand_worked(self):
        mean, se, per_group = grouped_standard_error(
            [1.0, 0.0, 1.0, 1.0], ["a", "a", "b", "b"]
        )
        assert mean == 0.75
        assert se == pytest.approx(0.25)
        assert per_group == {"a": 0.5, "b": 1.0}

    def test_unbalanced_groups(self):
        mean, se, per_group = grouped_standard_error(
            [2.0, 4.0, 6.0], ["g1", "g1", "g2"]
        )
        assert mean == 4.0
        assert per_group == {"g1": 3.0, "g2": 6.0}
        assert se == pytest.approx(math.sqrt(4.5) / math.sqrt(2))

    def test_requires_two_groups(self):
        with pytest.raises(FewerThanTwoGroups):
            grouped_standard_error([1.0, 2.0], ["only", "only"])
        with pytest.raises(LengthMismatch):
            grouped_standard_error([1.0], ["a", "b"])
        with pytest.raises(EmptyInput):
            grouped_standard_error([], [])


class TestEfficiencyReport:
    def test_set_metrics(self):
        sets = sets_from_masks([0b000, 0b001, 0b011, 0b111])
        report = efficiency_report(sets)
        assert report.mean_set_size == (0 + 1 + 2 + 3) / 4
        assert report.empty_set_fraction == 1 / 4
        assert report.full_set_fraction == 1 / 4
        assert report.mean_interval_width is None

    def test_class_count_override(self):
        sets = sets_from_masks([0b011, 0b011], class_count=3)
        assert efficiency_report(sets, class_count=2).full_set_fraction == 1.0

    def test_interval_metrics(self):
        ivs = [PredictionInterval(0.0, w) for w in (1.0, 2.0, 3.0)]
        report = efficiency_report(ivs)
        assert report.mean_interval_width == 2.0
        assert report.mean_set_size is None

    def test_grouped_standard_error_on_sizes(self):
        sets = sets_from_masks([0b001, 0b011, 0b111, 0b111])
        report = efficiency_report(sets, groups=["a", "a", "b", "b"])
        # Group means of sizes: a -> 1.5, b -> 3.0.
        assert report.standard_error == pytest.approx(
            math.sqrt(1.125) / math.sqrt(2)
        )

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            efficiency_report([])


class TestPerClassCoverage:
    def test_restriction_and_omission(self):
        sets = sets_from_masks([0b001, 0b010, 0b001, 0b110])
        labels = [0, 1, 1, 1]
        by_class = per_class_coverage(sets, labels, class_count=3)
        assert by_class[0].coverage == 1.0 and by_class[0].n == 1
        assert by_class[1].coverage == 2 / 3 and by_class[1].n == 3
        assert 2 not in by_class  # no instances of class 2


def dyadic_cal(n=64):
    # Hinge scores j/64 for j = 1..n, all exact.
    return [
        LabeledExample(ProbabilityVector((1.0 - j / 64, j / 64)), label=0)
        for j in range(1, n + 1)
    ]


class TestSweepThresholds:
    def test_rows_match_single_level_calibration(self):
        cal = dyadic_cal()
        confidences = (0.7, 0.75, 0.8, 0.85, 0.9, 0.95)
        table = sweep_thresholds(cal, confidences)
        assert table.n_cal == 64
        for row in table.rows:
            single = calibrate_lac(cal, 1.0 - row.confidence)
            assert row.q_hat == single.q_hat
            assert row.p_threshold == single.p_threshold

    def test_sorted_by_descending_confidence(self):
        table = sweep_thresholds(dyadic_cal(), (0.8, 0.95, 0.7))
        assert [r.confidence for r in table.rows] == [0.95, 0.8, 0.7]

    def test_threshold_rises_as_confidence_falls(self):
        # The shape of a published threshold table: top row (highest
        # confidence) has the smallest probability threshold, and the
        # threshold only grows from there down.
        table = sweep_thresholds(dyadic_cal(), (0.95, 0.9, 0.85, 0.8, 0.75, 0.7))
        thresholds = [r.p_threshold for r in table.rows]
        assert thresholds == sorted(thresholds)
        q_hats = [r.q_hat for r in table.rows]
        assert q_hats == sorted(q_hats, reverse=True)

    def test_insufficient_level_gets_sentinels(self):
        cal = dyadic_cal(4)
        table = sweep_thresholds(cal, (0.95, 0.5))
        top = table.rows[0]
        assert top.q_hat == math.inf and top.p_threshold == -math.inf
        assert not math.isinf(table.rows[1].q_hat)

    def test_validation(self):
        with pytest.raises(EmptyCalibration):
            sweep_thresholds([], (0.9,))
        with pytest.raises(EmptyInput):
            sweep_thresholds(dyadic_cal(4), ())
        with pytest.raises(ValidationError):
            sweep_thresholds(dyadic_cal(4), (1.5,))

    def test_tsv_layouts(self):
        table = sweep_thresholds(dyadic_cal(), (0.9, 0.7))
        default = format_threshold_table(table)
        lines = default.strip().split("\n")
        assert lines[0] == "confidence\tqHat"
        assert len(lines) == 3
        full = format_threshold_table(table, full=True)
        assert full.startswith("confidence\tscore_q_hat\tp_threshold")


def test_coverage_consistent_after_artifact_round_trip():
    cal = dyadic_cal()
    model = calibrate_lac(cal, alpha=0.2)
    test = [
        LabeledExample(ProbabilityVector((1.0 - j / 128, j / 128)), label=0)
        for j in range(1, 101)
    ]
    sets_direct = [predict_set_lac(model, ex.probs) for ex in test]
    model_again = decode_model(encode_model(model))
    sets_again = [predict_set_lac(model_again, ex.probs) for ex in test]
    assert sets_direct == sets_again
    labels = [ex.label for ex in test]
    assert (
        empirical_coverage_sets(sets_direct, labels).coverage
        == empirical_coverage_sets(sets_again, labels).coverage
    )
