import json

import numpy as np
import pytest

from metafidelity import errors
from metafidelity.records import (
    FidelityConfig,
    dump_paired,
    load_paired,
    load_records,
    pair_datasets,
    validate_record,
)


def rec(id, label, probs=None, logits=None):
    raw = {"id": id, "label": label}
    if probs is not None:
        raw["probs"] = probs
    if logits is not None:
        raw["logits"] = logits
    return validate_record(raw)


class TestValidateRecord:
    def test_well_formed(self):
        r = rec("a", 0, probs=[0.6, 0.4])
        assert r.id == "a" and r.label == 0 and r.is_probs
        assert r.scores == (0.6, 0.4)

    def test_not_a_simplex(self):
        with pytest.raises(errors.NotASimplex):
            rec("a", 0, probs=[0.6, 0.5])

    def test_label_out_of_range(self):
        with pytest.raises(errors.LabelOutOfRange):
            rec("a", 2, logits=[2.0, -1.0])

    def test_both_score_kinds(self):
        with pytest.raises(errors.BothScoreKinds):
            validate_record({"id": "a", "label": 0, "probs": [0.5, 0.5], "logits": [0, 0]})

    def test_missing_scores(self):
        with pytest.raises(errors.MissingField):
            validate_record({"id": "a", "label": 0})

    def test_nonfinite(self):
        with pytest.raises(errors.NonFinite):
            rec("a", 0, logits=[float("inf"), 0.0])

    def test_probs_outside_unit_interval(self):
        with pytest.raises(errors.NotASimplex):
            rec("a", 0, probs=[1.4, -0.4])

    def test_too_few_classes(self):
        with pytest.raises(errors.MissingField):
            rec("a", 0, probs=[1.0])

    def test_strict_mode_rejects_unknown_fields(self):
        raw = {"id": "a", "label": 0, "probs": [0.5, 0.5], "split": "test"}
        with pytest.raises(errors.UnknownField):
            validate_record(raw)
        assert validate_record(raw, lenient=True).id == "a"


class TestPairDatasets:
    def test_intersection_and_dropped(self):
        teacher = [rec(i, 0, probs=[0.7, 0.3]) for i in ("a", "b", "c")]
        student = [rec(i, 0, probs=[0.6, 0.4]) for i in ("b", "c", "d")]
        result = pair_datasets(teacher, student)
        assert result.dataset.ids() == ["b", "c"]
        assert result.dropped_teacher_ids == ("a",)
        assert result.dropped_student_ids == ("d",)

    def test_membership_symmetry(self):
        teacher = [rec(i, 0, probs=[0.7, 0.3]) for i in ("a", "b", "c")]
        student = [rec(i, 0, probs=[0.6, 0.4]) for i in ("b", "c", "d")]
        fwd = pair_datasets(teacher, student).dataset.ids()
        rev = pair_datasets(student, teacher).dataset.ids()
        assert fwd == rev

    def test_label_mismatch(self):
        with pytest.raises(errors.LabelMismatch):
            pair_datasets([rec("a", 0, probs=[0.7, 0.3])], [rec("a", 1, probs=[0.6, 0.4])])

    def test_empty_intersection(self):
        with pytest.raises(errors.EmptyIntersection):
            pair_datasets([rec("a", 0, probs=[0.7, 0.3])], [rec("b", 0, probs=[0.6, 0.4])])

    def test_class_count_mismatch(self):
        with pytest.raises(errors.ClassCountMismatch):
            pair_datasets(
                [rec("a", 0, probs=[0.7, 0.3])],
                [rec("a", 0, probs=[0.3, 0.3, 0.4])],
            )

    def test_logits_softmaxed_before_pairing(self):
        result = pair_datasets(
            [rec("a", 0, logits=[0.0, 0.0])], [rec("a", 0, probs=[0.6, 0.4])]
        )
        sample = result.dataset.samples[0]
        assert sample.teacher_probs == pytest.approx((0.5, 0.5), abs=1e-15)


class TestSerialization:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        teacher = [rec(f"s{i}", 0, logits=rng.normal(size=3).tolist()) for i in range(20)]
        student = [rec(f"s{i}", 0, logits=rng.normal(size=3).tolist()) for i in range(20)]
        ds = pair_datasets(teacher, student).dataset
        path = tmp_path / "paired.ndjson"
        dump_paired(ds, path)
        again = load_paired(path)
        assert again == ds  # dataclass equality: every float identical

    def test_load_records_reports_line_numbers(self, tmp_path):
        path = tmp_path / "bad.ndjson"
        path.write_text(
            '{"id":"a","label":0,"probs":[0.5,0.5]}\n'
            '{"id":"b","label":0,"probs":[0.5,0.5]}\n'
            "not json\n"
        )
        with pytest.raises(errors.MissingField) as exc_info:
            load_records(path)
        assert exc_info.value.line == 3

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "dup.ndjson"
        path.write_text(
            '{"id":"a","label":0,"probs":[0.5,0.5]}\n'
            '{"id":"a","label":0,"probs":[0.5,0.5]}\n'
        )
        with pytest.raises(errors.DuplicateId):
            load_records(path)


class TestFidelityConfig:
    def test_defaults(self):
        cfg = FidelityConfig()
        assert (cfg.delta, cfg.tau, cfg.bins, cfg.temperature) == (0.5, 0.9, 10, 1.0)
        assert cfg.prob_floor == 1e-12

    @pytest.mark.parametrize(
        "kwargs, err",
        [
            ({"delta": -0.1}, errors.NegativeDelta),
            ({"tau": 0.5}, errors.OutOfRange),
            ({"tau": 1.1}, errors.OutOfRange),
            ({"bins": 0}, errors.ZeroBins),
            ({"temperature": 0.0}, errors.NonPositiveTemperature),
            ({"prob_floor": 0.0}, errors.OutOfRange),
        ],
    )
    def test_rejects_bad_parameters(self, kwargs, err):
        with pytest.raises(err):
            FidelityConfig(**kwargs)
