import cv2
import numpy as np
import pytest

from cdcp.metrics import (
    THRESHOLDS,
    GroundTruthError,
    aggregate,
    evaluate,
    f_measure,
    load_gt,
    mae,
    pr_at_threshold,
    roc_at_threshold,
)
from oracles import counts_loop


def pair(rng, n=8):
    s = rng.random((n, n))
    gt = rng.random((n, n)) < 0.4
    gt[0, 0], gt[0, 1] = True, False
    return s, gt


class TestPrecisionRecall:
    def test_perfect(self):
        gt = np.eye(5, dtype=bool)
        assert pr_at_threshold(gt.astype(float), gt, 0.5) == (1.0, 1.0)

    def test_select_all(self, rng):
        s, gt = pair(rng)
        p, r = pr_at_threshold(s, gt, 0.0)
        assert r == 1.0 and p == gt.sum() / gt.size

    def test_empty_selection(self, rng):
        s, gt = pair(rng)
        assert pr_at_threshold(s, gt, 1.1) == (1.0, 0.0)

    def test_brute_force(self, rng):
        s, gt = pair(rng)
        tp, fp, fn, _ = counts_loop(s, gt, 0.5)
        p, r = pr_at_threshold(s, gt, 0.5)
        assert p == tp / (tp + fp) and r == tp / (tp + fn)

    def test_no_positives(self):
        with pytest.raises(GroundTruthError):
            pr_at_threshold(np.zeros((3, 3)), np.zeros((3, 3), bool), 0.5)

    def test_shape(self):
        with pytest.raises(ValueError):
            pr_at_threshold(np.zeros((3, 3)), np.ones((3, 4), bool), 0.5)


class TestFMeasure:
    def test_equal_pr(self, rng):
        for p in rng.random(100):
            assert abs(f_measure(p, p) - p) < 1e-15
            assert abs(f_measure(p, p, beta2=2.0) - p) < 1e-15

    def test_zero_recall(self):
        assert f_measure(1.0, 0.0) == 0.0
        assert f_measure(0.0, 0.0) == 0.0

    def test_value(self):
        assert abs(f_measure(0.8, 0.6) - 1.3 * 0.48 / 0.84) < 1e-15
        assert abs(f_measure(0.8, 0.6) - 0.7429) < 1e-4

    def test_elementwise(self):
        np.testing.assert_allclose(f_measure(np.array([0.5, 0.0]), np.array([0.5, 0.0])), [0.5, 0.0])


class TestRoc:
    def test_everything(self, rng):
        s, gt = pair(rng)
        assert roc_at_threshold(s, gt, 0.0) == (1.0, 1.0)

    def test_nothing(self, rng):
        s, gt = pair(rng)
        assert roc_at_threshold(s, gt, s.max() + 1e-9) == (0.0, 0.0)

    def test_brute_force(self, rng):
        s, gt = pair(rng)
        tp, fp, fn, tn = counts_loop(s, gt, 0.3)
        assert roc_at_threshold(s, gt, 0.3) == (fp / (fp + tn), tp / (tp + fn))

    def test_all_positive(self):
        with pytest.raises(GroundTruthError):
            roc_at_threshold(np.zeros((3, 3)), np.ones((3, 3), bool), 0.5)


class TestMae:
    def test_identity(self, rng):
        _, gt = pair(rng)
        assert mae(gt.astype(float), gt) == 0.0

    def test_complement(self, rng):
        _, gt = pair(rng)
        assert mae(1.0 - gt, gt) == 1.0

    def test_constant(self, rng):
        _, gt = pair(rng)
        assert mae(np.full(gt.shape, 0.5), gt) == 0.5

    def test_permutation_invariant(self, rng):
        s, gt = pair(rng, 16)
        perm = rng.permutation(256)
        assert abs(mae(s.ravel()[perm], gt.ravel()[perm]) - mae(s, gt)) < 1e-15


class TestEvaluate:
    def test_matches_counting(self, rng):
        s, gt = pair(rng, 32)
        rep = evaluate(s, gt)
        for i in range(0, 256, 17):
            tp, fp, fn, tn = counts_loop(s, gt, THRESHOLDS[i])
            assert rep.precision[i] == (tp / (tp + fp) if tp + fp else 1.0)
            assert rep.recall[i] == tp / (tp + fn)
            assert rep.fpr[i] == fp / (fp + tn)
        np.testing.assert_array_equal(rep.tpr, rep.recall)

    def test_monotone(self, rng):
        for _ in range(10):
            rep = evaluate(*pair(rng, 32))
            assert np.all(np.diff(rep.recall) <= 0)
            assert np.all(np.diff(rep.fpr) <= 0)

    def test_adaptive_threshold_capped(self):
        gt = np.zeros((4, 4), bool)
        gt[:2] = True
        s = np.where(gt, 0.9, 0.8)  # 2 * mean > 1, so only s >= 1 would count
        rep = evaluate(s, gt)
        assert rep.f_adaptive == 0.0

    def test_empty_flag(self):
        gt = np.zeros((4, 4), bool)
        gt[0] = True
        rep = evaluate(np.where(gt, 0.5, 0.0), gt)
        assert not rep.empty[0] and rep.empty[-1]
        assert rep.precision[-1] == 1.0

    def test_curves_have_256_points(self, rng):
        rep = evaluate(*pair(rng))
        assert len(rep.pr) == len(rep.roc) == 256


class TestAggregate:
    def test_single(self, rng):
        rep = evaluate(*pair(rng))
        agg = aggregate([rep])
        np.testing.assert_array_equal(agg.precision, rep.precision)
        assert agg.f_max == rep.f_max and agg.mae == rep.mae

    def test_mean_mae(self):
        gt = np.zeros((10, 10), bool)
        gt[0] = True
        reps = [evaluate(np.abs(gt - 0.1), gt), evaluate(np.abs(gt - 0.3), gt)]
        assert [round(r.mae, 12) for r in reps] == [0.1, 0.3]
        assert abs(aggregate(reps).mae - 0.2) < 1e-12

    def test_brute_force_three(self, rng):
        pairs = [pair(rng, 12) for _ in range(3)]
        agg = aggregate([evaluate(s, g) for s, g in pairs])
        prec = np.zeros(256)
        rec = np.zeros(256)
        for s, g in pairs:
            for i, t in enumerate(THRESHOLDS):
                tp, fp, fn, _ = counts_loop(s, g, t)
                prec[i] += (tp / (tp + fp) if tp + fp else 1.0) / 3
                rec[i] += tp / (tp + fn) / 3
        np.testing.assert_allclose(agg.precision, prec, atol=1e-12)
        np.testing.assert_allclose(agg.recall, rec, atol=1e-12)
        f = max(1.3 * p * r / (0.3 * p + r) if p + r else 0.0 for p, r in zip(prec, rec))
        assert abs(agg.f_max - f) < 1e-12
        assert agg.n_images == 3

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate([])


class TestLoadGt:
    @pytest.mark.parametrize("dtype,low,high", [(np.uint8, 127, 128), (np.uint16, 32767, 32768)])
    def test_half_scale(self, tmp_path, dtype, low, high):
        img = np.array([[0, low, high, np.iinfo(dtype).max]], dtype=dtype)
        cv2.imwrite(str(tmp_path / "gt.png"), img)
        np.testing.assert_array_equal(load_gt(tmp_path / "gt.png"), [[False, False, True, True]])
