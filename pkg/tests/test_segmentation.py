import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdcp.imaging import rgb_to_lab
from cdcp.segmentation import RegionSegmentation, kmeans, kmeans_segment, region_stats


def brute_stats(labels, lab, depth, k):
    h, w = labels.shape
    acc = {j: [np.zeros(3), 0.0, 0.0, 0.0, 0] for j in range(k)}
    for y in range(h):
        for x in range(w):
            a = acc[labels[y, x]]
            a[0] = a[0] + lab[y, x]
            a[1] += depth[y, x]
            a[2] += (x + 0.5) / w
            a[3] += (y + 0.5) / h
            a[4] += 1
    return acc


def quadrant_image(colors, h=20, w=20):
    img = np.zeros((h, w, 3))
    img[: h // 2, : w // 2] = colors[0]
    img[: h // 2, w // 2 :] = colors[1]
    img[h // 2 :, : w // 2] = colors[2]
    img[h // 2 :, w // 2 :] = colors[3]
    return img


class TestKmeansSegment:
    def test_two_colors_perfect_partition(self):
        img = np.zeros((10, 12, 3))
        img[:, :5] = (0.9, 0.1, 0.1)
        img[:, 5:] = (0.1, 0.2, 0.8)
        seg = kmeans_segment(rgb_to_lab(img), 2, seed=0)
        assert seg.k == 2
        left, right = seg.labels[:, :5], seg.labels[:, 5:]
        assert len(np.unique(left)) == 1 and len(np.unique(right)) == 1
        assert left[0, 0] != right[0, 0]

    def test_four_quadrants(self):
        img = quadrant_image([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0)])
        lab = rgb_to_lab(img)
        seg = kmeans_segment(lab, 4, seed=3)
        table = region_stats(seg, lab, np.zeros((20, 20)))
        np.testing.assert_array_equal(table.area_ratio, [0.25] * 4)
        # exhaustive check: each quadrant is one label, all labels distinct
        quads = [seg.labels[:10, :10], seg.labels[:10, 10:], seg.labels[10:, :10], seg.labels[10:, 10:]]
        firsts = [q[0, 0] for q in quads]
        assert all((q == f).all() for q, f in zip(quads, firsts))
        assert len(set(firsts)) == 4

    def test_deterministic(self, rng):
        lab = rgb_to_lab(rng.random((30, 40, 3)))
        a = kmeans_segment(lab, 8, seed=7)
        b = kmeans_segment(lab, 8, seed=7)
        np.testing.assert_array_equal(a.labels, b.labels)

    @pytest.mark.parametrize("k", [1, 0, 10 * 10 + 1])
    def test_k_out_of_range(self, k):
        with pytest.raises(ValueError):
            kmeans_segment(np.zeros((10, 10, 3)), k)

    def test_fewer_colors_than_k(self):
        img = np.zeros((6, 6, 3))
        img[:3] = 1.0
        seg = kmeans_segment(rgb_to_lab(img), 8)
        assert seg.k == 2
        assert set(np.unique(seg.labels)) == {0, 1}

    def test_every_region_nonempty(self, rng):
        lab = rgb_to_lab(rng.random((25, 25, 3)))
        seg = kmeans_segment(lab, 10, seed=1)
        assert np.all(np.bincount(seg.labels.ravel(), minlength=seg.k) > 0)
        assert seg.labels.min() == 0 and seg.labels.max() == seg.k - 1

    def test_pixels_nearest_to_own_region_mean(self, rng):
        # at convergence every pixel sits closest to the mean of its own region
        palette = rng.random((12, 3)) * 100
        lab = palette[rng.integers(0, 12, size=400)].reshape(20, 20, 3)
        seg = kmeans_segment(lab, 4, seed=2)
        table = region_stats(seg, lab, np.zeros((20, 20)))
        d = ((lab.reshape(-1, 1, 3) - table.mean_lab[None]) ** 2).sum(-1)
        own = d[np.arange(400), seg.labels.ravel()]
        assert np.all(own <= d.min(axis=1) + 1e-6)


class TestKmeansObjective:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 9))
    def test_objective_non_increasing(self, seed, k):
        pts = np.random.default_rng(seed).random((200, 3)) * 50
        res = kmeans(pts, k, seed=seed, tol=0.0)
        obj = np.array(res.objective)
        assert np.all(np.diff(obj) <= 1e-9 * obj[0])

    def test_stops_on_small_shift(self):
        pts = np.concatenate([np.zeros((10, 3)), np.ones((10, 3)) * 50])
        res = kmeans(pts, 2, seed=0)
        assert res.n_iter <= 3

    def test_max_iter(self, rng):
        res = kmeans(rng.random((300, 3)), 8, seed=0, tol=0.0, max_iter=5)
        assert res.n_iter == 5


class TestRegionStats:
    def test_single_region(self):
        seg = RegionSegmentation(np.zeros((7, 9), dtype=int), 1)
        t = region_stats(seg, np.zeros((7, 9, 3)), np.zeros((7, 9)))
        np.testing.assert_allclose(t.centroid[0], (0.5, 0.5), atol=0.5 / 7)
        assert t.area_ratio[0] == 1.0

    def test_two_halves(self):
        labels = np.zeros((6, 8), dtype=int)
        labels[:, 4:] = 1
        t = region_stats(RegionSegmentation(labels, 2), np.zeros((6, 8, 3)), np.zeros((6, 8)))
        np.testing.assert_array_equal(t.area_ratio, [0.5, 0.5])
        np.testing.assert_allclose(t.centroid[:, 0], [0.25, 0.75])

    @pytest.mark.parametrize("shape", [(8, 8), (16, 16), (5, 13)])
    def test_matches_brute_force(self, rng, shape):
        k = 5
        labels = rng.permutation(np.arange(shape[0] * shape[1]) % k).reshape(shape)
        lab = rng.random(shape + (3,)) * 100
        depth = rng.random(shape)
        t = region_stats(RegionSegmentation(labels, k), lab, depth)
        oracle = brute_stats(labels, lab, depth, k)
        n = shape[0] * shape[1]
        for j in range(k):
            s_lab, s_d, s_x, s_y, c = oracle[j]
            assert t.pixel_count[j] == c
            np.testing.assert_allclose(t.mean_lab[j], s_lab / c, atol=1e-9, rtol=0)
            assert abs(t.mean_depth[j] - s_d / c) < 1e-9
            np.testing.assert_allclose(t.centroid[j], (s_x / c, s_y / c), atol=1e-9, rtol=0)
            assert abs(t.area_ratio[j] - c / n) < 1e-12
        assert abs(t.area_ratio.sum() - 1.0) < 1e-9
        assert t.pixel_count.sum() == n
        assert np.all((t.centroid >= 0) & (t.centroid <= 1))

    def test_shape_mismatch(self):
        seg = RegionSegmentation(np.zeros((4, 4), dtype=int), 1)
        with pytest.raises(ValueError):
            region_stats(seg, np.zeros((4, 5, 3)), np.zeros((4, 4)))
