import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdcp.fusion import (
    STAGE_NAMES,
    center_dark_channel_prior,
    depth_cue_enhancement,
    final_saliency,
    final_saliency_raw,
    fuse,
    fused_saliency,
)
from oracles import fusion_loop

unit = st.floats(0.0, 1.0)


def px(*values):
    return [np.array([[v]], dtype=float) for v in values]


class TestDepthCue:
    def test_extremes(self, rng):
        depth = rng.random((6, 6))
        d = depth_cue_enhancement(depth)
        assert d.flat[np.argmin(depth)] == 1.0 and d.flat[np.argmax(depth)] == 0.0

    def test_constant(self):
        np.testing.assert_array_equal(depth_cue_enhancement(np.full((4, 4), 0.3)), 0.0)

    def test_ramp(self):
        ramp = np.tile(np.linspace(0.2, 0.9, 8), (3, 1))
        np.testing.assert_allclose(depth_cue_enhancement(ramp), np.tile(np.linspace(1, 0, 8), (3, 1)), atol=1e-12)


class TestPriorProduct:
    def test_zero_center(self):
        csp = np.array([[0.0, 0.5, 1.0]])
        assert center_dark_channel_prior(csp, np.array([[0.9, 0.2, 0.4]]))[0, 0] == 0.0

    def test_joint_max(self):
        assert center_dark_channel_prior(np.array([[0.0, 1.0]]), np.array([[0.0, 1.0]]))[0, 1] == 1.0

    def test_product(self):
        csp = np.array([[0.0, 0.6, 1.0]])
        dcp = np.array([[0.0, 0.5, 1.0]])
        assert abs(center_dark_channel_prior(csp, dcp)[0, 1] - 0.30) < 1e-15

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            center_dark_channel_prior(np.zeros((3, 3)), np.zeros((3, 4)))


class TestFused:
    def test_zero(self):
        assert fused_saliency(*px(0, 0, 0, 0))[0, 0] == 0.0

    def test_all_ones(self):
        v = fused_saliency(*px(1, 1, 1, 1))[0, 0]
        assert abs(v - (1 - math.exp(-3))) < 1e-15 and abs(v - 0.9502) < 1e-4

    def test_half(self):
        v = fused_saliency(*px(0.5, 0.5, 0, 1))[0, 0]
        assert abs(v - 0.3161) < 1e-4


class TestFinal:
    @pytest.mark.parametrize("zero", range(3))
    def test_zero_factor(self, zero):
        vals = [0.7, 0.7, 0.7]
        vals[zero] = 0.0
        assert final_saliency_raw(*px(*vals))[0, 0] == 0.0

    def test_all_ones(self):
        assert abs(final_saliency_raw(*px(1, 1, 1))[0, 0] - 0.6321) < 1e-4

    def test_mixed(self):
        assert abs(final_saliency_raw(*px(0.8, 0.9, 0.5))[0, 0] - 0.3023) < 1e-4

    def test_normalized(self, rng):
        s = final_saliency(rng.random((5, 5)), rng.random((5, 5)), rng.random((5, 5)))
        assert s.min() == 0.0 and s.max() == 1.0


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(unit, unit, unit, unit, unit, st.integers(0, 3))
    def test_fused_monotone(self, a, b, c, d, bump, which):
        base = [a, b, c, d]
        up = list(base)
        up[which] = min(1.0, up[which] + bump)
        assert fused_saliency(*px(*up))[0, 0] >= fused_saliency(*px(*base))[0, 0]

    @settings(max_examples=200, deadline=None)
    @given(unit, unit, unit, unit, st.integers(0, 2))
    def test_final_monotone(self, a, b, c, bump, which):
        base = [a, b, c]
        up = list(base)
        up[which] = min(1.0, up[which] + bump)
        assert final_saliency_raw(*px(*up))[0, 0] >= final_saliency_raw(*px(*base))[0, 0]

    def test_bounds(self, rng):
        for _ in range(50):
            s1, d, cdcp, csp = rng.random((4, 8, 8))
            s = fused_saliency(s1, d, cdcp, csp)
            assert np.all((s >= 0) & (s <= 1 - math.exp(-3)))
            f = final_saliency_raw(s1, csp, s)
            assert np.all((f >= 0) & (f <= 1 - math.exp(-1)))

    def test_pixel_permutation(self, rng):
        maps = rng.random((4, 6, 7))
        perm = rng.permutation(42)
        a = fuse(*maps)
        b = fuse(*(m.ravel()[perm].reshape(6, 7) for m in maps))
        for name in ("d_dce", "s_cdcp", "s", "s_f"):
            np.testing.assert_array_equal(getattr(b, name).ravel(), getattr(a, name).ravel()[perm])

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_pixel_loop(self, seed):
        s1, depth, csp, dcp = np.random.default_rng(seed).random((4, 8, 8))
        got = fuse(s1, depth, csp, dcp)
        for name, want in zip(("d_dce", "s_cdcp", "s", "s_f_raw", "s_f"), fusion_loop(s1, depth, csp, dcp)):
            np.testing.assert_allclose(getattr(got, name).ravel(), want, rtol=0, atol=1e-12, err_msg=name)


class TestAblationMaps:
    def test_stage_order_and_range(self, rng):
        st_ = fuse(*rng.random((4, 10, 10)))
        maps = st_.ablation_maps()
        assert tuple(maps) == STAGE_NAMES
        for m in maps.values():
            assert m.min() >= 0.0 and m.max() <= 1.0
        np.testing.assert_array_equal(maps["S_1"], st_.s1)
        np.testing.assert_array_equal(maps["S_f"], st_.s_f)
