"""Pointwise fusion of the initial map with the depth cue and the priors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cdcp.imaging import DepthMap, SaliencyMap, normalize_map

STAGE_NAMES = ("S_1", "D_dce", "S_cdcp", "S", "S_f")


def _check_same_shape(*maps: np.ndarray) -> None:
    shapes = {np.shape(m) for m in maps}
    if len(shapes) != 1:
        raise ValueError(f"map dimensions differ: {sorted(shapes)}")


def depth_cue_enhancement(depth: DepthMap) -> SaliencyMap:
    """Depth complement, min-max normalised: nearest pixel 1, farthest 0."""
    return normalize_map(1.0 - np.asarray(depth, dtype=np.float64))


def center_dark_channel_prior(s_csp: SaliencyMap, s_dcp: SaliencyMap) -> SaliencyMap:
    _check_same_shape(s_csp, s_dcp)
    return normalize_map(s_csp) * normalize_map(s_dcp)


def fused_saliency(s1, d_dce, s_cdcp, s_csp) -> SaliencyMap:
    """Raw fusion value, bounded by 1 - e^-3."""
    _check_same_shape(s1, d_dce, s_cdcp, s_csp)
    return (1.0 - np.exp(-(s1 + d_dce + s_cdcp))) * s1 * s_csp


def final_saliency_raw(s1, s_csp, s) -> np.ndarray:
    """Raw final value, bounded by 1 - e^-1."""
    _check_same_shape(s1, s_csp, s)
    return 1.0 - np.exp(-(s1 * s_csp * s))


def final_saliency(s1, s_csp, s) -> SaliencyMap:
    return normalize_map(final_saliency_raw(s1, s_csp, s))


@dataclass
class FusionStages:
    s1: SaliencyMap
    d_dce: SaliencyMap
    s_cdcp: SaliencyMap
    s: SaliencyMap  # raw fused value
    s_f: SaliencyMap  # normalised final map
    s_csp: SaliencyMap | None = None
    s_dcp: SaliencyMap | None = None
    s_f_raw: np.ndarray | None = None
    flat_depth: bool = False
    regions: object = None  # per-region values behind s1

    def ablation_maps(self) -> dict[str, SaliencyMap]:
        """One evaluable map per stage, each fusing one more term.

        The depth-cue and prior rows grow the saturating factor of the
        fused map one input at a time; the last two rows are the fused and
        final maps themselves. Every map is min-max normalised.
        """
        return {
            "S_1": self.s1,
            "D_dce": normalize_map((1.0 - np.exp(-(self.s1 + self.d_dce))) * self.s1),
            "S_cdcp": normalize_map((1.0 - np.exp(-(self.s1 + self.d_dce + self.s_cdcp))) * self.s1),
            "S": normalize_map(self.s),
            "S_f": self.s_f,
        }


def fuse(s1: SaliencyMap, depth: DepthMap, s_csp: SaliencyMap, s_dcp: SaliencyMap, flat_depth=False) -> FusionStages:
    _check_same_shape(s1, depth, s_csp, s_dcp)
    d_dce = depth_cue_enhancement(depth)
    s_cdcp = center_dark_channel_prior(s_csp, s_dcp)
    s = fused_saliency(s1, d_dce, s_cdcp, s_csp)
    raw = final_saliency_raw(s1, s_csp, s)
    return FusionStages(
        s1=s1,
        d_dce=d_dce,
        s_cdcp=s_cdcp,
        s=s,
        s_f=normalize_map(raw),
        s_csp=s_csp,
        s_dcp=s_dcp,
        s_f_raw=raw,
        flat_depth=flat_depth,
    )
