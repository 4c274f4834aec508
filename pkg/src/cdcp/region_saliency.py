"""Initial region saliency from colour and depth contrast.

Every region is scored by its area- and proximity-weighted contrast to all
other regions, in Lab colour and in depth, then reweighted by how central
and how near it is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cdcp.imaging import SaliencyMap, normalize_map
from cdcp.segmentation import RegionSegmentation, RegionTable

IMAGE_CENTER = np.array([0.5, 0.5])
FLAT_DEPTH_TOL = 1e-9


@dataclass(frozen=True)
class RegionSaliency:
    s_c: np.ndarray
    s_d: np.ndarray
    dw: np.ndarray
    w_cd: np.ndarray
    s1: np.ndarray
    flat_depth: bool = False

    def rows(self):
        for k in range(len(self.s1)):
            yield k, self.s_c[k], self.s_d[k], self.dw[k], self.w_cd[k], self.s1[k]


def _pairwise_dist(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def spatial_weight(table: RegionTable, sigma2: float = 0.4) -> np.ndarray:
    """exp(-d / sigma2) for the centroid distance d of every region pair."""
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    return np.exp(-_pairwise_dist(table.centroid) / sigma2)


def _contrast(features: np.ndarray, area_ratio: np.ndarray, w: np.ndarray) -> np.ndarray:
    d = _pairwise_dist(features)
    if w.shape != d.shape:
        raise ValueError(f"weight matrix {w.shape} does not match {len(area_ratio)} regions")
    # diagonal distance is zero, so the i != k exclusion is automatic
    return (w * d) @ area_ratio


def color_saliency(table: RegionTable, w: np.ndarray) -> np.ndarray:
    return _contrast(table.mean_lab, table.area_ratio, w)


def depth_saliency(table: RegionTable, w: np.ndarray) -> np.ndarray:
    return _contrast(table.mean_depth, table.area_ratio, w)


def depth_weight(table: RegionTable) -> tuple[np.ndarray, bool]:
    """Per-region nearness weight ``(max d - d_k) ** (1 / (max d - min d))``.

    Extremes are taken over region mean depths. When all regions share one
    depth (within ``FLAT_DEPTH_TOL``) the weight is 1 everywhere and the
    returned flag is True.
    """
    d = table.mean_depth
    hi, lo = d.max(), d.min()
    # region means of a constant map can differ in the last bits
    if hi - lo <= FLAT_DEPTH_TOL:
        return np.ones_like(d), True
    mu = 1.0 / (hi - lo)
    return (hi - d) ** mu, False


def center_term(table: RegionTable) -> np.ndarray:
    dist = np.sqrt(((table.centroid - IMAGE_CENTER) ** 2).sum(axis=1))
    return 1.0 - normalize_map(dist)


def center_depth_weight(table: RegionTable, dw: np.ndarray | None = None) -> np.ndarray:
    if dw is None:
        dw, _ = depth_weight(table)
    return center_term(table) / table.pixel_count * dw


def initial_saliency_values(s_c, s_d, w_cd) -> np.ndarray:
    return normalize_map(np.asarray(s_c) * w_cd + np.asarray(s_d) * w_cd)


def initial_saliency(seg: RegionSegmentation, s_c, s_d, w_cd) -> SaliencyMap:
    return seg.paint(initial_saliency_values(s_c, s_d, w_cd))


def compute_region_saliency(table: RegionTable, sigma2: float = 0.4) -> RegionSaliency:
    w = spatial_weight(table, sigma2)
    s_c = color_saliency(table, w)
    s_d = depth_saliency(table, w)
    dw, flat = depth_weight(table)
    w_cd = center_depth_weight(table, dw)
    s1 = initial_saliency_values(s_c, s_d, w_cd)
    return RegionSaliency(s_c=s_c, s_d=s_d, dw=dw, w_cd=w_cd, s1=s1, flat_depth=flat)
