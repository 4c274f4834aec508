"""Dark-channel transmission prior and boundary-seeded center prior."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter

from cdcp.imaging import LabImage, RgbImage, SaliencyMap, normalize_map
from cdcp.segmentation import RegionSegmentation, kmeans

MIN_LIGHT = 0.05


@dataclass(frozen=True)
class DarkChannelParams:
    patch_radius: int = 7
    light_fraction: float = 0.001

    def __post_init__(self):
        if self.patch_radius < 1:
            raise ValueError(f"patch_radius must be >= 1, got {self.patch_radius}")
        if not 0 < self.light_fraction <= 0.01:
            raise ValueError(f"light_fraction must lie in (0, 0.01], got {self.light_fraction}")

    @property
    def window(self) -> int:
        return 2 * self.patch_radius + 1


def _patch_min(m: np.ndarray, params: DarkChannelParams) -> np.ndarray:
    # edge replication equals clamping the window to the image
    return minimum_filter(m, size=params.window, mode="nearest")


def dark_channel(img: RgbImage, params: DarkChannelParams = DarkChannelParams()) -> np.ndarray:
    return _patch_min(np.asarray(img, dtype=np.float64).min(axis=2), params)


def atmospheric_light(
    img: RgbImage, dark: np.ndarray, params: DarkChannelParams = DarkChannelParams()
) -> np.ndarray:
    """Mean colour of the brightest ``light_fraction`` of dark-channel pixels.

    Ties in the dark channel are broken by pixel brightness, then by raster
    order. Each channel is clamped to at least 0.05.
    """
    flat = img.reshape(-1, 3)
    n = max(1, int(np.floor(flat.shape[0] * params.light_fraction)))
    # lexsort keys run last-primary; stable, so raster order breaks what remains
    order = np.lexsort((-flat.sum(axis=1), -dark.ravel()))
    a = flat[order[:n]].mean(axis=0)
    return np.clip(a, MIN_LIGHT, 1.0)


def transmission_map(
    img: RgbImage,
    a: np.ndarray,
    params: DarkChannelParams = DarkChannelParams(),
    normalize: bool = True,
) -> SaliencyMap:
    """Estimated transmission ``1 - patchmin(min_c I_c / A_c)``.

    Clamped to [0, 1]; min-max normalised unless ``normalize`` is False.
    """
    a = np.asarray(a, dtype=np.float64)
    if np.any(a <= 0):
        raise ValueError(f"atmospheric light must be positive, got {a}")
    ratio = (np.asarray(img, dtype=np.float64) / a).min(axis=2)
    t = np.clip(1.0 - _patch_min(ratio, params), 0.0, 1.0)
    return normalize_map(t) if normalize else t


def dark_channel_prior(img: RgbImage, params: DarkChannelParams = DarkChannelParams()) -> SaliencyMap:
    dark = dark_channel(img, params)
    return transmission_map(img, atmospheric_light(img, dark, params), params)


def border_mask(shape: tuple[int, int], width: int = 1) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    mask[:width, :] = True
    mask[-width:, :] = True
    mask[:, :width] = True
    mask[:, -width:] = True
    return mask


def center_saliency(
    lab: LabImage,
    seg: RegionSegmentation,
    n_clusters: int = 3,
    sigma2: float = 0.4,
    seed: int = 0,
) -> SaliencyMap:
    """Background-contrast map seeded from clustered border pixels.

    Border colours are clustered; each region scores its Lab distance to
    every border cluster, damped by ``exp(-dist / sigma2)`` between the
    region centroid and the cluster's border-pixel centroid, and weighted
    by the cluster's share of border pixels.
    """
    h, w = seg.shape
    mask = border_mask((h, w))
    seeds = lab[mask]
    ys, xs = np.nonzero(mask)
    pos = np.stack([(xs + 0.5) / w, (ys + 0.5) / h], axis=1)

    res = kmeans(seeds, min(n_clusters, len(seeds)), seed=seed)
    used = np.unique(res.labels)
    share = np.array([(res.labels == j).mean() for j in used])
    colors = res.centers[used]
    places = np.stack([pos[res.labels == j].mean(axis=0) for j in used])

    flat = seg.labels.ravel()
    cnt = np.bincount(flat, minlength=seg.k).astype(np.float64)
    mean_lab = np.stack(
        [np.bincount(flat, weights=lab[..., c].ravel(), minlength=seg.k) / cnt for c in range(3)], axis=1
    )
    gy, gx = np.mgrid[0:h, 0:w]
    centroid = np.stack(
        [
            np.bincount(flat, weights=((gx + 0.5) / w).ravel(), minlength=seg.k) / cnt,
            np.bincount(flat, weights=((gy + 0.5) / h).ravel(), minlength=seg.k) / cnt,
        ],
        axis=1,
    )

    color_dist = np.sqrt(((mean_lab[:, None, :] - colors[None, :, :]) ** 2).sum(axis=-1))
    space_dist = np.sqrt(((centroid[:, None, :] - places[None, :, :]) ** 2).sum(axis=-1))
    score = (color_dist * np.exp(-space_dist / sigma2)) @ share
    return seg.paint(normalize_map(score))
