"""K-means colour segmentation in Lab space and per-region statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cdcp.imaging import DepthMap, LabImage


@dataclass(frozen=True)
class RegionSegmentation:
    labels: np.ndarray  # (H, W) int, every index in [0, k) owns >= 1 pixel
    k: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def paint(self, values: np.ndarray) -> np.ndarray:
        """Broadcast one value per region onto that region's pixels."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.k,):
            raise ValueError(f"expected {self.k} region values, got shape {values.shape}")
        return values[self.labels]


@dataclass(frozen=True)
class RegionTable:
    mean_lab: np.ndarray  # (K, 3)
    mean_depth: np.ndarray  # (K,)
    centroid: np.ndarray  # (K, 2) as (x, y) in [0, 1]
    pixel_count: np.ndarray  # (K,) int
    area_ratio: np.ndarray  # (K,)

    @property
    def k(self) -> int:
        return len(self.pixel_count)


@dataclass
class KMeansResult:
    centers: np.ndarray
    labels: np.ndarray
    n_iter: int
    objective: list[float] = field(default_factory=list)


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = (
        np.einsum("ij,ij->i", points, points)[:, None]
        - 2.0 * points @ centers.T
        + np.einsum("ij,ij->i", centers, centers)[None, :]
    )
    return np.maximum(d, 0.0)


def _kmeanspp(points, weights, k, rng):
    n = len(points)
    first = rng.choice(n, p=weights / weights.sum())
    chosen = [first]
    closest = _sq_dists(points, points[[first]])[:, 0]
    for _ in range(1, k):
        p = weights * closest
        total = p.sum()
        if total <= 0.0:
            # fewer distinct points than clusters
            break
        idx = rng.choice(n, p=p / total)
        chosen.append(idx)
        closest = np.minimum(closest, _sq_dists(points, points[[idx]])[:, 0])
    return points[chosen].copy()


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    weights: np.ndarray | None = None,
    tol: float = 1e-4,
    max_iter: int = 100,
) -> KMeansResult:
    """Weighted Lloyd k-means with k-means++ seeding.

    Stops once no centre moves by ``tol`` or more, or after ``max_iter``
    iterations. A cluster that empties out is re-seeded at the point
    farthest from its assigned centre. May return fewer than ``k`` centres
    when the input has fewer distinct points.
    """
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    rng = np.random.default_rng(seed)
    centers = _kmeanspp(points, w, k, rng)
    kk = len(centers)

    objective: list[float] = []
    labels = np.zeros(n, dtype=np.intp)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d = _sq_dists(points, centers)
        labels = np.argmin(d, axis=1)
        best = d[np.arange(n), labels]
        objective.append(float(np.dot(w, best)))

        mass = np.bincount(labels, weights=w, minlength=kk)
        sums = np.stack(
            [np.bincount(labels, weights=w * points[:, c], minlength=kk) for c in range(points.shape[1])],
            axis=1,
        )
        new = centers.copy()
        full = mass > 0
        new[full] = sums[full] / mass[full, None]
        if not full.all():
            order = np.argsort(-best, kind="stable")
            for j, idx in zip(np.flatnonzero(~full), order):
                new[j] = points[idx]
        shift = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        if shift < tol:
            break

    d = _sq_dists(points, centers)
    labels = np.argmin(d, axis=1)
    return KMeansResult(centers=centers, labels=labels, n_iter=n_iter, objective=objective)


def _compact(labels: np.ndarray) -> tuple[np.ndarray, int]:
    used, remap = np.unique(labels, return_inverse=True)
    return remap.reshape(labels.shape), len(used)


def kmeans_segment(
    img: LabImage, k: int = 8, seed: int = 0, tol: float = 1e-4, max_iter: int = 100
) -> RegionSegmentation:
    """Partition pixels into at most ``k`` regions by Lab colour.

    Clustering runs over distinct colours weighted by their pixel counts,
    which gives the same assignments as clustering every pixel. The
    returned ``k`` is smaller than requested when the image has fewer
    distinct colours.
    """
    h, w = img.shape[:2]
    n = h * w
    if not 2 <= k <= n:
        raise ValueError(f"K must lie in [2, {n}], got {k}")
    pts = np.ascontiguousarray(img.reshape(n, 3), dtype=np.float64)
    colors, inverse, counts = _unique_rows(pts)
    res = kmeans(colors, k, seed=seed, weights=counts, tol=tol, max_iter=max_iter)
    labels, kk = _compact(res.labels[inverse])
    return RegionSegmentation(labels=labels.reshape(h, w), k=kk)


def _unique_rows(pts: np.ndarray):
    # byte view makes np.unique a 1-D sort
    view = pts.view(np.dtype((np.void, pts.dtype.itemsize * pts.shape[1]))).ravel()
    _, first, inverse, counts = np.unique(view, return_index=True, return_inverse=True, return_counts=True)
    return pts[first], inverse.ravel(), counts.astype(np.float64)


def region_stats(seg: RegionSegmentation, lab: LabImage, depth: DepthMap) -> RegionTable:
    labels = seg.labels
    if labels.shape != lab.shape[:2] or labels.shape != depth.shape:
        raise ValueError(
            f"shape mismatch: labels {labels.shape}, lab {lab.shape[:2]}, depth {depth.shape}"
        )
    h, w = labels.shape
    flat = labels.ravel()
    k = seg.k
    count = np.bincount(flat, minlength=k)
    if len(count) != k or np.any(count == 0):
        raise ValueError("segmentation has empty or out-of-range regions")
    cnt = count.astype(np.float64)

    mean_lab = np.stack(
        [np.bincount(flat, weights=lab[..., c].ravel(), minlength=k) / cnt for c in range(3)], axis=1
    )
    mean_depth = np.bincount(flat, weights=depth.ravel(), minlength=k) / cnt
    ys, xs = np.mgrid[0:h, 0:w]
    cx = np.bincount(flat, weights=(xs.ravel() + 0.5) / w, minlength=k) / cnt
    cy = np.bincount(flat, weights=(ys.ravel() + 0.5) / h, minlength=k) / cnt
    return RegionTable(
        mean_lab=mean_lab,
        mean_depth=mean_depth,
        centroid=np.stack([cx, cy], axis=1),
        pixel_count=count,
        area_ratio=cnt / (h * w),
    )
