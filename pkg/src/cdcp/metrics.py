"""PR / ROC curves, F-measure and MAE against binary ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cdcp.imaging import _read_raster

BETA2 = 0.3
N_LEVELS = 256
THRESHOLDS = np.arange(N_LEVELS) / (N_LEVELS - 1)


class GroundTruthError(ValueError):
    pass


def load_gt(path: str | Path) -> np.ndarray:
    """Binarise an 8- or 16-bit mask at half scale (128 for 8-bit)."""
    data = _read_raster(Path(path))
    if data.ndim == 3:
        data = data[:, :, 0]
    half = (int(np.iinfo(data.dtype).max) + 1) // 2
    return data >= half


def _check(s: np.ndarray, gt: np.ndarray) -> None:
    if s.shape != gt.shape:
        raise ValueError(f"map shape {s.shape} does not match ground truth {gt.shape}")


def _require_positive(gt: np.ndarray) -> int:
    pos = int(np.count_nonzero(gt))
    if pos == 0:
        raise GroundTruthError("ground truth has no salient pixels")
    return pos


def pr_at_threshold(s: np.ndarray, gt: np.ndarray, t: float) -> tuple[float, float]:
    """Precision and recall of ``s >= t``; precision is 1 for an empty selection."""
    gt = np.asarray(gt, dtype=bool)
    _check(s, gt)
    pos = _require_positive(gt)
    sel = s >= t
    n_sel = np.count_nonzero(sel)
    tp = np.count_nonzero(sel & gt)
    precision = tp / n_sel if n_sel else 1.0
    return precision, tp / pos


def roc_at_threshold(s: np.ndarray, gt: np.ndarray, t: float) -> tuple[float, float]:
    gt = np.asarray(gt, dtype=bool)
    _check(s, gt)
    pos = _require_positive(gt)
    neg = gt.size - pos
    if neg == 0:
        raise GroundTruthError("ground truth has no background pixels")
    sel = s >= t
    return np.count_nonzero(sel & ~gt) / neg, np.count_nonzero(sel & gt) / pos


def f_measure(precision, recall, beta2: float = BETA2):
    """Weighted harmonic mean of precision and recall; 0 where undefined.

    Works elementwise on arrays.
    """
    p = np.asarray(precision, dtype=np.float64)
    r = np.asarray(recall, dtype=np.float64)
    num = (1.0 + beta2) * p * r
    den = beta2 * p + r
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return float(f) if f.ndim == 0 else f


def mae(s: np.ndarray, gt: np.ndarray) -> float:
    _check(s, gt)
    return float(np.mean(np.abs(np.asarray(s, dtype=np.float64) - np.asarray(gt, dtype=np.float64))))


@dataclass
class EvalReport:
    precision: np.ndarray
    recall: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    f_max: float
    f_adaptive: float
    mae: float
    empty: np.ndarray = field(default_factory=lambda: np.zeros(N_LEVELS, dtype=bool))
    thresholds: np.ndarray = field(default_factory=lambda: THRESHOLDS.copy())
    n_images: int = 1

    @property
    def f_curve(self) -> np.ndarray:
        return f_measure(self.precision, self.recall)

    @property
    def pr(self) -> list[tuple[float, float]]:
        return list(zip(self.precision.tolist(), self.recall.tolist()))

    @property
    def roc(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def _count_at_least(sorted_values: np.ndarray, t: np.ndarray) -> np.ndarray:
    return len(sorted_values) - np.searchsorted(sorted_values, t, side="left")


def evaluate(s: np.ndarray, gt: np.ndarray, beta2: float = BETA2) -> EvalReport:
    """Sweep the 256 thresholds k/255 and collect every metric."""
    s = np.asarray(s, dtype=np.float64)
    gt = np.asarray(gt, dtype=bool)
    _check(s, gt)
    pos = _require_positive(gt)
    neg = gt.size - pos
    if neg == 0:
        raise GroundTruthError("ground truth has no background pixels")

    n_sel = _count_at_least(np.sort(s, axis=None), THRESHOLDS)
    tp = _count_at_least(np.sort(s[gt]), THRESHOLDS)
    fp = n_sel - tp
    empty = n_sel == 0
    precision = np.where(empty, 1.0, tp / np.maximum(n_sel, 1))
    recall = tp / pos

    t_adapt = min(2.0 * float(s.mean()), 1.0)
    f_adaptive = f_measure(*pr_at_threshold(s, gt, t_adapt), beta2)
    return EvalReport(
        precision=precision,
        recall=recall,
        fpr=fp / neg,
        tpr=recall.copy(),
        f_max=float(np.max(f_measure(precision, recall, beta2))),
        f_adaptive=f_adaptive,
        mae=mae(s, gt),
        empty=empty,
    )


def aggregate(reports: list[EvalReport], beta2: float = BETA2) -> EvalReport:
    """Per-threshold mean curves; max-F is recomputed on the mean PR curve."""
    if not reports:
        raise ValueError("cannot aggregate an empty list of reports")
    precision = np.mean([r.precision for r in reports], axis=0)
    recall = np.mean([r.recall for r in reports], axis=0)
    return EvalReport(
        precision=precision,
        recall=recall,
        fpr=np.mean([r.fpr for r in reports], axis=0),
        tpr=np.mean([r.tpr for r in reports], axis=0),
        f_max=float(np.max(f_measure(precision, recall, beta2))),
        f_adaptive=float(np.mean([r.f_adaptive for r in reports])),
        mae=float(np.mean([r.mae for r in reports])),
        empty=np.all([r.empty for r in reports], axis=0),
        n_images=sum(r.n_images for r in reports),
    )
