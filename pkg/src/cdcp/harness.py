"""Per-image pipeline, batch runs and the stage ablation."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cdcp.config import PipelineConfig
from cdcp.dataset import DatasetIndex, Sample
from cdcp.fusion import STAGE_NAMES, FusionStages, fuse
from cdcp.imaging import DepthMap, RgbImage, load_rgbd, rgb_to_lab, save_map, to_uint8
from cdcp.metrics import EvalReport, aggregate, evaluate, load_gt
from cdcp.priors import DarkChannelParams, center_saliency, dark_channel_prior
from cdcp.region_saliency import compute_region_saliency
from cdcp.segmentation import kmeans_segment, region_stats

log = logging.getLogger(__name__)

TIMED_STAGES = ("lab", "segment", "region_saliency", "center_prior", "dark_channel_prior", "fusion")


class PipelineError(RuntimeError):
    def __init__(self, stem: str, cause: Exception):
        super().__init__(f"{stem}: {type(cause).__name__}: {cause}")
        self.stem = stem


@contextmanager
def _timer(timings: dict | None, name: str):
    start = time.perf_counter()
    yield
    if timings is not None:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start


def detect_saliency(
    rgb: RgbImage, depth: DepthMap, config: PipelineConfig = PipelineConfig(), timings: dict | None = None
) -> FusionStages:
    """Run the full detector on one RGB-D pair and return every stage map."""
    if config.depth_inverted:
        depth = 1.0 - depth
    with _timer(timings, "lab"):
        lab = rgb_to_lab(rgb)
    with _timer(timings, "segment"):
        seg = kmeans_segment(lab, config.k, seed=config.seed)
    with _timer(timings, "region_saliency"):
        table = region_stats(seg, lab, depth)
        regions = compute_region_saliency(table, config.sigma2)
        s1 = seg.paint(regions.s1)
    with _timer(timings, "center_prior"):
        s_csp = center_saliency(lab, seg, config.boundary_clusters, config.sigma2, config.seed)
    with _timer(timings, "dark_channel_prior"):
        params = DarkChannelParams(config.patch_radius, config.light_fraction)
        s_dcp = dark_channel_prior(rgb, params)
    with _timer(timings, "fusion"):
        stages = fuse(s1, depth, s_csp, s_dcp, flat_depth=regions.flat_depth)
    stages.regions = regions
    return stages


def quantize(m: np.ndarray) -> np.ndarray:
    """The map exactly as it reads back from its 8-bit PNG."""
    return to_uint8(m) / 255.0


@dataclass
class SampleResult:
    stem: str
    report: EvalReport
    flat_depth: bool
    stage_reports: dict[str, EvalReport] = field(default_factory=dict)
    timings: dict = field(default_factory=dict)


def run_pipeline(
    sample: Sample,
    config: PipelineConfig = PipelineConfig(),
    out_dir: str | Path | None = None,
    timings: dict | None = None,
) -> tuple[FusionStages, EvalReport]:
    """Detect, write ``<out_dir>/<stem>.png`` and score the written map."""
    try:
        rgb, depth = load_rgbd(sample.rgb, sample.depth)
        gt = load_gt(sample.gt)
        stages = detect_saliency(rgb, depth, config, timings)
        if out_dir is not None:
            save_map(Path(out_dir) / f"{sample.stem}.png", stages.s_f)
        report = evaluate(quantize(stages.s_f), gt)
    except Exception as exc:
        raise PipelineError(sample.stem, exc) from exc
    return stages, report


def _process_one(args) -> SampleResult | tuple[str, str]:
    sample, config, out_dir, ablation, stage_dir = args
    timings: dict = {}
    try:
        stages, report = run_pipeline(sample, config, out_dir, timings)
        result = SampleResult(sample.stem, report, stages.flat_depth, timings=timings)
        if ablation:
            gt = load_gt(sample.gt)
            for name, m in stages.ablation_maps().items():
                if stage_dir is not None:
                    save_map(Path(stage_dir) / name / f"{sample.stem}.png", m)
                result.stage_reports[name] = evaluate(quantize(m), gt)
    except Exception as exc:
        log.warning("skipping %s", exc)
        return sample.stem, str(exc)
    return result


def process_dataset(
    index: DatasetIndex,
    config: PipelineConfig = PipelineConfig(),
    out_dir: str | Path | None = None,
    jobs: int = 1,
    ablation: bool = False,
    stage_dir: str | Path | None = None,
) -> tuple[list[SampleResult], list[tuple[str, str]]]:
    """Run every sample; returns stem-sorted results and the skip list.

    Skips include both incomplete triples from discovery and samples whose
    pipeline raised, so ``len(results) + len(skipped)`` covers every stem.
    """
    work = [(s, config, out_dir, ablation, stage_dir) for s in index.samples]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_process_one, work))
    else:
        outcomes = [_process_one(w) for w in work]
    results = sorted((o for o in outcomes if isinstance(o, SampleResult)), key=lambda r: r.stem)
    failed = [o for o in outcomes if not isinstance(o, SampleResult)]
    skipped = sorted(list(index.skipped) + failed)
    return results, skipped


@dataclass
class AblationRow:
    stage: str
    f_max: float
    f_adaptive: float
    mae: float
    n_images: int


def run_ablation(
    index: DatasetIndex,
    config: PipelineConfig = PipelineConfig(),
    out_dir: str | Path | None = None,
    jobs: int = 1,
) -> tuple[list[AblationRow], list[SampleResult], list[tuple[str, str]]]:
    """Score each fusion stage as a saliency map, aggregated over the dataset."""
    maps_dir = None if out_dir is None else Path(out_dir) / "maps"
    stage_dir = None if out_dir is None else Path(out_dir) / "stages"
    results, skipped = process_dataset(index, config, maps_dir, jobs, ablation=True, stage_dir=stage_dir)
    rows = []
    for name in STAGE_NAMES:
        if not results:
            break
        agg = aggregate([r.stage_reports[name] for r in results])
        rows.append(AblationRow(name, agg.f_max, agg.f_adaptive, agg.mae, agg.n_images))
    return rows, results, skipped


def bench(rgb: RgbImage, depth: DepthMap, config: PipelineConfig = PipelineConfig(), repeat: int = 3) -> dict:
    """Best-of-``repeat`` wall-clock seconds per pipeline stage, plus ``total``."""
    best: dict[str, float] = {}
    for _ in range(repeat):
        timings: dict = {}
        start = time.perf_counter()
        detect_saliency(rgb, depth, config, timings)
        timings["total"] = time.perf_counter() - start
        for name, value in timings.items():
            best[name] = min(best.get(name, np.inf), value)
    return best
