"""RGB-D salient object detection with center and dark-channel priors."""

from cdcp.imaging import (
    DepthMap,
    RgbImage,
    load_rgbd,
    normalize_map,
    rgb_to_lab,
    save_map,
)
from cdcp.segmentation import RegionSegmentation, RegionTable, kmeans_segment, region_stats
from cdcp.fusion import FusionStages
from cdcp.metrics import EvalReport, evaluate
from cdcp.harness import PipelineConfig, detect_saliency, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "DepthMap",
    "EvalReport",
    "FusionStages",
    "PipelineConfig",
    "RegionSegmentation",
    "RegionTable",
    "RgbImage",
    "detect_saliency",
    "evaluate",
    "kmeans_segment",
    "load_rgbd",
    "normalize_map",
    "region_stats",
    "rgb_to_lab",
    "run_pipeline",
    "save_map",
]
