"""CSV exports for per-image metrics, curves, summaries and ablations."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

from cdcp.metrics import EvalReport


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _write(path: str | Path, header: list[str], rows: Iterable[list]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_per_image(path, results) -> Path:
    """One row per image: stem, max-F, adaptive F, MAE, flat-depth flag."""
    return _write(
        path,
        ["stem", "f_max", "f_adaptive", "mae", "flat_depth"],
        (
            [r.stem, _fmt(r.report.f_max), _fmt(r.report.f_adaptive), _fmt(r.report.mae), int(r.flat_depth)]
            for r in results
        ),
    )


def write_curves(path, report: EvalReport) -> Path:
    """256 threshold rows; ``empty`` marks thresholds where nothing is selected."""
    return _write(
        path,
        ["threshold", "precision", "recall", "f_beta", "fpr", "tpr", "empty"],
        (
            [_fmt(t), _fmt(p), _fmt(r), _fmt(f), _fmt(fp), _fmt(tp), int(e)]
            for t, p, r, f, fp, tp, e in zip(
                report.thresholds,
                report.precision,
                report.recall,
                report.f_curve,
                report.fpr,
                report.tpr,
                report.empty,
            )
        ),
    )


def summary_row(method: str, dataset: str, report: EvalReport) -> list:
    return [method, dataset, report.n_images, _fmt(report.mae), _fmt(report.f_max), _fmt(report.f_adaptive)]


SUMMARY_HEADER = ["method", "dataset", "n_images", "mae", "f_beta_max", "f_beta_adaptive"]


def write_summary(path, rows: list[list]) -> Path:
    return _write(path, SUMMARY_HEADER, rows)


ABLATION_HEADER = ["stage", "f_beta_max", "f_beta_adaptive", "mae", "n_images"]


def ablation_rows(rows) -> list[list]:
    return [[r.stage, _fmt(r.f_max), _fmt(r.f_adaptive), _fmt(r.mae), r.n_images] for r in rows]


def write_ablation(path, rows) -> Path:
    return _write(path, ABLATION_HEADER, ablation_rows(rows))


def write_skips(path, skipped: list[tuple[str, str]]) -> Path:
    return _write(path, ["stem", "reason"], ([s, reason] for s, reason in skipped))


def write_regions(path, regions) -> Path:
    """Per-region values behind the initial map."""
    return _write(
        path,
        ["k", "s_c", "s_d", "dw", "w_cd", "s1"],
        ([k, _fmt(sc), _fmt(sd), _fmt(dw), f"{wcd:.6e}", _fmt(s1)] for k, sc, sd, dw, wcd, s1 in regions.rows()),
    )


def format_table(header: list[str], rows: list[list], sep: str = "\t") -> str:
    return "\n".join(sep.join(str(c) for c in row) for row in [header, *rows])
