"""Matplotlib figures written next to the CSV reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from cdcp.metrics import EvalReport  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "cdcp",
}
# no timestamps, so reruns produce identical bytes
_META = {"Software": None}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, bbox_inches="tight", metadata=_META)
    plt.close(fig)
    return path


def plot_pr(curves: dict[str, EvalReport], path, title: str = "Precision-recall") -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.2, 3.6))
        for label, rep in curves.items():
            ax.plot(rep.recall, rep.precision, lw=1.4, label=f"{label} (F={rep.f_max:.3f})")
        ax.set_xlabel("Recall")
        ax.set_ylabel("Precision")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1.02)
        ax.set_title(title)
        ax.legend(loc="lower left")
        return _save(fig, path)


def plot_roc(curves: dict[str, EvalReport], path, title: str = "ROC") -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.2, 3.6))
        for label, rep in curves.items():
            ax.plot(rep.fpr, rep.tpr, lw=1.4, label=label)
        ax.plot([0, 1], [0, 1], color="0.6", lw=0.8, ls="--")
        ax.set_xlabel("False positive rate")
        ax.set_ylabel("True positive rate")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1.02)
        ax.set_title(title)
        ax.legend(loc="lower right")
        return _save(fig, path)


def plot_ablation(rows, path, title: str = "Stage ablation") -> Path:
    names = [r.stage for r in rows]
    x = np.arange(len(rows))
    with plt.rc_context(RC):
        fig, (ax_f, ax_m) = plt.subplots(1, 2, figsize=(7.0, 3.0))
        ax_f.bar(x, [r.f_max for r in rows], color="tab:blue")
        ax_f.set_ylabel(r"max $F_\beta$")
        ax_m.bar(x, [r.mae for r in rows], color="tab:red")
        ax_m.set_ylabel("MAE")
        for ax in (ax_f, ax_m):
            ax.set_xticks(x, names)
        fig.suptitle(title)
        fig.tight_layout()
        return _save(fig, path)


def plot_stages(rgb, depth, stages, path, gt=None) -> Path:
    """Input, priors and every fusion stage on one sheet."""
    panels = [("RGB", rgb, None), ("depth", depth, "gray")]
    if gt is not None:
        panels.append(("ground truth", gt.astype(float), "gray"))
    panels += [
        ("S_1", stages.s1, "gray"),
        ("S_csp", stages.s_csp, "gray"),
        ("S_dcp", stages.s_dcp, "gray"),
        ("D_dce", stages.d_dce, "gray"),
        ("S_cdcp", stages.s_cdcp, "gray"),
        ("S", stages.s, "gray"),
        ("S_f", stages.s_f, "gray"),
    ]
    cols = 5
    rows = -(-len(panels) // cols)
    with plt.rc_context(RC):
        fig, axes = plt.subplots(rows, cols, figsize=(2.2 * cols, 1.9 * rows))
        for ax in axes.ravel():
            ax.axis("off")
        for ax, (title, img, cmap) in zip(axes.ravel(), panels):
            if cmap:
                ax.imshow(img, cmap=cmap, vmin=0.0, vmax=1.0)
            else:
                ax.imshow(img)
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)
