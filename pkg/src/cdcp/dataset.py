"""Discovery of (rgb, depth, ground truth) triples on disk.

Supported layouts:

``subdirs``
    ``RGB/``, ``depth/`` and ``GT/`` directories holding files with matching stems.
``flat-suffix``
    One directory with ``<stem>_rgb.*``, ``<stem>_depth.*`` and ``<stem>_gt.*``.
``manifest``
    A ``manifest.csv`` with ``rgb,depth,gt`` columns (paths relative to the root).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}
LAYOUTS = ("subdirs", "flat-suffix", "manifest")
ROLES = ("rgb", "depth", "gt")
_SUBDIR_NAMES = {"rgb": ("rgb", "image", "images"), "depth": ("depth",), "gt": ("gt", "mask", "masks")}
MANIFEST = "manifest.csv"


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    stem: str
    rgb: Path
    depth: Path
    gt: Path


@dataclass
class DatasetIndex:
    name: str
    samples: list[Sample]
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)


def _images(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def _by_stem(paths, stem_of, role: str) -> dict[str, Path]:
    out: dict[str, Path] = {}
    for p in paths:
        stem = stem_of(p)
        if stem is None:
            continue
        if stem in out:
            raise DatasetError(f"duplicate stem {stem!r} among {role} files: {out[stem].name}, {p.name}")
        out[stem] = p
    return out


def _find_subdir(root: Path, role: str) -> Path | None:
    wanted = _SUBDIR_NAMES[role]
    for child in sorted(root.iterdir()):
        if child.is_dir() and child.name.lower() in wanted:
            return child
    return None


def _subdirs(root: Path) -> dict[str, dict[str, Path]]:
    found = {}
    for role in ROLES:
        d = _find_subdir(root, role)
        if d is None:
            raise DatasetError(f"{root}: no {role} subdirectory (looked for {_SUBDIR_NAMES[role]})")
        found[role] = _by_stem(_images(d), lambda p: p.stem, role)
    return found


def _flat_suffix(root: Path) -> dict[str, dict[str, Path]]:
    files = _images(root)
    found = {}
    for role in ROLES:
        tag = f"_{role}"

        def stem_of(p: Path, tag=tag):
            s = p.stem
            return s[: -len(tag)] if s.lower().endswith(tag) and len(s) > len(tag) else None

        found[role] = _by_stem(files, stem_of, role)
    return found


def _manifest(root: Path) -> dict[str, dict[str, Path]]:
    found: dict[str, dict[str, Path]] = {role: {} for role in ROLES}
    with open(root / MANIFEST, newline="") as fh:
        for row in csv.DictReader(fh):
            stem = Path(row["rgb"]).stem
            for role in ROLES:
                value = (row.get(role) or "").strip()
                if not value:
                    continue
                if stem in found[role]:
                    raise DatasetError(f"duplicate stem {stem!r} in {MANIFEST}")
                path = root / value
                if path.is_file():
                    found[role][stem] = path
    return found


def guess_layout(root: Path) -> str:
    if (root / MANIFEST).is_file():
        return "manifest"
    if all(_find_subdir(root, role) is not None for role in ROLES):
        return "subdirs"
    return "flat-suffix"


def discover_dataset(root: str | Path, layout: str = "auto", name: str | None = None) -> DatasetIndex:
    """Index complete triples under ``root``; incomplete ones go to ``skipped``."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root not found: {root}")
    if layout == "auto":
        layout = guess_layout(root)
    if layout == "subdirs":
        found = _subdirs(root)
    elif layout == "flat-suffix":
        found = _flat_suffix(root)
    elif layout == "manifest":
        found = _manifest(root)
    else:
        raise DatasetError(f"unknown layout {layout!r}; expected one of {LAYOUTS}")

    stems = sorted(set().union(*(found[r].keys() for r in ROLES)))
    samples, skipped = [], []
    for stem in stems:
        missing = [r for r in ROLES if stem not in found[r]]
        if missing:
            skipped.append((stem, "missing " + "+".join(missing)))
        else:
            samples.append(Sample(stem, found["rgb"][stem], found["depth"][stem], found["gt"][stem]))
    if not samples:
        raise DatasetError(f"{root}: no complete rgb/depth/gt triples ({layout} layout)")
    return DatasetIndex(name=name or root.name, samples=samples, skipped=skipped)
