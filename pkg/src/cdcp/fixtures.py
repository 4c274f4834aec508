"""Deterministic synthetic RGB-D scenes with known ground truth.

Each scene holds a saturated disk or rectangle, nearer than a hazy
textured background, placed on or off centre. The background carries the
distractors that region contrast alone gets wrong: mid-depth clutter in a
few repeated hues (some patches cut by the frame), a near occluder rising
from the bottom edge, and an object band whose hue also occurs in the
clutter. A second set of haze-free outdoor-like images (sky, vegetation,
shadowed ground) backs the dark channel statistic check.
"""

from __future__ import annotations

import colorsys
from pathlib import Path

import cv2
import numpy as np

from cdcp.dataset import DatasetIndex, discover_dataset
from cdcp.imaging import save_rgb

DEFAULT_SIZE = (240, 180)  # width, height
HAZE_FREE_DIR = "haze_free"
N_HAZE_FREE = 20


def _smooth_noise(rng: np.random.Generator, h: int, w: int, scale: int) -> np.ndarray:
    """Zero-mean, unit-range low-frequency texture."""
    coarse = rng.standard_normal((max(2, h // scale), max(2, w // scale)))
    field = cv2.resize(coarse, (w, h), interpolation=cv2.INTER_CUBIC)
    field -= field.mean()
    return field / (np.abs(field).max() + 1e-12)


def _shape_mask(rng: np.random.Generator, h: int, w: int, centered: bool) -> tuple[np.ndarray, str]:
    ys, xs = np.mgrid[0:h, 0:w]
    offset = 0.0 if centered else 0.16
    cx = w * (0.5 + rng.uniform(-offset, offset))
    cy = h * (0.5 + rng.uniform(-offset, offset) * 0.8)
    if rng.random() < 0.5:
        r = min(h, w) * rng.uniform(0.17, 0.24)
        return (xs + 0.5 - cx) ** 2 + (ys + 0.5 - cy) ** 2 <= r * r, "disk"
    half_w = w * rng.uniform(0.10, 0.16)
    half_h = h * rng.uniform(0.14, 0.22)
    return (np.abs(xs + 0.5 - cx) <= half_w) & (np.abs(ys + 0.5 - cy) <= half_h), "rect"


def render_scene(rng: np.random.Generator, size=DEFAULT_SIZE, centered: bool = True):
    """Return ``(rgb, depth, mask)`` for one synthetic scene."""
    w, h = size
    mask, _ = _shape_mask(rng, h, w, centered)

    # hazy background: bright, low saturation, smooth texture
    gray = rng.uniform(0.62, 0.74)
    tint = rng.uniform(-0.02, 0.02, size=3)
    texture = _smooth_noise(rng, h, w, 24)[..., None] * 0.05
    rgb = gray + tint + texture + rng.normal(0.0, 0.008, size=(h, w, 3))

    # background clutter: small hazy patches in a few repeated hues,
    # scattered over the frame including its border
    ys, xs = np.mgrid[0:h, 0:w]
    keep_out = cv2.dilate(mask.astype(np.uint8), np.ones((15, 15), np.uint8)).astype(bool)
    palette = [np.full(3, rng.uniform(0.2, 0.3))] + [
        np.array(colorsys.hsv_to_rgb(rng.uniform(0, 1), rng.uniform(0.6, 0.9), 0.8))
        for _ in range(int(rng.integers(1, 3)))
    ]
    clutter_depth = np.full((h, w), np.nan)
    for i in range(int(rng.integers(12, 20))):
        cx, cy = rng.uniform(0, w), rng.uniform(0, h)
        if i < 2:
            # first patches straddle the left/right border
            cx = 0.0 if i == 0 else float(w)
        rx, ry = rng.uniform(0.04, 0.09) * w, rng.uniform(0.05, 0.12) * h
        blob = ((xs + 0.5 - cx) / rx) ** 2 + ((ys + 0.5 - cy) / ry) ** 2 <= 1.0
        blob &= ~keep_out
        c = palette[i % len(palette)]
        # the hue shared with the object is only lightly hazed
        mix = rng.uniform(0.8, 0.9) if i % len(palette) == 1 else rng.uniform(0.5, 0.7)
        rgb[blob] = mix * c + (1.0 - mix) * gray + rng.normal(0.0, 0.008, size=(int(blob.sum()), 3))
        # furniture stands between the object and the far wall
        clutter_depth[blob] = rng.uniform(0.45, 0.65)

    # near occluder rising from the bottom edge at one side (chair back, shelf)
    near = np.zeros((h, w), dtype=bool)
    if rng.random() < 0.8:
        half = rng.uniform(0.04, 0.08) * w
        cx = (rng.uniform(0.1, 0.3) if rng.random() < 0.5 else rng.uniform(0.7, 0.9)) * w
        top = h * (1.0 - rng.uniform(0.4, 0.65))
        near = (np.abs(xs + 0.5 - cx) <= half) & (ys + 0.5 >= top)
        near &= ~keep_out
        c = np.array(colorsys.hsv_to_rgb(rng.uniform(0, 1), rng.uniform(0.6, 0.85), rng.uniform(0.5, 0.8)))
        rgb[near] = c + rng.normal(0.0, 0.008, size=(int(near.sum()), 3))

    # salient object: saturated colour, mild shading
    hue = rng.uniform(0.0, 1.0)
    color = np.array(colorsys.hsv_to_rgb(hue, rng.uniform(0.75, 0.9), rng.uniform(0.75, 0.9)))
    shade = 1.0 + _smooth_noise(rng, h, w, 40)[..., None] * 0.06
    obj = color * shade + rng.normal(0.0, 0.008, size=(h, w, 3))
    # secondary band of the object in a hue that also occurs in the clutter
    oy = ys[mask]
    band = mask & (ys >= oy.min() + rng.uniform(0.55, 0.7) * (oy.max() - oy.min()))
    obj[band] = palette[1] + rng.normal(0.0, 0.008, size=(int(band.sum()), 3))
    rgb = np.where(mask[..., None], obj, rgb)
    rgb = np.clip(rgb, 0.0, 1.0)

    # depth: background recedes towards the top, object sits well in front
    ramp = np.linspace(0.95, 0.5, h)[:, None] * np.ones((1, w))
    back = ramp + _smooth_noise(rng, h, w, 30) * 0.02
    level = rng.uniform(0.2, 0.35)
    front = level + _smooth_noise(rng, h, w, 30) * 0.02
    depth = np.where(np.isnan(clutter_depth), back, clutter_depth)
    depth = np.where(mask, front, depth)
    # the occluder is near, but never nearer than the object
    depth = np.where(near, level + rng.uniform(0.06, 0.16), depth)
    depth = np.clip(depth, 0.0, 1.0)
    return rgb, depth, mask


def render_haze_free(rng: np.random.Generator, size=DEFAULT_SIZE) -> np.ndarray:
    """Outdoor-like scene without haze: every patch has a dark channel."""
    w, h = size
    horizon = int(h * rng.uniform(0.3, 0.45))
    ys = np.linspace(0, 1, h)[:, None, None]

    sky = np.array([0.08, 0.25, 0.7]) + np.array([0.04, 0.12, 0.2]) * ys
    grass = np.array([rng.uniform(0.12, 0.25), rng.uniform(0.35, 0.55), rng.uniform(0.04, 0.1)])
    img = np.broadcast_to(sky, (h, w, 3)).copy()
    ground_tex = _smooth_noise(rng, h, w, 12)[..., None]
    ground = grass * (1.0 + 0.35 * ground_tex)
    img[horizon:] = ground[horizon:]

    # a few saturated objects and their shadows
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(int(rng.integers(3, 6))):
        cx, cy = rng.uniform(0, w), rng.uniform(horizon, h)
        r = rng.uniform(0.05, 0.12) * min(h, w)
        blob = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        shadow = (xx - cx - r * 0.6) ** 2 + (yy - cy - r * 0.4) ** 2 <= r * r
        img[shadow & ~blob] *= 0.35
        hue = rng.uniform(0.0, 1.0)
        img[blob] = colorsys.hsv_to_rgb(hue, rng.uniform(0.8, 1.0), rng.uniform(0.6, 0.95))
    img += rng.normal(0.0, 0.01, size=img.shape)
    return np.clip(img, 0.0, 1.0)


def _write_gray(path: Path, values: np.ndarray, bits: int) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    top = (1 << bits) - 1
    dtype = np.uint8 if bits == 8 else np.uint16
    if not cv2.imwrite(str(path), np.round(np.clip(values, 0, 1) * top).astype(dtype)):
        raise OSError(f"cannot write {path}")


def generate_fixtures(out: str | Path, n: int = 10, seed: int = 0, size=DEFAULT_SIZE) -> DatasetIndex:
    """Write ``n`` scenes in the ``subdirs`` layout plus the haze-free set.

    Even-numbered scenes are centred, odd ones are shifted off centre.
    Depth alternates between 8- and 16-bit PNGs.
    """
    out = Path(out)
    for sub in ("RGB", "depth", "GT", HAZE_FREE_DIR):
        (out / sub).mkdir(parents=True, exist_ok=True)
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(n)):
        rng = np.random.default_rng(child)
        rgb, depth, mask = render_scene(rng, size, centered=(i % 2 == 0))
        stem = f"scene_{i:03d}"
        save_rgb(out / "RGB" / f"{stem}.png", rgb)
        _write_gray(out / "depth" / f"{stem}.png", depth, 16 if i % 2 else 8)
        _write_gray(out / "GT" / f"{stem}.png", mask.astype(np.float64), 8)

    haze_seq = np.random.SeedSequence([seed, 1])
    for i, child in enumerate(haze_seq.spawn(N_HAZE_FREE)):
        rng = np.random.default_rng(child)
        save_rgb(out / HAZE_FREE_DIR / f"outdoor_{i:03d}.png", render_haze_free(rng, size))
    return discover_dataset(out, layout="subdirs")


def haze_free_paths(root: str | Path) -> list[Path]:
    return sorted((Path(root) / HAZE_FREE_DIR).glob("*.png"))
