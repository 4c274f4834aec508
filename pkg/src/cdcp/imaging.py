"""Image loading, colour conversion and map normalisation.

Images are plain numpy arrays:

* RGB images are ``(H, W, 3)`` float64 arrays with channels in [0, 1].
* Depth maps are ``(H, W)`` float64 arrays in [0, 1], larger = farther.
* Lab images are ``(H, W, 3)`` float64 arrays (L in [0, 100]).
* Saliency maps are ``(H, W)`` float64 arrays in [0, 1].
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

RgbImage = np.ndarray
DepthMap = np.ndarray
LabImage = np.ndarray
SaliencyMap = np.ndarray

MIN_SIDE = 3

# sRGB primaries -> CIE XYZ, D65 white
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_D65_WHITE = np.array([0.95047, 1.0, 1.08883])
_LAB_EPS = (6.0 / 29.0) ** 3
_LAB_KAPPA = 3.0 * (6.0 / 29.0) ** 2


class ImageError(ValueError):
    """Raised when an input raster cannot be used."""


def _read_raster(path: Path) -> np.ndarray:
    if not path.is_file():
        raise ImageError(f"file not found: {path}")
    data = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if data is None:
        raise ImageError(f"cannot decode image: {path}")
    if data.dtype not in (np.uint8, np.uint16):
        raise ImageError(f"unsupported bit depth {data.dtype} in {path}")
    return data


def _full_scale(data: np.ndarray) -> float:
    return float(np.iinfo(data.dtype).max)


def read_rgb(path: str | Path) -> RgbImage:
    path = Path(path)
    data = _read_raster(path)
    scale = _full_scale(data)
    if data.ndim == 2:
        data = np.repeat(data[:, :, None], 3, axis=2)
    elif data.shape[2] == 4:
        data = cv2.cvtColor(data, cv2.COLOR_BGRA2RGB)
    elif data.shape[2] == 3:
        data = cv2.cvtColor(data, cv2.COLOR_BGR2RGB)
    else:
        raise ImageError(f"unsupported channel count {data.shape[2]} in {path}")
    img = data.astype(np.float64) / scale
    check_size(img, path)
    return img


def read_gray(path: str | Path) -> np.ndarray:
    """Read a single-channel raster scaled to [0, 1] by its bit depth.

    Colour files are reduced to their first channel (depth and mask files
    are sometimes stored as 3 identical channels).
    """
    path = Path(path)
    data = _read_raster(path)
    scale = _full_scale(data)
    if data.ndim == 3:
        data = data[:, :, 0]
    img = data.astype(np.float64) / scale
    check_size(img, path)
    return img


def check_size(img: np.ndarray, source: object = "image") -> None:
    h, w = img.shape[:2]
    if h < MIN_SIDE or w < MIN_SIDE:
        raise ImageError(f"{source}: {w}x{h} is smaller than {MIN_SIDE}x{MIN_SIDE}")


def load_rgbd(rgb_path: str | Path, depth_path: str | Path) -> tuple[RgbImage, DepthMap]:
    """Load an RGB image and its depth map, both scaled to [0, 1].

    Depth is divided by the largest value representable at its bit depth
    (255 or 65535), so a 16-bit pixel at 65535 maps to exactly 1.0.
    """
    rgb = read_rgb(rgb_path)
    depth = read_gray(depth_path)
    if rgb.shape[:2] != depth.shape:
        rh, rw = rgb.shape[:2]
        dh, dw = depth.shape
        raise ImageError(
            f"dimension mismatch: rgb {rgb_path} is {rw}x{rh}, depth {depth_path} is {dw}x{dh}"
        )
    return rgb, depth


def rgb_to_lab(img: RgbImage) -> LabImage:
    """Convert sRGB in [0, 1] to CIE L*a*b* under D65."""
    img = np.asarray(img, dtype=np.float64)
    linear = np.where(img <= 0.04045, img / 12.92, ((img + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _SRGB_TO_XYZ.T / _D65_WHITE
    f = np.where(xyz > _LAB_EPS, np.cbrt(xyz), xyz / _LAB_KAPPA + 4.0 / 29.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def normalize_map(m: np.ndarray) -> SaliencyMap:
    """Min-max rescale to [0, 1]; a constant input maps to all zeros."""
    m = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise ValueError("map contains NaN or Inf")
    if m.size == 0:
        return m.copy()
    lo = m.min()
    hi = m.max()
    if hi == lo:
        return np.zeros_like(m)
    out = (m - lo) / (hi - lo)
    # guard against 1 ulp overshoot
    return np.clip(out, 0.0, 1.0)


def to_uint8(m: SaliencyMap) -> np.ndarray:
    return np.round(np.clip(m, 0.0, 1.0) * 255.0).astype(np.uint8)


def save_map(path: str | Path, m: SaliencyMap) -> Path:
    """Write a [0, 1] map as an 8-bit grayscale PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not cv2.imwrite(str(path), to_uint8(m)):
        raise ImageError(f"cannot write {path}")
    return path


def save_rgb(path: str | Path, img: RgbImage) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    bgr = cv2.cvtColor(to_uint8(img), cv2.COLOR_RGB2BGR)
    if not cv2.imwrite(str(path), bgr):
        raise ImageError(f"cannot write {path}")
    return path
