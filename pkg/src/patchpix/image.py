"""Image containers, sRGB to CIELab conversion, and patch access.

Clustering operates in a perceptual space: CIELab for color input, the
lightness channel alone for grayscale input. Conversion uses the D65 white
point and the standard sRGB linearization, so values agree with the usual
reference implementations to well under a tenth of a Lab unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image

from .errors import InputError

# sRGB (linear) -> XYZ for the D65 2-degree observer.
_RGB_TO_XYZ = np.array(
    [
        [0.412453, 0.357580, 0.180423],
        [0.212671, 0.715160, 0.072169],
        [0.019334, 0.119193, 0.950227],
    ]
)
_WHITE_D65 = np.array([0.95047, 1.0, 1.08883])
_EPS = (6.0 / 29.0) ** 3


class PixelPos(NamedTuple):
    """Integer pixel coordinates, x to the right and y downward."""

    x: int
    y: int


@dataclass(frozen=True)
class LabImage:
    """Float image in clustering space: (height, width, channels) float64.

    Color images carry 3 channels (L, a, b); grayscale images carry a single
    lightness channel. The array is kept C-contiguous because the compiled
    kernels index it directly.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise InputError(
                f"expected (H, W, 1) or (H, W, 3) array, got shape {arr.shape}"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"image has empty extent: {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("image contains non-finite values")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def pixel_count(self) -> int:
        return self.data.shape[0] * self.data.shape[1]

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height


@dataclass(frozen=True)
class PatchSpec:
    """Square odd-sided patch geometry."""

    side: int

    def __post_init__(self):
        if self.side < 1 or self.side % 2 == 0:
            raise InputError(f"patch side must be odd and >= 1, got {self.side}")

    @property
    def half(self) -> int:
        return self.side // 2

    @property
    def pixel_count(self) -> int:
        return self.side * self.side


def _srgb_to_linear(v: np.ndarray) -> np.ndarray:
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def _lab_f(t: np.ndarray) -> np.ndarray:
    # cube root above the small-t threshold, linear continuation below it
    return np.where(t > _EPS, np.cbrt(t), t / (3.0 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)


def rgb_to_lab(raster: np.ndarray) -> LabImage:
    """Convert an 8-bit (H, W, 3) sRGB raster to a 3-channel Lab image."""
    raster = np.asarray(raster)
    if raster.ndim != 3 or raster.shape[2] != 3:
        raise InputError(f"expected (H, W, 3) RGB raster, got shape {raster.shape}")
    if raster.dtype != np.uint8:
        raise InputError(f"expected uint8 raster, got dtype {raster.dtype}")
    rgb = raster.astype(np.float64) / 255.0
    xyz = _srgb_to_linear(rgb) @ _RGB_TO_XYZ.T
    fxyz = _lab_f(xyz / _WHITE_D65)
    lab = np.empty_like(fxyz)
    lab[..., 0] = 116.0 * fxyz[..., 1] - 16.0
    lab[..., 1] = 500.0 * (fxyz[..., 0] - fxyz[..., 1])
    lab[..., 2] = 200.0 * (fxyz[..., 1] - fxyz[..., 2])
    return LabImage(lab)


def gray_to_lab(raster: np.ndarray) -> LabImage:
    """Convert an 8-bit (H, W) grayscale raster to a lightness-only image.

    Gray value v maps to L = 100 * v / 255; there is no chroma, so the
    result keeps a single channel.
    """
    raster = np.asarray(raster)
    if raster.ndim != 2:
        raise InputError(f"expected (H, W) grayscale raster, got shape {raster.shape}")
    if raster.dtype != np.uint8:
        raise InputError(f"expected uint8 raster, got dtype {raster.dtype}")
    lightness = raster.astype(np.float64) * (100.0 / 255.0)
    return LabImage(lightness[..., np.newaxis])


def to_lab_image(raster: np.ndarray | LabImage) -> LabImage:
    """Accept a LabImage or an 8-bit gray/RGB raster and return a LabImage."""
    if isinstance(raster, LabImage):
        return raster
    arr = np.asarray(raster)
    if arr.ndim == 2:
        return gray_to_lab(arr)
    if arr.ndim == 3 and arr.shape[2] == 3:
        return rgb_to_lab(arr)
    raise InputError(f"cannot interpret array of shape {arr.shape} as an image")


def pad_replicate(image: LabImage, half: int) -> np.ndarray:
    """Replicate-pad the image data by `half` pixels on each spatial side.

    Patches of pixels near the border are read from this padded array, which
    is exactly the clamp-to-edge rule applied to out-of-bounds coordinates.
    """
    if half < 0:
        raise InputError(f"pad width must be >= 0, got {half}")
    return np.pad(image.data, ((half, half), (half, half), (0, 0)), mode="edge")


def patch_at(image: LabImage, center: tuple[int, int], spec: PatchSpec) -> np.ndarray:
    """Flattened patch vector around `center`, row-major, channels interleaved.

    Out-of-image samples are clamped to the nearest edge pixel. The vector
    length is side * side * channels.
    """
    x, y = center
    if not image.in_bounds(x, y):
        raise InputError(f"patch center ({x}, {y}) outside image")
    h = spec.half
    ys = np.clip(np.arange(y - h, y + h + 1), 0, image.height - 1)
    xs = np.clip(np.arange(x - h, x + h + 1), 0, image.width - 1)
    return image.data[np.ix_(ys, xs)].reshape(-1)


def patch_distance(
    image: LabImage, a: tuple[int, int], b: tuple[int, int], spec: PatchSpec
) -> float:
    """Euclidean distance between patch vectors, scaled by 1 / (side * side)."""
    diff = patch_at(image, a, spec) - patch_at(image, b, spec)
    return float(np.sqrt(np.dot(diff, diff)) / spec.pixel_count)


def load_raster(path: str | Path) -> np.ndarray:
    """Load an 8-bit image file as a uint8 array: (H, W) gray or (H, W, 3) RGB."""
    with Image.open(path) as img:
        mode = img.mode
        if mode in ("1", "LA"):
            img = img.convert("L")
        elif mode in ("P", "RGBA"):
            img = img.convert("RGB")
        elif mode not in ("L", "RGB"):
            raise InputError(f"{path}: unsupported image mode {mode!r}")
        return np.asarray(img, dtype=np.uint8)


def save_raster(path: str | Path, raster: np.ndarray) -> None:
    """Write a uint8 gray or RGB array to PNG/PGM/PPM, chosen by extension."""
    arr = np.asarray(raster)
    if arr.dtype != np.uint8 or arr.ndim not in (2, 3):
        raise InputError(
            f"expected uint8 (H, W) or (H, W, 3) array, got {arr.dtype} {arr.shape}"
        )
    if arr.ndim == 3 and arr.shape[2] != 3:
        raise InputError(f"expected 3 channels, got {arr.shape[2]}")
    Image.fromarray(arr).save(path)
