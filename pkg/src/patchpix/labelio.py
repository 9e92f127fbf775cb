"""Label-map file formats and boundary overlays.

Two formats, chosen by extension: 16-bit grayscale PNG (.png) for up to
65536 labels, and a CSV fallback (.csv) for anything larger. The CSV variant
is `width,height` on the first line, then one image row of comma-separated
labels per line. Ground-truth files use the same formats.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InputError
from .metrics import GroundTruth

_PNG_MAX_LABEL = 65535


def _checked_labels(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise InputError(f"label map must be 2-D, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        raise InputError(f"label map must be integer, got dtype {labels.dtype}")
    if labels.size == 0:
        raise InputError("label map is empty")
    if labels.min() < 0:
        raise InputError("label map contains negative labels")
    return labels


def save_label_map(labels: np.ndarray, path: str | Path) -> None:
    labels = _checked_labels(labels)
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        top = int(labels.max())
        if top > _PNG_MAX_LABEL:
            raise InputError(
                f"label {top} exceeds the 16-bit PNG cap {_PNG_MAX_LABEL}; "
                f"use the .csv format instead"
            )
        Image.fromarray(labels.astype(np.uint16)).save(path)
    elif suffix == ".csv":
        h, w = labels.shape
        rows = [f"{w},{h}"]
        rows.extend(",".join(str(v) for v in line) for line in labels.tolist())
        Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")
    else:
        raise InputError(f"unsupported label map extension {suffix!r} for {path}")


def load_label_map(path: str | Path) -> np.ndarray:
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        with Image.open(path) as img:
            if img.mode not in ("I;16", "I", "L"):
                raise InputError(
                    f"{path}: label PNG must be single-channel, got mode {img.mode!r}"
                )
            return np.asarray(img, dtype=np.int32)
    if suffix == ".csv":
        return _load_csv(path)
    raise InputError(f"unsupported label map extension {suffix!r} for {path}")


def _load_csv(path: str | Path) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise InputError(f"{path}:1: empty label file")
    header = lines[0].split(",")
    if len(header) != 2:
        raise InputError(f"{path}:1: expected 'width,height', got {lines[0]!r}")
    try:
        w, h = int(header[0]), int(header[1])
    except ValueError as exc:
        raise InputError(f"{path}:1: bad dimensions {lines[0]!r}") from exc
    if w < 1 or h < 1:
        raise InputError(f"{path}:1: dimensions must be positive")
    body = [line for line in lines[1:] if line.strip()]
    if len(body) != h:
        raise InputError(f"{path}: expected {h} label rows, found {len(body)}")
    out = np.empty((h, w), dtype=np.int32)
    for i, line in enumerate(body):
        parts = line.split(",")
        if len(parts) != w:
            raise InputError(
                f"{path}:{i + 2}: expected {w} values, found {len(parts)}"
            )
        try:
            out[i] = [int(p) for p in parts]
        except ValueError as exc:
            raise InputError(f"{path}:{i + 2}: non-integer label") from exc
    if out.min() < 0:
        raise InputError(f"{path}: negative label")
    return out


def save_ground_truth(gt: GroundTruth, path: str | Path) -> None:
    save_label_map(gt.regions, path)


def load_ground_truth(path: str | Path) -> GroundTruth:
    return GroundTruth(load_label_map(path))


def boundary_mask(labels: np.ndarray) -> np.ndarray:
    """True where any 4-neighbor carries a different label."""
    labels = _checked_labels(labels)
    mask = np.zeros(labels.shape, dtype=bool)
    horiz = labels[:, 1:] != labels[:, :-1]
    mask[:, 1:] |= horiz
    mask[:, :-1] |= horiz
    vert = labels[1:, :] != labels[:-1, :]
    mask[1:, :] |= vert
    mask[:-1, :] |= vert
    return mask


def boundary_overlay(
    raster: np.ndarray, labels: np.ndarray, color: tuple[int, int, int] = (255, 64, 32)
) -> np.ndarray:
    """Paint superpixel boundaries onto a copy of the input raster."""
    raster = np.asarray(raster)
    if raster.dtype != np.uint8:
        raise InputError(f"expected uint8 raster, got dtype {raster.dtype}")
    if raster.ndim == 2:
        rgb = np.repeat(raster[:, :, np.newaxis], 3, axis=2)
    elif raster.ndim == 3 and raster.shape[2] == 3:
        rgb = raster.copy()
    else:
        raise InputError(f"cannot overlay raster of shape {raster.shape}")
    labels = _checked_labels(labels)
    if labels.shape != rgb.shape[:2]:
        raise InputError(
            f"label map shape {labels.shape} does not match raster {rgb.shape[:2]}"
        )
    rgb[boundary_mask(labels)] = np.asarray(color, dtype=np.uint8)
    return rgb
