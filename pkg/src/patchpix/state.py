"""Superpixel state: statistics, grid initialization, moves, connectivity.

Statistics are kept as sums (struct-of-arrays over all superpixels of a run)
so that moving one pixel between superpixels is O(channels). A full batch
recomputation is provided as the oracle for the incremental path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from skimage.measure import label as _connected_components

from .errors import InputError, InvariantError
from .image import LabImage


@dataclass(frozen=True)
class GridConfig:
    """Initial tiling geometry: square blocks of side `step`."""

    requested: int
    step: int
    cols: int
    rows: int

    @property
    def initial_count(self) -> int:
        return self.cols * self.rows


class SuperpixelStats:
    """Accumulators (size, color sums, position sums, regularity) per label.

    color_sq_sum is carried for the adaptive regularity mode, which needs the
    per-superpixel color variance. Positions accumulate as (x, y).
    """

    def __init__(self, label_count: int, channels: int, m0: float):
        if label_count < 1:
            raise InputError(f"label count must be >= 1, got {label_count}")
        self.sizes = np.zeros(label_count, dtype=np.int64)
        self.color_sum = np.zeros((label_count, channels), dtype=np.float64)
        self.color_sq_sum = np.zeros((label_count, channels), dtype=np.float64)
        self.pos_sum = np.zeros((label_count, 2), dtype=np.float64)
        self.m = np.full(label_count, float(m0), dtype=np.float64)

    @property
    def label_count(self) -> int:
        return int(self.sizes.shape[0])

    @property
    def channels(self) -> int:
        return int(self.color_sum.shape[1])

    def mean_color(self, label: int) -> np.ndarray:
        if self.sizes[label] <= 0:
            raise InvariantError(f"mean color of empty superpixel {label}")
        return self.color_sum[label] / self.sizes[label]

    def barycenter(self, label: int) -> np.ndarray:
        if self.sizes[label] <= 0:
            raise InvariantError(f"barycenter of empty superpixel {label}")
        return self.pos_sum[label] / self.sizes[label]

    def color_spread(self, label: int) -> float:
        """RMS of the per-channel color standard deviations."""
        n = self.sizes[label]
        if n <= 0:
            raise InvariantError(f"color spread of empty superpixel {label}")
        mean = self.color_sum[label] / n
        var = self.color_sq_sum[label] / n - mean * mean
        return math.sqrt(max(0.0, float(np.mean(var))))

    def copy(self) -> "SuperpixelStats":
        out = SuperpixelStats.__new__(SuperpixelStats)
        out.sizes = self.sizes.copy()
        out.color_sum = self.color_sum.copy()
        out.color_sq_sum = self.color_sq_sum.copy()
        out.pos_sum = self.pos_sum.copy()
        out.m = self.m.copy()
        return out


def grid_step(width: int, height: int, k: int) -> int:
    """Initial block side: max(1, round(sqrt(pixels / k)))."""
    pixels = width * height
    if k < 1 or k > pixels:
        raise InputError(f"superpixel count {k} outside [1, {pixels}]")
    return max(1, round(math.sqrt(pixels / k)))


def init_grid(
    image: LabImage, k: int, m0: float = 10.0
) -> tuple[np.ndarray, SuperpixelStats, GridConfig]:
    """Tile the image into square blocks and build the matching statistics.

    The last row/column of blocks may be smaller when the step does not
    divide the image extent. Block labels run row-major, so every run of the
    same image and k starts from the identical labeling.
    """
    step = grid_step(image.width, image.height, k)
    cols = -(-image.width // step)
    rows = -(-image.height // step)
    grid = GridConfig(requested=k, step=step, cols=cols, rows=rows)
    ys = np.arange(image.height, dtype=np.int32) // step
    xs = np.arange(image.width, dtype=np.int32) // step
    labels = np.ascontiguousarray(ys[:, None] * np.int32(cols) + xs[None, :])
    stats = recompute_stats(image, labels, grid.initial_count, m0)
    return labels, stats, grid


def recompute_stats(
    image: LabImage, labels: np.ndarray, label_count: int, m0: float = 10.0
) -> SuperpixelStats:
    """Batch recomputation of all sums by a full pass over the label map."""
    if labels.shape != (image.height, image.width):
        raise InputError(
            f"label map shape {labels.shape} does not match image "
            f"({image.height}, {image.width})"
        )
    flat = labels.ravel().astype(np.int64)
    if flat.min() < 0 or flat.max() >= label_count:
        raise InputError(f"labels outside [0, {label_count})")
    stats = SuperpixelStats(label_count, image.channels, m0)
    stats.sizes[:] = np.bincount(flat, minlength=label_count)
    for c in range(image.channels):
        ch = image.data[:, :, c].ravel()
        stats.color_sum[:, c] = np.bincount(flat, weights=ch, minlength=label_count)
        stats.color_sq_sum[:, c] = np.bincount(
            flat, weights=ch * ch, minlength=label_count
        )
    xs = np.tile(np.arange(image.width, dtype=np.float64), image.height)
    ys = np.repeat(np.arange(image.height, dtype=np.float64), image.width)
    stats.pos_sum[:, 0] = np.bincount(flat, weights=xs, minlength=label_count)
    stats.pos_sum[:, 1] = np.bincount(flat, weights=ys, minlength=label_count)
    return stats


def move_pixel(
    stats: SuperpixelStats,
    labels: np.ndarray,
    image: LabImage,
    x: int,
    y: int,
    from_label: int,
    to_label: int,
) -> bool:
    """Reassign one pixel and update both superpixels' sums incrementally.

    Returns False (state untouched) when the move would empty the source
    superpixel; barycenters and means must stay defined during clustering.
    """
    if labels[y, x] != from_label:
        raise InvariantError(
            f"pixel ({x}, {y}) carries label {labels[y, x]}, expected {from_label}"
        )
    if from_label == to_label:
        raise InvariantError(f"move ({x}, {y}) onto its own label {to_label}")
    if stats.sizes[from_label] <= 1:
        return False
    labels[y, x] = to_label
    stats.sizes[from_label] -= 1
    stats.sizes[to_label] += 1
    for c in range(stats.channels):
        v = image.data[y, x, c]
        stats.color_sum[from_label, c] -= v
        stats.color_sum[to_label, c] += v
        stats.color_sq_sum[from_label, c] -= v * v
        stats.color_sq_sum[to_label, c] += v * v
    stats.pos_sum[from_label, 0] -= x
    stats.pos_sum[to_label, 0] += x
    stats.pos_sum[from_label, 1] -= y
    stats.pos_sum[to_label, 1] += y
    return True


def update_regularity(
    stats: SuperpixelStats, m0: float, adaptive: bool, sigma_ref: float = 10.0
) -> None:
    """Refresh the per-superpixel regularity weights in place.

    Constant mode sets every weight to m0. Adaptive mode scales m0 by
    clamp(sigma_ref / color_spread, 0.5, 2): smoother superpixels get a
    stronger spatial pull. Empty superpixels keep m0.
    """
    if not adaptive:
        stats.m[:] = m0
        return
    n = np.maximum(stats.sizes, 1).astype(np.float64)
    mean = stats.color_sum / n[:, None]
    var = stats.color_sq_sum / n[:, None] - mean * mean
    spread = np.sqrt(np.maximum(0.0, var.mean(axis=1)))
    with np.errstate(divide="ignore"):
        ratio = np.where(spread > 0.0, sigma_ref / np.maximum(spread, 1e-300), np.inf)
    stats.m[:] = m0 * np.clip(ratio, 0.5, 2.0)
    stats.m[stats.sizes == 0] = m0


def _component_map(labels: np.ndarray) -> np.ndarray:
    comp = _connected_components(labels, background=-1, connectivity=1)
    return comp - comp.min()


def enforce_connectivity(labels: np.ndarray, min_size: int) -> np.ndarray:
    """Make every label one 4-connected component and drop tiny fragments.

    Components smaller than min_size are absorbed into the 4-adjacent
    superpixel with the largest current pixel count (ties: smallest label).
    Remaining components are then renumbered densely in scan order, which
    also splits any label still covering several components.
    """
    if labels.ndim != 2:
        raise InputError(f"label map must be 2-D, got shape {labels.shape}")
    if min_size < 0:
        raise InputError(f"min_size must be >= 0, got {min_size}")
    h, w = labels.shape
    out = labels.astype(np.int32, copy=True)
    comp = _component_map(out)
    comp_sizes = np.bincount(comp.ravel())
    label_sizes = np.bincount(out.ravel(), minlength=int(out.max()) + 1).astype(
        np.int64
    )
    order = np.argsort(comp.ravel(), kind="stable")
    bounds = np.cumsum(comp_sizes)
    for cid in range(comp_sizes.shape[0]):
        size = comp_sizes[cid]
        if size >= min_size:
            continue
        pixels = order[bounds[cid] - size : bounds[cid]]
        own = out.ravel()[pixels[0]]
        # collect 4-adjacent labels different from the component's own label
        best_label = -1
        best_size = -1
        for flat in pixels:
            py, px = divmod(int(flat), w)
            for nx, ny in ((px - 1, py), (px + 1, py), (px, py - 1), (px, py + 1)):
                if not (0 <= nx < w and 0 <= ny < h):
                    continue
                nb = int(out[ny, nx])
                if nb == own:
                    continue
                nb_size = int(label_sizes[nb])
                if nb_size > best_size or (nb_size == best_size and nb < best_label):
                    best_label = nb
                    best_size = nb_size
        if best_label < 0:
            continue
        out.ravel()[pixels] = best_label
        label_sizes[own] -= size
        label_sizes[best_label] += size
    # renumber per component, first-seen scan order
    comp = _component_map(out)
    ids, first_pos = np.unique(comp.ravel(), return_index=True)
    rank = np.argsort(np.argsort(first_pos)).astype(np.int32)
    remap = np.empty(int(ids.max()) + 1, dtype=np.int32)
    remap[ids] = rank
    return remap[comp]
