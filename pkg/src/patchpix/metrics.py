"""Segmentation accuracy metric and the ground-truth container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class GroundTruth:
    """Dense per-pixel region labeling: ids 0..region_count-1, none empty."""

    regions: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.regions)
        if arr.ndim != 2:
            raise InputError(f"regions must be 2-D, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise InputError(f"regions must be integer, got dtype {arr.dtype}")
        arr = np.ascontiguousarray(arr, dtype=np.int32)
        if arr.min() < 0:
            raise InputError("region ids must be non-negative")
        counts = np.bincount(arr.ravel())
        if np.any(counts == 0):
            empty = int(np.flatnonzero(counts == 0)[0])
            raise InputError(f"region id {empty} is empty; ids must be dense")
        object.__setattr__(self, "regions", arr)

    @property
    def region_count(self) -> int:
        return int(self.regions.max()) + 1

    @property
    def height(self) -> int:
        return self.regions.shape[0]

    @property
    def width(self) -> int:
        return self.regions.shape[1]


def asa(labels: np.ndarray, gt: GroundTruth | np.ndarray) -> float:
    """Achievable segmentation accuracy of a label map against ground truth.

    Every superpixel is credited with its best-overlapping region:
    (1/pixels) * sum over superpixels of max over regions of the overlap.
    1.0 means every superpixel lies inside a single region.
    """
    if not isinstance(gt, GroundTruth):
        gt = GroundTruth(np.asarray(gt))
    labels = np.asarray(labels)
    if labels.shape != gt.regions.shape:
        raise InputError(
            f"label map shape {labels.shape} does not match ground truth "
            f"{gt.regions.shape}"
        )
    if not np.issubdtype(labels.dtype, np.integer):
        raise InputError(f"labels must be integer, got dtype {labels.dtype}")
    flat = labels.ravel().astype(np.int64)
    if flat.min() < 0:
        raise InputError("labels must be non-negative")
    n_regions = gt.region_count
    pairs = flat * n_regions + gt.regions.ravel()
    contingency = np.bincount(
        pairs, minlength=(int(flat.max()) + 1) * n_regions
    ).reshape(-1, n_regions)
    return float(contingency.max(axis=1).sum() / flat.size)
