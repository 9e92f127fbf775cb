"""scikit-learn style wrappers around the two segmenters.

Both estimators follow the clusterer convention: constructor parameters are
stored verbatim, fit computes `labels_`, and fit_predict returns them. They
accept uint8 gray/RGB rasters or prepared LabImage instances.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .clustering import NnscParams, decompose, slic_baseline
from .errors import InputError
from .image import LabImage, to_lab_image


def check_image(X) -> LabImage:
    """Validate estimator input: LabImage, uint8 gray, or uint8 RGB."""
    if isinstance(X, LabImage):
        return X
    arr = np.asarray(X)
    if arr.ndim not in (2, 3):
        raise InputError(f"expected a 2-D or 3-D image array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise InputError(
            f"expected a uint8 raster or a LabImage, got dtype {arr.dtype}"
        )
    return to_lab_image(arr)


class NnscSuperpixels(BaseEstimator):
    """Texture-aware superpixel estimator.

    Parameters mirror the clustering defaults; `threads` only bounds the
    worker pool for the independent estimations and never changes results.

    Attributes after fit: labels_ (int32 label map), n_superpixels_,
    grid_step_, counters_ (per-run cost-evaluation counts).
    """

    def __init__(
        self,
        n_segments=200,
        patch_side=7,
        sigma=3,
        iterations=8,
        estimations=4,
        m0=10.0,
        adaptive_m=False,
        sigma_ref=10.0,
        seed=0,
        threads=None,
    ):
        self.n_segments = n_segments
        self.patch_side = patch_side
        self.sigma = sigma
        self.iterations = iterations
        self.estimations = estimations
        self.m0 = m0
        self.adaptive_m = adaptive_m
        self.sigma_ref = sigma_ref
        self.seed = seed
        self.threads = threads

    def _clustering_params(self) -> NnscParams:
        return NnscParams(
            k=self.n_segments,
            patch_side=self.patch_side,
            sigma=self.sigma,
            iterations=self.iterations,
            estimations=self.estimations,
            m0=self.m0,
            adaptive_m=self.adaptive_m,
            sigma_ref=self.sigma_ref,
            seed=self.seed,
        )

    def fit(self, X, y=None):
        image = check_image(X)
        result = decompose(image, self._clustering_params(), threads=self.threads)
        self.labels_ = result.labels
        self.n_superpixels_ = result.label_count
        self.grid_step_ = result.grid_step
        self.counters_ = result.counters
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class SlicSuperpixels(BaseEstimator):
    """Pixel-wise K-means superpixel baseline (SLIC-style)."""

    def __init__(self, n_segments=200, m=10.0, iterations=10):
        self.n_segments = n_segments
        self.m = m
        self.iterations = iterations

    def fit(self, X, y=None):
        image = check_image(X)
        result = slic_baseline(
            image, self.n_segments, m=self.m, iterations=self.iterations
        )
        self.labels_ = result.labels
        self.n_superpixels_ = result.label_count
        self.grid_step_ = result.grid_step
        self.iteration_evaluations_ = result.iteration_evaluations
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
