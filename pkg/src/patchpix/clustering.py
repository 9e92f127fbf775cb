"""Texture-aware superpixel clustering and the pixel-wise baseline.

The main pipeline tiles the image into a square grid, then runs N sweeps in
which every pixel refreshes its constrained patch correspondence and
immediately adopts the label of the superpixel owning that correspondence.
M independently seeded estimates are fused by per-pixel majority vote before
connectivity is enforced.

Two execution backends produce bit-identical results: "kernel" (compiled,
the default) and "python" (the readable reference built on matching.py).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InputError
from .image import LabImage, PatchSpec, pad_replicate, to_lab_image
from .matching import (
    MatchField,
    SearchConfig,
    feasible,
    pm_iteration,
    radius_count,
    random_init,
)
from .rng import MASK64, XorShift64Star, derive_run_seed
from .state import (
    GridConfig,
    SuperpixelStats,
    enforce_connectivity,
    grid_step,
    init_grid,
    move_pixel,
    recompute_stats,
    update_regularity,
)


@dataclass(frozen=True)
class NnscParams:
    """Clustering parameters; the defaults are the recommended settings."""

    k: int
    patch_side: int = 7
    sigma: int = 3
    iterations: int = 8
    estimations: int = 4
    m0: float = 10.0
    adaptive_m: bool = False
    sigma_ref: float = 10.0
    alpha: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"k must be >= 1, got {self.k}")
        if self.patch_side < 1 or self.patch_side % 2 == 0:
            raise InputError(f"patch side must be odd >= 1, got {self.patch_side}")
        if self.sigma < 0:
            raise InputError(f"sigma must be >= 0, got {self.sigma}")
        if self.iterations < 0:
            raise InputError(f"iterations must be >= 0, got {self.iterations}")
        if self.estimations < 1:
            raise InputError(f"estimations must be >= 1, got {self.estimations}")
        if self.m0 < 0:
            raise InputError(f"m0 must be >= 0, got {self.m0}")
        if self.sigma_ref <= 0:
            raise InputError(f"sigma_ref must be > 0, got {self.sigma_ref}")
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must be in (0, 1), got {self.alpha}")
        object.__setattr__(self, "seed", self.seed & MASK64)


@dataclass
class RunCounters:
    """Cost-evaluation counts of one estimation run.

    Initialization evaluations (one per pixel) are tracked separately from
    the per-sweep counts, so the per-iteration complexity bound stays
    meaningful.
    """

    init_evaluations: int = 0
    iteration_evaluations: list[int] = field(default_factory=list)

    @property
    def iteration_total(self) -> int:
        return sum(self.iteration_evaluations)

    @property
    def total(self) -> int:
        return self.init_evaluations + self.iteration_total


def iteration_eval_bound(pixel_count: int, config: SearchConfig) -> int:
    """Hard ceiling on cost evaluations in one sweep: |I| * (2 + radii)."""
    return pixel_count * (2 + radius_count(config))


def barycenter_weight(qx: float, qy: float, bx: float, by: float, step: int) -> float:
    """Bounded spatial penalty 2*s^2*(1 - exp(-d^2/s^2)) of a candidate.

    Zero at the barycenter, saturating at 2*s^2 far away; the characteristic
    scale is the grid step s.
    """
    s2 = float(step * step)
    gdx = float(qx) - bx
    gdy = float(qy) - by
    return 2.0 * s2 * (1.0 - math.exp(-(gdx * gdx + gdy * gdy) / s2))


class ClusterCost:
    """Reference matching cost bound to one run's live state.

    Evaluating (p, q) reads the superpixel owning q from the current label
    map, so costs follow the clustering as labels move. The compiled kernel
    computes the identical expression in the identical operation order.
    """

    def __init__(
        self,
        image: LabImage,
        labels: np.ndarray,
        stats: SuperpixelStats,
        patch: PatchSpec,
        step: int,
    ):
        self.labels = labels
        self.stats = stats
        self.half = patch.half
        self.side = patch.side
        self.n_patch = float(patch.pixel_count)
        self.step = step
        self.channels = image.channels
        # plain nested lists index faster than numpy scalars in this loop
        self._pad = pad_replicate(image, patch.half).tolist()

    def patch_component(self, px: int, py: int, qx: int, qy: int) -> float:
        """Normalized patch distance plus the weighted barycenter penalty."""
        pad = self._pad
        acc = 0.0
        for dy in range(self.side):
            prow = pad[py + dy]
            qrow = pad[qy + dy]
            for dx in range(self.side):
                pc = prow[px + dx]
                qc = qrow[qx + dx]
                for c in range(self.channels):
                    d = pc[c] - qc[c]
                    acc += d * d
        dist = math.sqrt(acc) / self.n_patch
        owner = int(self.labels[qy, qx])
        size = float(self.stats.sizes[owner])
        bx = float(self.stats.pos_sum[owner, 0]) / size
        by = float(self.stats.pos_sum[owner, 1]) / size
        mk = float(self.stats.m[owner])
        s2 = float(self.step * self.step)
        wgt = mk * mk / s2
        gdx = float(qx) - bx
        gdy = float(qy) - by
        g = 2.0 * s2 * (1.0 - math.exp(-(gdx * gdx + gdy * gdy) / s2))
        return dist + wgt * g

    def __call__(self, px: int, py: int, qx: int, qy: int) -> float:
        pad = self._pad
        acc = 0.0
        for dy in range(self.side):
            prow = pad[py + dy]
            qrow = pad[qy + dy]
            for dx in range(self.side):
                pc = prow[px + dx]
                qc = qrow[qx + dx]
                for c in range(self.channels):
                    d = pc[c] - qc[c]
                    acc += d * d
        dist = math.sqrt(acc) / self.n_patch
        owner = int(self.labels[qy, qx])
        size = float(self.stats.sizes[owner])
        bx = float(self.stats.pos_sum[owner, 0]) / size
        by = float(self.stats.pos_sum[owner, 1]) / size
        mk = float(self.stats.m[owner])
        s2 = float(self.step * self.step)
        wgt = mk * mk / s2
        gdx = float(qx) - bx
        gdy = float(qy) - by
        g = 2.0 * s2 * (1.0 - math.exp(-(gdx * gdx + gdy * gdy) / s2))
        center = pad[py + self.half][px + self.half]
        acc2 = 0.0
        for c in range(self.channels):
            d = center[c] - float(self.stats.color_sum[owner, c]) / size
            acc2 += d * d
        dc = math.sqrt(acc2)
        edx = float(px) - bx
        edy = float(py) - by
        ds = edx * edx + edy * edy
        return dist + wgt * g + dc + ds * wgt


class EstimationRun:
    """One seeded estimation: owns its labels, stats, match field, and RNG."""

    def __init__(
        self,
        image: LabImage,
        params: NnscParams,
        run_seed: int,
        backend: str = "kernel",
    ):
        if backend not in ("kernel", "python"):
            raise InputError(f"unknown backend {backend!r}")
        self.image = image
        self.params = params
        self.backend = backend
        self.labels, self.stats, self.grid = init_grid(image, params.k, params.m0)
        if params.sigma >= self.grid.step:
            raise InputError(
                f"sigma {params.sigma} needs a grid step above it, but k={params.k} "
                f"on {image.width}x{image.height} gives step {self.grid.step}"
            )
        self.config = SearchConfig(
            window=self.grid.step,
            sigma=params.sigma,
            seed=run_seed & MASK64,
            alpha=params.alpha,
        )
        if not feasible(image.width, image.height, self.config):
            raise InputError(
                f"no valid match candidate exists on a {image.width}x"
                f"{image.height} image with window {self.config.window} "
                f"and sigma {self.config.sigma}"
            )
        self.patch = PatchSpec(params.patch_side)
        self.field = MatchField(image.width, image.height)
        self.counters = RunCounters()
        update_regularity(self.stats, params.m0, params.adaptive_m, params.sigma_ref)
        if backend == "kernel":
            self._pad = pad_replicate(image, self.patch.half)
            self._state = _kernels.rng_state_from_seed(np.uint64(self.config.seed))
        else:
            self._rng = XorShift64Star(self.config.seed)
            self._cost = ClusterCost(
                image, self.labels, self.stats, self.patch, self.grid.step
            )

    def initialize_matches(self) -> None:
        if self.backend == "kernel":
            evals = _kernels.random_init_run(
                self._pad,
                self.labels,
                self.stats.sizes,
                self.stats.color_sum,
                self.stats.pos_sum,
                self.stats.m,
                self.grid.step,
                self.patch.half,
                float(self.patch.pixel_count),
                self.config.window,
                self.config.sigma,
                self.field.match_x,
                self.field.match_y,
                self.field.cost,
                self._state,
            )
        else:
            evals = random_init(self.field, self._cost, self.config, self._rng)
        self.counters.init_evaluations += int(evals)

    def _move_to_match_owner(self, x: int, y: int) -> None:
        owner = int(self.labels[self.field.match_y[y, x], self.field.match_x[y, x]])
        current = int(self.labels[y, x])
        if owner != current:
            move_pixel(self.stats, self.labels, self.image, x, y, current, owner)

    def run_iteration(self, index: int, do_moves: bool = True) -> None:
        if self.backend == "kernel":
            evals = _kernels.iteration_run(
                self._pad,
                self.labels,
                self.stats.sizes,
                self.stats.color_sum,
                self.stats.color_sq_sum,
                self.stats.pos_sum,
                self.stats.m,
                self.grid.step,
                self.patch.half,
                float(self.patch.pixel_count),
                self.config.window,
                self.config.sigma,
                self.config.alpha,
                self.field.match_x,
                self.field.match_y,
                self.field.cost,
                self._state,
                index,
                do_moves,
            )
        else:
            hook = self._move_to_match_owner if do_moves else None
            evals = pm_iteration(
                self.field, self._cost, self.config, index, self._rng, hook
            )
        self.counters.iteration_evaluations.append(int(evals))
        if do_moves and self.params.adaptive_m:
            update_regularity(
                self.stats, self.params.m0, True, self.params.sigma_ref
            )

    def run_all(self) -> np.ndarray:
        self.initialize_matches()
        for i in range(self.params.iterations):
            self.run_iteration(i)
        return self.labels


def single_estimate(
    image: LabImage, params: NnscParams, run_seed: int, backend: str = "kernel"
) -> tuple[np.ndarray, RunCounters]:
    """One full estimation; returns the pre-connectivity labels and counters."""
    run = EstimationRun(image, params, run_seed, backend)
    run.run_all()
    return run.labels.copy(), run.counters


def aggregate_label_maps(maps: list[np.ndarray]) -> np.ndarray:
    """Per-pixel majority vote across estimation label maps.

    All runs start from the identical grid labeling, so equal labels refer to
    the same initial block and the vote is meaningful. Ties go to the label
    of the lowest-index map among the tied candidates.
    """
    if len(maps) == 0:
        raise InputError("no label maps to aggregate")
    base = maps[0]
    for other in maps[1:]:
        if other.shape != base.shape:
            raise InputError(
                f"label map shapes differ: {other.shape} vs {base.shape}"
            )
    if len(maps) == 1:
        return base.copy()
    stack = np.stack([m.ravel() for m in maps])
    scores = np.zeros(stack.shape, dtype=np.int32)
    for j in range(stack.shape[0]):
        scores += stack == stack[j][None, :]
    winner = np.argmax(scores, axis=0)  # first max = lowest map index on ties
    out = stack[winner, np.arange(stack.shape[1])]
    return out.reshape(base.shape).astype(base.dtype)


@dataclass
class DecomposeResult:
    """Final labels plus the bookkeeping needed by the CLI and benchmarks."""

    labels: np.ndarray
    label_count: int
    grid_step: int
    initial_count: int
    counters: list[RunCounters]


def decompose(
    image: LabImage | np.ndarray,
    params: NnscParams,
    threads: int | None = None,
    min_size: int | None = None,
    backend: str = "kernel",
) -> DecomposeResult:
    """Full decomposition: M seeded runs, majority vote, connectivity.

    Run seeds derive from params.seed via splitmix64(seed + run_index), so
    results do not depend on thread count or scheduling; `threads` only
    bounds the worker pool (None or 0 picks one per run up to the CPU count).
    """
    image = to_lab_image(image)
    seeds = [derive_run_seed(params.seed, i) for i in range(params.estimations)]
    if threads is None or threads <= 0:
        threads = min(params.estimations, os.cpu_count() or 1)

    def job(seed: int) -> tuple[np.ndarray, RunCounters]:
        return single_estimate(image, params, seed, backend)

    if threads == 1 or params.estimations == 1:
        results = [job(s) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, seeds))
    maps = [labels for labels, _ in results]
    counters = [c for _, c in results]
    voted = aggregate_label_maps(maps)
    step = grid_step(image.width, image.height, params.k)
    if min_size is None:
        min_size = max(1, (step * step) // 4)
    final = enforce_connectivity(voted, min_size)
    return DecomposeResult(
        labels=final,
        label_count=int(final.max()) + 1,
        grid_step=step,
        initial_count=GridConfig(
            params.k, step, -(-image.width // step), -(-image.height // step)
        ).initial_count,
        counters=counters,
    )


@dataclass
class SlicResult:
    labels: np.ndarray
    label_count: int
    grid_step: int
    iteration_evaluations: list[int]


def slic_baseline(
    image: LabImage | np.ndarray,
    k: int,
    m: float = 10.0,
    iterations: int = 10,
    min_size: int | None = None,
) -> SlicResult:
    """Pixel-wise K-means baseline over (2s+1) squared superpixel windows.

    Each sweep lets every superpixel claim the cheapest pixels in its window
    (color distance to the superpixel mean plus weighted squared spatial
    distance); statistics are recomputed between sweeps. Deterministic, no
    randomness involved.
    """
    image = to_lab_image(image)
    if m <= 0:
        raise InputError(f"compactness m must be > 0, got {m}")
    if iterations < 0:
        raise InputError(f"iterations must be >= 0, got {iterations}")
    labels, stats, grid = init_grid(image, k, m)
    evaluations: list[int] = []
    for _ in range(iterations):
        best_label = np.full(labels.shape, -1, dtype=np.int32)
        best_cost = np.full(labels.shape, np.inf, dtype=np.float64)
        count = _kernels.slic_iteration_run(
            image.data,
            stats.sizes,
            stats.color_sum,
            stats.pos_sum,
            grid.step,
            float(m),
            best_label,
            best_cost,
        )
        evaluations.append(int(count))
        labels = np.where(best_label >= 0, best_label, labels).astype(np.int32)
        stats = recompute_stats(image, labels, grid.initial_count, m)
    if min_size is None:
        min_size = max(1, (grid.step * grid.step) // 4)
    final = enforce_connectivity(labels, min_size)
    return SlicResult(
        labels=final,
        label_count=int(final.max()) + 1,
        grid_step=grid.step,
        iteration_evaluations=evaluations,
    )
