"""Spatially constrained PatchMatch engine, reference implementation.

Maintains a per-pixel best correspondence under a pluggable cost function.
Candidates are restricted to the (2*window+1) squared box around each pixel,
minus a Chebyshev exclusion zone of radius sigma, minus anything out of
bounds. The engine alternates scan-order propagation with a shrinking random
search, accepting candidates only on strict cost improvement.

This module is pure Python and deliberately explicit: the compiled kernels
replicate its draw sequence and acceptance rules operation for operation, and
the tests hold the two implementations to bit-identical behavior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError
from .rng import XorShift64Star

# cost of matching pixel (px, py) to candidate position (qx, qy)
CostFn = Callable[[int, int, int, int], float]


@dataclass(frozen=True)
class SearchConfig:
    """Search geometry and randomness for one matching run.

    window: half-size of the candidate box (the grid step of the clustering).
    sigma: Chebyshev radius around each pixel where candidates are forbidden.
    alpha: radius shrink factor of the random search.
    """

    window: int
    sigma: int = 3
    seed: int = 0
    alpha: float = 0.5

    def __post_init__(self):
        if self.window < 1:
            raise InputError(f"window must be >= 1, got {self.window}")
        if self.sigma < 0:
            raise InputError(f"sigma must be >= 0, got {self.sigma}")
        if self.sigma >= self.window:
            raise InputError(
                f"sigma ({self.sigma}) must be smaller than the window "
                f"({self.window}), otherwise no candidate can exist"
            )
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must be in (0, 1), got {self.alpha}")


class MatchField:
    """Per-pixel match position and its cost; -1/inf until initialized."""

    def __init__(self, width: int, height: int):
        if width < 1 or height < 1:
            raise InputError(f"empty field extent {width}x{height}")
        self.width = width
        self.height = height
        self.match_x = np.full((height, width), -1, dtype=np.int32)
        self.match_y = np.full((height, width), -1, dtype=np.int32)
        self.cost = np.full((height, width), np.inf, dtype=np.float64)


def feasible(width: int, height: int, config: SearchConfig) -> bool:
    """True when every pixel has at least one valid candidate.

    The worst-placed pixel sits mid-axis; its farthest in-bounds Chebyshev
    reach within the window is min(window, ceil((extent-1)/2)) = min(window,
    extent//2) per axis, and one axis suffices to escape the exclusion zone.
    """
    reach_x = min(config.window, width // 2)
    reach_y = min(config.window, height // 2)
    return max(reach_x, reach_y) > config.sigma


def is_valid_candidate(
    px: int, py: int, qx: int, qy: int, width: int, height: int, config: SearchConfig
) -> bool:
    """In bounds, inside the window, outside the exclusion zone."""
    if qx < 0 or qy < 0 or qx >= width or qy >= height:
        return False
    cheb = max(abs(qx - px), abs(qy - py))
    return config.sigma < cheb <= config.window


def make_rng(config: SearchConfig) -> XorShift64Star:
    return XorShift64Star(config.seed)


def random_init(
    field: MatchField, cost_fn: CostFn, config: SearchConfig, rng: XorShift64Star
) -> int:
    """Draw one uniform valid candidate per pixel and store its cost.

    Candidates are drawn from the in-bounds part of the window; draws landing
    inside the exclusion zone are rejected and redrawn, so the result is
    uniform over the feasible set. Returns the number of cost evaluations.
    """
    w, h = field.width, field.height
    if not feasible(w, h, config):
        raise InputError(
            f"no valid match candidate exists for a {w}x{h} image with "
            f"window {config.window} and sigma {config.sigma}"
        )
    evals = 0
    for y in range(h):
        for x in range(w):
            x0 = x - config.window if x - config.window > 0 else 0
            x1 = x + config.window if x + config.window < w - 1 else w - 1
            y0 = y - config.window if y - config.window > 0 else 0
            y1 = y + config.window if y + config.window < h - 1 else h - 1
            while True:
                qx = rng.randint(x0, x1)
                qy = rng.randint(y0, y1)
                if max(abs(qx - x), abs(qy - y)) > config.sigma:
                    break
            field.match_x[y, x] = qx
            field.match_y[y, x] = qy
            field.cost[y, x] = cost_fn(x, y, qx, qy)
            evals += 1
    return evals


def propagate(
    field: MatchField,
    cost_fn: CostFn,
    x: int,
    y: int,
    forward: bool,
    config: SearchConfig,
) -> int:
    """Test the shifted matches of the two scan-adjacent neighbors.

    Forward scans look left then up, backward scans right then down. The
    shifted candidate keeps the neighbor's match offset, so only bounds can
    invalidate it; window and exclusion are still checked for uniformity.
    """
    w, h = field.width, field.height
    evals = 0
    for t in range(2):
        if forward:
            nx, ny = (x - 1, y) if t == 0 else (x, y - 1)
        else:
            nx, ny = (x + 1, y) if t == 0 else (x, y + 1)
        if nx < 0 or ny < 0 or nx >= w or ny >= h:
            continue
        cx = int(field.match_x[ny, nx]) + (x - nx)
        cy = int(field.match_y[ny, nx]) + (y - ny)
        if not is_valid_candidate(x, y, cx, cy, w, h, config):
            continue
        c = cost_fn(x, y, cx, cy)
        evals += 1
        if c < field.cost[y, x]:
            field.match_x[y, x] = cx
            field.match_y[y, x] = cy
            field.cost[y, x] = c
    return evals


def random_search(
    field: MatchField,
    cost_fn: CostFn,
    x: int,
    y: int,
    config: SearchConfig,
    rng: XorShift64Star,
) -> int:
    """Shrinking-radius random probes around the current best match.

    One candidate per radius window, window*alpha, ... while >= 1. Both
    offsets are always drawn, even for candidates that turn out invalid, so
    the random stream advances identically on every backend.
    """
    w, h = field.width, field.height
    evals = 0
    r = float(config.window)
    while r >= 1.0:
        ri = int(r)
        dx = rng.randint(-ri, ri)
        dy = rng.randint(-ri, ri)
        cx = int(field.match_x[y, x]) + dx
        cy = int(field.match_y[y, x]) + dy
        if is_valid_candidate(x, y, cx, cy, w, h, config):
            c = cost_fn(x, y, cx, cy)
            evals += 1
            if c < field.cost[y, x]:
                field.match_x[y, x] = cx
                field.match_y[y, x] = cy
                field.cost[y, x] = c
        r *= config.alpha
    return evals


def radius_count(config: SearchConfig) -> int:
    """Number of radii the random search visits."""
    n = 0
    r = float(config.window)
    while r >= 1.0:
        n += 1
        r *= config.alpha
    return n


def pm_iteration(
    field: MatchField,
    cost_fn: CostFn,
    config: SearchConfig,
    iteration_index: int,
    rng: XorShift64Star,
    on_pixel: Callable[[int, int], None] | None = None,
) -> int:
    """One full scan: propagate then random-search every pixel.

    Even iteration indices scan forward (row-major), odd ones backward. The
    optional on_pixel hook runs after each pixel's update; the clustering
    loop uses it to reassign labels immediately.
    """
    w, h = field.width, field.height
    forward = iteration_index % 2 == 0
    evals = 0
    for i in range(w * h):
        if forward:
            y, x = divmod(i, w)
        else:
            y, x = divmod(w * h - 1 - i, w)
        evals += propagate(field, cost_fn, x, y, forward, config)
        evals += random_search(field, cost_fn, x, y, config, rng)
        if on_pixel is not None:
            on_pixel(x, y)
    return evals
