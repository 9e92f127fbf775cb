"""Compiled inner loops of the clustering and matching pipeline.

Everything here mirrors the pure-Python reference modules (rng, matching,
state moves) operation for operation: same RNG draw sequence, same candidate
validity checks, same strict-improvement acceptance, same accumulator update
order. Tests hold the two sides to bit-identical results, so any edit here
must keep that mirror intact.

Kernels release the GIL; each clustering run owns its arrays exclusively, so
runs can execute on a thread pool without synchronization.
"""

import math

import numpy as np
from numba import njit

U64 = np.uint64

_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_STAR = U64(0x2545F4914F6CDD1D)


@njit(cache=True, nogil=True)
def rng_state_from_seed(seed):
    """splitmix64 bootstrap; returns a 1-element uint64 state array."""
    z = seed + _GAMMA
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    if z == U64(0):
        z = _GAMMA
    state = np.empty(1, dtype=np.uint64)
    state[0] = z
    return state


@njit(cache=True, nogil=True, inline="always")
def next_u64(state):
    x = state[0]
    x = x ^ (x >> U64(12))
    x = x ^ (x << U64(25))
    x = x ^ (x >> U64(27))
    state[0] = x
    return x * _STAR


@njit(cache=True, nogil=True, inline="always")
def draw_int(state, lo, hi):
    """Uniform draw in [lo, hi], matching XorShift64Star.randint bit for bit."""
    span = U64(hi - lo + 1)
    return lo + np.int64(next_u64(state) % span)


@njit(cache=True, nogil=True)
def clustering_cost(
    pad, labels, sizes, color_sum, pos_sum, m, step, half, n_patch, px, py, qx, qy
):
    """Full matching cost of pairing pixel p with candidate position q.

    Terms: normalized patch distance, barycenter weighting of q scaled by
    (m_k/s)^2, color distance of p to the candidate superpixel's mean, and
    squared spatial distance of p to its barycenter with the same scaling.
    The superpixel is the one owning q in the current label map.
    """
    side = 2 * half + 1
    nch = pad.shape[2]
    acc = 0.0
    for dy in range(side):
        for dx in range(side):
            for c in range(nch):
                d = pad[py + dy, px + dx, c] - pad[qy + dy, qx + dx, c]
                acc += d * d
    dist = math.sqrt(acc) / n_patch
    owner = labels[qy, qx]
    size = float(sizes[owner])
    bx = pos_sum[owner, 0] / size
    by = pos_sum[owner, 1] / size
    mk = m[owner]
    s2 = float(step * step)
    wgt = mk * mk / s2
    gdx = float(qx) - bx
    gdy = float(qy) - by
    g = 2.0 * s2 * (1.0 - math.exp(-(gdx * gdx + gdy * gdy) / s2))
    acc2 = 0.0
    for c in range(nch):
        d = pad[py + half, px + half, c] - color_sum[owner, c] / size
        acc2 += d * d
    dc = math.sqrt(acc2)
    edx = float(px) - bx
    edy = float(py) - by
    ds = edx * edx + edy * edy
    return dist + wgt * g + dc + ds * wgt


@njit(cache=True, nogil=True)
def random_init_run(
    pad,
    labels,
    sizes,
    color_sum,
    pos_sum,
    m,
    step,
    half,
    n_patch,
    window,
    sigma,
    match_x,
    match_y,
    cost,
    state,
):
    """Seed every pixel's match uniformly over its feasible candidate set."""
    h, w = labels.shape
    evals = 0
    for y in range(h):
        for x in range(w):
            x0 = x - window
            if x0 < 0:
                x0 = 0
            x1 = x + window
            if x1 > w - 1:
                x1 = w - 1
            y0 = y - window
            if y0 < 0:
                y0 = 0
            y1 = y + window
            if y1 > h - 1:
                y1 = h - 1
            while True:
                qx = draw_int(state, x0, x1)
                qy = draw_int(state, y0, y1)
                ax = qx - x
                if ax < 0:
                    ax = -ax
                ay = qy - y
                if ay < 0:
                    ay = -ay
                cheb = ax if ax > ay else ay
                if cheb > sigma:
                    break
            match_x[y, x] = qx
            match_y[y, x] = qy
            cost[y, x] = clustering_cost(
                pad, labels, sizes, color_sum, pos_sum, m, step, half, n_patch, x, y, qx, qy
            )
            evals += 1
    return evals


@njit(cache=True, nogil=True)
def iteration_run(
    pad,
    labels,
    sizes,
    color_sum,
    color_sq_sum,
    pos_sum,
    m,
    step,
    half,
    n_patch,
    window,
    sigma,
    alpha,
    match_x,
    match_y,
    cost,
    state,
    iteration_index,
    do_moves,
):
    """One full scan: propagate, random-search, then relabel each pixel.

    Even iteration indices scan forward testing left/up neighbors, odd ones
    backward testing right/down. When do_moves is set, the pixel immediately
    adopts the label of the superpixel owning its match, unless that would
    empty its current superpixel; both superpixels' sums update in place.
    Returns the number of cost evaluations.
    """
    h, w = labels.shape
    nch = pad.shape[2]
    total = h * w
    forward = iteration_index % 2 == 0
    evals = 0
    for i in range(total):
        if forward:
            y = i // w
            x = i - y * w
        else:
            j = total - 1 - i
            y = j // w
            x = j - y * w
        for t in range(2):
            if forward:
                if t == 0:
                    nx = x - 1
                    ny = y
                else:
                    nx = x
                    ny = y - 1
            else:
                if t == 0:
                    nx = x + 1
                    ny = y
                else:
                    nx = x
                    ny = y + 1
            if nx < 0 or ny < 0 or nx >= w or ny >= h:
                continue
            cx = match_x[ny, nx] + (x - nx)
            cy = match_y[ny, nx] + (y - ny)
            if cx < 0 or cy < 0 or cx >= w or cy >= h:
                continue
            ax = cx - x
            if ax < 0:
                ax = -ax
            ay = cy - y
            if ay < 0:
                ay = -ay
            cheb = ax if ax > ay else ay
            if cheb <= sigma or cheb > window:
                continue
            c = clustering_cost(
                pad, labels, sizes, color_sum, pos_sum, m, step, half, n_patch, x, y, cx, cy
            )
            evals += 1
            if c < cost[y, x]:
                match_x[y, x] = cx
                match_y[y, x] = cy
                cost[y, x] = c
        r = float(window)
        while r >= 1.0:
            ri = int(r)
            dx = draw_int(state, -ri, ri)
            dy = draw_int(state, -ri, ri)
            cx = match_x[y, x] + dx
            cy = match_y[y, x] + dy
            if cx >= 0 and cy >= 0 and cx < w and cy < h:
                ax = cx - x
                if ax < 0:
                    ax = -ax
                ay = cy - y
                if ay < 0:
                    ay = -ay
                cheb = ax if ax > ay else ay
                if cheb > sigma and cheb <= window:
                    c = clustering_cost(
                        pad,
                        labels,
                        sizes,
                        color_sum,
                        pos_sum,
                        m,
                        step,
                        half,
                        n_patch,
                        x,
                        y,
                        cx,
                        cy,
                    )
                    evals += 1
                    if c < cost[y, x]:
                        match_x[y, x] = cx
                        match_y[y, x] = cy
                        cost[y, x] = c
            r *= alpha
        if do_moves:
            owner = labels[match_y[y, x], match_x[y, x]]
            cur = labels[y, x]
            if owner != cur and sizes[cur] > 1:
                labels[y, x] = owner
                sizes[cur] -= 1
                sizes[owner] += 1
                for ch in range(nch):
                    v = pad[y + half, x + half, ch]
                    color_sum[cur, ch] -= v
                    color_sum[owner, ch] += v
                    color_sq_sum[cur, ch] -= v * v
                    color_sq_sum[owner, ch] += v * v
                pos_sum[cur, 0] -= x
                pos_sum[owner, 0] += x
                pos_sum[cur, 1] -= y
                pos_sum[owner, 1] += y
    return evals


@njit(cache=True, nogil=True)
def slic_iteration_run(lab, sizes, color_sum, pos_sum, step, m, best_label, best_cost):
    """One K-means-style assignment sweep over all superpixel windows.

    Each non-empty superpixel scans the (2*step+1) squared box around its
    rounded barycenter; every covered pixel keeps the cheapest superpixel
    (color distance plus squared spatial distance weighted by (m/step)^2).
    Returns the number of distance evaluations.
    """
    h = lab.shape[0]
    w = lab.shape[1]
    nch = lab.shape[2]
    kcount = sizes.shape[0]
    s2 = float(step * step)
    wgt = m * m / s2
    evals = 0
    for k in range(kcount):
        if sizes[k] == 0:
            continue
        size = float(sizes[k])
        bx = pos_sum[k, 0] / size
        by = pos_sum[k, 1] / size
        mean = color_sum[k] / size
        cx = int(round(bx))
        cy = int(round(by))
        x0 = cx - step
        if x0 < 0:
            x0 = 0
        x1 = cx + step
        if x1 > w - 1:
            x1 = w - 1
        y0 = cy - step
        if y0 < 0:
            y0 = 0
        y1 = cy + step
        if y1 > h - 1:
            y1 = h - 1
        for yy in range(y0, y1 + 1):
            for xx in range(x0, x1 + 1):
                acc = 0.0
                for c in range(nch):
                    d = lab[yy, xx, c] - mean[c]
                    acc += d * d
                dc = math.sqrt(acc)
                ddx = float(xx) - bx
                ddy = float(yy) - by
                dcost = dc + (ddx * ddx + ddy * ddy) * wgt
                evals += 1
                if dcost < best_cost[yy, xx]:
                    best_cost[yy, xx] = dcost
                    best_label[yy, xx] = k
    return evals
