"""Procedural composite-texture images with tile ground truth.

The generator fills a tile layout (vertical split, 2x2, or 4x4) with
synthetic textures and reports the tiles as ground-truth regions. Its point
is the classic failure construction for pixel-wise methods: tiles that share
the same mean intensity but differ in structure, so only texture information
can separate them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError
from .metrics import GroundTruth
from .rng import MASK64, XorShift64Star, splitmix64

KINDS = ("grating", "checker", "noise", "constant")
LAYOUTS = {"vertical": (1, 2), "2x2": (2, 2), "4x4": (4, 4)}

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TextureSpec:
    """One tile's texture recipe.

    frequency is in cycles per pixel along the orientation axis; amplitude
    is the peak deviation from the mean gray level; noise_seed varies the
    phase (and the noise stream) independently of the global seed.
    """

    kind: str
    frequency: float = 1.0 / 16.0
    orientation: float = 0.0
    mean: float = 128.0
    amplitude: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown texture kind {self.kind!r}")
        if self.frequency <= 0:
            raise InputError(f"frequency must be > 0, got {self.frequency}")
        if not 0.0 <= self.mean <= 255.0:
            raise InputError(f"mean must be within [0, 255], got {self.mean}")
        if self.amplitude < 0:
            raise InputError(f"amplitude must be >= 0, got {self.amplitude}")


def parse_texture_spec(text: str) -> TextureSpec:
    """Parse 'kind[,frequency[,orientation[,mean[,amplitude[,noise_seed]]]]]'."""
    parts = [p.strip() for p in text.split(",")]
    if not parts or not parts[0]:
        raise InputError(f"empty texture spec {text!r}")
    if len(parts) > 6:
        raise InputError(f"too many fields in texture spec {text!r}")
    kind = parts[0]
    fields = {}
    names = ("frequency", "orientation", "mean", "amplitude", "noise_seed")
    casts = (float, float, float, float, int)
    for value, name, cast in zip(parts[1:], names, casts):
        try:
            fields[name] = cast(value)
        except ValueError as exc:
            raise InputError(f"bad {name} {value!r} in texture spec {text!r}") from exc
    return TextureSpec(kind=kind, **fields)


def format_texture_spec(spec: TextureSpec) -> str:
    return ",".join(
        [
            spec.kind,
            repr(spec.frequency),
            repr(spec.orientation),
            repr(spec.mean),
            repr(spec.amplitude),
            str(spec.noise_seed),
        ]
    )


def _tile_values(
    spec: TextureSpec, xs: np.ndarray, ys: np.ndarray, mix: int
) -> np.ndarray:
    """Render one tile in float gray levels on global pixel coordinates."""
    h1 = splitmix64((mix + spec.noise_seed) & MASK64)
    h2 = splitmix64(h1)
    phase1 = _TWO_PI * (h1 / 2.0**64)
    phase2 = _TWO_PI * (h2 / 2.0**64)
    u = xs * math.cos(spec.orientation) + ys * math.sin(spec.orientation)
    if spec.kind == "grating":
        return spec.mean + spec.amplitude * np.sin(_TWO_PI * spec.frequency * u + phase1)
    if spec.kind == "checker":
        v = -xs * math.sin(spec.orientation) + ys * math.cos(spec.orientation)
        su = np.sign(np.sin(_TWO_PI * spec.frequency * u + phase1))
        sv = np.sign(np.sin(_TWO_PI * spec.frequency * v + phase2))
        return spec.mean + spec.amplitude * su * sv
    if spec.kind == "noise":
        gen = np.random.Generator(np.random.PCG64(h1))
        return spec.mean + gen.uniform(-spec.amplitude, spec.amplitude, xs.shape)
    return np.full(xs.shape, spec.mean, dtype=np.float64)


def generate_composite(
    width: int,
    height: int,
    layout: str,
    specs: list[TextureSpec],
    seed: int = 0,
    equal_mean: bool = False,
) -> tuple[np.ndarray, GroundTruth]:
    """Render a tiled texture mosaic and its tile ground truth.

    Tiles are numbered row-major. With equal_mean set, every tile is shifted
    so its empirical mean equals the first spec's mean level (before 8-bit
    quantization), which removes any mean-intensity cue between tiles.
    Deterministic for a given (specs, seed).
    """
    if width < 1 or height < 1:
        raise InputError(f"empty composite extent {width}x{height}")
    if layout not in LAYOUTS:
        raise InputError(f"unknown layout {layout!r}; choose from {sorted(LAYOUTS)}")
    rows, cols = LAYOUTS[layout]
    if len(specs) != rows * cols:
        raise InputError(
            f"layout {layout} needs {rows * cols} texture specs, got {len(specs)}"
        )
    base = splitmix64(seed & MASK64)
    canvas = np.empty((height, width), dtype=np.float64)
    regions = np.empty((height, width), dtype=np.int32)
    x_edges = [round(c * width / cols) for c in range(cols + 1)]
    y_edges = [round(r * height / rows) for r in range(rows + 1)]
    target = specs[0].mean
    for r in range(rows):
        for c in range(cols):
            tile_index = r * cols + c
            spec = specs[tile_index]
            if equal_mean:
                spec = replace(spec, mean=target)
            x0, x1 = x_edges[c], x_edges[c + 1]
            y0, y1 = y_edges[r], y_edges[r + 1]
            ys, xs = np.mgrid[y0:y1, x0:x1]
            mix = splitmix64((base + 1000003 * tile_index) & MASK64)
            values = _tile_values(spec, xs.astype(np.float64), ys.astype(np.float64), mix)
            if equal_mean:
                values = values + (target - values.mean())
            canvas[y0:y1, x0:x1] = values
            regions[y0:y1, x0:x1] = tile_index
    raster = np.clip(np.rint(canvas), 0, 255).astype(np.uint8)
    return raster, GroundTruth(regions)


def default_specs(count: int, seed: int = 0) -> list[TextureSpec]:
    """Deterministic texture family for quick corpora and benchmarks.

    Alternates coarse checkerboards and gratings with varied orientation and
    period, all sharing mean 128, so adjacent tiles differ in structure but
    not in average intensity.
    """
    rng = XorShift64Star(splitmix64(seed & MASK64) ^ 0x5DA7A5E7)
    specs = []
    for i in range(count):
        kind = "checker" if i % 2 == 0 else "grating"
        period = 18 + rng.randint(0, 30)
        orientation = (rng.randint(0, 359) / 360.0) * _TWO_PI
        specs.append(
            TextureSpec(
                kind=kind,
                frequency=1.0 / period,
                orientation=orientation,
                mean=128.0,
                amplitude=80.0 + rng.randint(0, 30),
                noise_seed=i,
            )
        )
    return specs
