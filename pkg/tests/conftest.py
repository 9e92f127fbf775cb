import numpy as np
import pytest

import patchpix as px


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile (or load from cache) every kernel once, before timing anything."""
    raster, _ = px.generate_composite(40, 40, "2x2", px.default_specs(4, 1), seed=1)
    image = px.to_lab_image(raster)
    px.decompose(image, px.NnscParams(k=9, iterations=2, estimations=1, seed=1))
    px.slic_baseline(image, 9, iterations=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_raster(rng, h, w, color=False):
    shape = (h, w, 3) if color else (h, w)
    return rng.integers(0, 256, size=shape, dtype=np.uint8)


def textured_image(seed, side=48, equal_mean=True):
    raster, gt = px.generate_composite(
        side, side, "2x2", px.default_specs(4, seed), seed=seed, equal_mean=equal_mean
    )
    return px.to_lab_image(raster), gt
