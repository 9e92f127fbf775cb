import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from skimage import color as sk_color

from patchpix import (
    InputError,
    LabImage,
    PatchSpec,
    gray_to_lab,
    load_raster,
    pad_replicate,
    patch_at,
    patch_distance,
    rgb_to_lab,
    save_raster,
    to_lab_image,
)
from _oracles import patch_by_indexing


def test_black_is_origin():
    lab = rgb_to_lab(np.zeros((2, 2, 3), dtype=np.uint8))
    assert lab.channels == 3
    assert np.allclose(lab.data[..., 0], 0.0, atol=1e-6)
    assert np.all(np.abs(lab.data[..., 1:]) < 0.01)


def test_white_is_reference():
    lab = rgb_to_lab(np.full((1, 1, 3), 255, dtype=np.uint8))
    assert abs(lab.data[0, 0, 0] - 100.0) < 0.01
    assert np.all(np.abs(lab.data[0, 0, 1:]) < 0.01)


def test_mid_gray_matches_independent_conversion():
    raster = np.full((3, 3, 3), 119, dtype=np.uint8)
    ours = rgb_to_lab(raster).data
    oracle = sk_color.rgb2lab(raster.astype(np.float64) / 255.0)
    assert np.all(np.abs(ours[..., 1:]) < 0.01)
    assert np.allclose(ours, oracle, atol=2e-3)


def test_random_colors_match_independent_conversion(rng):
    raster = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    ours = rgb_to_lab(raster).data
    oracle = sk_color.rgb2lab(raster.astype(np.float64) / 255.0)
    assert np.allclose(ours, oracle, atol=2e-3)


def test_lightness_range_after_conversion(rng):
    raster = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    lab = rgb_to_lab(raster)
    assert lab.data[..., 0].min() >= 0.0
    assert lab.data[..., 0].max() <= 100.0


def test_gray_scaling_endpoints():
    raster = np.array([[0, 51], [255, 102]], dtype=np.uint8)
    lab = gray_to_lab(raster)
    assert lab.channels == 1
    assert lab.data[0, 0, 0] == 0.0
    assert lab.data[1, 0, 0] == 100.0
    assert abs(lab.data[0, 1, 0] - 20.0) < 1e-12


def test_conversion_rejects_bad_input():
    with pytest.raises(InputError):
        rgb_to_lab(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(InputError):
        gray_to_lab(np.zeros((4, 4, 3), dtype=np.uint8))
    with pytest.raises(InputError):
        rgb_to_lab(np.zeros((4, 4, 3), dtype=np.float64))
    with pytest.raises(InputError):
        LabImage(np.zeros((4, 4, 2)))
    with pytest.raises(InputError):
        LabImage(np.full((2, 2, 1), np.nan))


def test_patch_spec_validation():
    with pytest.raises(InputError):
        PatchSpec(4)
    with pytest.raises(InputError):
        PatchSpec(-1)
    assert PatchSpec(7).pixel_count == 49
    assert PatchSpec(7).half == 3


def test_patch_constant_image():
    image = LabImage(np.full((5, 5, 1), 3.5))
    patch = patch_at(image, (2, 2), PatchSpec(3))
    assert patch.shape == (9,)
    assert np.all(patch == 3.5)


def test_patch_single_pixel_identity():
    data = np.arange(12, dtype=np.float64).reshape(2, 2, 3)
    image = LabImage(data)
    assert np.array_equal(patch_at(image, (1, 0), PatchSpec(1)), data[0, 1])


def test_corner_patch_matches_index_oracle(rng):
    data = rng.normal(size=(6, 7, 3))
    image = LabImage(data)
    for center in ((0, 0), (6, 5), (0, 5), (3, 2)):
        ours = patch_at(image, center, PatchSpec(3))
        oracle = patch_by_indexing(image.data, center[0], center[1], 1)
        assert np.array_equal(ours, oracle)


def test_patch_distance_properties(rng):
    data = rng.normal(size=(8, 8, 3))
    image = LabImage(data)
    spec = PatchSpec(3)
    assert patch_distance(image, (3, 3), (3, 3), spec) == 0.0
    a, b = (1, 2), (5, 6)
    assert patch_distance(image, a, b, spec) == pytest.approx(
        patch_distance(image, b, a, spec), rel=1e-9
    )
    # direct summation oracle
    pa = patch_by_indexing(image.data, a[0], a[1], 1)
    pb = patch_by_indexing(image.data, b[0], b[1], 1)
    expected = np.sqrt(((pa - pb) ** 2).sum()) / 9
    assert patch_distance(image, a, b, spec) == pytest.approx(expected, rel=1e-12)


def test_patch_distance_constant_image():
    image = LabImage(np.full((6, 6, 3), 2.0))
    assert patch_distance(image, (0, 0), (5, 5), PatchSpec(5)) == 0.0


def test_pad_replicate_matches_clamping(rng):
    data = rng.normal(size=(5, 4, 3))
    image = LabImage(data)
    pad = pad_replicate(image, 2)
    assert pad.shape == (9, 8, 3)
    for y in range(-2, 7):
        for x in range(-2, 6):
            sy = min(max(y, 0), 4)
            sx = min(max(x, 0), 3)
            assert np.array_equal(pad[y + 2, x + 2], data[sy, sx])


@given(st.integers(min_value=0, max_value=255))
@settings(max_examples=50, deadline=None)
def test_gray_level_maps_linearly(v):
    lab = gray_to_lab(np.full((1, 1), v, dtype=np.uint8))
    assert lab.data[0, 0, 0] == pytest.approx(100.0 * v / 255.0, abs=1e-12)


def test_raster_roundtrip_png_and_ppm(tmp_path, rng):
    gray = rng.integers(0, 256, size=(7, 9), dtype=np.uint8)
    color = rng.integers(0, 256, size=(7, 9, 3), dtype=np.uint8)
    for name, arr in (("g.png", gray), ("g.pgm", gray), ("c.png", color), ("c.ppm", color)):
        path = tmp_path / name
        save_raster(path, arr)
        assert np.array_equal(load_raster(path), arr)


def test_to_lab_image_dispatch(rng):
    gray = rng.integers(0, 256, size=(4, 4), dtype=np.uint8)
    color = rng.integers(0, 256, size=(4, 4, 3), dtype=np.uint8)
    assert to_lab_image(gray).channels == 1
    assert to_lab_image(color).channels == 3
    prepared = to_lab_image(color)
    assert to_lab_image(prepared) is prepared
