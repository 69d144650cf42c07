import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dwtmark.color import (
    Mode,
    PlaneSet,
    as_raster,
    planes_to_raster,
    rgb_planes,
    rgb_to_ycbcr,
    round_half_away,
    ycbcr_to_rgb,
)

rasters = arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6), st.just(3)))


def pixel(r, g, b):
    return np.array([[[r, g, b]]], dtype=np.uint8)


def test_black_is_zero_luma_neutral_chroma():
    p = rgb_to_ycbcr(pixel(0, 0, 0))
    assert p.mode is Mode.YCBCR
    assert p.planes[:, 0, 0] == pytest.approx([0.0, 128.0, 128.0], abs=1e-12)


def test_white_is_full_luma_neutral_chroma():
    p = rgb_to_ycbcr(pixel(255, 255, 255))
    assert p.planes[:, 0, 0] == pytest.approx([255.0, 128.0, 128.0], abs=1e-9)


def test_pure_red_golden_values():
    # By hand: Y = 0.299*255, Cb = 128 - 0.168736*255, Cr = 128 + 0.5*255.
    p = rgb_to_ycbcr(pixel(255, 0, 0))
    assert p.planes[:, 0, 0] == pytest.approx([76.245, 84.97232, 255.5], abs=1e-9)


def test_forward_keeps_fractional_values():
    p = rgb_to_ycbcr(pixel(255, 0, 0))
    assert p.planes.dtype == np.float64
    assert p.planes[0, 0, 0] != round(p.planes[0, 0, 0])


def test_neutral_ycbcr_maps_to_black():
    p = PlaneSet(np.array([[[0.0]], [[128.0]], [[128.0]]]), Mode.YCBCR)
    assert ycbcr_to_rgb(p).tolist() == [[[0, 0, 0]]]


def test_red_golden_inverse_is_clamped_into_range():
    p = PlaneSet(np.array([[[76.245]], [[84.972]], [[255.5]]]), Mode.YCBCR)
    out = ycbcr_to_rgb(p)
    assert out.dtype == np.uint8
    assert out.tolist() == [[[255, 0, 0]]]


def test_out_of_gamut_values_clamp():
    p = PlaneSet(np.array([[[255.0]], [[128.0]], [[255.0]]]), Mode.YCBCR)
    r, g, b = ycbcr_to_rgb(p)[0, 0]
    # Unclamped R would be 255 + 1.402 * 127 ~ 433.
    assert r == 255 and g < 255 and b == 255


def test_rounding_is_half_away_from_zero():
    assert round_half_away(np.array([0.5, 1.5, 2.5, -0.5, -1.5, 2.4999])).tolist() == [1, 2, 3, -1, -2, 2]


@settings(max_examples=200, deadline=None)
@given(rasters)
def test_round_trip_is_exact(img):
    assert np.array_equal(ycbcr_to_rgb(rgb_to_ycbcr(img)), img)


@settings(max_examples=200, deadline=None)
@given(rasters, st.floats(0, 20), st.integers(0, 2**32 - 1))
def test_luma_perturbation_bound(img, d, seed):
    p = rgb_to_ycbcr(img)
    delta = np.random.default_rng(seed).uniform(-d, d, size=p.planes.shape[1:])
    out = ycbcr_to_rgb(p.replace(0, p.planes[0] + delta))
    diff = np.abs(out.astype(int) - img.astype(int))
    assert diff.max() <= math.ceil(d) + 1


def test_rgb_mode_round_trip(rng):
    img = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    p = rgb_planes(img)
    assert p.mode is Mode.RGB
    assert np.array_equal(planes_to_raster(p), img)


def test_ycbcr_to_rgb_rejects_rgb_planes(rng):
    with pytest.raises(ValueError):
        ycbcr_to_rgb(rgb_planes(rng.integers(0, 256, size=(2, 2, 3), dtype=np.uint8)))


@pytest.mark.parametrize("bad", [np.zeros((4, 4)), np.zeros((4, 4, 4)), np.full((2, 2, 3), 300)])
def test_as_raster_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        as_raster(bad)
