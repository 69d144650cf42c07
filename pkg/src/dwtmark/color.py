"""RGB <-> YCbCr conversion on 8-bit rasters.

A raster is an ``(H, W, 3)`` ``uint8`` array (row-major, interleaved RGB).
Planes stay floating point between the forward and inverse conversion; the
only rounding happens when a raster is written back.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Mode(str, enum.Enum):
    YCBCR = "YCBCR"
    RGB = "RGB"


# Full-range (JPEG/JFIF) BT.601.
RGB_TO_YCBCR = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)
CHROMA_OFFSET = np.array([0.0, 128.0, 128.0])
# Exact inverse of the forward matrix, so an unmodified round trip is lossless.
YCBCR_TO_RGB = np.linalg.inv(RGB_TO_YCBCR)


def as_raster(img) -> np.ndarray:
    """Validate and return ``img`` as an ``(H, W, 3)`` uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"raster must have shape (H, W, 3), got {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer) or arr.min() < 0 or arr.max() > 255:
            raise ValueError("raster samples must be integers in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize(x: np.ndarray) -> np.ndarray:
    """Round half away from zero, clamp to [0, 255], cast to uint8."""
    return np.clip(round_half_away(x), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class PlaneSet:
    """Three float planes of equal shape, stacked as ``(3, H, W)``."""

    planes: np.ndarray
    mode: Mode

    def __post_init__(self):
        if self.planes.ndim != 3 or self.planes.shape[0] != 3:
            raise ValueError(f"expected (3, H, W) planes, got {self.planes.shape}")

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.planes[i]

    def replace(self, index: int, plane: np.ndarray) -> "PlaneSet":
        if plane.shape != self.planes.shape[1:]:
            raise ValueError("replacement plane has the wrong shape")
        planes = self.planes.copy()
        planes[index] = plane
        return PlaneSet(planes, self.mode)


def rgb_to_ycbcr(img) -> PlaneSet:
    rgb = as_raster(img).astype(np.float64)
    ycc = rgb @ RGB_TO_YCBCR.T + CHROMA_OFFSET
    return PlaneSet(np.moveaxis(ycc, -1, 0).copy(), Mode.YCBCR)


def ycbcr_to_rgb(p: PlaneSet) -> np.ndarray:
    if p.mode is not Mode.YCBCR:
        raise ValueError("ycbcr_to_rgb needs a YCBCR plane set")
    ycc = np.moveaxis(p.planes, 0, -1) - CHROMA_OFFSET
    return quantize(ycc @ YCBCR_TO_RGB.T)


def rgb_planes(img) -> PlaneSet:
    rgb = as_raster(img).astype(np.float64)
    return PlaneSet(np.moveaxis(rgb, -1, 0).copy(), Mode.RGB)


def planes_to_raster(p: PlaneSet) -> np.ndarray:
    """Write a plane set of either mode back to an 8-bit raster."""
    if p.mode is Mode.YCBCR:
        return ycbcr_to_rgb(p)
    return quantize(np.moveaxis(p.planes, 0, -1))
