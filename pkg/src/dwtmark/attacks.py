"""Deterministic attack simulators: JPEG-style compression, rotation, median."""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import affine_transform, median_filter

from .color import Mode, PlaneSet, as_raster, quantize, rgb_to_ycbcr, ycbcr_to_rgb

# ITU-T T.81 Annex K baseline tables.
LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)
CHROMA_TABLE = np.array(
    [
        [17, 18, 24, 47, 99, 99, 99, 99],
        [18, 21, 26, 66, 99, 99, 99, 99],
        [24, 26, 56, 99, 99, 99, 99, 99],
        [47, 66, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
    ],
    dtype=np.float64,
)
BLOCK = 8
# Rough size of a baseline JFIF header with two quantization and four Huffman tables.
HEADER_BITS = 8 * 600
CR_TOLERANCE = 0.05


class AttackKind(str, enum.Enum):
    JPEG_CR = "jpeg"
    JPEG_Q = "jpeg-quality"
    ROTATE = "rotate"
    MEDIAN = "median"


class AttackSpecError(ValueError):
    pass


@dataclass(frozen=True)
class AttackSpec:
    kind: AttackKind
    cr: float | None = None
    quality: float | None = None
    angle: float | None = None
    window: int | None = None

    def __post_init__(self):
        if self.kind is AttackKind.JPEG_CR:
            if self.cr is None or not self.cr > 1:
                raise AttackSpecError(f"jpeg attack needs cr > 1, got {self.cr}")
        elif self.kind is AttackKind.JPEG_Q:
            if self.quality is None or not 1 <= self.quality <= 100:
                raise AttackSpecError(f"jpeg quality must lie in [1, 100], got {self.quality}")
        elif self.kind is AttackKind.ROTATE:
            if self.angle is None or not -180 < self.angle <= 180:
                raise AttackSpecError(f"rotation angle must lie in (-180, 180], got {self.angle}")
        elif self.kind is AttackKind.MEDIAN:
            if self.window not in (3, 5):
                raise AttackSpecError(f"median window must be 3 or 5, got {self.window}")

    @classmethod
    def parse(cls, text: str) -> "AttackSpec":
        """Parse ``jpeg:cr=15``, ``jpeg:q=75``, ``rotate:angle=-60`` or ``median:window=3``."""
        m = re.fullmatch(r"\s*(\w+)\s*:\s*(\w+)\s*=\s*([-+0-9.eE]+)\s*", text)
        if not m:
            raise AttackSpecError(f"cannot parse attack spec {text!r}")
        name, arg, value = m.group(1).lower(), m.group(2).lower(), m.group(3)
        expected = {"jpeg": ("cr", "q"), "rotate": ("angle",), "median": ("window",)}
        if name not in expected or arg not in expected[name]:
            raise AttackSpecError(f"unknown attack spec {text!r}")
        try:
            number = float(value)
        except ValueError:
            raise AttackSpecError(f"bad number in attack spec {text!r}") from None
        if not math.isfinite(number):
            raise AttackSpecError(f"bad number in attack spec {text!r}")
        if name == "jpeg":
            if arg == "q":
                return cls(AttackKind.JPEG_Q, quality=number)
            return cls(AttackKind.JPEG_CR, cr=number)
        if name == "rotate":
            return cls(AttackKind.ROTATE, angle=number)
        if number != int(number):
            raise AttackSpecError(f"median window must be an integer, got {value}")
        return cls(AttackKind.MEDIAN, window=int(number))

    def label(self) -> str:
        if self.kind is AttackKind.JPEG_CR:
            return f"jpeg:cr={self.cr:g}"
        if self.kind is AttackKind.JPEG_Q:
            return f"jpeg:q={self.quality:g}"
        if self.kind is AttackKind.ROTATE:
            return f"rotate:angle={self.angle:g}"
        return f"median:window={self.window}"

    def apply(self, img) -> np.ndarray:
        if self.kind is AttackKind.JPEG_CR:
            return jpeg_attack(img, self.cr)
        if self.kind is AttackKind.JPEG_Q:
            return jpeg_compress(img, self.quality).image
        if self.kind is AttackKind.ROTATE:
            return rotate_attack(img, self.angle)
        return median_attack(img, self.window)


# --- JPEG-style compression -------------------------------------------------


def scaled_table(base: np.ndarray, quality: float) -> np.ndarray:
    """IJG quality scaling, continuous in ``quality`` on [1, 100]."""
    quality = min(max(quality, 1.0), 100.0)
    scale = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    return np.clip(np.floor((base * scale + 50.0) / 100.0), 1, 255)


def _blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK).swapaxes(1, 2)


def _unblocks(blocks: np.ndarray) -> np.ndarray:
    bh, bw = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(bh * BLOCK, bw * BLOCK)


@dataclass
class JpegResult:
    image: np.ndarray
    quality: float
    achieved_cr: float
    target_cr: float | None = None

    @property
    def converged(self) -> bool:
        return self.target_cr is None or abs(self.achieved_cr / self.target_cr - 1) <= CR_TOLERANCE


def _pad_to_blocks(img: np.ndarray) -> np.ndarray:
    h, w = img.shape[:2]
    ph, pw = -h % BLOCK, -w % BLOCK
    if ph or pw:
        img = np.pad(img, ((0, ph), (0, pw), (0, 0)), mode="edge")
    return img


def jpeg_compress(img, quality: float) -> JpegResult:
    """Quantize the 8x8 DCT of each YCbCr plane at ``quality`` and decode."""
    img = as_raster(img)
    h, w = img.shape[:2]
    ycc = rgb_to_ycbcr(_pad_to_blocks(img))
    tables = (scaled_table(LUMA_TABLE, quality), scaled_table(CHROMA_TABLE, quality), scaled_table(CHROMA_TABLE, quality))
    planes = []
    symbols = []
    for plane, table in zip(ycc.planes, tables):
        coeffs = dctn(_blocks(plane - 128.0), axes=(2, 3), norm="ortho")
        q = np.rint(coeffs / table)
        symbols.append(q.ravel())
        planes.append(_unblocks(idctn(q * table, axes=(2, 3), norm="ortho")) + 128.0)
    out = ycbcr_to_rgb(PlaneSet(np.stack(planes), Mode.YCBCR))[:h, :w]
    return JpegResult(out, quality, compression_ratio(np.concatenate(symbols), h * w * 3 * 8))


def compression_ratio(symbols: np.ndarray, raw_bits: int) -> float:
    """Raw bits over zeroth-order entropy of the symbol stream plus a header."""
    _, counts = np.unique(symbols, return_counts=True)
    p = counts / symbols.size
    entropy = float(-(p * np.log2(p)).sum())
    return raw_bits / (entropy * symbols.size + HEADER_BITS)


def jpeg_attack_result(img, target_cr: float, iterations: int = 40) -> JpegResult:
    """Bisect the quality factor until the estimated CR is within 5% of target.

    When the target is out of reach on ``[1, 100]`` the closest endpoint is
    returned; check ``converged``.
    """
    if not target_cr > 1:
        raise ValueError("target compression ratio must exceed 1")
    lo, hi = 1.0, 100.0
    coarse, fine = jpeg_compress(img, lo), jpeg_compress(img, hi)
    # CR falls as quality rises.
    if coarse.achieved_cr <= target_cr:
        coarse.target_cr = target_cr
        return coarse
    if fine.achieved_cr >= target_cr:
        fine.target_cr = target_cr
        return fine
    best = min((coarse, fine), key=lambda r: abs(r.achieved_cr - target_cr))
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        res = jpeg_compress(img, mid)
        if abs(res.achieved_cr - target_cr) < abs(best.achieved_cr - target_cr):
            best = res
        if abs(res.achieved_cr / target_cr - 1) <= CR_TOLERANCE / 4:
            break
        if res.achieved_cr > target_cr:
            lo = mid
        else:
            hi = mid
    best.target_cr = target_cr
    return best


def jpeg_attack(img, target_cr: float) -> np.ndarray:
    return jpeg_attack_result(img, target_cr).image


# --- rotation ---------------------------------------------------------------


def _loose_shape(h: int, w: int, angle: float) -> tuple[int, int]:
    """Canvas that holds the whole rotated image, same parity as the input."""
    theta = math.radians(angle)
    c, s = abs(math.cos(theta)), abs(math.sin(theta))
    # Snap away float noise such as cos(90 deg) = 6e-17 before taking the ceiling.
    nh = math.ceil(round(h * c + w * s, 9))
    nw = math.ceil(round(h * s + w * c, 9))
    return nh + (nh - h) % 2, nw + (nw - w) % 2


def _rotate_onto(img: np.ndarray, angle: float, out_shape: tuple[int, int]) -> np.ndarray:
    """Bilinear rotation about the centre onto an ``out_shape`` canvas.

    Positive angles turn the picture counter-clockwise on screen.  The
    source is extended with zeros, so edge pixels blend into black.
    """
    h, w = img.shape[:2]
    oh, ow = out_shape
    theta = math.radians(angle)
    c, s = math.cos(theta), math.sin(theta)
    # Output (row, col) -> source (row, col); rows point down.
    matrix = np.array([[c, s], [-s, c]])
    src_center = np.array([(h - 1) / 2.0, (w - 1) / 2.0])
    out_center = np.array([(oh - 1) / 2.0, (ow - 1) / 2.0])
    offset = src_center - matrix @ out_center
    out = np.empty((oh, ow, 3), dtype=np.float64)
    for ch in range(3):
        out[..., ch] = affine_transform(
            img[..., ch].astype(np.float64),
            matrix,
            offset=offset,
            output_shape=(oh, ow),
            order=1,
            mode="grid-constant",
            cval=0.0,
        )
    return quantize(out)


def rotate(img, angle: float) -> np.ndarray:
    """Rotate onto a canvas large enough to keep every source pixel."""
    img = as_raster(img)
    turns = angle / 90.0
    if turns == int(turns):
        return np.ascontiguousarray(np.rot90(img, int(turns) % 4))
    return _rotate_onto(img, angle, _loose_shape(img.shape[0], img.shape[1], angle))


def rotate_attack(img, angle: float) -> np.ndarray:
    """Rotate by ``angle``, rotate back by ``-angle`` and crop to the input size.

    The intermediate rotated picture is itself an 8-bit raster.
    """
    img = as_raster(img)
    turned = rotate(img, angle)
    if angle / 90.0 == int(angle / 90.0):
        back = rotate(turned, -angle)
        dh, dw = (back.shape[0] - img.shape[0]) // 2, (back.shape[1] - img.shape[1]) // 2
        return np.ascontiguousarray(back[dh : dh + img.shape[0], dw : dw + img.shape[1]])
    return _rotate_onto(turned, -angle, img.shape[:2])


# --- median -----------------------------------------------------------------


def median_attack(img, window: int) -> np.ndarray:
    if window not in (3, 5):
        raise ValueError(f"median window must be 3 or 5, got {window}")
    img = as_raster(img)
    return median_filter(img, size=(window, window, 1), mode="nearest")
