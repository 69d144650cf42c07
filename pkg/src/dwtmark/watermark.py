"""Blind quantization watermarking of the coarsest DWT approximation band.

Selected approximation coefficients (``T1 < |w| < T2``) are forced to one of
two magnitudes, ``T1 + X1`` for a 0 bit and ``T2 - X1`` for a 1 bit, keeping
their sign.  Extraction re-selects everything in ``[T1 + X2, T2 - X2]`` and
decodes each magnitude against the midpoint ``(T1 + T2) / 2``; it never sees
the host image.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace

import numpy as np

from . import metrics
from .color import PlaneSet, as_raster, planes_to_raster, rgb_planes, rgb_to_ycbcr
from .dwt import DEFAULT_BANK, FilterBank, forward_dwt2, inverse_dwt2

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = np.uint64(0x9E3779B97F4B7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)

# Re-rasterization passes allowed to undo clipping drift.
COMPENSATION_PASSES = 8

# Blind presence decision.
PRESENCE_SCORE = 0.9
PRESENCE_MIN_BITS = 16


class ChannelMode(str, enum.Enum):
    YCBCR_Y = "YCBCR_Y"
    RGB_R = "RGB_R"
    RGB_G = "RGB_G"
    RGB_B = "RGB_B"

    @classmethod
    def parse(cls, text: str) -> "ChannelMode":
        aliases = {"Y": cls.YCBCR_Y, "YCBCR": cls.YCBCR_Y, "R": cls.RGB_R, "G": cls.RGB_G, "B": cls.RGB_B, "RGB": cls.RGB_G}
        key = text.strip().upper().replace("-", "_")
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class EmbedParams:
    t1: float = 1500.0
    t2: float = 1600.0
    x1: float = 20.0
    x2: float = 10.0
    key: int = 0
    levels: int = 3
    channel_mode: ChannelMode = ChannelMode.YCBCR_Y

    def __post_init__(self):
        object.__setattr__(self, "channel_mode", ChannelMode(self.channel_mode))
        if not 0 < self.t1 < self.t2:
            raise ValueError(f"need 0 < T1 < T2, got T1={self.t1}, T2={self.t2}")
        if not 0 < self.x2 < self.x1 < (self.t2 - self.t1) / 2:
            raise ValueError(
                f"need 0 < X2 < X1 < (T2 - T1)/2, got X1={self.x1}, X2={self.x2}, (T2 - T1)/2={(self.t2 - self.t1) / 2}"
            )
        if not 0 <= self.key <= MASK64:
            raise ValueError("key must be an unsigned 64-bit integer")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")

    @property
    def zero_level(self) -> float:
        return self.t1 + self.x1

    @property
    def one_level(self) -> float:
        return self.t2 - self.x1

    @property
    def extract_range(self) -> tuple[float, float]:
        return self.t1 + self.x2, self.t2 - self.x2

    @property
    def midpoint(self) -> float:
        return (self.t1 + self.t2) / 2


def generate_watermark(key: int, rows: int, cols: int) -> np.ndarray:
    """Key-seeded binary matrix, bits taken row-major from a splitmix64 stream."""
    if rows < 1 or cols < 1:
        raise ValueError("watermark needs at least one row and one column")
    if not 0 <= key <= MASK64:
        raise ValueError("key must be an unsigned 64-bit integer")
    steps = np.arange(1, rows * cols + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key) + steps * GOLDEN_GAMMA
        z = (z ^ (z >> np.uint64(30))) * MIX1
        z = (z ^ (z >> np.uint64(27))) * MIX2
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(63)).astype(np.uint8).reshape(rows, cols)


def sign_matrix(coeffs: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(coeffs) >= 0, 1, -1).astype(np.int8)


def select_coefficients(ll: np.ndarray, t1: float, t2: float) -> list[tuple[int, int]]:
    """Row-major positions with ``t1 < |coefficient| < t2``."""
    if not t1 < t2:
        raise ValueError("need T1 < T2")
    mag = np.abs(ll)
    rows, cols = np.nonzero((mag > t1) & (mag < t2))
    return list(zip(rows.tolist(), cols.tolist()))


def select_for_extraction(ll: np.ndarray, params: EmbedParams) -> list[tuple[int, int]]:
    """Row-major positions with ``T1 + X2 <= |coefficient| <= T2 - X2``."""
    lo, hi = params.extract_range
    mag = np.abs(ll)
    rows, cols = np.nonzero((mag >= lo) & (mag <= hi))
    return list(zip(rows.tolist(), cols.tolist()))


def decode_bit(coefficient: float, params: EmbedParams) -> int:
    return int(abs(coefficient) >= params.midpoint)


def quantize_coefficients(ll: np.ndarray, positions, bits: np.ndarray, params: EmbedParams) -> np.ndarray:
    """Set each selected magnitude to its bit's level and restore the sign."""
    out = ll.copy()
    if not positions:
        return out
    signs = sign_matrix(ll)
    r, c = np.array(positions).T
    magnitude = np.where(bits[r, c] == 0, params.zero_level, params.one_level)
    out[r, c] = signs[r, c] * magnitude
    return out


def suggest_thresholds(ll: np.ndarray) -> tuple[float, float]:
    """``(T1, T2)`` at 45% and 85% of the largest approximation magnitude."""
    ll = np.asarray(ll, dtype=np.float64)
    if ll.size == 0:
        raise ValueError("empty approximation band")
    peak = float(np.max(np.abs(ll)))
    if peak == 0:
        raise ValueError("all-zero approximation band has no meaningful thresholds")
    return 0.45 * peak, 0.85 * peak


def designated_plane(img, mode: ChannelMode) -> tuple[PlaneSet, int]:
    mode = ChannelMode(mode)
    if mode is ChannelMode.YCBCR_Y:
        return rgb_to_ycbcr(img), 0
    return rgb_planes(img), "RGB".index(mode.value[-1])


def approximation_band(img, params: EmbedParams, fb: FilterBank = DEFAULT_BANK) -> np.ndarray:
    planes, idx = designated_plane(img, params.channel_mode)
    return forward_dwt2(planes[idx], params.levels, fb).approx


@dataclass
class EmbedReport:
    positions: list
    shape: tuple
    psnr: float
    corr: float
    params: EmbedParams | None = None

    def __post_init__(self):
        self.positions = sorted(tuple(int(v) for v in p) for p in self.positions)
        self.shape = tuple(int(v) for v in self.shape)

    @property
    def embedded_count(self) -> int:
        return len(self.positions)

    @property
    def warning(self) -> str | None:
        if not self.positions:
            return "0 bits embedded: no approximation coefficients fall inside (T1, T2)"
        return None


@dataclass
class ExtractionReport:
    recovered: dict
    shape: tuple
    nc: float | None = None
    nc_sqrt: float | None = None
    error_rate_percent: float | None = None
    correctly_recovered: int | None = None
    embedded_count: int | None = None
    score: float | None = None
    present: bool | None = None

    @property
    def extracted_count(self) -> int:
        return len(self.recovered)

    def __post_init__(self):
        self.shape = tuple(int(v) for v in self.shape)

    def bit_matrix(self) -> np.ndarray:
        """Recovered bits on the band grid; unrecovered positions are 0."""
        out = np.zeros(self.shape, dtype=np.uint8)
        for (i, j), b in self.recovered.items():
            out[i, j] = b
        return out


def _rasterize(pyr, target, planes, idx, positions, params, fb, passes=COMPENSATION_PASSES):
    """Invert the modified pyramid to 8-bit pixels.

    Clipping at 0 or 255 can drag a quantized coefficient further than the
    X1 - X2 margin.  When it does, the target fed to the inverse transform is
    nudged by the measured shortfall and the raster is rebuilt; the pass with
    the smallest drift wins.
    """
    rows, cols = (np.array(positions).T if positions else (np.array([], int), np.array([], int)))
    goal = target[rows, cols]
    margin = 0.5 * (params.x1 - params.x2)
    drive = target.copy()
    best, best_drift = None, np.inf
    for _ in range(passes):
        trial = pyr.copy()
        trial.approx = drive
        out = planes_to_raster(planes.replace(idx, inverse_dwt2(trial, fb)))
        got = approximation_band(out, params, fb)[rows, cols]
        drift = float(np.max(np.abs(got - goal))) if len(goal) else 0.0
        if drift < best_drift:
            best, best_drift = out, drift
        if drift < margin:
            break
        drive = drive.copy()
        drive[rows, cols] += goal - got
    return best


def embed(host, params: EmbedParams, fb: FilterBank = DEFAULT_BANK) -> tuple[np.ndarray, EmbedReport]:
    host = as_raster(host)
    planes, idx = designated_plane(host, params.channel_mode)
    pyr = forward_dwt2(planes[idx], params.levels, fb)
    positions = select_coefficients(pyr.approx, params.t1, params.t2)
    bits = generate_watermark(params.key, *pyr.approx.shape)
    target = quantize_coefficients(pyr.approx, positions, bits, params)
    out = _rasterize(pyr, target, planes, idx, positions, params, fb)
    fidelity = metrics.corr(host, out, on_constant=float(np.array_equal(host, out)))
    report = EmbedReport(positions, pyr.approx.shape, metrics.psnr(host, out), fidelity, params)
    if report.warning:
        log.warning(report.warning)
    return out, report


def extract(img, params: EmbedParams, fb: FilterBank = DEFAULT_BANK) -> ExtractionReport:
    ll = approximation_band(as_raster(img), params, fb)
    recovered = {(i, j): decode_bit(ll[i, j], params) for i, j in select_for_extraction(ll, params)}
    return ExtractionReport(recovered, ll.shape)


def verify(extraction: ExtractionReport, key: int, embed_report: EmbedReport | None = None) -> ExtractionReport:
    """Score an extraction against the watermark regenerated from ``key``.

    Always fills the blind presence score.  With the embedding report it also
    fills the error rate and NC over the embedded positions.
    """
    shape = extraction.shape
    if embed_report is not None and embed_report.shape != shape:
        raise ValueError(f"band shapes differ: extraction {shape}, embedding {embed_report.shape}")
    mark = generate_watermark(key, *shape)

    matches = sum(1 for (i, j), b in extraction.recovered.items() if mark[i, j] == b)
    n = extraction.extracted_count
    score = matches / n if n else 0.0
    result = replace(extraction, score=score, present=bool(n >= PRESENCE_MIN_BITS and score >= PRESENCE_SCORE))
    if embed_report is None or embed_report.embedded_count == 0:
        return result

    correct = sum(1 for p in embed_report.positions if extraction.recovered.get(p) == mark[p])
    reference = np.zeros(shape)
    for p in embed_report.positions:
        reference[p] = mark[p]
    rec = extraction.bit_matrix().astype(np.float64)
    has_ones = reference.any()
    result.correctly_recovered = correct
    result.embedded_count = embed_report.embedded_count
    result.error_rate_percent = metrics.error_rate(embed_report.embedded_count, correct)
    result.nc = metrics.nc(reference, rec) if has_ones else float(correct == embed_report.embedded_count)
    result.nc_sqrt = metrics.nc_sqrt(reference, rec) if has_ones else None
    return result
