"""Blind DWT watermarking in YCbCr colour space."""

from .attacks import AttackSpec, jpeg_attack, median_attack, rotate_attack
from .color import PlaneSet, rgb_to_ycbcr, ycbcr_to_rgb
from .dwt import DEFAULT_BANK, PRINTED_BANK, FilterBank, WaveletPyramid, forward_dwt2, inverse_dwt2
from .watermark import (
    ChannelMode,
    EmbedParams,
    EmbedReport,
    ExtractionReport,
    embed,
    extract,
    generate_watermark,
    select_coefficients,
    suggest_thresholds,
    verify,
)

__all__ = [
    "AttackSpec",
    "ChannelMode",
    "DEFAULT_BANK",
    "EmbedParams",
    "EmbedReport",
    "ExtractionReport",
    "FilterBank",
    "PRINTED_BANK",
    "PlaneSet",
    "WaveletPyramid",
    "embed",
    "extract",
    "forward_dwt2",
    "generate_watermark",
    "inverse_dwt2",
    "jpeg_attack",
    "median_attack",
    "rgb_to_ycbcr",
    "rotate_attack",
    "select_coefficients",
    "suggest_thresholds",
    "verify",
    "ycbcr_to_rgb",
]
