"""Separable multi-level 2-D DWT with an odd-length biorthogonal filter bank.

Conventions (fixed, tests depend on them):

* boundaries use whole-sample symmetric extension (``d c b | a b c d | c b a``);
* filters are centred on the current sample;
* the lowpass branch keeps even-indexed outputs and the highpass branch keeps
  odd-indexed outputs.  Keeping the same phase in both branches would alias,
  and perfect reconstruction would be impossible.

Each level filters rows first, then columns.  Subbands are named by
(row filter, column filter): ``LH`` is lowpass along rows, highpass along
columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import correlate1d

# Full-precision bior4.4 (CDF 9/7) taps.  Rounded to 4 decimals they are the
# printed 7/9 spline lists; see ``PRINTED_BANK``.
_LO7 = (
    -0.06453888262869706,
    -0.04068941760916406,
    0.41809227322161724,
    0.7884856164055829,
    0.41809227322161724,
    -0.04068941760916406,
    -0.06453888262869706,
)
_HI9 = (
    -0.03782845550726404,
    -0.023849465019556843,
    0.11062440441843718,
    0.37740285561283066,
    -0.8526986790088938,
    0.37740285561283066,
    0.11062440441843718,
    -0.023849465019556843,
    -0.03782845550726404,
)


def _modulate(h):
    """Negate odd-offset taps of a centred odd-length filter: h(z) -> h(-z)."""
    c = len(h) // 2
    return tuple(v if (k - c) % 2 == 0 else -v for k, v in enumerate(h))


@dataclass(frozen=True)
class FilterBank:
    analysis_lowpass: tuple
    analysis_highpass: tuple
    synthesis_lowpass: tuple
    synthesis_highpass: tuple

    def __post_init__(self):
        for name in ("analysis_lowpass", "analysis_highpass", "synthesis_lowpass", "synthesis_highpass"):
            taps = np.asarray(getattr(self, name), dtype=float)
            if taps.ndim != 1 or len(taps) % 2 == 0:
                raise ValueError(f"{name} must be an odd-length 1-D filter")
            if not np.allclose(taps, taps[::-1], rtol=0, atol=0):
                raise ValueError(f"{name} must be symmetric")
            object.__setattr__(self, name, tuple(float(v) for v in taps))

    def arrays(self):
        return tuple(
            np.asarray(t)
            for t in (self.analysis_lowpass, self.analysis_highpass, self.synthesis_lowpass, self.synthesis_highpass)
        )


DEFAULT_BANK = FilterBank(
    analysis_lowpass=_LO7,
    analysis_highpass=_HI9,
    synthesis_lowpass=tuple(-v for v in _modulate(_HI9)),
    synthesis_highpass=tuple(-v for v in _modulate(_LO7)),
)

# The 4-decimal lists exactly as printed.  Rounding breaks perfect
# reconstruction at the ~1e-2 level on 8-bit data, so this bank is kept for
# reference and comparison only.
PRINTED_BANK = FilterBank(
    analysis_lowpass=(-0.0645, -0.0407, 0.4181, 0.7885, 0.4181, -0.0407, -0.0645),
    analysis_highpass=(-0.0378, -0.0238, 0.1106, 0.3774, -0.8527, 0.3774, 0.1106, -0.0238, -0.0378),
    synthesis_lowpass=(0.0378, -0.0238, -0.1106, 0.3774, 0.8527, 0.3774, -0.1106, -0.0238, 0.0378),
    synthesis_highpass=(-0.0645, 0.0407, 0.4181, -0.7885, 0.4181, 0.0407, -0.0645),
)


@dataclass
class WaveletPyramid:
    """``details[k]`` holds the ``(LH, HL, HH)`` triple of level ``k + 1``."""

    approx: np.ndarray
    details: list = field(default_factory=list)
    original_shape: tuple = ()

    @property
    def levels(self) -> int:
        return len(self.details)

    def copy(self) -> "WaveletPyramid":
        return WaveletPyramid(
            self.approx.copy(),
            [tuple(b.copy() for b in trio) for trio in self.details],
            tuple(self.original_shape),
        )

    def subband_count(self) -> int:
        return 1 + 3 * self.levels


def _analyze(x: np.ndarray, lo: np.ndarray, hi: np.ndarray, axis: int):
    low = correlate1d(x, lo, axis=axis, mode="mirror")
    high = correlate1d(x, hi, axis=axis, mode="mirror")
    even = [slice(None)] * x.ndim
    odd = [slice(None)] * x.ndim
    even[axis] = slice(0, None, 2)
    odd[axis] = slice(1, None, 2)
    return low[tuple(even)], high[tuple(odd)]


def _synthesize(low: np.ndarray, high: np.ndarray, lo: np.ndarray, hi: np.ndarray, axis: int):
    shape = list(low.shape)
    shape[axis] *= 2
    up_lo = np.zeros(shape)
    up_hi = np.zeros(shape)
    even = [slice(None)] * low.ndim
    odd = [slice(None)] * low.ndim
    even[axis] = slice(0, None, 2)
    odd[axis] = slice(1, None, 2)
    up_lo[tuple(even)] = low
    up_hi[tuple(odd)] = high
    return correlate1d(up_lo, lo, axis=axis, mode="mirror") + correlate1d(up_hi, hi, axis=axis, mode="mirror")


def dwt2_level(plane: np.ndarray, fb: FilterBank = DEFAULT_BANK):
    """One analysis level: returns ``(LL, (LH, HL, HH))``."""
    lo, hi, _, _ = fb.arrays()
    row_lo, row_hi = _analyze(plane, lo, hi, axis=1)
    ll, lh = _analyze(row_lo, lo, hi, axis=0)
    hl, hh = _analyze(row_hi, lo, hi, axis=0)
    return ll, (lh, hl, hh)


def idwt2_level(ll, details, fb: FilterBank = DEFAULT_BANK) -> np.ndarray:
    _, _, lo, hi = fb.arrays()
    lh, hl, hh = details
    for band in details:
        if band.shape != ll.shape:
            raise ValueError(f"subband shape {band.shape} does not match approximation {ll.shape}")
    row_lo = _synthesize(ll, lh, lo, hi, axis=0)
    row_hi = _synthesize(hl, hh, lo, hi, axis=0)
    return _synthesize(row_lo, row_hi, lo, hi, axis=1)


def forward_dwt2(plane, levels: int = 3, fb: FilterBank = DEFAULT_BANK) -> WaveletPyramid:
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError("forward_dwt2 expects a 2-D plane")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    step = 2**levels
    h, w = plane.shape
    if h % step or w % step:
        raise ValueError(f"plane size {h}x{w} is not divisible by 2**{levels} = {step}")
    approx = plane
    details = []
    for _ in range(levels):
        approx, trio = dwt2_level(approx, fb)
        details.append(trio)
    return WaveletPyramid(approx, details, (h, w))


def inverse_dwt2(pyr: WaveletPyramid, fb: FilterBank = DEFAULT_BANK) -> np.ndarray:
    out = np.asarray(pyr.approx, dtype=np.float64)
    for trio in reversed(pyr.details):
        out = idwt2_level(out, trio, fb)
    if pyr.original_shape and out.shape != tuple(pyr.original_shape):
        raise ValueError(f"reconstructed shape {out.shape} != original {tuple(pyr.original_shape)}")
    return out
