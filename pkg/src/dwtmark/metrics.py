"""Image and watermark quality measures."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

PEAK = 255.0


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def mse(a, b) -> float:
    """Mean squared error over every sample (all channels for rasters)."""
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a, b) -> float:
    """PSNR in dB against a 255 peak; ``math.inf`` for identical inputs."""
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(PEAK**2 / err)


def corr(a, b, on_constant: float | None = None) -> float:
    """Pearson correlation of the flattened samples.

    Two constant inputs have no defined correlation: that raises unless
    ``on_constant`` supplies the value to report instead.
    """
    a, b = _pair(a, b)
    a = a.ravel() - a.mean()
    b = b.ravel() - b.mean()
    sa = float(np.sqrt(np.dot(a, a)))
    sb = float(np.sqrt(np.dot(b, b)))
    if sa == 0 and sb == 0:
        if on_constant is not None:
            return float(on_constant)
        raise ValueError("correlation undefined for two constant inputs")
    if sa == 0 or sb == 0:
        return 0.0
    return float(np.dot(a, b) / (sa * sb))


def nc(w, w_rec) -> float:
    """Normalized correlation ``sum(w * w') / sum(w**2)``.

    Positions missing from the recovered watermark should be 0 in ``w_rec``.
    """
    w, w_rec = _pair(w, w_rec)
    denom = float(np.sum(w * w))
    if denom == 0:
        raise ValueError("NC undefined for an all-zero reference watermark")
    return float(np.sum(w * w_rec)) / denom


def nc_sqrt(w, w_rec) -> float:
    """Same numerator over ``sqrt(sum(w**2))``; unbounded for binary marks."""
    w, w_rec = _pair(w, w_rec)
    denom = float(np.sqrt(np.sum(w * w)))
    if denom == 0:
        raise ValueError("NC undefined for an all-zero reference watermark")
    return float(np.sum(w * w_rec)) / denom


def error_rate(embedded_count: int, correctly_recovered: int) -> float:
    """Percentage of embedded bits not recovered correctly."""
    if embedded_count <= 0:
        raise ValueError("error rate undefined when nothing was embedded")
    if not 0 <= correctly_recovered <= embedded_count:
        raise ValueError("correctly_recovered must lie in [0, embedded_count]")
    return 100.0 * (embedded_count - correctly_recovered) / embedded_count


@dataclass
class QualityReport:
    mse: float
    psnr: float
    corr: float
    nc: float | None = None
    error_rate_percent: float | None = None

    @classmethod
    def between(cls, host, marked, **extra) -> "QualityReport":
        same = float(np.array_equal(np.asarray(host), np.asarray(marked)))
        return cls(mse=mse(host, marked), psnr=psnr(host, marked), corr=corr(host, marked, on_constant=same), **extra)

    FIELDS = ("mse", "psnr", "corr", "nc", "error_rate_percent")

    def csv_row(self) -> list[str]:
        return [format_number(v) for v in asdict(self).values()]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(self.FIELDS)
        writer.writerow(self.csv_row())
        return buf.getvalue()


def format_number(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{v:.6g}"
    return str(v)
