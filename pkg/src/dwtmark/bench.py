"""Benchmark harness: embed -> attack -> extract -> verify over an attack grid."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import metrics
from .attacks import AttackKind, AttackSpec, jpeg_attack_result
from .fileio import ImageIOError, read_image
from .watermark import ChannelMode, EmbedParams, embed, extract, verify

log = logging.getLogger(__name__)

CRS = (5, 10, 15, 20)
ANGLES = (20, -60, 130, -110)
WINDOWS = (3, 5)
MODES = (ChannelMode.YCBCR_Y, ChannelMode.RGB_G)
STANDARD_IMAGES = ("lenna", "bust", "peppers")

COLUMNS = (
    "image",
    "mode",
    "attack",
    "embedded",
    "extracted",
    "correct",
    "nc",
    "error_rate",
    "psnr",
    "corr",
    "achieved_cr",
)


def default_attacks() -> list[AttackSpec]:
    return (
        [AttackSpec(AttackKind.JPEG_CR, cr=float(cr)) for cr in CRS]
        + [AttackSpec(AttackKind.ROTATE, angle=float(a)) for a in ANGLES]
        + [AttackSpec(AttackKind.MEDIAN, window=w) for w in WINDOWS]
    )


def bundled_image(name: str) -> Path:
    return Path(str(resources.files("dwtmark") / "data" / f"{name}.png"))


def standard_images() -> list[Path]:
    return [bundled_image(n) for n in STANDARD_IMAGES]


@dataclass
class BenchSuite:
    images: list
    attacks: list = field(default_factory=default_attacks)
    modes: tuple = MODES
    params: EmbedParams = field(default_factory=EmbedParams)


@dataclass
class BenchRow:
    image: str
    mode: str
    attack: str
    embedded: int
    extracted: int
    correct: int
    nc: float | None
    error_rate: float | None
    psnr: float
    corr: float
    achieved_cr: float | None = None

    def as_csv(self) -> list[str]:
        def fixed(v, digits):
            if v is None:
                return ""
            return "inf" if v == float("inf") else f"{v:.{digits}f}"

        return [
            self.image,
            self.mode,
            self.attack,
            str(self.embedded),
            str(self.extracted),
            str(self.correct),
            fixed(self.nc, 4),
            fixed(self.error_rate, 4),
            fixed(self.psnr, 4),
            fixed(self.corr, 6),
            fixed(self.achieved_cr, 2),
        ]


@dataclass
class BenchResult:
    rows: list
    missing: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in self.rows:
            writer.writerow(row.as_csv())
        return buf.getvalue()


def _row(name, mode, label, host, attacked, report, extraction, achieved_cr=None) -> BenchRow:
    scored = verify(extraction, report.params.key, report)
    return BenchRow(
        image=name,
        mode=mode.value,
        attack=label,
        embedded=report.embedded_count,
        extracted=scored.extracted_count,
        correct=scored.correctly_recovered or 0,
        nc=scored.nc,
        error_rate=scored.error_rate_percent,
        psnr=metrics.psnr(host, attacked),
        corr=metrics.corr(host, attacked, on_constant=float(np.array_equal(host, attacked))),
        achieved_cr=achieved_cr,
    )


def run_cell(name, host, marked, report, attack) -> BenchRow:
    mode, achieved = report.params.channel_mode, None
    if attack is None:
        attacked, label = marked, "none"
    elif attack.kind is AttackKind.JPEG_CR:
        res = jpeg_attack_result(marked, attack.cr)
        attacked, label, achieved = res.image, attack.label(), res.achieved_cr
        if not res.converged:
            log.warning("%s %s: achieved CR %.2f is outside 5%% of %g", name, mode.value, res.achieved_cr, attack.cr)
    else:
        attacked, label = attack.apply(marked), attack.label()
    return _row(name, mode, label, host, attacked, report, extract(attacked, report.params), achieved)


def run_bench(suite: BenchSuite) -> BenchResult:
    """Rows come out ordered by (image, mode, attack) as listed in the suite."""
    rows, missing = [], []
    for path in suite.images:
        path = Path(path)
        try:
            host = read_image(path)
        except ImageIOError as exc:
            log.warning("skipping %s", exc)
            missing.append(str(path))
            continue
        for mode in suite.modes:
            params = replace(suite.params, channel_mode=mode)
            marked, report = embed(host, params)
            for attack in [None, *suite.attacks]:
                rows.append(run_cell(path.stem, host, marked, report, attack))
    return BenchResult(rows, missing)


def format_tables(result: BenchResult) -> str:
    """Fixed-width tables: one block per (mode, attack family) plus a comparison."""
    out = []
    families = (
        ("No attack", lambda a: a == "none"),
        ("JPEG compression", lambda a: a.startswith("jpeg")),
        ("Rotation", lambda a: a.startswith("rotate")),
        ("Median filter", lambda a: a.startswith("median")),
    )
    modes = sorted({r.mode for r in result.rows}, key=lambda m: m != ChannelMode.YCBCR_Y.value)
    header = f"{'image':<10} {'attack':<18} {'embedded':>8} {'extracted':>9} {'NC':>7} {'%error':>8} {'PSNR':>8} {'Corr':>8}"
    for mode in modes:
        for title, keep in families:
            rows = [r for r in result.rows if r.mode == mode and keep(r.attack)]
            if not rows:
                continue
            out.append(f"== {title} ({mode}) ==")
            out.append(header)
            for r in rows:
                nc = "-" if r.nc is None else f"{r.nc:.4f}"
                err = "-" if r.error_rate is None else f"{r.error_rate:.2f}"
                out.append(
                    f"{r.image:<10} {r.attack:<18} {r.embedded:>8} {r.extracted:>9} {nc:>7} {err:>8} {r.psnr:>8.3f} {r.corr:>8.5f}"
                )
            out.append("")
    comparison = compare_modes(result)
    if comparison["cells"]:
        out.append("== YCbCr (Y) vs RGB (G) ==")
        out.append(f"{'image':<10} {'attack':<18} {'Y bits':>7} {'G bits':>7} {'Y %err':>8} {'G %err':>8}")
        for c in comparison["cells"]:
            ye = "-" if c["y_error"] is None else f"{c['y_error']:.2f}"
            ge = "-" if c["g_error"] is None else f"{c['g_error']:.2f}"
            out.append(f"{c['image']:<10} {c['attack']:<18} {c['y_bits']:>7} {c['g_bits']:>7} {ye:>8} {ge:>8}")
        out.append(
            f"Y strictly lower error in {comparison['y_better']}/{comparison['attack_cells']} attack cells; "
            f"Y payload >= 1.5x G on {comparison['payload_wins']}/{comparison['images']} images"
        )
    return "\n".join(out) + "\n"


def compare_modes(result: BenchResult) -> dict:
    by_key = {(r.image, r.mode, r.attack): r for r in result.rows}
    cells, y_better, attack_cells = [], 0, 0
    payload_wins, images = 0, 0
    for image in dict.fromkeys(r.image for r in result.rows):
        y0 = by_key.get((image, ChannelMode.YCBCR_Y.value, "none"))
        g0 = by_key.get((image, ChannelMode.RGB_G.value, "none"))
        if y0 is None or g0 is None:
            continue
        images += 1
        if y0.embedded >= 1.5 * g0.embedded and y0.embedded > 0:
            payload_wins += 1
        for r in result.rows:
            if r.image != image or r.mode != ChannelMode.YCBCR_Y.value:
                continue
            g = by_key.get((image, ChannelMode.RGB_G.value, r.attack))
            if g is None:
                continue
            cells.append(
                dict(image=image, attack=r.attack, y_bits=r.embedded, g_bits=g.embedded, y_error=r.error_rate, g_error=g.error_rate)
            )
            if r.attack == "none":
                continue
            attack_cells += 1
            if r.error_rate is not None and g.error_rate is not None and r.error_rate < g.error_rate:
                y_better += 1
    return dict(cells=cells, y_better=y_better, attack_cells=attack_cells, payload_wins=payload_wins, images=images)
