"""Image files and plain-text report formats.

Reports are ``key = value`` lines followed by a section of positions::

    embedded_count = 3
    ...
    [positions]
    4,17
    5,2

Extraction reports list ``i,j = bit`` under ``[recovered]``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .watermark import ChannelMode, EmbedParams, EmbedReport, ExtractionReport

READ_SUFFIXES = {".png", ".ppm", ".pnm", ".bmp"}
WRITE_FORMATS = {".png": "PNG", ".ppm": "PPM", ".pnm": "PPM"}


class ImageIOError(OSError):
    pass


def read_image(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() not in READ_SUFFIXES:
        raise ImageIOError(f"{path}: unsupported image type (use PNG, PPM or BMP)")
    try:
        with Image.open(path) as im:
            if im.mode in ("L", "P"):
                im = im.convert("RGB")
            if im.mode != "RGB":
                raise ImageIOError(f"{path}: expected an 8-bit RGB image, got mode {im.mode}")
            return np.array(im, dtype=np.uint8)
    except (FileNotFoundError, IsADirectoryError, PermissionError, UnidentifiedImageError) as exc:
        raise ImageIOError(f"{path}: {exc}") from exc


def write_image(path, img: np.ndarray) -> None:
    path = Path(path)
    fmt = WRITE_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise ImageIOError(f"{path}: output must be lossless (.png or .ppm)")
    try:
        Image.fromarray(np.asarray(img, dtype=np.uint8), "RGB").save(path, format=fmt)
    except OSError as exc:
        raise ImageIOError(f"{path}: {exc}") from exc


def _num(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def _param_lines(params: EmbedParams | None) -> list[str]:
    if params is None:
        return []
    return [
        f"t1 = {_num(params.t1)}",
        f"t2 = {_num(params.t2)}",
        f"x1 = {_num(params.x1)}",
        f"x2 = {_num(params.x2)}",
        f"levels = {params.levels}",
        f"mode = {params.channel_mode.value}",
    ]


def format_embed_report(report: EmbedReport) -> str:
    lines = [
        "# dwtmark embed report",
        f"embedded_count = {report.embedded_count}",
        f"band_rows = {report.shape[0]}",
        f"band_cols = {report.shape[1]}",
        f"psnr = {_num(report.psnr)}",
        f"corr = {_num(report.corr)}",
        *_param_lines(report.params),
    ]
    if report.warning:
        lines.append(f"warning = {report.warning}")
    lines.append("[positions]")
    lines.extend(f"{i},{j}" for i, j in report.positions)
    return "\n".join(lines) + "\n"


def format_extraction_report(report: ExtractionReport) -> str:
    lines = [
        "# dwtmark extraction report",
        f"extracted_count = {report.extracted_count}",
        f"band_rows = {report.shape[0]}",
        f"band_cols = {report.shape[1]}",
    ]
    for name in ("score", "present", "embedded_count", "correctly_recovered", "error_rate_percent", "nc", "nc_sqrt"):
        value = getattr(report, name)
        if value is not None:
            lines.append(f"{name} = {_num(value)}")
    lines.append("[recovered]")
    lines.extend(f"{i},{j} = {b}" for (i, j), b in sorted(report.recovered.items()))
    return "\n".join(lines) + "\n"


def _split(text: str):
    fields, section, body = {}, None, []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            continue
        if section is None:
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
        else:
            body.append(line)
    return fields, section, body


def _pair(text: str) -> tuple[int, int]:
    i, j = text.split(",")
    return int(i), int(j)


def _params_from(fields: dict) -> EmbedParams | None:
    if "t1" not in fields:
        return None
    return EmbedParams(
        t1=float(fields["t1"]),
        t2=float(fields["t2"]),
        x1=float(fields["x1"]),
        x2=float(fields["x2"]),
        levels=int(fields["levels"]),
        channel_mode=ChannelMode(fields["mode"]),
    )


def parse_embed_report(text: str) -> EmbedReport:
    fields, section, body = _split(text)
    if section not in (None, "positions"):
        raise ValueError(f"unexpected section [{section}] in embed report")
    report = EmbedReport(
        positions=[_pair(line) for line in body],
        shape=(int(fields["band_rows"]), int(fields["band_cols"])),
        psnr=float(fields["psnr"]),
        corr=float(fields["corr"]),
        params=_params_from(fields),
    )
    if report.embedded_count != int(fields["embedded_count"]):
        raise ValueError("embedded_count does not match the number of positions")
    return report


def parse_extraction_report(text: str) -> ExtractionReport:
    fields, section, body = _split(text)
    if section not in (None, "recovered"):
        raise ValueError(f"unexpected section [{section}] in extraction report")
    recovered = {}
    for line in body:
        pos, _, bit = line.partition("=")
        recovered[_pair(pos.strip())] = int(bit)
    report = ExtractionReport(recovered, (int(fields["band_rows"]), int(fields["band_cols"])))
    for name, cast in (
        ("score", float),
        ("embedded_count", int),
        ("correctly_recovered", int),
        ("error_rate_percent", float),
        ("nc", float),
        ("nc_sqrt", float),
    ):
        if name in fields:
            setattr(report, name, cast(fields[name]))
    if "present" in fields:
        report.present = fields["present"] == "True"
    if report.extracted_count != int(fields["extracted_count"]):
        raise ValueError("extracted_count does not match the number of recovered bits")
    return report
