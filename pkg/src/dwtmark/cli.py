"""Command-line interface.

Exit codes: 0 success, 2 I/O error, 3 bad image dimensions, 4 bad attack
spec or parameters.
"""

from __future__ import annotations

import argparse
import logging
import secrets
import sys
from pathlib import Path

from . import metrics
from .attacks import AttackKind, AttackSpec, AttackSpecError, jpeg_attack_result
from .bench import BenchSuite, format_tables, run_bench, standard_images
from .fileio import (
    ImageIOError,
    format_embed_report,
    format_extraction_report,
    parse_embed_report,
    read_image,
    write_image,
)
from .watermark import (
    ChannelMode,
    EmbedParams,
    approximation_band,
    embed,
    extract,
    generate_watermark,
    suggest_thresholds,
    verify,
)

log = logging.getLogger("dwtmark")

EXIT_OK, EXIT_IO, EXIT_DIMENSIONS, EXIT_SPEC = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _key(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("key must be an unsigned 64-bit integer")
    return value


def _add_params(p: argparse.ArgumentParser, key_required: bool = True) -> None:
    p.add_argument("--key", type=_key, required=key_required, help="secret 64-bit watermark key")
    p.add_argument("--t1", type=float, default=1500.0)
    p.add_argument("--t2", type=float, default=1600.0)
    p.add_argument("--x1", type=float, default=20.0)
    p.add_argument("--x2", type=float, default=10.0)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--mode", default="YCBCR_Y", help="YCBCR_Y (default), RGB_R, RGB_G or RGB_B")
    p.add_argument(
        "--auto-thresholds",
        action="store_true",
        help="derive T1/T2 from the image's approximation band (45%% / 85%% of its peak)",
    )


def _params(args, img=None) -> EmbedParams:
    try:
        mode = ChannelMode.parse(args.mode)
        params = EmbedParams(args.t1, args.t2, args.x1, args.x2, args.key, args.levels, mode)
        if args.auto_thresholds and img is not None:
            _check_dims(img, params.levels)
            t1, t2 = suggest_thresholds(approximation_band(img, params))
            params = EmbedParams(t1, t2, args.x1, args.x2, args.key, args.levels, mode)
            log.info("auto thresholds: T1=%.4f T2=%.4f", t1, t2)
    except ValueError as exc:
        raise CliError(f"bad parameters: {exc}", EXIT_SPEC) from exc
    return params


def _check_dims(img, levels: int) -> None:
    step = 2**levels
    h, w = img.shape[:2]
    if h % step or w % step:
        raise CliError(f"image is {w}x{h}; both sides must be divisible by {step}", EXIT_DIMENSIONS)


def _read(path):
    try:
        return read_image(path)
    except ImageIOError as exc:
        raise CliError(str(exc), EXIT_IO) from exc


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from exc


def cmd_embed(args) -> int:
    # Parameter validation happens before any pixel work.
    _params(args)
    host = _read(args.input)
    params = _params(args, host)
    _check_dims(host, params.levels)
    marked, report = embed(host, params)
    try:
        write_image(args.output, marked)
    except ImageIOError as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    report_path = args.report or str(Path(args.output).with_suffix(".embed.txt"))
    _write_text(report_path, format_embed_report(report))
    if report.warning:
        print(f"warning: {report.warning}", file=sys.stderr)
    log.info("embedded %d bits, PSNR %.4f dB, Corr %.6f", report.embedded_count, report.psnr, report.corr)
    print(f"embedded={report.embedded_count} psnr={report.psnr:.4f} corr={report.corr:.6f}")
    return EXIT_OK


def cmd_extract(args) -> int:
    _params(args)
    img = _read(args.input)
    params = _params(args, img)
    _check_dims(img, params.levels)
    embed_report = None
    if args.embed_report:
        try:
            embed_report = parse_embed_report(Path(args.embed_report).read_text())
        except OSError as exc:
            raise CliError(f"{args.embed_report}: {exc}", EXIT_IO) from exc
    result = verify(extract(img, params), params.key, embed_report)
    if args.report:
        _write_text(args.report, format_extraction_report(result))
    verdict = "PRESENT" if result.present else "ABSENT"
    print(f"{verdict} score={result.score:.4f}")
    if result.error_rate_percent is not None:
        print(f"error_rate={result.error_rate_percent:.4f} nc={result.nc:.4f}")
    return EXIT_OK


def cmd_attack(args) -> int:
    try:
        spec = AttackSpec.parse(args.spec)
    except AttackSpecError as exc:
        raise CliError(str(exc), EXIT_SPEC) from exc
    img = _read(args.input)
    if spec.kind is AttackKind.JPEG_CR:
        res = jpeg_attack_result(img, spec.cr)
        out = res.image
        note = "" if res.converged else " (target not reachable; closest achievable)"
        log.info("jpeg: quality %.3f, achieved CR %.3f for target %g%s", res.quality, res.achieved_cr, spec.cr, note)
        print(f"achieved_cr={res.achieved_cr:.4f} quality={res.quality:.4f}")
    else:
        out = spec.apply(img)
    try:
        write_image(args.output, out)
    except ImageIOError as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    return EXIT_OK


def cmd_metrics(args) -> int:
    a, b = _read(args.input), _read(args.ref)
    if a.shape != b.shape:
        raise CliError(f"shape mismatch: {a.shape} vs {b.shape}", EXIT_DIMENSIONS)
    sys.stdout.write(metrics.QualityReport.between(b, a).to_csv())
    return EXIT_OK


def cmd_bench(args) -> int:
    images = [Path(p) for p in args.images] if args.images is not None else standard_images()
    try:
        params = EmbedParams(args.t1, args.t2, args.x1, args.x2, args.key, args.levels)
    except ValueError as exc:
        raise CliError(f"bad parameters: {exc}", EXIT_SPEC) from exc
    result = run_bench(BenchSuite(images, params=params))
    csv_text = result.to_csv()
    if args.output:
        _write_text(args.output, csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.tables:
        _write_text(args.tables, format_tables(result))
    if result.missing:
        print(f"skipped {len(result.missing)} missing image(s): {', '.join(result.missing)}", file=sys.stderr)
    return EXIT_OK


def cmd_keygen(args) -> int:
    if args.rows < 1 or args.cols < 1:
        raise CliError("--rows and --cols must be positive", EXIT_SPEC)
    key = args.key if args.key is not None else secrets.randbits(64)
    print(key)
    if args.show:
        for row in generate_watermark(key, args.rows, args.cols):
            print("".join(str(b) for b in row))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dwtmark", description="Blind DWT watermarking in YCbCr space")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a key-derived watermark")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True, help="lossless output (.png or .ppm)")
    p.add_argument("--report", help="embed report path (default: <out>.embed.txt)")
    _add_params(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="blind extraction and presence check")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--report", help="write the extraction report here")
    p.add_argument("--embed-report", help="embed report, to score error rate and NC")
    _add_params(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="apply jpeg:cr=N, jpeg:q=N, rotate:angle=A or median:window=W")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--spec", required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("metrics", help="MSE, PSNR and Corr of --in against --ref")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--ref", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="run the attack grid and write CSV")
    p.add_argument("--images", nargs="*", help="host images (default: bundled stand-ins)")
    p.add_argument("--out", dest="output", help="CSV path (default: stdout)")
    p.add_argument("--tables", help="write formatted tables here")
    p.add_argument("--key", type=_key, default=0)
    p.add_argument("--t1", type=float, default=1500.0)
    p.add_argument("--t2", type=float, default=1600.0)
    p.add_argument("--x1", type=float, default=20.0)
    p.add_argument("--x2", type=float, default=10.0)
    p.add_argument("--levels", type=int, default=3)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("keygen", help="print a fresh random key")
    p.add_argument("--key", type=_key, help="show bits for this key instead of a new one")
    p.add_argument("--show", action="store_true", help="also print the watermark bit matrix")
    p.add_argument("--rows", type=int, default=32)
    p.add_argument("--cols", type=int, default=32)
    p.set_defaults(func=cmd_keygen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
