"""Command line front end.

Exit codes: 0 success, 1 usage, 2 file or decode trouble, 3 invalid
parameter values. Output files are deterministic for a given input and
parameter set; timing lines go to stdout and are informational only.
"""

import argparse
import sys
import time

from .core import FilterParams, filter_image
from .errors import DecodeError, DegenerateWindowError, IntegrityError, InvalidInputError
from .imgio import load_decomposition, load_image, save_decomposition, save_image
from .metrics import max_abs_diff, psnr, ssim
from .pyramid import decompose, recompose, schedule_from

USAGE_EXIT = 1
IO_EXIT = 2
PARAM_EXIT = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract here is 1
    def error(self, message):
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _int_list(text: str):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="svf", description="Sub-window variance filtering and multi-scale decomposition")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="edge-preserving smoothing of one image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--color-mode", choices=["per-channel", "luma"], default="per-channel")
    p.add_argument("--encoding", choices=["png8", "png16", "pfm"], default=None,
                   help="output encoding; default follows the output suffix")
    p.add_argument("--drop-alpha", action="store_true",
                   help="discard an alpha channel instead of rejecting the file")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("decompose", help="split an image into base and detail layers")
    p.add_argument("input")
    p.add_argument("out_dir")
    p.add_argument("--radii", type=_int_list, required=True,
                   help="per-level radii, e.g. 2,4,8")
    p.add_argument("--epsilon", type=_float_list, default=[0.015],
                   help="scalar or per-level list, e.g. 0.015 or 0.015,0.02,0.03")
    p.add_argument("--color-mode", choices=["per-channel", "luma"], default="per-channel")
    p.add_argument("--value-encoding", choices=["float", "offset-8bit"], default="float")
    p.add_argument("--drop-alpha", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("recompose", help="weighted recombination of stored layers")
    p.add_argument("in_dir")
    p.add_argument("output")
    p.add_argument("--weights", type=_float_list, required=True,
                   help="one weight per detail layer, e.g. 1,2,4")
    p.add_argument("--base-weight", type=float, default=1.0)
    p.add_argument("--encoding", choices=["png8", "png16", "pfm"], default=None)
    p.set_defaults(func=cmd_recompose)

    p = sub.add_parser("metrics", help="compare two images")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("--ssim", action="store_true")
    p.add_argument("--psnr", action="store_true")
    p.add_argument("--max-abs-diff", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("serve", help="run the HTTP tuning service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--max-image-pixels", type=int, default=16_000_000)
    p.add_argument("--session-ttl", type=float, default=900.0)
    p.add_argument("--max-sessions", type=int, default=64)
    p.set_defaults(func=cmd_serve)

    return parser


def cmd_filter(args) -> int:
    t0 = time.perf_counter()
    image = load_image(args.input, drop_alpha=args.drop_alpha)
    t1 = time.perf_counter()
    result = filter_image(image, FilterParams(args.radius, args.epsilon), args.color_mode)
    t2 = time.perf_counter()
    save_image(result, args.output, encoding=args.encoding)
    t3 = time.perf_counter()
    print(f"load_ms={_fmt((t1 - t0) * 1e3)} filter_ms={_fmt((t2 - t1) * 1e3)} "
          f"save_ms={_fmt((t3 - t2) * 1e3)} total_ms={_fmt((t3 - t0) * 1e3)}")
    return 0


def cmd_decompose(args) -> int:
    t0 = time.perf_counter()
    image = load_image(args.input, drop_alpha=args.drop_alpha)
    schedule = schedule_from(args.radii, args.epsilon if len(args.epsilon) > 1 else args.epsilon[0])
    result = decompose(image, schedule, args.color_mode)
    save_decomposition(result, args.out_dir, source_path=args.input,
                       value_encoding=args.value_encoding)
    t1 = time.perf_counter()
    for k, (level, detail) in enumerate(zip(schedule.levels, result.details)):
        print(f"level={k + 1} radius={level.radius} epsilon={_fmt(level.epsilon)} "
              f"min={_fmt(float(detail.min()))} max={_fmt(float(detail.max()))} "
              f"mean={_fmt(float(detail.mean()))}")
    print(f"levels={result.levels} total_ms={_fmt((t1 - t0) * 1e3)}")
    return 0


def cmd_recompose(args) -> int:
    t0 = time.perf_counter()
    stored = load_decomposition(args.in_dir)
    result = recompose(stored, args.weights, args.base_weight)
    save_image(result, args.output, encoding=args.encoding)
    t1 = time.perf_counter()
    print(f"levels={stored.levels} total_ms={_fmt((t1 - t0) * 1e3)}")
    return 0


def cmd_metrics(args) -> int:
    image_a = load_image(args.image_a)
    image_b = load_image(args.image_b)
    wanted = {
        "ssim": args.ssim,
        "psnr": args.psnr,
        "max_abs_diff": args.max_abs_diff,
    }
    if not any(wanted.values()):
        wanted = dict.fromkeys(wanted, True)
    if wanted["ssim"]:
        print(f"ssim={_fmt(ssim(image_a, image_b))}")
    if wanted["psnr"]:
        print(f"psnr={_fmt(psnr(image_a, image_b))}")
    if wanted["max_abs_diff"]:
        print(f"max_abs_diff={_fmt(max_abs_diff(image_a, image_b))}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        max_image_pixels=args.max_image_pixels,
        session_ttl=args.session_ttl,
        max_sessions=args.max_sessions,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, DegenerateWindowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARAM_EXIT
    except (DecodeError, IntegrityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO_EXIT


if __name__ == "__main__":
    sys.exit(main())
