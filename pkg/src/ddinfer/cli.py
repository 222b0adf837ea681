"""Command-line driver: ``ddinfer <command> ...``.

Exit codes: 0 success, 1 negative result (corroboration failed),
2 invalid input, 3 file I/O failure.  Errors are reported on stderr as a
single JSON object.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from . import io as dio
from .correlation import to_xy
from .errors import DDInferError, ValidationError
from .inference import InferenceConfig, corroborate, dd_infer
from .metrics import symmetric_difference_distance
from .plotting import boundary, plot_sets
from .tomography import linear_inversion, simulate_experiment, tomographic_reconstruction

EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_INVALID, _diagnostic(EXIT_INVALID, "UsageError", f"{self.prog}: {message}"))


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the manifest timestamp for reproducible builds
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc) if epoch else dt.datetime.now(dt.timezone.utc)
    return t.replace(microsecond=0).isoformat()


def _emit(args, obj, text=None):
    """Write ``obj`` as JSON to ``--out`` (or stdout) and record a manifest."""
    if args.out is None:
        sys.stdout.write(text if text is not None else dio.dumps(obj))
        return
    dio.write_json(args.out, obj)
    _manifest(args, [args.out])


def _manifest(args, outputs, config=None):
    if args.no_manifest or not outputs:
        return
    path = args.manifest or f"{outputs[0]}.manifest.json"
    dio.write_json(
        path,
        {
            "command": args.command,
            "argv": args.argv,
            "inputs": [str(p) for p in _inputs(args)],
            "outputs": [str(p) for p in outputs],
            "config": config if config is not None else _config_of(args),
            "seed": getattr(args, "seed", None),
            "version": __version__,
            "timestamp": _timestamp(),
        },
    )


def _inputs(args):
    out = []
    for name in ("channel", "counts", "channel_a", "channel_b", "config"):
        v = getattr(args, name, None)
        if v is not None:
            out.append(v)
    out += getattr(args, "inputs", None) or []
    return out


def _config_of(args):
    skip = {"func", "argv", "command", "out", "manifest", "no_manifest", "verbose"} | {"channel", "counts", "channel_a", "channel_b", "inputs"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# -- commands ------------------------------------------------------------------


def cmd_simulate(args):
    ch = dio.read_channel(args.channel)
    shots = 0 if args.exact else args.shots
    rec = simulate_experiment(ch, shots, seed=args.seed)
    _emit(args, dio.record_to_dict(rec))
    return EXIT_OK


def cmd_tomo(args):
    rec = dio.read_record(args.counts)
    dio.require_complete(rec)
    canon = tomographic_reconstruction(rec, c3_mode=args.c3_mode)
    _emit(args, dio.reconstruction_to_dict(canon, linear_inversion(rec)))
    return EXIT_OK


def _load_config(args) -> InferenceConfig:
    if args.config is None:
        return InferenceConfig()
    d = dio.read_json(args.config)
    if not isinstance(d, dict):
        raise ValidationError("config must be a JSON object")
    return InferenceConfig.from_dict(d)


def cmd_infer(args):
    cfg = _load_config(args)
    rec = dio.read_record(args.counts)
    res = dd_infer(list(rec.correlations().values()), cfg)
    obj = dio.result_to_dict(res)
    if args.out is None:
        sys.stdout.write(dio.dumps(obj))
    else:
        dio.write_json(args.out, obj)
        _manifest(args, [args.out], config=vars(cfg))
    return EXIT_OK


def cmd_corroborate(args):
    rec = dio.read_record(args.counts)
    ch = dio.read_canonical(args.channel)
    rows = []
    for (k, l), p in rec.correlations().items():
        x, y = to_xy(p)
        rows.append({"pair": f"k{k}l{l}", "x": x, "y": y, "corroborated": corroborate(p, ch, args.tol)})
    ok = all(r["corroborated"] for r in rows)
    _emit(args, {"corroborated": ok, "tol": args.tol, "pairs": rows})
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_compare(args):
    a, b = dio.read_canonical(args.channel_a), dio.read_canonical(args.channel_b)
    d = symmetric_difference_distance(a, b, n=args.n)
    _emit(args, {"distance": d, "n": args.n}, text=f"{d!r}\n")
    return EXIT_OK


def cmd_boundary(args):
    ch = dio.read_canonical(args.channel)
    pts = boundary(ch, args.vertices)
    if args.out is None:
        sys.stdout.write("x,y\n" + "".join(f"{x!r},{y!r}\n" for x, y in pts.tolist()))
        return EXIT_OK
    dio.write_xy_csv(args.out, pts.tolist())
    _manifest(args, [args.out])
    return EXIT_OK


def cmd_plot(args):
    channels, points = {}, []
    for path in args.inputs:
        obj = dio.read_json(path)
        if isinstance(obj, dict) and "counts" in obj:
            rec = dio.record_from_dict(obj)
            points += [tuple(to_xy(p)) for p in rec.correlations().values()]
        else:
            channels[Path(path).stem] = dio.read_canonical(path)
    plot_sets(channels, points, out=args.out, title=args.title)
    _manifest(args, [args.out, str(Path(args.out).with_suffix(".csv"))])
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _positive_int(s):
    v = int(s)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--version", action="version", version=f"ddinfer {__version__}")
    common.add_argument("--manifest", metavar="PATH", help="manifest location (default: <out>.manifest.json)")
    common.add_argument("--no-manifest", action="store_true", help="do not write a run manifest")
    common.add_argument("--verbose", action="store_true")

    p = _Parser(prog="ddinfer", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common], help="simulate the Pauli-eigenstate experiment")
    s.add_argument("channel")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--shots", type=_positive_int)
    g.add_argument("--exact", action="store_true", help="store exact probabilities (shots = 0)")
    s.add_argument("--seed", type=_nonneg_int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("tomo", parents=[common], help="linear-inversion tomography")
    s.add_argument("counts")
    s.add_argument("--c3-mode", choices=("zero", "norm"), default="zero")
    s.add_argument("--out")
    s.set_defaults(func=cmd_tomo)

    s = sub.add_parser("infer", parents=[common], help="minimal-area channel inference")
    s.add_argument("counts")
    s.add_argument("--config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_infer)

    s = sub.add_parser("corroborate", parents=[common], help="check the data against a channel")
    s.add_argument("counts")
    s.add_argument("channel")
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--out")
    s.set_defaults(func=cmd_corroborate)

    s = sub.add_parser("compare", parents=[common], help="symmetric-difference distance")
    s.add_argument("channel_a")
    s.add_argument("channel_b")
    s.add_argument("--n", type=_positive_int, default=4096)
    s.add_argument("--out")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("boundary", parents=[common], help="export a set boundary as CSV")
    s.add_argument("channel")
    s.add_argument("--vertices", type=_positive_int, default=256)
    s.add_argument("--out")
    s.set_defaults(func=cmd_boundary)

    s = sub.add_parser("plot", parents=[common], help="plot sets and data in the positive quadrant")
    s.add_argument("inputs", nargs="+", help="channel, result or record JSON files")
    s.add_argument("--title")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_plot)
    return p


def _diagnostic(code, kind, message) -> str:
    return json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n"


def _fail(code, kind, message):
    sys.stderr.write(_diagnostic(code, kind, message))
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except DDInferError as exc:
        return _fail(EXIT_INVALID, type(exc).__name__, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
