"""``dynimage`` command line.

Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 numerical
failure. Errors are reported as one line on stderr.
"""

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import imageio
from .coefficients import coeffs
from .layer import MeanPoolLayer, RankPoolLayer, gradcheck
from .metrics import bench, fuse_scores, ranking_accuracy
from .pooling import PoolingMethod, di_export, di_preprocess, pool
from .ranksolver import SolverConfig
from .segmentation import MERGES, WindowSpec, mdi
from .tensor import NumericalError

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
METHODS = ("arp", "rp", "mean", "max", "mhi", "mei")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x):
    return f"{x:.17g}"


def _write_csv(rows, out):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    out.write(buf.getvalue())


def _parse_shape(text):
    try:
        shape = tuple(int(s) for s in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad shape {text!r}; expected e.g. 3x32x32")
    if not shape or min(shape) < 1:
        raise UsageError(f"bad shape {text!r}")
    return shape


def _parse_window(text):
    if text == "full":
        return "full"
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"--window must be 'full' or an integer, got {text!r}")


def _solver_config(args):
    try:
        return SolverConfig(args.lam, args.step_size, args.max_iters, args.rel_tol)
    except ValueError as exc:
        raise UsageError(str(exc))


def _pooling_method(args):
    if args.method == "arp":
        return PoolingMethod(f"arp_{args.variant}")
    if args.method == "rp":
        return PoolingMethod("rank_exact", {"config": _solver_config(args)})
    if args.method in ("mhi", "mei"):
        return PoolingMethod(args.method, {"threshold": args.threshold,
                                           "duration": args.duration})
    return PoolingMethod(args.method)


def _load(args):
    seq = imageio.load_sequence(args.input, args.modality,
                                imageio.FlowEncoding(args.clip))
    if args.sqrt:
        seq = di_preprocess(seq)
    return seq


def _output_paths(base, n):
    base = Path(base)
    if n == 1:
        return [base]
    return [base.with_name(f"{base.stem}_{k:03d}{base.suffix}") for k in range(n)]


def cmd_pool(args, out):
    method = _pooling_method(args)
    try:
        spec = WindowSpec(_parse_window(args.window), args.stride, args.temp_pool)
    except ValueError as exc:
        raise UsageError(str(exc))
    seq = _load(args)
    result = mdi(seq, spec, method)
    images = result if isinstance(result, list) else [result]
    for path, im in zip(_output_paths(args.output, len(images)), images):
        if args.raw:
            written = Path(path).with_suffix(".dynt")
            imageio.write_tensor(im.tensor, written)
        else:
            written = imageio.write_image(di_export(im), path)
        a, b = im.source_range
        out.write(f"{written} {im.method} frames {a}-{b} "
                  f"shape {'x'.join(map(str, im.shape))}\n")
    return EXIT_OK


def cmd_coeffs(args, out):
    try:
        vec = coeffs(args.length, args.variant)
    except ValueError as exc:
        raise UsageError(str(exc))
    rows = [("t", "value")]
    rows += [(t, fmt(v)) for t, v in enumerate(vec.values, start=1)]
    _write_csv(rows, out)
    return EXIT_OK


def cmd_rank_acc(args, out):
    method = _pooling_method(args)
    seq = _load(args)
    d = pool(seq, method)
    rep = ranking_accuracy(d.tensor, seq)
    _write_csv([("method", "accuracy", "pairs_correct", "pairs_total"),
                (method.kind, fmt(rep.accuracy), rep.pairs_correct,
                 rep.pairs_total)], out)
    return EXIT_OK


def cmd_gradcheck(args, out):
    shape = _parse_shape(args.shape)
    if args.frames < 1:
        raise UsageError("--frames must be >= 1")
    layer = MeanPoolLayer() if args.layer == "mean" else RankPoolLayer(args.variant)
    try:
        rep = gradcheck(shape, args.frames, args.epsilon, args.seed, layer)
    except ValueError as exc:
        raise UsageError(str(exc))
    status = "pass" if rep.passed else "fail"
    _write_csv([("result", "max_rel_error"), (status, fmt(rep.max_rel_error))], out)
    return EXIT_OK if rep.passed else EXIT_NUMERIC


def cmd_bench(args, out):
    shape = _parse_shape(args.shape)
    names = {"arp": "arp_avg", "arp_direct": "arp_direct", "rp": "rank_exact",
             "mean": "mean", "max": "max"}
    methods = []
    for m in args.methods.split(","):
        if m not in names:
            raise UsageError(f"unknown bench method {m!r}")
        methods.append(names[m])
    try:
        reports = bench(methods, args.length, args.trials, shape,
                        args.sequences, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    rows = [("method", "frames_per_second", "wall_seconds", "sequences")]
    rows += [(r.method, fmt(r.frames_per_second), fmt(r.wall_seconds),
              r.sequences) for r in reports]
    _write_csv(rows, out)
    return EXIT_OK


def cmd_flow_encode(args, out):
    flow = imageio.read_tensor(args.input)
    if flow.ndim not in (3, 4) or flow.shape[-3] != 2:
        raise imageio.FormatError(
            f"expected flow of shape 2xHxW or Tx2xHxW, got {flow.shape}")
    encoded = imageio.flow_encode(flow, imageio.FlowEncoding(args.clip))
    imageio.write_tensor(encoded, args.output)
    out.write(f"{args.output} flow bytes shape {'x'.join(map(str, encoded.shape))}\n")
    return EXIT_OK


def _read_scores(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise imageio.FormatError(f"{path}: need a header row and scores")
    try:
        values = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise imageio.FormatError(f"{path}: {exc}")
    return rows[0], values


def cmd_fuse(args, out):
    weights = None
    if args.weights:
        try:
            weights = [float(w) for w in args.weights.split(",")]
        except ValueError:
            raise UsageError(f"bad --weights {args.weights!r}")
    tables = [_read_scores(p) for p in args.input]
    header, first = tables[0]
    for path, (h, v) in zip(args.input, tables):
        if h != header or v.shape != first.shape:
            raise imageio.FormatError(f"{path}: scores do not match {args.input[0]}")
    stacked = np.stack([v for _, v in tables])
    try:
        fused = [fuse_scores(stacked[:, i], weights) for i in range(stacked.shape[1])]
    except ValueError as exc:
        raise UsageError(str(exc))
    rows = [header] + [[fmt(v) for v in row] for row in fused]
    if args.output:
        with open(args.output, "w", newline="") as fh:
            _write_csv(rows, fh)
    else:
        _write_csv(rows, out)
    return EXIT_OK


def _add_input(p):
    p.add_argument("-i", "--input", required=True,
                   help="frame directory, image, or TensorFile")
    p.add_argument("--modality", default="rgb",
                   choices=("rgb", "gray", "flow", "feature"))
    p.add_argument("--sqrt", action="store_true",
                   help="square-root pixels before pooling")
    p.add_argument("--clip", type=float, default=20.0,
                   help="flow clip in pixels (flow modality)")


def _add_method(p, default):
    p.add_argument("--method", default=default, choices=METHODS)
    p.add_argument("--variant", default="avg", choices=("avg", "direct"))
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--step-size", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--threshold", type=float, default=0.05,
                   help="MHI/MEI motion threshold on [0, 1] pixels")
    p.add_argument("--duration", type=float, default=1.0,
                   help="MHI value for the most recent motion")


def build_parser():
    parser = _Parser(prog="dynimage", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("pool", help="summarize frames as dynamic image(s)")
    _add_input(p)
    _add_method(p, "arp")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--window", default="10", help="'full' or frames per window")
    p.add_argument("--stride", type=int, default=6)
    p.add_argument("--temp-pool", default="max", choices=MERGES)
    p.add_argument("--raw", action="store_true",
                   help="write float64 TensorFiles instead of 8-bit images")
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("coeffs", help="print ARP weights as CSV")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--variant", default="avg", choices=("avg", "direct", "beta"))
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("rank-acc", help="pairwise ranking accuracy of a pooler")
    _add_input(p)
    _add_method(p, "arp")
    p.set_defaults(func=cmd_rank_acc)

    p = sub.add_parser("gradcheck", help="finite-difference check of RankPool")
    p.add_argument("--shape", default="3x4x4")
    p.add_argument("--frames", type=int, default=7)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--variant", default="avg", choices=("avg", "direct"))
    p.add_argument("--layer", default="rankpool", choices=("rankpool", "mean"))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("bench", help="time ARP against exact rank pooling")
    p.add_argument("--methods", default="arp,rp")
    p.add_argument("--length", type=int, default=150)
    p.add_argument("--shape", default="3x32x32")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--sequences", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("flow-encode", help="quantize real flow to bytes")
    p.add_argument("-i", "--input", required=True, help="float TensorFile")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--clip", type=float, default=20.0)
    p.set_defaults(func=cmd_flow_encode)

    p = sub.add_parser("fuse", help="average per-stream class scores")
    p.add_argument("-i", "--input", nargs="+", required=True,
                   help="one CSV per stream: class header, one row per sample")
    p.add_argument("-o", "--output")
    p.add_argument("--weights", help="comma-separated per-stream weights")
    p.set_defaults(func=cmd_fuse)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        code, msg = EXIT_USAGE, f"usage error: {exc}"
    except NumericalError as exc:
        code, msg = EXIT_NUMERIC, f"numerical failure: {exc}"
    except (OSError, imageio.FormatError, imageio.EmptyInputError) as exc:
        code, msg = EXIT_IO, f"I/O error: {exc}"
    except ValueError as exc:
        code, msg = EXIT_USAGE, f"usage error: {exc}"
    err.write(" ".join(msg.split()) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
