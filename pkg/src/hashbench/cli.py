"""Command-line interface: ``hashbench {hash,compare,attack,bench}``.

Exit codes: 0 success, 2 usage error, 3 I/O failure, 4 unknown algorithm.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .attacks import AttackError, default_grid, parse_spec, apply_attack, read_grid
from .hashes import ALGORITHMS, compute_hash, format_hash
from .raster import load_image, save_image
from .similarity import correlation
from .synthetic import synthetic_corpus

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_ALGO = 4

log = logging.getLogger("hashbench")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _threshold(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not -1.0 < value < 1.0:
        raise argparse.ArgumentTypeError("threshold must lie in (-1, 1)")
    return value


def _check_algo(name: str) -> str:
    if name not in ALGORITHMS:
        raise CliError(f"unknown algorithm {name!r} (choose from {', '.join(ALGORITHMS)})", EXIT_ALGO)
    return name


def _load(path):
    try:
        return load_image(path)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


def cmd_hash(args) -> int:
    algo = _check_algo(args.algo)
    line = format_hash(compute_hash(algo, _load(args.input))) + "\n"
    if args.out:
        _write_text(args.out, line)
    else:
        sys.stdout.write(line)
    return EXIT_OK


def cmd_compare(args) -> int:
    algo = _check_algo(args.algo)
    a, b = _load(args.a), _load(args.b)
    s = correlation(compute_hash(algo, a), compute_hash(algo, b))
    sys.stdout.write(f"S={s:.4f}\n")
    if args.threshold is not None:
        sys.stdout.write(f"similar={'true' if s > args.threshold else 'false'}\n")
    return EXIT_OK


def cmd_attack(args) -> int:
    try:
        spec = parse_spec(args.spec)
    except AttackError as exc:
        raise CliError(f"bad attack spec: {exc}", EXIT_USAGE) from None
    out = apply_attack(_load(args.input), spec, args.seed)
    try:
        save_image(out, args.out)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from None
    return EXIT_OK


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    if not algos:
        raise CliError("--algos is empty", EXIT_USAGE)
    for a in algos:
        _check_algo(a)

    if args.grid:
        try:
            grid = read_grid(args.grid)
        except OSError as exc:
            raise CliError(f"cannot read grid {args.grid}: {exc}", EXIT_IO) from None
        except AttackError as exc:
            raise CliError(f"bad grid {args.grid}: {exc}", EXIT_USAGE) from None
        if not grid:
            raise CliError(f"grid {args.grid} has no specs", EXIT_USAGE)
    else:
        grid = default_grid()

    if args.synthetic is not None:
        if args.synthetic < 2:
            raise CliError("--synthetic needs at least 2 images", EXIT_USAGE)
        dataset = synthetic_corpus(args.synthetic)
    else:
        try:
            dataset = bench.read_manifest(args.manifest)
        except OSError as exc:
            raise CliError(f"cannot read manifest {args.manifest}: {exc}", EXIT_IO) from None
        except ValueError as exc:
            raise CliError(f"bad manifest: {exc}", EXIT_USAGE) from None
        if not dataset.entries:
            raise CliError("manifest lists no images", EXIT_USAGE)

    report = bench.intra_test(dataset, algos, grid, args.seed, jobs=args.jobs)
    for image_id, message in report.failures:
        print(f"warning: {image_id}: {message}", file=sys.stderr)
    if not report.records:
        raise CliError("every image failed to load", EXIT_IO)

    _write_text(args.out_csv, bench.report_csv(report))
    markdown = bench.report_markdown(report)
    if args.out_md:
        _write_text(args.out_md, markdown)

    if args.roc:
        loaded = {r.image_id for r in report.records}
        if len(loaded) < 2:
            raise CliError("--roc needs at least two readable images", EXIT_USAGE)
        if isinstance(dataset, bench.DatasetManifest):
            dataset = bench.DatasetManifest(
                [e for e in dataset.entries if e[0] in loaded], dataset.root
            )
        inter = bench.inter_test(dataset, algos)
        thresholds = bench.default_thresholds()
        rows = {a: bench.roc(report, inter, thresholds, algorithm=a) for a in algos}
        _write_text(args.roc, bench.roc_csv(rows))

    sys.stdout.write(markdown)
    n_failed = len(report.failures)
    print(
        f"{len(report.records)} records, {n_failed} image failure(s), seed {args.seed}",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hashbench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hash", help="print the hash of one image")
    p.add_argument("--algo", required=True)
    p.add_argument("--in", dest="input", required=True, type=Path)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("compare", help="correlation of two images' hashes")
    p.add_argument("--algo", required=True)
    p.add_argument("--a", required=True, type=Path)
    p.add_argument("--b", required=True, type=Path)
    p.add_argument("--threshold", type=_threshold)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("attack", help="apply one content-preserving attack")
    p.add_argument("--in", dest="input", required=True, type=Path)
    p.add_argument("--spec", required=True, help='e.g. "rotation theta=5"')
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("bench", help="run the intra-test robustness benchmark")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest", type=Path, help="file of 'id<TAB>path' lines")
    src.add_argument("--synthetic", type=int, metavar="N", help="use N generated images")
    p.add_argument("--algos", default=",".join(ALGORITHMS))
    p.add_argument("--grid", type=Path, help="attack manifest; default is the 88-spec grid")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out-csv", required=True, type=Path)
    p.add_argument("--out-md", type=Path)
    p.add_argument("--roc", type=Path, metavar="CSV", help="also run the inter-test and write ROC rows")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (output is identical)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"hashbench: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
