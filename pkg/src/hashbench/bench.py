"""Robustness benchmark: intra-test, inter-test, ROC sweep and reports."""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .attacks import AttackSpec, apply_attack
from .hashes import ALGORITHMS, compute_hash
from .raster import RasterImage, load_image
from .rng import derive_seed
from .similarity import correlation

log = logging.getLogger(__name__)


@dataclass
class DatasetManifest:
    entries: list[tuple[str, Path]]
    root: Path = Path(".")

    def __post_init__(self):
        ids = [i for i, _ in self.entries]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate image ids in manifest: {dupes}")

    def resolve(self, path) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.root / path


def read_manifest(path) -> DatasetManifest:
    """``id<TAB>path`` per line; relative paths resolve against the file's directory."""
    path = Path(path)
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            image_id, sep, image_path = line.partition("\t")
            if not sep or not image_id or not image_path:
                raise ValueError(f"{path}:{lineno}: expected 'id<TAB>path'")
            entries.append((image_id, Path(image_path)))
    return DatasetManifest(entries, path.parent)


Dataset = Union[DatasetManifest, Mapping[str, RasterImage]]


def load_dataset(dataset: Dataset) -> tuple[dict[str, RasterImage], list[tuple[str, str]]]:
    """Materialise images; unreadable entries are returned as failures."""
    if not isinstance(dataset, DatasetManifest):
        return dict(dataset), []
    images, failures = {}, []
    for image_id, path in dataset.entries:
        try:
            images[image_id] = load_image(dataset.resolve(path))
        except (OSError, ValueError) as exc:
            log.warning("skipping %s: %s", image_id, exc)
            failures.append((image_id, str(exc)))
    return images, failures


@dataclass(frozen=True)
class BenchRecord:
    image_id: str
    attack: str
    kind: str
    algorithm: str
    s: float


@dataclass(frozen=True)
class Aggregate:
    mean: float
    min: float
    max: float
    std: float
    n: int


@dataclass
class BenchReport:
    records: list[BenchRecord]
    seed: int
    grid: list[str]
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def aggregates(self) -> dict[tuple[str, str], Aggregate]:
        """Mean/min/std of S per (operation kind, algorithm), sorted by key."""
        groups: dict[tuple[str, str], list[float]] = {}
        for r in self.records:
            groups.setdefault((r.kind, r.algorithm), []).append(r.s)
        out = {}
        for key in sorted(groups):
            s = np.array(groups[key])
            out[key] = Aggregate(float(s.mean()), float(s.min()), float(s.max()), float(s.std()), s.size)
        return out

    def scores(self, algorithm: str | None = None, exclude: Iterable[str] = ()) -> np.ndarray:
        skip = set(exclude)
        return np.array(
            [
                r.s
                for r in self.records
                if (algorithm is None or r.algorithm == algorithm) and r.kind not in skip
            ]
        )


def record_seed(run_seed: int, image_id: str, attack_label: str) -> int:
    return derive_seed(run_seed, image_id, attack_label)


def _image_records(
    image_id: str, img: RasterImage, algorithms: Sequence[str], grid: Sequence[AttackSpec], seed: int
) -> list[BenchRecord]:
    originals = {a: compute_hash(a, img) for a in algorithms}
    records = []
    for spec in grid:
        attacked = apply_attack(img, spec, record_seed(seed, image_id, spec.label))
        for a in algorithms:
            s = correlation(originals[a], compute_hash(a, attacked))
            records.append(BenchRecord(image_id, spec.label, spec.kind, a, s))
    return records


def _check_algorithms(algorithms) -> list[str]:
    algos = list(dict.fromkeys(algorithms))
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise KeyError(f"unknown hash algorithm(s): {', '.join(unknown)}")
    if not algos:
        raise ValueError("no algorithms selected")
    return algos


def intra_test(
    dataset: Dataset,
    algorithms: Iterable[str],
    grid: Sequence[AttackSpec],
    seed: int,
    jobs: int = 1,
) -> BenchReport:
    """Correlate each original's hash with the hashes of its attacked copies.

    ``jobs > 1`` spreads images over worker processes; records are emitted in
    (image, grid, algorithm) order either way, so output does not depend on it.
    """
    algos = _check_algorithms(algorithms)
    if not grid:
        raise ValueError("empty attack grid")
    images, failures = load_dataset(dataset)
    if not images and not failures:
        raise ValueError("empty dataset")
    ids = list(images)
    if jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(
                pool.map(
                    _image_records,
                    ids,
                    [images[i] for i in ids],
                    itertools.repeat(algos),
                    itertools.repeat(list(grid)),
                    itertools.repeat(seed),
                )
            )
    else:
        chunks = [_image_records(i, images[i], algos, grid, seed) for i in ids]
    records = [r for chunk in chunks for r in chunk]
    return BenchReport(records, seed, [s.label for s in grid], failures)


@dataclass
class InterResult:
    """S for every unordered pair of distinct images, per algorithm."""

    pairs: dict[str, list[tuple[str, str, float]]]
    failures: list[tuple[str, str]] = field(default_factory=list)

    def scores(self, algorithm: str | None = None) -> np.ndarray:
        algos = [algorithm] if algorithm else sorted(self.pairs)
        return np.array([s for a in algos for _, _, s in self.pairs[a]])


def inter_test(dataset: Dataset, algorithms: Iterable[str]) -> InterResult:
    algos = _check_algorithms(algorithms)
    images, failures = load_dataset(dataset)
    if len(images) < 2:
        raise ValueError("inter-test needs at least two readable images")
    ids = list(images)
    pairs = {}
    for a in algos:
        hashes = {i: compute_hash(a, images[i]) for i in ids}
        pairs[a] = [(i, j, correlation(hashes[i], hashes[j])) for i, j in itertools.combinations(ids, 2)]
    return InterResult(pairs, failures)


def roc(
    intra: BenchReport,
    inter: InterResult,
    thresholds: Sequence[float],
    algorithm: str | None = None,
    exclude: Iterable[str] = (),
) -> list[tuple[float, float, float]]:
    """(T, TPR, FPR) rows; a pair counts as positive when S > T."""
    pos = intra.scores(algorithm, exclude)
    neg = inter.scores(algorithm)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("roc needs non-empty intra and inter score sets")
    ts = list(thresholds)
    if not ts or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("thresholds must be non-empty and strictly increasing")
    return [(t, float(np.mean(pos > t)), float(np.mean(neg > t))) for t in ts]


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

CSV_COLUMNS = ("operation", "algorithm", "mean_s", "min_s", "std_s", "n")


def _f4(x: float) -> str:
    text = f"{x:.4f}"
    return "0.0000" if text == "-0.0000" else text


def report_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for (kind, algo), agg in report.aggregates.items():
        writer.writerow([kind, algo, _f4(agg.mean), _f4(agg.min), _f4(agg.std), agg.n])
    return buf.getvalue()


def report_markdown(report: BenchReport) -> str:
    """Operations as rows, algorithms as columns of mean S."""
    aggs = report.aggregates
    kinds = sorted({k for k, _ in aggs})
    algos = sorted({a for _, a in aggs})
    lines = [
        "| operation | " + " | ".join(algos) + " |",
        "|---|" + "---:|" * len(algos),
    ]
    for kind in kinds:
        cells = [_f4(aggs[(kind, a)].mean) if (kind, a) in aggs else "" for a in algos]
        lines.append(f"| {kind} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def roc_csv(rows_by_algorithm: Mapping[str, list[tuple[float, float, float]]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("algorithm", "threshold", "tpr", "fpr"))
    for algo in sorted(rows_by_algorithm):
        for t, tpr, fpr in rows_by_algorithm[algo]:
            writer.writerow([algo, _f4(t), _f4(tpr), _f4(fpr)])
    return buf.getvalue()


def emit_report(report: BenchReport, fmt: str, path) -> None:
    if fmt == "csv":
        text = report_csv(report)
    elif fmt == "markdown":
        text = report_markdown(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def parse_report_csv(text: str) -> dict[tuple[str, str], Aggregate]:
    """Read back aggregates written by :func:`report_csv` (max is not stored)."""
    rows = list(csv.DictReader(io.StringIO(text)))
    out = {}
    for row in rows:
        out[(row["operation"], row["algorithm"])] = Aggregate(
            float(row["mean_s"]), float(row["min_s"]), math.nan, float(row["std_s"]), int(row["n"])
        )
    return out


def default_thresholds(step: float = 0.05) -> list[float]:
    n = int(round(2 / step))
    return [round(-1 + i * step, 10) for i in range(n + 1)]


def cpu_jobs() -> int:
    return max(1, (os.cpu_count() or 1))
