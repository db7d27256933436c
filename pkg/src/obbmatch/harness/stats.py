"""Experiment statistics and deterministic report serialization.

Reports serialize to JSON (sorted keys, repr-exact floats) so identical
runs produce byte-identical files, or to a directory of CSV files, one
per histogram or scatter summary plus one for the scalars.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Histogram:
    """Fixed-edge histogram; len(edges) == len(counts) + 1."""

    edges: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.counts) + 1:
            raise ValueError(
                f"{len(self.edges)} edges do not fit {len(self.counts)} bins"
            )

    @property
    def total(self) -> int:
        return sum(self.counts)


def build_histogram(values, edges) -> Histogram:
    """Histogram of values over fixed edges; the last bin is right-closed."""
    arr = np.asarray(list(values), dtype=np.float64)
    counts, _ = np.histogram(arr, bins=np.asarray(edges, dtype=np.float64))
    out = Histogram(tuple(float(e) for e in edges), tuple(int(c) for c in counts))
    if out.total != arr.size:
        raise ValueError(
            f"histogram mass {out.total} does not cover {arr.size} samples"
        )
    return out


def spearman(x, y) -> float:
    """Spearman rank correlation with average ranks for ties.

    Returns 0.0 when either side is constant or has fewer than 2 samples,
    which keeps reports JSON-clean (no NaN).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise ValueError(f"{x.size} vs {y.size} samples")
    if x.size < 2:
        return 0.0
    rx = _average_ranks(x) - 0.5 * (x.size + 1)
    ry = _average_ranks(y) - 0.5 * (y.size + 1)
    vx = float(np.mean(rx * rx))
    vy = float(np.mean(ry * ry))
    if vx == 0.0 or vy == 0.0:
        return 0.0
    # cov/sqrt(vx*vy) over shared centered products lands on exactly +-1
    # for perfectly concordant or reversed rankings
    r = float(np.mean(rx * ry)) / math.sqrt(vx * vy)
    return max(-1.0, min(1.0, r))


def _average_ranks(v):
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=np.float64)
    sv = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


@dataclass(frozen=True)
class ScatterSummary:
    """Rank correlation plus decile profile of (metric, score) samples.

    bin_mean_y[k] is the mean score over samples whose metric falls in the
    k-th tenth of [0, 1]; empty tenths carry None.
    """

    count: int
    spearman: float
    mean_x: float
    mean_y: float
    bin_mean_y: tuple[float | None, ...]


def summarize_scatter(x, y) -> ScatterSummary:
    x = np.asarray(list(x), dtype=np.float64)
    y = np.asarray(list(y), dtype=np.float64)
    if x.size != y.size:
        raise ValueError(f"{x.size} vs {y.size} samples")
    if x.size == 0:
        return ScatterSummary(0, 0.0, 0.0, 0.0, (None,) * 10)
    rho = spearman(x, y)
    edges = np.linspace(0.0, 1.0, 11)
    idx = np.clip(np.digitize(x, edges) - 1, 0, 9)
    means: list[float | None] = []
    for k in range(10):
        sel = y[idx == k]
        means.append(float(sel.mean()) if sel.size else None)
    return ScatterSummary(int(x.size), rho, float(x.mean()), float(y.mean()),
                          tuple(means))


@dataclass(frozen=True)
class StatsReport:
    """Positive-quality statistics of one experiment run."""

    schema_version: int
    strategy: str
    seed: int
    n_scenes: int
    n_anchors: int
    n_positives: int
    n_positives_localized: int
    n_good_detections: int
    n_good_from_positives: int
    frac_positives_localized: float
    frac_good_from_positives: float
    positive_output_iou: Histogram
    input_iou_vs_score: ScatterSummary
    output_iou_vs_score: ScatterSummary

    def __post_init__(self):
        for name in ("frac_positives_localized", "frac_good_from_positives"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.positive_output_iou.total != self.n_positives:
            raise ValueError(
                f"histogram mass {self.positive_output_iou.total} "
                f"!= {self.n_positives} positives"
            )


def report_to_json(report: StatsReport) -> str:
    payload = dataclasses.asdict(report)
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_report(path) -> StatsReport:
    """Rebuild a StatsReport from its JSON file; round-trips exactly."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    hist = payload.pop("positive_output_iou")
    sx = payload.pop("input_iou_vs_score")
    sy = payload.pop("output_iou_vs_score")
    return StatsReport(
        positive_output_iou=Histogram(tuple(hist["edges"]), tuple(hist["counts"])),
        input_iou_vs_score=_scatter_from(sx),
        output_iou_vs_score=_scatter_from(sy),
        **payload,
    )


def _scatter_from(d) -> ScatterSummary:
    return ScatterSummary(d["count"], d["spearman"], d["mean_x"], d["mean_y"],
                          tuple(d["bin_mean_y"]))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def report_to_csv(report: StatsReport) -> dict[str, str]:
    """CSV rendering: file name -> contents, one file per table."""
    scalars = [
        (name, getattr(report, name))
        for name in (
            "schema_version", "strategy", "seed", "n_scenes", "n_anchors",
            "n_positives", "n_positives_localized", "n_good_detections",
            "n_good_from_positives", "frac_positives_localized",
            "frac_good_from_positives",
        )
    ]
    files = {"summary.csv": _csv_text(("key", "value"), scalars)}
    hist = report.positive_output_iou
    files["positive_output_iou_hist.csv"] = _csv_text(
        ("bin_lo", "bin_hi", "count"),
        [
            (hist.edges[i], hist.edges[i + 1], hist.counts[i])
            for i in range(len(hist.counts))
        ],
    )
    for name in ("input_iou_vs_score", "output_iou_vs_score"):
        sc: ScatterSummary = getattr(report, name)
        rows = [
            ("count", sc.count),
            ("spearman", sc.spearman),
            ("mean_x", sc.mean_x),
            ("mean_y", sc.mean_y),
        ]
        rows += [
            (f"bin_mean_y_{k}", "" if v is None else v)
            for k, v in enumerate(sc.bin_mean_y)
        ]
        files[f"{name}.csv"] = _csv_text(("key", "value"), rows)
    return files


def emit_report(report: StatsReport, fmt: str, path) -> list[Path]:
    """Write a report as JSON (one file) or CSV (one directory of files).

    Returns the paths written.  Identical reports always serialize to
    identical bytes.
    """
    path = Path(path)
    if fmt == "json":
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report_to_json(report), encoding="utf-8")
        return [path]
    if fmt == "csv":
        path.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in sorted(report_to_csv(report).items()):
            target = path / name
            target.write_text(text, encoding="utf-8")
            written.append(target)
        return written
    raise ValueError(f"format must be json or csv, got {fmt!r}")
