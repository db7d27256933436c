"""Command line entry point.

Subcommands:

    assign      label anchors for annotated or synthetic scenes
    experiment  run one selection strategy over a corpus, emit statistics
    bench       time the IoU and assignment hot paths
    oracle      cross-check exact IoU against the Monte Carlo estimate
    nms         greedy rotated NMS over a detections file

Every subcommand takes --config (key=value file) plus flags that override
it.  Exit status: 0 on success, 1 on runtime errors, 2 on malformed
inputs or flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from ..anchors import GridConfig
from ..assignment import MatchingConfig, assign
from ..errors import FormatError, ObbMatchError
from ..geometry import OrientedBox, rotated_iou, rotated_nms
from .annotations import parse_annotations
from .bench import run_benchmark
from .config import FORMAT_CHOICES, STRATEGY_CHOICES, Settings, resolve_settings
from .experiment import run_experiment
from .oracle import MIN_SAMPLES, mc_iou_oracle
from .stats import SCHEMA_VERSION, emit_report
from .synthetic import CorpusParams, RegressorParams, regress_toward, synthetic_scenes

import numpy as np


def _emit_json(payload: dict, out: str | None):
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def _emit_kv(payload: dict, settings: Settings, out: str | None):
    if settings.format == "json":
        _emit_json(payload, out)
        return
    lines = ["key,value"]
    for key, value in sorted(payload.items()):
        lines.append(f"{key},{value}")
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_table(header: str, rows: list[str], out: str | None):
    text = "\n".join([header, *rows]) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_scenes(args, settings: Settings):
    if args.annotations:
        result = parse_annotations(
            args.annotations,
            image_size=(settings.image_w, settings.image_h),
            strict=settings.strict,
        )
        for issue in result.issues:
            print(f"warning: {issue.path}:{issue.line_no}: {issue.message}",
                  file=sys.stderr)
        return result.scenes
    params = CorpusParams(image_w=settings.image_w, image_h=settings.image_h)
    return synthetic_scenes(settings.scenes, settings.seed, params)


def _grid_config(settings: Settings) -> GridConfig:
    return GridConfig(settings.image_w, settings.image_h,
                      settings.levels, settings.ratios)


def _matching(settings: Settings) -> MatchingConfig:
    return MatchingConfig(alpha0=settings.alpha0, gamma=settings.gamma,
                          pos_threshold=settings.threshold)


def _regressor(settings: Settings) -> RegressorParams:
    return RegressorParams(pull_low=settings.pull_low,
                           pull_high=settings.pull_high,
                           noise_scale=settings.noise_scale)


def _cmd_assign(args) -> int:
    settings = resolve_settings(args)
    scenes = _load_scenes(args, settings)
    if not scenes:
        print("error: no scenes with objects to assign", file=sys.stderr)
        return 1
    grid = _grid_config(settings).build()
    matching = _matching(settings)
    reg = _regressor(settings)
    root = np.random.SeedSequence(settings.seed)
    out_scenes = []
    for idx, (scene, child) in enumerate(zip(scenes, root.spawn(len(scenes)))):
        if not scene.objects:
            continue
        rng = np.random.default_rng(child)
        gts = scene.boxes
        pulls = rng.uniform(reg.pull_low, reg.pull_high, len(grid.anchors))
        preds = []
        for i, a in enumerate(grid.anchors):
            nearest = max(range(len(gts)), key=lambda g: rotated_iou(a, gts[g]))
            preds.append(regress_toward(a, gts[nearest], float(pulls[i]),
                                        reg.noise_scale, rng))
        result = assign(grid, preds, gts, matching, settings.progress)
        out_scenes.append({
            "scene": idx,
            "n_anchors": result.n_anchors,
            "n_gts": len(gts),
            "positives": [
                {
                    "anchor": i,
                    "gt": result.matched_gt[i],
                    "md": result.md[i],
                    "weight": result.weights[i],
                }
                for i in result.positives
            ],
            "gt_summaries": [
                {
                    "md_max": result.gt_md_max[g],
                    "delta_md": result.gt_delta_md[g],
                    "n_positives": result.gt_n_positives[g],
                }
                for g in range(len(gts))
            ],
        })
    if settings.format == "json":
        _emit_json({"schema_version": SCHEMA_VERSION, "scenes": out_scenes},
                   args.out)
    else:
        # csv keeps the per-positive table; gt summaries are json-only
        rows = [
            f"{s['scene']},{p['anchor']},{p['gt']},{p['md']},{p['weight']}"
            for s in out_scenes for p in s["positives"]
        ]
        _emit_table("scene,anchor,gt,md,weight", rows, args.out)
    return 0


def _cmd_experiment(args) -> int:
    settings = resolve_settings(args)
    scenes = _load_scenes(args, settings)
    report = run_experiment(
        scenes,
        _grid_config(settings),
        _matching(settings),
        _regressor(settings),
        settings.strategy,
        settings.seed,
        progress=settings.progress,
        score_noise=settings.score_noise,
    )
    if args.out in (None, "-") and settings.format == "json":
        from .stats import report_to_json

        sys.stdout.write(report_to_json(report))
    else:
        out = args.out if args.out not in (None, "-") else "report"
        for path in emit_report(report, settings.format, out):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    settings = resolve_settings(args)
    report = run_benchmark(settings.pairs, settings.seed)
    _emit_kv(dataclasses.asdict(report), settings, args.out)
    return 0


def _cmd_oracle(args) -> int:
    settings = resolve_settings(args)
    if settings.samples < MIN_SAMPLES:
        print(f"error: samples must be at least {MIN_SAMPLES}, got "
              f"{settings.samples}", file=sys.stderr)
        return 2
    rng = np.random.default_rng(settings.seed)
    worst_ratio = 0.0
    n_within = 0
    rows = []
    for i in range(settings.pairs):
        a = _random_box(rng)
        b = _random_box(rng, near=a)
        exact = rotated_iou(a, b)
        est, se = mc_iou_oracle(a, b, settings.samples, seed=int(rng.integers(2**63)))
        diff = abs(exact - est)
        ratio = diff / se if se > 0 else 0.0
        ok = diff <= 3.0 * se or (se == 0.0 and diff == 0.0)
        n_within += ok
        worst_ratio = max(worst_ratio, ratio)
        rows.append({"pair": i, "exact": exact, "estimate": est,
                     "se": se, "ok": bool(ok)})
    if settings.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "seed": settings.seed,
            "pairs": settings.pairs,
            "samples": settings.samples,
            "within_3se": n_within,
            "worst_sigma_ratio": worst_ratio,
            "rows": rows,
        }
        _emit_json(payload, args.out)
    else:
        _emit_table(
            "pair,exact,estimate,se,ok",
            [f"{r['pair']},{r['exact']},{r['estimate']},{r['se']},"
             f"{int(r['ok'])}" for r in rows],
            args.out,
        )
    return 0


def _random_box(rng, near=None):
    if near is None:
        x = rng.uniform(10.0, 90.0)
        y = rng.uniform(10.0, 90.0)
    else:
        x = near.x + rng.uniform(-15.0, 15.0)
        y = near.y + rng.uniform(-15.0, 15.0)
    return OrientedBox(
        float(x), float(y),
        float(rng.uniform(4.0, 30.0)), float(rng.uniform(4.0, 30.0)),
        float(rng.uniform(-1.5707, 1.5707)),
    )


def _cmd_nms(args) -> int:
    settings = resolve_settings(args)
    text = Path(args.boxes).read_text(encoding="utf-8")
    boxes, scores = [], []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        try:
            if len(parts) != 6:
                raise ValueError(f"expected 6 fields, got {len(parts)}")
            vals = [float(v) for v in parts]
            box = OrientedBox(*vals[:5])
        except ValueError as exc:
            if settings.strict:
                print(f"error: line {line_no}: {exc}", file=sys.stderr)
                return 2
            print(f"warning: line {line_no}: {exc}", file=sys.stderr)
            continue
        boxes.append(box)
        scores.append(vals[5])
    kept = rotated_nms(boxes, scores, settings.iou_threshold)
    if settings.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "n_boxes": len(boxes),
            "iou_threshold": settings.iou_threshold,
            "kept": kept,
        }
        _emit_json(payload, args.out)
    else:
        _emit_table("rank,index,score",
                    [f"{rank},{i},{scores[i]}" for rank, i in enumerate(kept)],
                    args.out)
    return 0


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="key=value settings file")
    sub.add_argument("--seed", type=int, help="root RNG seed")
    sub.add_argument("--strategy", choices=STRATEGY_CHOICES,
                     help="pair-quality metric driving selection")
    sub.add_argument("--alpha0", type=float, help="final input-IoU weight")
    sub.add_argument("--gamma", type=float, help="uncertainty penalty exponent")
    sub.add_argument("--threshold", type=float, help="positive cutoff")
    sub.add_argument("--format", choices=FORMAT_CHOICES, help="report format")
    sub.add_argument("--out", help="output path (default stdout)")
    sub.add_argument("--progress", type=float, help="training progress in [0, 1]")
    sub.add_argument("--strict", action="store_const", const=True, default=None,
                     help="fail on the first malformed input line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obbmatch",
        description="Rotated-box anchor selection and its desk-scale harness.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("assign", help="label anchors for a set of scenes")
    _add_common(p)
    p.add_argument("--annotations", help="annotation file or directory")
    p.add_argument("--scenes", type=int, help="synthetic scene count")
    p.set_defaults(func=_cmd_assign)

    p = subs.add_parser("experiment", help="selection-quality statistics")
    _add_common(p)
    p.add_argument("--annotations", help="annotation file or directory")
    p.add_argument("--scenes", type=int, help="synthetic scene count")
    p.add_argument("--score-noise", dest="score_noise", type=float,
                   help="observation noise on synthetic scores")
    p.add_argument("--pull-low", dest="pull_low", type=float)
    p.add_argument("--pull-high", dest="pull_high", type=float)
    p.add_argument("--noise-scale", dest="noise_scale", type=float)
    p.set_defaults(func=_cmd_experiment)

    p = subs.add_parser("bench", help="hot-path throughput")
    _add_common(p)
    p.add_argument("--pairs", type=int, help="IoU pairs to time")
    p.set_defaults(func=_cmd_bench)

    p = subs.add_parser("oracle", help="exact IoU vs Monte Carlo")
    _add_common(p)
    p.add_argument("--pairs", type=int, help="random pairs to compare")
    p.add_argument("--samples", type=int, help="Monte Carlo samples per pair")
    p.set_defaults(func=_cmd_oracle)

    p = subs.add_parser("nms", help="greedy rotated NMS")
    _add_common(p)
    p.add_argument("--boxes", required=True,
                   help="file of `x y w h angle score` lines")
    p.add_argument("--iou-threshold", dest="iou_threshold", type=float)
    p.set_defaults(func=_cmd_nms)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ObbMatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
