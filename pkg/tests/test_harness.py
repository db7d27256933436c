import json
import math

import numpy as np
import pytest

from obbmatch.anchors import GridConfig, pyramid_levels
from obbmatch.assignment import MatchingConfig
from obbmatch.errors import EmptyGroundTruth, FormatError, InvalidConfig
from obbmatch.geometry import OrientedBox, rotated_iou, same_box
from obbmatch.harness.annotations import Scene, parse_annotations
from obbmatch.harness.bench import run_benchmark
from obbmatch.harness.experiment import STRATEGIES, run_experiment
from obbmatch.harness.oracle import MIN_SAMPLES, mc_iou_oracle
from obbmatch.harness.stats import (
    Histogram,
    StatsReport,
    build_histogram,
    emit_report,
    load_report,
    report_to_csv,
    report_to_json,
    spearman,
    summarize_scatter,
)
from obbmatch.harness.synthetic import (
    CorpusParams,
    RegressorParams,
    regress_toward,
    synthetic_regressor,
    synthetic_scenes,
)

SQUARE_LINE = "10 10 30 10 30 20 10 20 ship 0\n"
TILTED_LINE = "0 0 4 4 2 6 -2 2 plane 1\n"


class TestAnnotations:
    def test_axis_aligned_quad(self, tmp_path):
        f = tmp_path / "scene.txt"
        f.write_text(SQUARE_LINE)
        result = parse_annotations(f)
        assert result.ok
        assert len(result.scenes) == 1
        scene = result.scenes[0]
        assert (scene.width, scene.height) == (800.0, 800.0)
        gt = scene.objects[0]
        assert gt.label == "ship"
        assert gt.difficult is False
        assert same_box(gt.box, OrientedBox(20.0, 15.0, 20.0, 10.0, 0.0))

    def test_tilted_quad_and_difficulty(self, tmp_path):
        f = tmp_path / "scene.txt"
        f.write_text(TILTED_LINE)
        gt = parse_annotations(f, image_size=(64, 64)).scenes[0].objects[0]
        assert gt.difficult is True
        # 45-degree rectangle with diagonals 4*sqrt(2) and 2*sqrt(2)
        assert gt.box.w * gt.box.h == pytest.approx(
            4 * math.sqrt(2) * 2 * math.sqrt(2), rel=1e-9
        )

    def test_blank_lines_skipped(self, tmp_path):
        f = tmp_path / "scene.txt"
        f.write_text("\n" + SQUARE_LINE + "\n\n" + TILTED_LINE)
        result = parse_annotations(f)
        assert result.ok
        assert len(result.scenes[0].objects) == 2

    def test_lenient_keeps_valid_lines(self, tmp_path):
        f = tmp_path / "scene.txt"
        f.write_text(SQUARE_LINE + "1 2 3\n" + TILTED_LINE
                     + "a b c d e f g h ship 0\n")
        result = parse_annotations(f)
        assert len(result.scenes[0].objects) == 2
        assert [i.line_no for i in result.issues] == [2, 4]
        assert not result.ok

    def test_strict_raises_with_line_number(self, tmp_path):
        f = tmp_path / "scene.txt"
        f.write_text(SQUARE_LINE + "1 2 3\n")
        with pytest.raises(FormatError) as exc:
            parse_annotations(f, strict=True)
        assert exc.value.line_no == 2

    def test_degenerate_quad_is_an_issue(self, tmp_path):
        f = tmp_path / "scene.txt"
        f.write_text("5 5 5 5 5 5 5 5 ship 0\n")
        result = parse_annotations(f)
        assert result.scenes == []
        assert len(result.issues) == 1

    def test_directory_sorted(self, tmp_path):
        (tmp_path / "b.txt").write_text(TILTED_LINE)
        (tmp_path / "a.txt").write_text(SQUARE_LINE)
        (tmp_path / "empty.txt").write_text("")
        (tmp_path / "notes.md").write_text("ignored")
        result = parse_annotations(tmp_path)
        assert result.ok
        assert [s.objects[0].label for s in result.scenes] == ["ship", "plane"]

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            parse_annotations(tmp_path / "nope.txt")


ANCHOR = OrientedBox(10.0, 10.0, 8.0, 4.0, 0.2)
TARGET = OrientedBox(14.0, 12.0, 10.0, 6.0, -0.3)


class TestSyntheticRegressor:
    def test_pull_endpoints_exact(self):
        rng = np.random.default_rng(0)
        at_anchor = regress_toward(ANCHOR, TARGET, 0.0, 0.0, rng)
        at_target = regress_toward(ANCHOR, TARGET, 1.0, 0.0, rng)
        assert at_anchor == ANCHOR
        assert at_target == TARGET

    def test_midpoint(self):
        mid = regress_toward(ANCHOR, TARGET, 0.5, 0.0, np.random.default_rng(0))
        assert mid.x == pytest.approx(12.0)
        assert mid.w == pytest.approx(9.0)
        assert mid.angle == pytest.approx(-0.05)

    def test_angle_moves_along_wrapped_residual(self):
        a = OrientedBox(0.0, 0.0, 4.0, 2.0, 1.5)
        t = OrientedBox(0.0, 0.0, 4.0, 2.0, -1.5)
        mid = regress_toward(a, t, 0.5, 0.0, np.random.default_rng(0))
        # residual wraps to ~ +0.1416, not -3.0
        assert mid.angle == pytest.approx(1.5 + 0.5 * (math.pi - 3.0))

    def test_zero_noise_leaves_rng_untouched(self):
        rng = np.random.default_rng(7)
        before = rng.bit_generator.state
        regress_toward(ANCHOR, TARGET, 0.4, 0.0, rng)
        assert rng.bit_generator.state == before

    def test_seeded_wrapper_deterministic(self):
        a = synthetic_regressor(ANCHOR, TARGET, 0.4, 0.1, seed=11)
        b = synthetic_regressor(ANCHOR, TARGET, 0.4, 0.1, seed=11)
        c = synthetic_regressor(ANCHOR, TARGET, 0.4, 0.1, seed=12)
        assert a == b
        assert a != c

    def test_params_validation(self):
        with pytest.raises(ValueError):
            RegressorParams(pull_low=0.9, pull_high=0.2)
        with pytest.raises(ValueError):
            RegressorParams(noise_scale=-0.1)


class TestSyntheticScenes:
    def test_deterministic(self):
        a = synthetic_scenes(6, seed=3)
        b = synthetic_scenes(6, seed=3)
        assert a == b
        assert a != synthetic_scenes(6, seed=4)

    def test_prefix_stable(self):
        assert synthetic_scenes(8, seed=5)[:3] == synthetic_scenes(3, seed=5)

    def test_respects_params(self):
        params = CorpusParams(min_objects=2, max_objects=4)
        for scene in synthetic_scenes(20, seed=9, params=params):
            assert 2 <= len(scene.objects) <= 4
            for gt in scene.objects:
                box = gt.box
                assert box.w >= box.h
                assert params.angle_low <= box.angle <= params.angle_high
                assert params.margin <= box.x <= params.image_w - params.margin

    def test_counts(self):
        assert synthetic_scenes(0, seed=1) == []
        with pytest.raises(ValueError):
            synthetic_scenes(-1, seed=1)


class TestHistogram:
    def test_counts_and_closed_last_bin(self):
        hist = build_histogram([0.05, 0.15, 0.95, 1.0], (0.0, 0.1, 0.9, 1.0))
        assert hist.counts == (1, 1, 2)
        assert hist.total == 4

    def test_edge_mismatch(self):
        with pytest.raises(ValueError):
            Histogram(edges=(0.0, 1.0), counts=(1, 2))

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            build_histogram([1.5], (0.0, 0.5, 1.0))


class TestSpearman:
    def test_perfect_monotone(self):
        assert spearman([1, 2, 3, 4], [10, 20, 30, 40]) == 1.0
        assert spearman([1, 2, 3, 4], [5, 1, 0, -2]) == -1.0

    def test_nonlinear_monotone_still_one(self):
        x = [0.1, 0.5, 0.9, 2.0]
        assert spearman(x, [math.exp(v) for v in x]) == 1.0

    def test_ties_averaged(self):
        assert spearman([1, 1, 2], [3, 4, 5]) == pytest.approx(
            0.5 * math.sqrt(3.0), rel=1e-12
        )

    def test_degenerate_zero(self):
        assert spearman([1.0], [2.0]) == 0.0
        assert spearman([1, 2, 3], [5, 5, 5]) == 0.0

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            spearman([1, 2], [1, 2, 3])


class TestScatterSummary:
    def test_empty(self):
        sc = summarize_scatter([], [])
        assert sc.count == 0
        assert sc.bin_mean_y == (None,) * 10

    def test_bin_means(self):
        sc = summarize_scatter([0.05, 0.07, 0.55, 0.99],
                               [1.0, 3.0, 5.0, 7.0])
        assert sc.count == 4
        assert sc.bin_mean_y[0] == pytest.approx(2.0)
        assert sc.bin_mean_y[5] == pytest.approx(5.0)
        assert sc.bin_mean_y[9] == pytest.approx(7.0)
        assert sc.bin_mean_y[3] is None


EXP_GRID = GridConfig(32.0, 32.0, levels=pyramid_levels((8, 16)))


def small_report(strategy="matching-degree", seed=99):
    scenes = synthetic_scenes(8, seed=42)
    return run_experiment(scenes, EXP_GRID, MatchingConfig(),
                          RegressorParams(), strategy, seed)


class TestExperiment:
    def test_report_consistency(self):
        report = small_report()
        assert report.n_scenes == 8
        assert report.n_anchors == 60
        assert report.positive_output_iou.total == report.n_positives
        assert 0.0 <= report.frac_positives_localized <= 1.0
        assert report.input_iou_vs_score.count == 8 * 60

    def test_deterministic_bytes(self):
        assert report_to_json(small_report()) == report_to_json(small_report())

    def test_seed_matters(self):
        assert small_report(seed=99) != small_report(seed=100)

    def test_unknown_strategy(self):
        with pytest.raises(InvalidConfig):
            small_report(strategy="best-guess")

    def test_all_strategies_run(self):
        for strategy in STRATEGIES:
            assert small_report(strategy).strategy == strategy

    def test_empty_corpus_rejected(self):
        empty = [Scene(32.0, 32.0, ())]
        with pytest.raises(EmptyGroundTruth):
            run_experiment(empty, EXP_GRID, MatchingConfig(),
                           RegressorParams(), "matching-degree", 1)

    def test_blend_beats_input_iou_on_one_trial(self):
        scenes = synthetic_scenes(40, seed=1000)
        md = run_experiment(scenes, EXP_GRID, MatchingConfig(),
                            RegressorParams(), "matching-degree", 5000)
        ii = run_experiment(scenes, EXP_GRID, MatchingConfig(),
                            RegressorParams(), "input-iou", 5000)
        assert md.frac_positives_localized > ii.frac_positives_localized
        assert md.output_iou_vs_score.spearman > ii.output_iou_vs_score.spearman


class TestReportSerialization:
    def test_json_round_trip(self, tmp_path):
        report = small_report()
        path = tmp_path / "report.json"
        emit_report(report, "json", path)
        assert load_report(path) == report

    def test_json_byte_stable(self, tmp_path):
        report = small_report()
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        emit_report(report, "json", a)
        emit_report(report, "json", b)
        assert a.read_bytes() == b.read_bytes()

    def test_csv_files(self, tmp_path):
        report = small_report()
        out = tmp_path / "csvdir"
        written = emit_report(report, "csv", out)
        names = sorted(p.name for p in written)
        assert names == [
            "input_iou_vs_score.csv",
            "output_iou_vs_score.csv",
            "positive_output_iou_hist.csv",
            "summary.csv",
        ]
        summary = (out / "summary.csv").read_text()
        assert "n_positives" in summary
        assert report_to_csv(report)["summary.csv"] == summary

    def test_bad_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report(small_report(), "yaml", tmp_path / "x")

    def test_report_validation(self):
        hist = build_histogram([0.5], (0.0, 0.5, 1.0))
        with pytest.raises(ValueError):
            StatsReport(
                schema_version=1, strategy="input-iou", seed=0, n_scenes=1,
                n_anchors=1, n_positives=2, n_positives_localized=0,
                n_good_detections=0, n_good_from_positives=0,
                frac_positives_localized=0.0, frac_good_from_positives=0.0,
                positive_output_iou=hist,
                input_iou_vs_score=summarize_scatter([], []),
                output_iou_vs_score=summarize_scatter([], []),
            )


class TestMonteCarloOracle:
    def test_sample_floor(self):
        box = OrientedBox(0.0, 0.0, 4.0, 2.0, 0.1)
        with pytest.raises(ValueError):
            mc_iou_oracle(box, box, MIN_SAMPLES - 1, seed=0)

    def test_identical_boxes(self):
        box = OrientedBox(0.0, 0.0, 4.0, 2.0, 0.3)
        est, se = mc_iou_oracle(box, box, MIN_SAMPLES, seed=5)
        assert est == 1.0
        assert se == 0.0

    def test_disjoint_boxes(self):
        a = OrientedBox(0.0, 0.0, 2.0, 2.0, 0.0)
        b = OrientedBox(100.0, 0.0, 2.0, 2.0, 0.7)
        est, _ = mc_iou_oracle(a, b, MIN_SAMPLES, seed=5)
        assert est == 0.0

    def test_agrees_with_exact(self):
        a = OrientedBox(0.0, 0.0, 10.0, 6.0, 0.4)
        b = OrientedBox(2.0, 1.0, 8.0, 8.0, -0.2)
        est, se = mc_iou_oracle(a, b, 200_000, seed=31)
        assert abs(rotated_iou(a, b) - est) <= 3.0 * se

    def test_deterministic(self):
        a = OrientedBox(0.0, 0.0, 10.0, 6.0, 0.4)
        b = OrientedBox(2.0, 1.0, 8.0, 8.0, -0.2)
        assert mc_iou_oracle(a, b, MIN_SAMPLES, seed=8) == \
            mc_iou_oracle(a, b, MIN_SAMPLES, seed=8)


class TestBench:
    def test_zero_pairs(self):
        report = run_benchmark(0, seed=1)
        assert report.n_pairs == 0
        assert report.iou_checksum == 0.0
        assert report.assign_scenes == 0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            run_benchmark(-1, seed=1)

    def test_checksum_deterministic(self):
        a = run_benchmark(2000, seed=21, assign_scenes=2)
        b = run_benchmark(2000, seed=21, assign_scenes=2)
        assert a.iou_checksum == b.iou_checksum
        assert a.assign_positive_total == b.assign_positive_total
        assert a.n_pairs == b.n_pairs == 2000
        assert a.iou_pairs_per_second > 0
