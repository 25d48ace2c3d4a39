from __future__ import annotations

import unittest

import numpy as np

from src.datasetgen import feature_design, render_feature
from src.errors import EmptyGroundTruth, ShapeMismatch
from src.evaluate import (
    AreaBucket,
    DetectionResult,
    GroundTruth,
    Prediction,
    RuleId,
    ap_table,
    average_precision,
    lsgan_d_loss,
    lsgan_g_loss,
    mean_average_precision,
    measure_wall,
    pixel_agreement,
    verify,
)
from src.geometry import CoreSpec, PartDesign, Treatment, UnitScale, WallKind, WallSide, WallSpec
from src.raster import PixelBox, rasterize
from src.rules import make_manufacturable

FEATURE = UnitScale.feature()


def result(pairs: list[tuple[PixelBox, PixelBox]], kind: WallKind = WallKind.THIN) -> DetectionResult:
    return DetectionResult.of(
        [Prediction(p, kind, 1.0) for p, _ in pairs],
        [GroundTruth(g, kind) for _, g in pairs],
    )


class LossTests(unittest.TestCase):
    def test_discriminator_loss(self) -> None:
        self.assertAlmostEqual(lsgan_d_loss([0.5], [0.5]), 0.5)
        self.assertAlmostEqual(lsgan_d_loss([1.0, 0.0], [1.0]), 2.0)
        self.assertAlmostEqual(lsgan_d_loss([1.0, 0.0], [1.0], normalize=True), 1.5)

    def test_generator_loss(self) -> None:
        image = np.zeros((4, 4), dtype=np.uint8)
        self.assertAlmostEqual(lsgan_g_loss([0.0], image, image, lam=10.0), 1.0)
        other = image.copy()
        other[0, 0] = 255
        self.assertAlmostEqual(lsgan_g_loss([1.0], other, image, lam=2.0), 2.0)

    def test_generator_loss_rejects_bad_input(self) -> None:
        image = np.zeros((4, 4))
        with self.assertRaises(ShapeMismatch):
            lsgan_g_loss([1.0], image, np.zeros((4, 5)), lam=1.0)
        with self.assertRaises(ValueError):
            lsgan_g_loss([1.0], image, image, lam=-1.0)
        with self.assertRaises(ValueError):
            lsgan_d_loss([], [0.0])

    def test_losses_are_never_negative(self) -> None:
        rng = np.random.default_rng(7)
        for _ in range(1000):
            d_real = rng.normal(size=int(rng.integers(1, 5)))
            d_fake = rng.normal(size=int(rng.integers(1, 5)))
            g_out = rng.integers(0, 256, size=(4, 4))
            target = rng.integers(0, 256, size=(4, 4))
            normalize = bool(rng.integers(0, 2))
            self.assertGreaterEqual(lsgan_d_loss(d_real, d_fake, normalize), 0.0)
            self.assertGreaterEqual(lsgan_g_loss(d_fake, g_out, target, float(rng.uniform(0, 100)), normalize), 0.0)


class AveragePrecisionTests(unittest.TestCase):
    BOXES = [PixelBox(10, 100, 40, 230), PixelBox(100, 60, 160, 230), PixelBox(200, 110, 240, 230)]

    def test_perfect_detections(self) -> None:
        table = ap_table([result([(b, b) for b in self.BOXES])])
        self.assertAlmostEqual(table["AP"], 100.0)
        self.assertAlmostEqual(table["AP50"], 100.0)
        self.assertAlmostEqual(table["AP_large"], 100.0)
        self.assertIsNone(table["AP_small"])

    def test_disjoint_detections_score_zero(self) -> None:
        moved = [PixelBox(b.x0, 0, b.x1, 20) for b in self.BOXES]
        self.assertAlmostEqual(average_precision([result(list(zip(moved, self.BOXES)))], 0.5), 0.0)

    def test_ap_decreases_with_box_shift(self) -> None:
        values = []
        for shift in (0, 4, 8, 16):
            pairs = [(PixelBox(b.x0 + shift, b.y0, b.x1 + shift, b.y1), b) for b in self.BOXES]
            values.append(mean_average_precision([result(pairs)]))
        self.assertEqual(values, sorted(values, reverse=True))
        self.assertLess(values[-1], values[0])

    def test_kind_mismatch_is_a_false_positive(self) -> None:
        box = self.BOXES[0]
        design = DetectionResult.of([Prediction(box, WallKind.THICK)], [GroundTruth(box, WallKind.THIN)])
        self.assertAlmostEqual(average_precision(design, 0.5), 0.0)

    def test_score_order_decides_matching(self) -> None:
        gt = self.BOXES[1]
        near = PixelBox(gt.x0 + 2, gt.y0, gt.x1 + 2, gt.y1)
        far = PixelBox(gt.x0 + 30, gt.y0, gt.x1 + 30, gt.y1)
        design = DetectionResult.of(
            [Prediction(far, WallKind.THIN, 0.9), Prediction(near, WallKind.THIN, 0.5)],
            [GroundTruth(gt, WallKind.THIN)],
        )
        # The higher-scoring far box consumes the only ground truth and misses at 0.5.
        self.assertAlmostEqual(average_precision(design, 0.5), 0.0)

    def test_designs_are_averaged(self) -> None:
        good = result([(self.BOXES[0], self.BOXES[0])])
        bad = result([(PixelBox(0, 0, 5, 5), self.BOXES[0])])
        self.assertAlmostEqual(average_precision([good, bad], 0.5), 50.0)

    def test_empty_ground_truth(self) -> None:
        empty = DetectionResult.of([], [])
        with self.assertRaises(EmptyGroundTruth):
            average_precision([empty], 0.5)
        self.assertIsNone(mean_average_precision([empty]))

    def test_segm_iou_uses_masks(self) -> None:
        mask = np.zeros((256, 256), dtype=np.uint8)
        mask[100:200, 50:60] = 11
        box = PixelBox(50, 100, 60, 200)
        design = DetectionResult.of([Prediction(box, WallKind.THIN, 1.0, mask)], [GroundTruth(box, WallKind.THIN, mask)])
        self.assertAlmostEqual(average_precision(design, 0.95, "segm"), 100.0)

    def test_area_buckets(self) -> None:
        self.assertTrue(AreaBucket.SMALL.contains(31 * 31))
        self.assertTrue(AreaBucket.MEDIUM.contains(32 * 32))
        self.assertTrue(AreaBucket.MEDIUM.contains(96 * 96))
        self.assertTrue(AreaBucket.LARGE.contains(96 * 96 + 1))


class PixelAgreementTests(unittest.TestCase):
    def test_agreement_fraction(self) -> None:
        a = np.zeros((4, 4), dtype=np.uint8)
        b = a.copy()
        b[0, :] = 255
        self.assertAlmostEqual(pixel_agreement(a, b), 0.75)
        self.assertAlmostEqual(pixel_agreement(a, a), 1.0)

    def test_shape_mismatch(self) -> None:
        with self.assertRaises(ShapeMismatch):
            pixel_agreement(np.zeros((4, 4)), np.zeros((5, 4)))


class MeasureWallTests(unittest.TestCase):
    def test_sharp_thin_wall(self) -> None:
        image = render_feature(feature_design(WallSpec(WallKind.THIN, 0.0, 0.5, 4.0), (-2.0, 2.0)))
        m = measure_wall(image, FEATURE, WallKind.THIN)
        tolerance = FEATURE.units_per_pixel
        self.assertAlmostEqual(m.width_top, 0.5, delta=tolerance)
        self.assertAlmostEqual(m.height, 4.0, delta=tolerance)
        self.assertLessEqual(abs(m.draft_deg_left), 0.25)
        self.assertLessEqual(abs(m.draft_deg_right), 0.25)
        self.assertLessEqual(m.top_round_radius, 0.1)
        self.assertLessEqual(m.base_fillet_radius, 0.1)
        self.assertFalse(m.cored)

    def test_treated_thick_wall(self) -> None:
        wall = WallSpec(
            WallKind.THICK,
            0.0,
            2.0,
            3.0,
            Treatment(draft_deg=1.0, base_fillet_radius=0.5, top_round_radius=0.5, core=CoreSpec(0.5)),
        )
        m = measure_wall(render_feature(feature_design(wall, (-3.0, 3.0))), FEATURE)
        self.assertIs(m.kind, WallKind.THICK)
        self.assertTrue(m.draft_left.admits(1.0, 0.25))
        self.assertTrue(m.draft_right.admits(1.0, 0.25))
        self.assertAlmostEqual(m.top_round_radius, 0.5, delta=0.1)
        self.assertAlmostEqual(m.base_fillet_radius, 0.5, delta=0.1)
        self.assertTrue(m.cored)
        self.assertAlmostEqual(m.shell_thickness, 0.5, delta=0.1)


def thin_feature(height: float, **treatment) -> np.ndarray:
    return render_feature(feature_design(WallSpec(WallKind.THIN, 0.0, 0.5, height, Treatment(**treatment)), (-2.0, 2.0)))


class DraftResolutionTests(unittest.TestCase):
    def test_vertical_faces_raise_draft_violations(self) -> None:
        for height in (3.5, 4.0, 4.5):
            with self.subTest(height=height):
                rules = {v.rule_id for v in verify(thin_feature(height))}
                self.assertIn(RuleId.DRAFT_ANGLE, rules)

    def test_one_degree_faces_never_do(self) -> None:
        walls = [WallSpec(WallKind.THIN, 0.0, 0.5, h) for h in (2.5, 3.0, 3.5, 4.0)]
        walls += [WallSpec(WallKind.THICK, 0.0, w, 3.0) for w in (1.4, 2.0, 2.6)]
        for wall in walls:
            treated = make_manufacturable(wall, 1.0)
            with self.subTest(kind=wall.kind.value, width=wall.top_width, height=wall.height):
                violations = verify(render_feature(feature_design(treated, (-3.0, 3.0))))
                self.assertNotIn(RuleId.DRAFT_ANGLE, {v.rule_id for v in violations})

    def test_measured_draft_follows_the_true_draft(self) -> None:
        estimates = []
        for draft in (0.0, 1.5, 3.0, 4.5):
            m = measure_wall(thin_feature(4.0, draft_deg=draft), FEATURE, WallKind.THIN)
            for face in (m.draft_left, m.draft_right):
                self.assertLessEqual(abs(face.estimate_deg - draft), 0.75)
            estimates.append((m.draft_deg_left + m.draft_deg_right) / 2.0)
        for lower, higher in zip(estimates, estimates[1:]):
            self.assertLess(lower, higher)


class CornerRadiusTests(unittest.TestCase):
    def test_treated_radius_range_verifies_clean(self) -> None:
        walls = [
            (WallSpec(WallKind.THIN, 0.0, 0.5, 4.0), (-2.0, 2.0)),
            (WallSpec(WallKind.THICK, 0.0, 2.0, 3.0), (-3.0, 3.0)),
        ]
        for radius in (0.4, 0.45, 0.5, 0.55, 0.6):
            for wall, span in walls:
                treated = make_manufacturable(wall, 1.0).with_treatment(
                    base_fillet_radius=radius, top_round_radius=radius
                )
                with self.subTest(kind=wall.kind.value, radius=radius):
                    self.assertEqual(verify(render_feature(feature_design(treated, span))), [])

    def test_rendered_radius_is_recovered(self) -> None:
        wall = make_manufacturable(WallSpec(WallKind.THICK, 0.0, 2.0, 3.0), 1.0)
        for radius in (0.4, 0.5, 0.6):
            treated = wall.with_treatment(base_fillet_radius=radius, top_round_radius=radius)
            m = measure_wall(render_feature(feature_design(treated, (-3.0, 3.0))), FEATURE, WallKind.THICK)
            with self.subTest(radius=radius):
                self.assertAlmostEqual(m.top_round_radius, radius, delta=0.1)
                self.assertAlmostEqual(m.base_fillet_radius, radius, delta=0.1)


class VerifyTests(unittest.TestCase):
    def part(self, manufacturable: bool) -> PartDesign:
        walls = [
            WallSpec(WallKind.SIDE, -4.4, 0.8, 3.0, side=WallSide.LEFT),
            WallSpec(WallKind.THIN, -1.8, 0.3, 5.0),
            WallSpec(WallKind.THICK, 1.4, 2.0, 3.0),
            WallSpec(WallKind.SIDE, 4.3, 1.0, 3.5, side=WallSide.RIGHT),
        ]
        if manufacturable:
            walls = [make_manufacturable(w, 1.0) for w in walls]
        return PartDesign(1.0, (-4.8, 4.8), tuple(walls))

    def test_manufacturable_part_is_clean(self) -> None:
        self.assertEqual(verify(rasterize(self.part(manufacturable=True))), [])

    def test_sharp_part_violates_each_rule_family(self) -> None:
        violations = verify(rasterize(self.part(manufacturable=False)))
        rules = {v.rule_id for v in violations}
        self.assertEqual(
            rules,
            {
                RuleId.ASPECT_RATIO,
                RuleId.THIN_WIDTH,
                RuleId.SIDE_WIDTH,
                RuleId.THICK_SHELL,
                RuleId.DRAFT_ANGLE,
                RuleId.CORNER_ROUND,
            },
        )
        indices = [v.wall_index for v in violations]
        self.assertEqual(indices, sorted(indices))
        thick = [v for v in violations if v.rule_id is RuleId.THICK_SHELL]
        self.assertEqual([(v.wall_index, v.detail) for v in thick], [(2, "not cored")])

    def test_manufacturable_feature_is_clean(self) -> None:
        wall = make_manufacturable(WallSpec(WallKind.THIN, 0.0, 0.8, 4.5), 1.0)
        self.assertEqual(verify(render_feature(feature_design(wall, (-2.0, 2.0)))), [])

    def test_violation_record_is_plain_data(self) -> None:
        record = verify(rasterize(self.part(manufacturable=False)))[0].to_record()
        self.assertEqual(set(record), {"rule_id", "wall_index", "measured", "allowed", "detail"})
        self.assertIsInstance(record["rule_id"], str)


if __name__ == "__main__":
    unittest.main()
