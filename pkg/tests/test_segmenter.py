from __future__ import annotations

import unittest
from dataclasses import dataclass

import numpy as np

from src.datasetgen import GenConfig, sample_example_design
from src.errors import EmptyImage, NoBottomWall
from src.geometry import PartDesign, WallKind, WallSide, WallSpec
from src.raster import FOREGROUND, MaskStyle, PixelBox, blank_raster, rasterize
from src.rules import make_manufacturable
from src.segmenter import (
    detect_walls,
    estimate_unit_scale,
    expand_box,
    filter_duplicates,
    find_band,
    inject_duplicates,
    iou,
    mask_iou,
    perturb_scores,
)

SPAN = (-4.8, 4.8)


@dataclass(frozen=True)
class Scored:
    box: PixelBox
    score: float


def part(*walls: WallSpec) -> PartDesign:
    return PartDesign(1.0, SPAN, walls)


def brute_force_iou(a: PixelBox, b: PixelBox) -> float:
    ma = np.zeros((64, 64), dtype=bool)
    mb = np.zeros((64, 64), dtype=bool)
    ma[a.y0:a.y1, a.x0:a.x1] = True
    mb[b.y0:b.y1, b.x0:b.x1] = True
    return np.count_nonzero(ma & mb) / np.count_nonzero(ma | mb)


class IouTests(unittest.TestCase):
    def test_hand_cases(self) -> None:
        a = PixelBox(0, 0, 10, 10)
        self.assertEqual(iou(a, a), 1.0)
        self.assertEqual(iou(a, PixelBox(10, 0, 20, 10)), 0.0)
        self.assertAlmostEqual(iou(a, PixelBox(5, 0, 15, 10)), 1.0 / 3.0)

    def test_matches_pixel_enumeration(self) -> None:
        rng = np.random.default_rng(3)
        for _ in range(1000):
            x0, y0, x1, y1 = (int(v) for v in rng.integers(0, 63, size=4))
            u0, v0, u1, v1 = (int(v) for v in rng.integers(0, 63, size=4))
            a = PixelBox(min(x0, x1), min(y0, y1), max(x0, x1) + 1, max(y0, y1) + 1)
            b = PixelBox(min(u0, u1), min(v0, v1), max(u0, u1) + 1, max(v0, v1) + 1)
            self.assertAlmostEqual(iou(a, b), brute_force_iou(a, b))
            self.assertAlmostEqual(iou(a, b), iou(b, a))

    def test_mask_iou_of_empty_masks_is_zero(self) -> None:
        self.assertEqual(mask_iou(np.zeros((4, 4)), np.zeros((4, 4))), 0.0)


class FilterDuplicatesTests(unittest.TestCase):
    def test_keeps_highest_score(self) -> None:
        keep = Scored(PixelBox(0, 0, 10, 10), 0.9)
        drop = Scored(PixelBox(1, 0, 11, 10), 0.5)
        other = Scored(PixelBox(40, 0, 50, 10), 0.1)
        self.assertEqual(filter_duplicates([drop, keep, other]), [keep, other])

    def test_equal_scores_keep_first(self) -> None:
        first = Scored(PixelBox(0, 0, 10, 10), 0.5)
        second = Scored(PixelBox(0, 0, 10, 10), 0.5)
        self.assertEqual(filter_duplicates([first, second]), [first])

    def test_injected_duplicates_are_removed(self) -> None:
        features = detect_walls(rasterize(sample_example_design(GenConfig(master_seed=5, n_examples=1), 0)))
        noisy = inject_duplicates(perturb_scores(features, seed=1), seed=2)
        self.assertEqual(len(noisy), 2 * len(features))
        filtered = filter_duplicates(noisy)
        self.assertEqual(len(filtered), len(features))
        for i, a in enumerate(filtered):
            for b in filtered[i + 1:]:
                self.assertLessEqual(iou(a.box, b.box), 0.2)
        self.assertEqual(filter_duplicates(filtered), filtered)


class ExpandBoxTests(unittest.TestCase):
    def test_expands_and_clamps(self) -> None:
        self.assertEqual(expand_box(PixelBox(2, 100, 50, 254)).as_tuple(), (0, 95, 55, 256))


class BandTests(unittest.TestCase):
    def test_unit_scale_from_bottom_thickness(self) -> None:
        image = rasterize(part())
        band = find_band(image)
        self.assertEqual((band.top, band.bottom, band.x0, band.x1), (205, 229, 5, 251))
        self.assertAlmostEqual(estimate_unit_scale(image).units_per_pixel, 1.0 / 25.0)

    def test_empty_image_raises(self) -> None:
        with self.assertRaises(EmptyImage):
            find_band(blank_raster())

    def test_vertical_bar_has_no_bottom_wall(self) -> None:
        image = blank_raster()
        image[20:220, 100:110] = FOREGROUND
        with self.assertRaises(NoBottomWall):
            find_band(image)

    def test_side_wall_crop_keeps_its_short_band(self) -> None:
        # A side wall standing on the end of a band barely twice its width.
        image = blank_raster()
        image[180:219, 100:175] = FOREGROUND
        image[60:180, 136:175] = FOREGROUND
        band = find_band(image)
        self.assertEqual((band.top, band.bottom, band.x0, band.x1), (180, 218, 100, 175))

    def test_lone_square_block_is_not_a_band(self) -> None:
        image = blank_raster()
        image[180:219, 100:139] = FOREGROUND
        with self.assertRaises(NoBottomWall):
            find_band(image)


class DetectWallsTests(unittest.TestCase):
    def test_kinds_left_to_right(self) -> None:
        design = part(
            WallSpec(WallKind.SIDE, -4.3, 1.0, 3.0, side=WallSide.LEFT),
            WallSpec(WallKind.THIN, -1.5, 0.5, 4.0),
            WallSpec(WallKind.THICK, 1.5, 2.0, 3.0),
            WallSpec(WallKind.SIDE, 4.5, 0.6, 2.5, side=WallSide.RIGHT),
        )
        features = detect_walls(rasterize(design))
        self.assertEqual(
            [f.kind for f in features],
            [WallKind.SIDE, WallKind.THIN, WallKind.THICK, WallKind.SIDE],
        )
        for a, b in zip(features, features[1:]):
            self.assertLess(a.box.x0, b.box.x0)

    def test_treated_walls_keep_their_kind(self) -> None:
        design = part(
            *(
                make_manufacturable(w, 1.0)
                for w in (
                    WallSpec(WallKind.SIDE, -4.3, 1.0, 3.0, side=WallSide.LEFT),
                    WallSpec(WallKind.THIN, -1.5, 0.5, 4.0),
                    WallSpec(WallKind.THICK, 1.5, 2.0, 3.0),
                    WallSpec(WallKind.SIDE, 4.3, 1.0, 3.0, side=WallSide.RIGHT),
                )
            )
        )
        kinds = [f.kind for f in detect_walls(rasterize(design))]
        self.assertEqual(kinds, [WallKind.SIDE, WallKind.THIN, WallKind.THICK, WallKind.SIDE])

    def test_long_masks_cover_the_band(self) -> None:
        image = rasterize(sample_example_design(GenConfig(master_seed=9, n_examples=1), 0))
        features = detect_walls(image, MaskStyle.LONG)
        band = find_band(image)
        union = np.zeros(image.shape, dtype=bool)
        for feature in features:
            union |= feature.mask > 0
        rows = slice(band.top, band.bottom + 1)
        np.testing.assert_array_equal(union[rows], image[rows] > 0)

    def test_short_masks_stay_near_the_wall(self) -> None:
        image = rasterize(sample_example_design(GenConfig(master_seed=9, n_examples=1), 0))
        long_masks = detect_walls(image, MaskStyle.LONG)
        short_masks = detect_walls(image, MaskStyle.SHORT)
        self.assertEqual(len(long_masks), len(short_masks))
        for lm, sm in zip(long_masks, short_masks):
            self.assertTrue(np.all((sm.mask > 0) <= (lm.mask > 0)))

    def test_sampled_designs_are_fully_detected(self) -> None:
        for walls in (3, 5):
            config = GenConfig(master_seed=21, n_examples=4, walls_per_part=walls)
            for index in range(config.n_examples):
                design = sample_example_design(config, index)
                with self.subTest(walls=walls, index=index):
                    features = detect_walls(rasterize(design))
                    self.assertEqual([f.kind for f in features], [w.kind for w in design.walls])

    def test_bar_without_walls_yields_nothing(self) -> None:
        self.assertEqual(detect_walls(rasterize(part())), [])


if __name__ == "__main__":
    unittest.main()
