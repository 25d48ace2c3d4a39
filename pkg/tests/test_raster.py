from __future__ import annotations

import tempfile
import unittest
from pathlib import Path

import numpy as np
from PIL import Image

from src.errors import CropTooLarge, FrameOverflow, TooManyWalls
from src.geometry import PartDesign, WallKind, WallSide, WallSpec
from src.raster import (
    FOREGROUND,
    RASTER_SIZE,
    MaskStyle,
    PixelBox,
    crop_to_feature_frame,
    instance_codes,
    paste_from_feature_frame,
    rasterize,
    read_png,
    render_mask,
    side_by_side,
    visualize_mask,
    write_png,
)
from src.raster.io import SHEET_GAP
from src.rules import make_manufacturable

SPAN = (-4.8, 4.8)


def three_wall_part(manufacturable: bool = False) -> PartDesign:
    walls = [
        WallSpec(WallKind.SIDE, -4.3, 1.0, 3.0, side=WallSide.LEFT),
        WallSpec(WallKind.THIN, 0.0, 0.5, 4.0),
        WallSpec(WallKind.SIDE, 4.3, 1.0, 3.0, side=WallSide.RIGHT),
    ]
    if manufacturable:
        walls = [make_manufacturable(w, 1.0) for w in walls]
    return PartDesign(1.0, SPAN, tuple(walls))


class RasterizeTests(unittest.TestCase):
    def test_bottom_wall_pixels_follow_pixel_centers(self) -> None:
        image = rasterize(PartDesign(1.0, SPAN))
        rows = np.flatnonzero(image.any(axis=1))
        cols = np.flatnonzero(image.any(axis=0))
        self.assertEqual((rows[0], rows[-1]), (205, 229))
        self.assertEqual((cols[0], cols[-1]), (5, 250))
        self.assertTrue(np.all(image[205:230, 5:251] == FOREGROUND))
        self.assertEqual(int(np.count_nonzero(image)), 25 * 246)

    def test_output_is_binary(self) -> None:
        image = rasterize(three_wall_part(manufacturable=True))
        self.assertEqual(image.shape, (RASTER_SIZE, RASTER_SIZE))
        self.assertEqual(image.dtype, np.uint8)
        self.assertTrue(set(np.unique(image)) <= {0, 255})

    def test_thin_wall_width_in_pixels(self) -> None:
        image = rasterize(three_wall_part())
        # Half a unit is 12.8 px; one row near mid-height of the thin wall.
        row = image[150]
        middle = row[100:156]
        self.assertIn(int(np.count_nonzero(middle)), (12, 13))

    def test_geometry_outside_frame_raises(self) -> None:
        design = PartDesign(1.0, SPAN, (WallSpec(WallKind.THIN, 0.0, 0.5, 9.5),))
        with self.assertRaises(FrameOverflow):
            rasterize(design)


class MaskTests(unittest.TestCase):
    def test_codes_follow_kind_and_order(self) -> None:
        design = three_wall_part()
        self.assertEqual(instance_codes(design), [31, 11, 32])
        mask = render_mask(design)
        self.assertEqual(set(np.unique(mask)) - {0}, {31, 11, 32})

    def test_long_masks_cover_every_foreground_pixel(self) -> None:
        design = three_wall_part(manufacturable=True)
        image = rasterize(design)
        mask = render_mask(design, MaskStyle.LONG)
        np.testing.assert_array_equal(mask > 0, image > 0)

    def test_short_masks_leave_bottom_between_walls(self) -> None:
        design = three_wall_part()
        image = rasterize(design)
        mask = render_mask(design, MaskStyle.SHORT)
        self.assertTrue(np.all((mask > 0) <= (image > 0)))
        # Plate pixels at x = -2 (column 76) belong to no wall.
        self.assertEqual(image[215, 76], FOREGROUND)
        self.assertEqual(mask[215, 76], 0)
        # Plate pixels directly under the thin wall do.
        self.assertEqual(mask[215, 128], 11)

    def test_ten_walls_of_one_kind_do_not_fit_the_code(self) -> None:
        walls = tuple(WallSpec(WallKind.THIN, -4.05 + 0.9 * i, 0.1, 2.0) for i in range(10))
        with self.assertRaises(TooManyWalls):
            instance_codes(PartDesign(1.0, SPAN, walls))

    def test_empty_design_has_empty_mask(self) -> None:
        self.assertFalse(render_mask(PartDesign(1.0, SPAN)).any())

    def test_visualization_scales_codes(self) -> None:
        mask = render_mask(three_wall_part())
        vis = visualize_mask(mask)
        self.assertEqual(int(vis[mask == 11][0]), 88)
        self.assertEqual(int(vis[mask == 31][0]), 248)


class FrameTransformTests(unittest.TestCase):
    def setUp(self) -> None:
        self.image = rasterize(three_wall_part(manufacturable=True))
        self.box = PixelBox(100, 90, 157, 235)

    def test_crop_puts_bottom_edge_half_a_unit_above_frame_bottom(self) -> None:
        crop, transform = crop_to_feature_frame(self.image, self.box)
        rows = np.flatnonzero(crop.any(axis=1))
        # 0.5 units at 6.6/256 units per pixel is ~19.4 px.
        self.assertIn(int(rows[-1]), range(235, 238))
        self.assertAlmostEqual(transform.scale_factor, 10.0 / 6.6)

    def test_crop_then_paste_is_near_identity(self) -> None:
        crop, transform = crop_to_feature_frame(self.image, self.box)
        pasted = paste_from_feature_frame(self.image, crop, transform)
        region = (slice(self.box.y0, self.box.y1), slice(self.box.x0, self.box.x1))
        differing = int(np.count_nonzero(pasted.canvas[region] != self.image[region]))
        self.assertLessEqual(differing, 0.02 * self.box.area)
        self.assertFalse(pasted.overflow)

    def test_transform_round_trips_coordinates(self) -> None:
        _crop, transform = crop_to_feature_frame(self.image, self.box)
        fx, fy = transform.to_feature(120.0, 200.0)
        x, y = transform.to_part(fx, fy)
        self.assertAlmostEqual(x, 120.0)
        self.assertAlmostEqual(y, 200.0)

    def test_oversized_box_raises(self) -> None:
        with self.assertRaises(CropTooLarge):
            crop_to_feature_frame(self.image, PixelBox(0, 0, 256, 256))

    def test_paste_beyond_box_reports_overflow(self) -> None:
        _crop, transform = crop_to_feature_frame(self.image, self.box)
        feature = np.zeros_like(self.image)
        feature[200:240, :] = FOREGROUND
        pasted = paste_from_feature_frame(self.image, feature, transform)
        self.assertTrue(pasted.overflow)

    def test_paste_leaves_canvas_untouched(self) -> None:
        before = self.image.copy()
        crop, transform = crop_to_feature_frame(self.image, self.box)
        paste_from_feature_frame(self.image, np.zeros_like(crop), transform)
        np.testing.assert_array_equal(self.image, before)


class PixelBoxTests(unittest.TestCase):
    def test_tight_box_is_half_open(self) -> None:
        mask = np.zeros((8, 8), dtype=bool)
        mask[2:5, 3:7] = True
        self.assertEqual(PixelBox.tight(mask).as_tuple(), (3, 2, 7, 5))
        self.assertIsNone(PixelBox.tight(np.zeros((8, 8), dtype=bool)))

    def test_degenerate_box_raises(self) -> None:
        with self.assertRaises(ValueError):
            PixelBox(4, 4, 4, 9)


class PngTests(unittest.TestCase):
    def test_png_keeps_pixel_values(self) -> None:
        mask = render_mask(three_wall_part())
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write_png(Path(tmpdir) / "nested" / "mask.png", mask)
            np.testing.assert_array_equal(read_png(path), mask)

    def test_read_rejects_wrong_size(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "small.png"
            Image.fromarray(np.zeros((16, 16), dtype=np.uint8)).save(path)
            with self.assertRaises(ValueError):
                read_png(path)

    def test_sheet_separates_rasters(self) -> None:
        image = rasterize(three_wall_part())
        sheet = side_by_side(image, image)
        self.assertEqual(sheet.shape, (RASTER_SIZE, 2 * RASTER_SIZE + SHEET_GAP))


if __name__ == "__main__":
    unittest.main()
