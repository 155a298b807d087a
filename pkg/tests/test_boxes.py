import numpy as np
import pytest

from framesieve import PixelBox, YoloLabel, pixel_box_to_yolo, yolo_to_pixel_box


class TestPixelBox:
    def test_properties(self):
        box = PixelBox(10, 30, 20, 50)
        assert (box.width, box.height, box.area) == (10, 20, 200)

    def test_rejects_empty_extent(self):
        with pytest.raises(ValueError):
            PixelBox(10, 10, 10, 20)
        with pytest.raises(ValueError):
            PixelBox(10, 10, 20, 5)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            PixelBox(-1, 0, 5, 5)


class TestConversion:
    def test_basic_box(self):
        assert pixel_box_to_yolo(PixelBox(10, 30, 20, 50), 100, 100) == (0.15, 0.40, 0.10, 0.20)

    def test_full_image_box(self):
        assert pixel_box_to_yolo(PixelBox(0, 0, 100, 100), 100, 100) == (0.5, 0.5, 1.0, 1.0)

    def test_single_pixel_box(self):
        assert pixel_box_to_yolo(PixelBox(0, 0, 1, 1), 100, 100) == (0.005, 0.005, 0.01, 0.01)

    def test_rejects_out_of_bounds(self):
        with pytest.raises(ValueError):
            pixel_box_to_yolo(PixelBox(90, 0, 110, 10), 100, 100)

    def test_inverse_basic(self):
        assert yolo_to_pixel_box((0.15, 0.40, 0.10, 0.20), 100, 100) == PixelBox(10, 30, 20, 50)

    def test_inverse_full_image(self):
        assert yolo_to_pixel_box((0.5, 0.5, 1.0, 1.0), 640, 640) == PixelBox(0, 0, 640, 640)

    def test_rejects_out_of_range_geometry(self):
        with pytest.raises(ValueError):
            yolo_to_pixel_box((1.5, 0.5, 0.1, 0.1), 100, 100)
        with pytest.raises(ValueError):
            yolo_to_pixel_box((0.5, 0.5, 0.0, 0.1), 100, 100)

    def test_round_trip_1000_random_boxes(self):
        rng = np.random.default_rng(101)
        for _ in range(1000):
            width = int(rng.integers(2, 1024))
            height = int(rng.integers(2, 1024))
            x0 = int(rng.integers(0, width - 1))
            y0 = int(rng.integers(0, height - 1))
            x1 = int(rng.integers(x0 + 1, width + 1))
            y1 = int(rng.integers(y0 + 1, height + 1))
            box = PixelBox(x0, y0, x1, y1)
            assert yolo_to_pixel_box(pixel_box_to_yolo(box, width, height), width, height) == box


class TestYoloLabel:
    def test_valid_label(self):
        label = YoloLabel(0, 0.5, 0.5, 0.2, 0.2)
        assert label.geometry == (0.5, 0.5, 0.2, 0.2)

    def test_rejects_center_out_of_range(self):
        with pytest.raises(ValueError):
            YoloLabel(0, 1.5, 0.5, 0.1, 0.1)

    def test_rejects_overhang(self):
        with pytest.raises(ValueError):
            YoloLabel(0, 0.95, 0.5, 0.2, 0.2)

    def test_edge_tolerance(self):
        # Values straight from 6-decimal files may overshoot by < 1e-6.
        YoloLabel(0, 0.5, 0.5, 1.0000005, 1.0)
