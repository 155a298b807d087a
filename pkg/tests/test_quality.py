import numpy as np
import pytest

from framesieve import (
    VEHICLE,
    FrameQuality,
    Image,
    PaletteError,
    WindowStats,
    frame_similarity,
    instance_stats,
    luma,
    measure_frame,
    merged_components,
    occlusion_degree,
    uqi,
    uqi_windowed,
    window_stats,
)

from conftest import flood_merged_oracle, noise_frame, paint_frame, single_window_q, windowed_q_oracle


class TestLuma:
    def test_white(self):
        img = Image(np.full((2, 2, 3), 255, dtype=np.uint8))
        assert (luma(img) == 255.0).all()

    def test_black(self):
        img = Image(np.zeros((2, 2, 3), dtype=np.uint8))
        assert (luma(img) == 0.0).all()

    def test_weighted_sum(self):
        # Independently: 0.299 * 100 + 0.587 * 50 + 0.114 * 200 = 82.05
        px = np.zeros((1, 1, 3), dtype=np.uint8)
        px[0, 0] = (100, 50, 200)
        assert luma(Image(px))[0, 0] == pytest.approx(82.05, abs=1e-9)


class TestUqi:
    def test_identity_ramp(self):
        assert uqi(np.array([1.0, 2, 3, 4]), np.array([1.0, 2, 3, 4])) == 1.0

    def test_anti_correlated(self):
        assert uqi(np.array([1.0, 2, 3, 4]), np.array([4.0, 3, 2, 1])) == pytest.approx(-1.0, abs=1e-12)

    def test_constant_equal_buffers(self):
        assert uqi(np.array([5.0, 5, 5, 5]), np.array([5.0, 5, 5, 5])) == 1.0

    def test_constant_different_buffers(self):
        assert uqi(np.array([5.0, 5, 5, 5]), np.array([7.0, 7, 7, 7])) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            uqi(np.zeros(4), np.zeros(5))

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            uqi(np.array([1.0]), np.array([1.0]))

    def test_identity_exact_on_random_planes(self, rng):
        for _ in range(100):
            plane = rng.integers(0, 256, (13, 17)).astype(np.float64)
            assert uqi(plane, plane) == 1.0

    def test_symmetry_and_bound(self, rng):
        for _ in range(300):
            x = rng.integers(0, 256, 40).astype(np.float64)
            y = rng.integers(0, 256, 40).astype(np.float64)
            q = uqi(x, y)
            assert q == uqi(y, x)
            assert abs(q) <= 1.0 + 1e-9

    def test_constant_shift_scores_below_one(self, rng):
        for _ in range(50):
            x = rng.integers(0, 200, 64).astype(np.float64)
            if x.std() == 0:
                continue
            assert uqi(x, x + 17.0) < 1.0

    def test_matches_single_window_oracle(self, rng):
        for _ in range(50):
            x = rng.normal(100, 30, 64)
            y = rng.normal(100, 30, 64)
            assert uqi(x, y) == pytest.approx(single_window_q(x, y), abs=1e-12)


class TestWindowStats:
    def test_values(self):
        stats = window_stats(np.array([1.0, 2, 3, 4]), np.array([4.0, 3, 2, 1]))
        assert stats.mean_x == 2.5 and stats.mean_y == 2.5
        assert stats.var_x == pytest.approx(5 / 3)
        assert stats.cov_xy == pytest.approx(-5 / 3)

    def test_invariant_enforced(self):
        with pytest.raises(ValueError):
            WindowStats(0.0, 0.0, 1.0, 1.0, 2.0)


class TestUqiWindowed:
    def test_identical_images_any_window(self, rng):
        plane = rng.integers(0, 256, (32, 40)).astype(np.float64)
        for window in (2, 5, 8, 16):
            assert uqi_windowed(plane, plane, window) == 1.0

    def test_tiled_anti_correlated(self):
        row = np.array([1.0, 2, 3, 4] * 4)
        x = np.tile(row, (16, 1))
        y = 5.0 - x
        assert uqi_windowed(x, y, 8) == pytest.approx(-1.0, abs=1e-12)

    def test_noise_matches_per_tile_oracle(self, rng):
        x = rng.integers(0, 256, (37, 51)).astype(np.float64)
        y = rng.integers(0, 256, (37, 51)).astype(np.float64)
        got = uqi_windowed(x, y, 8)
        want = windowed_q_oracle(x, y, 8)
        assert -1.0 < got < 1.0
        assert got == pytest.approx(want, abs=1e-12)

    def test_partial_tiles_match_oracle(self, rng):
        # 13x10 with window 8 exercises right, bottom, and corner tiles.
        x = rng.integers(0, 256, (13, 10)).astype(np.float64)
        y = rng.integers(0, 256, (13, 10)).astype(np.float64)
        assert uqi_windowed(x, y, 8) == pytest.approx(windowed_q_oracle(x, y, 8), abs=1e-12)

    def test_one_pixel_corner_excluded(self, rng):
        x = rng.integers(0, 256, (9, 9)).astype(np.float64)
        y = rng.integers(0, 256, (9, 9)).astype(np.float64)
        assert uqi_windowed(x, y, 8) == pytest.approx(windowed_q_oracle(x, y, 8), abs=1e-12)

    def test_rejects_tiny_planes(self):
        with pytest.raises(ValueError):
            uqi_windowed(np.zeros((1, 10)), np.zeros((1, 10)), 8)

    def test_rejects_window_below_two(self):
        with pytest.raises(ValueError):
            uqi_windowed(np.zeros((8, 8)), np.zeros((8, 8)), 1)


class TestFrameSimilarity:
    def test_self_similarity(self):
        frame = noise_frame(5)
        assert frame_similarity(frame, frame) == 1.0

    def test_mirror_scores_below_one(self):
        frame = paint_frame(width=64, height=48, rects=((1, VEHICLE, 2, 10, 20, 30),), rgb_seed=9)
        mirrored = paint_frame(width=64, height=48, rgb_seed=9)
        mirrored.rgb.pixels[:] = frame.rgb.pixels[:, ::-1]
        assert frame_similarity(frame, mirrored) < 1.0

    def test_symmetric(self, rng):
        for seed in range(10):
            a, b = noise_frame(seed), noise_frame(seed + 100)
            assert frame_similarity(a, b) == frame_similarity(b, a)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            frame_similarity(noise_frame(0, width=48), noise_frame(1, width=32))


class TestInstanceStats:
    def test_empty_mask(self):
        assert instance_stats(paint_frame()) == (0, {})

    def test_five_rectangles(self):
        rects = tuple((i, VEHICLE, 10 * i, 2, 10 * i + 8, 12) for i in range(1, 6))
        count, areas = instance_stats(paint_frame(width=64, height=32, rects=rects))
        assert count == 5
        assert all(a == 80 for a in areas.values())

    def test_min_area_gate(self):
        frame = paint_frame(rects=((1, VEHICLE, 0, 0, 5, 2),))  # 10 pixels
        assert instance_stats(frame, min_area=25) == (0, {})
        assert instance_stats(frame, min_area=10)[0] == 1


class TestMergedComponents:
    def test_gap_keeps_components_separate(self):
        frame = paint_frame(rects=((1, VEHICLE, 2, 2, 10, 10), (2, VEHICLE, 11, 2, 19, 10)))
        assert merged_components(frame, VEHICLE) == 0

    def test_touching_vehicles_merge(self):
        frame = paint_frame(rects=((1, VEHICLE, 2, 2, 10, 10), (2, VEHICLE, 10, 2, 18, 10)))
        assert merged_components(frame, VEHICLE) == 1

    def test_three_touching_form_one_component(self):
        frame = paint_frame(
            rects=(
                (1, VEHICLE, 2, 2, 10, 10),
                (2, VEHICLE, 10, 2, 18, 10),
                (3, VEHICLE, 18, 2, 26, 10),
            )
        )
        assert merged_components(frame, VEHICLE) == 1
        assert flood_merged_oracle(frame, VEHICLE) == 1

    def test_diagonal_touch_does_not_merge(self):
        frame = paint_frame(rects=((1, VEHICLE, 2, 2, 10, 10), (2, VEHICLE, 10, 10, 18, 18)))
        assert merged_components(frame, VEHICLE) == 0

    def test_unknown_class(self):
        with pytest.raises(PaletteError):
            merged_components(paint_frame(), 42)

    def test_matches_flood_oracle_on_random_layouts(self, rng):
        for _ in range(20):
            rects = []
            for i in range(1, int(rng.integers(2, 7))):
                x0 = int(rng.integers(0, 50))
                y0 = int(rng.integers(0, 34))
                rects.append((i, VEHICLE, x0, y0, x0 + int(rng.integers(4, 14)), y0 + int(rng.integers(4, 14))))
            frame = paint_frame(width=64, height=48, rects=tuple(rects))
            assert merged_components(frame, VEHICLE) == flood_merged_oracle(frame, VEHICLE)

    def test_no_adjacency_means_zero(self, rng):
        # Rectangles laid out on a grid with guaranteed 2-pixel gaps.
        rects = tuple(
            (1 + i + 4 * j, VEHICLE, 2 + 16 * i, 2 + 14 * j, 12 + 16 * i, 12 + 14 * j)
            for i in range(3)
            for j in range(3)
        )
        frame = paint_frame(width=64, height=48, rects=rects)
        assert merged_components(frame, VEHICLE) == 0


class TestOcclusionDegree:
    def test_unoccluded_rectangle(self):
        frame = paint_frame(rects=((1, VEHICLE, 5, 5, 15, 15),))
        assert occlusion_degree(frame, 1) == 0.0

    def test_half_overdrawn(self):
        # A middle stripe hides 50 of 100 pixels while the tight box keeps
        # its full 10x10 extent, so exactly half the box is unfilled.
        frame = paint_frame(rects=((1, VEHICLE, 0, 0, 10, 10), (2, VEHICLE, 0, 2, 10, 7)))
        assert occlusion_degree(frame, 1) == 0.5

    def test_absent_instance(self):
        with pytest.raises(ValueError):
            occlusion_degree(paint_frame(), 7)

    def test_matches_pixel_count_oracle(self):
        frame = paint_frame(rects=((1, VEHICLE, 4, 4, 20, 16), (2, VEHICLE, 10, 2, 26, 12)))
        mask = frame.instance.instance_ids == 1
        ys, xs = np.nonzero(mask)
        box_area = (ys.max() + 1 - ys.min()) * (xs.max() + 1 - xs.min())
        want = 1.0 - mask.sum() / box_area
        assert occlusion_degree(frame, 1) == pytest.approx(want, abs=1e-12)


class TestMeasureFrame:
    def test_populates_all_fields(self):
        frame = paint_frame(rects=((1, VEHICLE, 2, 2, 12, 12), (2, VEHICLE, 12, 2, 22, 12)))
        quality = measure_frame(frame)
        assert quality.uqi_vs_reference is None
        assert quality.instance_count == 2
        assert quality.merged_component_count == 1
        assert set(quality.per_instance_occlusion) == {1, 2}

    def test_quality_validation(self):
        with pytest.raises(ValueError):
            FrameQuality(uqi_vs_reference=1.5, instance_count=0, merged_component_count=0)
        with pytest.raises(ValueError):
            FrameQuality(None, instance_count=1, merged_component_count=0, per_instance_occlusion={1: 1.2})
