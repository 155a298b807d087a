import numpy as np
import pytest

from framesieve import (
    BACKGROUND,
    DEFAULT_PALETTE,
    ROAD,
    VEHICLE,
    ClassDef,
    Frame,
    Image,
    InstanceMask,
    Palette,
    PaletteError,
    SemanticMask,
    decode_instance,
    decode_semantic,
    encode_instance,
    encode_semantic,
    frames_equal,
    load_png,
    save_png,
)
from framesieve.frames import rasters_equal

from conftest import paint_frame


class TestTypes:
    def test_image_validation(self):
        with pytest.raises(ValueError):
            Image(np.zeros((4, 4), dtype=np.uint8))
        with pytest.raises(ValueError):
            Image(np.zeros((4, 4, 3), dtype=np.float32))
        img = Image(np.zeros((4, 6, 3), dtype=np.uint8))
        assert (img.width, img.height) == (6, 4)

    def test_frame_requires_matching_dims(self):
        with pytest.raises(ValueError):
            Frame(
                frame_id=0,
                timestamp=0.0,
                rgb=Image(np.zeros((4, 4, 3), dtype=np.uint8)),
                semantic=SemanticMask(np.zeros((4, 4), dtype=np.uint8)),
                instance=InstanceMask(np.zeros((4, 5), dtype=np.int32)),
            )

    def test_frame_equality_helpers(self):
        a = paint_frame(rects=((1, VEHICLE, 2, 2, 8, 8),))
        b = paint_frame(rects=((1, VEHICLE, 2, 2, 8, 8),))
        c = paint_frame(rects=((1, VEHICLE, 2, 2, 8, 8),), frame_id=1, timestamp=0.1)
        assert frames_equal(a, b)
        assert rasters_equal(a, c) and not frames_equal(a, c)


class TestPalette:
    def test_default_palette_has_four_distinct_classes(self):
        assert len(DEFAULT_PALETTE.classes) == 4
        assert DEFAULT_PALETTE.name_of(VEHICLE) == "vehicle"

    def test_rejects_duplicates(self):
        with pytest.raises(PaletteError):
            Palette([ClassDef(0, "a", (0, 0, 0)), ClassDef(0, "b", (1, 1, 1))])
        with pytest.raises(PaletteError):
            Palette([ClassDef(0, "a", (0, 0, 0)), ClassDef(1, "b", (0, 0, 0))])

    def test_round_trip_dict(self):
        assert Palette.from_dict(DEFAULT_PALETTE.to_dict()) == DEFAULT_PALETTE


class TestSemanticCoding:
    def test_single_class_image(self):
        color = DEFAULT_PALETTE.color_of(VEHICLE)
        img = Image(np.full((5, 5, 3), color, dtype=np.uint8))
        mask = decode_semantic(img)
        assert (mask.class_ids == VEHICLE).all()

    def test_two_color_split(self):
        px = np.zeros((4, 8, 3), dtype=np.uint8)
        px[:, :4] = DEFAULT_PALETTE.color_of(ROAD)
        px[:, 4:] = DEFAULT_PALETTE.color_of(VEHICLE)
        mask = decode_semantic(Image(px))
        assert (mask.class_ids[:, :4] == ROAD).all()
        assert (mask.class_ids[:, 4:] == VEHICLE).all()

    def test_off_palette_pixel_names_location(self):
        px = np.full((4, 4, 3), DEFAULT_PALETTE.color_of(BACKGROUND), dtype=np.uint8)
        px[2, 3] = (9, 9, 9)
        with pytest.raises(PaletteError, match=r"\(9, 9, 9\).*x=3, y=2"):
            decode_semantic(Image(px))

    def test_encode_decode_identity(self):
        ids = np.random.default_rng(3).integers(0, 4, (12, 9)).astype(np.uint8)
        mask = SemanticMask(ids)
        back = decode_semantic(encode_semantic(mask))
        assert np.array_equal(back.class_ids, ids)

    def test_encode_rejects_unknown_class(self):
        with pytest.raises(PaletteError):
            encode_semantic(SemanticMask(np.full((2, 2), 99, dtype=np.uint8)))


class TestInstanceCoding:
    def test_all_black_is_background(self):
        mask = decode_instance(Image(np.zeros((3, 3, 3), dtype=np.uint8)))
        assert (mask.instance_ids == 0).all()

    def test_low_byte(self):
        px = np.zeros((1, 1, 3), dtype=np.uint8)
        px[0, 0] = (10, 0, 7)
        assert decode_instance(Image(px)).instance_ids[0, 0] == 7

    def test_high_byte(self):
        px = np.zeros((1, 1, 3), dtype=np.uint8)
        px[0, 0] = (10, 1, 0)
        assert decode_instance(Image(px)).instance_ids[0, 0] == 256

    def test_encode_decode_identity_across_range(self):
        ids = np.array([[0, 1, 255], [256, 4095, 65535]], dtype=np.int32)
        mask = InstanceMask(ids)
        back = decode_instance(encode_instance(mask))
        assert np.array_equal(back.instance_ids, ids)

    def test_encode_rejects_oversized_ids(self):
        with pytest.raises(ValueError):
            encode_instance(InstanceMask(np.array([[65536]], dtype=np.int32)))

    def test_class_travels_in_red_channel(self):
        sem = SemanticMask(np.full((2, 2), VEHICLE, dtype=np.uint8))
        inst = InstanceMask(np.full((2, 2), 3, dtype=np.int32))
        encoded = encode_instance(inst, sem)
        assert (encoded.pixels[:, :, 0] == VEHICLE).all()


class TestPngIO:
    def test_round_trip(self, tmp_path):
        px = np.random.default_rng(7).integers(0, 256, (20, 30, 3), dtype=np.uint8)
        path = tmp_path / "img.png"
        save_png(Image(px), path)
        assert np.array_equal(load_png(path).pixels, px)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_png(tmp_path / "nope.png")
