import numpy as np
import pytest

from mixcs.errors import ValidationError
from mixcs.imaging import SYNTHETIC_NNZ, read_pgm, synthetic_test_image, write_pgm


def test_round_trip_quantized(tmp_path):
    img = np.linspace(0.0, 1.0, 24).reshape(4, 6)
    path = tmp_path / "a.pgm"
    write_pgm(path, img)
    back = read_pgm(path)
    assert back.shape == (4, 6)
    assert np.max(np.abs(back - img)) <= 0.5 / 255.0 + 1e-12


def test_write_clamps_out_of_range(tmp_path):
    img = np.array([[-0.5, 2.0]])
    path = tmp_path / "c.pgm"
    write_pgm(path, img)
    back = read_pgm(path)
    assert back[0, 0] == 0.0 and back[0, 1] == 1.0


def test_header_with_comments(tmp_path):
    path = tmp_path / "h.pgm"
    raster = bytes([0, 128, 255, 64])
    path.write_bytes(b"P5\n# a comment\n2 2\n# another\n255\n" + raster)
    img = read_pgm(path)
    assert img.shape == (2, 2)
    assert img[0, 0] == 0.0 and abs(img[0, 1] - 128 / 255) < 1e-12


def test_rejects_wide_maxval(tmp_path):
    path = tmp_path / "w.pgm"
    path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(ValidationError):
        read_pgm(path)


def test_rejects_wrong_magic(tmp_path):
    path = tmp_path / "m.pgm"
    path.write_bytes(b"P2\n1 1\n255\n0")
    with pytest.raises(ValidationError):
        read_pgm(path)


def test_rejects_truncated_raster(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_bytes(b"P5\n2 2\n255\n\x00\x01")
    with pytest.raises(ValidationError):
        read_pgm(path)


def test_synthetic_image_contract():
    img = synthetic_test_image()
    assert img.shape == (64, 64)
    assert int(np.count_nonzero(img)) == SYNTHETIC_NNZ == 739
    assert img.min() >= 0.0 and img.max() <= 1.0
    assert np.array_equal(img, synthetic_test_image())  # deterministic


def test_synthetic_image_survives_pgm_cycle(tmp_path):
    img = synthetic_test_image()
    path = tmp_path / "s.pgm"
    write_pgm(path, img)
    back = read_pgm(path)
    # quantization to 8 bits must not create or destroy nonzeros
    assert int(np.count_nonzero(back)) == 739
