"""Binary PGM (P5, 8-bit) image I/O and the shipped synthetic test image.

Pixel values are handled as floats in [0,1]; the writer maps back to
[0,255] with clamping and rounding.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

SYNTHETIC_SIZE = 64
SYNTHETIC_NNZ = 739


def read_pgm(path) -> np.ndarray:
    """P5 image as float array in [0,1]. Rejects maxval > 255."""
    with open(path, "rb") as fh:
        data = fh.read()

    tokens = []
    pos = 0
    while len(tokens) < 4:
        if pos >= len(data):
            raise ValidationError(f"{path}: truncated PGM header")
        ch = data[pos : pos + 1]
        if ch == b"#":
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    pos += 1  # single whitespace byte after maxval

    if tokens[0] != b"P5":
        raise ValidationError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    width, height, maxval = (int(t) for t in tokens[1:4])
    if maxval <= 0 or maxval > 255:
        raise ValidationError(f"{path}: only 8-bit PGM supported, maxval={maxval}")
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ValidationError(f"{path}: raster has {len(raster)} bytes, expected {width * height}")
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return img.astype(float) / float(maxval)


def write_pgm(path, image) -> None:
    """Write floats in [0,1] as an 8-bit P5 file, clamping out-of-range values."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2 or img.size == 0:
        raise ValidationError("image must be a nonempty 2-D array")
    pix = np.clip(np.rint(img * 255.0), 0.0, 255.0).astype(np.uint8)
    h, w = pix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pix.tobytes())


def synthetic_test_image() -> np.ndarray:
    """Deterministic 64×64 grayscale scene with exactly 739 nonzero pixels.

    A shaded disk plus a ramped rectangle, then the dimmest pixels are
    trimmed in a fixed order to hit the pixel count exactly.
    """
    size = SYNTHETIC_SIZE
    img = np.zeros((size, size))

    ii, jj = np.mgrid[0:size, 0:size]
    d = np.sqrt((ii - 18.0) ** 2 + (jj - 18.0) ** 2)
    disk = d <= 10.0
    img[disk] = 0.45 + 0.55 * (1.0 - d[disk] / 10.0)

    rect = (ii >= 34) & (ii < 50) & (jj >= 28) & (jj < 58)
    img[rect] = 0.2 + 0.75 * (jj[rect] - 28.0) / 29.0

    flat = img.ravel()
    nz = np.flatnonzero(flat)
    if nz.size < SYNTHETIC_NNZ:
        raise AssertionError("synthetic scene lost pixels; shapes need rework")
    # drop the dimmest surplus pixels (ties by index) for an exact count
    order = np.lexsort((nz, flat[nz]))
    drop = nz[order[: nz.size - SYNTHETIC_NNZ]]
    flat[drop] = 0.0
    img = flat.reshape(size, size)
    assert int(np.count_nonzero(img)) == SYNTHETIC_NNZ
    return img
