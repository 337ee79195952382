"""Netpbm codecs for grayscale images and label-map visualizations.

Images are numpy float64 arrays of shape (height, width) with values in
[0, 255]; label maps are int32 arrays of the same shape.  Readers accept
P2 (ASCII) and P5 (binary) graymaps with maxval <= 255.  Writers emit
canonical headers: magic, newline, "width height", newline, maxval,
newline, raster.

Label maps are colorized with a fixed id->color palette so a region keeps
its color no matter how many regions a level has.  The palette is the low
24 bits of the splitmix64 hash of the id, with the standard constants
0x9E3779B97F4A7C15, 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB; byte order
is R = bits 23-16, G = bits 15-8, B = bits 7-0.
"""

from __future__ import annotations

import numpy as np

_WHITESPACE = b" \t\n\r\x0b\x0c"


class NetpbmError(ValueError):
    """Raised when a Netpbm byte stream cannot be parsed."""


class LabelDecodeError(ValueError):
    """Raised when a colorized label image does not match an id set."""


def _skip_space(data: bytes, pos: int) -> int:
    # whitespace and '#' comments (to end of line) may separate header tokens
    while pos < len(data):
        c = data[pos : pos + 1]
        if c in _WHITESPACE:
            pos += 1
        elif c == b"#":
            while pos < len(data) and data[pos : pos + 1] not in b"\r\n":
                pos += 1
        else:
            break
    return pos


def _next_int(data: bytes, pos: int, what: str) -> tuple[int, int, int]:
    """Return (value, token_offset, next_pos) for the next decimal token."""
    pos = _skip_space(data, pos)
    start = pos
    while pos < len(data) and data[pos : pos + 1].isdigit():
        pos += 1
    if pos == start:
        raise NetpbmError(f"malformed header: expected {what} at byte offset {start}")
    return int(data[start:pos]), start, pos


def load_pgm(data: bytes) -> np.ndarray:
    """Decode a P2 or P5 graymap (maxval <= 255) into a float64 image.

    Intensities are returned exactly as stored, without scaling.
    """
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise TypeError("load_pgm expects a byte sequence")
    data = bytes(data)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise NetpbmError("malformed header: expected magic 'P2' or 'P5' at byte offset 0")
    width, woff, pos = _next_int(data, 2, "width")
    height, hoff, pos = _next_int(data, pos, "height")
    if width < 1:
        raise NetpbmError(f"malformed header: width must be >= 1 at byte offset {woff}")
    if height < 1:
        raise NetpbmError(f"malformed header: height must be >= 1 at byte offset {hoff}")
    maxval, moff, pos = _next_int(data, pos, "maxval")
    if maxval < 1 or maxval > 255:
        raise NetpbmError(f"unsupported maxval {maxval} at byte offset {moff}")
    n = width * height
    if magic == b"P5":
        if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
            raise NetpbmError(f"malformed header: expected whitespace before raster at byte offset {pos}")
        start = pos + 1
        have = len(data) - start
        if have < n:
            raise NetpbmError(
                f"truncated pixel data at byte offset {len(data)}: "
                f"need {n} raster bytes from offset {start}, have {have}"
            )
        flat = np.frombuffer(data, dtype=np.uint8, count=n, offset=start)
        if maxval < 255 and flat.max(initial=0) > maxval:
            bad = start + int(np.argmax(flat > maxval))
            raise NetpbmError(f"sample exceeds maxval {maxval} at byte offset {bad}")
        return flat.reshape(height, width).astype(np.float64)
    return _parse_p2_raster(data, pos, width, height, maxval)


def _parse_p2_raster(data: bytes, pos: int, width: int, height: int, maxval: int) -> np.ndarray:
    n = width * height
    samples = np.empty(n, dtype=np.float64)
    for i in range(n):
        pos = _skip_space(data, pos)
        if pos >= len(data):
            raise NetpbmError(
                f"truncated pixel data at byte offset {len(data)}: got {i} of {n} samples"
            )
        value, off, pos = _next_int(data, pos, "sample")
        if value > maxval:
            raise NetpbmError(f"sample exceeds maxval {maxval} at byte offset {off}")
        samples[i] = value
    return samples.reshape(height, width)


def _require_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("image must be a non-empty 2-D array")
    if not np.all(np.isfinite(img)) or img.min() < 0 or img.max() > 255:
        raise ValueError("image intensities must lie in [0, 255]")
    return img


def save_pgm(img: np.ndarray) -> bytes:
    """Encode an image as binary P5 with maxval 255.

    Non-integer intensities are rounded half-up (25.5 -> 26), so integer
    images round-trip bit-exactly through load_pgm.
    """
    img = _require_image(img)
    h, w = img.shape
    raster = np.floor(img + 0.5).astype(np.uint8)
    return b"P5\n%d %d\n255\n" % (w, h) + raster.tobytes()


def splitmix64(x: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer over uint64 inputs."""
    z = x.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def label_palette(n: int) -> np.ndarray:
    """RGB palette for ids 0..n-1, shape (n, 3) uint8."""
    coded = splitmix64(np.arange(n, dtype=np.uint64)) & np.uint64(0xFFFFFF)
    rgb = np.empty((n, 3), dtype=np.uint8)
    rgb[:, 0] = (coded >> np.uint64(16)).astype(np.uint8)
    rgb[:, 1] = (coded >> np.uint64(8)).astype(np.uint8)
    rgb[:, 2] = coded.astype(np.uint8)
    return rgb


def save_label_ppm(labels: np.ndarray) -> bytes:
    """Encode a label map as binary P6 using the fixed id-hash palette."""
    labels = np.asarray(labels)
    if labels.ndim != 2 or labels.size == 0:
        raise ValueError("label map must be a non-empty 2-D array")
    if labels.min() < 0:
        raise ValueError("label ids must be non-negative")
    h, w = labels.shape
    palette = label_palette(int(labels.max()) + 1)
    raster = palette[labels.ravel()]
    return b"P6\n%d %d\n255\n" % (w, h) + raster.tobytes()


def load_ppm(data: bytes) -> np.ndarray:
    """Decode a binary P6 image (maxval <= 255) into a (H, W, 3) uint8 array."""
    data = bytes(data)
    if data[:2] != b"P6":
        raise NetpbmError("malformed header: expected magic 'P6' at byte offset 0")
    width, woff, pos = _next_int(data, 2, "width")
    height, hoff, pos = _next_int(data, pos, "height")
    if width < 1 or height < 1:
        raise NetpbmError(f"malformed header: dimensions must be >= 1 at byte offset {woff}")
    maxval, moff, pos = _next_int(data, pos, "maxval")
    if maxval < 1 or maxval > 255:
        raise NetpbmError(f"unsupported maxval {maxval} at byte offset {moff}")
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise NetpbmError(f"malformed header: expected whitespace before raster at byte offset {pos}")
    start = pos + 1
    n = width * height * 3
    have = len(data) - start
    if have < n:
        raise NetpbmError(
            f"truncated pixel data at byte offset {len(data)}: "
            f"need {n} raster bytes from offset {start}, have {have}"
        )
    flat = np.frombuffer(data, dtype=np.uint8, count=n, offset=start)
    return flat.reshape(height, width, 3)


def decode_label_ppm(data: bytes, ids: list[int]) -> np.ndarray:
    """Recover a label map from a colorized P6 written by save_label_ppm.

    `ids` is the set of region ids expected in the image.  Every pixel color
    must be the palette color of exactly one listed id, and every listed id
    must appear; otherwise LabelDecodeError is raised.
    """
    rgb = load_ppm(data)
    ids_arr = np.asarray(sorted(ids), dtype=np.uint64)
    coded = splitmix64(ids_arr) & np.uint64(0xFFFFFF)
    if len(np.unique(coded)) != len(coded):
        raise LabelDecodeError("palette collision: two ids share one color")
    pix = (
        rgb[:, :, 0].astype(np.uint64) << np.uint64(16)
        | rgb[:, :, 1].astype(np.uint64) << np.uint64(8)
        | rgb[:, :, 2].astype(np.uint64)
    ).ravel()
    order = np.argsort(coded)
    sorted_codes = coded[order]
    slot = np.searchsorted(sorted_codes, pix)
    slot_clipped = np.minimum(slot, len(sorted_codes) - 1)
    bad = sorted_codes[slot_clipped] != pix
    if bad.any():
        raise LabelDecodeError(
            f"pixel color not produced by any registered id ({int(bad.sum())} pixels)"
        )
    labels = ids_arr[order][slot_clipped].astype(np.int32).reshape(rgb.shape[:2])
    present = np.unique(labels)
    if len(present) != len(ids_arr):
        missing = sorted(set(int(i) for i in ids_arr) - set(int(i) for i in present))
        raise LabelDecodeError(f"registered ids missing from label image: {missing}")
    return labels
