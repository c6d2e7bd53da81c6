"""Binary and grayscale rasters plus a bit-exact PGM codec.

Rasters are plain numpy arrays of shape ``(height, width)``:

* binary raster: dtype uint8, every cell 0 or 1, where 1 is ink (dark) and
  0 is paper (blank);
* gray raster: dtype uint8, intensities 0..255 with 0 black.

Both kinds are treated as immutable once built; every function here returns
a fresh array and never mutates its input.

The interchange format is PGM. The writer always emits binary ``P5`` with
maxval 255; the reader additionally accepts ASCII ``P2``. Comment lines
starting with ``#`` after the magic are skipped on read and never written.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import GeometryError, PgmParseError

DEFAULT_THRESHOLD = 128

_WHITESPACE = b" \t\r\n\x0b\x0c"


def ensure_gray(a: np.ndarray, name: str = "raster") -> np.ndarray:
    if not isinstance(a, np.ndarray) or a.ndim != 2:
        raise GeometryError(f"{name} must be a 2-D array")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise GeometryError(f"{name} must be at least 1x1, got {a.shape[1]}x{a.shape[0]}")
    if a.dtype != np.uint8:
        if not np.issubdtype(a.dtype, np.integer):
            raise GeometryError(f"{name} must hold integers 0..255")
        if a.min() < 0 or a.max() > 255:
            raise GeometryError(f"{name} values outside 0..255")
        a = a.astype(np.uint8)
    return a


def ensure_binary(a: np.ndarray, name: str = "raster") -> np.ndarray:
    a = ensure_gray(a, name)
    if a.max(initial=0) > 1:
        raise GeometryError(f"{name} must hold only 0/1 cells")
    return a


def binarize(gray: np.ndarray, threshold: int = DEFAULT_THRESHOLD) -> np.ndarray:
    """Threshold a gray raster to binary: ink wherever intensity < threshold."""
    gray = ensure_gray(gray)
    if not 0 <= int(threshold) <= 255:
        raise ValueError(f"threshold {threshold} outside 0..255")
    return (gray < int(threshold)).astype(np.uint8)


def to_gray(binary: np.ndarray) -> np.ndarray:
    """Render a binary raster as gray: ink cells black (0), paper white (255)."""
    binary = ensure_binary(binary)
    return np.where(binary == 1, 0, 255).astype(np.uint8)


def _tokens(data: bytes, start: int):
    """Yield (token, end_offset) over whitespace-separated header tokens,
    skipping '#' comments through end of line."""
    i = start
    n = len(data)
    while i < n:
        while i < n and data[i] in _WHITESPACE:
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] != b"\n":
                i += 1
            continue
        if i >= n:
            break
        j = i
        while j < n and data[j] not in _WHITESPACE and data[j : j + 1] != b"#":
            j += 1
        yield data[i:j], j
        i = j


def _header_int(tok: bytes, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise PgmParseError(f"malformed {what} token {tok!r}") from None


def read_pgm(data: bytes) -> np.ndarray:
    """Parse PGM bytes (binary P5 or ASCII P2, maxval <= 255) into a gray raster."""
    if len(data) < 2:
        raise PgmParseError("truncated input: no magic number")
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise PgmParseError(f"unsupported magic {magic!r}; expected P5 or P2")

    toks = _tokens(data, 2)
    fields = []
    end = 2
    try:
        for _ in range(3):
            tok, end = next(toks)
            fields.append(tok)
    except StopIteration:
        raise PgmParseError("truncated header: missing width, height or maxval") from None
    width = _header_int(fields[0], "width")
    height = _header_int(fields[1], "height")
    maxval = _header_int(fields[2], "maxval")
    if width < 1 or height < 1:
        raise PgmParseError(f"invalid dimensions {width}x{height}")
    if maxval > 255:
        raise PgmParseError(f"maxval {maxval} exceeds 255")
    if maxval < 1:
        raise PgmParseError(f"invalid maxval {maxval}")

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the sample bytes
        if end >= len(data) or data[end] not in _WHITESPACE:
            raise PgmParseError("missing whitespace after maxval")
        raw = data[end + 1 : end + 1 + count]
        if len(raw) < count:
            raise PgmParseError(
                f"truncated pixel data: expected {count} bytes, found {len(raw)}"
            )
        flat = np.frombuffer(raw, dtype=np.uint8, count=count)
    else:
        samples = []
        for tok, _ in toks:
            samples.append(_header_int(tok, "sample"))
            if len(samples) == count:
                break
        if len(samples) < count:
            raise PgmParseError(
                f"truncated pixel data: expected {count} samples, found {len(samples)}"
            )
        bad = [s for s in samples if s < 0 or s > maxval]
        if bad:
            raise PgmParseError(f"sample value {bad[0]} exceeds maxval {maxval}")
        flat = np.array(samples, dtype=np.uint8)
    return flat.reshape(height, width)


def write_pgm(gray: np.ndarray) -> bytes:
    """Encode a gray raster as canonical binary P5 with maxval 255."""
    gray = ensure_gray(gray)
    h, w = gray.shape
    return b"P5\n%d %d\n255\n" % (w, h) + gray.tobytes()


def load_pgm(path) -> np.ndarray:
    return read_pgm(Path(path).read_bytes())


def save_pgm(path, gray: np.ndarray) -> None:
    Path(path).write_bytes(write_pgm(gray))
