"""Portable graymap/pixmap reading and writing.

Reads ASCII (P2) and binary (P5) graymaps with maxval up to 65535; writes
binary graymaps (P5) and binary pixmaps (P6).  Pixel values are exposed as
row-major float arrays scaled to [0, 1].
"""

from __future__ import annotations

import numpy as np

from .errors import MalformedImageHeader, TruncatedImageData, UnsupportedImageFormat


def _tokens(data: bytes):
    """Header tokens: whitespace-separated, '#' comments run to end of line."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            while i < n and data[i : i + 1] != b"\n":
                i += 1
        else:
            j = i
            while j < n and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                j += 1
            yield data[i:j], j
            i = j


def load_pgm(path) -> np.ndarray:
    """Load a P2/P5 graymap as a float array in [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()

    toks = _tokens(data)
    try:
        magic, _ = next(toks)
    except StopIteration:
        raise MalformedImageHeader(f"{path}: empty file") from None
    if magic not in (b"P2", b"P5"):
        raise UnsupportedImageFormat(f"{path}: magic {magic!r} is not P2/P5")

    header = []
    pos = 0
    try:
        for _ in range(3):
            tok, pos = next(toks)
            header.append(int(tok))
    except StopIteration:
        raise MalformedImageHeader(f"{path}: header ended early") from None
    except ValueError:
        raise MalformedImageHeader(f"{path}: non-numeric header field") from None
    width, height, maxval = header
    if width <= 0 or height <= 0 or not 0 < maxval <= 65535:
        raise MalformedImageHeader(
            f"{path}: bad dimensions {width}x{height} or maxval {maxval}"
        )
    count = width * height

    if magic == b"P2":
        values = []
        for tok, pos in toks:
            try:
                values.append(int(tok))
            except ValueError:
                raise MalformedImageHeader(f"{path}: non-numeric pixel {tok!r}") from None
            if len(values) == count:
                break
        if len(values) < count:
            raise TruncatedImageData(f"{path}: {len(values)} of {count} pixels present")
        pixels = np.asarray(values, dtype=np.float64)
    else:
        # exactly one whitespace byte separates maxval from the payload
        payload = data[pos + 1 :]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        if len(payload) < need:
            raise TruncatedImageData(
                f"{path}: payload {len(payload)} bytes, need {need}"
            )
        pixels = np.frombuffer(payload[:need], dtype=dtype).astype(np.float64)

    if np.any(pixels > maxval):
        raise MalformedImageHeader(f"{path}: pixel exceeds maxval {maxval}")
    return (pixels / maxval).reshape(height, width)


def write_pgm(path, image: np.ndarray, maxval: int = 255) -> None:
    """Write a 2-D float array in [0, 1] as a binary graymap."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ValueError(f"graymap needs a 2-D array, got shape {image.shape}")
    if not 0 < maxval <= 65535:
        raise ValueError(f"maxval {maxval} out of range")
    quant = np.rint(np.clip(image, 0.0, 1.0) * maxval)
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n%d\n" % (image.shape[1], image.shape[0], maxval))
        fh.write(quant.astype(dtype).tobytes())


def write_ppm(path, image: np.ndarray) -> None:
    """Write an (H, W, 3) float array in [0, 1] as a binary pixmap."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"pixmap needs an (H, W, 3) array, got shape {image.shape}")
    quant = np.rint(np.clip(image, 0.0, 1.0) * 255).astype("u1")
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (image.shape[1], image.shape[0]))
        fh.write(quant.tobytes())
