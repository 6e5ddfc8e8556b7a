"""Binary PPM (P6) reading and writing for 8-bit RGB rasters."""

from __future__ import annotations

import numpy as np


class RasterError(ValueError):
    pass


def encode_ppm(pixels: np.ndarray) -> bytes:
    pixels = np.asarray(pixels)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise RasterError(f"expected an HxWx3 array, got shape {pixels.shape}")
    h, w, _ = pixels.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()


def decode_ppm(data: bytes) -> np.ndarray:
    tokens = []
    pos = 0
    # magic, width, height, maxval; '#' comments allowed between tokens
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise RasterError("truncated PPM header")
        tokens.append(data[start:pos])
    if tokens[0] != b"P6":
        raise RasterError("only binary PPM (P6) is supported")
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise RasterError("bad PPM header") from None
    if maxval != 255:
        raise RasterError("only 8-bit PPM (maxval 255) is supported")
    pos += 1
    body = data[pos:pos + w * h * 3]
    if len(body) != w * h * 3:
        raise RasterError("PPM pixel data is truncated")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3).copy()


def write_ppm(path, pixels: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_ppm(pixels))


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_ppm(fh.read())
