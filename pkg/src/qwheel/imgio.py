"""8-bit grayscale PGM codec and the synthetic test corpus.

Images are plain ``uint8`` arrays of shape (M, N).
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import BadMagicError, PGMError, TruncatedPayloadError, UnsupportedDepthError
from .rng import XorShift64Star

SYNTH_KINDS = ("black", "white", "gradient", "checkerboard", "qr_like", "noise")


def as_gray(img) -> np.ndarray:
    a = np.asarray(img)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty 2-D grayscale image, got shape {a.shape}")
    if a.dtype != np.uint8:
        if a.min() < 0 or a.max() > 255 or not np.issubdtype(a.dtype, np.integer):
            raise ValueError("pixel values must be integers in 0..255")
        a = a.astype(np.uint8)
    return a


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data: bytes, count: int):
    pos = 0
    out = []
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise TruncatedPayloadError("PGM header ended early")
        out.append(m.group(1))
        pos = m.end()
    return out, pos


def read_pgm(data: bytes) -> np.ndarray:
    if data[:2] not in (b"P5", b"P2"):
        raise BadMagicError(f"not a PGM file (magic {data[:2]!r})")
    magic = data[:2]
    (w, h, maxval), pos = _header_tokens(data[2:], 3)
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise PGMError(f"malformed PGM header: {exc}") from None
    pos += 2
    if w < 1 or h < 1:
        raise PGMError(f"bad dimensions {w}x{h}")
    if maxval != 255:
        raise UnsupportedDepthError(f"maxval {maxval} unsupported; only 8-bit (255) images")
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        pos += 1
        payload = data[pos:pos + w * h]
        if len(payload) < w * h:
            raise TruncatedPayloadError(f"payload has {len(payload)} bytes, expected {w * h}")
        return np.frombuffer(payload, dtype=np.uint8).reshape(h, w).copy()
    body = re.sub(rb"#[^\n]*", b"", data[pos:]).split()
    if len(body) < w * h:
        raise TruncatedPayloadError(f"payload has {len(body)} samples, expected {w * h}")
    vals = np.array([int(v) for v in body[: w * h]])
    if vals.min() < 0 or vals.max() > 255:
        raise PGMError("sample outside 0..255")
    return vals.astype(np.uint8).reshape(h, w)


def write_pgm(img) -> bytes:
    img = as_gray(img)
    h, w = img.shape
    return f"P5 {w} {h} 255\n".encode() + img.tobytes()


def load(path) -> np.ndarray:
    return read_pgm(Path(path).read_bytes())


def save(path, img) -> None:
    Path(path).write_bytes(write_pgm(img))


def synth(kind: str, M: int, N: int, seed: int = 0) -> np.ndarray:
    """Deterministic synthetic images standing in for natural test photographs."""
    if M < 1 or N < 1:
        raise ValueError("dimensions must be positive")
    if kind == "black":
        return np.zeros((M, N), dtype=np.uint8)
    if kind == "white":
        return np.full((M, N), 255, dtype=np.uint8)
    if kind == "gradient":
        # diagonal ramp; a 1xN strip is j itself
        i, j = np.indices((M, N))
        return ((i + j) % 256).astype(np.uint8)
    if kind == "checkerboard":
        i, j = np.indices((M, N))
        return np.where((i + j) % 2 == 0, 0, 255).astype(np.uint8)
    if kind == "qr_like":
        return _qr_like(M, N)
    if kind == "noise":
        return XorShift64Star(seed).bytes(M * N).reshape(M, N)
    raise ValueError(f"unknown synthetic kind {kind!r}; choose from {SYNTH_KINDS}")


def _qr_like(M: int, N: int) -> np.ndarray:
    """Binary module grid with finder squares, mostly dark like a printed code."""
    module = max(1, min(M, N) // 32)
    gm, gn = -(-M // module), -(-N // module)
    cells = (XorShift64Star(0x51_52).bytes(gm * gn).reshape(gm, gn) < 140)
    for r0, c0 in ((0, 0), (0, gn - 7), (gm - 7, 0)):
        if r0 < 0 or c0 < 0:
            continue
        f = np.ones((7, 7), dtype=bool)
        f[1:6, 1:6] = False
        f[2:5, 2:5] = True
        cells[r0:r0 + 7, c0:c0 + 7] = f[: gm - r0, : gn - c0]
    img = np.where(cells, 0, 255).astype(np.uint8)
    return np.kron(img, np.ones((module, module), dtype=np.uint8))[:M, :N]
