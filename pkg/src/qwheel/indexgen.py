"""Energy sequence -> wheel index table P and image permutation matrices.

Consumption order is frozen: the first 256 energies give P, the next M*N
give the row matrix (row-major), the following M*N give the column matrix.
Every value goes through ``floor(E * 1e4) mod modulus``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, SequenceTooShortError, SidecarError

SCALE = 1e4
WHEEL_SIZE = 256
_EXACT_LIMIT = 2.0**53
SIDECAR_MAGIC = b"QWP1"


def energy_to_byte(e: float, modulus: int) -> int:
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if e < 0:
        raise ValueError(f"energy must be non-negative, got {e}")
    scaled = float(e) * SCALE
    if not scaled < _EXACT_LIMIT:
        raise OverflowError(f"{e} * 1e4 exceeds the exact integer range of float64")
    return int(scaled // 1) % modulus


def energies_to_indices(values, modulus: int) -> np.ndarray:
    """Vectorized ``energy_to_byte``; same arithmetic, int64 output."""
    v = np.asarray(values, dtype=np.float64)
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if v.size and (v.min() < 0 or not np.isfinite(v).all()):
        raise ValueError("energies must be finite and non-negative")
    scaled = v * SCALE
    if v.size and scaled.max() >= _EXACT_LIMIT:
        raise OverflowError("energy * 1e4 exceeds the exact integer range of float64")
    return np.floor(scaled).astype(np.int64) % modulus


def required_kicks(M: int, N: int) -> int:
    return WHEEL_SIZE + 2 * M * N


@dataclass(frozen=True)
class PermutationPlan:
    """Swap targets for every pixel: pixel (i, j) swaps with (rows[i,j], cols[i,j])."""

    rows: np.ndarray
    cols: np.ndarray

    def __post_init__(self):
        if self.rows.shape != self.cols.shape or self.rows.ndim != 2:
            raise DimensionMismatchError("rows and cols must be matching 2-D arrays")
        M, N = self.rows.shape
        if self.rows.size and (self.rows.min() < 0 or self.rows.max() >= M):
            raise ValueError("row targets out of range")
        if self.cols.size and (self.cols.min() < 0 or self.cols.max() >= N):
            raise ValueError("column targets out of range")

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows.shape

    @classmethod
    def identity(cls, M: int, N: int) -> "PermutationPlan":
        r, c = np.indices((M, N))
        return cls(r.astype(np.int64), c.astype(np.int64))

    def flat_targets(self) -> np.ndarray:
        """Targets as row-major linear indices."""
        return self.rows * self.shape[1] + self.cols


def build_plan(seq, M: int, N: int) -> tuple[np.ndarray, PermutationPlan]:
    seq = np.asarray(seq, dtype=np.float64)
    if M < 1 or N < 1:
        raise ValueError("image dimensions must be positive")
    need = required_kicks(M, N)
    if len(seq) < need:
        raise SequenceTooShortError(
            f"energy sequence has {len(seq)} values, need {need} (256 + 2*M*N)"
        )
    mn = M * N
    P = energies_to_indices(seq[:WHEEL_SIZE], WHEEL_SIZE)
    rows = energies_to_indices(seq[WHEEL_SIZE:WHEEL_SIZE + mn], M).reshape(M, N)
    cols = energies_to_indices(seq[WHEEL_SIZE + mn:need], N).reshape(M, N)
    return P, PermutationPlan(rows, cols)


def write_sidecar(P, plan: PermutationPlan) -> bytes:
    P = np.asarray(P)
    if P.shape != (WHEEL_SIZE,):
        raise ValueError("index table must have 256 entries")
    M, N = plan.shape
    return b"".join([
        SIDECAR_MAGIC,
        struct.pack(">II", M, N),
        P.astype(np.uint8).tobytes(),
        plan.rows.astype(">u4").tobytes(),
        plan.cols.astype(">u4").tobytes(),
    ])


def read_sidecar(data: bytes) -> tuple[np.ndarray, PermutationPlan]:
    if data[:4] != SIDECAR_MAGIC:
        raise SidecarError("not a QWP1 plan file")
    if len(data) < 12 + WHEEL_SIZE:
        raise SidecarError("truncated plan header")
    M, N = struct.unpack(">II", data[4:12])
    body = data[12 + WHEEL_SIZE:]
    if len(body) != 8 * M * N:
        raise SidecarError(f"plan payload is {len(body)} bytes, expected {8 * M * N}")
    P = np.frombuffer(data[12:12 + WHEEL_SIZE], dtype=np.uint8).astype(np.int64)
    mats = np.frombuffer(body, dtype=">u4").astype(np.int64)
    rows = mats[: M * N].reshape(M, N)
    cols = mats[M * N:].reshape(M, N)
    try:
        return P, PermutationPlan(rows, cols)
    except ValueError as e:
        raise SidecarError(f"corrupt plan: {e}") from None
