"""The rotating wheel generator.

A 256-slot wheel holds a permutation of 0..255, shuffled once by the index
table P.  Four key-derived taps are read each iteration; after the read the
wheel accelerates by delta and advances, so iteration n (0-based) reads at
offset ``delta * n * (n + 1) / 2 mod 256``.  The slots themselves never move.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatchError, InvalidKeyError
from .indexgen import PermutationPlan

KEY_LENGTH = 32
PRINTABLE = range(32, 127)

# (sum span, product span, product modulus) per tap, 1-based inclusive
_TAP_RULES = (
    ((1, 6), (7, 12), 9),
    ((6, 11), (12, 17), 19),
    ((11, 16), (17, 22), 83),
    ((16, 21), (22, 27), 57),
)


@dataclass(frozen=True)
class SecretKey:
    text: str

    def __post_init__(self):
        validate_key(self.text)

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(ord(c) for c in self.text)


def validate_key(text) -> str:
    if isinstance(text, SecretKey):
        return text.text
    if not isinstance(text, str) or len(text) != KEY_LENGTH or any(
        ord(c) not in PRINTABLE for c in text
    ):
        raise InvalidKeyError("key: expected 32 printable ASCII characters")
    return text


def as_key(key) -> SecretKey:
    return key if isinstance(key, SecretKey) else SecretKey(key)


@dataclass(frozen=True)
class TapSet:
    x0: int
    y0: int
    z0: int
    w0: int
    delta: int

    def __post_init__(self):
        for t in self.positions:
            if not 0 <= t < 256:
                raise ValueError(f"tap {t} outside 0..255")
        if self.delta < 1:
            raise ValueError("delta must be >= 1")

    @property
    def positions(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.z0, self.w0)


@dataclass(frozen=True)
class Wheel:
    slots: tuple[int, ...]
    offset: int = 0
    speed: int = 0

    @classmethod
    def identity(cls) -> "Wheel":
        return cls(tuple(range(256)))

    def dump(self) -> str:
        return ",".join(map(str, self.slots)) + f"\noffset={self.offset},speed={self.speed}\n"


def shuffle_wheel(P) -> Wheel:
    P = [int(p) for p in P]
    if len(P) != 256 or any(not 0 <= p < 256 for p in P):
        raise ValueError("index table must hold 256 values in 0..255")
    w = list(range(256))
    for i, j in enumerate(P):
        w[i], w[j] = w[j], w[i]
    return Wheel(tuple(w))


def _tap(k: tuple[int, ...], sum_span, prod_span, modulus: int) -> int:
    s = sum(k[i - 1] for i in range(sum_span[0], sum_span[1] + 1))
    prod = 1
    for i in range(prod_span[0], prod_span[1] + 1):
        prod = (prod * k[i - 1]) % modulus
    return (s + prod) % 256


def derive_delta(x0: int, y0: int) -> int:
    if x0 == y0:
        return 1  # 0/0 in the closed form
    return (x0 ^ y0) // abs(x0 - y0)


def derive_taps(key) -> TapSet:
    k = as_key(key).codes
    x0, y0, z0, w0 = (_tap(k, *rule) for rule in _TAP_RULES)
    return TapSet(x0, y0, z0, w0, derive_delta(x0, y0))


def sample_iteration(wheel: Wheel, taps: TapSet) -> tuple[tuple[int, ...], Wheel]:
    """Read all four taps, then accelerate by delta and rotate."""
    out = tuple(wheel.slots[(t + wheel.offset) % 256] for t in taps.positions)
    speed = wheel.speed + taps.delta
    return out, replace(wheel, speed=speed, offset=(wheel.offset + speed) % 256)


def wheel_stream(wheel: Wheel, taps: TapSet, count: int, *, single_tap: bool = False,
                 static: bool = False) -> np.ndarray:
    """First ``count`` raw tap bytes, concatenated in iteration order.

    Equivalent to repeated ``sample_iteration`` from ``wheel``'s current
    offset/speed; ``static`` freezes the wheel and ``single_tap`` reads x0
    only.
    """
    positions = (taps.x0,) if single_tap else taps.positions
    per = len(positions)
    n_iter = -(-count // per)
    if static:
        offs = np.full(n_iter, wheel.offset, dtype=np.int64)
    else:
        # offset_n = o + n*s + delta*n(n+1)/2 for start offset o and speed s
        n = np.arange(n_iter, dtype=np.int64)
        tri = (n * (n + 1) // 2) % 256
        offs = (wheel.offset + (n * wheel.speed) % 256 + tri * taps.delta) % 256
    slots = np.asarray(wheel.slots, dtype=np.uint8)
    idx = (offs[:, None] + np.asarray(positions, dtype=np.int64)[None, :]) % 256
    return slots[idx].reshape(-1)[:count]


def swap_permute(values: np.ndarray, plan: PermutationPlan, reverse: bool = False) -> np.ndarray:
    """Sequential row-major swaps ``v[i,j] <-> v[rows[i,j], cols[i,j]]``.

    ``reverse`` replays the same swaps backwards, which undoes them exactly.
    """
    values = np.asarray(values)
    if values.shape != plan.shape:
        raise DimensionMismatchError(
            f"plan is {plan.shape[0]}x{plan.shape[1]}, data is {values.shape}"
        )
    flat = values.reshape(-1).tolist()
    targets = plan.flat_targets().reshape(-1).tolist()
    order = range(len(flat) - 1, -1, -1) if reverse else range(len(flat))
    for i in order:
        j = targets[i]
        flat[i], flat[j] = flat[j], flat[i]
    return np.array(flat, dtype=values.dtype).reshape(values.shape)


def generate_keystream(wheel: Wheel, taps: TapSet, plan: PermutationPlan, *,
                       single_tap: bool = False, static: bool = False) -> np.ndarray:
    M, N = plan.shape
    raw = wheel_stream(wheel, taps, M * N, single_tap=single_tap, static=static)
    return swap_permute(raw.reshape(M, N), plan)

