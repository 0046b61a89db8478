"""Tampering and cryptanalytic attack harness.

Noise variances are in normalized [0, 1] pixel units.  Noise comes from a
seeded xorshift64* (Box-Muller normals), so every table is reproducible.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

import numpy as np

from . import cipher, metrics, wheel
from .errors import DimensionMismatchError
from .imgio import as_gray
from .rng import XorShift64Star

DEFAULT_NOISE_SEED = 0x5EED_2026


@dataclass(frozen=True)
class AttackSpec:
    kind: str  # "gaussian" | "speckle" | "crop"
    amount: float  # variance for noise, side length for crop
    noise_seed: int = DEFAULT_NOISE_SEED

    def __post_init__(self):
        if self.kind not in ("gaussian", "speckle", "crop"):
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if self.kind == "crop":
            if self.amount < 0 or int(self.amount) != self.amount:
                raise ValueError("crop side must be a non-negative integer")
        elif not self.amount > 0:
            raise ValueError("noise variance must be positive")


def _noisy(img: np.ndarray, spec: AttackSpec) -> np.ndarray:
    v = img.astype(np.float64) / 255.0
    n = XorShift64Star(spec.noise_seed).normals(img.size).reshape(img.shape)
    n *= math.sqrt(spec.amount)
    out = v + n if spec.kind == "gaussian" else v * (1.0 + n)
    return np.rint(np.clip(out, 0.0, 1.0) * 255.0).astype(np.uint8)


def apply_attack(ct, spec: AttackSpec) -> np.ndarray:
    ct = as_gray(ct)
    if spec.kind != "crop":
        return _noisy(ct, spec)
    side = int(spec.amount)
    M, N = ct.shape
    if side > min(M, N):
        raise ValueError(f"crop {side}x{side} larger than image {M}x{N}")
    out = ct.copy()
    r0, c0 = (M - side) // 2, (N - side) // 2
    out[r0:r0 + side, c0:c0 + side] = 0
    return out


SWEEP = (
    ("CA-1", AttackSpec("crop", 10)),
    ("CA-2", AttackSpec("crop", 40)),
    ("CA-3", AttackSpec("crop", 80)),
    ("CA-4", AttackSpec("crop", 160)),
    ("GNA-1", AttackSpec("gaussian", 0.0001)),
    ("GNA-2", AttackSpec("gaussian", 0.001)),
    ("GNA-3", AttackSpec("gaussian", 0.01)),
    ("SNA-1", AttackSpec("speckle", 0.01)),
    ("SNA-2", AttackSpec("speckle", 0.05)),
    ("SNA-3", AttackSpec("speckle", 0.15)),
)

SWEEP_COLUMNS = (
    "label", "npcr", "uaci", "corr_h", "corr_v", "corr_d", "corr_ad",
    "psnr_oe", "psnr_od", "dissimilarity", "homogeneity", "contrast", "energy", "ssim",
)


@dataclass(frozen=True)
class TamperRow:
    """One column of the tampering table.

    NPCR, UACI, PSNR(O-E) compare the plaintext with the (attacked)
    ciphertext; correlations describe the attacked ciphertext; PSNR(O-D),
    GLCM and SSIM describe the decrypted result against the plaintext.
    """

    label: str
    npcr: float
    uaci: float
    corr_h: float
    corr_v: float
    corr_d: float
    corr_ad: float
    psnr_oe: float
    psnr_od: float
    dissimilarity: float
    homogeneity: float
    contrast: float
    energy: float
    ssim: float

    def values(self) -> tuple:
        return tuple(getattr(self, c) for c in SWEEP_COLUMNS)


def _corr(img, d):
    try:
        return metrics.adjacent_correlation(img, d)
    except Exception:
        return math.nan


def tamper_row(label: str, plain, attacked, decrypted) -> TamperRow:
    c = [_corr(attacked, d) for d in metrics.DIRECTIONS]
    dis, hom, con, ene = metrics.glcm_features(decrypted)
    return TamperRow(
        label, metrics.npcr(plain, attacked), metrics.uaci(plain, attacked), *c,
        metrics.psnr(plain, attacked), metrics.psnr(plain, decrypted),
        dis, hom, con, ene, metrics.ssim(plain, decrypted),
    )


def tamper_sweep(img, cfg: cipher.CipherConfig | None = None, precomputed=None,
                 attacks=SWEEP) -> list[TamperRow]:
    """The "Original" column followed by one row per attack."""
    cfg = cfg or cipher.CipherConfig()
    img = as_gray(img)
    ct, P, plan = cipher.encrypt(img, cfg, precomputed)
    tabs = (P, plan)
    rows = [tamper_row("Original", img, ct, cipher.decrypt(ct, cfg, tabs))]
    for label, spec in attacks:
        hit = apply_attack(ct, spec)
        rows.append(tamper_row(label, img, hit, cipher.decrypt(hit, cfg, tabs)))
    return rows


def sweep_csv(rows: list[TamperRow]) -> str:
    def fmt(v):
        if isinstance(v, str):
            return v
        return "inf" if math.isinf(v) else f"{v:.4f}"
    lines = [",".join(SWEEP_COLUMNS)]
    lines += [",".join(fmt(v) for v in r.values()) for r in rows]
    return "\n".join(lines) + "\n"


def change_key_char(key: str, position: int, replacement: str | None = None) -> str:
    """Key with the character at 1-based ``position`` replaced.

    The default replacement is the next printable character, wrapping '~'
    back to ' '.
    """
    key = wheel.validate_key(key)
    if not 1 <= position <= len(key):
        raise ValueError("position out of range")
    old = key[position - 1]
    if replacement is None:
        replacement = chr(32 + (ord(old) - 32 + 1) % 95)
    if replacement == old:
        raise ValueError("replacement equals the original character")
    return wheel.validate_key(key[: position - 1] + replacement + key[position:])


def key_sensitivity(key, position: int, P, plan, replacement: str | None = None,
                    cfg: cipher.CipherConfig | None = None) -> tuple[float, float]:
    """(SSIM, NPCR) between keystreams of ``key`` and a one-character variant.

    Only positions 1..27 influence the taps, so others are rejected.
    """
    if not 1 <= position <= 27:
        raise ValueError("position must be in 1..27; later key characters never reach the taps")
    key = wheel.validate_key(key)
    base = cfg or cipher.CipherConfig(key=key)
    other = change_key_char(key, position, replacement)
    ks1 = cipher.keystream(_with_key(base, key), P, plan)
    ks2 = cipher.keystream(_with_key(base, other), P, plan)
    return metrics.ssim(ks1, ks2), metrics.npcr(ks1, ks2)


def _with_key(cfg, key):
    return replace(cfg, key=wheel.SecretKey(key))


def random_key(rng: random.Random) -> str:
    return "".join(chr(rng.randint(32, 126)) for _ in range(32))


def key_sensitivity_survey(P, plan, trials: int = 100, seed: int = 1) -> list[tuple[float, float]]:
    """``trials`` random keys, each with one random character changed in 1..27."""
    rng = random.Random(seed)
    out = []
    for _ in range(trials):
        key = random_key(rng)
        pos = rng.randint(1, 27)
        old = key[pos - 1]
        rep = old
        while rep == old:
            rep = chr(rng.randint(32, 126))
        out.append(key_sensitivity(key, pos, P, plan, rep))
    return out


def cpa_test(p1, p2, cfg: cipher.CipherConfig | None = None, precomputed=None) -> float:
    """SSIM between C1 xor C2 and P1 xor P2 under one key."""
    p1, p2 = as_gray(p1), as_gray(p2)
    if p1.shape != p2.shape:
        raise DimensionMismatchError("chosen plaintexts must share dimensions")
    cfg = cfg or cipher.CipherConfig()
    c1, P, plan = cipher.encrypt(p1, cfg, precomputed)
    c2, _, _ = cipher.encrypt(p2, cfg, (P, plan))
    return metrics.ssim(np.bitwise_xor(c1, c2), np.bitwise_xor(p1, p2))


def damage_locality(plain, decrypted, side: int) -> float:
    """Percentage of damaged decrypted pixels that fall inside the central crop box."""
    plain, decrypted = as_gray(plain), as_gray(decrypted)
    damaged = plain != decrypted
    total = int(damaged.sum())
    if total == 0:
        return 0.0
    M, N = plain.shape
    r0, c0 = (M - side) // 2, (N - side) // 2
    inside = int(damaged[r0:r0 + side, c0:c0 + side].sum())
    return 100.0 * inside / total
