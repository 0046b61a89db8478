"""Permutation-diffusion image cipher built on the rotor and the wheel.

Encryption: energy sequence -> (P, plan) -> permute image -> shuffle wheel ->
taps from key -> keystream (plan-permuted) -> XOR.  Decryption replays the
same tables, XORs, then undoes the permutation.

The ablation switches remove one stage each:

* ``skip_image_shuffle`` (A1) leaves the plaintext in place,
* ``seeded_fallback`` (A2) replaces the rotor with xorshift64* seeded by
  ``fallback_seed``,
* ``static_wheel`` (A3) uses the unshuffled wheel and never rotates it,
* ``single_tap`` (A4) reads only x0, one byte per iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import indexgen, qkr, wheel
from .errors import DimensionMismatchError
from .imgio import as_gray
from .indexgen import PermutationPlan
from .rng import fallback_energies

DEFAULT_KEY = "Qu4ntum-K1cked:Rotor/Wheel#2026!"


@dataclass(frozen=True)
class Ablation:
    skip_image_shuffle: bool = False
    seeded_fallback: bool = False
    static_wheel: bool = False
    single_tap: bool = False
    fallback_seed: int = 215

    @classmethod
    def from_labels(cls, labels, seed: int = 215) -> "Ablation":
        names = {"A1": "skip_image_shuffle", "A2": "seeded_fallback",
                 "A3": "static_wheel", "A4": "single_tap"}
        flags = {}
        for lab in labels:
            try:
                flags[names[lab.upper()]] = True
            except KeyError:
                raise ValueError(f"unknown ablation {lab!r}; use A1..A4") from None
        return cls(fallback_seed=seed, **flags)

    @property
    def labels(self) -> list[str]:
        pairs = [("A1", self.skip_image_shuffle), ("A2", self.seeded_fallback),
                 ("A3", self.static_wheel), ("A4", self.single_tap)]
        return [lab for lab, on in pairs if on]


@dataclass(frozen=True)
class CipherConfig:
    key: wheel.SecretKey = field(default_factory=lambda: wheel.SecretKey(DEFAULT_KEY))
    rotor: qkr.RotorParams = field(default_factory=qkr.RotorParams)
    ablation: Ablation = field(default_factory=Ablation)

    def __post_init__(self):
        if not isinstance(self.key, wheel.SecretKey):
            object.__setattr__(self, "key", wheel.SecretKey(self.key))


def source_sequence(cfg: CipherConfig, M: int, N: int) -> np.ndarray:
    n = indexgen.required_kicks(M, N)
    if cfg.ablation.seeded_fallback:
        return fallback_energies(n, cfg.ablation.fallback_seed)
    return qkr.generate_energy_sequence(replace(cfg.rotor, num_kicks=n))


def tables(cfg: CipherConfig, M: int, N: int) -> tuple[np.ndarray, PermutationPlan]:
    return indexgen.build_plan(source_sequence(cfg, M, N), M, N)


def permute_image(img, plan: PermutationPlan) -> np.ndarray:
    return wheel.swap_permute(as_gray(img), plan)


def unpermute_image(img, plan: PermutationPlan) -> np.ndarray:
    return wheel.swap_permute(as_gray(img), plan, reverse=True)


def _wheel(P, ab: Ablation) -> wheel.Wheel:
    return wheel.Wheel.identity() if ab.static_wheel else wheel.shuffle_wheel(P)


def raw_wheel_stream(cfg: CipherConfig, P, count: int) -> np.ndarray:
    """Tap bytes before the keystream permutation."""
    ab = cfg.ablation
    return wheel.wheel_stream(_wheel(P, ab), wheel.derive_taps(cfg.key), count,
                              single_tap=ab.single_tap, static=ab.static_wheel)


def keystream(cfg: CipherConfig, P, plan: PermutationPlan) -> np.ndarray:
    ab = cfg.ablation
    return wheel.generate_keystream(_wheel(P, ab), wheel.derive_taps(cfg.key), plan,
                                    single_tap=ab.single_tap, static=ab.static_wheel)


def _resolve(cfg, shape, precomputed):
    M, N = shape
    if precomputed is None:
        return tables(cfg, M, N)
    P, plan = precomputed
    if plan.shape != (M, N):
        raise DimensionMismatchError(f"plan is {plan.shape}, image is {(M, N)}")
    return np.asarray(P), plan


def encrypt(img, cfg: CipherConfig | None = None, precomputed=None):
    """Returns ``(ciphertext, P, plan)``.

    ``precomputed`` may supply ``(P, plan)`` (e.g. from a sidecar) in place
    of running the entropy source.
    """
    cfg = cfg or CipherConfig()
    img = as_gray(img)
    P, plan = _resolve(cfg, img.shape, precomputed)
    shuffled = img if cfg.ablation.skip_image_shuffle else permute_image(img, plan)
    ct = np.bitwise_xor(shuffled, keystream(cfg, P, plan))
    return ct, P, plan


def decrypt(ct, cfg: CipherConfig | None = None, precomputed=None) -> np.ndarray:
    cfg = cfg or CipherConfig()
    ct = as_gray(ct)
    P, plan = _resolve(cfg, ct.shape, precomputed)
    shuffled = np.bitwise_xor(ct, keystream(cfg, P, plan))
    if cfg.ablation.skip_image_shuffle:
        return shuffled
    return unpermute_image(shuffled, plan)
