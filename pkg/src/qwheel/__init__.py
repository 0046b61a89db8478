"""Image cipher driven by a quantum kicked rotor and a rotating byte wheel,
with the statistical toolkit used to evaluate it."""

from .cipher import Ablation, CipherConfig, DEFAULT_KEY, decrypt, encrypt
from .errors import (
    BadMagicError, DegenerateInputError, DimensionMismatchError, InvalidKeyError,
    PGMError, QWheelError, SequenceTooShortError, SidecarError, TruncatedPayloadError,
    TruncationError, UnsupportedDepthError,
)
from .imgio import load, save, synth
from .qkr import RotorParams, generate_energy_sequence
from .wheel import SecretKey, derive_taps

__version__ = "0.1.0"

__all__ = [
    "Ablation", "CipherConfig", "DEFAULT_KEY", "decrypt", "encrypt",
    "BadMagicError", "DegenerateInputError", "DimensionMismatchError", "InvalidKeyError",
    "PGMError", "QWheelError", "SequenceTooShortError", "SidecarError",
    "TruncatedPayloadError", "TruncationError", "UnsupportedDepthError",
    "load", "save", "synth", "RotorParams", "generate_energy_sequence",
    "SecretKey", "derive_taps",
]
