"""Statistical and security metrics for 8-bit grayscale images."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DegenerateInputError, DimensionMismatchError
from .imgio import as_gray

CHI2_CRITICAL_1PCT_255 = 310.457
GLCM_LEVELS = 16
SSIM_WINDOW = 7
SSIM_C1 = (0.01 * 255) ** 2
SSIM_C2 = (0.03 * 255) ** 2
DIRECTIONS = ("H", "V", "D", "AD")


def _pair(a, b):
    a, b = as_gray(a), as_gray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def histogram(img) -> np.ndarray:
    return np.bincount(as_gray(img).ravel(), minlength=256)


def entropy(img) -> float:
    counts = histogram(img)
    p = counts[counts > 0] / counts.sum()
    return 0.0 - float(np.sum(p * np.log2(p)))


def histogram_chi2(img) -> tuple[np.ndarray, float]:
    counts = histogram(img)
    expected = counts.sum() / 256
    return counts, float(np.sum((counts - expected) ** 2) / expected)


def npcr(a, b) -> float:
    a, b = _pair(a, b)
    return 100.0 * float(np.count_nonzero(a != b)) / a.size


def uaci(a, b) -> float:
    a, b = _pair(a, b)
    diff = np.abs(a.astype(np.int64) - b.astype(np.int64))
    return 100.0 * float(diff.sum()) / (255.0 * a.size)


def mse(a, b) -> float:
    a, b = _pair(a, b)
    d = a.astype(np.int64) - b.astype(np.int64)
    return float(np.sum(d * d)) / a.size


def psnr(a, b) -> float:
    """Peak SNR in dB; identical images give ``math.inf``."""
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / err)


def adjacent_pairs(img, direction: str) -> tuple[np.ndarray, np.ndarray]:
    x = as_gray(img).astype(np.float64)
    if direction == "H":
        return x[:, :-1], x[:, 1:]
    if direction == "V":
        return x[:-1, :], x[1:, :]
    if direction == "D":
        return x[:-1, :-1], x[1:, 1:]
    if direction == "AD":
        return x[:-1, 1:], x[1:, :-1]
    raise ValueError(f"direction must be one of {DIRECTIONS}")


def adjacent_correlation(img, direction: str = "H") -> float:
    """Pearson correlation over every adjacent pixel pair in ``direction``."""
    x, y = adjacent_pairs(img, direction)
    if x.size < 2:
        raise DegenerateInputError(f"image too small for direction {direction}")
    x = x.ravel() - x.mean()
    y = y.ravel() - y.mean()
    den = math.sqrt(float(np.dot(x, x)) * float(np.dot(y, y)))
    if den == 0:
        raise DegenerateInputError("constant image: correlation undefined")
    return float(np.dot(x, y)) / den


def glcm(img, levels: int = GLCM_LEVELS) -> np.ndarray:
    """Symmetric, normalized co-occurrence matrix at distance 1, horizontal."""
    g = as_gray(img)
    if g.shape[1] < 2:
        raise DegenerateInputError("GLCM needs at least two columns")
    q = (g.astype(np.int64) * levels) // 256
    left, right = q[:, :-1].ravel(), q[:, 1:].ravel()
    counts = np.bincount(left * levels + right, minlength=levels * levels)
    m = counts.reshape(levels, levels).astype(np.float64)
    m = m + m.T
    return m / m.sum()


def glcm_features(img, literal: bool = False) -> tuple[float, float, float, float]:
    """(dissimilarity, homogeneity, contrast, energy).

    The default uses homogeneity with a squared difference and energy as the
    square root of the angular second moment, which is what published
    encrypted-image tables report.  ``literal=True`` uses 1/(1+|i-j|) and the
    bare sum of squares instead.
    """
    g = as_gray(img)
    if min(g.shape) < 2:
        raise DegenerateInputError("GLCM features need an image of at least 2x2")
    P = glcm(g)
    i, j = np.indices(P.shape)
    d = np.abs(i - j)
    dissimilarity = float(np.sum(P * d))
    contrast = float(np.sum(P * d * d))
    asm = float(np.sum(P * P))
    if literal:
        return dissimilarity, float(np.sum(P / (1.0 + d))), contrast, asm
    return dissimilarity, float(np.sum(P / (1.0 + d * d))), contrast, math.sqrt(asm)


def ssim(a, b, window: int = SSIM_WINDOW) -> float:
    """Mean SSIM over all valid ``window`` x ``window`` uniform windows.

    Window statistics are population moments (divide by window area).
    """
    a, b = _pair(a, b)
    if min(a.shape) < window:
        raise DegenerateInputError(f"SSIM needs images of at least {window}x{window}")
    x = a.astype(np.float64)
    y = b.astype(np.float64)

    def wmean(z):
        return sliding_window_view(z, (window, window)).mean(axis=(-2, -1))

    mx, my = wmean(x), wmean(y)
    vx = wmean(x * x) - mx * mx
    vy = wmean(y * y) - my * my
    cxy = wmean(x * y) - mx * my
    num = (2 * mx * my + SSIM_C1) * (2 * cxy + SSIM_C2)
    den = (mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2)
    return float(np.mean(num / den))


def dark_fraction(img, threshold: int = 50) -> float:
    g = as_gray(img)
    return 100.0 * float(np.count_nonzero(g < threshold)) / g.size


def bright_fraction(img, threshold: int = 205) -> float:
    g = as_gray(img)
    return 100.0 * float(np.count_nonzero(g > threshold)) / g.size


@dataclass
class MetricsReport:
    """Single-image metrics, plus pair metrics when a reference is given.

    In a pair report the single-image fields describe the second image
    (normally the ciphertext) and the pair fields compare the two.
    """

    entropy: float
    chi_square: float
    corr_h: float
    corr_v: float
    corr_d: float
    corr_ad: float
    glcm_dissimilarity: float
    glcm_homogeneity: float
    glcm_contrast: float
    glcm_energy: float
    dark_fraction: float
    bright_fraction: float
    npcr: float | None = None
    uaci: float | None = None
    mse: float | None = None
    psnr_db: float | None = None
    ssim: float | None = None
    histogram: np.ndarray | None = None

    def scalars(self) -> dict:
        d = asdict(self)
        d.pop("histogram")
        return d

    def to_text(self) -> str:
        return "".join(f"{k}={_fmt(v)}\n" for k, v in self.scalars().items() if v is not None)

    @staticmethod
    def csv_header() -> str:
        return ",".join(f.name for f in fields(MetricsReport) if f.name != "histogram")

    def csv_row(self) -> str:
        return ",".join("" if v is None else _fmt(v) for v in self.scalars().values())


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{v:.6f}"
    return str(v)


def _safe_corr(img, direction):
    try:
        return adjacent_correlation(img, direction)
    except DegenerateInputError:
        return math.nan


def report(img, reference=None) -> MetricsReport:
    """Full metrics for ``img``; with ``reference``, also NPCR/UACI/MSE/PSNR/SSIM."""
    g = as_gray(img)
    counts, chi2 = histogram_chi2(g)
    if min(g.shape) >= 2:
        dis, hom, con, ene = glcm_features(g)
    else:
        dis = hom = con = ene = math.nan
    rep = MetricsReport(
        entropy=entropy(g),
        chi_square=chi2,
        corr_h=_safe_corr(g, "H"),
        corr_v=_safe_corr(g, "V"),
        corr_d=_safe_corr(g, "D"),
        corr_ad=_safe_corr(g, "AD"),
        glcm_dissimilarity=dis,
        glcm_homogeneity=hom,
        glcm_contrast=con,
        glcm_energy=ene,
        dark_fraction=dark_fraction(g),
        bright_fraction=bright_fraction(g),
        histogram=counts,
    )
    if reference is not None:
        ref, g = _pair(reference, g)
        rep.npcr = npcr(ref, g)
        rep.uaci = uaci(ref, g)
        rep.mse = mse(ref, g)
        rep.psnr_db = psnr(ref, g)
        rep.ssim = ssim(ref, g) if min(g.shape) >= SSIM_WINDOW else None
    return rep


def histogram_csv(img) -> str:
    return "value,count\n" + "".join(f"{v},{c}\n" for v, c in enumerate(histogram(img)))
