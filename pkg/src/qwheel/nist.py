"""Ten tests from NIST SP 800-22, single-sequence form.

Each test takes a 0/1 numpy array and returns a p-value (the serial and
cumulative-sums tests return two).  ``run_suite`` applies the default
parameters and reports one row per p-value, skipping tests the stream is too
short for.  Frequency through linear complexity follow the reference
definitions; the special functions below are our own series /
continued-fraction evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ALPHA = 0.01


# ---------------------------------------------------------------------------
# special functions

def _gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by its power series."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(100_000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x), modified Lentz continued fraction."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 100_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def igamc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(a, x)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x <= 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, x))
    return _gamma_cf(a, x)


def erfc(x: float) -> float:
    return math.erfc(x)


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# conversions

def bytes_to_bits(data) -> np.ndarray:
    """Most-significant bit first."""
    arr = np.frombuffer(bytes(data), dtype=np.uint8) if isinstance(data, (bytes, bytearray)) \
        else np.asarray(data, dtype=np.uint8).ravel()
    if arr.size == 0:
        raise ValueError("empty input")
    return np.unpackbits(arr)


def bits_from_string(s: str) -> np.ndarray:
    return np.array([c == "1" for c in s if c in "01"], dtype=np.uint8)


def _bits(bits) -> np.ndarray:
    b = np.asarray(bits, dtype=np.uint8).ravel()
    if b.size and b.max() > 1:
        raise ValueError("bit stream must contain only 0 and 1")
    return b


class TooShort(Exception):
    pass


def _need(n: int, minimum: int, name: str):
    if n < minimum:
        raise TooShort(f"{name} needs at least {minimum} bits, got {n}")


# ---------------------------------------------------------------------------
# tests

def frequency(bits) -> float:
    b = _bits(bits)
    n = b.size
    _need(n, 1, "frequency")
    s = 2 * int(b.sum()) - n
    return erfc(abs(s) / math.sqrt(n) / math.sqrt(2.0))


def block_frequency(bits, M: int = 128) -> float:
    b = _bits(bits)
    N = b.size // M
    _need(N, 1, "block frequency")
    pi = b[: N * M].reshape(N, M).mean(axis=1)
    chi2 = 4.0 * M * float(np.sum((pi - 0.5) ** 2))
    return igamc(N / 2.0, chi2 / 2.0)


def runs(bits) -> float:
    b = _bits(bits)
    n = b.size
    _need(n, 2, "runs")
    pi = float(b.mean())
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return 0.0
    v = 1 + int(np.count_nonzero(b[1:] != b[:-1]))
    num = abs(v - 2.0 * n * pi * (1.0 - pi))
    return erfc(num / (2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)))


_LONGEST_RUN = (
    # (min n, block M, class bounds (lo, hi), probabilities); values as in the
    # reference code (the printed M=8 table has 0.2266 for the last class, the
    # exact value is 48/256)
    (750_000, 10_000, (10, 16), (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6_272, 128, (4, 9), (0.1174035788, 0.242955959, 0.249363483, 0.17517706,
                          0.102701071, 0.112398847)),
    (128, 8, (1, 4), (0.21484375, 0.3671875, 0.23046875, 0.1875)),
)


def _longest_ones(blocks: np.ndarray) -> np.ndarray:
    """Longest run of ones in each row."""
    run = np.zeros(blocks.shape[0], dtype=np.int64)
    best = np.zeros_like(run)
    for col in blocks.T:
        run = np.where(col == 1, run + 1, 0)
        np.maximum(best, run, out=best)
    return best


def longest_run(bits) -> float:
    b = _bits(bits)
    n = b.size
    for min_n, M, (lo, hi), probs in _LONGEST_RUN:
        if n >= min_n:
            break
    else:
        raise TooShort(f"longest run needs at least 128 bits, got {n}")
    N = n // M
    longest = _longest_ones(b[: N * M].reshape(N, M))
    v = np.bincount(np.clip(longest, lo, hi) - lo, minlength=hi - lo + 1)
    expected = N * np.asarray(probs)
    chi2 = float(np.sum((v - expected) ** 2 / expected))
    return igamc((len(probs) - 1) / 2.0, chi2 / 2.0)


def gf2_rank(rows: list[int], ncols: int) -> int:
    """Rank over GF(2) of a matrix given as integer row bitmasks."""
    rows = list(rows)
    rank = 0
    for bit in range(ncols - 1, -1, -1):
        mask = 1 << bit
        pivot = next((i for i in range(rank, len(rows)) if rows[i] & mask), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & mask:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def rank_probabilities(m: int) -> tuple[float, float, float]:
    """P(rank = m), P(rank = m-1), P(rank <= m-2) for a random m x m GF(2) matrix."""
    def p(r):
        prod = 1.0
        for i in range(r):
            prod *= (1 - 2.0 ** (i - m)) ** 2 / (1 - 2.0 ** (i - r))
        return 2.0 ** (r * (2 * m - r) - m * m) * prod
    full, minus1 = p(m), p(m - 1)
    return full, minus1, 1.0 - full - minus1


def rank(bits, m: int = 32, probabilities=None) -> float:
    b = _bits(bits)
    N = b.size // (m * m)
    _need(N, 1, "rank")
    weights = 1 << np.arange(m - 1, -1, -1, dtype=object)
    mats = b[: N * m * m].reshape(N, m, m).astype(object)
    row_ints = (mats * weights).sum(axis=2)
    counts = [0, 0, 0]
    for rows in row_ints:
        r = gf2_rank(list(rows), m)
        counts[0 if r == m else 1 if r == m - 1 else 2] += 1
    probs = probabilities or rank_probabilities(m)
    chi2 = sum((c - N * p) ** 2 / (N * p) for c, p in zip(counts, probs))
    return math.exp(-chi2 / 2.0)


def dft(bits) -> float:
    b = _bits(bits)
    n = b.size
    _need(n, 2, "dft")
    x = 2.0 * b - 1.0
    mod = np.abs(np.fft.fft(x))[: n // 2]
    threshold = math.sqrt(math.log(1.0 / 0.05) * n)
    n0 = 0.95 * n / 2.0
    n1 = float(np.count_nonzero(mod < threshold))
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    return erfc(abs(d) / math.sqrt(2.0))


def _cdiv(a: int, b: int) -> int:
    """Integer division truncating toward zero."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def cumulative_sums(bits, reverse: bool = False) -> float:
    b = _bits(bits)
    n = b.size
    _need(n, 1, "cumulative sums")
    x = 2 * b.astype(np.int64) - 1
    if reverse:
        x = x[::-1]
    z = int(np.max(np.abs(np.cumsum(x))))
    if z == 0:
        return 1.0
    sq = math.sqrt(n)
    s1 = 0.0
    for k in range(_cdiv(_cdiv(-n, z) + 1, 4), _cdiv(_cdiv(n, z) - 1, 4) + 1):
        s1 += _normal_cdf((4 * k + 1) * z / sq) - _normal_cdf((4 * k - 1) * z / sq)
    s2 = 0.0
    for k in range(_cdiv(_cdiv(-n, z) - 3, 4), _cdiv(_cdiv(n, z) - 1, 4) + 1):
        s2 += _normal_cdf((4 * k + 3) * z / sq) - _normal_cdf((4 * k + 1) * z / sq)
    return min(1.0, max(0.0, 1.0 - s1 + s2))


def _pattern_counts(b: np.ndarray, m: int) -> np.ndarray:
    """Overlapping m-bit pattern counts with wrap-around."""
    n = b.size
    if m == 0:
        return np.array([n])
    ext = np.concatenate([b, b[: m - 1]]).astype(np.int64)
    vals = np.zeros(n, dtype=np.int64)
    for k in range(m):
        vals = (vals << 1) | ext[k:k + n]
    return np.bincount(vals, minlength=1 << m)


def approximate_entropy(bits, m: int = 2) -> float:
    b = _bits(bits)
    n = b.size
    _need(n, m + 2, "approximate entropy")

    def phi(mm):
        c = _pattern_counts(b, mm) / n
        c = c[c > 0]
        return float(np.sum(c * np.log(c)))

    apen = phi(m) - phi(m + 1)
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    return igamc(2.0 ** (m - 1), chi2 / 2.0)


def serial(bits, m: int = 2) -> tuple[float, float]:
    b = _bits(bits)
    n = b.size
    _need(n, m + 2, "serial")
    if m < 2:
        raise ValueError("serial test needs m >= 2")

    def psi2(mm):
        if mm <= 0:
            return 0.0
        c = _pattern_counts(b, mm).astype(np.float64)
        return (2.0**mm / n) * float(np.sum(c * c)) - n

    p0, p1, p2 = psi2(m), psi2(m - 1), psi2(m - 2)
    d1 = p0 - p1
    d2 = p0 - 2.0 * p1 + p2
    return igamc(2.0 ** (m - 2), d1 / 2.0), igamc(2.0 ** (m - 3), d2 / 2.0)


def berlekamp_massey(bits) -> int:
    """Length of the shortest LFSR generating ``bits`` (linear complexity)."""
    conn = 1  # connection polynomial, bit i = coefficient of x^i
    prev = 1
    length = 0
    last = -1
    window = 0  # bit i holds s_{t-i}
    for t, s in enumerate(bits):
        window = (window << 1) | int(s)
        if (conn & window).bit_count() & 1:
            old = conn
            conn ^= prev << (t - last)
            if 2 * length <= t:
                length = t + 1 - length
                last = t
                prev = old
    return length


# As in the reference code, whose first class reads 0.01047 rather than 1/96;
# published results depend on it.  Pass LC_PROBS_EXACT to use 1/96.
_LC_PROBS = (0.01047, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833)
LC_PROBS_EXACT = (0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833)


def linear_complexity(bits, M: int = 500, probabilities=None) -> float:
    b = _bits(bits)
    N = b.size // M
    _need(N, 1, "linear complexity")
    mu = M / 2.0 + (9.0 + (-1) ** (M + 1)) / 36.0 - (M / 3.0 + 2.0 / 9.0) / 2.0**M
    sign = 1.0 if M % 2 == 0 else -1.0
    v = np.zeros(7)
    blocks = b[: N * M].reshape(N, M)
    for block in blocks:
        t = sign * (berlekamp_massey(block.tolist()) - mu) + 2.0 / 9.0
        if t <= -2.5:
            v[0] += 1
        elif t <= -1.5:
            v[1] += 1
        elif t <= -0.5:
            v[2] += 1
        elif t <= 0.5:
            v[3] += 1
        elif t <= 1.5:
            v[4] += 1
        elif t <= 2.5:
            v[5] += 1
        else:
            v[6] += 1
    expected = N * np.asarray(probabilities or _LC_PROBS)
    chi2 = float(np.sum((v - expected) ** 2 / expected))
    return igamc(3.0, chi2 / 2.0)


# ---------------------------------------------------------------------------
# suite

@dataclass(frozen=True)
class TestResult:
    name: str
    p_value: float | None  # None when skipped

    @property
    def skipped(self) -> bool:
        return self.p_value is None

    @property
    def passed(self) -> bool:
        return self.p_value is not None and self.p_value >= ALPHA

    @property
    def verdict(self) -> str:
        return "skipped" if self.skipped else "pass" if self.passed else "fail"


# (row name, minimum length, callable)
SUITE = (
    ("Frequency", 100, frequency),
    ("Block Freq.", 128 * 100, block_frequency),
    ("Runs", 100, runs),
    ("Longest Run", 128, longest_run),
    ("Rank", 38 * 32 * 32, rank),
    ("DFT", 1000, dft),
    ("Appr. Entropy", 100, approximate_entropy),
    ("Cum. Sums (F)", 100, cumulative_sums),
    ("Cum. Sums (R)", 100, lambda b: cumulative_sums(b, reverse=True)),
    ("Serial (1)", 100, lambda b: serial(b)[0]),
    ("Serial (2)", 100, lambda b: serial(b)[1]),
    ("Lin. Complexity", 500 * 200, linear_complexity),
)


def run_suite(bits) -> list[TestResult]:
    b = _bits(bits)
    out = []
    for name, minimum, fn in SUITE:
        if b.size < minimum:
            out.append(TestResult(name, None))
            continue
        out.append(TestResult(name, float(fn(b))))
    return out


def format_table(results: list[TestResult]) -> str:
    lines = [f"{'Test':<18}{'p-value':>10}  Conclusion"]
    for r in results:
        p = "-" if r.skipped else f"{r.p_value:.4f}"
        lines.append(f"{r.name:<18}{p:>10}  {r.verdict}")
    return "\n".join(lines) + "\n"


def results_csv(results: list[TestResult]) -> str:
    rows = ["test,p_value,conclusion"]
    rows += [f"{r.name},{'' if r.skipped else repr(r.p_value)},{r.verdict}" for r in results]
    return "\n".join(rows) + "\n"
