"""Quantum kicked rotor: the physical entropy source.

The rotor is propagated with the split Floquet operator
``U = exp(-i p^2/2) exp(-i K cos x)`` (hbar = 1, period 1, kick first) on a
periodic grid of ``grid_size`` momentum states m in [-G/2, G/2).  After each
step we record the momentum variance energy ``(<p^2> - <p>^2) / 2``.

Reproducibility matters more than speed here: decryption must regenerate the
exact same index tables, so every table is correctly rounded via mpmath and
the propagation runs through the fixed-order kernels in ``_fft``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from . import _fft
from .errors import DegenerateInputError, TruncationError

EDGE_MASS_LIMIT = 1e-8


@dataclass(frozen=True)
class RotorParams:
    kick_strength: float = 5.0
    num_kicks: int = 1
    grid_size: int = 2048

    def __post_init__(self):
        if not self.kick_strength >= 0:
            raise ValueError(f"kick_strength must be non-negative, got {self.kick_strength}")
        if self.num_kicks < 1:
            raise ValueError(f"num_kicks must be >= 1, got {self.num_kicks}")
        g = self.grid_size
        if g < 64 or g & (g - 1):
            raise ValueError(f"grid_size must be a power of two >= 64, got {g}")


@dataclass(frozen=True)
class QuantumState:
    """Momentum amplitudes; ``amplitudes[k]`` belongs to m = k - grid_size/2."""

    amplitudes: np.ndarray

    @property
    def grid_size(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def momenta(self) -> np.ndarray:
        g = self.grid_size
        return np.arange(-g // 2, g // 2)

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real * a.real + a.imag * a.imag

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities())))


class _Tables:
    def __init__(self, kick_strength: float, grid_size: int):
        g = grid_size
        self.grid_size = g
        wr, wi = _twiddles(g)
        self.fwr, self.fwi = _fft.stage_twiddles(wr, wi, inverse=False)
        self.iwr, self.iwi = _fft.stage_twiddles(wr, wi, inverse=True)
        self.rev = _fft.bit_reverse_indices(g)
        self.kick_re, self.kick_im = _kick_phases(kick_strength, g)
        self.free_re, self.free_im = _free_phases(g)
        self.momenta = np.arange(-g // 2, g // 2).astype(np.float64)
        # alternating sign linking stored amplitudes to physical ones
        self.parity = np.where(np.arange(g) % 2 == 0, 1.0, -1.0)
        self.guard_width = g // 32


def _exp_table(angles) -> tuple[np.ndarray, np.ndarray]:
    """Correctly rounded cos/sin of high-precision angles (platform independent)."""
    re = np.empty(len(angles))
    im = np.empty(len(angles))
    with mpmath.workprec(120):
        for i, a in enumerate(angles):
            re[i] = float(mpmath.cos(a))
            im[i] = float(mpmath.sin(a))
    return re, im


@lru_cache(maxsize=None)
def _twiddles(g: int):
    with mpmath.workprec(120):
        angles = [-2 * mpmath.pi * k / g for k in range(g // 2)]
    return _exp_table(angles)


@lru_cache(maxsize=None)
def _kick_phases(kick_strength: float, g: int):
    # position samples x_j = -pi + 2 pi j / g
    with mpmath.workprec(120):
        k = mpmath.mpf(kick_strength)
        angles = [-k * mpmath.cos(-mpmath.pi + 2 * mpmath.pi * j / g) for j in range(g)]
    return _exp_table(angles)


@lru_cache(maxsize=None)
def _free_phases(g: int):
    with mpmath.workprec(120):
        angles = [-mpmath.mpf(m * m) / 2 for m in range(-g // 2, g // 2)]
    re, im = _exp_table(angles)
    # Fold in the 1/g of the round trip (exact, g is a power of two).  The
    # (-1)^k factors from centering cancel across the two transforms, so the
    # stored amplitudes differ from the physical ones by that sign only.
    return re / g, im / g


@lru_cache(maxsize=8)
def _tables(kick_strength: float, grid_size: int) -> _Tables:
    return _Tables(kick_strength, grid_size)


def initial_state(params: RotorParams) -> QuantumState:
    g = params.grid_size
    a = np.zeros(g, dtype=np.complex128)
    a[g // 2] = 1.0
    a.flags.writeable = False
    return QuantumState(a)


def _check_edge(prob: np.ndarray, width: int) -> float:
    return float(np.sum(prob[:width]) + np.sum(prob[-width:]))


def _truncation_error(step: int, grid_size: int) -> TruncationError:
    return TruncationError(
        f"wavepacket reached the momentum-grid edge at kick {step} "
        f"(grid_size={grid_size}); enlarge grid_size"
    )


def _to_work(state: QuantumState, tab: _Tables):
    a = state.amplitudes
    return (np.ascontiguousarray(a.real * tab.parity),
            np.ascontiguousarray(a.imag * tab.parity))


def _from_work(re: np.ndarray, im: np.ndarray, tab: _Tables) -> QuantumState:
    a = (re * tab.parity) + 1j * (im * tab.parity)
    a.flags.writeable = False
    return QuantumState(a)


def apply_kick_and_free(state: QuantumState, params: RotorParams) -> QuantumState:
    """One Floquet step: kick in position space, then free rotation."""
    if state.grid_size != params.grid_size:
        raise ValueError("state and params disagree on grid_size")
    tab = _tables(float(params.kick_strength), params.grid_size)
    edge = _check_edge(state.probabilities(), tab.guard_width)
    if edge >= EDGE_MASS_LIMIT:
        raise _truncation_error(0, params.grid_size)
    re, im = _to_work(state, tab)
    out = np.zeros(1)
    status = _fft.evolve(re, im, tab.kick_re, tab.kick_im, tab.free_re, tab.free_im,
                         tab.fwr, tab.fwi, tab.iwr, tab.iwi, tab.rev, tab.momenta, tab.guard_width,
                         EDGE_MASS_LIMIT, 1, out)
    if status >= 0:
        raise _truncation_error(1, params.grid_size)
    return _from_work(re, im, tab)


def energy(state: QuantumState) -> float:
    """Half the momentum variance, summed left to right over the grid."""
    p = state.probabilities()
    m = state.momenta.astype(np.float64)
    s1 = 0.0
    s2 = 0.0
    for pk, mk in zip(p.tolist(), m.tolist()):
        s1 = s1 + pk * mk
        s2 = s2 + pk * (mk * mk)
    return max(0.0, 0.5 * (s2 - s1 * s1))


class _Run:
    """Propagation state for one (K, grid) pair, extendable in place."""

    def __init__(self, tab: _Tables):
        self.tab = tab
        g = tab.grid_size
        self.re = np.zeros(g)
        self.im = np.zeros(g)
        self.re[g // 2] = 1.0
        self.energies = np.zeros(0)

    def extend_to(self, n: int) -> None:
        have = len(self.energies)
        if n <= have:
            return
        tab = self.tab
        out = np.zeros(n - have)
        status = _fft.evolve(self.re, self.im, tab.kick_re, tab.kick_im,
                             tab.free_re, tab.free_im, tab.fwr, tab.fwi, tab.iwr, tab.iwi, tab.rev,
                             tab.momenta, tab.guard_width, EDGE_MASS_LIMIT,
                             n - have, out)
        if status >= 0:
            raise _truncation_error(have + status + 1, tab.grid_size)
        self.energies = np.concatenate([self.energies, out])


_runs: dict[tuple[float, int], _Run] = {}
_runs_lock = threading.Lock()


def generate_energy_sequence(params: RotorParams) -> np.ndarray:
    """E_1..E_T for T = ``params.num_kicks``, as a read-only float64 array.

    Runs are memoized per (K, grid_size); a longer request continues the
    stored propagation, which yields bit-identical values to a fresh run.
    """
    key = (float(params.kick_strength), params.grid_size)
    with _runs_lock:
        run = _runs.get(key)
        if run is None:
            run = _Run(_tables(*key))
            _runs[key] = run
        run.extend_to(params.num_kicks)
        seq = run.energies[: params.num_kicks].copy()
    seq.flags.writeable = False
    return seq


def clear_cache() -> None:
    with _runs_lock:
        _runs.clear()


def lag1_autocorrelation(seq) -> float:
    """Pearson correlation between (E_1..E_{T-1}) and (E_2..E_T)."""
    x = np.asarray(seq, dtype=np.float64)
    if x.ndim != 1 or len(x) < 3:
        raise DegenerateInputError("need a sequence of at least 3 values")
    a = x[:-1] - x[:-1].mean()
    b = x[1:] - x[1:].mean()
    den = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if den == 0:
        raise DegenerateInputError("zero-variance sequence has no autocorrelation")
    return float(np.dot(a, b) / den)


def time_correlation(seq) -> float:
    """Pearson correlation between the kick index t and E_t (trend check)."""
    x = np.asarray(seq, dtype=np.float64)
    if x.ndim != 1 or len(x) < 3:
        raise DegenerateInputError("need a sequence of at least 3 values")
    t = np.arange(len(x), dtype=np.float64)
    t -= t.mean()
    y = x - x.mean()
    den = np.sqrt(np.dot(t, t) * np.dot(y, y))
    if den == 0:
        raise DegenerateInputError("zero-variance sequence has no correlation")
    return float(np.dot(t, y) / den)
