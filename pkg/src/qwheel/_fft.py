"""Compiled radix-2 kernels for the rotor propagation.

Everything here works on split real/imaginary float64 arrays and uses only
elementwise IEEE operations in a fixed order.  Numba compiles without
``fastmath``, so LLVM may neither reassociate sums nor contract a multiply and
an add into an FMA; the float stream is therefore the same on every
IEEE-754 platform, provided the input tables are too (see ``qkr._tables``).
"""

import numpy as np
from numba import njit


def bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.int64)
    for i in range(n):
        r = 0
        v = i
        for _ in range(bits):
            r = (r << 1) | (v & 1)
            v >>= 1
        rev[i] = r
    return rev


def stage_twiddles(wr: np.ndarray, wi: np.ndarray, inverse: bool):
    """Twiddles laid out stage by stage (1, 2, 4, ... n/2 entries) for ``fft_inplace``.

    ``wr + i*wi`` holds exp(-2*pi*i*k/n) for k < n/2; ``inverse`` conjugates.
    """
    n = 2 * len(wr)
    idx = np.concatenate([np.arange(half) * (n // (2 * half))
                          for half in (1 << s for s in range(n.bit_length() - 1))])
    im = wi[idx]
    return np.ascontiguousarray(wr[idx]), np.ascontiguousarray(-im if inverse else im)


@njit(cache=True)
def fft_inplace(re, im, twr, twi, rev):
    """Unnormalized decimation-in-time transform, in place.

    The direction is set by the twiddle tables (see ``stage_twiddles``).
    """
    n = re.shape[0]
    for i in range(n):
        j = rev[i]
        if j > i:
            t = re[i]
            re[i] = re[j]
            re[j] = t
            t = im[i]
            im[i] = im[j]
            im[j] = t
    size = 2
    off = 0
    while size <= n:
        half = size // 2
        for start in range(0, n, size):
            for k in range(half):
                tr = twr[off + k]
                ti = twi[off + k]
                a = start + k
                b = a + half
                xr = re[b] * tr - im[b] * ti
                xi = re[b] * ti + im[b] * tr
                re[b] = re[a] - xr
                im[b] = im[a] - xi
                re[a] = re[a] + xr
                im[a] = im[a] + xi
        off += half
        size *= 2


@njit(cache=True)
def evolve(re, im, kick_re, kick_im, free_re, free_im, fwr, fwi, iwr, iwi, rev,
           momenta, guard_width, guard_limit, n_steps, energies):
    """Apply ``n_steps`` Floquet steps in place, recording the energy after each.

    The amplitudes are stored with an alternating sign (-1)^k relative to the
    physical momentum amplitudes (the centering signs of the two transforms
    cancel); the 1/n normalization is folded into ``free_re/free_im``.
    Returns -1 on success or the 0-based step at which the edge-mass guard
    tripped.
    """
    n = re.shape[0]
    for t in range(n_steps):
        fft_inplace(re, im, iwr, iwi, rev)
        for j in range(n):
            xr = re[j] * kick_re[j] - im[j] * kick_im[j]
            xi = re[j] * kick_im[j] + im[j] * kick_re[j]
            re[j] = xr
            im[j] = xi
        fft_inplace(re, im, fwr, fwi, rev)
        for k in range(n):
            xr = re[k] * free_re[k] - im[k] * free_im[k]
            xi = re[k] * free_im[k] + im[k] * free_re[k]
            re[k] = xr
            im[k] = xi

        s1 = 0.0
        s2 = 0.0
        for k in range(n):
            p = re[k] * re[k] + im[k] * im[k]
            m = momenta[k]
            s1 = s1 + p * m
            s2 = s2 + p * (m * m)
        edge = 0.0
        for k in range(guard_width):
            edge = edge + (re[k] * re[k] + im[k] * im[k])
        for k in range(n - guard_width, n):
            edge = edge + (re[k] * re[k] + im[k] * im[k])
        if edge >= guard_limit:
            return t
        e = 0.5 * (s2 - s1 * s1)
        if e < 0.0:
            e = 0.0
        energies[t] = e
    return -1
