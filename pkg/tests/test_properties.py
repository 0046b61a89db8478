"""Property suites; run standalone with ``pytest tests/test_properties.py``.

* wheel permutation invariance
* delta >= 1 for 10^5 random keys
* metrics equal brute-force loops on images up to 8x8 (1e-10)
* PGM write/read round trip on 10^3 random images
"""

import random

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from qwheel import cipher, imgio, metrics, wheel
from qwheel.errors import DegenerateInputError
from qwheel.indexgen import PermutationPlan

tables = st.lists(st.integers(0, 255), min_size=256, max_size=256)
small = st.tuples(st.integers(2, 8), st.integers(2, 8)).flatmap(lambda s: arrays(np.uint8, s))
pairs = st.tuples(st.integers(7, 8), st.integers(7, 8)).flatmap(
    lambda s: st.tuples(arrays(np.uint8, s), arrays(np.uint8, s)))


def _plan(rng, M, N):
    return PermutationPlan(rng.integers(0, M, (M, N)), rng.integers(0, N, (M, N)))


# -- wheel permutation invariance ---------------------------------------------

@settings(max_examples=300)
@given(tables)
def test_shuffled_wheel_is_permutation(P):
    assert sorted(wheel.shuffle_wheel(P).slots) == list(range(256))


@settings(max_examples=200)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_swap_permute_preserves_multiset_and_inverts(M, N, seed):
    rng = np.random.default_rng(seed)
    plan = _plan(rng, M, N)
    v = rng.integers(0, 256, (M, N)).astype(np.uint8)
    fwd = wheel.swap_permute(v, plan)
    assert sorted(fwd.ravel()) == sorted(v.ravel())
    assert np.array_equal(wheel.swap_permute(fwd, plan, reverse=True), v)


@settings(max_examples=100, deadline=None)
@given(tables, st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_keystream_is_permutation_of_raw_stream(P, M, N, seed):
    plan = _plan(np.random.default_rng(seed), M, N)
    w = wheel.shuffle_wheel(P)
    t = wheel.derive_taps(cipher.DEFAULT_KEY)
    ks = wheel.generate_keystream(w, t, plan)
    raw = wheel.wheel_stream(w, t, M * N)
    assert sorted(ks.ravel()) == sorted(raw)


def test_wheel_full_period_uses_every_slot_equally():
    rng = np.random.default_rng(1)
    for _ in range(20):
        w = wheel.shuffle_wheel(rng.integers(0, 256, 256))
        s = wheel.wheel_stream(w, wheel.derive_taps(cipher.DEFAULT_KEY), 2048)
        assert (np.bincount(s, minlength=256) == 8).all()


# -- delta ------------------------------------------------------------------

def test_delta_at_least_one_for_many_keys():
    rng = random.Random(20260)
    worst = 10**9
    for _ in range(100_000):
        key = "".join(chr(rng.randint(32, 126)) for _ in range(32))
        worst = min(worst, wheel.derive_taps(key).delta)
    assert worst >= 1


@settings(max_examples=2000)
@given(st.integers(0, 255), st.integers(0, 255))
def test_delta_closed_form_positive(x0, y0):
    assert wheel.derive_delta(x0, y0) >= 1


# -- metrics vs brute force ---------------------------------------------------

@settings(max_examples=300)
@given(small)
def test_entropy_brute_force(img):
    assert metrics.entropy(img) == pytest.approx(oracles.entropy(img), abs=1e-10)


@settings(max_examples=300)
@given(small, st.sampled_from(metrics.DIRECTIONS))
def test_correlation_brute_force(img, d):
    try:
        ref = oracles.correlation(img, *oracles.DIRECTION_STEPS[d])
    except ZeroDivisionError:
        with pytest.raises(DegenerateInputError):
            metrics.adjacent_correlation(img, d)
        return
    assert metrics.adjacent_correlation(img, d) == pytest.approx(ref, abs=1e-10)


@settings(max_examples=300)
@given(small)
def test_glcm_brute_force(img):
    np.testing.assert_allclose(metrics.glcm_features(img), oracles.glcm_features(img),
                               rtol=0, atol=1e-10)


@settings(max_examples=150, deadline=None)
@given(pairs)
def test_pair_metrics_brute_force(ab):
    a, b = ab
    n, u = oracles.npcr_uaci(a, b)
    assert metrics.npcr(a, b) == pytest.approx(n, abs=1e-10)
    assert metrics.uaci(a, b) == pytest.approx(u, abs=1e-10)
    assert metrics.ssim(a, b) == pytest.approx(oracles.ssim(a, b), abs=1e-10)


# -- PGM ----------------------------------------------------------------------

@settings(max_examples=1000, suppress_health_check=[HealthCheck.too_slow])
@given(st.tuples(st.integers(1, 48), st.integers(1, 48)).flatmap(lambda s: arrays(np.uint8, s)))
def test_pgm_round_trip(img):
    assert np.array_equal(imgio.read_pgm(imgio.write_pgm(img)), img)
