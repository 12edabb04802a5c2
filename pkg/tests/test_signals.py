import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from declip import (
    Signal,
    SynthSpec,
    UnachievableClipLevel,
    clip,
    clip_level_for_m,
    dft,
    idft,
    is_recovered,
    read_signal_csv,
    recovery_error,
    synth_sparse_signal,
    write_signal_csv,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
signals = arrays(float, st.integers(2, 64), elements=finite)


def test_single_tone_closed_form():
    x, alpha = synth_sparse_signal(SynthSpec(128, 2, 5, 1.0, 1.0), frequencies=[1], phases=[np.pi / 4])
    n = np.arange(128)
    np.testing.assert_allclose(x.samples, np.cos(2 * np.pi * n / 128 + np.pi / 4), atol=1e-14)
    assert alpha.support().tolist() == [1, 127]


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_k10_sparsity_and_symmetry(seed):
    x, alpha = synth_sparse_signal(SynthSpec(128, 10, seed))
    assert alpha.sparsity() == 10
    assert alpha.is_hermitian(1e-10)
    # the returned spectrum is the DFT of the returned samples
    np.testing.assert_allclose(dft(x).coeffs, alpha.coeffs, atol=1e-12)


def test_small_round_trip():
    x, alpha = synth_sparse_signal(SynthSpec(16, 4, 3))
    np.testing.assert_allclose(idft(dft(x)).samples, x.samples, atol=1e-10)
    assert alpha.sparsity() == 4


def test_amplitudes_in_range():
    x, alpha = synth_sparse_signal(SynthSpec(128, 20, 11))
    mags = np.abs(alpha.coeffs[alpha.support()]) * 2 / np.sqrt(128)
    assert np.all((mags >= 0.5) & (mags <= 1.5))


@pytest.mark.parametrize("k", [3, 0, 128, 130])
def test_synth_rejects_bad_k(k):
    with pytest.raises(ValueError):
        SynthSpec(128, k)


def test_synth_rejects_bad_amplitudes():
    with pytest.raises(ValueError):
        SynthSpec(128, 4, amp_low=2.0, amp_high=1.0)


@given(st.integers(0, 2**63 - 1), st.sampled_from([2, 4, 10, 30]))
@settings(max_examples=100, deadline=None)
def test_synth_deterministic_and_exactly_k_sparse(seed, k):
    spec = SynthSpec(128, k, seed)
    x1, a1 = synth_sparse_signal(spec)
    x2, a2 = synth_sparse_signal(spec)
    assert x1.samples.tobytes() == x2.samples.tobytes()
    assert a1.sparsity() == k and a1.is_hermitian()
    assert 0 not in a1.support() and 64 not in a1.support()


def test_fig1_clip_counts(fig1_signal):
    assert clip(fig1_signal, -0.75, 0.75).m == 70
    assert clip(fig1_signal, -0.72, 0.72).m == 66


def test_no_clipping_passes_through(fig1_signal):
    obs = clip(fig1_signal, -2, 2)
    assert obs.m == 128 and obs.omega_u.size == 0 and obs.omega_l.size == 0
    np.testing.assert_array_equal(obs.y, fig1_signal.samples)


def test_boundary_counts_as_clipped():
    obs = clip(Signal([0.0, 1.0, -1.0, 0.5]), -1.0, 1.0)
    assert obs.omega_u.tolist() == [1]
    assert obs.omega_l.tolist() == [2]
    assert obs.omega_nc.tolist() == [0, 3]


def test_clip_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        clip(Signal([0.0, 1.0]), 1.0, 1.0)


@given(signals, finite, st.floats(0.01, 10))
@settings(max_examples=150)
def test_clip_partition_and_idempotence(x, lo, width):
    hi = lo + width
    obs = clip(x, lo, hi)
    sets = [set(obs.omega_u.tolist()), set(obs.omega_l.tolist()), set(obs.omega_nc.tolist())]
    assert set().union(*sets) == set(range(x.size))
    assert sum(len(s) for s in sets) == x.size
    assert np.all(obs.x_c[obs.omega_u] == hi) and np.all(obs.x_c[obs.omega_l] == lo)
    assert np.all((obs.y > lo) & (obs.y < hi))
    np.testing.assert_array_equal(obs.y, obs.x_c[obs.omega_nc])
    again = clip(obs.x_c, lo, hi)
    np.testing.assert_array_equal(again.x_c, obs.x_c)


@given(signals, st.floats(0.0, 5), st.floats(0.0, 5))
@settings(max_examples=100)
def test_m_monotone_in_level(x, c1, c2):
    lo, hi = sorted((c1, c2))
    if lo == 0:
        return
    assert clip(x, -lo, lo).m <= clip(x, -hi, hi).m


def test_clip_level_for_m_fig1(fig1_signal):
    c = clip_level_for_m(fig1_signal, 70)
    assert 0.72 < c < 0.76
    assert clip(fig1_signal, -c, c).m == 70


def test_clip_level_for_full_m(fig1_signal):
    c = clip_level_for_m(fig1_signal, 128)
    assert c > np.abs(fig1_signal.samples).max()
    assert clip(fig1_signal, -c, c).m == 128


def test_clip_level_unachievable(fig1_signal):
    with pytest.raises(UnachievableClipLevel) as info:
        clip_level_for_m(fig1_signal, 68)
    assert (info.value.m_nearest_below, info.value.m_nearest_above) == (66, 70)


@given(st.integers(0, 10_000), st.integers(1, 127))
@settings(max_examples=100)
def test_clip_level_hits_target(seed, m):
    x, _ = synth_sparse_signal(SynthSpec(128, 6, seed))
    try:
        c = clip_level_for_m(x, m)
    except UnachievableClipLevel as exc:
        assert exc.m_nearest_below is None or exc.m_nearest_below < m
        assert exc.m_nearest_above is None or exc.m_nearest_above > m
        return
    assert clip(x, -c, c).m == m


def test_recovery_error_examples():
    x = np.zeros(8)
    x[0] = 1
    assert recovery_error(x, x) == 0
    assert recovery_error(Signal(x), Signal(np.zeros(8))) == 1
    rng = np.random.default_rng(0)
    r = rng.normal(size=32)
    bumped = r.copy()
    bumped[0] += 1e-4
    assert recovery_error(r, bumped) == pytest.approx(1e-4, rel=1e-9)
    assert is_recovered(r, bumped)


def test_is_recovered_boundary():
    x = np.zeros(4)
    assert is_recovered(x, np.array([0.5, 0, 0, 0]), tol=0.5)
    assert not is_recovered(x, np.array([1.0, 0, 0, 0]), tol=0.5)


def test_recovery_error_length_mismatch():
    with pytest.raises(ValueError):
        recovery_error(np.zeros(3), np.zeros(4))


def test_signal_validation():
    with pytest.raises(ValueError):
        Signal([1.0])
    with pytest.raises(ValueError):
        Signal([1.0, np.nan])
    s = Signal([1.0, 2.0])
    with pytest.raises(ValueError):
        s.samples[0] = 3.0


@given(signals)
@settings(max_examples=100)
def test_csv_round_trip_exact(x):
    text = write_signal_csv(x, comment="test header")
    back = read_signal_csv(text, is_text=True)
    assert back.samples.tobytes() == np.asarray(x, dtype=float).tobytes()


def test_csv_file_round_trip(tmp_path):
    x, _ = synth_sparse_signal(SynthSpec(64, 4, 1))
    path = tmp_path / "s.csv"
    write_signal_csv(x, path)
    assert read_signal_csv(path).samples.tobytes() == x.samples.tobytes()


def test_csv_parse_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0\nabc\n")
    with pytest.raises(ValueError, match="line 2"):
        read_signal_csv(path)
