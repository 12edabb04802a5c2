"""Signal and clipping data model, sparse test-signal synthesis, metrics.

A signal is a real vector of ``N`` samples.  Clipping at bounds ``C_l < C_u``
splits the sample indices into three disjoint sets: upper-clipped,
lower-clipped and reliable (non-clipped).  Samples lying exactly on a bound
count as clipped, which makes :func:`clip` idempotent.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

ArrayLike = Union[np.ndarray, Sequence[float]]

# Relative gap below which two entries of the |x| ladder count as tied.
LADDER_TIE_RTOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Signal:
    """Real time-domain signal."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1:
            raise ValueError("signal samples must be a 1-D vector")
        if s.size < 2:
            raise ValueError("signal needs at least 2 samples")
        if not np.all(np.isfinite(s)):
            raise ValueError("signal samples must be finite")
        object.__setattr__(self, "samples", _frozen(s))

    @property
    def n_len(self) -> int:
        return self.samples.size

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class Spectrum:
    """Complex DFT coefficient vector (unitary convention)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1:
            raise ValueError("spectrum must be a 1-D vector")
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def n_len(self) -> int:
        return self.coeffs.size

    def __len__(self) -> int:
        return self.coeffs.size

    def sparsity(self) -> int:
        """Number of coefficients above ``1e-12 * max|coeffs|``."""
        mag = np.abs(self.coeffs)
        peak = mag.max(initial=0.0)
        if peak == 0.0:
            return 0
        return int(np.count_nonzero(mag > 1e-12 * peak))

    def support(self) -> np.ndarray:
        mag = np.abs(self.coeffs)
        peak = mag.max(initial=0.0)
        if peak == 0.0:
            return np.zeros(0, dtype=int)
        return np.flatnonzero(mag > 1e-12 * peak)

    def hermitian_defect(self) -> float:
        """max_k |c[(N-k) mod N] - conj(c[k])|, relative to max|c|."""
        c = self.coeffs
        mirrored = np.conj(c[(-np.arange(c.size)) % c.size])
        peak = np.abs(c).max(initial=0.0)
        if peak == 0.0:
            return 0.0
        return float(np.abs(c - mirrored).max() / peak)

    def is_hermitian(self, rtol: float = 1e-10) -> bool:
        return self.hermitian_defect() <= rtol


@dataclass(frozen=True)
class ClippedObservation:
    """Clipped samples with their clip bounds and index partition."""

    x_c: np.ndarray
    c_lower: float
    c_upper: float
    omega_u: np.ndarray
    omega_l: np.ndarray
    omega_nc: np.ndarray
    y: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("x_c", "y"):
            object.__setattr__(self, name, _frozen(np.asarray(getattr(self, name), dtype=float)))
        for name in ("omega_u", "omega_l", "omega_nc"):
            object.__setattr__(self, name, _frozen(np.asarray(getattr(self, name), dtype=int)))

    @property
    def n_len(self) -> int:
        return self.x_c.size

    @property
    def m(self) -> int:
        """Number of non-clipped samples."""
        return self.omega_nc.size

    @property
    def clipped_signal(self) -> Signal:
        return Signal(self.x_c)


@dataclass(frozen=True)
class SynthSpec:
    """Parameters for a random frequency-sparse test signal."""

    n_len: int
    k_sparsity: int
    rng_seed: int = 0
    amp_low: float = 0.5
    amp_high: float = 1.5

    def __post_init__(self):
        n, k = self.n_len, self.k_sparsity
        if n < 4:
            raise ValueError(f"n_len must be at least 4, got {n}")
        if k < 2 or k % 2:
            raise ValueError(f"k_sparsity must be an even integer >= 2, got {k}")
        if k // 2 > n // 2 - 1 or k > n - 2:
            raise ValueError(f"k_sparsity={k} needs more than the {n // 2 - 1} available harmonics")
        if self.amp_low > self.amp_high:
            raise ValueError("amp_low must not exceed amp_high")


class UnachievableClipLevel(ValueError):
    """No symmetric clip level gives exactly the requested number of reliable samples."""

    def __init__(self, m_target: int, m_nearest_below: Optional[int], m_nearest_above: Optional[int]):
        self.m_target = m_target
        self.m_nearest_below = m_nearest_below
        self.m_nearest_above = m_nearest_above
        super().__init__(
            f"M={m_target} is not achievable by symmetric clipping "
            f"(nearest achievable: {m_nearest_below}, {m_nearest_above})"
        )


def synth_sparse_signal(
    spec: SynthSpec,
    *,
    frequencies: Optional[Iterable[int]] = None,
    phases: Optional[Iterable[float]] = None,
) -> tuple[Signal, Spectrum]:
    """Draw a real signal with exactly ``K`` nonzero DFT coefficients.

    ``K/2`` distinct frequencies are taken from a seeded shuffle of
    ``1..N/2-1``; amplitudes are uniform on ``[amp_low, amp_high]`` and phases
    uniform on ``[0, 2*pi)``.  The random stream is numpy's PCG64 seeded with
    ``spec.rng_seed`` and is consumed in that order (shuffle, amplitudes,
    phases).  ``frequencies`` and ``phases`` override the drawn values; they
    exist for building closed-form test cases.

    Returns the signal and its exact unitary DFT.
    """
    n_len, n_tones = spec.n_len, spec.k_sparsity // 2
    rng = np.random.default_rng(spec.rng_seed)
    freqs = rng.permutation(np.arange(1, n_len // 2))[:n_tones]
    amps = rng.uniform(spec.amp_low, spec.amp_high, size=n_tones)
    phis = rng.uniform(0.0, 2.0 * np.pi, size=n_tones)
    if frequencies is not None:
        freqs = np.asarray(list(frequencies), dtype=int)
        if freqs.size != n_tones or len(set(freqs.tolist())) != n_tones:
            raise ValueError("frequencies override must hold K/2 distinct values")
        if freqs.min() < 1 or freqs.max() > n_len // 2 - 1:
            raise ValueError("override frequencies must lie in 1..N/2-1")
    if phases is not None:
        phis = np.asarray(list(phases), dtype=float)
        if phis.size != n_tones:
            raise ValueError("phases override must hold K/2 values")

    n = np.arange(n_len)
    x = np.sum(amps[:, None] * np.cos(2.0 * np.pi * np.outer(freqs, n) / n_len + phis[:, None]), axis=0)
    coeffs = np.zeros(n_len, dtype=complex)
    half = amps * np.sqrt(n_len) / 2.0 * np.exp(1j * phis)
    coeffs[freqs] = half
    coeffs[n_len - freqs] = np.conj(half)
    return Signal(x), Spectrum(coeffs)


def clip(x: Union[Signal, ArrayLike], c_lower: float, c_upper: float) -> ClippedObservation:
    """Clip ``x`` to ``[c_lower, c_upper]``; samples on a bound count as clipped."""
    if not c_lower < c_upper:
        raise ValueError(f"need c_lower < c_upper, got {c_lower} >= {c_upper}")
    s = x.samples if isinstance(x, Signal) else Signal(x).samples
    upper = s >= c_upper
    lower = s <= c_lower
    reliable = ~(upper | lower)
    x_c = np.where(upper, c_upper, np.where(lower, c_lower, s))
    return ClippedObservation(
        x_c=x_c,
        c_lower=float(c_lower),
        c_upper=float(c_upper),
        omega_u=np.flatnonzero(upper),
        omega_l=np.flatnonzero(lower),
        omega_nc=np.flatnonzero(reliable),
        y=s[reliable],
    )


def achievable_m_values(x: Union[Signal, ArrayLike]) -> np.ndarray:
    """All M reachable by some symmetric clip level, ascending."""
    ladder = np.sort(np.abs(_samples(x)))
    n_len = ladder.size
    tol = LADDER_TIE_RTOL * max(ladder[-1], np.finfo(float).tiny)
    m = [0] if ladder[0] > tol else []
    gaps = np.diff(ladder) > tol
    m.extend((np.flatnonzero(gaps) + 1).tolist())
    m.append(n_len)
    return np.asarray(m, dtype=int)


def clip_level_for_m(x: Union[Signal, ArrayLike], m_target: int) -> float:
    """Symmetric level ``C`` such that ``clip(x, -C, C)`` keeps exactly ``m_target`` samples.

    ``C`` is the midpoint between the ``m_target``-th and ``(m_target+1)``-th
    smallest ``|x(n)|``.  Raises :class:`UnachievableClipLevel` when those
    two values are tied.
    """
    ladder = np.sort(np.abs(_samples(x)))
    n_len = ladder.size
    if not 0 <= m_target <= n_len:
        raise ValueError(f"m_target must be in [0, {n_len}], got {m_target}")
    achievable = achievable_m_values(x)
    if m_target not in achievable:
        below = achievable[achievable < m_target]
        above = achievable[achievable > m_target]
        raise UnachievableClipLevel(
            m_target,
            int(below[-1]) if below.size else None,
            int(above[0]) if above.size else None,
        )
    if m_target == n_len:
        return float(ladder[-1] + 1e-9 * max(ladder[-1], 1.0))
    if m_target == 0:
        return float(ladder[0])
    return float(0.5 * (ladder[m_target - 1] + ladder[m_target]))


def recovery_error(x: Union[Signal, ArrayLike], x_hat: Union[Signal, ArrayLike]) -> float:
    """Euclidean distance between two signals of equal length."""
    a, b = _samples(x), _samples(x_hat)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return float(np.linalg.norm(a - b))


def is_recovered(x, x_hat, tol: float = 1e-3) -> bool:
    return recovery_error(x, x_hat) <= tol


def _samples(x) -> np.ndarray:
    if isinstance(x, Signal):
        return x.samples
    return np.asarray(x, dtype=float)


def write_signal_csv(x: Union[Signal, ArrayLike], path=None, comment: Optional[str] = None) -> str:
    """Write one sample per line with 17 significant digits.

    Returns the CSV text; also writes it to ``path`` when given.
    """
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    for v in _samples(x):
        buf.write(f"{v:.17g}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def read_signal_csv(path_or_text, *, is_text: bool = False) -> Signal:
    """Parse a signal CSV; blank lines and ``#`` comments are skipped."""
    text = path_or_text if is_text else Path(path_or_text).read_text(encoding="utf-8")
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line.split(",")[0]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: cannot parse sample {line!r}") from exc
    return Signal(np.asarray(values))
