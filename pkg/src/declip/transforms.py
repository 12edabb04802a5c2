"""Unitary DFT operators, restricted synthesis and support-restricted least squares.

Convention: ``h(k) = N**-0.5 * sum_n x(n) exp(-2j*pi*k*n/N)``.  ``Psi`` is the
inverse of this map, so it is unitary and every column of a row-restricted
``Psi`` has norm ``sqrt(M/N)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

from .signals import Signal, Spectrum

HERMITIAN_RTOL = 1e-9
LS_RCOND = 1e-10


class NotHermitian(ValueError):
    """Spectrum does not describe a real signal."""


@dataclass(frozen=True)
class SupportSet:
    """Conjugate-closed set of spectral bins."""

    indices: tuple
    n_len: int

    def __post_init__(self):
        idx = tuple(sorted({int(i) for i in self.indices}))
        if idx and (idx[0] < 0 or idx[-1] >= self.n_len):
            raise ValueError(f"support index out of range [0, {self.n_len})")
        closed = {(self.n_len - i) % self.n_len for i in idx}
        if not closed.issubset(idx):
            raise ValueError("support set must be conjugate-closed")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_bins(cls, bins: Iterable[int], n_len: int) -> "SupportSet":
        idx = set()
        for k in bins:
            idx.update((int(k) % n_len, (n_len - int(k)) % n_len))
        return cls(tuple(idx), n_len)

    def with_bin(self, k: int) -> "SupportSet":
        return SupportSet(self.indices + (k % self.n_len, (self.n_len - k) % self.n_len), self.n_len)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, k) -> bool:
        return int(k) in self.indices

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=int)


def _as_samples(x) -> np.ndarray:
    return x.samples if isinstance(x, Signal) else np.asarray(x, dtype=float)


def _as_coeffs(a) -> np.ndarray:
    return a.coeffs if isinstance(a, Spectrum) else np.asarray(a, dtype=complex)


def dft(x: Union[Signal, np.ndarray]) -> Spectrum:
    s = _as_samples(x)
    return Spectrum(np.fft.fft(s) / np.sqrt(s.size))


def _check_hermitian(c: np.ndarray) -> None:
    peak = np.abs(c).max(initial=0.0)
    if peak == 0.0:
        return
    defect = np.abs(c - np.conj(c[(-np.arange(c.size)) % c.size])).max() / peak
    if defect > HERMITIAN_RTOL:
        raise NotHermitian(f"Hermitian symmetry violated (relative defect {defect:.3g})")


def idft(a: Union[Spectrum, np.ndarray]) -> Signal:
    """Inverse unitary DFT of a Hermitian spectrum; the imaginary residue is dropped."""
    c = _as_coeffs(a)
    _check_hermitian(c)
    return Signal(np.fft.ifft(c).real * np.sqrt(c.size))


def restricted_synthesis(a: Union[Spectrum, np.ndarray], omega_nc) -> np.ndarray:
    """``Phi Psi alpha``: the synthesized signal sampled at ``omega_nc``."""
    c = _as_coeffs(a)
    idx = np.asarray(omega_nc, dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= c.size):
        raise IndexError("omega_nc index out of range")
    return idft(c).samples[idx]


def synthesis_columns(omega_nc, support, n_len: int) -> np.ndarray:
    """Columns of ``Phi Psi`` indexed by ``support`` (complex, ``M x |support|``)."""
    rows = np.asarray(omega_nc, dtype=int)
    cols = support.as_array() if isinstance(support, SupportSet) else np.asarray(support, dtype=int)
    return np.exp(2j * np.pi * np.outer(rows, cols) / n_len) / np.sqrt(n_len)


def least_squares_on_support(y, omega_nc, support: SupportSet) -> Spectrum:
    """Minimum-norm least-squares coefficients ``(Phi Psi)_support^+ y``.

    Solved over real and imaginary parts scaled so that the real parameter
    norm equals the complex coefficient norm; the minimum-norm solution is
    therefore the complex one, and it is Hermitian even when the restricted
    matrix is badly conditioned.  Entries off ``support`` are exactly zero.
    """
    n_len = support.n_len
    coeffs = np.zeros(n_len, dtype=complex)
    rows = np.asarray(omega_nc, dtype=int)
    bins = [k for k in support.indices if 2 * k <= n_len]
    if not bins or rows.size == 0:
        return Spectrum(coeffs)
    bins = np.asarray(bins)
    paired = (bins != 0) & (2 * bins != n_len)
    phase = 2 * np.pi * np.outer(rows, bins) / n_len
    scale = np.where(paired, np.sqrt(2.0), 1.0) / np.sqrt(n_len)
    cos_cols = np.cos(phase) * scale
    sin_cols = -np.sin(phase[:, paired]) * scale[paired]
    # Explicit cutoff: directions near machine precision would otherwise be
    # kept and inflate the residual when the support is rank deficient.
    z, *_ = np.linalg.lstsq(np.hstack([cos_cols, sin_cols]), np.asarray(y, dtype=float), rcond=LS_RCOND)
    amp = np.where(paired, 1 / np.sqrt(2.0), 1.0)
    half = z[: bins.size] * amp + 0j
    half[paired] += 1j * z[bins.size:] * amp[paired]
    coeffs[bins] = half
    coeffs[(n_len - bins[paired]) % n_len] = np.conj(half[paired])
    return Spectrum(coeffs)


def column_norm_weights(omega_nc, n_len: int) -> np.ndarray:
    """Column norms of ``Phi Psi``; all equal to ``sqrt(M/N)``."""
    m = len(np.asarray(omega_nc))
    return np.full(n_len, np.sqrt(m / n_len))


@lru_cache(maxsize=16)
def real_synthesis_matrix(n_len: int) -> np.ndarray:
    """Real ``N x N`` matrix ``B`` with ``Psi alpha = B z`` for Hermitian ``alpha``.

    ``z`` stacks ``Re alpha_0 .. Re alpha_{N/2}`` followed by
    ``Im alpha_1 .. Im alpha_{(N-1)//2}`` (for odd ``N`` there is no Nyquist
    bin; see :func:`real_parameter_layout`).
    """
    n = np.arange(n_len)[:, None]
    re_bins, im_bins = real_parameter_layout(n_len)
    k_re = re_bins[None, :]
    k_im = im_bins[None, :]
    mult_re = np.where((re_bins == 0) | (2 * re_bins == n_len), 1.0, 2.0)
    b_re = mult_re * np.cos(2 * np.pi * k_re * n / n_len)
    b_im = -2.0 * np.sin(2 * np.pi * k_im * n / n_len)
    out = np.hstack([b_re, b_im]) / np.sqrt(n_len)
    out.setflags(write=False)
    return out


def real_parameter_layout(n_len: int) -> tuple[np.ndarray, np.ndarray]:
    """Bins carried by the real and imaginary parts of the real parametrization."""
    re_bins = np.arange(n_len // 2 + 1)
    im_bins = np.arange(1, (n_len + 1) // 2)
    return re_bins, im_bins


def spectrum_from_real(z: np.ndarray, n_len: int) -> Spectrum:
    re_bins, im_bins = real_parameter_layout(n_len)
    half = np.zeros(re_bins.size, dtype=complex)
    half.real = z[: re_bins.size]
    half[im_bins] += 1j * z[re_bins.size:]
    coeffs = np.zeros(n_len, dtype=complex)
    coeffs[re_bins] = half
    coeffs[(n_len - im_bins) % n_len] = np.conj(half[im_bins])
    return Spectrum(coeffs)
