"""Implicit Hankel operator with FFT-based products.

Entry (i, j) is ``data[i + j]``. A product ``H x`` is a correlation of the
signal with ``x``; reversing ``x`` turns it into a linear convolution whose
needed outputs (indices M-1 ... N-1) never wrap in a circulant of size
P >= N, so one forward/inverse FFT pair of length P = 2^ceil(log2 N) gives
the product in O(P log P).
"""

from __future__ import annotations

from typing import Optional

import numpy as np
import scipy.fft
import scipy.linalg
from scipy.sparse.linalg import LinearOperator

from ..errors import DimensionMismatch, InvalidShape


def _next_power_of_two(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


class HankelOperator:
    """L x M Hankel matrix over ``data`` with L + M = N + 1."""

    def __init__(self, data: np.ndarray, L: int):
        data = np.array(data, dtype=complex).reshape(-1)
        n = data.shape[0]
        if n < 3:
            raise InvalidShape(f"Hankel operator needs N >= 3 samples, got {n}")
        if not 2 <= L <= n - 1:
            raise InvalidShape(f"row count L={L} outside [2, {n - 1}] for N={n}")
        data.setflags(write=False)
        self.data = data
        self.L = int(L)
        self.M = n + 1 - self.L
        self.fft_size = _next_power_of_two(n)
        self.is_real = bool(np.all(data.imag == 0))
        # Symbol transforms are computed once; matvec scratch is per call
        self._real_symbol = scipy.fft.rfft(data.real, self.fft_size) if self.is_real else None
        self._symbol = scipy.fft.fft(data, self.fft_size)
        self._symbol_conj = scipy.fft.fft(np.conj(data), self.fft_size)
        self._symbol.setflags(write=False)
        self._symbol_conj.setflags(write=False)

    @property
    def shape(self) -> tuple:
        return (self.L, self.M)

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim != 1 or x.shape[0] != self.M:
            raise DimensionMismatch(f"matvec expects a vector of length {self.M}, got {x.shape}")
        if self._real_pair(x):
            return self._real_product(x.real, self.M, self.L)
        spectrum = self._symbol * scipy.fft.fft(x[::-1], self.fft_size)
        return scipy.fft.ifft(spectrum)[self.M - 1 : self.M - 1 + self.L]

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        """H^H y, the M x L Hankel product over the conjugated signal."""
        y = np.asarray(y)
        if y.ndim != 1 or y.shape[0] != self.L:
            raise DimensionMismatch(f"rmatvec expects a vector of length {self.L}, got {y.shape}")
        if self._real_pair(y):
            return self._real_product(y.real, self.L, self.M)
        spectrum = self._symbol_conj * scipy.fft.fft(y[::-1], self.fft_size)
        return scipy.fft.ifft(spectrum)[self.L - 1 : self.L - 1 + self.M]

    def _real_pair(self, x: np.ndarray) -> bool:
        return self.is_real and (np.isrealobj(x) or not np.any(x.imag))

    def _real_product(self, x: np.ndarray, width: int, height: int) -> np.ndarray:
        # real signal and real vector: the product is real, so stay in rfft space
        spectrum = self._real_symbol * scipy.fft.rfft(x[::-1], self.fft_size)
        return scipy.fft.irfft(spectrum, self.fft_size)[width - 1 : width - 1 + height]

    def naive_matvec(self, x: np.ndarray) -> np.ndarray:
        """Direct O(LM) double loop, kept as the reference product."""
        x = np.asarray(x)
        if x.shape != (self.M,):
            raise DimensionMismatch(f"matvec expects a vector of length {self.M}, got {x.shape}")
        y = np.zeros(self.L, dtype=complex)
        for i in range(self.L):
            acc = 0j
            for j in range(self.M):
                acc += self.data[i + j] * x[j]
            y[i] = acc
        return y

    def to_dense(self) -> np.ndarray:
        return scipy.linalg.hankel(self.data[: self.L], self.data[self.L - 1 :])

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator(
            shape=self.shape,
            matvec=self.matvec,
            rmatvec=self.rmatvec,
            dtype=float if self.is_real else complex,
        )

    def __repr__(self) -> str:
        return f"HankelOperator(L={self.L}, M={self.M}, fft_size={self.fft_size})"


def default_rows(n: int) -> int:
    return (n + 1) // 2


def build_hankel(signal, L: Optional[int] = None) -> HankelOperator:
    """Arrange N samples into an L x M Hankel operator (default L = floor((N+1)/2))."""
    data = np.asarray(signal).reshape(-1)
    n = data.shape[0]
    if n < 3:
        raise InvalidShape(f"Hankel operator needs N >= 3 samples, got {n}")
    return HankelOperator(data, default_rows(n) if L is None else int(L))
