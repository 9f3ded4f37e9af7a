"""Finite sections of Toeplitz, Hankel and rank-one operators on H^2.

Matrices act on coefficient vectors indexed by degree ``0..N-1``:

* Toeplitz ``T_f``: entry ``(m, k) = c(m - k)``
* Hankel ``H_f``: entry ``(m, k) = c(-m - k - 1)``
* rank one ``x (x) y``: ``h -> <h, y> x``, i.e. the matrix ``x y^H``.

Long vectors (reproducing kernels near the circle) never form matrices;
:func:`toeplitz_apply` and :func:`hankel_apply` go through FFT convolution
and return error bounds for everything they cut off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import fft as sfft
from scipy import signal

from .symbols import CoeffVector, Symbol, UncertifiableSymbolError


class WindowError(ValueError):
    """Raised when windows are incompatible or too small for a certified answer."""


@dataclass(frozen=True)
class WindowedOperator:
    """Dense finite section with its window metadata.

    ``spill_degree`` is the number of boundary rows/columns where the block
    may differ from the true compression once it is composed with others.
    """

    matrix: np.ndarray
    in_window: tuple[int, int]
    out_window: tuple[int, int]
    spill_degree: int
    provenance: str
    symbol: Symbol | None = None
    factors: tuple = field(default=(), repr=False)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def size(self) -> int:
        return self.matrix.shape[1]

    def certified_size(self) -> int:
        return max(0, min(self.matrix.shape) - self.spill_degree)

    def __matmul__(self, other: "WindowedOperator") -> "WindowedOperator":
        if self.matrix.shape[1] != other.matrix.shape[0]:
            raise WindowError(f"cannot compose {self.shape} with {other.shape}")
        left = self.factors if self.provenance == "composition" else (self,)
        right = other.factors if other.provenance == "composition" else (other,)
        return WindowedOperator(
            self.matrix @ other.matrix,
            other.in_window,
            self.out_window,
            self.spill_degree + other.spill_degree,
            "composition",
            factors=left + right,
        )

    def __add__(self, other: "WindowedOperator") -> "WindowedOperator":
        return _combine(self, other, 1.0)

    def __sub__(self, other: "WindowedOperator") -> "WindowedOperator":
        return _combine(self, other, -1.0)

    def __neg__(self):
        return scale(self, -1.0)

    def adjoint(self) -> "WindowedOperator":
        return WindowedOperator(
            self.matrix.conj().T, self.out_window, self.in_window, self.spill_degree, "adjoint"
        )

    @property
    def H(self):
        return self.adjoint()

    def block(self, n: int) -> np.ndarray:
        return self.matrix[:n, :n]

    def norm(self, n: int | None = None) -> float:
        m = self.matrix if n is None else self.matrix[:n, :n]
        return operator_norm(m)


def _combine(a: WindowedOperator, b: WindowedOperator, sign: float) -> WindowedOperator:
    if a.shape != b.shape:
        raise WindowError(f"shape mismatch {a.shape} vs {b.shape}")
    return WindowedOperator(
        a.matrix + sign * b.matrix,
        a.in_window,
        a.out_window,
        max(a.spill_degree, b.spill_degree),
        "sum",
    )


def scale(a: WindowedOperator, c: complex) -> WindowedOperator:
    return WindowedOperator(c * a.matrix, a.in_window, a.out_window, a.spill_degree, "scaled")


def identity_window(N: int) -> WindowedOperator:
    return WindowedOperator(np.eye(N, dtype=complex), (0, N), (0, N), 0, "identity")


def operator_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(m)[0])


def _check_envelope(f: Symbol) -> None:
    env = f.envelope
    if not f.polynomial and env.rate == 1.0 and env.power <= 0.5:
        raise UncertifiableSymbolError(
            f"symbol {f!r} has coefficient decay p={env.power} <= 1/2; tails are not certifiable"
        )


def _spill(f: Symbol, N: int) -> int:
    d = f.spill_degree()
    return N if d is None else min(d, N)


def toeplitz_window(f: Symbol, N: int) -> WindowedOperator:
    """``N x N`` block of ``T_f``."""
    if N < 1:
        raise WindowError("window must be at least 1")
    _check_envelope(f)
    col = f.coef_range(0, N - 1)
    row = f.coef_range(-(N - 1), 0)[::-1]
    mat = scipy.linalg.toeplitz(col, row)
    return WindowedOperator(mat, (0, N), (0, N), _spill(f, N), "toeplitz", symbol=f)


def hankel_window(f: Symbol, N: int) -> WindowedOperator:
    """``N x N`` block of ``H_f``."""
    if N < 1:
        raise WindowError("window must be at least 1")
    _check_envelope(f)
    a = f.coef_range(-(2 * N - 1), -1)[::-1]  # a[j] = c(-j-1)
    mat = scipy.linalg.hankel(a[:N], a[N - 1:])
    return WindowedOperator(mat, (0, N), (0, N), _spill(f, N), "hankel", symbol=f)


def rank_one(x: CoeffVector, y: CoeffVector) -> WindowedOperator:
    """Block of ``x (x) y``: ``h -> <h, y> x``."""
    mat = np.outer(x.entries, np.conj(y.entries))
    return WindowedOperator(
        mat, (0, len(y)), (0, len(x)), 0, "rank_one", factors=(x, y)
    )


# -- FFT application ------------------------------------------------------------

def _l1(v: np.ndarray) -> float:
    return float(np.abs(v).sum())


def toeplitz_apply(f: Symbol, v: CoeffVector, out_len: int) -> CoeffVector:
    """``T_f v`` at degrees ``0..out_len-1`` with a certified error bound."""
    _check_envelope(f)
    x = v.entries
    K = len(x)
    err = f.sup_norm_bound * v.tail_bound + f.approx_error * v.norm()
    if K == 0 or f.is_zero:
        return CoeffVector(np.zeros(out_len, dtype=complex), err)
    if f.polynomial:
        lo, hi = f.band
        full = np.convolve(f.coef_range(lo, hi), x)  # degree lo + j
        y = np.zeros(out_len, dtype=complex)
        src_lo = max(0, -lo)
        src_hi = min(len(full), out_len - lo)
        if src_hi > src_lo:
            y[src_lo + lo: src_hi + lo] = full[src_lo:src_hi]
        spill = full[max(out_len - lo, 0):]
        return CoeffVector(y, err + float(np.linalg.norm(spill)))
    c = f.coef_range(-(K - 1), out_len - 1)
    y = signal.fftconvolve(c, x)[K - 1: K - 1 + out_len]
    first = out_len - K + 1  # smallest m - k reaching rows >= out_len
    env = f.envelope
    if f.coanalytic and first >= 1:
        spill = 0.0
    elif first >= env.start:
        spill = _l1(x) * env.tail_l2(first)
    else:
        spill = f.sup_norm_bound * v.norm()
    return CoeffVector(y, err + spill)


def hankel_apply(f: Symbol, v: CoeffVector, out_len: int) -> CoeffVector:
    """``H_f v`` at degrees ``0..out_len-1`` with a certified error bound."""
    _check_envelope(f)
    x = v.entries
    K = len(x)
    err = f.sup_norm_bound * v.tail_bound + f.approx_error * v.norm()
    if f.analytic or K == 0 or f.is_zero:
        return CoeffVector(np.zeros(out_len, dtype=complex), err)
    if f.polynomial:
        d = -f.band[0]  # c(-n) = 0 for n > d
        a = f.coef_range(-d, -1)[::-1]  # a[j] = c(-j-1), j < d
        y = np.zeros(out_len, dtype=complex)
        kk = min(K, d)
        if kk:
            # out_m = sum_{k < kk} a[m+k] x_k for m + k < d
            mat = scipy.linalg.hankel(a, np.zeros(kk, dtype=complex))[:, :kk]
            full = mat @ x[:kk]
            y[: min(d, out_len)] = full[: min(d, out_len)]
            spill = float(np.linalg.norm(full[out_len:])) if d > out_len else 0.0
        else:
            spill = 0.0
        return CoeffVector(y, err + spill)
    a = f.coef_range(-(out_len + K - 1), -1)[::-1]
    y = signal.fftconvolve(a, x[::-1])[K - 1: K - 1 + out_len]
    env = f.envelope
    if out_len + 1 >= env.start:
        spill = _l1(x) * env.tail_l2(out_len + 1)
    else:
        spill = f.sup_norm_bound * v.norm()
    return CoeffVector(y, err + spill)


def _circulant_toeplitz(f: Symbol, x: np.ndarray, N: int) -> np.ndarray:
    size = sfft.next_fast_len(2 * N)
    col = np.zeros(size, dtype=complex)
    col[:N] = f.coef_range(0, N - 1)
    col[size - (N - 1):] = f.coef_range(-(N - 1), -1) if N > 1 else []
    return sfft.ifft(sfft.fft(col) * sfft.fft(x, size))[:N]


def _circulant_hankel(f: Symbol, x: np.ndarray, N: int) -> np.ndarray:
    size = sfft.next_fast_len(2 * N)
    a = np.zeros(size, dtype=complex)
    a[: 2 * N - 1] = f.coef_range(-(2 * N - 1), -1)[::-1]
    return sfft.ifft(sfft.fft(a) * sfft.fft(x[::-1], size))[N - 1: 2 * N - 1]


def fast_apply(op: WindowedOperator, v: CoeffVector) -> CoeffVector:
    """Apply a windowed operator without forming dense products.

    Toeplitz and Hankel blocks go through a circulant embedding of length
    at least ``2N``; compositions apply their factors right to left.  The
    output error bound adds the operator's action on the input tail to the
    part of the true output that falls outside the window.
    """
    n_in = op.matrix.shape[1]
    if len(v) > n_in:
        raise WindowError(f"vector of length {len(v)} does not fit input window {n_in}")
    x = v.padded(n_in)
    if op.provenance in ("toeplitz", "hankel"):
        f = op.symbol
        N = n_in
        if op.provenance == "toeplitz":
            y = _circulant_toeplitz(f, x, N)
            spill = toeplitz_apply(f, CoeffVector(x, 0.0), N).tail_bound
        else:
            y = _circulant_hankel(f, x, N)
            spill = hankel_apply(f, CoeffVector(x, 0.0), N).tail_bound
        tail = f.sup_norm_bound * v.tail_bound + spill
        return CoeffVector(y, tail)
    if op.provenance == "rank_one":
        xv, yv = op.factors
        ip = np.vdot(yv.entries, x)
        y_err = v.norm() * yv.tail_bound + v.tail_bound * (yv.norm() + yv.tail_bound)
        tail = xv.tail_bound * (abs(ip) + y_err) + xv.norm() * y_err
        return CoeffVector(xv.entries * ip, tail)
    if op.provenance == "composition":
        out = CoeffVector(x, v.tail_bound)
        for factor in reversed(op.factors):
            out = fast_apply(factor, out)
        return out
    y = op.matrix @ x
    return CoeffVector(y, operator_norm(op.matrix) * v.tail_bound)


def hankel_svd(f: Symbol, N: int) -> np.ndarray:
    """Nonincreasing singular values of the ``N x N`` Hankel section."""
    if N < 2:
        raise WindowError("hankel_svd needs N >= 2")
    if f.analytic:
        return np.zeros(N)
    return scipy.linalg.svdvals(hankel_window(f, N).matrix)


def shifted_hankel_norm(f: Symbol, shift: int, N: int) -> float:
    """Norm of the ``N x N`` section of ``H_{z^shift f}`` (the Hankel tail past ``shift``).

    ``||H_{z^M f}||`` decreases to the essential norm of ``H_f`` as ``M`` grows,
    so sections taken with ``M`` proportional to ``N`` separate compact
    Hankels (tail -> 0) from noncompact ones.  For a jump the statistic is
    scale invariant: it settles at a positive level below the essential
    norm (about 0.122 for a unit jump with ``M = N/2``).
    """
    if f.analytic:
        return 0.0
    a = f.coef_range(-(2 * N - 1 + shift), -(1 + shift))[::-1]
    mat = scipy.linalg.hankel(a[:N], a[N - 1:])
    return operator_norm(mat)


def low_rank_norm(vectors: list[np.ndarray], coeffs: np.ndarray) -> float:
    """Operator norm of ``V C V^H`` where ``V`` has the given columns."""
    size = max(len(v) for v in vectors)
    V = np.zeros((size, len(vectors)), dtype=complex)
    for j, v in enumerate(vectors):
        V[: len(v), j] = v
    _, R = np.linalg.qr(V)
    return operator_norm(R @ coeffs @ R.conj().T)


def rank_sum_norm(lefts: list[np.ndarray], rights: list[np.ndarray]) -> float:
    """Operator norm of ``sum_i x_i (x) y_i``."""
    size = max(max(len(v) for v in lefts), max(len(v) for v in rights))
    X = np.zeros((size, len(lefts)), dtype=complex)
    Y = np.zeros((size, len(rights)), dtype=complex)
    for j, (x, y) in enumerate(zip(lefts, rights)):
        X[: len(x), j] = x
        Y[: len(y), j] = y
    _, RX = np.linalg.qr(X)
    _, RY = np.linalg.qr(Y)
    return operator_norm(RX @ RY.conj().T)


def next_pow2(n: int) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))
