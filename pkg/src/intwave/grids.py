"""Periodic grids and spectral derivatives.

Everything downstream works on uniform periodic grids over [-L, L) with
x_j = -L + 2 L j / N.  Derivatives are Fourier spectral: exact for band-limited
data, which is what the localized profiles here effectively are once L is
large enough.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError


def grid_points(L, N):
    """Nodes x_j = -L + 2 L j / N, j = 0 .. N-1."""
    j = np.arange(N)
    return -L + 2.0 * L * j / N


def wavenumbers(L, N):
    """FFT-ordered wavenumbers for the 2L-periodic grid."""
    return 2.0 * np.pi * np.fft.fftfreq(N, d=2.0 * L / N)


def _check_grid(L, N):
    if not (np.isfinite(L) and L > 0):
        raise GridError(f"half-length L must be positive and finite, got {L}")
    N = int(N)
    if N < 8 or (N & (N - 1)) != 0:
        raise GridError(f"N must be a power of two with N >= 8, got {N}")
    return float(L), N


def spectral_derivative(values, L, order=1):
    """Differentiate periodic samples by FFT.

    Odd orders zero the Nyquist mode, the usual convention that keeps the
    result real and the derivative matrix antisymmetric.
    """
    values = np.asarray(values, dtype=float)
    N = values.shape[-1]
    k = wavenumbers(L, N)
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[N // 2] = 0.0
    return np.fft.ifft(mult * np.fft.fft(values)).real


def _circulant_from_symbol(sym, N):
    """Dense circulant matrix of a Fourier multiplier.

    The stencil is the inverse transform of the symbol.  Enforcing the
    even/odd parity the symbol has analytically (real part even, imaginary
    part odd in k) makes the resulting matrix exactly symmetric resp.
    antisymmetric instead of only up to FFT roundoff.
    """
    even = np.fft.ifft(sym.real).real
    odd = np.fft.ifft(1j * sym.imag).real
    even = 0.5 * (even + np.roll(even[::-1], 1))
    odd = 0.5 * (odd - np.roll(odd[::-1], 1))
    c = even + odd
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    return c[idx]


def diff_matrix(L, N, order=1):
    """Dense spectral differentiation matrix."""
    L, N = _check_grid(L, N)
    k = wavenumbers(L, N)
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[N // 2] = 0.0
    return _circulant_from_symbol(mult, N)


def multiplier_matrix(L, N, symbol_values):
    """Dense matrix of the Fourier multiplier with the given FFT-ordered symbol."""
    L, N = _check_grid(L, N)
    sym = np.asarray(symbol_values, dtype=complex)
    if sym.shape != (N,):
        raise GridError(f"symbol must have shape ({N},), got {sym.shape}")
    return _circulant_from_symbol(sym, N)


@dataclass(eq=False)
class GridProfile:
    """Samples of a real function on the uniform periodic grid over [-L, L).

    Invariants enforced here: N a power of two, N >= 8, finite values, and
    len(values) == N.  The interface-range bound (-d_minus < values < d_plus)
    is a property of the physical setting and is checked where a profile is
    used as an interface, not here.
    """

    L: float
    N: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.L, self.N = _check_grid(self.L, self.N)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.N,):
            raise GridError(
                f"values shape {self.values.shape} does not match N={self.N}"
            )
        if not np.all(np.isfinite(self.values)):
            raise GridError("values must be finite")

    @classmethod
    def from_function(cls, L, N, fn):
        x = grid_points(L, N)
        return cls(L, N, np.asarray(fn(x), dtype=float))

    @property
    def x(self):
        return grid_points(self.L, self.N)

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    def derivative(self, order=1):
        return GridProfile(self.L, self.N, spectral_derivative(self.values, self.L, order))

    def integral(self):
        """Periodic trapezoid rule, spectrally accurate for smooth data."""
        return self.dx * float(np.sum(self.values))

    def mean(self):
        return float(np.mean(self.values))

    def norm_l2(self):
        """Discrete L2 norm, sqrt(dx * sum of squares)."""
        return float(np.sqrt(self.dx * np.sum(self.values ** 2)))

    def norm_inf(self):
        return float(np.max(np.abs(self.values)))

    def same_grid(self, other):
        return self.N == other.N and np.isclose(self.L, other.L, rtol=0, atol=1e-12 * max(1.0, self.L))

    def with_values(self, values):
        return GridProfile(self.L, self.N, values)


def require_same_grid(*profiles):
    first = profiles[0]
    for p in profiles[1:]:
        if not first.same_grid(p):
            raise GridError("profiles must share one grid")
    return first
