"""Complex-valued functions on a periodic uniform grid over a d-torus.

Conventions: the torus is [0, L)^d sampled at n points per axis (n a power of
two); Fourier coefficients c_k are indexed by integer vectors k in
[-n/2, n/2)^d and the physical frequency of index k is k / L, so dilating a
symbol by t is exact.  Parseval: ||f||_{L^2}^2 = L^d * sum |c_k|^2.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import GridError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridFunction:
    dim: int
    side: int
    period: float
    samples: np.ndarray

    def __post_init__(self):
        if not _is_power_of_two(self.side):
            raise GridError(f"side {self.side} must be a power of two")
        if self.period <= 0:
            raise GridError("period must be positive")
        arr = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if arr.shape != (self.side,) * self.dim:
            raise GridError(f"samples shape {arr.shape} != {(self.side,) * self.dim}")
        object.__setattr__(self, "samples", arr)

    # ------------------------------------------------------------- builders

    @classmethod
    def from_samples(cls, samples: np.ndarray, period: float) -> "GridFunction":
        samples = np.asarray(samples)
        return cls(samples.ndim, samples.shape[0], float(period), samples)

    @classmethod
    def from_coeffs(cls, coeffs: np.ndarray, period: float) -> "GridFunction":
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        n = coeffs.shape[0]
        samples = np.fft.ifftn(coeffs) * coeffs.size
        return cls(coeffs.ndim, n, float(period), samples)

    @classmethod
    def ones(cls, dim: int, side: int, period: float) -> "GridFunction":
        return cls(dim, side, float(period), np.ones((side,) * dim, dtype=np.complex128))

    # ------------------------------------------------------------- geometry

    @property
    def spacing(self) -> float:
        return self.period / self.side

    @property
    def nyquist(self) -> float:
        """Largest resolved frequency magnitude per axis, n/(2L)."""
        return self.side / (2.0 * self.period)

    def axes(self) -> np.ndarray:
        return np.arange(self.side) * self.spacing

    def freq_indices(self) -> np.ndarray:
        """Signed integer frequency indices along one axis, FFT order."""
        return np.fft.fftfreq(self.side, d=1.0 / self.side).astype(np.int64)

    def freq_axis(self) -> np.ndarray:
        """Physical frequencies along one axis, FFT order."""
        return self.freq_indices() / self.period

    def freq_norm_grid(self) -> np.ndarray:
        """|xi| on the full coefficient grid."""
        ax = self.freq_axis()
        grids = np.meshgrid(*([ax] * self.dim), indexing="ij")
        return np.sqrt(sum(g * g for g in grids))

    def coeffs(self) -> np.ndarray:
        return np.fft.fftn(self.samples) / self.samples.size

    def compatible(self, other: "GridFunction") -> bool:
        return (
            self.dim == other.dim
            and self.side == other.side
            and abs(self.period - other.period) < 1e-12 * self.period
        )

    # ---------------------------------------------------------------- norms

    def l2(self) -> float:
        cell = (self.period / self.side) ** self.dim
        return float(np.sqrt(cell * np.sum(np.abs(self.samples) ** 2)))

    def lp(self, p: float) -> float:
        if p == np.inf:
            return float(np.max(np.abs(self.samples)))
        cell = (self.period / self.side) ** self.dim
        return float((cell * np.sum(np.abs(self.samples) ** p)) ** (1.0 / p))

    def sobolev(self, s: float) -> float:
        """Norm of H^{-s}: L^2 norm of (1 + |xi|^2)^{-s/2} f_hat."""
        weight = (1.0 + self.freq_norm_grid() ** 2) ** (-s / 2.0)
        c = self.coeffs()
        return float(
            np.sqrt(self.period**self.dim * np.sum(np.abs(c) ** 2 * weight**2))
        )

    # ---------------------------------------------------------------- shifts

    def shift_cells(self, cells) -> "GridFunction":
        """tau_h f with h = cells * spacing, exact as an index roll."""
        cells = np.atleast_1d(np.asarray(cells, dtype=np.int64))
        if cells.size != self.dim:
            raise GridError("shift vector dimension mismatch")
        out = self.samples
        for ax, c in enumerate(cells):
            out = np.roll(out, int(c), axis=ax)
        return GridFunction(self.dim, self.side, self.period, out)

    def shift(self, h) -> "GridFunction":
        """tau_h f for a grid-aligned shift vector h (length units)."""
        h = np.atleast_1d(np.asarray(h, dtype=np.float64))
        cells = h / self.spacing
        rounded = np.round(cells)
        if np.max(np.abs(cells - rounded)) > 1e-9:
            raise GridError(f"shift {h} is not grid-aligned (spacing {self.spacing})")
        return self.shift_cells(rounded.astype(np.int64))

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        if not self.compatible(other):
            raise GridError("grid mismatch")
        return GridFunction(self.dim, self.side, self.period, self.samples - other.samples)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        if not self.compatible(other):
            raise GridError("grid mismatch")
        return GridFunction(self.dim, self.side, self.period, self.samples + other.samples)


# --------------------------------------------------------- smooth LP cutoffs


def lp_phi(r: np.ndarray) -> np.ndarray:
    """Radial C^inf cutoff: 1 on r <= 1, exp(1 - 1/(1-(r-1)^2)) on 1 < r < 2, 0 beyond."""
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros_like(r)
    out[r <= 1.0] = 1.0
    mid = (r > 1.0) & (r < 2.0)
    u = r[mid] - 1.0
    out[mid] = np.exp(1.0 - 1.0 / (1.0 - u * u))
    return out


def lp_psi(r: np.ndarray) -> np.ndarray:
    """psi_hat(r) = phi_hat(r) - phi_hat(2r), supported on 1/2 < r < 2."""
    return lp_phi(r) - lp_phi(2.0 * np.asarray(r, dtype=np.float64))


def max_band(f: GridFunction) -> int:
    """Largest live band index; summing pieces 0..max_band reconstructs f."""
    top = np.sqrt(f.dim) * f.nyquist
    i = 0
    while 2.0**i < top:  # band i+1 is alive while its support start 2^i < top
        i += 1
    return i


def littlewood_paley_piece(f: GridFunction, i: int) -> GridFunction:
    """Frequency band i of f: coefficients times psi_hat(2^-i xi) (phi_hat for i=0)."""
    if i < 0:
        raise GridError("band index must be nonnegative")
    r = f.freq_norm_grid()
    if i == 0:
        window = lp_phi(r)
    else:
        scale = 2.0 ** (-i)
        if 2.0 ** (i - 1) >= np.sqrt(f.dim) * f.nyquist:
            raise GridError(f"band exceeds grid: 2^{i - 1} beyond Nyquist {f.nyquist:g}")
        window = lp_psi(scale * r)
    return GridFunction.from_coeffs(f.coeffs() * window, f.period)


# ------------------------------------------------------------ random inputs


def random_band_limited(
    dim: int, side: int, period: float, band: int, rng: np.random.Generator
) -> GridFunction:
    """Gaussian coefficients tapered to Littlewood-Paley band ``band``."""
    shape = (side,) * dim
    ax = np.fft.fftfreq(side, d=1.0 / side) / period
    grids = np.meshgrid(*([ax] * dim), indexing="ij")
    r = np.sqrt(sum(g * g for g in grids))
    window = lp_phi(r) if band == 0 else lp_psi(r * 2.0 ** (-band))
    if not np.any(window > 0):
        raise GridError(f"band exceeds grid: band {band} at side {side}")
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return GridFunction.from_coeffs(c * window, period)


def random_full_band(
    dim: int, side: int, period: float, rng: np.random.Generator, top: float = 0.75
) -> GridFunction:
    """Gaussian coefficients on |xi| < top * Nyquist (avoids the asymmetric edge)."""
    shape = (side,) * dim
    ax = np.fft.fftfreq(side, d=1.0 / side) / period
    grids = np.meshgrid(*([ax] * dim), indexing="ij")
    r = np.sqrt(sum(g * g for g in grids))
    mask = r < top * side / (2.0 * period)
    c = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * mask
    return GridFunction.from_coeffs(c, period)


def random_pink(
    dim: int, side: int, period: float, rng: np.random.Generator, top: float = 0.75
) -> GridFunction:
    """Gaussian coefficients scaled to (1+|xi|)^{-dim/2}: every dyadic band
    carries comparable energy, the extremal profile for modulus measurements."""
    shape = (side,) * dim
    ax = np.fft.fftfreq(side, d=1.0 / side) / period
    grids = np.meshgrid(*([ax] * dim), indexing="ij")
    r = np.sqrt(sum(g * g for g in grids))
    mask = r < top * side / (2.0 * period)
    amp = (1.0 + r) ** (-dim / 2.0) * mask
    c = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * amp
    return GridFunction.from_coeffs(c, period)


# -------------------------------------------------------------------- I/O

_HEADER = struct.Struct("<qqd")  # dim, side, period


def save_grid(f: GridFunction, path) -> None:
    """Flat binary: little-endian header (dim, side int64; period float64),
    then interleaved re/im float64 samples in row-major order."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(f.dim, f.side, f.period))
        inter = np.empty(f.samples.size * 2, dtype="<f8")
        inter[0::2] = f.samples.real.reshape(-1)
        inter[1::2] = f.samples.imag.reshape(-1)
        fh.write(inter.tobytes())


def load_grid(path) -> GridFunction:
    with open(path, "rb") as fh:
        dim, side, period = _HEADER.unpack(fh.read(_HEADER.size))
        inter = np.frombuffer(fh.read(), dtype="<f8")
    samples = (inter[0::2] + 1j * inter[1::2]).reshape((side,) * dim)
    return GridFunction(dim, side, period, samples)
