"""Real-space evaluation of bilinear spherical averages by slicing.

The average over the unit sphere of R^{2d} splits into an outer integral over
the d-ball (the g slot) and an inner average over S^{d-1} at the complementary
radius (the f slot):

    A_t(f,g)(x) = (1/Z) \\int_{B^d} g(x - t y)
                  [ avg_{z in S^{d-1}} f(x - t sqrt(1-|y|^2) z) ]
                  (1 - |y|^2)^{(d-2)/2} dy,

with Z normalizing so that constants map to 1.  This path never touches the
frequency-domain symbol, so it serves as an independent oracle for the FFT
route.  Grid functions are evaluated off-grid by exact trigonometric
translation (an FFT phase twist), which is error-free for band-limited data.

Supported dimensions: d = 1 (S^0 is the two-point average) and d = 2.
"""

from __future__ import annotations

import numpy as np

from .errors import FracdilError, GridError
from .grid import GridFunction


def _shift_field(coeffs: np.ndarray, period: float, v) -> np.ndarray:
    """Samples of u(x - v) for the grid function with these coefficients."""
    n = coeffs.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    out = coeffs
    for ax, comp in enumerate(np.atleast_1d(v)):
        shape = [1] * coeffs.ndim
        shape[ax] = n
        out = out * np.exp(-2j * np.pi * k * comp / period).reshape(shape)
    return np.fft.ifftn(out) * coeffs.size


def slicing_average_pair(
    f: GridFunction,
    g: GridFunction,
    t1: float,
    t2: float,
    quadrature_nodes: int | None = None,
) -> GridFunction:
    """Biparameter slicing: f averaged at radius t1 sqrt(1-|y|^2), g at t2 y."""
    if not f.compatible(g):
        raise GridError("f and g must share (dim, side, period)")
    if max(t1, t2) > f.period / 2.0:
        raise FracdilError(f"t={max(t1, t2)} too large for period {f.period}")
    d = f.dim
    cf, cg = f.coeffs(), g.coeffs()
    if d == 1:
        m = quadrature_nodes or 4 * f.side
        theta = (2 * np.arange(1, m + 1) - 1) * np.pi / (2 * m)
        acc = np.zeros_like(f.samples)
        for th in theta:
            y, s = np.cos(th), np.sin(th)
            gy = _shift_field(cg, g.period, [t2 * y])
            fplus = _shift_field(cf, f.period, [t1 * s])
            fminus = _shift_field(cf, f.period, [-t1 * s])
            acc += gy * 0.5 * (fplus + fminus)
        return GridFunction(d, f.side, f.period, acc / m)
    if d == 2:
        m = quadrature_nodes or f.side
        n_rad, n_ang, n_sph = m, 2 * m, 2 * m
        nodes, weights = np.polynomial.legendre.leggauss(n_rad)
        psi = (nodes + 1.0) * (np.pi / 4.0)
        wts = weights * (np.pi / 4.0)
        phis = 2.0 * np.pi * np.arange(n_ang) / n_ang
        zetas = 2.0 * np.pi * np.arange(n_sph) / n_sph
        acc = np.zeros_like(f.samples)
        for psi_j, w_j in zip(psi, wts):
            rho_f = t1 * np.cos(psi_j)
            rho_g = t2 * np.sin(psi_j)
            sphere = np.zeros_like(f.samples)
            for z in zetas:
                sphere += _shift_field(cf, f.period, [rho_f * np.cos(z), rho_f * np.sin(z)])
            sphere /= n_sph
            ball = np.zeros_like(g.samples)
            for ph in phis:
                ball += _shift_field(cg, g.period, [rho_g * np.cos(ph), rho_g * np.sin(ph)])
            ball *= 2.0 * np.pi / n_ang
            acc += w_j * np.sin(psi_j) * np.cos(psi_j) * ball * sphere
        return GridFunction(d, f.side, f.period, acc / np.pi)
    raise FracdilError("slicing is implemented for d = 1 and d = 2")


def slicing_average(
    f: GridFunction, g: GridFunction, t: float, quadrature_nodes: int | None = None
) -> GridFunction:
    """Single-scale bilinear spherical average A_t(f, g) by slicing."""
    return slicing_average_pair(f, g, t, t, quadrature_nodes)
