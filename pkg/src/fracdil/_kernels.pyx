# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled core for the bilinear frequency-domain double loop.

Accumulates, over all pairs of retained Fourier coefficients of f and g,

    out[(k_f + k_g) mod n] += f_hat[k_f] * g_hat[k_g] * m(t1*xi, t2*eta)

for the non-separable multiplier kinds (envelope, spherical, triangle
envelope).  Separable kinds never reach this path.
"""

import numpy as np

cimport numpy as cnp
cimport scipy.special.cython_special as cs
from libc.math cimport M_PI, pow, sqrt, tgamma

KIND_ENVELOPE = 2
KIND_SPHERICAL = 3
KIND_TRIANGLE = 4

COMPILED = True


cdef inline double sphere_symbol(double radius, int sym_d) nogil:
    # Fourier transform of the normalized surface measure on the unit sphere
    # of R^(2*sym_d), radial in |zeta|, equal to 1 at the origin:
    #   Gamma(sym_d) * J_{sym_d-1}(2 pi R) / (pi R)^(sym_d - 1)
    if radius < 1e-12:
        return 1.0
    return (
        tgamma(<double> sym_d)
        * cs.jv(sym_d - 1.0, 2.0 * M_PI * radius)
        / pow(M_PI * radius, sym_d - 1)
    )


def spherical_symbol_values(double[:] radii, int sym_d):
    """Vectorized spherical symbol on an array of |zeta| values."""
    cdef Py_ssize_t i, m = radii.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[:] o = out
    for i in range(m):
        o[i] = sphere_symbol(radii[i], sym_d)
    return out


def bilinear_accumulate(
    cnp.complex128_t[:] vf,
    cnp.int64_t[:, :] idxf,
    double[:] normf,
    double[:, :] freqf,
    cnp.complex128_t[:] vg,
    cnp.int64_t[:, :] idxg,
    double[:] normg,
    double[:, :] freqg,
    cnp.int64_t[:] strides,
    long n,
    int kind,
    double t1,
    double t2,
    double decay_a,
    int sym_d,
    cnp.complex128_t[:] out,
):
    """Accumulate multiplier-weighted coefficient products into ``out``.

    ``idxf``/``idxg`` hold FFT grid indices in [0, n) per axis, ``freqf`` /
    ``freqg`` the matching physical frequency vectors, ``normf``/``normg``
    their Euclidean norms.  ``out`` is the flat (C-order) coefficient array
    of the result and is added to in place.
    """
    cdef Py_ssize_t nf = vf.shape[0]
    cdef Py_ssize_t ng = vg.shape[0]
    cdef Py_ssize_t d = idxf.shape[1]
    cdef Py_ssize_t a, b, ax
    cdef long flat, ij
    cdef double rf, rg, m, dot, cos2, sint, mn, env_e
    cdef double complex va

    env_e = 0.5 * (sym_d - 2)
    with nogil:
        for a in range(nf):
            va = vf[a]
            rf = t1 * normf[a]
            for b in range(ng):
                flat = 0
                for ax in range(d):
                    ij = idxf[a, ax] + idxg[b, ax]
                    if ij >= n:
                        ij -= n
                    flat += ij * strides[ax]
                rg = t2 * normg[b]
                if kind == 2:
                    m = pow(1.0 + rf + rg, -decay_a)
                elif kind == 3:
                    m = sphere_symbol(sqrt(rf * rf + rg * rg), sym_d)
                else:
                    dot = 0.0
                    for ax in range(d):
                        dot += freqf[a, ax] * freqg[b, ax]
                    if normf[a] > 0.0 and normg[b] > 0.0:
                        cos2 = (dot * dot) / (normf[a] * normf[a] * normg[b] * normg[b])
                        if cos2 > 1.0:
                            cos2 = 1.0
                        sint = sqrt(1.0 - cos2)
                    else:
                        sint = 0.0
                    mn = rf if rf < rg else rg
                    m = pow(1.0 + mn * sint, -env_e) * pow(
                        1.0 + sqrt(rf * rf + rg * rg), -env_e
                    )
                out[flat] += va * vg[b] * m
    return None
