"""Pure-NumPy fallback for the bilinear frequency-domain double loop.

Same contract as the compiled extension: vectorizes over the f support for
each retained g coefficient.  Correct for every input but markedly slower;
``benchmarks/bench_kernels.py`` quantifies the gap.
"""

import numpy as np
from scipy.special import gamma, jv

KIND_ENVELOPE = 2
KIND_SPHERICAL = 3
KIND_TRIANGLE = 4

COMPILED = False


def spherical_symbol_values(radii, sym_d):
    """Fourier transform of the normalized surface measure on the unit sphere
    of R^(2*sym_d) as a function of |zeta|; equals 1 at the origin."""
    r = np.asarray(radii, dtype=np.float64)
    out = np.ones_like(r)
    mask = r >= 1e-12
    rm = r[mask]
    out[mask] = gamma(sym_d) * jv(sym_d - 1, 2.0 * np.pi * rm) / (np.pi * rm) ** (sym_d - 1)
    return out


def _multiplier_values(kind, rf, rg, ff, fg_row, nf_raw, ng_raw, decay_a, sym_d):
    if kind == KIND_ENVELOPE:
        return (1.0 + rf + rg) ** (-decay_a)
    if kind == KIND_SPHERICAL:
        return spherical_symbol_values(np.sqrt(rf * rf + rg * rg), sym_d)
    # triangle envelope
    env_e = 0.5 * (sym_d - 2)
    dot = ff @ fg_row
    denom = nf_raw * ng_raw
    cos2 = np.zeros_like(rf)
    pos = denom > 0
    cos2[pos] = np.minimum(1.0, (dot[pos] / denom[pos]) ** 2)
    sint = np.sqrt(1.0 - cos2)
    sint[~pos] = 0.0
    mn = np.minimum(rf, rg)
    return (1.0 + mn * sint) ** (-env_e) * (1.0 + np.sqrt(rf * rf + rg * rg)) ** (-env_e)


def bilinear_accumulate(
    vf,
    idxf,
    normf,
    freqf,
    vg,
    idxg,
    normg,
    freqg,
    strides,
    n,
    kind,
    t1,
    t2,
    decay_a,
    sym_d,
    out,
):
    rf_all = t1 * normf
    base = idxf.astype(np.int64)
    for b in range(vg.shape[0]):
        ij = base + idxg[b]
        ij[ij >= n] -= n
        flat = ij @ strides
        m = _multiplier_values(
            kind, rf_all, t2 * normg[b], freqf, freqg[b], normf, normg[b], decay_a, sym_d
        )
        np.add.at(out, flat, vf * vg[b] * m)
    return None
