"""Extremal example inputs and shrinking-delta scaling experiments.

Each witness kind pairs indicator inputs with the probe region where the
operator admits a power-law lower bound; fitting log-log slopes of the probe
norm and of the input norms against delta and comparing with the exponents
read off the corresponding displayed inequalities tests the necessary
conditions at desk scale.

Indicators and probes are rasterized with partial-cell weights (exact per-axis
overlap for boxes and interval unions, linearized overlap for radial bands) so
that thin regions do not alias with the grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import FracdilError
from .fractal import DilationSet, cover_anchors, harmonic_combine, minkowski_dim_estimate
from .grid import GridFunction
from .multipliers import MultiplierSpec
from .operator import _apply_at_scale
from .regions import frac
from .slicing import slicing_average_pair

BALL_C = 8.0       # paper's 100, shrunk for grid feasibility
KNAPP_C1 = {1: 4.0, 2: 2.0}
KNAPP_C2 = {1: 8.0, 2: 4.0}


# ----------------------------------------------------------- rasterization


def centered_axis(side: int, period: float) -> np.ndarray:
    """Cell centers in centered coordinates [-L/2, L/2)."""
    x = np.arange(side) * period / side
    return (x + period / 2) % period - period / 2


def interval_coverage(centers: np.ndarray, spacing: float, intervals) -> np.ndarray:
    """Fraction of each cell [c - h/2, c + h/2] covered by a union of intervals."""
    w = np.zeros_like(centers)
    for left, right in intervals:
        lo = np.maximum(centers - spacing / 2, left)
        hi = np.minimum(centers + spacing / 2, right)
        w += np.clip(hi - lo, 0.0, None)
    return np.clip(w / spacing, 0.0, 1.0)


def radial_band_coverage(radii: np.ndarray, spacing: float, intervals) -> np.ndarray:
    """Linearized cell coverage of radial bands {r : |x| in union of intervals}."""
    w = np.zeros_like(radii)
    for left, right in intervals:
        lo = np.maximum(radii - spacing / 2, left)
        hi = np.minimum(radii + spacing / 2, right)
        w += np.clip(hi - lo, 0.0, None)
    return np.clip(w / spacing, 0.0, 1.0)


def _grid_axes(dim: int, side: int, period: float):
    ax = centered_axis(side, period)
    return np.meshgrid(*([ax] * dim), indexing="ij")


def _weights_to_function(weights: np.ndarray, side: int, period: float) -> GridFunction:
    return GridFunction(weights.ndim, side, float(period), weights.astype(np.complex128))


# ----------------------------------------------------------------- witnesses


def make_ball_pair(delta: float, dim: int, side: int, period: float, c: float = BALL_C):
    """f = g = indicator of the ball B(0, c*delta), partial cells at the rim."""
    h = period / side
    if c * delta < 2 * h:
        raise FracdilError(f"ball radius {c * delta:g} below two grid cells ({2 * h:g})")
    if c * delta > period / 4:
        raise FracdilError("ball does not fit the torus without wrap-around")
    grids = _grid_axes(dim, side, period)
    if dim == 1:
        w = interval_coverage(grids[0], h, [(-c * delta, c * delta)])
    else:
        r = np.sqrt(sum(g * g for g in grids))
        w = radial_band_coverage(r, h, [(0.0, c * delta)])
    f = _weights_to_function(w, side, period)
    return f, f


def ball_probe(
    dset: DilationSet, delta: float, dim: int, side: int, period: float
) -> np.ndarray:
    """Weights of {x : sqrt(2) |x| in the delta-cover of E}."""
    h = period / side
    anchors = cover_anchors(dset, delta)
    bands = [(a / math.sqrt(2), (a + delta) / math.sqrt(2)) for a in anchors]
    grids = _grid_axes(dim, side, period)
    if dim == 1:
        sym = [(-r, -l) for l, r in bands] + bands
        return interval_coverage(grids[0], h, sym)
    r = np.sqrt(sum(g * g for g in grids))
    return radial_band_coverage(r, h, bands)


def make_knapp(delta: float, dim: int, dset: DilationSet, side: int, period: float,
               c1: float | None = None, c2: float | None = None):
    """Knapp boxes f = chi_{R1}, g = chi_{R2} and the probe slab region.

    R_i = [-c_i sqrt(delta), c_i sqrt(delta)]^{d-1} x [-c_i delta, c_i delta];
    the probe is {x : |x'| <= sqrt(delta), sqrt(2) x_d in delta-cover of E}.
    """
    if dim < 2:
        raise FracdilError("knapp witness needs d >= 2")
    c1 = KNAPP_C1.get(dim, 2.0) if c1 is None else c1
    c2 = KNAPP_C2.get(dim, 4.0) if c2 is None else c2
    h = period / side
    if c1 * delta < h:
        raise FracdilError(f"knapp thickness {c1 * delta:g} below one grid cell")
    if c2 * math.sqrt(delta) > period / 4:
        raise FracdilError("knapp box does not fit the torus without wrap-around")
    grids = _grid_axes(dim, side, period)

    def box(c):
        w = np.ones_like(grids[0])
        rad = c * math.sqrt(delta)
        for ax in range(dim - 1):
            w = w * interval_coverage(grids[ax], h, [(-rad, rad)])
        w = w * interval_coverage(grids[dim - 1], h, [(-c * delta, c * delta)])
        return w

    f = _weights_to_function(box(c1), side, period)
    g = _weights_to_function(box(c2), side, period)

    anchors = cover_anchors(dset, delta)
    slabs = [(a / math.sqrt(2), (a + delta) / math.sqrt(2)) for a in anchors]
    probe = np.ones_like(grids[0])
    root = math.sqrt(delta)
    for ax in range(dim - 1):
        probe = probe * interval_coverage(grids[ax], h, [(-root, root)])
    probe = probe * interval_coverage(grids[dim - 1], h, slabs)
    return f, g, probe


def make_assouad_witness(
    delta: float, interval: tuple[float, float], alpha: float, dim: int, side: int, period: float
) -> GridFunction:
    """Indicator of the curved plate {| |y| - r/sqrt(2) | <= delta, |y'| <= sigma}
    with sigma = delta^(alpha/2) and r the left endpoint of the interval."""
    if not 0 < alpha <= 1:
        raise FracdilError("alpha must lie in (0, 1]")
    sigma = delta ** (alpha / 2)
    if sigma < math.sqrt(delta) - 1e-12:
        raise FracdilError("sigma must be at least sqrt(delta)")
    h = period / side
    if 2 * delta < h:
        raise FracdilError("plate thickness below one grid cell")
    r0 = interval[0] / math.sqrt(2)
    grids = _grid_axes(dim, side, period)
    rad = np.sqrt(sum(g * g for g in grids))
    w = radial_band_coverage(rad, h, [(r0 - delta, r0 + delta)])
    for ax in range(dim - 1):
        w = w * interval_coverage(grids[ax], h, [(-sigma, sigma)])
    return _weights_to_function(w, side, period)


def assouad_probe(
    delta: float,
    interval: tuple[float, float],
    alpha: float,
    dset: DilationSet,
    dim: int,
    side: int,
    period: float,
    c: float = 1.0,
) -> np.ndarray:
    """Weights of {|x'| <= c delta/sigma, x_d = -(t - r)/sqrt(2), t in cover of E cap I}."""
    sigma = delta ** (alpha / 2)
    piece = dset.intersect_window(*interval)
    if piece is None:
        raise FracdilError("dilation set does not meet the window")
    anchors = cover_anchors(piece, delta)
    r = interval[0]
    segs = [(-(a + delta - r) / math.sqrt(2), -(a - r) / math.sqrt(2)) for a in anchors]
    h = period / side
    grids = _grid_axes(dim, side, period)
    probe = np.ones_like(grids[0])
    for ax in range(dim - 1):
        probe = probe * interval_coverage(grids[ax], h, [(-c * delta / sigma, c * delta / sigma)])
    probe = probe * interval_coverage(grids[dim - 1], h, segs)
    return probe


# --------------------------------------------------------- predicted slopes


def predicted_exponents(kind: str, d: int, p, q, r, beta, gamma=None, alpha=None):
    """Exact (lhs, rhs) delta-exponents of the displayed testing inequalities.

    ball:   delta^{2d-1} (delta N(E,delta))^{1/r}  vs  delta^{d/p + d/q}
    knapp:  delta^d (delta^{(d-1)/2} N delta)^{1/r}  vs  delta^{(d+1)/2 (1/p+1/q)}
    assouad: sigma^{2d-2} delta ((delta/sigma)^{d-1} delta N)^{1/r}
             vs (sigma^{d-1} delta)^{1/p+1/q},  sigma = delta^{alpha/2}
    with N(E, delta) carrying delta^{-beta}.
    """
    p, q, r, beta = frac(p), frac(q), frac(r), frac(beta)
    inv_r = 1 / r
    if kind in ("ball_pair", "biparameter_ball"):
        lhs = (2 * d - 1) + (1 - beta) * inv_r
        rhs = Fraction(d) / p + Fraction(d) / q
        return lhs, rhs
    if kind == "knapp":
        lhs = d + (Fraction(d + 1, 2) - beta) * inv_r
        rhs = Fraction(d + 1, 2) * (1 / p + 1 / q)
        return lhs, rhs
    if kind == "assouad":
        if alpha is None:
            raise FracdilError("assouad exponents need alpha = beta/gamma")
        alpha = frac(alpha)
        lhs = alpha * (d - 1) + 1 + ((d - 1) * (1 - alpha / 2) + 1 - beta) * inv_r
        rhs = (alpha * (d - 1) / 2 + 1) * (1 / p + 1 / q)
        return lhs, rhs
    raise FracdilError(f"unknown witness kind {kind!r}")


# ------------------------------------------------------------- experiments


@dataclass(frozen=True)
class ScalingReport:
    kind: str
    deltas: tuple[float, ...]
    lhs_norms: tuple[float, ...]
    rhs_norms: tuple[float, ...]
    full_domain_lhs: tuple[float, ...]
    fitted_lhs_exponent: float
    fitted_rhs_exponent: float
    predicted_lhs: float
    predicted_rhs: float
    lhs_residual: float
    rhs_residual: float
    tol_lhs: float
    tol_rhs: float
    verdict: str

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_jsonable(self) -> dict:
        return {
            "kind": self.kind,
            "deltas": list(self.deltas),
            "lhs_norms": list(self.lhs_norms),
            "rhs_norms": list(self.rhs_norms),
            "full_domain_lhs": list(self.full_domain_lhs),
            "fitted": [self.fitted_lhs_exponent, self.fitted_rhs_exponent],
            "predicted": [self.predicted_lhs, self.predicted_rhs],
            "residuals": [self.lhs_residual, self.rhs_residual],
            "tolerances": [self.tol_lhs, self.tol_rhs],
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), sort_keys=True)

    def csv_rows(self):
        rows = [("delta", "lhs", "rhs", "full_lhs")]
        for d, a, b, c in zip(self.deltas, self.lhs_norms, self.rhs_norms, self.full_domain_lhs):
            rows.append((d, a, b, c))
        return rows


def _weighted_loglog_fit(deltas, values):
    """Least-squares slope of log(value) vs log(delta); the largest delta is
    downweighted (most contaminated by constants)."""
    x = np.log(np.asarray(deltas, dtype=np.float64))
    y = np.log(np.asarray(values, dtype=np.float64))
    w = np.ones_like(x)
    w[np.argmax(x)] = 0.5
    coef = np.polyfit(x, y, 1, w=w)
    resid = float(np.sqrt(np.mean((y - np.polyval(coef, x)) ** 2)))
    return float(coef[0]), resid


def _probe_norm(values: np.ndarray, weights: np.ndarray, r: float, cell: float) -> float:
    return float((np.sum(weights * np.abs(values) ** r) * cell) ** (1.0 / r))


def _spherical_max_over(f, g, anchors, engine, dim, nodes):
    sup = None
    for t in anchors:
        if engine == "slicing":
            vals = np.abs(slicing_average_pair(f, g, t, t, nodes).samples)
        else:
            vals = np.abs(_apply_at_scale(f, g, MultiplierSpec.spherical(dim), t, t).samples)
        sup = vals if sup is None else np.maximum(sup, vals)
    return sup


def scaling_experiment(
    kind: str,
    dset: DilationSet,
    p: float,
    q: float,
    r: float,
    delta_list,
    grid_side: int,
    dim: int = 1,
    period: float = 8.0,
    engine: str = "slicing",
    tol_lhs: float = 0.25,
    tol_rhs: float = 0.15,
    alpha: float = 1.0,
    window: tuple[float, float] | None = None,
    quadrature_nodes: int | None = None,
) -> ScalingReport:
    """Shrinking-delta scaling run for one witness kind against A_E.

    The probe-restricted L^r norm of the operator output and the product of
    input norms are fitted against delta and compared with the predicted
    exponents; beta enters through the module-level Minkowski estimate when
    the delta grid has enough scales, otherwise through exact covering counts.
    """
    deltas = sorted(float(x) for x in delta_list)
    if len(deltas) < 2 or deltas[-1] / deltas[0] < 4 - 1e-9:
        raise FracdilError("need >= 2 octaves of delta scales")
    cell = (period / grid_side) ** dim
    beta = _beta_on_grid(dset, deltas)

    lhs, rhs, full = [], [], []
    for delta in deltas:
        nodes = quadrature_nodes or max(512, int(round(8.0 / delta)))
        if kind == "ball_pair":
            f, g = make_ball_pair(delta, dim, grid_side, period)
            probe = ball_probe(dset, delta, dim, grid_side, period)
            anchors = cover_anchors(dset, delta)
            sup = _spherical_max_over(f, g, anchors, engine, dim, nodes)
        elif kind == "knapp":
            f, g, probe = make_knapp(delta, dim, dset, grid_side, period)
            anchors = cover_anchors(dset, delta)
            sup = _spherical_max_over(f, g, anchors, engine, dim, nodes)
        elif kind == "assouad":
            if window is not None:
                win = window
            elif alpha < 1:
                win = (dset.min, dset.min + delta ** (1 - alpha))
            else:
                win = (dset.min, dset.max)
            h = make_assouad_witness(delta, win, alpha, dim, grid_side, period)
            f = g = h
            probe = assouad_probe(delta, win, alpha, dset, dim, grid_side, period)
            piece = dset.intersect_window(*win)
            if piece is None:
                raise FracdilError("dilation set does not meet the assouad window")
            anchors = cover_anchors(piece, delta)
            sup = _spherical_max_over(f, g, anchors, engine, dim, nodes)
        else:
            raise FracdilError(f"unknown witness kind {kind!r}")
        lhs.append(_probe_norm(sup, probe, r, cell))
        full.append(_probe_norm(sup, np.ones_like(probe), r, cell))
        rhs.append(f.lp(p) * g.lp(q))

    fit_lhs, res_lhs = _weighted_loglog_fit(deltas, lhs)
    fit_rhs, res_rhs = _weighted_loglog_fit(deltas, rhs)
    pred_lhs, pred_rhs = predicted_exponents(kind, dim, p, q, r, beta, alpha=alpha)
    fit_ok = abs(fit_lhs - float(pred_lhs)) <= tol_lhs and abs(fit_rhs - float(pred_rhs)) <= tol_rhs
    bound_ok = fit_lhs >= fit_rhs - 0.1
    return ScalingReport(
        kind,
        tuple(deltas),
        tuple(lhs),
        tuple(rhs),
        tuple(full),
        fit_lhs,
        fit_rhs,
        float(pred_lhs),
        float(pred_rhs),
        res_lhs,
        res_rhs,
        tol_lhs,
        tol_rhs,
        "pass" if (fit_ok and bound_ok) else "fail",
    )


def _beta_on_grid(dset: DilationSet, deltas) -> Fraction:
    """Covering-count slope of E on the experiment's own delta grid."""
    from .fractal import covering_number

    counts = [covering_number(dset, d) for d in deltas]
    if all(c == counts[0] for c in counts):
        return Fraction(0)
    x = np.log([1.0 / d for d in deltas])
    y = np.log(counts)
    slope = float(np.polyfit(x, y, 1)[0])
    return frac(max(0.0, min(1.0, slope)))


def biparameter_witness_experiment(
    e1: DilationSet,
    e2: DilationSet,
    p: float,
    q: float,
    r: float,
    delta_list,
    grid_side: int,
    dim: int = 1,
    period: float = 8.0,
    tol_lhs: float = 0.3,
    tol_rhs: float = 0.15,
    quadrature_nodes: int | None = None,
) -> ScalingReport:
    """Ball-pair witnesses against the biparameter maximal operator.

    The probe annuli live on the harmonic combination E* of the two dilation
    sets and the predicted exponent uses its dimension estimate beta*.
    """
    deltas = sorted(float(x) for x in delta_list)
    if len(deltas) < 2 or deltas[-1] / deltas[0] < 4 - 1e-9:
        raise FracdilError("need >= 2 octaves of delta scales")
    cell = (period / grid_side) ** dim
    estar = harmonic_combine(e1, e2)
    beta_star = _beta_on_grid(estar, deltas)

    lhs, rhs, full = [], [], []
    for delta in deltas:
        nodes = quadrature_nodes or max(512, int(round(8.0 / delta)))
        f, g = make_ball_pair(delta, dim, grid_side, period)
        sup = None
        for t1 in cover_anchors(e1, delta):
            for t2 in cover_anchors(e2, delta):
                vals = np.abs(slicing_average_pair(f, g, t1, t2, nodes).samples)
                sup = vals if sup is None else np.maximum(sup, vals)
        anchors = cover_anchors(estar, delta)
        bands = [(a, a + delta) for a in anchors]
        h = period / grid_side
        grids = _grid_axes(dim, grid_side, period)
        if dim == 1:
            sym = [(-b, -a) for a, b in bands] + bands
            probe = interval_coverage(grids[0], h, sym)
        else:
            rad = np.sqrt(sum(x * x for x in grids))
            probe = radial_band_coverage(rad, h, bands)
        lhs.append(_probe_norm(sup, probe, r, cell))
        full.append(_probe_norm(sup, np.ones_like(probe), r, cell))
        rhs.append(f.lp(p) * g.lp(q))

    fit_lhs, res_lhs = _weighted_loglog_fit(deltas, lhs)
    fit_rhs, res_rhs = _weighted_loglog_fit(deltas, rhs)
    pred_lhs, pred_rhs = predicted_exponents("biparameter_ball", dim, p, q, r, beta_star)
    fit_ok = abs(fit_lhs - float(pred_lhs)) <= tol_lhs and abs(fit_rhs - float(pred_rhs)) <= tol_rhs
    bound_ok = fit_lhs >= fit_rhs - 0.1
    return ScalingReport(
        "biparameter_ball",
        tuple(deltas),
        tuple(lhs),
        tuple(rhs),
        tuple(full),
        fit_lhs,
        fit_rhs,
        float(pred_lhs),
        float(pred_rhs),
        res_lhs,
        res_rhs,
        tol_lhs,
        tol_rhs,
        "pass" if (fit_ok and bound_ok) else "fail",
    )
