"""Dilation sets E as finite unions of closed intervals, with exact covering
numbers and box-counting / Assouad-type dimension estimates.

A set is stored as a sorted tuple of disjoint closed intervals ``[l, r]``
(``l == r`` encodes a single point).  Base constructions live in ``[1, 2]``;
algebraic images (squares, sums, harmonic combinations) keep their physical
endpoints and carry renormalization metadata instead.

Covering numbers are computed by a greedy left-to-right sweep, which is exact
for unions of intervals on the line.  Dimension estimates are least-squares
slopes in log-log coordinates over an explicit scale window, so every estimate
is tied to the window on which it is valid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import EmptySetError, FracdilError, ResolutionError

# Endpoint comparisons: two abscissae closer than this are the same point.
ENDPOINT_TOL = 1e-12


def _merge_intervals(raw: Sequence[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    """Sort intervals and merge any that overlap or touch within tolerance."""
    ivs = sorted((float(l), float(r)) for l, r in raw)
    merged: list[list[float]] = []
    for l, r in ivs:
        if r < l:
            raise FracdilError(f"interval [{l}, {r}] has negative length")
        if merged and l <= merged[-1][1] + ENDPOINT_TOL:
            merged[-1][1] = max(merged[-1][1], r)
        else:
            merged.append([l, r])
    return tuple((l, r) for l, r in merged)


@dataclass(frozen=True)
class DilationSet:
    """Finite union of closed intervals representing a set of dilation scales."""

    intervals: tuple[tuple[float, float], ...]
    provenance: dict = field(default_factory=lambda: {"kind": "explicit"}, compare=False)

    def __post_init__(self):
        if not self.intervals:
            raise EmptySetError("empty dilation set")
        object.__setattr__(self, "intervals", _merge_intervals(self.intervals))
        if self.provenance.get("kind") in ("explicit", "point", "interval", "cantor"):
            lo, hi = self.intervals[0][0], self.intervals[-1][1]
            if lo < 1.0 - ENDPOINT_TOL or hi > 2.0 + ENDPOINT_TOL:
                raise FracdilError(f"dilation set endpoints [{lo}, {hi}] outside [1, 2]")

    # ---------------------------------------------------------------- builders

    @classmethod
    def point(cls, t: float) -> "DilationSet":
        return cls(((t, t),), {"kind": "point", "t": float(t)})

    @classmethod
    def interval(cls, l: float, r: float) -> "DilationSet":
        return cls(((l, r),), {"kind": "interval", "l": float(l), "r": float(r)})

    @classmethod
    def points(cls, ts: Sequence[float]) -> "DilationSet":
        return cls(tuple((t, t) for t in ts), {"kind": "explicit"})

    @classmethod
    def cantor(cls, ratio: float, depth: int) -> "DilationSet":
        """Generation ``depth`` of the two-branch Cantor construction in [1, 2].

        Each interval keeps its two end pieces of relative length ``ratio``;
        ratio 1/3 is the middle-thirds set, box dimension log 2 / log 3.
        """
        if not 0.0 < ratio < 0.5:
            raise FracdilError("cantor ratio must lie in (0, 1/2)")
        if depth < 0:
            raise FracdilError("cantor depth must be nonnegative")
        ivs = [(1.0, 2.0)]
        for _ in range(depth):
            nxt = []
            for l, r in ivs:
                step = (r - l) * ratio
                nxt.append((l, l + step))
                nxt.append((r - step, r))
            ivs = nxt
        return cls(tuple(ivs), {"kind": "cantor", "ratio": float(ratio), "depth": int(depth)})

    # ------------------------------------------------------------ basic shape

    @property
    def min(self) -> float:
        return self.intervals[0][0]

    @property
    def max(self) -> float:
        return self.intervals[-1][1]

    @property
    def diameter(self) -> float:
        return self.max - self.min

    @property
    def is_point(self) -> bool:
        return len(self.intervals) == 1 and self.intervals[0][0] == self.intervals[0][1]

    def total_length(self) -> float:
        return sum(r - l for l, r in self.intervals)

    def resolution(self) -> float:
        """Finest scale at which the representation is faithful.

        Unions of two or more non-degenerate intervals stop resolving below
        their shortest piece (a truncated construction reads as dimension 1
        there); single intervals and pure point sets resolve at every scale.
        """
        lengths = [r - l for l, r in self.intervals if r - l > ENDPOINT_TOL]
        if len(self.intervals) <= 1 or not lengths:
            return 0.0
        return min(lengths)

    def intersect_window(self, a: float, b: float) -> "DilationSet | None":
        """Intersection with the closed window [a, b], or None if empty."""
        clipped = []
        for l, r in self.intervals:
            lo, hi = max(l, a), min(r, b)
            if lo <= hi:
                clipped.append((lo, hi))
            elif lo <= hi + ENDPOINT_TOL:
                clipped.append((hi, hi))
        if not clipped:
            return None
        return DilationSet(tuple(clipped), {"kind": "window", "parent": self.provenance})

    # ------------------------------------------------------------------ JSON

    def to_json(self) -> str:
        return json.dumps(
            {"intervals": [[l, r] for l, r in self.intervals], "provenance": self.provenance},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "DilationSet":
        data = json.loads(text)
        prov = data.get("provenance", {"kind": "explicit"})
        return cls(tuple((float(l), float(r)) for l, r in data["intervals"]), prov)

    # -------------------------------------------------------- renormalization

    def renormalized(self) -> "DilationSet":
        """Affine copy mapped into [1, 2], recording the map back to physical
        coordinates as ``physical = offset + scale * (u - 1)``."""
        lo, hi = self.min, self.max
        if 1.0 - ENDPOINT_TOL <= lo and hi <= 2.0 + ENDPOINT_TOL:
            return self
        scale = hi - lo
        if scale <= ENDPOINT_TOL:
            ivs: tuple[tuple[float, float], ...] = ((1.0, 1.0),)
            scale = 0.0
        else:
            ivs = tuple((1.0 + (l - lo) / scale, 1.0 + (r - lo) / scale) for l, r in self.intervals)
        prov = dict(self.provenance)
        prov["affine_from_unit"] = [scale, lo]
        prov["kind"] = "explicit"
        return DilationSet(ivs, prov)


# ------------------------------------------------------------------ covering


def covering_number(dset: DilationSet, delta: float) -> int:
    """Exact minimal number of closed length-``delta`` intervals covering E.

    Greedy sweep: place a cover interval at the leftmost uncovered point and
    jump past its right end.  On the line this greedy choice is optimal.
    """
    if delta <= 0:
        raise FracdilError("delta must be positive")
    count = 0
    covered = -math.inf
    for l, r in dset.intervals:
        while covered < r - ENDPOINT_TOL:
            anchor = l if covered < l - ENDPOINT_TOL else covered
            covered = anchor + delta
            count += 1
    return count


def cover_anchors(dset: DilationSet, delta: float) -> np.ndarray:
    """Left endpoints of the greedy minimal delta-cover; each anchor lies in E."""
    if delta <= 0:
        raise FracdilError("delta must be positive")
    anchors = []
    covered = -math.inf
    for l, r in dset.intervals:
        while covered < r - ENDPOINT_TOL:
            anchor = l if covered < l - ENDPOINT_TOL else covered
            anchors.append(anchor)
            covered = anchor + delta
    return np.asarray(anchors)


# --------------------------------------------------------- dimension estimates


@dataclass(frozen=True)
class DimensionEstimate:
    """Box-counting exponent fitted over an explicit scale window."""

    value: float
    scale_range: tuple[float, float]
    fit_residual: float
    counts: tuple[tuple[float, int], ...]


def _check_grid(dset: DilationSet, delta_grid: Sequence[float], minimum: int = 3) -> list[float]:
    grid = sorted(float(d) for d in delta_grid)
    if len(grid) < minimum:
        raise FracdilError(f"need at least {minimum} scales, got {len(grid)}")
    if grid[0] <= 0:
        raise FracdilError("delta must be positive")
    res = dset.resolution()
    if res > 0 and grid[0] < res - ENDPOINT_TOL:
        raise ResolutionError(
            f"resolution exceeded: delta {grid[0]:.3g} below representable scale {res:.3g}"
        )
    return grid


def minkowski_dim_estimate(dset: DilationSet, delta_grid: Sequence[float]) -> DimensionEstimate:
    """Least-squares slope of log N(E, delta) against log(1/delta)."""
    grid = _check_grid(dset, delta_grid)
    counts = [(d, covering_number(dset, d)) for d in grid]
    x = np.log([1.0 / d for d, _ in counts])
    y = np.log([n for _, n in counts])
    if np.allclose(y, y[0]):
        # Constant covering count, e.g. a finite point set at coarse scales:
        # the slope is exactly zero.
        return DimensionEstimate(0.0, (grid[0], grid[-1]), 0.0, tuple(counts))
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return DimensionEstimate(float(slope), (grid[0], grid[-1]), resid, tuple(counts))


def assouad_dim_estimate(
    dset: DilationSet,
    theta: float | None,
    delta_grid: Sequence[float],
    extra_anchors: int = 64,
) -> DimensionEstimate:
    """Sup of localized covering slopes log N(E∩I, δ) / log(|I|/δ).

    Windows I are anchored at interval endpoints plus ``extra_anchors``
    uniformly spaced positions; ``theta`` in [0, 1) fixes |I| = δ^theta
    (Assouad spectrum), ``theta=None`` sweeps window sizes (classical Assouad).
    """
    if theta is not None and not 0.0 <= theta < 1.0:
        raise FracdilError("theta must lie in [0, 1)")
    grid = _check_grid(dset, delta_grid)
    emin, emax = dset.min, dset.max
    endpoint_anchors = [l for l, _ in dset.intervals] + [r for _, r in dset.intervals]

    best = 0.0
    counts: list[tuple[float, int]] = []
    for delta in grid:
        if theta is not None:
            window_sizes = [delta**theta]
        else:
            window_sizes = []
            w = 2.0 * delta
            top = max(dset.diameter, 4.0 * delta)
            while w <= top * (1 + 1e-9):
                window_sizes.append(w)
                w *= 2.0
        counts.append((delta, covering_number(dset, delta)))
        for w in window_sizes:
            if w <= delta * (1 + 1e-9):
                continue
            anchors = list(endpoint_anchors)
            anchors += [a - w for a in endpoint_anchors]
            if emax - emin > 0:
                anchors += list(np.linspace(emin - w / 2, emax - w / 2, extra_anchors))
            # Normalizing by the window's own covering count instead of the
            # raw ratio w/delta cancels the ceiling bias of finite scales.
            denom = math.ceil(w / delta - ENDPOINT_TOL)
            if denom <= 1:
                continue
            for a in anchors:
                piece = dset.intersect_window(a, a + w)
                if piece is None:
                    continue
                n = covering_number(piece, delta)
                if n <= 1:
                    continue
                best = max(best, math.log(n) / math.log(denom))
    return DimensionEstimate(best, (grid[0], grid[-1]), 0.0, tuple(counts))


# ------------------------------------------------------------------- algebra


def _image(dset: DilationSet, fn: Callable[[float], float], op_name: str) -> DilationSet:
    ivs = []
    for l, r in dset.intervals:
        a, b = fn(l), fn(r)
        ivs.append((min(a, b), max(a, b)))
    return DilationSet(
        _merge_intervals(ivs),
        {"kind": "transformed", "op": op_name, "parent": dset.provenance},
    )


def set_transform(dset: DilationSet, op: str, a: float = 1.0, b: float = 0.0) -> DilationSet:
    """Interval-wise image of E under a monotone map.

    ``op`` is one of ``square | sqrt | reciprocal | affine``; ``affine`` maps
    t to a*t + b.  Monotonicity on (0, inf) makes endpoint images exact.
    """
    if op == "square":
        return _image(dset, lambda t: t * t, "square")
    if op == "sqrt":
        if dset.min < 0:
            raise FracdilError("sqrt of a set with negative points")
        return _image(dset, math.sqrt, "sqrt")
    if op == "reciprocal":
        if dset.min <= ENDPOINT_TOL:
            raise FracdilError("reciprocal of a set touching 0")
        return _image(dset, lambda t: 1.0 / t, "reciprocal")
    if op == "affine":
        if a == 0:
            raise FracdilError("affine scale must be nonzero")
        out = _image(dset, lambda t: a * t + b, "affine")
        out.provenance["affine"] = [float(a), float(b)]
        return out
    raise FracdilError(f"unknown transform {op!r}")


def minkowski_sum(e1: DilationSet, e2: DilationSet) -> DilationSet:
    """Pairwise interval sums E1 + E2, merged and sorted."""
    ivs = [(l1 + l2, r1 + r2) for l1, r1 in e1.intervals for l2, r2 in e2.intervals]
    return DilationSet(
        _merge_intervals(ivs),
        {"kind": "transformed", "op": "sum", "parent": [e1.provenance, e2.provenance]},
    )


def harmonic_combine(e1: DilationSet, e2: DilationSet) -> DilationSet:
    """The set { t1 t2 / sqrt(t1^2 + t2^2) : t1 in E1, t2 in E2 }.

    The map is increasing in each coordinate on (0, inf), so each interval
    pair contributes exactly the interval between its corner images.  For
    E1, E2 in [1, 2] the result lies in [1/sqrt 2, sqrt 2].
    """

    def h(t1: float, t2: float) -> float:
        return t1 * t2 / math.hypot(t1, t2)

    ivs = [
        (h(l1, l2), h(r1, r2))
        for l1, r1 in e1.intervals
        for l2, r2 in e2.intervals
    ]
    return DilationSet(
        _merge_intervals(ivs),
        {"kind": "transformed", "op": "harmonic", "parent": [e1.provenance, e2.provenance]},
    )
