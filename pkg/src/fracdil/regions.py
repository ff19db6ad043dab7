"""Sufficient and necessary exponent regions as exact rational polygons.

All geometry is done with ``fractions.Fraction``: vertex identities are test
oracles, so no floating point enters membership decisions.  A region is a 2D
convex polygon in reciprocal-exponent coordinates together with facet
open/closed flags, per-vertex inclusion flags, and a rule describing which
third exponents 1/r it certifies at each 2D point.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import AdmissibilityError, FracdilError

Point = tuple[Fraction, Fraction]


def frac(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


class Membership(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY_INCLUDED = "boundary_included"
    BOUNDARY_EXCLUDED = "boundary_excluded"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class ExponentTriple:
    """Reciprocal exponents (1/p, 1/q, 1/r); 1/r may be None for 2D queries."""

    inv_p: Fraction
    inv_q: Fraction
    inv_r: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "inv_p", frac(self.inv_p))
        object.__setattr__(self, "inv_q", frac(self.inv_q))
        if self.inv_r is not None:
            object.__setattr__(self, "inv_r", frac(self.inv_r))
            if self.inv_r < 0:
                raise FracdilError("1/r must be nonnegative")


# ------------------------------------------------------------ exact geometry


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Point]) -> tuple[Point, ...]:
    """Monotone-chain hull, counterclockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) == 1:
        return tuple(pts)
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return tuple(lower[:-1] + upper[:-1])


def clip_to_unit_square(poly: Sequence[Point]) -> tuple[Point, ...]:
    """Sutherland-Hodgman clip of a convex CCW polygon to [0,1]^2, exact."""
    zero, one = Fraction(0), Fraction(1)
    half_planes = [  # (coefficient vector (a, b), bound c) for a*x + b*y <= c
        ((one, zero), one),
        ((-one, zero), zero),
        ((zero, one), one),
        ((zero, -one), zero),
    ]
    out = list(poly)
    for (a, b), c in half_planes:
        if not out:
            break
        nxt: list[Point] = []
        m = len(out)
        for i in range(m):
            p, q = out[i], out[(i + 1) % m]
            fp = a * p[0] + b * p[1] - c
            fq = a * q[0] + b * q[1] - c
            if fp <= 0:
                nxt.append(p)
            if (fp < 0 < fq) or (fq < 0 < fp):
                t = fp / (fp - fq)
                nxt.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
        out = nxt
    return convex_hull(out)


class _Where(enum.Enum):
    INSIDE = 0
    EDGE = 1
    VERTEX = 2
    OUTSIDE = 3


def _locate(poly: Sequence[Point], pt: Point) -> tuple[_Where, int]:
    """Locate pt relative to a convex CCW polygon; index is the edge/vertex hit."""
    m = len(poly)
    if m == 1:
        return (_Where.VERTEX, 0) if pt == poly[0] else (_Where.OUTSIDE, -1)
    if m == 2:
        a, b = poly
        if _cross(a, b, pt) != 0:
            return (_Where.OUTSIDE, -1)
        lo, hi = sorted([a, b])
        if pt == a:
            return (_Where.VERTEX, 0)
        if pt == b:
            return (_Where.VERTEX, 1)
        if lo <= pt <= hi:
            return (_Where.EDGE, 0)
        return (_Where.OUTSIDE, -1)
    on_edge = -1
    for i in range(m):
        a, b = poly[i], poly[(i + 1) % m]
        c = _cross(a, b, pt)
        if c < 0:
            return (_Where.OUTSIDE, -1)
        if c == 0:
            if pt == a:
                return (_Where.VERTEX, i)
            if pt == b:
                return (_Where.VERTEX, (i + 1) % m)
            lo, hi = sorted([a, b])
            if lo <= pt <= hi:
                on_edge = i
    if on_edge >= 0:
        return (_Where.EDGE, on_edge)
    return (_Where.INSIDE, -1)


# ------------------------------------------------------------------- regions


@dataclass(frozen=True)
class Facet:
    tail: int
    head: int
    closed: bool


@dataclass(frozen=True)
class ExponentRegion:
    """Convex 2D region with inclusion flags plus a 1/r certification rule.

    ``r_rule`` is one of:
      * ``holder``     -- certifies 1/r = 1/p + 1/q only (multi-scale regions);
      * ``fixed_half`` -- certifies 1/r = 1/2 only (L^2-target regions);
      * ``lifted``     -- certifies 1/r in [1/2, 1/p + 1/q] where 1/p + 1/q > 1;
      * ``plane``      -- the 2D coordinates are already (1/p, 1/r).
    """

    label: str
    vertices: tuple[Point, ...]
    facets: tuple[Facet, ...]
    vertex_included: tuple[bool, ...]
    params: dict = field(compare=False)
    r_rule: str = "holder"
    # hull used for membership when the stored polygon was clipped
    membership_hull: tuple[Point, ...] | None = None

    def __post_init__(self):
        for x, y in self.vertices:
            if not (0 <= x <= 1 and 0 <= y <= 1):
                raise FracdilError("region vertices must lie in the unit square")

    # -------------------------------------------------------------- geometry

    def _classify_2d(self, pt: Point) -> Membership:
        if not (0 <= pt[0] <= 1 and 0 <= pt[1] <= 1):
            return Membership.OUTSIDE
        hull = self.membership_hull or self.vertices
        where, idx = _locate(hull, pt)
        if where is _Where.OUTSIDE:
            return Membership.OUTSIDE
        if where is _Where.INSIDE:
            if self.membership_hull is not None and (
                pt[0] in (Fraction(0), Fraction(1)) or pt[1] in (Fraction(0), Fraction(1))
            ):
                # interior of the unclipped hull but on the unit-square edge
                return Membership.BOUNDARY_INCLUDED
            return Membership.INTERIOR
        if self.membership_hull is not None:
            # boundary of the generating hull is open except on the axes
            if pt[0] == 0 or pt[1] == 0:
                return self._axis_class(pt)
            return Membership.BOUNDARY_EXCLUDED
        if where is _Where.VERTEX:
            v = hull[idx]
            j = self.vertices.index(v) if v in self.vertices else -1
            if j >= 0 and self.vertex_included[j]:
                return Membership.BOUNDARY_INCLUDED
            return Membership.BOUNDARY_EXCLUDED
        closed = False
        for f in self.facets:
            a, b = self.vertices[f.tail], self.vertices[f.head]
            if {a, b} == {hull[idx], hull[(idx + 1) % len(hull)]}:
                closed = f.closed
                break
        return Membership.BOUNDARY_INCLUDED if closed else Membership.BOUNDARY_EXCLUDED

    def _axis_class(self, pt: Point) -> Membership:
        # Multi-scale regions: open axis segments plus the origin.
        if pt == (Fraction(0), Fraction(0)):
            return Membership.BOUNDARY_INCLUDED
        if pt[0] == 0 or pt[1] == 0:
            hull = self.membership_hull or self.vertices
            where, _ = _locate(hull, pt)
            if where is _Where.OUTSIDE:
                return Membership.OUTSIDE
            if pt in ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))):
                return Membership.BOUNDARY_EXCLUDED
            return Membership.BOUNDARY_INCLUDED
        return Membership.BOUNDARY_EXCLUDED

    def r_interval(self, inv_p, inv_q) -> tuple[Fraction, Fraction]:
        """Closure of the certified 1/r range above a 2D point."""
        s = frac(inv_p) + frac(inv_q)
        if self.r_rule == "holder":
            return (s, s)
        if self.r_rule == "fixed_half":
            return (Fraction(1, 2), Fraction(1, 2))
        if self.r_rule == "lifted":
            return (Fraction(1, 2), max(Fraction(1, 2), s))
        raise FracdilError(f"r_interval undefined for rule {self.r_rule!r}")

    def sum_ceiling(self) -> Fraction:
        """Largest 1/p + 1/q over the stored polygon (attained on a vertex)."""
        return max(x + y for x, y in self.vertices)

    # ------------------------------------------------------------------ I/O

    def to_jsonable(self) -> dict:
        return {
            "label": self.label,
            "params": {k: str(v) for k, v in self.params.items()},
            "vertices": [[str(x), str(y)] for x, y in self.vertices],
            "facets": [
                {"from": f.tail, "to": f.head, "closed": f.closed} for f in self.facets
            ],
            "vertex_included": list(self.vertex_included),
            "r_rule": self.r_rule,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["x", "y", "included"])
        for (x, y), inc in zip(self.vertices, self.vertex_included):
            w.writerow([float(x), float(y), int(inc)])
        return buf.getvalue()


def _build_region(
    label: str,
    points: Sequence[Point],
    params: dict,
    r_rule: str,
    closed_edges: str = "none",  # "none" | "axes" | "lower_holder" | "all"
    included_vertices: Sequence[Point] = (),
) -> ExponentRegion:
    hull = convex_hull(points)
    clipped = None
    if any(not (0 <= x <= 1 and 0 <= y <= 1) for x, y in hull):
        clipped = clip_to_unit_square(hull)
    verts = clipped if clipped is not None else hull
    facets = []
    m = len(verts)
    for i in range(m if m > 2 else m - 1):
        a, b = verts[i], verts[(i + 1) % m]
        if closed_edges == "all":
            closed = True
        elif closed_edges == "axes":
            closed = (a[0] == 0 and b[0] == 0) or (a[1] == 0 and b[1] == 0)
        elif closed_edges == "lower_holder":
            closed = a[0] + a[1] == b[0] + b[1] == min(x + y for x, y in verts)
        else:
            closed = False
        facets.append(Facet(i, (i + 1) % m, closed))
    inc = []
    for v in verts:
        if closed_edges == "all":
            inc.append(True)
        elif v in included_vertices:
            inc.append(True)
        elif clipped is not None:
            where, _ = _locate(hull, v)
            inc.append(where is _Where.INSIDE)
        else:
            inc.append(False)
    return ExponentRegion(
        label=label,
        vertices=verts,
        facets=tuple(facets),
        vertex_included=tuple(inc),
        params=params,
        r_rule=r_rule,
        membership_hull=hull if clipped is not None else None,
    )


# ----------------------------------------------------------- region builders


def sufficient_region_multiscale(d: int, a, beta) -> ExponentRegion:
    """Multi-scale sufficiency region on the Holder plane.

    Convex closure of (1,0), (0,0), (0,1), (1/2, c), (c, 1/2) with
    c = (2a - beta)/(2d); interior plus the open axis segments plus the
    origin are certified, with 1/r = 1/p + 1/q.
    """
    a, beta = frac(a), frac(beta)
    if d < 1:
        raise FracdilError("d must be a positive integer")
    if 2 * a <= d + beta:
        raise AdmissibilityError("admissibility insufficient: need 2a > d + beta")
    c = (2 * a - beta) / (2 * d)
    zero, one, half = Fraction(0), Fraction(1), Fraction(1, 2)
    pts = [(one, zero), (zero, zero), (zero, one), (half, c), (c, half)]
    return _build_region(
        "sufficient_multiscale",
        pts,
        {"d": d, "a": a, "beta": beta},
        r_rule="holder",
        closed_edges="axes",
        included_vertices=[(zero, zero)],
    )


def sufficient_region_singlescale_L2(
    d: int, a, beta, closed_endpoint: bool = False
) -> ExponentRegion:
    """Single-scale region with L^2 target.

    For a <= d + beta/2: interior of the hull of (1/2,0), (0,1/2), (c,1/2),
    (1/2,c) with c = (2a-beta)/(2d), plus the closed segment between (1/2,0)
    and (0,1/2).  For a > d + beta/2: {1/p + 1/q < 3/2} within the open unit
    square.  ``closed_endpoint=True`` (singleton dilation sets, where the
    endpoint Sobolev bound holds) closes every facet and admits 2a = d + beta.
    """
    a, beta = frac(a), frac(beta)
    if d < 1:
        raise FracdilError("d must be a positive integer")
    gap = 2 * a - (d + beta)
    if gap < 0 or (gap == 0 and not closed_endpoint):
        raise AdmissibilityError("admissibility insufficient: need 2a > d + beta")
    zero, one, half = Fraction(0), Fraction(1), Fraction(1, 2)
    params = {"d": d, "a": a, "beta": beta}
    if 2 * a > 2 * d + beta:
        pts = [
            (zero, zero),
            (one, zero),
            (one, half),
            (half, one),
            (zero, one),
        ]
        return _build_region(
            "sufficient_singlescale_L2",
            pts,
            params,
            r_rule="fixed_half",
            closed_edges="all" if closed_endpoint else "none",
        )
    c = (2 * a - beta) / (2 * d)
    pts = [(half, zero), (zero, half), (c, half), (half, c)]
    return _build_region(
        "sufficient_singlescale_L2",
        pts,
        params,
        r_rule="fixed_half",
        closed_edges="all" if closed_endpoint else "lower_holder",
        included_vertices=[(half, zero), (zero, half)],
    )


def necessary_bound(d: int, inv_r, beta, gamma) -> Fraction:
    """Ceiling on 1/p + 1/q from the three necessary conditions.

    Returns 1 + min of the three branch values; exact rationals throughout.
    The middle branch evaluated literally at beta = 0 (gamma > 0) collapses
    to d/r, and at beta = gamma = 0 only the outer branches apply.
    """
    inv_r, beta, gamma = frac(inv_r), frac(beta), frac(gamma)
    if d < 1:
        raise FracdilError("d must be a positive integer")
    if inv_r < 0:
        raise FracdilError("1/r must be nonnegative")
    if not (0 <= beta <= 1 and gamma <= 1):
        raise FracdilError("need 0 <= beta <= gamma <= 1")
    if gamma < beta:
        raise FracdilError("Assouad below Minkowski: need gamma >= beta")
    branches = [
        Fraction(d - 1, d) + (1 - beta) * inv_r / d,
        d * inv_r,
    ]
    den = beta * (d - 1) + 2 * gamma
    if den > 0:
        branches.append(
            beta * (d - 1) / den + ((d - beta) * 2 * gamma - (d - 1) * beta) * inv_r / den
        )
    return 1 + min(branches)


def linear_region_Q(d: int, beta, gamma) -> ExponentRegion:
    """Closed region for the linear maximal operator in (1/p, 1/r) coordinates.

    Convex hull of Q1 = (0,0), Q2(beta), Q3(beta), Q4(gamma); all facets
    closed.
    """
    beta, gamma = frac(beta), frac(gamma)
    if d < 2:
        raise FracdilError("linear region needs d >= 2")
    if not (0 <= beta <= gamma <= 1):
        raise FracdilError("need 0 <= beta <= gamma <= 1")
    q1 = (Fraction(0), Fraction(0))
    q2 = (Fraction(d - 1) / (d - 1 + beta), Fraction(d - 1) / (d - 1 + beta))
    q3 = ((d - beta) / (d - beta + 1), Fraction(1) / (d - beta + 1))
    q4 = (Fraction(d * (d - 1)) / (d * d + 2 * gamma - 1), Fraction(d - 1) / (d * d + 2 * gamma - 1))
    return _build_region(
        "linear_Q",
        [q1, q2, q3, q4],
        {"d": d, "beta": beta, "gamma": gamma},
        r_rule="plane",
        closed_edges="all",
    )


def lift_to_holder(region: ExponentRegion) -> ExponentRegion:
    """Extend an L^2-target region down to Holder targets.

    Each certified (1/p, 1/q) with 1/p + 1/q > 1 gains the closed 1/r segment
    [1/2, 1/p + 1/q]; points at or below the Holder line keep 1/r = 1/2 only.
    """
    if region.r_rule != "fixed_half":
        raise FracdilError("lift_to_holder expects a single-scale L2 region")
    return ExponentRegion(
        label="lifted_holder",
        vertices=region.vertices,
        facets=region.facets,
        vertex_included=region.vertex_included,
        params=dict(region.params),
        r_rule="lifted",
        membership_hull=region.membership_hull,
    )


def region_membership(region: ExponentRegion, point: ExponentTriple) -> Membership:
    """Exact membership with facet-flag awareness.

    2D queries (``inv_r`` None) classify against the polygon alone; triples
    additionally apply the region's 1/r rule.
    """
    pt = (point.inv_p, point.inv_q)
    cls2 = region._classify_2d(pt)
    if point.inv_r is None or region.r_rule == "plane":
        return cls2
    if cls2 is Membership.OUTSIDE:
        return Membership.OUTSIDE
    s = point.inv_p + point.inv_q
    if region.r_rule == "holder":
        return cls2 if point.inv_r == s else Membership.OUTSIDE
    if region.r_rule == "fixed_half":
        return cls2 if point.inv_r == Fraction(1, 2) else Membership.OUTSIDE
    # lifted rule
    if point.inv_r == Fraction(1, 2):
        return cls2
    if point.inv_r < Fraction(1, 2):
        return Membership.OUTSIDE
    if s < 1:
        return Membership.OUTSIDE
    if s == 1:
        return Membership.BOUNDARY_EXCLUDED if point.inv_r <= s else Membership.OUTSIDE
    if point.inv_r > s:
        return Membership.OUTSIDE
    if cls2 is Membership.INTERIOR:
        return Membership.INTERIOR if point.inv_r < s else Membership.BOUNDARY_INCLUDED
    return cls2


def region_gap(d: int, a, beta, gamma, inv_r) -> tuple[Fraction, Fraction]:
    """(largest certified Holder sum, necessary ceiling) at fixed 1/r.

    The sufficient side is the multi-scale sum ceiling min(2, 1/2 + c),
    c = (2a - beta)/(2d), capped by max(1, 1/r): sums above 1 are only
    certified on the Holder tie 1/r = 1/p + 1/q <= inv_r, while the Banach
    bounds reach every sum below 1.  The degenerate boundary 2a = d + beta
    (ceiling exactly 1) is admitted here even though the open region is empty.
    Raises if the sufficient value exceeds the necessary ceiling.
    """
    a, beta, inv_r = frac(a), frac(beta), frac(inv_r)
    if d < 1:
        raise FracdilError("d must be a positive integer")
    if 2 * a < d + beta:
        raise AdmissibilityError("admissibility insufficient: need 2a >= d + beta")
    ceiling = min(Fraction(2), Fraction(1, 2) + (2 * a - beta) / (2 * d))
    sufficient = min(ceiling, max(Fraction(1), inv_r))
    necessary = necessary_bound(d, inv_r, beta, gamma)
    if sufficient > necessary:
        raise FracdilError(
            f"sufficient sum {sufficient} exceeds necessary ceiling {necessary}"
        )
    return sufficient, necessary
