"""Bilinear symbols m(xi, eta) on R^d x R^d with decay metadata.

Built-in kinds: ``constant``, ``point_mass`` (modulation, separable),
``admissible_envelope`` (the model symbol (1+|xi|+|eta|)^-a), ``spherical``
(Fourier transform of the normalized surface measure on the unit sphere of
R^{2d}), ``triangle_envelope`` (the nonnegative decay envelope of the triangle
surface measure; its oscillation is out of scope), and ``custom``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._backend import spherical_symbol_values
from .errors import FracdilError

# kernel dispatch codes shared with the compiled backend
KIND_ENVELOPE = 2
KIND_SPHERICAL = 3
KIND_TRIANGLE = 4


def spherical_symbol(d: int, zeta) -> float:
    """Fourier transform of the normalized surface measure on S^{2d-1} at the
    2d-vector zeta; real, radial, equal to 1 at the origin."""
    if d < 1:
        raise FracdilError("d must be positive")
    zeta = np.atleast_1d(np.asarray(zeta, dtype=np.float64))
    if zeta.shape[-1] != 2 * d and zeta.size != 2 * d:
        raise FracdilError(f"zeta must be a {2 * d}-vector")
    radius = float(np.sqrt(np.sum(zeta.reshape(-1) ** 2)))
    return float(spherical_symbol_values(np.array([radius]), d)[0])


def triangle_envelope_symbol(d: int, xi, eta) -> float:
    """Decay envelope of the triangle surface-measure transform at (xi, eta):
    (1 + min(|xi|,|eta|) |sin theta|)^{-(d-2)/2} (1 + |(xi,eta)|)^{-(d-2)/2}."""
    if d < 2:
        raise FracdilError("triangle envelope needs d >= 2")
    xi = np.asarray(xi, dtype=np.float64).reshape(-1)
    eta = np.asarray(eta, dtype=np.float64).reshape(-1)
    nx, ny = float(np.linalg.norm(xi)), float(np.linalg.norm(eta))
    if nx > 0 and ny > 0:
        cos2 = min(1.0, (float(xi @ eta) / (nx * ny)) ** 2)
        sint = math.sqrt(1.0 - cos2)
    else:
        sint = 0.0
    e = 0.5 * (d - 2)
    return (1.0 + min(nx, ny) * sint) ** (-e) * (1.0 + math.hypot(nx, ny)) ** (-e)


@dataclass(frozen=True)
class MultiplierSpec:
    """Symbol descriptor: kind, admissibility order, decay exponent, evaluator.

    ``evaluate(xi, eta)`` is vectorized over leading axes; ``xi``/``eta`` have
    trailing dimension d (or are scalars for d = 1).
    """

    kind: str
    order: int
    decay_a: float
    params: dict = field(default_factory=dict, compare=False)
    evaluator: Callable | None = field(default=None, compare=False)

    # ---------------------------------------------------------- constructors

    @classmethod
    def constant(cls) -> "MultiplierSpec":
        return cls("constant", order=10**6, decay_a=0.0)

    @classmethod
    def point_mass(cls, y0, z0) -> "MultiplierSpec":
        y0 = np.atleast_1d(np.asarray(y0, dtype=np.float64))
        z0 = np.atleast_1d(np.asarray(z0, dtype=np.float64))
        if y0.shape != z0.shape:
            raise FracdilError("point mass positions must share a dimension")
        return cls("point_mass", order=10**6, decay_a=0.0, params={"y0": y0, "z0": z0})

    @classmethod
    def admissible_envelope(cls, a: float) -> "MultiplierSpec":
        if a < 0:
            raise FracdilError("envelope decay must be nonnegative")
        return cls("admissible_envelope", order=10**6, decay_a=float(a), params={"a": float(a)})

    @classmethod
    def spherical(cls, d: int) -> "MultiplierSpec":
        if d < 1:
            raise FracdilError("d must be positive")
        return cls("spherical", order=10**6, decay_a=(2 * d - 1) / 2.0, params={"d": int(d)})

    @classmethod
    def triangle_envelope(cls, d: int) -> "MultiplierSpec":
        if d < 2:
            raise FracdilError("triangle envelope needs d >= 2")
        return cls("triangle_envelope", order=0, decay_a=(d - 2) / 2.0, params={"d": int(d)})

    @classmethod
    def custom(cls, fn: Callable, decay_a: float, order: int = 0) -> "MultiplierSpec":
        return cls("custom", order=int(order), decay_a=float(decay_a), evaluator=fn)

    # -------------------------------------------------------------- behavior

    @property
    def separable(self) -> bool:
        return self.kind in ("constant", "point_mass")

    @property
    def kernel_kind(self) -> int | None:
        return {
            "admissible_envelope": KIND_ENVELOPE,
            "spherical": KIND_SPHERICAL,
            "triangle_envelope": KIND_TRIANGLE,
        }.get(self.kind)

    @property
    def sym_d(self) -> int:
        return int(self.params.get("d", 1))

    def evaluate(self, xi, eta):
        """Pointwise symbol values; xi, eta arrays with trailing dimension d."""
        xi = np.asarray(xi, dtype=np.float64)
        eta = np.asarray(eta, dtype=np.float64)
        if xi.ndim == eta.ndim == 1 and self.kind in ("constant", "admissible_envelope"):
            xi = xi[:, None]
            eta = eta[:, None]
        if self.kind == "constant":
            return np.ones(np.broadcast_shapes(xi.shape[:-1], eta.shape[:-1]), dtype=np.complex128)
        if self.kind == "point_mass":
            y0, z0 = self.params["y0"], self.params["z0"]
            phase = xi @ y0 + eta @ z0
            return np.exp(-2j * np.pi * phase)
        nx = np.sqrt(np.sum(xi * xi, axis=-1))
        ny = np.sqrt(np.sum(eta * eta, axis=-1))
        if self.kind == "admissible_envelope":
            return (1.0 + nx + ny) ** (-self.decay_a) + 0j
        if self.kind == "spherical":
            r = np.sqrt(nx * nx + ny * ny)
            return spherical_symbol_values(np.ascontiguousarray(r.reshape(-1)), self.sym_d).reshape(
                r.shape
            ) + 0j
        if self.kind == "triangle_envelope":
            e = 0.5 * (self.sym_d - 2)
            dot = np.sum(xi * eta, axis=-1)
            denom = nx * ny
            cos2 = np.zeros_like(denom)
            pos = denom > 0
            cos2[pos] = np.minimum(1.0, (dot[pos] / denom[pos]) ** 2)
            sint = np.where(pos, np.sqrt(1.0 - cos2), 0.0)
            return (1.0 + np.minimum(nx, ny) * sint) ** (-e) * (
                1.0 + np.sqrt(nx * nx + ny * ny)
            ) ** (-e) + 0j
        if self.evaluator is None:
            raise FracdilError("custom multiplier needs an evaluator")
        return np.asarray(self.evaluator(xi, eta), dtype=np.complex128)

    def verify_decay_by_sampling(
        self, d: int, rng: np.random.Generator, n_samples: int = 256, const: float = 1.0
    ) -> bool:
        """Check |m| <= const * (1+|xi|+|eta|)^(-decay_a) on random points."""
        xi = rng.normal(scale=16.0, size=(n_samples, d))
        eta = rng.normal(scale=16.0, size=(n_samples, d))
        vals = np.abs(self.evaluate(xi, eta))
        bound = const * (1.0 + np.linalg.norm(xi, axis=-1) + np.linalg.norm(eta, axis=-1)) ** (
            -self.decay_a
        )
        return bool(np.all(vals <= bound + 1e-12))
