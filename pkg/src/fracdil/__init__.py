"""Numerical laboratory for bilinear multiplier averages over fractal dilation
sets: exact set geometry and exponent regions, FFT-based operator evaluation,
scaling experiments, and sparse domination checks."""

from .fractal import (
    DilationSet,
    DimensionEstimate,
    assouad_dim_estimate,
    cover_anchors,
    covering_number,
    harmonic_combine,
    minkowski_dim_estimate,
    minkowski_sum,
    set_transform,
)

__version__ = "0.1.0"

__all__ = [
    "DilationSet",
    "DimensionEstimate",
    "assouad_dim_estimate",
    "cover_anchors",
    "covering_number",
    "harmonic_combine",
    "minkowski_dim_estimate",
    "minkowski_sum",
    "set_transform",
    "__version__",
]
