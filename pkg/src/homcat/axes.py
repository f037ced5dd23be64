"""Uniform sampling axes for frequency and time grids.

Axes are symmetric descriptors (center, half_width, n_samples) rather than
raw arrays so that grid alignment can be checked exactly. n_samples must be
odd, which guarantees the center (and the origin, for a centered axis) is a
sample point; several operations refuse interpolation and rely on this.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = ["UniformAxis", "FrequencyAxis", "TimeAxis"]


@dataclass(frozen=True)
class UniformAxis:
    center: float
    half_width: float
    n_samples: int

    def __post_init__(self) -> None:
        if not np.isfinite(self.center):
            raise ValidationError("axis center must be finite")
        if not (self.half_width > 0.0 and np.isfinite(self.half_width)):
            raise ValidationError("axis half_width must be positive and finite")
        if self.n_samples < 3:
            raise ValidationError("axis needs at least 3 samples")
        if self.n_samples % 2 == 0:
            raise ValidationError(
                "n_samples must be odd so the axis center is a sample point"
            )

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n_samples - 1)

    @property
    def samples(self) -> np.ndarray:
        # Integer offsets from the middle sample keep the center an exact
        # grid value and make zero-centered axes exactly antisymmetric.
        offsets = np.arange(self.n_samples, dtype=float) - (self.n_samples - 1) // 2
        return self.center + self.spacing * offsets

    def index_of(self, value: float, tol_frac: float = 1e-9) -> int:
        """Index of the sample equal to value; refuses off-grid queries."""
        pos = (value - (self.center - self.half_width)) / self.spacing
        idx = int(round(pos))
        if idx < 0 or idx >= self.n_samples:
            raise ValidationError(
                f"value {value!r} is outside the axis range"
            )
        if abs(pos - idx) > tol_frac:
            raise ValidationError(
                f"value {value!r} is not a grid point (nearest sample offset "
                f"{abs(pos - idx):.3e} of one spacing); interpolation is refused"
            )
        return idx

    def matches(self, other: "UniformAxis", rtol: float = 1e-12) -> bool:
        if self.n_samples != other.n_samples:
            return False
        scale = max(abs(self.half_width), abs(other.half_width))
        return (
            abs(self.center - other.center) <= rtol * max(scale, 1.0)
            and abs(self.half_width - other.half_width) <= rtol * scale
        )


class FrequencyAxis(UniformAxis):
    """Angular-frequency axis in rad/s, relative to the degeneracy origin."""


class TimeAxis(UniformAxis):
    """Time axis in seconds."""
