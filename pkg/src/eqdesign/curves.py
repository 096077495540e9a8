"""Interpolated power curves built from root-finding draws.

Conventions (also recorded in report metadata): the empirical CDF knots
are (n_(i), i / n_draws) over the sorted draws; both the CDF and its
inverse interpolate linearly between knots and clamp outside the finite
knot range.  Censored draws are stored as +inf and excluded from the
knots; they only shrink the reachable probability range.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExtrapolationWarning

__all__ = ["PowerCurve", "AdjustedPowerCurve", "INTERPOLATION_CONVENTION"]

INTERPOLATION_CONVENTION = (
    "empirical CDF knots (n_(i), i/n_draws); linear interpolation between "
    "knots; clamped to the nearest knot outside the finite range"
)


@dataclass(frozen=True)
class PowerCurve:
    """Piecewise-linear approximate power curve F*(n) from sorted draws."""

    sample_sizes: np.ndarray  # sorted ascending; +inf marks censored draws

    def __post_init__(self):
        samp = np.asarray(self.sample_sizes, dtype=float)
        if samp.ndim != 1 or samp.size < 2:
            raise DomainError("power curve requires at least two draws")
        if np.any(np.diff(samp) < 0.0):
            raise DomainError("power curve draws must be sorted ascending")
        object.__setattr__(self, "sample_sizes", samp)

    @property
    def n_draws(self):
        return int(self.sample_sizes.size)

    @property
    def censored_count(self):
        return int(np.sum(np.isinf(self.sample_sizes)))

    @property
    def _finite(self):
        k = self.n_draws - self.censored_count
        return self.sample_sizes[:k]

    @property
    def knot_probabilities(self):
        return np.arange(1, self.n_draws + 1) / self.n_draws

    @property
    def max_probability(self):
        """Largest CDF level reachable through finite draws."""
        return (self.n_draws - self.censored_count) / self.n_draws

    def cdf(self, n):
        """F*(n): interpolated fraction of draws at or below n."""
        finite = self._finite
        probs = self.knot_probabilities[: finite.size]
        return float(np.interp(n, finite, probs))

    def quantile(self, p, clamp=False):
        """F_*(p): interpolated quantile of the draws.

        Outside the finite knot range the quantile is clamped to the
        nearest order statistic; without ``clamp`` that raises instead.
        """
        finite = self._finite
        probs = self.knot_probabilities[: finite.size]
        if p < probs[0] or p > probs[-1]:
            if not clamp:
                raise DomainError(
                    f"probability {p} outside the curve's reachable range "
                    f"[{probs[0]}, {probs[-1]}]"
                )
            warnings.warn(
                f"probability {p} outside the curve knots; clamped to the "
                "nearest order statistic",
                ExtrapolationWarning,
            )
        return float(np.interp(p, probs, finite))

    def knots(self):
        """Finite (n, p) knot pairs, for serialization and plotting."""
        finite = self._finite
        probs = self.knot_probabilities[: finite.size]
        return np.column_stack([finite, probs])


@dataclass(frozen=True)
class AdjustedPowerCurve:
    """Proportionally rescaled curve: inverse is scale * F_*(p).

    Equivalently F~(n) = F*(n / scale); the scale is chosen so the curve
    passes through a given anchor point.
    """

    base: PowerCurve
    scale: float

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale > 0.0):
            raise DomainError("curve scale factor must be positive and finite")

    def cdf(self, n):
        return self.base.cdf(np.asarray(n, dtype=float) / self.scale)

    def quantile(self, p, clamp=False):
        return self.scale * self.base.quantile(p, clamp=clamp)

    def knots(self):
        k = self.base.knots().copy()
        k[:, 0] *= self.scale
        return k
