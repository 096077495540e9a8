"""Delta-method asymptotics for the comparison parameter.

Produces the constants of the large-sample theory: the limiting
posterior variance factor I(theta0)^-1, the dispersion constant A^2
(asymptotic variance of sqrt(n) * (I(theta_hat)^-1/2 - I(theta0)^-1/2)),
and the limiting normal estimate of the sufficient-sample-size
distribution for an explicit target length and coverage.

All gradients are numeric central differences on the natural parameter
scale, so new characteristics are drop-in.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConfigurationError, DegeneracyError, DomainError
from .families import theta_value
from .numdiff import central_gradient

__all__ = [
    "ThetaAsymptotics",
    "SssdEstimate",
    "ProbitModel",
    "STAGE_LIMITING",
    "STAGE_PRIOR_ADJUSTED",
    "CLASS_1A",
    "CLASS_1B",
    "CLASS_2A",
    "CLASS_2B",
    "CLASS_3",
    "CLASS_UNCLASSIFIED",
    "block_inv_fisher",
    "theta_variance",
    "inv_fisher_theta",
    "a_squared",
    "limiting_sssd",
    "heteroscedasticity_ratio",
    "normal_quantile",
    "probable_domain",
]

STAGE_LIMITING = "limiting"
STAGE_PRIOR_ADJUSTED = "prior_adjusted"

CLASS_1A = "1a"
CLASS_1B = "1b"
CLASS_2A = "2a"
CLASS_2B = "2b"
CLASS_3 = "3"
CLASS_UNCLASSIFIED = "unclassified"

# Numeric gradients never yield exact zeros; treat A^2 below this relative
# floor as exactly degenerate.
_DEGENERACY_REL_FLOOR = 1e-12


def normal_quantile(p):
    """Standard normal quantile, shared by every module that needs z-values."""
    return float(special.ndtri(p))


@dataclass(frozen=True)
class ThetaAsymptotics:
    """Limiting constants for the comparison parameter at the design values."""

    theta0: float
    inv_fisher_theta: float
    a_squared: float


@dataclass(frozen=True)
class ProbitModel:
    """Success-probability line on the probit scale: Phi(beta0 + beta1 * n)."""

    beta0: float
    beta1: float
    sigma_eps: float

    def __post_init__(self):
        if self.beta1 <= 0.0:
            raise DomainError("probit slope must be positive")

    @property
    def implied_mean(self):
        return -self.beta0 / self.beta1

    @property
    def implied_sd(self):
        return self.sigma_eps / self.beta1


@dataclass(frozen=True)
class SssdEstimate:
    """Normal summary of the sufficient-sample-size distribution."""

    mu_l: float
    sigma_l: float
    l: float
    alpha: float
    stage: str = STAGE_LIMITING
    classification: str = CLASS_UNCLASSIFIED

    @property
    def probable_domain(self):
        return (self.mu_l - 3.0 * self.sigma_l, self.mu_l + 3.0 * self.sigma_l)


def probable_domain(mu, sigma):
    return (mu - 3.0 * sigma, mu + 3.0 * sigma)


def block_inv_fisher(design, eta1, eta2):
    """blockdiag(I(eta1)^-1, I(eta2)^-1 / q): joint MLE covariance factor."""
    fam = design.family
    try:
        inv1 = np.linalg.inv(fam.fisher_information(np.asarray(eta1, dtype=float)))
        inv2 = np.linalg.inv(fam.fisher_information(np.asarray(eta2, dtype=float)))
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError("singular per-group Fisher information") from exc
    d = design.d
    block = np.zeros((2 * d, 2 * d))
    block[:d, :d] = inv1
    block[d:, d:] = inv2 / design.q
    return block


def _theta_gradient(design, eta):
    d = design.d
    return central_gradient(
        lambda pts: theta_value(design, pts[:, :d], pts[:, d:]), eta
    )


def theta_variance(design, eta1, eta2):
    """Delta-method variance of theta_hat at arbitrary parameter values.

    This is I(theta)^-1 evaluated with (eta1, eta2) treated as fixed
    design values; used both at the true design values and per QMC draw.
    """
    eta = np.concatenate([np.asarray(eta1, dtype=float), np.asarray(eta2, dtype=float)])
    grad = _theta_gradient(design, eta)
    if not np.all(np.isfinite(grad)):
        raise ConfigurationError("comparison map gradient is not finite")
    return float(grad @ block_inv_fisher(design, eta1, eta2) @ grad)


def inv_fisher_theta(design):
    """I(theta0)^-1 at the design values; must be positive for a usable design."""
    v = theta_variance(design, design.eta1_array, design.eta2_array)
    if not (np.isfinite(v) and v > 0.0):
        raise DegeneracyError(
            "limiting variance of the comparison parameter is not positive"
        )
    return v


def a_squared(design):
    """Delta-method variance of I(theta)^-1/2 over the joint MLE limit.

    Values below a relative floor are snapped to exactly zero: that is
    the degenerate case where the limiting SSSD has zero spread.
    """
    d = design.d
    eta0 = np.concatenate([design.eta1_array, design.eta2_array])

    def sqrt_variance(pts):
        pts = np.atleast_2d(pts)
        return np.array(
            [math.sqrt(theta_variance(design, p[:d], p[d:])) for p in pts]
        )

    grad = central_gradient(sqrt_variance, eta0)
    value = float(grad @ block_inv_fisher(design, design.eta1_array, design.eta2_array) @ grad)
    v0 = inv_fisher_theta(design)
    if value < _DEGENERACY_REL_FLOOR * v0 * v0:
        return 0.0
    return value


def theta_asymptotics(design):
    return ThetaAsymptotics(
        theta0=design.theta0,
        inv_fisher_theta=inv_fisher_theta(design),
        a_squared=a_squared(design),
    )


def limiting_sssd(design, l, alpha):
    """Limiting normal SSSD for an explicit target length and coverage."""
    if not (np.isfinite(l) and l > 0.0):
        raise DomainError("target HDI length l must be positive", field="l")
    if not 0.0 < alpha < 1.0:
        raise DomainError("coverage complement alpha must lie in (0, 1)", field="alpha")
    v0 = inv_fisher_theta(design)
    a2 = a_squared(design)
    z = normal_quantile(1.0 - alpha / 2.0)
    mu_l = 4.0 * z * z * v0 / (l * l)
    sigma_l = 4.0 * z * math.sqrt(a2) / l
    classification = CLASS_1B if a2 == 0.0 else CLASS_UNCLASSIFIED
    return SssdEstimate(
        mu_l=mu_l,
        sigma_l=sigma_l,
        l=l,
        alpha=alpha,
        stage=STAGE_LIMITING,
        classification=classification,
    )


def heteroscedasticity_ratio(mu_l, a):
    """Quotient comparing the SSSD spread implied at n = mu_l + a to the
    one at mu_l; tends to 2 as mu_l grows, exactly 2 at a = 0."""
    if not (mu_l > 0.0 and mu_l + a > 0.0):
        raise DomainError("heteroscedasticity ratio requires mu_l > 0 and mu_l + a > 0")
    if a == 0.0:
        return 2.0  # removable singularity
    r = a / mu_l
    return float((1.0 - 1.0 / (1.0 + r)) / (1.0 - 1.0 / math.sqrt(1.0 + r)))
