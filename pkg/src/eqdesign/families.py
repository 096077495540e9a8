"""Model families, characteristics, and design specifications.

Two response families are supported: gamma (shape/rate) and Bernoulli.
Each family exposes density, log-likelihood, CDF, inverse CDF, MLE,
Fisher information, and a componentwise transform onto unconstrained
reals (log for gamma, logit for Bernoulli) together with its inverse.

Characteristics map a parameter vector to the scalar being compared
(tail probability above a threshold, mean, or a raw parameter), and a
comparison combines the two groups' characteristics into the single
parameter the test is about (difference, ratio, or log-ratio).

Regularity notes (why the asymptotic machinery applies to the shipped
families): both families have common support independent of the
parameters, densities smooth in the parameters with finite third
derivatives dominated near any interior point, and positive finite
Fisher information on the open parameter space (gamma: shape, rate > 0;
Bernoulli: 0 < theta < 1).  Boundary parameters are rejected up front.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import (
    BoundaryMleError,
    ConfigurationError,
    DegenerateSampleError,
    DomainError,
    OptimizationError,
)
from .numdiff import central_gradient

__all__ = [
    "GammaFamily",
    "BernoulliFamily",
    "GAMMA",
    "BERNOULLI",
    "FAMILIES",
    "CharacteristicSpec",
    "DesignSpec",
    "characteristic_value",
    "comparison_value",
    "theta_value",
    "fisher_information",
    "mle",
    "inverse_cdf",
]


class GammaFamily:
    """Gamma model with shape/rate parameterisation, eta = (shape, rate)."""

    kind = "gamma"
    param_count = 2

    def check_params(self, eta):
        eta = np.asarray(eta, dtype=float)
        if eta.shape != (2,) or not np.all(np.isfinite(eta)) or np.any(eta <= 0.0):
            raise DomainError(
                f"gamma parameters (shape, rate) must be finite and positive, got {eta!r}"
            )
        return eta

    def support_contains(self, y):
        return np.all(np.asarray(y) > 0.0)

    def logpdf(self, y, eta):
        a, b = eta
        y = np.asarray(y, dtype=float)
        return a * np.log(b) - special.gammaln(a) + (a - 1.0) * np.log(y) - b * y

    def log_likelihood(self, sample, eta):
        return float(np.sum(self.logpdf(sample, eta)))

    def cdf(self, y, eta):
        a, b = np.asarray(eta, dtype=float).T if np.ndim(eta) == 2 else eta
        return special.gammainc(a, b * np.asarray(y, dtype=float))

    def survival(self, y, eta):
        if np.ndim(eta) == 2:
            a, b = eta[..., 0], eta[..., 1]
        else:
            a, b = eta
        return special.gammaincc(a, b * np.asarray(y, dtype=float))

    def inverse_cdf(self, u, eta):
        a, b = eta
        u = np.asarray(u, dtype=float)
        y = special.gammaincinv(a, u) / b
        # One-sided polish: the generalized inverse must satisfy F(y) <= u,
        # which a last-ulp overshoot of the numeric inverse can break.
        y = np.atleast_1d(y)
        over = special.gammainc(a, b * y) > u
        while np.any(over):
            y[over] = np.nextafter(y[over], 0.0)
            over = special.gammainc(a, b * y) > np.asarray(u)
        return y if np.ndim(u) else float(y[0])

    def mle(self, sample):
        """Profile-likelihood MLE: safeguarded Newton on log-shape, rate = shape/mean."""
        y = np.asarray(sample, dtype=float)
        ybar = float(np.mean(y))
        s = float(np.log(ybar) - np.mean(np.log(y)))
        if s <= 0.0:
            # log ybar == mean(log y) iff all observations are equal
            raise DegenerateSampleError("gamma MLE undefined for a zero-variance sample")
        var = float(np.var(y))
        a = max(ybar * ybar / var, 1e-8)  # method-of-moments start
        t = np.log(a)
        for _ in range(100):
            a = np.exp(t)
            score = np.log(a) - special.digamma(a) - s
            if abs(score) < 1e-12:
                break
            dscore = 1.0 - a * special.polygamma(1, a)  # d score / d log-shape, < 0
            step = -score / dscore
            # Safeguard: cap the log-scale step to keep the iteration stable
            step = float(np.clip(step, -2.0, 2.0))
            t += step
        else:
            raise OptimizationError("gamma MLE did not converge in 100 iterations")
        a = float(np.exp(t))
        return np.array([a, a / ybar])

    def fisher_information(self, eta):
        a, b = eta
        return np.array([[special.polygamma(1, a), -1.0 / b], [-1.0 / b, a / b**2]])

    def transform(self, eta):
        return np.log(np.asarray(eta, dtype=float))

    def inverse_transform(self, t):
        return np.exp(np.asarray(t, dtype=float))

    def transform_jacobian_diag(self, eta):
        """Diagonal of dT/d eta for the componentwise log transform."""
        return 1.0 / np.asarray(eta, dtype=float)

    def sample(self, rng, eta, size):
        a, b = eta
        return rng.gamma(shape=a, scale=1.0 / b, size=size)

    def mean(self, eta):
        if np.ndim(eta) == 2:
            return eta[..., 0] / eta[..., 1]
        return eta[0] / eta[1]

    def threshold_in_support(self, kappa):
        return kappa >= 0.0


class BernoulliFamily:
    """Bernoulli model, eta = (theta,) with 0 < theta < 1."""

    kind = "bernoulli"
    param_count = 1

    def check_params(self, eta):
        eta = np.asarray(eta, dtype=float)
        if eta.shape != (1,) or not np.all(np.isfinite(eta)) or not (0.0 < eta[0] < 1.0):
            raise DomainError(f"bernoulli parameter must lie strictly in (0, 1), got {eta!r}")
        return eta

    def support_contains(self, y):
        y = np.asarray(y)
        return np.all((y == 0) | (y == 1))

    def logpdf(self, y, eta):
        th = eta[0]
        y = np.asarray(y, dtype=float)
        return y * np.log(th) + (1.0 - y) * np.log1p(-th)

    def log_likelihood(self, sample, eta):
        return float(np.sum(self.logpdf(sample, eta)))

    def cdf(self, y, eta):
        th = eta[..., 0] if np.ndim(eta) == 2 else eta[0]
        y = np.asarray(y, dtype=float)
        return np.where(y < 0.0, 0.0, np.where(y < 1.0, 1.0 - th, 1.0))

    def survival(self, y, eta):
        th = eta[..., 0] if np.ndim(eta) == 2 else eta[0]
        y = np.asarray(y, dtype=float)
        return np.where(y < 0.0, 1.0, np.where(y < 1.0, th + 0.0 * y, 0.0))

    def inverse_cdf(self, u, eta):
        th = eta[0]
        u = np.asarray(u, dtype=float)
        out = np.where(u <= 1.0 - th, 0.0, 1.0)
        return out if np.ndim(u) else float(out)

    def mle(self, sample):
        y = np.asarray(sample, dtype=float)
        p = float(np.mean(y))
        if p <= 0.0 or p >= 1.0:
            raise BoundaryMleError("bernoulli MLE on the boundary (all-0 or all-1 sample)")
        return np.array([p])

    def fisher_information(self, eta):
        th = eta[0]
        return np.array([[1.0 / (th * (1.0 - th))]])

    def transform(self, eta):
        eta = np.asarray(eta, dtype=float)
        return np.log(eta) - np.log1p(-eta)

    def inverse_transform(self, t):
        return special.expit(np.asarray(t, dtype=float))

    def transform_jacobian_diag(self, eta):
        th = np.asarray(eta, dtype=float)
        return 1.0 / (th * (1.0 - th))

    def sample(self, rng, eta, size):
        return (rng.random(size) < eta[0]).astype(float)

    def mean(self, eta):
        return eta[..., 0] if np.ndim(eta) == 2 else eta[0]

    def threshold_in_support(self, kappa):
        return 0.0 <= kappa < 1.0


GAMMA = GammaFamily()
BERNOULLI = BernoulliFamily()
FAMILIES = {"gamma": GAMMA, "bernoulli": BERNOULLI}

_CHARACTERISTIC_KINDS = ("tail_probability", "mean", "raw_parameter")
_COMPARISONS = ("difference", "ratio", "log_ratio")


@dataclass(frozen=True)
class CharacteristicSpec:
    """What scalar is compared between groups, and how.

    kind: "tail_probability" (requires ``threshold``), "mean", or
    "raw_parameter" (requires ``index``).
    comparison: "difference", "ratio", or "log_ratio".
    """

    kind: str
    comparison: str
    threshold: float | None = None
    index: int | None = None

    def __post_init__(self):
        if self.kind not in _CHARACTERISTIC_KINDS:
            raise ConfigurationError(
                f"unknown characteristic kind {self.kind!r}", field="characteristic.kind"
            )
        if self.comparison not in _COMPARISONS:
            raise ConfigurationError(
                f"unknown comparison {self.comparison!r}", field="characteristic.comparison"
            )
        if self.kind == "tail_probability" and self.threshold is None:
            raise ConfigurationError(
                "tail_probability characteristic requires a threshold",
                field="characteristic.threshold",
            )
        if self.kind == "raw_parameter" and self.index is None:
            raise ConfigurationError(
                "raw_parameter characteristic requires an index",
                field="characteristic.index",
            )


def characteristic_value(family, eta, characteristic):
    """Evaluate g(eta): the scalar characteristic for one group.

    Accepts a single parameter vector of shape (d,) or a batch (m, d).
    """
    eta = np.asarray(eta, dtype=float)
    batched = eta.ndim == 2
    if not batched:
        family.check_params(eta)
    if characteristic.kind == "tail_probability":
        kappa = characteristic.threshold
        if not family.threshold_in_support(kappa):
            raise DomainError(
                f"threshold {kappa} outside the support of the {family.kind} family",
                field="characteristic.threshold",
            )
        return family.survival(kappa, eta)
    if characteristic.kind == "mean":
        return family.mean(eta)
    idx = characteristic.index
    if not 0 <= idx < family.param_count:
        raise DomainError(
            f"raw_parameter index {idx} out of range for {family.kind}",
            field="characteristic.index",
        )
    return eta[..., idx] if batched else eta[idx]


def comparison_value(characteristic, theta1, theta2):
    """Combine the two groups' characteristics: h(theta1, theta2)."""
    if characteristic.comparison == "difference":
        return theta1 - theta2
    if characteristic.comparison == "ratio":
        return theta1 / theta2
    return np.log(theta1) - np.log(theta2)


def theta_value(design, eta1, eta2):
    """theta = h(g(eta1), g(eta2)); supports batches of shape (m, d)."""
    t1 = characteristic_value(design.family, eta1, design.characteristic)
    t2 = characteristic_value(design.family, eta2, design.characteristic)
    return comparison_value(design.characteristic, t1, t2)


def fisher_information(family, eta):
    """Per-group Fisher information matrix I(eta), d x d symmetric PD."""
    eta = family.check_params(eta)
    with np.errstate(over="raise", divide="raise"):
        try:
            info = family.fisher_information(eta)
        except FloatingPointError as exc:
            raise DomainError(
                f"Fisher information overflows at eta={eta!r}; the parameter "
                "is effectively on the boundary"
            ) from exc
    if not np.all(np.isfinite(info)):
        raise DomainError(f"Fisher information is not finite at eta={eta!r}")
    return info


def mle(family, sample):
    """Maximum likelihood estimate for one group's sample."""
    y = np.asarray(sample, dtype=float)
    if y.size == 0:
        raise DomainError("MLE requires a nonempty sample")
    if not family.support_contains(y):
        raise DomainError(f"sample contains values outside the {family.kind} support")
    return family.mle(y)


def inverse_cdf(family, eta, u):
    """Generalized inverse CDF at u in (0, 1)."""
    eta = family.check_params(eta)
    uarr = np.asarray(u, dtype=float)
    if np.any(uarr <= 0.0) or np.any(uarr >= 1.0):
        raise DomainError("inverse CDF requires u strictly inside (0, 1)")
    return family.inverse_cdf(u, eta)


@dataclass(frozen=True)
class DesignSpec:
    """Data-generating configuration for the design calculation.

    eta1/eta2 are the fixed design parameter values for the comparison
    and reference groups; q is the allocation ratio (group-2 size is q
    times group-1 size).
    """

    family: object
    eta1: tuple
    eta2: tuple
    characteristic: CharacteristicSpec
    q: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "eta1", tuple(float(v) for v in self.eta1))
        object.__setattr__(self, "eta2", tuple(float(v) for v in self.eta2))
        self.family.check_params(self.eta1_array)
        self.family.check_params(self.eta2_array)
        if not (np.isfinite(self.q) and self.q > 0.0):
            raise ConfigurationError("allocation ratio q must be positive", field="q")
        th1 = characteristic_value(self.family, self.eta1_array, self.characteristic)
        th2 = characteristic_value(self.family, self.eta2_array, self.characteristic)
        if self.characteristic.comparison in ("ratio", "log_ratio") and (
            th1 <= 0.0 or th2 <= 0.0
        ):
            raise ConfigurationError(
                "ratio-based comparisons require strictly positive characteristics",
                field="characteristic.comparison",
            )
        theta0 = comparison_value(self.characteristic, th1, th2)
        if not np.isfinite(theta0):
            raise ConfigurationError("design characteristic value is not finite")
        grad = central_gradient(
            lambda pts: theta_value(self, pts[:, : self.d], pts[:, self.d :]),
            np.concatenate([self.eta1_array, self.eta2_array]),
        )
        if not np.all(np.isfinite(grad)):
            raise ConfigurationError(
                "comparison map is not differentiable at the design values"
            )

    @property
    def d(self):
        return self.family.param_count

    @property
    def eta1_array(self):
        return np.asarray(self.eta1, dtype=float)

    @property
    def eta2_array(self):
        return np.asarray(self.eta2, dtype=float)

    @property
    def theta1_0(self):
        return float(
            characteristic_value(self.family, self.eta1_array, self.characteristic)
        )

    @property
    def theta2_0(self):
        return float(
            characteristic_value(self.family, self.eta2_array, self.characteristic)
        )

    @property
    def theta0(self):
        return float(comparison_value(self.characteristic, self.theta1_0, self.theta2_0))
