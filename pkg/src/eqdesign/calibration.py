"""Stage one: fast power-curve approximation and the calibrated limiting SSSD.

For each Sobol draw of the joint MLE limit, root finding locates the
smallest (continuous) sample size at which the implied limiting
posterior puts mass at least gamma inside the test interval.  The
empirical curve of those roots approximates the power curve; its
Gamma-quantile fixes the mean sample size, which in turn calibrates the
target HDI length to the requested power.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .asymptotics import (
    CLASS_1B,
    CLASS_UNCLASSIFIED,
    STAGE_LIMITING,
    SssdEstimate,
    a_squared,
    inv_fisher_theta,
    normal_quantile,
    theta_variance,
)
from .curves import PowerCurve
from .errors import ConfigurationError, DomainError, UnattainableDesignError
from .families import theta_value
from .qmc import COORD_EPS, LimitDrawContext, SobolStream

__all__ = [
    "TestSpec",
    "StageOneResult",
    "coverage_in_interval",
    "min_sample_for_coverage",
    "approximate_power_curve",
    "stage_one",
    "N_MAX",
    "ROOT_TOL",
    "DEFAULT_N_SOB",
]

N_MAX = float(2**26)  # cap for runaway bracket searches
ROOT_TOL = 0.01  # absolute tolerance on the located root
DEFAULT_N_SOB = 1024

MODE_CALIBRATED = "calibrated"
MODE_EXPLICIT = "explicit"


@dataclass(frozen=True)
class TestSpec:
    """What "success" means for the test.

    Calibrated mode supplies the conviction threshold gamma and target
    power; the target HDI length and coverage are derived.  Explicit
    mode supplies (l, alpha) directly and skips the power calibration.
    Endpoints may be half-infinite (noninferiority); at most one may be
    infinite for a design run.
    """

    __test__ = False  # pytest: a domain type, not a test class

    delta1: float
    delta2: float
    gamma: float | None = None
    target_power: float | None = None
    mode: str = MODE_CALIBRATED
    l: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if not self.delta1 < self.delta2:
            raise ConfigurationError(
                f"interval endpoints must satisfy delta1 < delta2, got "
                f"({self.delta1}, {self.delta2})",
                field="delta1/delta2",
            )
        if self.mode == MODE_CALIBRATED:
            if self.gamma is None or self.target_power is None:
                raise ConfigurationError(
                    "calibrated mode requires gamma and target_power", field="test"
                )
            if not 0.5 <= self.gamma < 1.0:
                raise ConfigurationError(
                    f"conviction threshold gamma must lie in [0.5, 1), got {self.gamma}",
                    field="gamma",
                )
            if not 0.0 < self.target_power < 1.0:
                raise ConfigurationError(
                    f"target power must lie in (0, 1), got {self.target_power}",
                    field="target_power",
                )
        elif self.mode == MODE_EXPLICIT:
            if self.l is None or self.alpha is None:
                raise ConfigurationError(
                    "explicit mode requires l and alpha", field="test"
                )
            if not self.l > 0.0:
                raise ConfigurationError("target length l must be positive", field="l")
            if not 0.0 < self.alpha < 1.0:
                raise ConfigurationError(
                    "coverage complement alpha must lie in (0, 1)", field="alpha"
                )
            if math.isfinite(self.delta1) and math.isfinite(self.delta2):
                if not self.l < self.delta2 - self.delta1:
                    raise ConfigurationError(
                        "target length l must be smaller than the interval width",
                        field="l",
                    )
        else:
            raise ConfigurationError(f"unknown test mode {self.mode!r}", field="mode")

    @classmethod
    def calibrated(cls, delta1, delta2, gamma, target_power):
        return cls(delta1=delta1, delta2=delta2, gamma=gamma, target_power=target_power)

    @classmethod
    def explicit(cls, delta1, delta2, l, alpha, gamma=None, target_power=None):
        return cls(
            delta1=delta1,
            delta2=delta2,
            gamma=gamma,
            target_power=target_power,
            mode=MODE_EXPLICIT,
            l=l,
            alpha=alpha,
        )

    @property
    def resolved_alpha(self):
        """HDI coverage complement: 1 - gamma in calibrated mode."""
        return self.alpha if self.mode == MODE_EXPLICIT else 1.0 - self.gamma

    def validate_for_design(self, design):
        """Checks that need the design: finite-interval shape and theta0 placement."""
        if math.isinf(self.delta1) and math.isinf(self.delta2):
            raise ConfigurationError(
                "at most one interval endpoint may be infinite",
                field="delta1/delta2",
            )
        if design.characteristic.comparison == "ratio":
            for name, v in (("delta1", self.delta1), ("delta2", self.delta2)):
                if math.isfinite(v) and v < 0.0:
                    raise ConfigurationError(
                        "ratio-based comparisons require nonnegative interval "
                        f"endpoints, got {name}={v}",
                        field=name,
                    )
        if self.mode == MODE_CALIBRATED:
            if not self.delta1 < design.theta0 < self.delta2:
                raise UnattainableDesignError(
                    f"design value theta0={design.theta0:.6g} lies outside the "
                    f"interval ({self.delta1}, {self.delta2}); the target power "
                    "cannot be reached",
                    field="delta1/delta2",
                )


@dataclass(frozen=True, eq=False)
class StageOneResult:
    """Power-calibrated limiting SSSD plus the root-finding draws."""

    samp_sobol: np.ndarray  # sorted ascending, +inf = censored
    mu_l: float
    sigma_l: float
    l: float
    alpha: float
    inv_fisher: float
    a2: float
    z: float
    seed: int | None
    n_sob: int
    classification: str = CLASS_UNCLASSIFIED
    warnings: tuple = field(default=())

    @property
    def beta1(self):
        """Limiting success-line slope used by the prior-adjustment stage."""
        return self.z * math.sqrt(self.inv_fisher) / self.mu_l**1.5

    @property
    def censored_count(self):
        return int(np.sum(np.isinf(self.samp_sobol)))

    @property
    def curve(self):
        return PowerCurve(self.samp_sobol)

    @property
    def sssd(self):
        return SssdEstimate(
            mu_l=self.mu_l,
            sigma_l=self.sigma_l,
            l=self.l,
            alpha=self.alpha,
            stage=STAGE_LIMITING,
            classification=self.classification,
        )


def coverage_in_interval(mean, sd, delta1, delta2):
    """Normal mass of N(mean, sd^2) inside (delta1, delta2)."""
    if not sd > 0.0:
        raise DomainError("coverage requires a positive standard deviation")
    upper = 1.0 if math.isinf(delta2) else float(special.ndtr((delta2 - mean) / sd))
    lower = 0.0 if math.isinf(delta1) else float(special.ndtr((delta1 - mean) / sd))
    return upper - lower


class _DrawCoverage:
    """Coverage as a function of n for one fixed Sobol draw.

    The MLE draw shrinks toward the design values as n grows; at each n
    the draw is treated as a fixed design value, giving a limiting
    posterior N(theta, I(theta)^-1 / n) whose mass inside the interval
    is compared to gamma.
    """

    def __init__(self, design, test, ctx, z):
        self.design = design
        self.test = test
        self.ctx = ctx
        self.z = z

    def __call__(self, n):
        tt1, tt2 = self.ctx.transformed_draw(n, self.design.q * n, self.z)
        fam = self.design.family
        eta1 = fam.inverse_transform(tt1)
        eta2 = fam.inverse_transform(tt2)
        theta = float(theta_value(self.design, eta1, eta2))
        var = theta_variance(self.design, eta1, eta2)
        sd = math.sqrt(var / n)
        return coverage_in_interval(theta, sd, self.test.delta1, self.test.delta2)


def _min_sample(coverage_fn, gamma):
    """Smallest continuous n with coverage >= gamma, or +inf if censored.

    Geometric bracket expansion from n = 2 (doubling) up to N_MAX, then
    Brent refinement of coverage(n) - gamma to ROOT_TOL.
    """
    g = lambda n: coverage_fn(n) - gamma
    n_prev = 2.0
    if g(n_prev) >= 0.0:
        return 2.0
    n_cur = 4.0
    while n_cur <= N_MAX:
        if g(n_cur) >= 0.0:
            return float(optimize.brentq(g, n_prev, n_cur, xtol=ROOT_TOL))
        n_prev = n_cur
        n_cur *= 2.0
    return math.inf


def min_sample_for_coverage(design, test, u):
    """Root for one Sobol point; +inf means censored (never reaches gamma)."""
    ctx = LimitDrawContext(design)
    u = np.clip(np.asarray(u, dtype=float), COORD_EPS, 1.0 - COORD_EPS)
    z = special.ndtri(u)
    fn = _DrawCoverage(design, test, ctx, z)
    return _min_sample(fn, test.gamma)


def approximate_power_curve(design, test, n_sob=DEFAULT_N_SOB, seed=None):
    """Roots for n_sob Sobol draws, sorted, plus the interpolated curve.

    The root-finding problems are independent per draw; they are solved
    in draw order and sorted afterwards, so any parallel schedule would
    produce the same result.
    """
    if n_sob < 2:
        raise ConfigurationError("n_sob must be at least 2", field="n_sob")
    ctx = LimitDrawContext(design)
    stream = SobolStream(2 * design.d, seed)
    pts = np.clip(stream.points(n_sob), COORD_EPS, 1.0 - COORD_EPS)
    zs = special.ndtri(pts)
    roots = np.empty(n_sob)
    for r in range(n_sob):
        fn = _DrawCoverage(design, test, ctx, zs[r])
        roots[r] = _min_sample(fn, test.gamma)
    roots.sort()
    censored = int(np.sum(np.isinf(roots)))
    if censored / n_sob >= 1.0 - test.target_power:
        raise UnattainableDesignError(
            f"{censored} of {n_sob} draws never reach conviction gamma="
            f"{test.gamma} inside ({test.delta1}, {test.delta2}); target power "
            f"{test.target_power} is unattainable for this design"
        )
    return PowerCurve(roots)


def stage_one(design, test, n_sob=DEFAULT_N_SOB, seed=None):
    """Calibrate (l, alpha) to (gamma, target power) and estimate the
    limiting SSSD; explicit mode skips the power-curve calibration."""
    test.validate_for_design(design)
    v0 = inv_fisher_theta(design)
    a2 = a_squared(design)
    warn = []
    classification = CLASS_UNCLASSIFIED
    if a2 == 0.0:
        classification = CLASS_1B
        warn.append(
            "degenerate design: the limiting SSSD has zero spread (A^2 = 0); "
            "sigma_l is exactly 0"
        )

    if test.mode == MODE_EXPLICIT:
        alpha = test.alpha
        z = normal_quantile(1.0 - alpha / 2.0)
        l = test.l
        mu_l = 4.0 * z * z * v0 / (l * l)
        samp = np.array([])
    else:
        curve = approximate_power_curve(design, test, n_sob=n_sob, seed=seed)
        samp = curve.sample_sizes
        censored = curve.censored_count
        if censored:
            warn.append(
                f"censoring: {censored} of {n_sob} power-curve draws never "
                f"reached conviction {test.gamma} and were recorded as infinite"
            )
        mu_l = curve.quantile(test.target_power, clamp=True)
        alpha = 1.0 - test.gamma
        z = normal_quantile(1.0 - alpha / 2.0)
        l = 2.0 * z * math.sqrt(v0) / math.sqrt(mu_l)
        width = test.delta2 - test.delta1
        if math.isfinite(width) and not l < width:
            warn.append(
                f"calibrated target length l={l:.6g} is not smaller than the "
                f"interval width {width:.6g}; the design is borderline"
            )

    sigma_l = 4.0 * z * math.sqrt(a2) / l
    if mu_l - 3.0 * sigma_l < 0.0:
        warn.append(
            "small-sample regime: the probable domain extends below zero; "
            "asymptotic estimates are unreliable here"
        )
    return StageOneResult(
        samp_sobol=samp,
        mu_l=float(mu_l),
        sigma_l=float(sigma_l),
        l=float(l),
        alpha=float(alpha),
        inv_fisher=float(v0),
        a2=float(a2),
        z=float(z),
        seed=seed,
        n_sob=int(n_sob) if test.mode == MODE_CALIBRATED else 0,
        classification=classification,
        warnings=tuple(warn),
    )
