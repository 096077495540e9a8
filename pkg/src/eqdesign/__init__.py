"""eqdesign: sample-size design for Bayesian equivalence and noninferiority tests.

Two-stage engine: a fast asymptotic stage that calibrates the target
interval length to a power criterion, and a prior-adjusted simulation
stage; plus a brute-force oracle for validation and a CLI/HTTP surface
for interactive exploration.
"""

__version__ = "0.1.0"

from .asymptotics import (
    SssdEstimate,
    ThetaAsymptotics,
    a_squared,
    heteroscedasticity_ratio,
    inv_fisher_theta,
    limiting_sssd,
)
from .adjustment import (
    BetaPrior,
    GammaPrior,
    PosteriorApprox,
    PriorSpec,
    StageTwoResult,
    classify_sssd,
    hdi_length_bar,
    laplace_posterior,
    stage_two,
)
from .calibration import StageOneResult, TestSpec, stage_one
from .config import RunConfig, load_config, parse_config
from .curves import AdjustedPowerCurve, PowerCurve
from .errors import EngineError
from .families import (
    BERNOULLI,
    GAMMA,
    CharacteristicSpec,
    DesignSpec,
    characteristic_value,
    fisher_information,
    inverse_cdf,
    mle,
)
from .oracle import (
    HdiInterval,
    PosteriorDraws,
    cpm,
    hdi_empirical,
    simulate_length_criterion,
    simulate_power,
    sir_posterior,
)
from .qmc import MleLimitDraw, SobolStream, mle_limit_draw, sobol_points

__all__ = [
    "__version__",
    "SssdEstimate",
    "ThetaAsymptotics",
    "a_squared",
    "heteroscedasticity_ratio",
    "inv_fisher_theta",
    "limiting_sssd",
    "BetaPrior",
    "GammaPrior",
    "PosteriorApprox",
    "PriorSpec",
    "StageTwoResult",
    "classify_sssd",
    "hdi_length_bar",
    "laplace_posterior",
    "stage_two",
    "StageOneResult",
    "TestSpec",
    "stage_one",
    "RunConfig",
    "load_config",
    "parse_config",
    "AdjustedPowerCurve",
    "PowerCurve",
    "EngineError",
    "BERNOULLI",
    "GAMMA",
    "CharacteristicSpec",
    "DesignSpec",
    "characteristic_value",
    "fisher_information",
    "inverse_cdf",
    "mle",
    "HdiInterval",
    "PosteriorDraws",
    "cpm",
    "hdi_empirical",
    "simulate_length_criterion",
    "simulate_power",
    "sir_posterior",
    "MleLimitDraw",
    "SobolStream",
    "mle_limit_draw",
    "sobol_points",
]
