"""Shared fixtures: the reference gamma tail-probability design, its two
prior sets, the six benchmark settings, and cached heavy runs."""

import math

import pytest

# One line per acceptance criterion, echoed in the terminal summary so
# piped runs record them regardless of capture mode.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

from eqdesign import (
    BERNOULLI,
    GAMMA,
    CharacteristicSpec,
    DesignSpec,
    GammaPrior,
    BetaPrior,
    PriorSpec,
    TestSpec,
)

# Gamma tail-probability benchmark: design values fitted from survey data,
# threshold 4.29, compared on the log-ratio scale.
ETA1 = (2.11, 0.69)
ETA2 = (2.43, 0.79)
KAPPA = 4.29


def gamma_design(q=1.0, comparison="log_ratio"):
    return DesignSpec(
        family=GAMMA,
        eta1=ETA1,
        eta2=ETA2,
        characteristic=CharacteristicSpec(
            kind="tail_probability", comparison=comparison, threshold=KAPPA
        ),
        q=q,
    )


def uninformative_priors():
    comp = (GammaPrior(2.0, 0.1), GammaPrior(2.0, 0.1))
    return PriorSpec(group1=comp, group2=comp)


def informative_priors():
    return PriorSpec(
        group1=(GammaPrior(33.79, 15.66), GammaPrior(26.96, 37.92)),
        group2=(GammaPrior(105.53, 42.97), GammaPrior(85.43, 106.31)),
    )


def log_ratio_test(delta_star, gamma, target_power, noninferiority=False):
    upper = math.inf if noninferiority else math.log1p(delta_star)
    return TestSpec.calibrated(
        -math.log1p(delta_star), upper, gamma=gamma, target_power=target_power
    )


# (label, gamma, target_power, delta_star, informative?, mu target, sigma target)
BENCHMARK_SETTINGS = [
    ("1a", 0.5, 0.6, 0.25, False, 84.98, 13.47),
    ("2a", 0.5, 0.6, 0.25, True, 60.95, 8.86),
    ("1b", 0.9, 0.7, 0.30, False, 360.89, 27.29),
    ("2b", 0.9, 0.7, 0.30, True, 325.47, 23.32),
    ("1c", 0.8, 0.8, 0.15, False, 1089.42, 47.29),
    ("2c", 0.8, 0.8, 0.15, True, 1044.96, 44.33),
]


def bernoulli_design(theta1=0.3, theta2=0.3, q=1.0):
    return DesignSpec(
        family=BERNOULLI,
        eta1=(theta1,),
        eta2=(theta2,),
        characteristic=CharacteristicSpec(kind="raw_parameter", comparison="difference", index=0),
        q=q,
    )


def flat_beta_priors():
    return PriorSpec(group1=(BetaPrior(1.0, 1.0),), group2=(BetaPrior(1.0, 1.0),))


@pytest.fixture(scope="session")
def ref_design():
    return gamma_design()


@pytest.fixture(scope="session")
def ref_uninformative():
    return uninformative_priors()


@pytest.fixture(scope="session")
def ref_informative():
    return informative_priors()


@pytest.fixture(scope="session")
def limit_length_sim(ref_design):
    """Shared heavy simulation: plug-in interval lengths at n = 1e5.

    Used by the large-sample agreement checks (mean/sd of the length,
    Monte Carlo variance of theta_hat and of sqrt(var(theta_hat))).
    """
    from eqdesign.oracle import simulate_limit_lengths

    alpha = 0.1
    n = 100_000
    reps = 10_000
    lengths, thetas, sqrt_vars = simulate_limit_lengths(
        ref_design, alpha, n, reps, seed=9001
    )
    return {
        "alpha": alpha,
        "n": n,
        "reps": reps,
        "lengths": lengths,
        "thetas": thetas,
        "sqrt_vars": sqrt_vars,
    }
