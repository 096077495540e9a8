"""Brute-force simulation oracle.

Validates the fast path the honest way: random datasets from the design
distributions, sampling-resampling posterior draws, empirical shortest
intervals, and Monte Carlo estimates of the length-criterion probability
and the power curve.

Conventions the fast path never sees (reported in results, not claims
about any particular reference): the importance proposal is a
multivariate Student-t (5 df) centered at the Laplace mode with scale
1.5x the Laplace covariance on the transformed scale, one proposal draw
per output draw, systematic resampling; replication RNG is counter-based
(Philox), seeded per (rep, group) so reps are order-independent.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from .adjustment import group_sizes, laplace_posterior
from .asymptotics import theta_variance
from .errors import DomainError, ProposalMismatchError
from .families import mle, theta_value

__all__ = [
    "PosteriorDraws",
    "HdiInterval",
    "sir_posterior",
    "hdi_empirical",
    "cpm",
    "simulate_length_criterion",
    "simulate_power",
    "simulate_limit_lengths",
    "SimulationEstimate",
]

_T_DOF = 5.0
_PROPOSAL_SCALE = 1.5
_PROPOSAL_SCALE_RETRY = 3.0
_ESS_FLOOR = 0.02


@dataclass(frozen=True)
class PosteriorDraws:
    """Resampled posterior draws for one group's parameters."""

    eta: np.ndarray  # (m, d) draws in the natural parameter space
    ess: float  # effective sample size of the importance weights
    proposal_scale: float

    @property
    def m(self):
        return int(self.eta.shape[0])


@dataclass(frozen=True)
class HdiInterval:
    lower: float
    upper: float
    coverage: float

    @property
    def length(self):
        return self.upper - self.lower


@dataclass(frozen=True)
class SimulationEstimate:
    proportion: float
    se: float
    reps: int


def _rng(seed, rep, group):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, rep, group])))


def _mvt_logpdf(x, center, chol, dof):
    """Multivariate Student-t log density with scale matrix chol @ chol.T."""
    d = center.size
    z = np.linalg.solve(chol, (x - center).T).T
    quad = np.sum(z * z, axis=1)
    logdet = np.sum(np.log(np.diag(chol)))
    const = (
        special.gammaln((dof + d) / 2.0)
        - special.gammaln(dof / 2.0)
        - 0.5 * d * math.log(dof * math.pi)
        - logdet
    )
    return const - 0.5 * (dof + d) * np.log1p(quad / dof)


def _systematic_resample(weights, m, rng):
    positions = (np.arange(m) + rng.random()) / m
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0
    return np.searchsorted(cumulative, positions)


def sir_posterior(family, priors, sample, m, seed=None, rng=None, proposal_center=None):
    """Sampling-resampling posterior draws for one group.

    Importance sampling from a heavy-tailed proposal around the Laplace
    mode, weighted by the exact unnormalized posterior, then systematic
    resampling down to ``m`` draws.  Fails (after one wider retry) when
    the effective sample size collapses below 2% of the draw count.
    ``proposal_center`` overrides the mode (diagnostic hook).
    """
    if m < 1000:
        raise DomainError("oracle decisions require at least 1000 posterior draws")
    if rng is None:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    from .adjustment import _NegLogPosterior  # shared unnormalized posterior

    post = laplace_posterior(family, priors, sample)
    center = post.mode if proposal_center is None else np.asarray(proposal_center, float)
    nlp = _NegLogPosterior(family, priors, sample)
    d = post.mode.size
    for scale in (_PROPOSAL_SCALE, _PROPOSAL_SCALE_RETRY):
        chol = np.linalg.cholesky(scale * post.covariance)
        z = rng.standard_normal((m, d))
        g = rng.chisquare(_T_DOF, size=m) / _T_DOF
        t_draws = center + (z @ chol.T) / np.sqrt(g)[:, None]
        log_target = -nlp.value_batch(t_draws)
        log_prop = _mvt_logpdf(t_draws, center, chol, _T_DOF)
        logw = log_target - log_prop
        logw -= np.max(logw)
        w = np.exp(logw)
        w /= np.sum(w)
        ess = 1.0 / float(np.sum(w * w))
        if ess >= _ESS_FLOOR * m:
            idx = _systematic_resample(w, m, rng)
            eta = family.inverse_transform(t_draws[idx])
            return PosteriorDraws(eta=np.atleast_2d(eta), ess=ess, proposal_scale=scale)
    raise ProposalMismatchError(
        f"importance proposal mismatched: effective sample size {ess:.1f} "
        f"below {_ESS_FLOOR:.0%} of {m} draws even at scale "
        f"{_PROPOSAL_SCALE_RETRY}x"
    )


def hdi_empirical(draws, coverage):
    """Shortest interval holding ceil(coverage * m) consecutive sorted draws.

    Ties go to the leftmost window.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 1 or draws.size < 2:
        raise DomainError("empirical HDI requires at least two draws")
    if not 0.0 < coverage < 1.0:
        raise DomainError("coverage must lie in (0, 1)")
    m = draws.size
    w = int(math.ceil(coverage * m))
    w = max(w, 1)
    if w >= m:
        return HdiInterval(float(draws[0]), float(draws[-1]), coverage)
    widths = draws[w - 1 :] - draws[: m - w + 1]
    i = int(np.argmin(widths))
    return HdiInterval(float(draws[i]), float(draws[i + w - 1]), coverage)


def cpm(theta_draws, delta1, delta2):
    """Posterior probability of the interval: fraction of draws strictly inside."""
    theta_draws = np.asarray(theta_draws, dtype=float)
    if theta_draws.size == 0:
        raise DomainError("CPM requires at least one draw")
    return float(np.mean((theta_draws > delta1) & (theta_draws < delta2)))


def _posterior_theta_draws(design, priors, y1, y2, m, seed, rep):
    d1 = sir_posterior(
        design.family, priors.group1, y1, m, rng=_rng(seed, rep, 1)
    )
    d2 = sir_posterior(
        design.family, priors.group2, y2, m, rng=_rng(seed, rep, 2)
    )
    return np.asarray(theta_value(design, d1.eta, d2.eta), dtype=float)


def _one_rep_length(args):
    design, priors, test, n, l, m, seed, rep = args
    n1, n2 = group_sizes(n, design.q)
    rng1 = _rng(seed, rep, 101)
    rng2 = _rng(seed, rep, 102)
    y1 = design.family.sample(rng1, design.eta1_array, n1)
    y2 = design.family.sample(rng2, design.eta2_array, n2)
    theta = _posterior_theta_draws(design, priors, y1, y2, m, seed, rep)
    interval = hdi_empirical(np.sort(theta), 1.0 - test.resolved_alpha)
    return 1.0 if interval.length <= l else 0.0


def _one_rep_power(args):
    design, priors, test, n, m, seed, rep = args
    n1, n2 = group_sizes(n, design.q)
    rng1 = _rng(seed, rep, 101)
    rng2 = _rng(seed, rep, 102)
    y1 = design.family.sample(rng1, design.eta1_array, n1)
    y2 = design.family.sample(rng2, design.eta2_array, n2)
    theta = _posterior_theta_draws(design, priors, y1, y2, m, seed, rep)
    return 1.0 if cpm(theta, test.delta1, test.delta2) >= test.gamma else 0.0


def _run_reps(fn, argses, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = list(pool.map(fn, argses, chunksize=8))
    else:
        hits = [fn(a) for a in argses]
    return hits


def _estimate(hits):
    reps = len(hits)
    p = float(np.mean(hits))
    return SimulationEstimate(p, math.sqrt(p * (1.0 - p) / reps), reps)


def simulate_length_criterion(
    design, priors, test, n, l, reps=500, m=10_000, seed=0, workers=1
):
    """Proportion of random datasets whose posterior HDI length is <= l."""
    if n < 1:
        raise DomainError("sample size n must be at least 1")
    if reps < 100:
        raise DomainError("oracle estimates require at least 100 replications")
    argses = [(design, priors, test, n, l, m, seed, rep) for rep in range(reps)]
    return _estimate(_run_reps(_one_rep_length, argses, workers))


def simulate_power(design, priors, test, n, reps=500, m=10_000, seed=0, workers=1):
    """Proportion of random datasets with posterior interval mass >= gamma."""
    if n < 1:
        raise DomainError("sample size n must be at least 1")
    if reps < 100:
        raise DomainError("oracle estimates require at least 100 replications")
    argses = [(design, priors, test, n, m, seed, rep) for rep in range(reps)]
    return _estimate(_run_reps(_one_rep_power, argses, workers))


def simulate_limit_lengths(design, alpha, n, reps, seed=0):
    """Large-sample interval lengths from simulated-data MLEs.

    For each replication, data of the given size are drawn from both
    design distributions, per-group MLEs computed, and the plug-in
    interval length 2 z sqrt(var(theta_hat)) / sqrt(n) recorded along
    with theta_hat and sqrt(var(theta_hat)).  This is the independent
    route against which the delta-method constants are checked.
    """
    z = float(special.ndtri(1.0 - alpha / 2.0))
    n1, n2 = group_sizes(n, design.q)
    lengths = np.empty(reps)
    thetas = np.empty(reps)
    sqrt_vars = np.empty(reps)
    for rep in range(reps):
        y1 = design.family.sample(_rng(seed, rep, 1), design.eta1_array, n1)
        y2 = design.family.sample(_rng(seed, rep, 2), design.eta2_array, n2)
        eta1_hat = mle(design.family, y1)
        eta2_hat = mle(design.family, y2)
        thetas[rep] = float(theta_value(design, eta1_hat, eta2_hat))
        sqrt_vars[rep] = math.sqrt(theta_variance(design, eta1_hat, eta2_hat))
        lengths[rep] = 2.0 * z * sqrt_vars[rep] / math.sqrt(n)
    return lengths, thetas, sqrt_vars
