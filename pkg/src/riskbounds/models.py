"""The four worked estimation settings and their closed-form quantities.

Bernoulli computations collapse the 2^n sample space to the Hamming
weight, and Gaussian computations collapse the sample to its mean; both
reductions are sufficient statistics, so every divergence is preserved
while n = 500 stays comfortably within budget.  All Gamma-function ratios
are evaluated through log-Gamma to avoid overflow past n ~ 85.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import betainc, gammaln, ndtr, xlogy

from . import measures, sdpi
from .bounds import BoundResult, SmallBallFn, hellinger_phi, sdpi_bound
from .distributions import MixedJoint
from .errors import DivergenceInfinite
from .quadrature import QuadraturePolicy, adaptive_simpson

__all__ = [
    "BernoulliUniformModel",
    "NoisyBernoulliModel",
    "GaussianModel",
    "HideAndSeekModel",
    "HideAndSeekBounds",
    "bernoulli_small_ball",
    "bernoulli_ml",
    "bernoulli_sibson",
    "bernoulli_hellinger",
    "bernoulli_e_gamma_zeta",
    "bernoulli_mutual_information",
    "bernoulli_upper_bound",
    "bernoulli_joint",
    "noisy_bernoulli_joint",
    "noisy_bernoulli_bound",
    "noisy_bernoulli_upper_bound",
    "gaussian_small_ball",
    "gaussian_sibson",
    "gaussian_hellinger",
    "gaussian_e_gamma_zeta",
    "gaussian_mutual_information",
    "gaussian_upper_bound",
    "gaussian_hellinger_closed_form_bound",
    "hide_and_seek_leakage",
    "hide_and_seek_bounds",
]


@dataclass(frozen=True)
class BernoulliUniformModel:
    """n coin flips with a uniformly distributed bias and absolute loss."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")


@dataclass(frozen=True)
class NoisyBernoulliModel:
    """Bernoulli bias estimation where each flip passes through a BSC."""

    n: int
    lam: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 <= self.lam <= 0.5:
            raise ValueError("crossover must lie in [0, 1/2]")


@dataclass(frozen=True)
class GaussianModel:
    """Gaussian mean with Gaussian prior, n noisy samples, absolute loss."""

    n: int
    sigma_w_sq: float
    sigma_sq: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.sigma_w_sq <= 0 or self.sigma_sq <= 0:
            raise ValueError("variances must be positive")

    @property
    def snr(self) -> float:
        """Effective signal-to-noise ratio after the sample-mean reduction."""
        return self.n * self.sigma_w_sq / self.sigma_sq


@dataclass(frozen=True)
class HideAndSeekModel:
    """Distributed detection of the one biased coordinate out of d."""

    d: int
    m: int
    b: float
    theta: float
    n: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be at least 1")
        if self.b < 0:
            raise ValueError("message budget must be non-negative")
        if not 0.0 <= self.theta < 0.5:
            raise ValueError("bias must lie in [0, 1/2)")


# ----------------------------------------------------------------------
# Bernoulli bias with uniform prior
# ----------------------------------------------------------------------

def bernoulli_small_ball(model: BernoulliUniformModel | None = None) -> SmallBallFn:
    """L(rho) = min(2*rho, 1) for the uniform prior under absolute loss."""
    return SmallBallFn.linear(2.0)


class MlValue(NamedTuple):
    exact: float
    upper: float


def bernoulli_ml(n: int) -> MlValue:
    """Maximal leakage of the n-flip experiment.

    ``exact`` is the log of the profile-likelihood sum over Hamming
    weights; ``upper`` is the Stirling relaxation log(2 + sqrt(pi*n/2)).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    k = np.arange(n + 1)
    log_terms = (
        _log_binom(n, k) + xlogy(k, k / n) + xlogy(n - k, 1.0 - k / n)
    )
    exact = _logsumexp(log_terms)
    upper = math.log(2.0 + math.sqrt(math.pi * n / 2.0))
    return MlValue(exact=float(exact), upper=upper)


def bernoulli_sibson(n: int, alpha: float) -> float:
    """Exponential form of the order-alpha dependence: returns
    exp(((alpha-1)/alpha) * I_alpha), a Gamma-ratio sum over weights."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if alpha <= 1.0:
        raise ValueError("order must exceed 1")
    k = np.arange(n + 1)
    log_beta = (
        gammaln(k * alpha + 1.0)
        + gammaln((n - k) * alpha + 1.0)
        - gammaln(n * alpha + 2.0)
    )
    return float(np.exp(_logsumexp(_log_binom(n, k) + log_beta / alpha)).item())


def bernoulli_hellinger(n: int, p: float) -> float:
    """Moment form (p-1)*H_p + 1 of the order-p Hellinger dependence."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if p <= 1.0:
        raise ValueError("order must exceed 1")
    k = np.arange(n + 1)
    log_terms = (
        (p - 1.0) * math.log(n + 1.0)
        + p * _log_binom(n, k)
        + gammaln(k * p + 1.0)
        + gammaln((n - k) * p + 1.0)
        - gammaln(n * p + 2.0)
    )
    return float(np.exp(_logsumexp(log_terms)).item())


def bernoulli_e_gamma_zeta(n: int, gamma: float, zeta: float) -> float:
    """Hockey-stick dependence of bias and weight, by exact interval algebra.

    The density ratio at weight k is the Beta(k+1, n-k+1) pdf, which is
    unimodal, so {ratio > gamma/zeta} is an interval found by bisection;
    the integral over it reduces to regularized incomplete Beta values.
    The generic quadrature path (measures.e_gamma_zeta on the sufficient
    joint) computes the same number and serves as its oracle in tests.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if zeta <= 0 or gamma < 0:
        raise ValueError("requires zeta > 0 and gamma >= 0")
    if gamma == 0.0:
        return 0.0
    k = np.arange(n + 1)
    a_par = k + 1.0
    b_par = n - k + 1.0
    log_norm = gammaln(n + 2.0) - gammaln(a_par) - gammaln(b_par)
    mode = k / n

    def log_ratio(w):
        return log_norm + xlogy(k, w) + xlogy(n - k, 1.0 - w)

    log_t = math.log(gamma / zeta)
    peak = log_ratio(mode)
    exists = peak >= log_t

    # left endpoint: ratio is increasing on [0, mode]
    left = np.zeros(n + 1)
    need = exists & (log_ratio(np.zeros(n + 1)) < log_t)
    lo = np.zeros(n + 1)
    hi = mode.copy()
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = log_ratio(mid) < log_t
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    left[need] = hi[need]

    # right endpoint: ratio is decreasing on [mode, 1]
    right = np.ones(n + 1)
    need = exists & (log_ratio(np.ones(n + 1)) < log_t)
    lo = mode.copy()
    hi = np.ones(n + 1)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        above = log_ratio(mid) >= log_t
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    right[need] = lo[need]

    mass = betainc(a_par, b_par, right) - betainc(a_par, b_par, left)
    contrib = np.where(exists, zeta * mass - gamma * (right - left), 0.0)
    total = float(np.sum(contrib)) / (n + 1.0)
    return max(0.0, total - max(0.0, zeta - gamma))


@lru_cache(maxsize=None)
def bernoulli_mutual_information(n: int) -> float:
    """Shannon dependence of bias and weight, by adaptive quadrature."""
    return measures.mutual_information(bernoulli_joint(n))


def bernoulli_upper_bound(n: int) -> float:
    """Sample-mean risk bound 1/sqrt(6n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return 1.0 / math.sqrt(6.0 * n)


@lru_cache(maxsize=None)
def bernoulli_joint(n: int) -> MixedJoint:
    """Sufficient-statistic joint of the bias and the Hamming weight."""
    return _binomial_count_joint(n, lambda w: w)


@lru_cache(maxsize=None)
def noisy_bernoulli_joint(model: NoisyBernoulliModel) -> MixedJoint:
    """Joint of the bias and the weight of the channel outputs."""
    lam = model.lam
    return _binomial_count_joint(model.n, lambda w: lam + (1.0 - 2.0 * lam) * w)


def _binomial_count_joint(n: int, mean_map) -> MixedJoint:
    k = np.arange(n + 1)
    log_binom = _log_binom(n, k)

    def likelihood(w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        mu = np.clip(mean_map(w), 0.0, 1.0)
        log_pmf = log_binom[:, None] + xlogy(k[:, None], mu[None, :]) \
            + xlogy((n - k)[:, None], 1.0 - mu[None, :])
        return np.exp(log_pmf)

    return MixedJoint(
        density=lambda w: np.ones_like(np.atleast_1d(np.asarray(w, float))),
        support=(0.0, 1.0),
        observations=tuple(range(n + 1)),
        likelihood=likelihood,
        policy=QuadraturePolicy(),
    )


def _log_binom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _logsumexp(values):
    values = np.asarray(values, dtype=float)
    peak = np.max(values)
    return peak + np.log(np.sum(np.exp(values - peak)))


# ----------------------------------------------------------------------
# Noisy Bernoulli bias (samples observed through a BSC)
# ----------------------------------------------------------------------

def noisy_bernoulli_bound(model: NoisyBernoulliModel, p: float = 2.0) -> BoundResult:
    """Contraction-refined Hellinger bound for privatized flips.

    Composes the clean-sample moment, the operator-convex BSC contraction
    constant, its product-channel tensorization (which preserves the
    single-letter constant), and the generator bound.  Restricted to
    1 < p <= 2 where the contraction constant is exact.
    """
    if not 1.0 < p <= 2.0:
        raise ValueError("contraction constant is only exact for 1 < p <= 2")
    moment = bernoulli_hellinger(model.n, p)
    h_p = (moment - 1.0) / (p - 1.0)
    eta = sdpi.eta_operator_convex_bsc(model.lam)
    eta_n = sdpi.tensorize_eta(eta, model.n, "max-preserving")
    return sdpi_bound(h_p, eta_n, hellinger_phi(p), bernoulli_small_ball())


def noisy_bernoulli_upper_bound(model: NoisyBernoulliModel) -> float:
    """Risk of unbiasing the sample mean of the channel outputs.

    E|W - what| <= sqrt(E(W - what)^2) = sqrt((3 - u^2)/(12 n)) / u with
    u = 1 - 2*lam; capped at 1/4, the risk of always guessing 1/2.
    """
    u = 1.0 - 2.0 * model.lam
    if u == 0.0:
        return 0.25
    value = math.sqrt((3.0 - u * u) / (12.0 * model.n)) / u
    return min(value, 0.25)


# ----------------------------------------------------------------------
# Gaussian prior with Gaussian noise
# ----------------------------------------------------------------------

def gaussian_small_ball(model: GaussianModel) -> SmallBallFn:
    """L(rho) = min(rho * sqrt(2/(pi*sigma_W^2)), 1)."""
    return SmallBallFn.linear(math.sqrt(2.0 / (model.sigma_w_sq * math.pi)))


def gaussian_sibson(model: GaussianModel, alpha: float) -> float:
    """I_alpha = 0.5 * log(1 + alpha * n * sigma_W^2 / sigma^2)."""
    if alpha <= 0:
        raise ValueError("order must be positive")
    return 0.5 * math.log1p(alpha * model.snr)


def gaussian_mutual_information(model: GaussianModel) -> float:
    return gaussian_sibson(model, 1.0)


def gaussian_hellinger(model: GaussianModel, p: float) -> float:
    """Moment form (p-1)*H_p + 1 = sqrt((1+s)^p / (1 + (2-p)*p*s)).

    ``s`` is the n-sample signal-to-noise ratio.  Raises
    DivergenceInfinite when the denominator is non-positive (the moment
    diverges outside that region).
    """
    if p <= 1.0:
        raise ValueError("order must exceed 1")
    s = model.snr
    denom = 1.0 + (2.0 - p) * p * s
    if denom <= 0.0:
        raise DivergenceInfinite(
            f"order {p!r} is outside the finite region at snr {s!r}"
        )
    return math.sqrt((1.0 + s) ** p / denom)


def gaussian_upper_bound(model: GaussianModel) -> float:
    """Sample-mean risk bound sqrt(sigma_W^2 / (1 + n*sigma_W^2/sigma^2))."""
    return math.sqrt(model.sigma_w_sq / (1.0 + model.snr))


def gaussian_hellinger_closed_form_bound(model: GaussianModel) -> float:
    """The p = 3/2 bound in fully simplified form.

    Equals (81*sqrt(2*pi)/2048) * sqrt(sigma_W^2/(1 + n*sigma_W^2/sigma^2));
    the exact p = 3/2 generator bound dominates this relaxation.
    """
    return 81.0 * math.sqrt(2.0 * math.pi) / 2048.0 * gaussian_upper_bound(model)


def gaussian_e_gamma_zeta(model: GaussianModel, gamma: float, zeta: float) -> float:
    """Hockey-stick dependence of the mean and the sample average.

    The inner integral over the parameter has Gaussian closed form on the
    interval where the density ratio clears gamma/zeta; the outer integral
    runs adaptively on an 8-sigma window split at the interval-birth kinks.
    """
    if zeta <= 0 or gamma < 0:
        raise ValueError("requires zeta > 0 and gamma >= 0")
    if model.n < 1:
        raise ValueError("n must be at least 1")
    if gamma == 0.0:
        return 0.0
    sw2 = model.sigma_w_sq
    s2 = model.sigma_sq / model.n
    sx2 = sw2 + s2
    kappa = sw2 / sx2            # posterior mean coefficient
    v = sw2 * s2 / sx2           # posterior variance
    sw = math.sqrt(sw2)
    sx = math.sqrt(sx2)
    sv = math.sqrt(v)

    log_t = math.log(gamma / zeta)
    coeff = s2 / sx2
    const = s2 * math.log(sx2 / s2) - 2.0 * s2 * log_t

    def integrand(x):
        x = np.asarray(x, dtype=float)
        disc = coeff * x * x + const
        has = disc > 0.0
        root = np.sqrt(np.where(has, disc, 0.0))
        w_hi = x + root
        w_lo = x - root
        post_mass = ndtr((w_hi - kappa * x) / sv) - ndtr((w_lo - kappa * x) / sv)
        prior_mass = ndtr(w_hi / sw) - ndtr(w_lo / sw)
        inner = zeta * post_mass - gamma * prior_mass
        pdf_x = np.exp(-0.5 * (x / sx) ** 2) / (sx * math.sqrt(2.0 * math.pi))
        return np.where(has, pdf_x * inner, 0.0)

    kinks = ()
    if const < 0.0:
        x0 = math.sqrt(-const / coeff)
        kinks = (-x0, x0)
    total = adaptive_simpson(integrand, -8.0 * sx, 8.0 * sx,
                             atol=1e-10, rtol=1e-9, points=kinks)
    return max(0.0, total - max(0.0, zeta - gamma))


# ----------------------------------------------------------------------
# Hide-and-seek (distributed detection, 0-1 loss)
# ----------------------------------------------------------------------

def hide_and_seek_leakage(model: HideAndSeekModel) -> float:
    """min(n*m*log(1+2*theta), log d, m*b): chain rule, support, and budget."""
    return min(
        model.n * model.m * math.log1p(2.0 * model.theta),
        math.log(model.d),
        model.m * model.b,
    )


class HideAndSeekBounds(NamedTuple):
    ml: float
    nips: float
    mi: float
    nips_valid: bool
    mi_valid: bool


def hide_and_seek_bounds(model: HideAndSeekModel) -> HideAndSeekBounds:
    """The leakage bound and the two literature baselines, clamped to [0, 1].

    ``nips_valid`` flags the sub-sampling baseline's validity region
    theta <= 1/(4n); outside it the value is still reported, flagged.
    """
    d, m, b, theta, n = model.d, model.m, model.b, model.theta, model.n
    log_d = math.log(d)

    ml = -math.expm1(hide_and_seek_leakage(model) - log_d)

    nips = 1.0 - (3.0 / d + 5.0 * math.sqrt(
        min(10.0 * theta * n * m * b / d, m * n * theta ** 2)))
    nips_valid = theta <= 1.0 / (4.0 * n)

    ratio = (1.0 - 2.0 * theta) / (1.0 + 2.0 * theta)
    mi_arm = min(
        (1.0 - ratio ** n) * m * b + 1.0,
        min(4.0 * m * n * theta ** 2, log_d) + 1.0,
    )
    mi = 1.0 - mi_arm / log_d
    mi_valid = theta <= 0.5

    clamp = lambda x: min(1.0, max(0.0, x))
    return HideAndSeekBounds(clamp(ml), clamp(nips), clamp(mi),
                             nips_valid, mi_valid)
