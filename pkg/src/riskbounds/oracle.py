"""Independent ground truth: Monte-Carlo risk and brute-force divergences.

The Monte-Carlo driver uses the counter-based Philox generator: trials are
split into fixed-size blocks, block ``i`` draws from ``Philox(key=seed)``
jumped ``i`` times, and the reduction sums block totals in block order.
Results are therefore bit-for-bit reproducible for a given seed no matter
how blocks would be scheduled across workers.

`brute_force_divergence` transcribes each divergence definition as plain
per-cell loops; it deliberately shares no code with the vectorized
implementations in :mod:`riskbounds.measures` that it validates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .distributions import DiscreteJoint, DivergenceKind, DivergenceSpec
from .errors import TooLarge, UnsupportedEstimator
from .models import (
    BernoulliUniformModel,
    GaussianModel,
    HideAndSeekModel,
    NoisyBernoulliModel,
)

__all__ = ["RiskEstimate", "mc_risk", "brute_force_divergence",
           "beta_quantile", "posterior_median_bernoulli"]

_BLOCK = 1 << 15


@dataclass(frozen=True)
class RiskEstimate:
    """Monte-Carlo estimate of an expected loss."""

    mean: float
    std_error: float
    samples: int
    seed: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("standard error cannot be negative")


def beta_quantile(a, b, q, iterations: int = 50):
    """Quantiles of Beta(a, b) by bisection on the regularized
    incomplete Beta function; 50 halvings land well inside 1e-10."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    q = np.asarray(q, dtype=float)
    lo = np.zeros(np.broadcast(a, b, q).shape)
    hi = np.ones_like(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = betainc(a, b, mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def posterior_median_bernoulli(k, n: int):
    """Posterior median of a uniform-prior bias after k successes in n."""
    k = np.asarray(k, dtype=float)
    return beta_quantile(k + 1.0, n - k + 1.0, 0.5)


def _simulate_block(model, estimator: str, size: int, rng) -> np.ndarray:
    if isinstance(model, BernoulliUniformModel):
        n = model.n
        w = rng.random(size)
        k = rng.binomial(n, w)
        if estimator == "sample-mean":
            w_hat = k / n
        elif estimator == "posterior-median":
            w_hat = posterior_median_bernoulli(k, n)
        elif estimator == "posterior-mean":
            w_hat = (k + 1.0) / (n + 2.0)
        else:
            raise UnsupportedEstimator(f"{estimator!r} for Bernoulli model")
        return np.abs(w - w_hat)

    if isinstance(model, NoisyBernoulliModel):
        n, lam = model.n, model.lam
        u_span = 1.0 - 2.0 * lam
        w = rng.random(size)
        k = rng.binomial(n, lam + u_span * w)
        a = k + 1.0
        b = n - k + 1.0
        if estimator == "posterior-median":
            if u_span == 0.0:
                w_hat = np.full(size, 0.5)
            else:
                f_lo = betainc(a, b, lam)
                f_hi = betainc(a, b, 1.0 - lam)
                u_star = beta_quantile(a, b, 0.5 * (f_lo + f_hi))
                w_hat = (u_star - lam) / u_span
        elif estimator == "posterior-mean":
            if u_span == 0.0:
                w_hat = np.full(size, 0.5)
            else:
                f_lo = betainc(a, b, lam)
                f_hi = betainc(a, b, 1.0 - lam)
                g_lo = betainc(a + 1.0, b, lam)
                g_hi = betainc(a + 1.0, b, 1.0 - lam)
                mean_u = (a / (n + 2.0)) * (g_hi - g_lo) / (f_hi - f_lo)
                w_hat = (mean_u - lam) / u_span
        elif estimator == "sample-mean":
            if u_span == 0.0:
                raise UnsupportedEstimator(
                    "sample-mean is undefined at crossover 1/2")
            w_hat = np.clip((k / n - lam) / u_span, 0.0, 1.0)
        else:
            raise UnsupportedEstimator(f"{estimator!r} for noisy Bernoulli model")
        return np.abs(w - w_hat)

    if isinstance(model, GaussianModel):
        if model.n < 1:
            raise ValueError("simulation needs at least one sample")
        w = rng.normal(0.0, math.sqrt(model.sigma_w_sq), size)
        xbar = w + rng.normal(0.0, math.sqrt(model.sigma_sq / model.n), size)
        if estimator == "sample-mean":
            w_hat = xbar
        elif estimator in ("posterior-mean", "posterior-median"):
            # the posterior is Gaussian, so its mean and median coincide
            w_hat = xbar * (model.sigma_w_sq / (model.sigma_w_sq
                                                + model.sigma_sq / model.n))
        else:
            raise UnsupportedEstimator(f"{estimator!r} for Gaussian model")
        return np.abs(w - w_hat)

    if isinstance(model, HideAndSeekModel):
        raise UnsupportedEstimator(
            "the distributed detection setting exposes formulas only")
    raise TypeError(f"unknown model type {type(model).__name__!r}")


def mc_risk(model, estimator: str, trials: int = 10 ** 5,
            seed: int = 0) -> RiskEstimate:
    """Monte-Carlo estimate of the expected loss of a reference estimator.

    Requires ``trials >= 10**4``.  Deterministic in ``seed``.
    """
    if trials < 10 ** 4:
        raise ValueError("at least 10^4 trials are required")
    total = 0.0
    total_sq = 0.0
    done = 0
    block_index = 0
    base = np.random.Philox(key=seed)
    while done < trials:
        size = min(_BLOCK, trials - done)
        rng = np.random.Generator(base.jumped(block_index))
        losses = _simulate_block(model, estimator, size, rng)
        total += float(np.sum(losses))
        total_sq += float(np.sum(losses * losses))
        done += size
        block_index += 1
    mean = total / trials
    var = max(0.0, (total_sq - trials * mean * mean) / (trials - 1))
    return RiskEstimate(mean=mean, std_error=math.sqrt(var / trials),
                        samples=trials, seed=seed)


def brute_force_divergence(joint: DiscreteJoint, spec: DivergenceSpec) -> float:
    """Direct summation of the defining formula on a small discrete joint.

    Reference implementation for the measures module; refuses joints with
    more than 10^4 cells.
    """
    m = joint.matrix
    if m.size > 10 ** 4:
        raise TooLarge(f"{m.size} cells exceed the brute-force limit")
    nx, ny = m.shape
    px = [float(sum(m[i, j] for j in range(ny))) for i in range(nx)]
    py = [float(sum(m[i, j] for i in range(nx))) for j in range(ny)]
    kind = spec.kind

    if kind is DivergenceKind.SIBSON_MI:
        alpha = spec.alpha
        outer = 0.0
        for j in range(ny):
            inner = 0.0
            for i in range(nx):
                if m[i, j] > 0:
                    inner += px[i] ** (1.0 - alpha) * m[i, j] ** alpha
            outer += inner ** (1.0 / alpha)
        return alpha / (alpha - 1.0) * math.log(outer)

    if kind is DivergenceKind.MAX_LEAKAGE:
        total = 0.0
        for j in range(ny):
            total += max(m[i, j] / px[i] for i in range(nx) if px[i] > 0)
        return math.log(total)

    if kind is DivergenceKind.MUTUAL_INFORMATION:
        total = 0.0
        for i in range(nx):
            for j in range(ny):
                if m[i, j] > 0:
                    total += m[i, j] * math.log(m[i, j] / (px[i] * py[j]))
        return total

    # the remaining measures compare the joint against the marginal product
    total = 0.0
    for i in range(nx):
        for j in range(ny):
            p_cell = m[i, j]
            q_cell = px[i] * py[j]
            if kind is DivergenceKind.RENYI:
                if p_cell > 0 and q_cell == 0:
                    return math.inf
                if p_cell > 0 and q_cell > 0:
                    total += p_cell ** spec.alpha * q_cell ** (1.0 - spec.alpha)
            elif kind is DivergenceKind.KL:
                if p_cell > 0 and q_cell == 0:
                    return math.inf
                if p_cell > 0:
                    total += p_cell * math.log(p_cell / q_cell)
            elif kind is DivergenceKind.CHI_SQUARE:
                if p_cell > 0 and q_cell == 0:
                    return math.inf
                if q_cell > 0:
                    total += (p_cell - q_cell) ** 2 / q_cell
            elif kind is DivergenceKind.HELLINGER_P:
                if p_cell > 0 and q_cell == 0:
                    return math.inf
                if q_cell > 0:
                    ratio = p_cell / q_cell
                    total += q_cell * (ratio ** spec.p - 1.0) / (spec.p - 1.0)
            elif kind is DivergenceKind.E_GAMMA_ZETA:
                total += max(0.0, spec.zeta * p_cell - spec.gamma * q_cell)
            else:
                raise ValueError(f"unsupported kind {kind!r}")
    if kind is DivergenceKind.RENYI:
        return math.log(total) / (spec.alpha - 1.0)
    if kind is DivergenceKind.E_GAMMA_ZETA:
        return total - max(0.0, spec.zeta - spec.gamma)
    return total
