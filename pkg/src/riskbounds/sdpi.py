"""Contraction coefficients for discrete Markov kernels.

The Dobrushin coefficient upper-bounds the contraction of every convex-
generator divergence, the operator-convex closed form covers the binary
symmetric channel, and `renyi_sdpi_ratio` reproduces the fact that Renyi
divergences can contract strictly slower than the Dobrushin coefficient.
Sampling-based estimates of the contraction constant are diagnostics
only; bound computations use the closed forms.
"""

from __future__ import annotations

import math

import numpy as np

from .distributions import DiscreteDistribution, DivergenceKind, DivergenceSpec, MarkovKernel
from .errors import EtaOutOfRange, LambdaOutOfRange, ZeroDenominator
from . import measures

__all__ = [
    "dobrushin_coefficient",
    "eta_operator_convex_bsc",
    "eta_hellinger_bsc_upper",
    "tensorize_eta",
    "ldp_contraction_bound",
    "renyi_sdpi_ratio",
    "eta_estimate_by_sampling",
]


def dobrushin_coefficient(kernel: MarkovKernel) -> float:
    """Maximum total-variation distance between any two kernel rows."""
    m = kernel.matrix
    worst = 0.0
    for i in range(m.shape[0]):
        diff = np.abs(m[i + 1:] - m[i]).sum(axis=1)
        if diff.size:
            worst = max(worst, 0.5 * float(diff.max()))
    return min(1.0, worst)


def eta_operator_convex_bsc(lam: float) -> float:
    """Contraction constant (1-2*lam)^2 of a BSC for operator-convex generators."""
    if not 0.0 <= lam <= 0.5:
        raise LambdaOutOfRange(f"crossover {lam!r} outside [0, 1/2]")
    return (1.0 - 2.0 * lam) ** 2


def eta_hellinger_bsc_upper(lam: float, p: float) -> float:
    """Upper bound on the BSC contraction constant for Hellinger order ``p``.

    Exact and equal to (1-2*lam)^2 for 1 < p <= 2 (operator-convex range);
    for p > 2 only the weaker bound |1-2*lam| is returned, and it is an
    upper bound, not an equality.
    """
    if not 0.0 <= lam <= 0.5:
        raise LambdaOutOfRange(f"crossover {lam!r} outside [0, 1/2]")
    if p <= 1.0:
        raise ValueError("Hellinger order must exceed 1")
    if p <= 2.0:
        return (1.0 - 2.0 * lam) ** 2
    return abs(1.0 - 2.0 * lam)


def tensorize_eta(eta: float, n: int, mode: str) -> float:
    """Contraction constant of the n-fold product channel.

    ``max-preserving`` keeps the single-letter constant (valid when the
    reference measure is itself a product); ``power`` returns the generic
    operator-convex tensorization 1 - (1-eta)^n.
    """
    if not 0.0 <= eta <= 1.0:
        raise EtaOutOfRange(f"eta={eta!r} outside [0, 1]")
    if n < 1:
        raise ValueError("n must be at least 1")
    if mode == "max-preserving":
        return eta
    if mode == "power":
        return 1.0 - (1.0 - eta) ** n
    raise ValueError(f"unknown tensorization mode {mode!r}")


def ldp_contraction_bound(epsilon: float, delta: float) -> float:
    """Contraction bound 1-(1-delta)e^{-epsilon} of an (epsilon, delta)-private kernel."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    return min(1.0, 1.0 - (1.0 - delta) * math.exp(-epsilon))


def renyi_sdpi_ratio(kernel: MarkovKernel, mu, nu, alpha: float) -> float:
    """Ratio D_alpha(nu K || mu K) / D_alpha(nu || mu) of a kernel pass."""
    mu_w = mu.weights if isinstance(mu, DiscreteDistribution) else np.asarray(mu, float)
    nu_w = nu.weights if isinstance(nu, DiscreteDistribution) else np.asarray(nu, float)
    denom = measures.renyi_divergence(nu_w, mu_w, alpha)
    if denom == 0.0:
        raise ZeroDenominator("reference divergence is 0 (nu equals mu)")
    num = measures.renyi_divergence(kernel.push(nu_w), kernel.push(mu_w), alpha)
    return num / denom


def _pair_divergence(p, q, spec: DivergenceSpec) -> float:
    kind = spec.kind
    if kind is DivergenceKind.KL:
        return measures.kl_divergence(p, q)
    if kind is DivergenceKind.CHI_SQUARE:
        return measures.chi_square(p, q)
    if kind is DivergenceKind.HELLINGER_P:
        return measures.hellinger_p(p, q, spec.p)
    if kind is DivergenceKind.E_GAMMA_ZETA:
        return measures.hockey_stick(p, q, spec.gamma, spec.zeta)
    if kind is DivergenceKind.RENYI:
        return measures.renyi_divergence(p, q, spec.alpha)
    raise ValueError(f"{kind.value} is not a two-measure divergence")


def eta_estimate_by_sampling(kernel: MarkovKernel, spec: DivergenceSpec,
                             n_pairs: int = 200, seed: int = 0,
                             include_local: bool = True) -> float:
    """Empirical lower estimate of the contraction constant by pair sampling.

    Draws random (mu, nu) pairs, plus (when ``include_local``) small
    perturbations of each mu, which probe the local regime where the
    chi-square contraction constant is attained.  Degenerate nu = mu
    pairs are skipped.
    """
    rng = np.random.default_rng(seed)
    k = kernel.n_inputs
    best = 0.0
    for _ in range(n_pairs):
        mu = rng.dirichlet(np.ones(k))
        nu = rng.dirichlet(np.ones(k))
        candidates = [(mu, nu)]
        if include_local:
            step = rng.normal(size=k)
            step -= step.mean()
            scale = 1e-4 / max(1e-12, float(np.abs(step).max()))
            shifted = mu + scale * step
            if np.all(shifted > 0):
                candidates.append((mu, shifted / shifted.sum()))
        for base, other in candidates:
            denom = _pair_divergence(other, base, spec)
            if not (denom > 0.0) or denom == math.inf:
                continue
            num = _pair_divergence(kernel.push(other), kernel.push(base), spec)
            best = max(best, num / denom)
    return best
