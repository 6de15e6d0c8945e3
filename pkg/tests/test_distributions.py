"""Construction-time invariants of the domain types."""

import numpy as np
import pytest

from riskbounds.distributions import (
    DiscreteDistribution,
    DiscreteJoint,
    DivergenceKind,
    DivergenceSpec,
    MarkovKernel,
)
from riskbounds.models import bernoulli_joint


class TestDiscreteDistribution:
    def test_valid(self):
        d = DiscreteDistribution(["a", "b"], [0.25, 0.75])
        assert len(d) == 2
        assert not d.weights.flags.writeable

    def test_mass_must_be_one(self):
        with pytest.raises(ValueError):
            DiscreteDistribution([0, 1], [0.5, 0.5 + 1e-9])

    def test_negative_weight(self):
        with pytest.raises(ValueError):
            DiscreteDistribution([0, 1], [1.5, -0.5])

    def test_duplicate_outcomes(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(["x", "x"], [0.5, 0.5])

    def test_helpers(self):
        assert np.allclose(DiscreteDistribution.uniform(4).weights, 0.25)
        assert DiscreteDistribution.delta(1, 3).weights[1] == 1.0


class TestDiscreteJoint:
    def test_marginals_consistent(self):
        j = DiscreteJoint([[0.1, 0.2], [0.3, 0.4]])
        assert np.allclose(j.x_marginal, [0.3, 0.7])
        assert np.allclose(j.y_marginal, [0.4, 0.6])
        assert np.allclose(j.product.sum(), 1.0)

    def test_mass_checked(self):
        with pytest.raises(ValueError):
            DiscreteJoint([[0.5, 0.2], [0.1, 0.1]])

    def test_from_prior_and_kernel(self):
        j = DiscreteJoint.from_prior_and_kernel([0.5, 0.5], MarkovKernel.bsc(0.2))
        assert np.allclose(j.matrix, [[0.4, 0.1], [0.1, 0.4]])

    def test_conditional_rows(self):
        j = DiscreteJoint([[0.5, 0.0], [0.25, 0.25]])
        cond = j.conditional_y_given_x()
        assert np.allclose(cond.sum(axis=1), 1.0)


class TestMarkovKernel:
    def test_row_stochastic_enforced(self):
        with pytest.raises(ValueError):
            MarkovKernel([[0.9, 0.2], [0.5, 0.5]])

    def test_bsc_and_push(self):
        k = MarkovKernel.bsc(0.2)
        assert np.allclose(k.push([1.0, 0.0]), [0.8, 0.2])
        assert np.allclose(k.push(DiscreteDistribution.uniform(2)), [0.5, 0.5])

    def test_identity(self):
        assert np.allclose(MarkovKernel.identity(3).matrix, np.eye(3))


class TestDivergenceSpec:
    def test_param_required(self):
        with pytest.raises(ValueError):
            DivergenceSpec(DivergenceKind.RENYI)

    def test_param_forbidden(self):
        with pytest.raises(ValueError):
            DivergenceSpec(DivergenceKind.KL, alpha=2.0)

    def test_renyi_excludes_one(self):
        with pytest.raises(ValueError):
            DivergenceSpec(DivergenceKind.RENYI, alpha=1.0)

    def test_hockey_stick_ranges(self):
        with pytest.raises(ValueError):
            DivergenceSpec(DivergenceKind.E_GAMMA_ZETA, gamma=-0.1, zeta=1.0)
        with pytest.raises(ValueError):
            DivergenceSpec(DivergenceKind.E_GAMMA_ZETA, gamma=1.0, zeta=0.0)
        DivergenceSpec(DivergenceKind.E_GAMMA_ZETA, gamma=0.0, zeta=2.0)


class TestMixedJoint:
    def test_bernoulli_joint_invariants(self):
        j = bernoulli_joint(4)
        # uniform prior: every weight has marginal mass 1/(n+1)
        assert np.allclose(j.observation_marginal(), 1.0 / 5.0, atol=1e-8)

    def test_bad_density_rejected(self):
        from riskbounds.distributions import MixedJoint

        with pytest.raises(ValueError):
            MixedJoint(
                density=lambda w: 2.0 * np.ones_like(np.atleast_1d(w)),
                support=(0.0, 1.0),
                observations=(0,),
                likelihood=lambda w: np.ones((1, np.atleast_1d(w).size)),
            )

    def test_bad_likelihood_rejected(self):
        from riskbounds.distributions import MixedJoint

        with pytest.raises(ValueError):
            MixedJoint(
                density=lambda w: np.ones_like(np.atleast_1d(w)),
                support=(0.0, 1.0),
                observations=(0, 1),
                likelihood=lambda w: np.vstack([
                    0.6 * np.ones(np.atleast_1d(w).size),
                    0.6 * np.ones(np.atleast_1d(w).size),
                ]),
            )
