import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcr.linalg import Rng
from rcr.losses import BinaryLossKind, binary_loss
from rcr.oracle import (
    BayesPair,
    RegretSample,
    SpecError,
    SyntheticSpec,
    bayes_pair,
    conditional_surrogate_risk,
    decision_agreement,
    default_t_grid,
    pointwise_surrogate_minimizer,
    random_regret_samples,
    regret_check,
    sample_synthetic,
    write_regret_csv,
    xi_bound,
)

STEP = {"type": "step", "threshold": None, "v_low": 1.0, "v_high": 25.0}


class TestSyntheticSpec:
    def test_near_noiseless(self):
        spec = SyntheticSpec(2, mean_fn={"type": "linear", "w": [1.0, -2.0], "b": 0.5},
                             var_fn={"type": "constant", "v": 1e-12})
        ds = sample_synthetic(spec, 500, Rng(0))
        np.testing.assert_allclose(ds.targets, spec.mean(ds.features), atol=1e-5)

    def test_step_variance_moments(self):
        spec = SyntheticSpec(1, mean_fn={"type": "sine", "amplitude": 2.0, "frequency": 3.0}, var_fn=STEP)
        ds = sample_synthetic(spec, 100_000, Rng(1))
        resid = ds.targets - spec.mean(ds.features)
        low = ds.features[:, 0] <= 0.0
        assert resid[low].var() == pytest.approx(1.0, rel=0.05)
        assert resid[~low].var() == pytest.approx(25.0, rel=0.05)

    def test_deterministic(self):
        spec = SyntheticSpec()
        a, b = sample_synthetic(spec, 50, Rng(4)), sample_synthetic(spec, 50, Rng(4))
        assert np.array_equal(a.features, b.features) and np.array_equal(a.targets, b.targets)

    def test_invalid(self):
        with pytest.raises(SpecError):
            SyntheticSpec(var_fn={"type": "constant", "v": 0.0})
        with pytest.raises(SpecError):
            SyntheticSpec(2, mean_fn={"type": "linear", "w": [1.0]})
        with pytest.raises(SpecError):
            SyntheticSpec(low=1.0, high=1.0)
        with pytest.raises(SpecError):
            SyntheticSpec(var_fn={"type": "quadratic", "a": 1.0, "b": -0.5})

    def test_dict_round_trip(self):
        spec = SyntheticSpec(2, mean_fn={"type": "sine", "amplitude": 1.0, "frequency": 2.0}, var_fn=STEP)
        assert SyntheticSpec.from_dict(spec.to_dict()) == spec


class TestBayesPair:
    def spec(self, v):
        return SyntheticSpec(1, mean_fn={"type": "linear", "w": [0.0], "b": 3.0}, var_fn={"type": "constant", "v": v})

    def test_accept_when_cost_exceeds_variance(self):
        assert bayes_pair(self.spec(4.0), [0.2], 9.0) == (3.0, True)

    def test_reject_when_variance_exceeds_cost(self):
        assert bayes_pair(self.spec(16.0), [0.2], 9.0) == (3.0, False)

    def test_zero_cost_rejects(self):
        assert bayes_pair(self.spec(0.01), [0.0], 0.0)[1] is False

    def test_dimension(self):
        with pytest.raises(SpecError):
            bayes_pair(self.spec(1.0), [0.0, 1.0], 1.0)


class TestMinimizer:
    def test_logistic_accepts(self):
        a, t = pointwise_surrogate_minimizer(2.0, 1.0, 4.0, "logistic",
                                             a_grid=np.arange(-500, 501) * 0.01, t_grid=default_t_grid())
        assert abs(a - 2.0) <= 0.01 and t > 0

    def test_logistic_rejects(self):
        assert pointwise_surrogate_minimizer(2.0, 9.0, 4.0, "logistic")[1] < 0

    @pytest.mark.parametrize("kind", list(BinaryLossKind))
    def test_equals_product_grid_sweep(self, kind):
        rng = np.random.default_rng(5)
        a_grid = np.round(np.arange(-300, 301) * 0.01, 10)
        t_grid = np.round(np.arange(-300, 301) * 0.02, 10)
        for _ in range(5):
            mu, var, c = rng.uniform(-2, 2), rng.uniform(0.1, 5), rng.uniform(0, 5)
            risk = conditional_surrogate_risk(a_grid[:, None], t_grid[None, :], mu, var, c, kind)
            best = risk.min()
            ii, jj = np.nonzero(risk == best)
            order = np.lexsort((a_grid[ii], t_grid[jj], np.abs(t_grid[jj])))
            expect = (a_grid[ii[order[0]]], t_grid[jj[order[0]]])
            got = pointwise_surrogate_minimizer(mu, var, c, kind, a_grid, t_grid)
            assert got == pytest.approx(expect, abs=0)

    def test_errors(self):
        with pytest.raises(ValueError):
            pointwise_surrogate_minimizer(0.0, 1.0, 1.0, "logistic", a_grid=[], t_grid=[0.0])
        with pytest.raises(ValueError):
            pointwise_surrogate_minimizer(0.0, 0.0, 1.0, "logistic")


class TestXi:
    def test_hinge(self):
        assert xi_bound("hinge", 0.3, 1.0, 1.0) == 0.3

    def test_logistic(self):
        assert xi_bound("logistic", 0.1, 2.0, 3.0) == pytest.approx(0.2)
        assert xi_bound("logistic", 10.0, 2.0, 3.0) == pytest.approx(2 * math.sqrt(50))

    @pytest.mark.parametrize("kind", ["hinge", "sigmoid", "logistic", "square"])
    def test_zero(self, kind):
        assert xi_bound(kind, 0.0, 3.0, 4.0) == 0.0

    def test_mae_has_none(self):
        with pytest.raises(ValueError):
            xi_bound("mae", 0.1, 1.0, 1.0)


class TestRegretCheck:
    @pytest.mark.parametrize("kind", ["hinge", "sigmoid", "logistic", "square"])
    def test_zero_regret_point(self, kind):
        # optimal regressor; rejector output at the surrogate's own minimiser
        mu, var, c = 1.0, 2.0, 5.0
        t = default_t_grid()
        t_star = t[np.argmin(var * binary_loss(kind, t, -1.0) + c * binary_loss(kind, t, 1.0))]
        res = regret_check(RegretSample(mu, var, c, mu, float(t_star)), kind)
        assert res.target_regret == 0.0
        assert res.surrogate_regret == pytest.approx(0.0, abs=1e-12)
        assert res.holds

    def test_wrong_decision_hinge(self):
        res = regret_check(RegretSample(0.0, 9.0, 1.0, 0.0, 2.0), "hinge")
        assert res.target_regret == pytest.approx(8.0)
        assert res.holds

    def test_mae_rejected(self):
        with pytest.raises(ValueError):
            regret_check(RegretSample(0.0, 1.0, 1.0, 0.0, 0.0), "mae")

    def test_sample_validation(self):
        with pytest.raises(ValueError):
            RegretSample(0.0, 0.0, 1.0, 0.0, 0.0)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-5, 5), st.floats(0.1, 10), st.floats(0, 10), st.floats(-10, 10), st.floats(-5, 5),
           st.sampled_from(["hinge", "sigmoid", "logistic", "square"]))
    def test_regrets_are_non_negative(self, mu, var, c, h, r, kind):
        res = regret_check(RegretSample(mu, var, c, h, r), kind)
        assert res.target_regret >= 0 and res.surrogate_regret >= 0

    def test_samples_in_range(self):
        s = random_regret_samples(1000, Rng(0))
        assert all(0 < x.var <= 10 and 0 <= x.c <= 10 for x in s)

    def test_csv(self, tmp_path):
        res = [regret_check(x, "hinge") for x in random_regret_samples(5, Rng(0))]
        lines = write_regret_csv(res, tmp_path / "r.csv").read_text().splitlines()
        assert lines[0] == "kind,target_regret,surrogate_regret,bound,holds"
        assert len(lines) == 6


class TestAgreement:
    def test_self_agreement(self):
        spec = SyntheticSpec(1, var_fn=STEP)
        assert decision_agreement(BayesPair(spec, 9.0), spec, 9.0, 5000, Rng(0)) == 1.0

    def test_constant_reject(self):
        # box [0, 1], step at 0.7: the optimal pair accepts 70% of inputs
        spec = SyntheticSpec(1, low=0.0, high=1.0,
                             var_fn={"type": "step", "threshold": 0.7, "v_low": 1.0, "v_high": 25.0})

        class RejectAll:
            def predict(self, x):
                return np.zeros(len(x)), -np.ones(len(x))

        assert decision_agreement(RejectAll(), spec, 9.0, 100_000, Rng(1)) == pytest.approx(0.3, abs=0.01)
