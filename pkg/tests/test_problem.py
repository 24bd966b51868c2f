import math

import numpy as np
import pytest

from qualifit.errors import ConfigError, DataError
from qualifit.lang import load_constraints
from qualifit.likelihood import chi_squared_nll, total_nll
from qualifit.models import BiphasicToyModel, DecayODEModel, SimProtocol
from qualifit.observations import QuantitativePoint, ReducedBinding
from qualifit.problem import Problem
from qualifit.sampler import Prior
from qualifit.synthetic import SyntheticSpec, generate, nested_delays, read_quantitative_csv

PRIORS = [Prior.parse("A", "loguniform 0.1 10"), Prior.parse("b", "uniform 0 1"),
          Prior.parse("tau_b", "loguniform 1 1000"), Prior.parse("d", "loguniform 0.1 10"),
          Prior.parse("tau_d", "loguniform 0.1 100")]


def mixed_problem(n=16, seed=0):
    delays = nested_delays(n)
    truth = BiphasicToyModel.defaults
    two = generate(SyntheticSpec(truth=truth, delays=delays, mode="two-cat", seed=seed))
    quant = generate(SyntheticSpec(truth=truth, delays=delays[::4], mode="quantitative",
                                   seed=seed + 1))
    qual, _, _ = load_constraints(two.text)
    pts = read_quantitative_csv(quant.text)
    proto = SimProtocol(delays=delays)
    return Problem(BiphasicToyModel(), proto, PRIORS, pts, qual).check()


class TestProblem:
    def test_matches_reference_total_nll(self):
        prob = mixed_problem()
        rng = np.random.default_rng(0)
        for _ in range(20):
            theta = np.array([10 ** rng.uniform(-0.5, 0.5), rng.uniform(0, 1),
                              10 ** rng.uniform(0.5, 2.5), 10 ** rng.uniform(-0.5, 0.5),
                              10 ** rng.uniform(0, 1.5)])
            traj = prob.model.simulate(theta, prob.protocol)
            ref = total_nll(prob.quantitative, prob.qualitative, traj)
            assert prob.evaluate_theta(theta) == pytest.approx(ref, rel=1e-12)

    def test_ground_truth_beats_perturbations(self):
        prob = mixed_problem(n=64)
        truth = BiphasicToyModel().default_theta()
        base = prob.evaluate_theta(truth)
        rng = np.random.default_rng(2024)
        wins = 0
        for _ in range(100):
            u = rng.standard_normal(5)
            u *= 0.5 / np.linalg.norm(u)
            wins += base < prob.evaluate_theta(truth * 10.0 ** u)
        assert wins >= 95

    def test_free_parameters_and_fixed(self):
        model = BiphasicToyModel()
        pri = [Prior.parse("tau_d", "loguniform 0.1 100"), Prior.parse("A", "uniform 0 5")]
        prob = Problem(model, SimProtocol(delays=(1.0, 2.0)), pri, fixed={"b": 0.2})
        assert prob.param_names == ("A", "tau_d")
        full = prob.full_theta(np.array([2.0, 7.0]))
        assert full.tolist() == [2.0, 0.2, 30.0, 1.1, 7.0]
        assert prob(np.array([2.0, 7.0])) == 0.0

    def test_unknown_prior(self):
        with pytest.raises(ConfigError):
            Problem(DecayODEModel(), SimProtocol(), [Prior.parse("zz", "uniform 0 1")])

    def test_duplicate_prior(self):
        p = Prior.parse("k", "uniform 0 1")
        with pytest.raises(ConfigError):
            Problem(DecayODEModel(), SimProtocol(), [p, p])

    def test_no_priors_no_target(self):
        with pytest.raises(ConfigError):
            Problem(DecayODEModel(), SimProtocol(), []).target()

    def test_unknown_objective(self):
        with pytest.raises(ConfigError):
            Problem(DecayODEModel(), SimProtocol(), [], objective="nope")

    def test_missing_observable_named(self):
        qual, _, _ = load_constraints("y < 1 at time=1 confidence 0.9 tolerance 0.1\n")
        prob = Problem(DecayODEModel(), SimProtocol(), [Prior.parse("k", "uniform 0 2")], (), qual)
        with pytest.raises(DataError, match="'y'"):
            prob.check()

    def test_time_out_of_range(self):
        pts = [QuantitativePoint("x", 50.0, 1.0, 0.1)]
        prob = Problem(DecayODEModel(), SimProtocol(t_end=10), [Prior.parse("k", "uniform 0 2")], pts)
        with pytest.raises(DataError, match="outside"):
            prob.check()

    def test_failed_simulation_is_inf(self):
        prob = Problem(DecayODEModel(), SimProtocol(t_end=1), [Prior.parse("k", "uniform 0 2")],
                       [QuantitativePoint("x", 0.5, 0.5, 0.1)]).check()
        assert prob.evaluate_theta(np.array([math.nan, 1.0])) == math.inf
        assert prob.failures == 1

    def test_windowed_bindings(self):
        text = ("x < 0.5 once between time=1,time=3 confidence 0.9 tolerance 0.05\n"
                "x > 0.1 always confidence 0.9 tolerance 0.05\n"
                "x < 0.7 at time=0.55 confidence 0.9 tolerance 0.05\n")
        qual, _, _ = load_constraints(text)
        proto = SimProtocol(t_end=4.0, dt=0.1)
        prob = Problem(DecayODEModel(), proto, [Prior.parse("k", "uniform 0 2")], (), qual).check()
        for k in (0.1, 0.4, 1.3):
            theta = np.array([k, 1.0])
            ref = total_nll([], qual, prob.model.simulate(theta, proto))
            assert prob.evaluate_theta(theta) == pytest.approx(ref, rel=1e-12)

    def test_penalty_mode(self):
        text = ("x < 0.5 at time=1 weight 3\n"
                "x > 0.2 at time=1 confidence 0.98 tolerance 0.1\n")
        qual, pen, _ = load_constraints(text)
        proto = SimProtocol(t_end=2.0)
        pri = [Prior.parse("k", "uniform 0 5")]
        p_pen = Problem(DecayODEModel(), proto, pri, (), qual, pen, objective="penalty").check()
        p_lik = Problem(DecayODEModel(), proto, pri, (), qual, pen).check()
        x1 = math.exp(-0.1)
        assert p_pen(np.array([0.1])) == pytest.approx(3 * (x1 - 0.5), rel=1e-9)
        assert p_pen(np.array([1.0])) == 0.0
        x5 = math.exp(-5.0)
        assert p_pen(np.array([5.0])) == pytest.approx(0.2 - x5, rel=1e-6)
        # likelihood mode ignores weight statements
        assert p_lik(np.array([0.1])) == pytest.approx(
            total_nll([], qual, DecayODEModel().simulate([0.1, 1.0], proto)), rel=1e-12)

    def test_quantitative_only_is_chi_squared(self):
        pts = [QuantitativePoint("x", t, 0.5, 0.1) for t in (0.5, 1.0, 1.5)]
        proto = SimProtocol(t_end=2.0)
        prob = Problem(DecayODEModel(), proto, [Prior.parse("k", "uniform 0 2")], pts).check()
        pred = [DecayODEModel().simulate([0.7, 1.0], proto).interpolate("x", p.time) for p in pts]
        assert prob(np.array([0.7])) == pytest.approx(chi_squared_nll(pts, pred), rel=1e-12)

    def test_reduce_kernels_agree(self, kernels):
        from qualifit._kernels import _numpy
        prob = mixed_problem()
        traj = prob.model.simulate(BiphasicToyModel().default_theta(), prob.protocol)
        plan = prob._plan
        args = (traj.values, plan.lhs_row, plan.lhs_const, plan.rhs_row, plan.rhs_const,
                plan.sign, plan.mode, plan.i0, plan.w, plan.lo, plan.hi)
        np.testing.assert_allclose(kernels.reduce_bindings(*args), _numpy.reduce_bindings(*args),
                                   rtol=1e-14)
