"""The embedded Runge-Kutta integrator: accuracy, dense output, events,
domain handling and determinism."""

import math

import numpy as np
import pytest

from soliton_reduce import Event, IntegrationConfig, convergence_order, integrate
from soliton_reduce.errors import DomainError, EventAtStart


def exp_rhs(t, y):
    return y


def circle_rhs(t, y):
    return np.array([-y[1], y[0]])


class TestAccuracy:
    def test_exponential(self):
        sol = integrate(exp_rhs, [1.0], IntegrationConfig(
            xi_span=(0.0, 1.0), rel_tol=1e-12, abs_tol=1e-12))
        assert sol.termination.kind == "completed"
        assert sol.ys[-1][0] == pytest.approx(math.e, abs=1e-10)

    def test_backward(self):
        sol = integrate(exp_rhs, [1.0], IntegrationConfig(
            xi_span=(0.0, -1.0), rel_tol=1e-12, abs_tol=1e-12))
        assert sol.ys[-1][0] == pytest.approx(1.0 / math.e, abs=1e-10)

    def test_tolerance_monotonicity(self):
        errs = []
        for rtol in (1e-4, 1e-7, 1e-10):
            sol = integrate(circle_rhs, [1.0, 0.0], IntegrationConfig(
                xi_span=(0.0, 2 * math.pi), rel_tol=rtol, abs_tol=rtol))
            errs.append(float(np.linalg.norm(sol.ys[-1] - [1.0, 0.0])))
        assert errs[0] > errs[1] > errs[2]

    def test_convergence_order(self):
        # Fifth-order scheme: step-halving slope close to 5.
        order = convergence_order(
            lambda t, y: np.array([y[0] * math.cos(t)]), [1.0],
            IntegrationConfig(xi_span=(0.0, 2.0)),
            reference=lambda t: np.array([math.exp(math.sin(t))]),
            steps=16)
        assert 4.2 <= order <= 5.8

    def test_fixed_step_hits_endpoint(self):
        sol = integrate(exp_rhs, [1.0], IntegrationConfig(
            xi_span=(0.0, 1.0), fixed_step=0.3))
        assert sol.ts[-1] == pytest.approx(1.0, abs=1e-12)


class TestDenseOutput:
    def test_reproduces_nodes(self):
        sol = integrate(circle_rhs, [1.0, 0.0], IntegrationConfig(
            xi_span=(0.0, 3.0), rel_tol=1e-10, abs_tol=1e-12))
        for t, y in zip(sol.ts, sol.ys):
            assert np.allclose(sol.eval(float(t)), y, atol=1e-9)

    def test_midpoints_accurate(self):
        sol = integrate(circle_rhs, [1.0, 0.0], IntegrationConfig(
            xi_span=(0.0, 3.0), rel_tol=1e-10, abs_tol=1e-12))
        for t in np.linspace(0.05, 2.95, 37):
            exact = np.array([math.cos(t), math.sin(t)])
            assert np.linalg.norm(sol.eval(float(t)) - exact) < 1e-8

    def test_out_of_range(self):
        sol = integrate(exp_rhs, [1.0],
                        IntegrationConfig(xi_span=(0.0, 1.0)))
        with pytest.raises(ValueError):
            sol.eval(2.0)


class TestEvents:
    def test_linear_crossing(self):
        # y' = -1 from 1: the event y <= 0 fires at t = 1.
        ev = Event("zero", lambda t, y: y[0])
        sol = integrate(lambda t, y: np.array([-1.0]), [1.0],
                        IntegrationConfig(xi_span=(0.0, 5.0), events=(ev,)))
        assert sol.termination.kind == "event"
        assert sol.termination.event == "zero"
        assert sol.termination.xi_stop == pytest.approx(1.0, abs=1e-9)
        # Stop state sits on the admissible (positive) side.
        assert sol.ys[-1][0] >= 0.0
        # No states past the event.
        assert np.all(sol.ts <= sol.termination.xi_stop + 1e-12)

    def test_event_at_start(self):
        ev = Event("zero", lambda t, y: y[0])
        with pytest.raises(EventAtStart):
            integrate(lambda t, y: np.array([-1.0]), [0.0],
                      IntegrationConfig(xi_span=(0.0, 1.0), events=(ev,)))

    def test_earliest_event_wins(self):
        ev1 = Event("late", lambda t, y: 2.0 - t)
        ev2 = Event("early", lambda t, y: 1.0 - t)
        sol = integrate(lambda t, y: np.array([0.0]), [1.0],
                        IntegrationConfig(xi_span=(0.0, 5.0),
                                          events=(ev1, ev2),
                                          max_step=5.0))
        assert sol.termination.event == "early"
        assert sol.termination.xi_stop == pytest.approx(1.0, abs=1e-9)

    def test_domain_error_terminates_at_boundary(self):
        # RHS undefined for t > 2: repeated rejections end with a domain
        # event at the last reachable node.
        def rhs(t, y):
            if t > 2.0:
                raise DomainError("wall")
            return np.array([1.0])

        sol = integrate(rhs, [0.0],
                        IntegrationConfig(xi_span=(0.0, 3.0)))
        assert sol.termination.kind == "event"
        assert sol.termination.event == "domain_boundary"
        assert sol.termination.xi_stop == pytest.approx(2.0, abs=1e-6)
        assert sol.termination.xi_stop <= 2.0


class TestDeterminism:
    def test_bit_identical_repeats(self):
        cfg = IntegrationConfig(xi_span=(0.0, 3.0), rel_tol=1e-9,
                                abs_tol=1e-11)
        a = integrate(circle_rhs, [1.0, 0.0], cfg)
        b = integrate(circle_rhs, [1.0, 0.0], cfg)
        assert np.array_equal(a.ts, b.ts)
        assert np.array_equal(a.ys, b.ys)
        assert a.n_accepted == b.n_accepted
        assert a.n_fev == b.n_fev


class TestConfigValidation:
    def test_bad_tolerances(self):
        with pytest.raises(ValueError):
            IntegrationConfig(xi_span=(0.0, 1.0), rel_tol=0.0)

    def test_degenerate_span(self):
        with pytest.raises(ValueError):
            IntegrationConfig(xi_span=(1.0, 1.0))
