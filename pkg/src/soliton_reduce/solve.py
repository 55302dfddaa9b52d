"""Drivers tying the reduced systems to the integrator, plus profiles
backed by numeric solutions and by CSV node data.

Numeric profiles reconstruct second derivatives from the right-hand side
at query time, so the algebraic relations between (phi'', f'') and the
first-order data hold exactly along the dense output. CSV-backed profiles
cannot do that without assuming the conclusion (the RHS *defines* the
second derivatives by the equations under test), so they differentiate
spline fits of the stored first-derivative columns instead; their residual
floor is the spline reconstruction error, not machine epsilon.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ProfileMalformed
from .geometry import TOL_PHI
from .profiles import Profile, ProfileSample
from .reduction import (
    TOL_SING,
    ReducedState,
    SolitonProblem,
    SpecialParams,
    check_null_direction,
    reduced_rhs,
    special_f_prime,
    special_rhs,
    special_second_derivatives,
)
from .rk import Event, IntegrationConfig, RawSolution, integrate

#: h = phi^2 guard for the constrained branch.
TOL_H = 1e-12

DEFAULT_BLOWUP = 1e8


def _span_bounds(sol: RawSolution) -> tuple[float, float]:
    a, b = sol.t_start, sol.t_end
    return (a, b) if a <= b else (b, a)


class ReducedProfile(Profile):
    """Numerically integrated solution of the full second-order system."""

    def __init__(self, problem: SolitonProblem, sol: RawSolution):
        self.problem = problem
        self.solution = sol
        self.xi_min, self.xi_max = _span_bounds(sol)
        self.termination = sol.termination

    @property
    def nodes(self) -> np.ndarray:
        return self.solution.ts

    @property
    def states(self) -> np.ndarray:
        return self.solution.ys

    def sample(self, xi: float) -> ProfileSample:
        self._check_domain(xi)
        y = self.solution.eval(xi)
        state = ReducedState.from_vector(xi, y)
        _, ddphi, _, ddf = reduced_rhs(self.problem, state)
        return ProfileSample(xi=xi, phi=state.phi, dphi=state.dphi,
                             ddphi=ddphi, f=state.f, df=state.df, ddf=ddf)


class SpecialProfile(Profile):
    """Numerically integrated solution of the constrained branch."""

    def __init__(self, problem: SolitonProblem, sp: SpecialParams,
                 sol: RawSolution):
        self.problem = problem
        self.special = sp
        self.solution = sol
        self.xi_min, self.xi_max = _span_bounds(sol)
        self.termination = sol.termination

    @property
    def nodes(self) -> np.ndarray:
        return self.solution.ts

    def sample(self, xi: float) -> ProfileSample:
        self._check_domain(xi)
        h, f = self.solution.eval(xi)
        p, sp = self.problem, self.special
        dh = special_rhs(p, sp, xi, h)
        phi = math.sqrt(h)
        dphi = dh / (2.0 * phi)
        df = special_f_prime(sp, p.n, h)
        ddphi, ddf = special_second_derivatives(p, sp, xi, h)
        return ProfileSample(xi=xi, phi=phi, dphi=dphi, ddphi=ddphi,
                             f=f, df=df, ddf=ddf)


def _blowup_event(components, threshold: float) -> Event:
    def g(t, y):
        return threshold - max(abs(y[c]) for c in components)
    return Event("field_blowup", g)


def reduced_events(p: SolitonProblem, initial: ReducedState,
                   blowup: float = DEFAULT_BLOWUP) -> tuple[Event, ...]:
    """Default stop conditions for the second-order system.

    Sign-based so crossings cannot be skipped: each function goes negative
    past its locus and stays negative.
    """
    # Thresholds sit at twice the RHS guards so events fire while the RHS
    # is still evaluable on the admissible side.
    sign_phi = math.copysign(1.0, initial.phi)
    events = [Event("phi_zero", lambda t, y: sign_phi * y[0] - 2.0 * TOL_PHI)]
    tau = p.ansatz.tau
    if tau != 0.0:
        big_t0 = 4.0 * tau * initial.xi + p.lambda_constant
        sign_t = math.copysign(1.0, big_t0)
        events.append(Event(
            "singular_locus",
            lambda t, y: sign_t * (4.0 * tau * t + p.lambda_constant)
            - 2.0 * TOL_SING,
        ))
    events.append(_blowup_event((0, 1, 3), blowup))
    return tuple(events)


def special_events(blowup: float = DEFAULT_BLOWUP) -> tuple[Event, ...]:
    return (
        Event("h_zero", lambda t, y: y[0] - TOL_H),
        _blowup_event((0,), blowup),
    )


def solve_reduced(p: SolitonProblem, initial: ReducedState,
                  cfg: IntegrationConfig) -> ReducedProfile:
    """Integrate the second-order system from the given state."""
    check_null_direction(p)
    if cfg.xi_span[0] != initial.xi:
        raise ValueError("xi_span must start at the initial state's xi")

    def rhs(t, y):
        return np.array(reduced_rhs(p, ReducedState.from_vector(t, y)))

    events = cfg.events or reduced_events(p, initial)
    run = IntegrationConfig(xi_span=cfg.xi_span, rel_tol=cfg.rel_tol,
                            abs_tol=cfg.abs_tol, max_step=cfg.max_step,
                            first_step=cfg.first_step, events=events)
    sol = integrate(rhs, initial.as_vector(), run)
    return ReducedProfile(p, sol)


def solve_special(p: SolitonProblem, sp: SpecialParams,
                  cfg: IntegrationConfig) -> SpecialProfile:
    """Integrate the constrained first-order branch from h0 at span start."""

    def rhs(t, y):
        h = y[0]
        return np.array([special_rhs(p, sp, t, h),
                         special_f_prime(sp, p.n, h)])

    events = cfg.events or special_events()
    run = IntegrationConfig(xi_span=cfg.xi_span, rel_tol=cfg.rel_tol,
                            abs_tol=cfg.abs_tol, max_step=cfg.max_step,
                            first_step=cfg.first_step, events=events)
    sol = integrate(rhs, np.array([sp.h0, sp.f0]), run)
    return SpecialProfile(p, sp, sol)


class NodeProfile(Profile):
    """Profile reconstructed from sampled (xi, phi, dphi, f, df) rows.

    phi and f values interpolate their own columns; first derivatives come
    from cubic splines of the dphi/df columns, second derivatives from the
    spline derivatives. Nothing is taken from the reduced equations, so
    residual verification of this profile is a genuine check of the stored
    data. Accuracy is limited by the node spacing (O(h^3) on the second
    derivatives).
    """

    def __init__(self, xi, phi, dphi, f, df):
        xi = np.asarray(xi, dtype=float)
        if xi.size < 4:
            raise ProfileMalformed("need at least 4 profile rows")
        cols = [np.asarray(c, dtype=float) for c in (phi, dphi, f, df)]
        if any(c.size != xi.size for c in cols):
            raise ProfileMalformed("column lengths differ")
        order = np.argsort(xi)
        xi = xi[order]
        if np.any(np.diff(xi) <= 0):
            raise ProfileMalformed("xi column must be strictly monotone")
        cols = [c[order] for c in cols]
        if not all(np.all(np.isfinite(c)) for c in [xi, *cols]):
            raise ProfileMalformed("non-finite values in profile")
        phi, dphi, f, df = cols
        self._phi = CubicSpline(xi, phi)
        self._dphi = CubicSpline(xi, dphi)
        self._f = CubicSpline(xi, f)
        self._df = CubicSpline(xi, df)
        self.nodes = xi
        self.xi_min, self.xi_max = float(xi[0]), float(xi[-1])
        self.termination = None

    def sample(self, xi: float) -> ProfileSample:
        self._check_domain(xi)
        return ProfileSample(
            xi=xi,
            phi=float(self._phi(xi)),
            dphi=float(self._dphi(xi)),
            ddphi=float(self._dphi(xi, 1)),
            f=float(self._f(xi)),
            df=float(self._df(xi)),
            ddf=float(self._df(xi, 1)),
        )
