"""Profiles: solutions (phi, f) as functions of the reduction variable xi.

A profile supplies values and first/second derivatives of phi and f at any
xi in its domain. Closed-form gallery entries and numerically integrated
solutions share this interface, so lifting to ambient jets and residual
verification never care where a profile came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ansatz import QuadricAnsatz, xi_jet
from .errors import OutOfDomain
from .geometry import ScalarJet2


@dataclass(frozen=True)
class ProfileSample:
    """Profile data at a single xi."""

    xi: float
    phi: float
    dphi: float
    ddphi: float
    f: float
    df: float
    ddf: float


@dataclass(frozen=True)
class Termination:
    """How an integration (or closed form) ended."""

    kind: str                  # "completed", "event" or "closed_form"
    event: str | None = None   # event name when kind == "event"
    xi_stop: float | None = None
    detail: dict = field(default_factory=dict)


class Profile:
    """Interface: callable profile data over an open xi-interval."""

    xi_min: float
    xi_max: float
    termination: Termination

    def sample(self, xi: float) -> ProfileSample:
        raise NotImplementedError

    def _check_domain(self, xi: float) -> None:
        if not (self.xi_min <= xi <= self.xi_max):
            raise OutOfDomain(
                f"xi = {xi} outside [{self.xi_min}, {self.xi_max}]"
            )

    def sample_many(self, xis) -> list[ProfileSample]:
        return [self.sample(float(x)) for x in np.asarray(xis, dtype=float)]


class ClosedFormProfile(Profile):
    """Profile defined by analytic callables for phi, f and derivatives."""

    def __init__(self, phi: Callable[[float], float],
                 dphi: Callable[[float], float],
                 ddphi: Callable[[float], float],
                 f: Callable[[float], float],
                 df: Callable[[float], float],
                 ddf: Callable[[float], float],
                 domain: tuple[float, float] = (-math.inf, math.inf),
                 name: str = "closed_form"):
        self._phi, self._dphi, self._ddphi = phi, dphi, ddphi
        self._f, self._df, self._ddf = f, df, ddf
        self.xi_min, self.xi_max = domain
        self.name = name
        self.termination = Termination(kind="closed_form")

    def sample(self, xi: float) -> ProfileSample:
        self._check_domain(xi)
        return ProfileSample(
            xi=xi,
            phi=self._phi(xi), dphi=self._dphi(xi), ddphi=self._ddphi(xi),
            f=self._f(xi), df=self._df(xi), ddf=self._ddf(xi),
        )


def lift(a: QuadricAnsatz, prof: Profile,
         x: np.ndarray) -> tuple[ScalarJet2, ScalarJet2]:
    """Ambient 2-jets of phi(xi(x)) and f(xi(x)) by the chain rule.

    phi_,i = phi' xi_,i and phi_,ij = phi'' xi_,i xi_,j + phi' xi_,ij, with
    the analogous formulas for f.
    """
    jet = xi_jet(a, np.asarray(x, dtype=float))
    s = prof.sample(jet.value)
    u = jet.gradient
    uu = np.outer(u, u)
    phi_jet = ScalarJet2(s.phi, s.dphi * u, s.ddphi * uu + s.dphi * jet.hessian)
    f_jet = ScalarJet2(s.f, s.df * u, s.ddf * uu + s.df * jet.hessian)
    return phi_jet, f_jet
