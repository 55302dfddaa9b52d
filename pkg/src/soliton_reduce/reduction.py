"""Reduced ODE systems for conformal gradient Ricci solitons.

With phi and f functions of the quadric variable xi, the soliton system
collapses to

    (n-2) phi'' + phi f'' + 2 phi' f' = 0
    2 tau phi [2(n-1) phi' + phi f']
        + [phi phi'' - (n-1) phi'^2 - phi phi' f'] (4 tau xi + L) = lambda

with L the gradient constant of the ansatz. :func:`reduced_rhs` solves the
pair algebraically for the second derivatives. A constrained branch
(2n phi'' + phi f'' = 0, tau != 0) integrates first-order in h = phi^2,
see :func:`special_rhs`. Closed-form solutions live in :func:`gallery`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ansatz import InvarianceClass, QuadricAnsatz, classify, lambda_constant
from .errors import (
    DegenerateConformalFactor,
    InvalidGalleryParams,
    NonPositiveH,
    NullTranslationDirection,
    RequiresNonzeroTau,
    SingularLocus,
)
from .geometry import TOL_PHI, Signature
from .profiles import ClosedFormProfile, Profile

#: |4 tau xi + Lambda| below this is treated as the singular locus.
TOL_SING = 1e-10


@dataclass(frozen=True)
class ReducedState:
    """State of the second-order system as a first-order vector."""

    xi: float
    phi: float
    dphi: float
    f: float
    df: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.phi, self.dphi, self.f, self.df])

    @classmethod
    def from_vector(cls, xi: float, y: np.ndarray) -> "ReducedState":
        return cls(xi, float(y[0]), float(y[1]), float(y[2]), float(y[3]))


@dataclass(frozen=True)
class SolitonProblem:
    """Full problem statement: signature, ansatz and soliton constant."""

    sig: Signature
    ansatz: QuadricAnsatz
    lam: float

    def __post_init__(self):
        if self.ansatz.sig.n != self.sig.n or not np.array_equal(
                self.ansatz.sig.eps, self.sig.eps):
            raise ValueError("ansatz signature differs from problem signature")

    @property
    def n(self) -> int:
        return self.sig.n

    @cached_property
    def lambda_constant(self) -> float:
        return lambda_constant(self.ansatz)

    @property
    def regime(self) -> str:
        if self.lam > 0:
            return "shrinking"
        if self.lam < 0:
            return "expanding"
        return "steady"

    @property
    def invariance(self) -> InvarianceClass:
        return classify(self.ansatz)


@dataclass(frozen=True)
class SpecialParams:
    """Constants of the constrained first-order branch."""

    c1: float
    c2: float
    h0: float
    f0: float = 0.0

    def __post_init__(self):
        if self.h0 <= 0:
            raise ValueError("h0 = phi^2 at the initial point must be positive")


def check_null_direction(p: SolitonProblem) -> None:
    tau = p.ansatz.tau
    if tau == 0.0 and abs(p.lambda_constant) < TOL_SING:
        raise NullTranslationDirection(
            "tau = 0 with Lambda = 0 (lightlike direction): phi'' undetermined"
        )


def reduced_rhs(p: SolitonProblem,
                s: ReducedState) -> tuple[float, float, float, float]:
    """First-order right-hand side (phi', phi'', f', f'').

    The diagonal equation is linear in phi'' with coefficient
    phi * (4 tau xi + L); the first equation then yields f''.
    """
    check_null_direction(p)
    if abs(s.phi) <= TOL_PHI:
        raise DegenerateConformalFactor(f"|phi| = {abs(s.phi):.3e} at guard")
    tau = p.ansatz.tau
    big_t = 4.0 * tau * s.xi + p.lambda_constant
    if abs(big_t) <= TOL_SING:
        raise SingularLocus(
            f"|4*tau*xi + Lambda| = {abs(big_t):.3e} at xi = {s.xi}"
        )
    n = p.n
    ddphi = ((p.lam - 2.0 * tau * s.phi
              * (2.0 * (n - 1) * s.dphi + s.phi * s.df)) / big_t
             + (n - 1) * s.dphi ** 2 + s.phi * s.dphi * s.df) / s.phi
    ddf = -((n - 2) * ddphi + 2.0 * s.dphi * s.df) / s.phi
    return s.dphi, ddphi, s.df, ddf


def special_rhs(p: SolitonProblem, sp: SpecialParams,
                xi: float, h: float) -> float:
    """h' for the constrained branch, h = phi^2.

    (n-1) h' + c1 h^(-(n-2)/(n+2)) = c2 (4 tau xi + L) + lambda/(2 tau).
    """
    tau = p.ansatz.tau
    if tau == 0.0:
        raise RequiresNonzeroTau("lambda/(2*tau) undefined at tau = 0")
    if h <= 0.0:
        raise NonPositiveH(f"h = {h} at xi = {xi}")
    n = p.n
    expo = (n - 2) / (n + 2)
    big_t = 4.0 * tau * xi + p.lambda_constant
    return (sp.c2 * big_t + p.lam / (2.0 * tau)
            - sp.c1 * h ** (-expo)) / (n - 1)


def special_f_prime(sp: SpecialParams, n: int, h: float) -> float:
    """f' = c1 * h^(-2n/(n+2)) along the constrained branch."""
    if h <= 0.0:
        raise NonPositiveH(f"h = {h}")
    return sp.c1 * h ** (-2.0 * n / (n + 2))


def special_second_derivatives(p: SolitonProblem, sp: SpecialParams,
                               xi: float, h: float) -> tuple[float, float]:
    """(phi'', f'') reconstructed from h along the constrained branch.

    h'' comes from differentiating the first-order relation; then
    phi phi'' = h''/2 - phi'^2 and f'' = -2n/(n+2) c1 h^(-2n/(n+2)-1) h'.
    """
    n = p.n
    tau = p.ansatz.tau
    expo = (n - 2) / (n + 2)
    dh = special_rhs(p, sp, xi, h)
    ddh = (4.0 * tau * sp.c2
           + sp.c1 * expo * h ** (-expo - 1.0) * dh) / (n - 1)
    phi = math.sqrt(h)
    dphi = dh / (2.0 * phi)
    ddphi = (0.5 * ddh - dphi ** 2) / phi
    ddf = -2.0 * n / (n + 2) * sp.c1 * h ** (-2.0 * n / (n + 2) - 1.0) * dh
    return ddphi, ddf


def check_special_constraint(phi, ddphi, ddf, n: int) -> float:
    """max |2n phi'' + phi f''| over the supplied samples."""
    phi = np.asarray(phi, dtype=float)
    ddphi = np.asarray(ddphi, dtype=float)
    ddf = np.asarray(ddf, dtype=float)
    return float(np.max(np.abs(2.0 * n * ddphi + phi * ddf)))


# ---------------------------------------------------------------------------
# Closed-form gallery
# ---------------------------------------------------------------------------

GALLERY_NAMES = ("gaussian", "cigar", "space_form", "n2_polynomial")


@dataclass(frozen=True)
class GalleryEntry:
    """Closed-form solution plus the fully determined problem it solves."""

    name: str
    problem: SolitonProblem
    profile: Profile
    params: dict
    special: SpecialParams | None = None


def _default_ansatz(sig: Signature, tau: float,
                    alpha=None, beta=None) -> QuadricAnsatz:
    n = sig.n
    alpha = np.zeros(n) if alpha is None else np.asarray(alpha, dtype=float)
    beta = np.zeros(n) if beta is None else np.asarray(beta, dtype=float)
    return QuadricAnsatz(tau, alpha, beta, sig)


def _gaussian(k=1.0, tau=1.0, lam=0.0, n=3, eps=None, a2=0.0) -> GalleryEntry:
    if tau == 0.0:
        raise InvalidGalleryParams("gaussian needs tau != 0")
    if k == 0.0:
        raise InvalidGalleryParams("gaussian needs k != 0")
    sig = Signature(eps) if eps is not None else Signature.riemannian(n)
    problem = SolitonProblem(sig, _default_ansatz(sig, tau), lam)
    a1 = lam / (2.0 * tau * k ** 2)
    prof = ClosedFormProfile(
        phi=lambda xi: k, dphi=lambda xi: 0.0, ddphi=lambda xi: 0.0,
        f=lambda xi: a1 * xi + a2, df=lambda xi: a1, ddf=lambda xi: 0.0,
        name="gaussian",
    )
    return GalleryEntry("gaussian", problem, prof,
                        dict(k=k, tau=tau, lam=lam, n=sig.n, a2=a2))


def _cigar(n=2, lam=0.0, tau=1.0) -> GalleryEntry:
    if n != 2:
        raise InvalidGalleryParams("cigar exists only at n = 2")
    if lam != 0.0:
        raise InvalidGalleryParams("cigar is steady: lambda must be 0")
    if tau == 0.0:
        raise InvalidGalleryParams("cigar needs tau != 0")
    sig = Signature.riemannian(2)
    problem = SolitonProblem(sig, _default_ansatz(sig, tau), 0.0)
    prof = ClosedFormProfile(
        phi=lambda xi: math.sqrt(1.0 + xi),
        dphi=lambda xi: 0.5 / math.sqrt(1.0 + xi),
        ddphi=lambda xi: -0.25 * (1.0 + xi) ** -1.5,
        f=lambda xi: -math.log(1.0 + xi),
        df=lambda xi: -1.0 / (1.0 + xi),
        ddf=lambda xi: (1.0 + xi) ** -2.0,
        domain=(-1.0 + 1e-12, math.inf),
        name="cigar",
    )
    special = SpecialParams(c1=-1.0, c2=0.0, h0=1.0, f0=0.0)
    return GalleryEntry("cigar", problem, prof,
                        dict(n=2, lam=0.0, tau=tau), special=special)


def _space_form(b1=1.0, b2=1.0, tau=1.0, n=3, eps=None,
                alpha=None, beta=None, f0=0.0) -> GalleryEntry:
    if b1 == 0.0:
        raise InvalidGalleryParams("space_form needs b1 != 0 (else gaussian)")
    sig = Signature(eps) if eps is not None else Signature.riemannian(n)
    ansatz = _default_ansatz(sig, tau, alpha, beta)
    lam_const = lambda_constant(ansatz)
    forced_lam = (sig.n - 1) * b1 * (4.0 * tau * b2 - b1 * lam_const)
    problem = SolitonProblem(sig, ansatz, forced_lam)
    zero = -b2 / b1
    domain = (zero + 1e-12, math.inf) if b1 > 0 else (-math.inf, zero - 1e-12)
    prof = ClosedFormProfile(
        phi=lambda xi: b1 * xi + b2,
        dphi=lambda xi: b1, ddphi=lambda xi: 0.0,
        f=lambda xi: f0, df=lambda xi: 0.0, ddf=lambda xi: 0.0,
        domain=domain, name="space_form",
    )
    return GalleryEntry("space_form", problem, prof,
                        dict(b1=b1, b2=b2, tau=tau, n=sig.n, f0=f0,
                             forced_lambda=forced_lam))


def _antiderivative_reciprocal_quadratic(a: float, b: float, c: float):
    """Antiderivative of 1/(a x^2 + b x + c) on a component where it is > 0."""
    if a == 0.0 and b == 0.0:
        return lambda x: x / c
    if a == 0.0:
        return lambda x: math.log(abs(b * x + c)) / b
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        root = math.sqrt(-disc)
        return lambda x: 2.0 / root * math.atan((2.0 * a * x + b) / root)
    if disc == 0.0:
        return lambda x: -2.0 / (2.0 * a * x + b)
    root = math.sqrt(disc)
    return lambda x: (1.0 / root) * math.log(
        abs((2.0 * a * x + b - root) / (2.0 * a * x + b + root)))


def _positive_component(a: float, b: float, c: float,
                        anchor: float) -> tuple[float, float]:
    """Connected component of {a x^2 + b x + c > 0} containing anchor."""
    poly = np.array([a, b, c])
    if a == 0.0 and b == 0.0:
        if c <= 0:
            raise InvalidGalleryParams("h is a non-positive constant")
        return (-math.inf, math.inf)
    if np.polyval(poly, anchor) <= 0.0:
        raise InvalidGalleryParams(f"h(anchor={anchor}) must be positive")
    roots = sorted(r.real for r in np.roots(poly) if abs(r.imag) < 1e-12)
    lo, hi = -math.inf, math.inf
    for r in roots:
        if r < anchor:
            lo = max(lo, r)
        elif r > anchor:
            hi = min(hi, r)
    pad = 1e-12
    lo = lo + pad if math.isfinite(lo) else lo
    hi = hi - pad if math.isfinite(hi) else hi
    return lo, hi


def _n2_polynomial(c1=0.0, c2=0.0, c3=1.0, tau=1.0, lam=0.0, eps=None,
                   alpha=None, beta=None, f0=0.0,
                   xi_anchor=0.0) -> GalleryEntry:
    if tau == 0.0:
        raise InvalidGalleryParams("n2_polynomial needs tau != 0")
    sig = Signature(eps) if eps is not None else Signature.riemannian(2)
    if sig.n != 2:
        raise InvalidGalleryParams("n2_polynomial is the n = 2 closed form")
    ansatz = _default_ansatz(sig, tau, alpha, beta)
    lam_const = lambda_constant(ansatz)
    problem = SolitonProblem(sig, ansatz, lam)
    # h = a xi^2 + b xi + c
    a = 2.0 * c2 * tau
    b = c2 * lam_const + lam / (2.0 * tau) - c1
    c = c3
    domain = _positive_component(a, b, c, xi_anchor)
    prim = _antiderivative_reciprocal_quadratic(a, b, c)
    f_off = f0 - c1 * prim(xi_anchor)

    def h(xi):
        return (a * xi + b) * xi + c

    def dh(xi):
        return 2.0 * a * xi + b

    def phi(xi):
        return math.sqrt(h(xi))

    def dphi(xi):
        return dh(xi) / (2.0 * phi(xi))

    def ddphi(xi):
        return (a - dphi(xi) ** 2) / phi(xi)

    prof = ClosedFormProfile(
        phi=phi, dphi=dphi, ddphi=ddphi,
        f=lambda xi: f_off + c1 * prim(xi),
        df=lambda xi: c1 / h(xi),
        ddf=lambda xi: -c1 * dh(xi) / h(xi) ** 2,
        domain=domain, name="n2_polynomial",
    )
    special = SpecialParams(c1=c1, c2=c2, h0=h(xi_anchor), f0=f0)
    return GalleryEntry("n2_polynomial", problem, prof,
                        dict(c1=c1, c2=c2, c3=c3, tau=tau, lam=lam,
                             f0=f0, xi_anchor=xi_anchor), special=special)


_GALLERY = {
    "gaussian": _gaussian,
    "cigar": _cigar,
    "space_form": _space_form,
    "n2_polynomial": _n2_polynomial,
}


def gallery(name: str, **params) -> GalleryEntry:
    """Instantiate a closed-form solution by name."""
    try:
        builder = _GALLERY[name]
    except KeyError:
        raise InvalidGalleryParams(
            f"unknown gallery entry {name!r}; choose from {GALLERY_NAMES}"
        ) from None
    return builder(**params)
