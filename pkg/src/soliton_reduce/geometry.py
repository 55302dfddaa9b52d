"""Curvature of conformally rescaled flat pseudo-Riemannian metrics.

The background is R^n with the diagonal metric g_ij = delta_ij * eps_i,
eps_i = +/-1. Everything here evaluates exact closed-form expressions for
the rescaled metric gbar = g / phi^2 at a single point, given second-order
jets (value, gradient, Hessian) of the scalar fields involved. No numerical
differentiation happens in this module; finite differences live only in the
independent oracle in :mod:`soliton_reduce.verify`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConformalFactor

#: Below this |phi|, 1/phi^2 carries no significance in double precision.
TOL_PHI = 1e-12


@dataclass(frozen=True)
class Signature:
    """Diagonal signs eps_i of the flat background metric."""

    eps: np.ndarray

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        if eps.ndim != 1 or eps.size < 2:
            raise ValueError("signature needs at least 2 entries")
        if not np.all(np.abs(eps) == 1.0):
            raise ValueError("signature entries must be +1 or -1")
        if not np.any(eps == 1.0):
            raise ValueError("signature needs at least one +1 entry")
        object.__setattr__(self, "eps", eps)

    @property
    def n(self) -> int:
        return self.eps.size

    @classmethod
    def riemannian(cls, n: int) -> "Signature":
        return cls(np.ones(n))

    @classmethod
    def lorentzian(cls, n: int) -> "Signature":
        eps = np.ones(n)
        eps[-1] = -1.0
        return cls(eps)


@dataclass(frozen=True)
class ScalarJet2:
    """Second-order jet of a scalar field at a point.

    The Hessian is symmetrized on construction so downstream tensor
    symmetry is exact, not approximate.
    """

    value: float
    gradient: np.ndarray
    hessian: np.ndarray

    def __post_init__(self):
        grad = np.asarray(self.gradient, dtype=float)
        hess = np.asarray(self.hessian, dtype=float)
        if hess.shape != (grad.size, grad.size):
            raise ValueError("hessian shape does not match gradient length")
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "gradient", grad)
        object.__setattr__(self, "hessian", 0.5 * (hess + hess.T))

    @property
    def n(self) -> int:
        return self.gradient.size

    @classmethod
    def constant(cls, value: float, n: int) -> "ScalarJet2":
        return cls(value, np.zeros(n), np.zeros((n, n)))


def _check_phi(phi: ScalarJet2) -> None:
    if abs(phi.value) < TOL_PHI:
        raise DegenerateConformalFactor(
            f"|phi| = {abs(phi.value):.3e} below guard {TOL_PHI}"
        )


def conformal_christoffel(sig: Signature, phi: ScalarJet2,
                          i: int, j: int, k: int) -> float:
    """Christoffel symbol Gamma^k_ij of gbar = g/phi^2 (0-based indices).

    Four cases: zero for distinct indices, -phi_,j/phi when k == i != j,
    eps_i*eps_k*phi_,k/phi when i == j != k, -phi_,i/phi on the diagonal.
    """
    _check_phi(phi)
    g = phi.gradient
    if i == j:
        if k == i:
            return -g[i] / phi.value
        return sig.eps[i] * sig.eps[k] * g[k] / phi.value
    if k == i:
        return -g[j] / phi.value
    if k == j:
        return -g[i] / phi.value
    return 0.0


def conformal_ricci(sig: Signature, phi: ScalarJet2) -> np.ndarray:
    """Ricci tensor of gbar = g/phi^2 as a symmetric n x n array.

    Ric = (1/phi^2) * { (n-2) phi Hess_g(phi)
                        + [phi lap_g(phi) - (n-1)|grad_g phi|^2] g }
    with the flat-background Hessian, Laplacian and gradient norm taken
    with eps-weights.
    """
    _check_phi(phi)
    eps = sig.eps
    n = sig.n
    lap = float(np.sum(eps * np.diag(phi.hessian)))
    grad2 = float(np.sum(eps * phi.gradient ** 2))
    out = (n - 2) * phi.value * phi.hessian.copy()
    out += (phi.value * lap - (n - 1) * grad2) * np.diag(eps)
    return out / phi.value ** 2


def conformal_hessian(sig: Signature, phi: ScalarJet2,
                      f: ScalarJet2) -> np.ndarray:
    """Covariant Hessian of f in the metric gbar = g/phi^2."""
    _check_phi(phi)
    eps = sig.eps
    gp, gf = phi.gradient, f.gradient
    out = f.hessian + (np.outer(gp, gf) + np.outer(gf, gp)) / phi.value
    mixed = float(np.sum(eps * gp * gf)) / phi.value
    # Diagonal: f_,ii + 2 phi_,i f_,i / phi - eps_i * sum_k eps_k phi_,k f_,k / phi
    idx = np.arange(sig.n)
    out[idx, idx] = (np.diag(f.hessian) + 2.0 * gp * gf / phi.value
                     - eps * mixed)
    return out


def scalar_curvature(sig: Signature, phi: ScalarJet2) -> float:
    """Scalar curvature of gbar = g/phi^2.

    R = sum_k eps_k [2(n-1) phi phi_,kk - n(n-1) phi_,k^2].
    """
    _check_phi(phi)
    eps = sig.eps
    n = sig.n
    return float(np.sum(eps * (2.0 * (n - 1) * phi.value * np.diag(phi.hessian)
                               - n * (n - 1) * phi.gradient ** 2)))


def laplacian(sig: Signature, phi: ScalarJet2, f: ScalarJet2) -> float:
    """Laplace-Beltrami of f in gbar: phi^2 * eps-trace of the Hessian.

    Expands to sum_k eps_k [phi^2 f_,kk - (n-2) phi phi_,k f_,k].
    """
    _check_phi(phi)
    eps = sig.eps
    n = sig.n
    return float(np.sum(eps * (phi.value ** 2 * np.diag(f.hessian)
                               - (n - 2) * phi.value
                               * phi.gradient * f.gradient)))
