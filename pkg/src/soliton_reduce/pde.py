"""Pointwise residuals of the conformal gradient-soliton PDE system.

Two independent routes are provided. The scalar route evaluates the
component equations directly from jets of phi and f; the tensor route
assembles Ric + Hess(f) - lambda*gbar from the exact conformal-geometry
formulas. They agree up to a bookkeeping factor in phi:

    scalar off-diagonal residual = phi   * tensor residual (i != j)
    scalar diagonal residual     = phi^2 * tensor residual (i == i)

The factor table is frozen in :func:`tensor_to_scalar_factor` and pinned by
the test suite; the trace residual equals the eps-weighted phi^2-trace of
the tensor residual.
"""

from __future__ import annotations

import numpy as np

from . import geometry
from .geometry import ScalarJet2, Signature


def residual_offdiag(sig: Signature, phi: ScalarJet2, f: ScalarJet2,
                     i: int, j: int) -> float:
    """(n-2) phi_,ij + phi f_,ij + phi_,i f_,j + phi_,j f_,i  (i != j)."""
    if i == j:
        raise ValueError("off-diagonal residual needs i != j")
    n = sig.n
    return ((n - 2) * phi.hessian[i, j] + phi.value * f.hessian[i, j]
            + phi.gradient[i] * f.gradient[j]
            + phi.gradient[j] * f.gradient[i])


def residual_diag(sig: Signature, phi: ScalarJet2, f: ScalarJet2,
                  lam: float, i: int) -> float:
    """Diagonal soliton equation residual (LHS minus eps_i * lambda).

    phi[(n-2) phi_,ii + phi f_,ii + 2 phi_,i f_,i]
      + eps_i sum_k eps_k [phi phi_,kk - (n-1) phi_,k^2 - phi phi_,k f_,k]
      - eps_i lambda.
    """
    eps = sig.eps
    n = sig.n
    common = float(np.sum(eps * (phi.value * np.diag(phi.hessian)
                                 - (n - 1) * phi.gradient ** 2
                                 - phi.value * phi.gradient * f.gradient)))
    own = phi.value * ((n - 2) * phi.hessian[i, i]
                       + phi.value * f.hessian[i, i]
                       + 2.0 * phi.gradient[i] * f.gradient[i])
    return own + eps[i] * common - eps[i] * lam


def residual_trace(sig: Signature, phi: ScalarJet2, f: ScalarJet2,
                   lam: float) -> float:
    """Residual of the contracted identity R + lap(f) = n*lambda.

    sum_k eps_k [2(n-1) phi phi_,kk - n(n-1) phi_,k^2 + phi^2 f_,kk
                 - (n-2) phi phi_,k f_,k] - n lambda.
    """
    eps = sig.eps
    n = sig.n
    total = float(np.sum(eps * (
        2.0 * (n - 1) * phi.value * np.diag(phi.hessian)
        - n * (n - 1) * phi.gradient ** 2
        + phi.value ** 2 * np.diag(f.hessian)
        - (n - 2) * phi.value * phi.gradient * f.gradient)))
    return total - n * lam


def residual_soliton_tensor(sig: Signature, phi: ScalarJet2, f: ScalarJet2,
                            lam: float) -> np.ndarray:
    """Ric_gbar + Hess_gbar(f) - lambda * gbar via the geometric route."""
    ric = geometry.conformal_ricci(sig, phi)
    hess = geometry.conformal_hessian(sig, phi, f)
    gbar = np.diag(sig.eps) / phi.value ** 2
    return ric + hess - lam * gbar


def tensor_to_scalar_factor(phi_value: float, diagonal: bool) -> float:
    """Factor carrying the tensor-route residual onto the scalar route.

    >>> tensor_to_scalar_factor(2.0, diagonal=False)
    2.0
    >>> tensor_to_scalar_factor(2.0, diagonal=True)
    4.0
    """
    return phi_value ** 2 if diagonal else phi_value
