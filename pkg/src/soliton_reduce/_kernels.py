"""Hot residual-evaluation kernels.

Residual verification evaluates every soliton equation at thousands of
ambient points per profile; this is the dominant inner loop. The loop
kernel is compiled with numba when available; setting the environment
variable ``SOLITON_REDUCE_DISABLE_NUMBA=1`` (or a failed numba import)
selects a vectorized pure-numpy fallback. Both paths compute identical
quantities; ``benchmarks/bench_residuals.py`` compares them and the test
suite pins their agreement.

Per point, given the profile data (phi, phi', phi'', f', f'') at
xi(x) and the quadric gradient u_i = 2 tau eps_i x_i + alpha_i, the
ambient jets follow by the chain rule and four residual families are
reduced to their max-abs:

* off-diagonal scalar equations,
* diagonal scalar equations (minus eps_i lambda),
* the contracted trace identity,
* the tensor equation Ric + Hess(f) - lambda*gbar assembled from the
  conformal-geometry formulas (independent of the scalar route).
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("SOLITON_REDUCE_DISABLE_NUMBA", "") not in ("", "0")

try:
    if _DISABLE:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def batch_residuals_numpy(eps, tau, alpha, xs, phi, dphi, ddphi, df, ddf,
                          lam):
    """Vectorized residual maxima; see module docstring.

    Returns four arrays of shape (m,): off-diagonal, diagonal, trace and
    tensor max-abs residuals per point.
    """
    eps = np.asarray(eps, dtype=float)
    xs = np.asarray(xs, dtype=float)
    n = eps.size
    u = 2.0 * tau * eps[None, :] * xs + alpha[None, :]     # (m, n)
    xi_hess = 2.0 * tau * eps                               # diagonal of hess

    gp = dphi[:, None] * u                                  # phi_,i
    gf = df[:, None] * u                                    # f_,i
    uu = u[:, :, None] * u[:, None, :]                      # (m, n, n)
    eye = np.eye(n)
    hp = ddphi[:, None, None] * uu + dphi[:, None, None] * (xi_hess * eye)
    hf = ddf[:, None, None] * uu + df[:, None, None] * (xi_hess * eye)

    hp_d = np.diagonal(hp, axis1=1, axis2=2)                # phi_,kk
    hf_d = np.diagonal(hf, axis1=1, axis2=2)

    lap_p = np.sum(eps * hp_d, axis=1)
    grad2 = np.sum(eps * gp ** 2, axis=1)
    mixed = np.sum(eps * gp * gf, axis=1)

    # Scalar route ---------------------------------------------------------
    off = ((n - 2) * hp + phi[:, None, None] * hf
           + gp[:, :, None] * gf[:, None, :] + gf[:, :, None] * gp[:, None, :])
    mask = ~np.eye(n, dtype=bool)
    off_max = np.max(np.abs(off[:, mask]), axis=1) if n > 1 else np.zeros(
        phi.size)

    common = np.sum(eps * (phi[:, None] * hp_d - (n - 1) * gp ** 2
                           - phi[:, None] * gp * gf), axis=1)
    diag = (phi[:, None] * ((n - 2) * hp_d + phi[:, None] * hf_d
                            + 2.0 * gp * gf)
            + eps[None, :] * (common[:, None] - lam))
    diag_max = np.max(np.abs(diag), axis=1)

    trace = np.abs(np.sum(
        eps * (2.0 * (n - 1) * phi[:, None] * hp_d - n * (n - 1) * gp ** 2
               + phi[:, None] ** 2 * hf_d
               - (n - 2) * phi[:, None] * gp * gf), axis=1) - n * lam)

    # Tensor route ---------------------------------------------------------
    phi2 = phi ** 2
    ric = ((n - 2) * phi[:, None, None] * hp
           + ((phi * lap_p - (n - 1) * grad2)[:, None, None]
              * (eps * eye))) / phi2[:, None, None]
    hess = hf + (gp[:, :, None] * gf[:, None, :]
                 + gf[:, :, None] * gp[:, None, :]) / phi[:, None, None]
    idx = np.arange(n)
    hess[:, idx, idx] = (hf_d + 2.0 * gp * gf / phi[:, None]
                         - eps[None, :] * mixed[:, None] / phi[:, None])
    tensor = ric + hess - lam * (eps * eye) / phi2[:, None, None]
    tensor_max = np.max(np.abs(tensor.reshape(phi.size, -1)), axis=1)

    return off_max, diag_max, trace, tensor_max


def _batch_residuals_loops(eps, tau, alpha, xs, phi, dphi, ddphi, df, ddf,
                           lam):
    m, n = xs.shape
    off_max = np.zeros(m)
    diag_max = np.zeros(m)
    trace = np.zeros(m)
    tensor_max = np.zeros(m)
    for p in range(m):
        ph = phi[p]
        dph = dphi[p]
        ddph = ddphi[p]
        dfp = df[p]
        ddfp = ddf[p]
        lap_p = 0.0
        grad2 = 0.0
        mixed = 0.0
        common = 0.0
        tr = 0.0
        for k in range(n):
            uk = 2.0 * tau * eps[k] * xs[p, k] + alpha[k]
            gpk = dph * uk
            gfk = dfp * uk
            hpkk = ddph * uk * uk + dph * 2.0 * tau * eps[k]
            hfkk = ddfp * uk * uk + dfp * 2.0 * tau * eps[k]
            lap_p += eps[k] * hpkk
            grad2 += eps[k] * gpk * gpk
            mixed += eps[k] * gpk * gfk
            common += eps[k] * (ph * hpkk - (n - 1) * gpk * gpk
                                - ph * gpk * gfk)
            tr += eps[k] * (2.0 * (n - 1) * ph * hpkk
                            - n * (n - 1) * gpk * gpk
                            + ph * ph * hfkk
                            - (n - 2) * ph * gpk * gfk)
        trace[p] = abs(tr - n * lam)
        omax = 0.0
        dmax = 0.0
        tmax = 0.0
        for i in range(n):
            ui = 2.0 * tau * eps[i] * xs[p, i] + alpha[i]
            gpi = dph * ui
            gfi = dfp * ui
            hpii = ddph * ui * ui + dph * 2.0 * tau * eps[i]
            hfii = ddfp * ui * ui + dfp * 2.0 * tau * eps[i]
            d = (ph * ((n - 2) * hpii + ph * hfii + 2.0 * gpi * gfi)
                 + eps[i] * (common - lam))
            if abs(d) > dmax:
                dmax = abs(d)
            ric_ii = ((n - 2) * ph * hpii
                      + (ph * lap_p - (n - 1) * grad2) * eps[i]) / (ph * ph)
            hess_ii = hfii + 2.0 * gpi * gfi / ph - eps[i] * mixed / ph
            t_ii = ric_ii + hess_ii - lam * eps[i] / (ph * ph)
            if abs(t_ii) > tmax:
                tmax = abs(t_ii)
            for j in range(i + 1, n):
                uj = 2.0 * tau * eps[j] * xs[p, j] + alpha[j]
                gpj = dph * uj
                gfj = dfp * uj
                hpij = ddph * ui * uj
                hfij = ddfp * ui * uj
                r = ((n - 2) * hpij + ph * hfij + gpi * gfj + gpj * gfi)
                if abs(r) > omax:
                    omax = abs(r)
                ric_ij = (n - 2) * ph * hpij / (ph * ph)
                hess_ij = hfij + (gpi * gfj + gpj * gfi) / ph
                t_ij = ric_ij + hess_ij
                if abs(t_ij) > tmax:
                    tmax = abs(t_ij)
        off_max[p] = omax
        diag_max[p] = dmax
        tensor_max[p] = tmax
    return off_max, diag_max, trace, tensor_max


if HAVE_NUMBA:
    batch_residuals_compiled = njit(cache=True)(_batch_residuals_loops)
    batch_residuals = batch_residuals_compiled
else:
    batch_residuals_compiled = None
    batch_residuals = batch_residuals_numpy
