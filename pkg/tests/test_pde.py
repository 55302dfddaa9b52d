"""Residuals of the soliton system: two-route agreement, the lifted
single-variable form, and gauge behavior."""

import numpy as np
import pytest

from conftest import random_ansatz, random_jet, random_signature, rng
from soliton_reduce import (
    ScalarJet2,
    Signature,
    gallery,
    lift,
    residual_diag,
    residual_offdiag,
    residual_soliton_tensor,
    residual_trace,
    xi_jet,
)
from soliton_reduce.pde import tensor_to_scalar_factor


class TestTwoRouteAgreement:
    """Scalar-equation residuals vs the assembled tensor residual."""

    def test_factors(self, gen):
        for _ in range(30):
            n = int(gen.integers(2, 6))
            sig = random_signature(gen, n)
            phi = random_jet(gen, n)
            f = random_jet(gen, n)
            lam = float(gen.uniform(-2, 2))
            tensor = residual_soliton_tensor(sig, phi, f, lam)
            for i in range(n):
                diag = residual_diag(sig, phi, f, lam, i)
                factor = tensor_to_scalar_factor(phi.value, diagonal=True)
                assert diag == pytest.approx(factor * tensor[i, i],
                                             abs=1e-10)
                for j in range(i + 1, n):
                    off = residual_offdiag(sig, phi, f, i, j)
                    factor = tensor_to_scalar_factor(phi.value,
                                                     diagonal=False)
                    assert off == pytest.approx(factor * tensor[i, j],
                                                abs=1e-10)

    def test_trace_is_eps_trace(self, gen):
        for _ in range(20):
            n = int(gen.integers(2, 6))
            sig = random_signature(gen, n)
            phi = random_jet(gen, n)
            f = random_jet(gen, n)
            lam = float(gen.uniform(-2, 2))
            tensor = residual_soliton_tensor(sig, phi, f, lam)
            tr = phi.value ** 2 * float(np.sum(sig.eps * np.diag(tensor)))
            assert residual_trace(sig, phi, f, lam) == pytest.approx(
                tr, abs=1e-10)

    def test_offdiag_needs_distinct_indices(self, gen):
        sig = Signature.riemannian(2)
        with pytest.raises(ValueError):
            residual_offdiag(sig, random_jet(gen, 2), random_jet(gen, 2),
                             1, 1)


class TestLiftedForm:
    def test_offdiag_single_variable_form(self, gen):
        """Lifted off-diagonal residual equals
        [(n-2) phi'' + phi f'' + 2 phi' f'] xi_,i xi_,j
        + [(n-2) phi' + phi f'] xi_,ij
        for arbitrary (non-solution) profiles composed with a quadric."""
        for _ in range(20):
            n = int(gen.integers(2, 5))
            sig = random_signature(gen, n)
            a = random_ansatz(gen, sig)
            # Random profile data at the point.
            ph, dph, ddph = gen.uniform(0.5, 2), *gen.uniform(-1, 1, 2)
            fv, dfv, ddfv = gen.uniform(-1, 1, 3)
            for _ in range(50):
                x = gen.uniform(-2, 2, n)
                jet = xi_jet(a, x)
                u = jet.gradient
                phi = ScalarJet2(ph, dph * u,
                                 ddph * np.outer(u, u) + dph * jet.hessian)
                f = ScalarJet2(fv, dfv * u,
                               ddfv * np.outer(u, u) + dfv * jet.hessian)
                s1 = (n - 2) * ddph + ph * ddfv + 2 * dph * dfv
                s0 = (n - 2) * dph + ph * dfv
                for i in range(n):
                    for j in range(i + 1, n):
                        lhs = residual_offdiag(sig, phi, f, i, j)
                        rhs = s1 * u[i] * u[j] + s0 * jet.hessian[i, j]
                        scale = max(1.0, abs(lhs), abs(rhs))
                        assert abs(lhs - rhs) / scale < 1e-11


class TestKnownSolutions:
    @staticmethod
    def _lifted(entry, x):
        return lift(entry.problem.ansatz, entry.profile, np.asarray(x))

    def test_gaussian_zero_residual(self, gen):
        entry = gallery("gaussian", k=2.0, tau=-1.0, lam=-3.0)
        p = entry.problem
        for _ in range(20):
            x = gen.uniform(-2, 2, p.n)
            phi, f = self._lifted(entry, x)
            tensor = residual_soliton_tensor(p.sig, phi, f, p.lam)
            assert np.max(np.abs(tensor)) < 1e-13

    def test_cigar_zero_residual(self, gen):
        entry = gallery("cigar")
        p = entry.problem
        for _ in range(20):
            x = gen.uniform(-2, 2, 2)
            phi, f = self._lifted(entry, x)
            tensor = residual_soliton_tensor(p.sig, phi, f, 0.0)
            assert np.max(np.abs(tensor)) < 1e-13

    def test_lambda_perturbation(self, gen):
        # Shifting lambda by d changes the diagonal scalar residual by
        # exactly -eps_i * d and the tensor by -d * eps_i / phi^2.
        entry = gallery("cigar")
        p = entry.problem
        x = np.array([0.7, -0.4])
        phi, f = self._lifted(entry, x)
        d = 0.37
        for i in range(2):
            r0 = residual_diag(p.sig, phi, f, 0.0, i)
            r1 = residual_diag(p.sig, phi, f, d, i)
            assert r1 - r0 == pytest.approx(-p.sig.eps[i] * d, abs=1e-14)
        t0 = residual_soliton_tensor(p.sig, phi, f, 0.0)
        t1 = residual_soliton_tensor(p.sig, phi, f, d)
        assert np.allclose(t1 - t0,
                           -d * np.diag(p.sig.eps) / phi.value ** 2,
                           atol=1e-14)


class TestGauge:
    def test_potential_shift(self, gen):
        # f enters only through derivatives: shifting f changes nothing.
        for _ in range(10):
            n = int(gen.integers(2, 5))
            sig = random_signature(gen, n)
            phi = random_jet(gen, n)
            f = random_jet(gen, n)
            shifted = ScalarJet2(f.value + 17.3, f.gradient, f.hessian)
            lam = float(gen.uniform(-2, 2))
            assert np.array_equal(
                residual_soliton_tensor(sig, phi, f, lam),
                residual_soliton_tensor(sig, phi, shifted, lam))

    def test_phi_sign_flip(self, gen):
        for _ in range(10):
            n = int(gen.integers(2, 5))
            sig = random_signature(gen, n)
            phi = random_jet(gen, n)
            f = random_jet(gen, n)
            neg = ScalarJet2(-phi.value, -phi.gradient, -phi.hessian)
            lam = float(gen.uniform(-2, 2))
            t0 = residual_soliton_tensor(sig, phi, f, lam)
            t1 = residual_soliton_tensor(sig, neg, f, lam)
            assert np.max(np.abs(t1 - t0)) < 1e-13
