"""End-to-end certification of soliton profiles.

Lifts a profile to ambient points, evaluates every residual family, runs a
finite-difference curvature oracle that shares no code with the analytic
conformal formulas (general-metric Christoffel assembly from pointwise
metric samples), and aggregates everything into a machine-readable report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .ansatz import xi_jet
from .errors import (
    OutOfDomain,
    SamplingExhausted,
    SolitonReduceError,
    StencilOutOfDomain,
)
from .profiles import Profile
from .reduction import TOL_SING, SolitonProblem

DEFAULT_THRESHOLD = 1e-8

#: Coarsest step used for the convergence-rate measurement; finer steps sit
#: on the round-off floor of the doubly nested differences.
RATE_BASE_STEP = 1e-2


@dataclass(frozen=True)
class SampleSpec:
    """How to draw ambient sample points."""

    box: Sequence[tuple[float, float]]
    mode: str = "random"          # "random" or "grid"
    count: int = 500
    seed: int = 0
    exclusion_phi: float = 1e-8   # min |phi| at accepted points
    exclusion_sing: float = 1e-8  # min |4 tau xi + Lambda|

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        for lo, hi in self.box:
            if not lo < hi:
                raise ValueError("box intervals must be non-degenerate")
        if self.mode not in ("random", "grid"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")


@dataclass(frozen=True)
class OracleGap:
    """FD-vs-analytic curvature discrepancy at its step, with rate."""

    gap: float
    step: float
    rate: float


@dataclass(frozen=True)
class ResidualReport:
    max_offdiag: float
    max_diag: float
    max_trace: float
    max_tensor: float
    scale: float
    points_evaluated: int
    threshold: float
    verdict: str
    oracle_gap: OracleGap | None = None
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        d = {
            "max_offdiag": self.max_offdiag,
            "max_diag": self.max_diag,
            "max_trace": self.max_trace,
            "max_tensor": self.max_tensor,
            "scale": self.scale,
            "points_evaluated": self.points_evaluated,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "oracle_gap": None if self.oracle_gap is None else {
                "gap": self.oracle_gap.gap,
                "step": self.oracle_gap.step,
                "rate": self.oracle_gap.rate,
            },
        }
        d.update(self.extras)
        return d

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _grid_points(spec: SampleSpec) -> np.ndarray:
    n = len(spec.box)
    per_axis = max(2, math.ceil(spec.count ** (1.0 / n)))
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in spec.box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _point_ok(p: SolitonProblem, prof: Profile, spec: SampleSpec,
              x: np.ndarray) -> bool:
    xi = xi_jet(p.ansatz, x).value
    if not (prof.xi_min <= xi <= prof.xi_max):
        return False
    tau = p.ansatz.tau
    if tau != 0.0 and abs(4.0 * tau * xi + p.lambda_constant) \
            < max(spec.exclusion_sing, TOL_SING):
        return False
    try:
        s = prof.sample(xi)
    except SolitonReduceError:
        return False
    return abs(s.phi) >= spec.exclusion_phi


def draw_points(p: SolitonProblem, prof: Profile,
                spec: SampleSpec) -> np.ndarray:
    """Sample points satisfying the domain and exclusion constraints.

    Random draws use the counter-based Philox generator keyed by the seed,
    so reports are reproducible and independent of evaluation order.
    """
    if len(spec.box) != p.n:
        raise ValueError("box dimension differs from problem dimension")
    if spec.mode == "grid":
        pts = [x for x in _grid_points(spec)
               if _point_ok(p, prof, spec, x)][:spec.count]
        if not pts:
            raise SamplingExhausted("no grid point satisfies the exclusions")
        return np.asarray(pts)
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    lo = np.array([b[0] for b in spec.box])
    hi = np.array([b[1] for b in spec.box])
    accepted: list[np.ndarray] = []
    max_draws = 200 * spec.count
    drawn = 0
    while len(accepted) < spec.count:
        if drawn >= max_draws:
            raise SamplingExhausted(
                f"{len(accepted)}/{spec.count} points after {drawn} draws"
            )
        batch = rng.uniform(lo, hi, size=(spec.count, p.n))
        drawn += spec.count
        for x in batch:
            if _point_ok(p, prof, spec, x):
                accepted.append(x)
                if len(accepted) == spec.count:
                    break
    return np.asarray(accepted)


# ---------------------------------------------------------------------------
# Residual evaluation
# ---------------------------------------------------------------------------

def residual_maxima(p: SolitonProblem, prof: Profile,
                    xs: np.ndarray) -> tuple[np.ndarray, ...]:
    """Per-point max-abs residuals of all four families at ambient points."""
    xis = np.array([xi_jet(p.ansatz, x).value for x in xs])
    samples = [prof.sample(float(xi)) for xi in xis]
    phi = np.array([s.phi for s in samples])
    dphi = np.array([s.dphi for s in samples])
    ddphi = np.array([s.ddphi for s in samples])
    df = np.array([s.df for s in samples])
    ddf = np.array([s.ddf for s in samples])
    return _kernels.batch_residuals(
        p.sig.eps, p.ansatz.tau, p.ansatz.alpha, np.asarray(xs, dtype=float),
        phi, dphi, ddphi, df, ddf, p.lam,
    ) + (phi, ddphi)


def residual_scale(lam: float, phi: np.ndarray, ddphi: np.ndarray) -> float:
    """Problem-scale factor: max(1, |lambda|, sup |phi * phi''|)."""
    return max(1.0, abs(lam), float(np.max(np.abs(phi * ddphi))))


def verify_profile(p: SolitonProblem, prof: Profile, spec: SampleSpec,
                   threshold: float = DEFAULT_THRESHOLD,
                   run_oracle: bool = True,
                   oracle_points: int = 3) -> ResidualReport:
    """Evaluate every residual family over the sample; aggregate maxima."""
    xs = draw_points(p, prof, spec)
    off, diag, trace, tensor, phi, ddphi = residual_maxima(p, prof, xs)
    scale = residual_scale(p.lam, phi, ddphi)
    maxima = {
        "max_offdiag": float(np.max(off)) / scale,
        "max_diag": float(np.max(diag)) / scale,
        "max_trace": float(np.max(trace)) / scale,
        "max_tensor": float(np.max(tensor)) / scale,
    }
    verdict = "pass" if all(v <= threshold for v in maxima.values()) \
        else "fail"

    gap = None
    if run_oracle:
        gap = _profile_oracle_gap(p, prof, xs[:oracle_points])

    return ResidualReport(
        **maxima,
        scale=scale,
        points_evaluated=len(xs),
        threshold=threshold,
        verdict=verdict,
        oracle_gap=gap,
        extras={
            "mean_offdiag": float(np.mean(off)) / scale,
            "mean_diag": float(np.mean(diag)) / scale,
            "mean_trace": float(np.mean(trace)) / scale,
            "mean_tensor": float(np.mean(tensor)) / scale,
        },
    )


def _profile_oracle_gap(p: SolitonProblem, prof: Profile,
                        xs: np.ndarray) -> OracleGap | None:
    """Compare the FD Ricci of gbar with the analytic conformal formula."""
    from . import geometry
    from .profiles import lift

    def phi_field(x):
        return prof.sample(xi_jet(p.ansatz, x).value).phi

    worst = None
    for x in xs:
        try:
            ricci_fd, rate = fd_curvature_oracle(p.sig, phi_field, x)
            phi_jet, _ = lift(p.ansatz, prof, x)
            ricci = geometry.conformal_ricci(p.sig, phi_jet)
            gap = float(np.max(np.abs(ricci_fd - ricci)))
        except (StencilOutOfDomain, SolitonReduceError):
            continue
        if worst is None or gap > worst.gap:
            worst = OracleGap(gap=gap, step=1e-4, rate=rate)
    return worst


# ---------------------------------------------------------------------------
# Finite-difference curvature oracle
# ---------------------------------------------------------------------------

def _metric(sig, phi_field: Callable[[np.ndarray], float],
            x: np.ndarray) -> np.ndarray:
    try:
        phi = phi_field(x)
    except (OutOfDomain, ValueError) as exc:
        raise StencilOutOfDomain(f"phi not evaluable at {x}") from exc
    return np.diag(sig.eps) / phi ** 2


def fd_christoffel(sig, phi_field, x: np.ndarray, step: float) -> np.ndarray:
    """Christoffel symbols Gamma[k, i, j] of gbar from metric samples only."""
    n = sig.n
    x = np.asarray(x, dtype=float)
    dg = np.empty((n, n, n))  # dg[l] = d_l g
    for l in range(n):
        e = np.zeros(n)
        e[l] = step
        dg[l] = (_metric(sig, phi_field, x + e)
                 - _metric(sig, phi_field, x - e)) / (2.0 * step)
    ginv = np.linalg.inv(_metric(sig, phi_field, x))
    gamma = np.empty((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for l in range(n):
                    acc += ginv[k, l] * (dg[i][j, l] + dg[j][i, l]
                                         - dg[l][i, j])
                gamma[k, i, j] = 0.5 * acc
    return gamma


def _fd_ricci_once(sig, phi_field, x: np.ndarray, step: float) -> np.ndarray:
    n = sig.n
    dgamma = np.empty((n, n, n, n))  # dgamma[l] = d_l Gamma
    for l in range(n):
        e = np.zeros(n)
        e[l] = step
        dgamma[l] = (fd_christoffel(sig, phi_field, x + e, step)
                     - fd_christoffel(sig, phi_field, x - e, step)) \
            / (2.0 * step)
    gamma = fd_christoffel(sig, phi_field, x, step)
    ric = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += dgamma[k][k, i, j] - dgamma[i][k, k, j]
                for m in range(n):
                    acc += (gamma[k, k, m] * gamma[m, i, j]
                            - gamma[k, i, m] * gamma[m, k, j])
            ric[i, j] = acc
    return 0.5 * (ric + ric.T)


def fd_curvature_oracle(sig, phi_field: Callable[[np.ndarray], float],
                        x: np.ndarray,
                        step: float = 1e-4) -> tuple[np.ndarray, float]:
    """Ricci tensor of gbar by nested central differences, plus its
    empirical convergence rate under step-halving.

    The assembly uses only pointwise metric samples and the general-metric
    Christoffel/Ricci formulas; it shares no code path with the conformal
    shortcut it certifies. The rate is measured at a coarser base step
    where truncation still dominates round-off.
    """
    x = np.asarray(x, dtype=float)
    ric = _fd_ricci_once(sig, phi_field, x, step)
    h0 = max(step, RATE_BASE_STEP)
    r1 = _fd_ricci_once(sig, phi_field, x, h0)
    r2 = _fd_ricci_once(sig, phi_field, x, h0 / 2.0)
    r3 = _fd_ricci_once(sig, phi_field, x, h0 / 4.0)
    d1 = float(np.linalg.norm(r1 - r2))
    d2 = float(np.linalg.norm(r2 - r3))
    rate = math.inf if d2 == 0.0 else math.log2(d1 / d2) \
        if d1 > 0.0 else math.inf
    return ric, rate


def fd_hessian_oracle(sig, phi_field, f_field, x: np.ndarray,
                      step: float = 1e-4) -> np.ndarray:
    """Covariant Hessian of f in gbar by central differences."""
    n = sig.n
    x = np.asarray(x, dtype=float)
    grad = np.empty(n)
    hess = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        grad[i] = (f_field(x + ei) - f_field(x - ei)) / (2.0 * step)
        hess[i, i] = (f_field(x + ei) - 2.0 * f_field(x)
                      + f_field(x - ei)) / step ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = step
            hess[i, j] = hess[j, i] = (
                f_field(x + ei + ej) - f_field(x + ei - ej)
                - f_field(x - ei + ej) + f_field(x - ei - ej)
            ) / (4.0 * step ** 2)
    gamma = fd_christoffel(sig, phi_field, x, step)
    return hess - np.einsum("kij,k->ij", gamma, grad)
