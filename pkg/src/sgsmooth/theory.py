"""Rates, steady-state bounds, problem constants, and assumption checkers.

The model is described by a handful of constants:

* ``eta``  -- strong-convexity modulus of the risk,
* ``c, d`` -- affine-Lipschitz constants of the chosen subgradient,
  ||g(w1) - g'(w2)|| <= c ||w1 - w2|| + d, with squared-form companions
  e^2 = 2 c^2 and f^2 = 2 d^2,
* ``beta2, sigma2`` -- gradient-noise moduli,
  E[||s||^2 | past] <= beta2 ||w* - w||^2 + sigma2, and tau^2 = f^2 + sigma2.

For step sizes below eta / (e^2 + beta2) the excess risk of the smoothed
iterate contracts geometrically with per-iteration factor

    alpha = 1 - mu*eta + mu^2 (e^2 + beta2)

toward a steady-state level of mu * tau^2 / 2 (and mu * tau^2 / eta in
mean-square deviation).  This module computes those numbers for the built-in
problem families and provides Monte-Carlo checkers that confirm the
assumptions actually hold on live samplers.
"""

from dataclasses import dataclass
import math
from typing import NamedTuple, Optional

import numpy as np

from .data import standard_normal
from .errors import InsufficientData, UnsupportedConfiguration


@dataclass(frozen=True)
class ProblemConstants:
    """The constant ledger (eta, c, d, beta2, sigma2) of one problem.

    The derived squared-form constants are exposed as properties so the
    relations e2 = 2 c^2, f2 = 2 d^2 and tau2 = f2 + sigma2 hold by
    construction.
    """

    eta: float
    c: float
    d: float
    beta2: float
    sigma2: float

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if min(self.c, self.d, self.beta2, self.sigma2) < 0:
            raise ValueError("c, d, beta2, sigma2 must be nonnegative")
        # strong monotonicity and the affine-Lipschitz bound can only coexist
        # when eta <= c
        if self.eta > self.c * (1 + 1e-12):
            raise ValueError(f"eta={self.eta} exceeds c={self.c}")

    @property
    def e2(self):
        return 2.0 * self.c**2

    @property
    def f2(self):
        return 2.0 * self.d**2

    @property
    def tau2(self):
        return self.f2 + self.sigma2


def rate_alpha(mu, constants):
    """Per-iteration contraction factor 1 - mu*eta + mu^2 (e^2 + beta^2)."""
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    return 1.0 - mu * constants.eta + mu * mu * (constants.e2 + constants.beta2)


def step_size_ceiling(constants):
    """Largest admissible step size eta / (e^2 + beta^2).

    Every mu strictly below the ceiling yields rate_alpha(mu) < 1.  A
    degenerate problem with e^2 + beta^2 = 0 has no ceiling and returns +inf.
    """
    denom = constants.e2 + constants.beta2
    if denom == 0.0:
        return math.inf
    return constants.eta / denom


class SteadyStateBounds(NamedTuple):
    excess_risk: float
    msd: float


def steady_state_bounds(mu, constants):
    """Limiting bounds: excess risk mu*tau^2/2 and MSD mu*tau^2/eta."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    tau2 = constants.tau2
    return SteadyStateBounds(0.5 * mu * tau2, mu * tau2 / constants.eta)


def finite_horizon_envelope(mu, alpha, steady_excess, horizon, msd0):
    """Transient-plus-steady excess-risk envelope for a given contraction factor.

    Returns  alpha^L (1 - alpha) / (2 mu (1 - alpha^L)) * msd0 + steady_excess
    with L = horizon; the transient coefficient is the sharpest one the
    contraction argument yields, decreases in L, and vanishes in the limit.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if msd0 < 0:
        raise ValueError("msd0 must be nonnegative")
    if not 0.0 < alpha < 1.0:
        raise UnsupportedConfiguration(f"alpha={alpha:.6g} is outside (0, 1)")
    a_pow = alpha**horizon
    transient = a_pow * (1.0 - alpha) / (2.0 * mu * (1.0 - a_pow)) * msd0
    return transient + steady_excess


def finite_horizon_bound(mu, constants, horizon, msd0):
    """Excess-risk bound for the smoothed iterate after ``horizon`` iterations.

    The contraction factor and steady level come from ``constants``;
    ``msd0 = E||w_0 - w*||^2``.  Raises when mu exceeds the step-size ceiling
    (the rate leaves (0, 1) and the contraction argument gives nothing).
    """
    alpha = rate_alpha(mu, constants)
    if not 0.0 < alpha < 1.0:
        raise UnsupportedConfiguration(
            f"alpha={alpha:.6g} is outside (0, 1); mu exceeds the ceiling "
            f"{step_size_ceiling(constants):.6g}"
        )
    steady = 0.5 * mu * constants.tau2
    return finite_horizon_envelope(mu, alpha, steady, horizon, msd0)


def svm_constants(rho, trace_rh):
    """Constant ledger of the regularized SVM.

    eta = c = rho from the quadratic regularizer, d = 2 sqrt(Tr R_h) from the
    bounded hinge selector, and the gradient noise satisfies beta^2 = 0,
    sigma^2 = Tr R_h.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if trace_rh < 0:
        raise ValueError("trace_rh must be nonnegative")
    return ProblemConstants(
        eta=rho, c=rho, d=2.0 * math.sqrt(trace_rh), beta2=0.0, sigma2=trace_rh
    )


def lasso_constants(problem, a, w_star=None):
    """Constant ledger of the stochastic LASSO for noise modulus ``a``.

    eta = lambda_min(R_h), c = ||R_h||, d = 2 delta sqrt(M), and the gradient
    noise satisfies beta^2 = 2a, sigma^2 = sigma_n^2 Tr(R_h) + 2a ||w_true - w*||^2.
    ``a`` may be the distribution-free estimate from :func:`estimate_lasso_a`
    or the exact Gaussian modulus from :func:`lasso_gaussian_noise_modulus`;
    both make the noise bound valid for Gaussian regressors.
    """
    if a < 0:
        raise ValueError("a must be nonnegative")
    if w_star is None:
        w_star = problem.optimum()
    gap = problem.w_true - np.asarray(w_star, dtype=float)
    return ProblemConstants(
        eta=problem.min_eigenvalue,
        c=problem.spectral_norm,
        d=2.0 * problem.delta * math.sqrt(problem.dim),
        beta2=2.0 * a,
        sigma2=problem.noise_var * problem.trace + 2.0 * a * float(gap @ gap),
    )


def lasso_gaussian_noise_modulus(problem):
    """Exact conditional-second-moment modulus for Gaussian regressors.

    For h ~ N(0, R) the regression gradient noise satisfies
    E||(R - h h^T) v||^2 = v^T (R^2 + Tr(R) R) v <= a_g ||v||^2 with
    a_g = ||R||^2 + Tr(R) ||R||.  This plays the same role as the
    distribution-free spectral-norm estimate but grows like M instead of M^2,
    so it keeps moderate step sizes inside the admissible range.
    """
    nrm = problem.spectral_norm
    return nrm * nrm + problem.trace * nrm


class AEstimate(NamedTuple):
    value: float
    stderr: float


def estimate_lasso_a(problem, n, seed=0, features=None):
    """Monte-Carlo estimate of a = 2 E ||R_h - h h^T||^2 (spectral norm).

    Draws ``n`` regressors from the problem's Gaussian model (or uses the
    supplied ``features`` rows) and averages twice the squared spectral norm
    of the covariance estimation error.  Returns the estimate with its
    standard error.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    m = problem.dim
    cov = problem.cov_h
    if features is None:
        rng = np.random.default_rng(seed)
        z = standard_normal(rng, (n, m))
        if problem._identity_cov:
            feats = z
        else:
            feats = z @ np.linalg.cholesky(cov).T
    else:
        feats = np.asarray(features, dtype=float)
        if feats.shape != (n, m):
            raise ValueError("features must have shape (n, dim)")

    if problem._identity_cov:
        # I - h h^T has eigenvalues 1 - ||h||^2 (along h) and, for M >= 2,
        # 1 on the orthogonal complement.
        q = np.einsum("ij,ij->i", feats, feats)
        norms = np.abs(1.0 - q) if m == 1 else np.maximum(1.0, np.abs(1.0 - q))
    else:
        norms = np.empty(n)
        chunk = max(1, 2**22 // (m * m))  # keep the stacked batch small
        for start in range(0, n, chunk):
            block = feats[start : start + chunk]
            diff = cov[None, :, :] - block[:, :, None] * block[:, None, :]
            eigs = np.linalg.eigvalsh(diff)
            norms[start : start + block.shape[0]] = np.abs(eigs).max(axis=1)

    draws = 2.0 * norms**2
    value = float(draws.mean())
    stderr = float(draws.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return AEstimate(value, stderr)


class SvmTightBound(NamedTuple):
    bound: float
    alpha: float


def svm_tight_bound(mu, rho, w_star_norm2, trace_rh):
    """Sharper SVM steady-state bound from the joint update-moment argument.

    Returns mu (rho^2 ||w*||^2 + rho + Tr(R_h)/2) together with its
    contraction factor alpha = 1 - 2 mu rho + 2 mu^2 rho^2.
    """
    if mu <= 0 or rho <= 0:
        raise ValueError("mu and rho must be positive")
    bound = mu * (rho**2 * w_star_norm2 + rho + 0.5 * trace_rh)
    alpha = 1.0 - 2.0 * mu * rho + 2.0 * mu * mu * rho * rho
    return SvmTightBound(bound, alpha)


@dataclass(frozen=True, eq=False)
class RateReport:
    """Computed rate/bound summary for one (mu, constants) pair."""

    alpha: float
    mu_max: float
    steady_state_excess_risk: float
    msd_bound: float
    fitted_alpha: Optional[float] = None


def rate_report(mu, constants, fitted_alpha=None):
    bounds = steady_state_bounds(mu, constants)
    return RateReport(
        alpha=rate_alpha(mu, constants),
        mu_max=step_size_ceiling(constants),
        steady_state_excess_risk=bounds.excess_risk,
        msd_bound=bounds.msd,
        fitted_alpha=fitted_alpha,
    )


@dataclass(frozen=True, eq=False)
class NoiseMomentReport:
    """Empirical gradient-noise moments at a fixed probe point."""

    w: np.ndarray
    n: int
    mean: np.ndarray
    mean_stderr: np.ndarray
    second_moment: float
    second_moment_stderr: float


def verify_noise_moments(problem, sampler, w, n):
    """Estimate E[s] and E||s||^2 of the gradient noise at a fixed iterate.

    The noise is the instantaneous subgradient minus the problem's true
    subgradient at ``w``, measured over ``n`` fresh draws.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    w = np.asarray(w, dtype=float)
    g_true = problem.true_subgradient(w)
    dim = w.shape[0]
    total = np.zeros(dim)
    total_sq = np.zeros(dim)
    q_sum = 0.0
    q_sq = 0.0
    for _ in range(n):
        s = problem.instantaneous_subgradient(w, sampler.draw()) - g_true
        total += s
        total_sq += s * s
        q = float(s @ s)
        q_sum += q
        q_sq += q * q
    mean = total / n
    comp_var = np.maximum(total_sq - n * mean * mean, 0.0) / (n - 1)
    msq = q_sum / n
    msq_var = max(q_sq - n * msq * msq, 0.0) / (n - 1)
    return NoiseMomentReport(
        w=w,
        n=n,
        mean=mean,
        mean_stderr=np.sqrt(comp_var / n),
        second_moment=msq,
        second_moment_stderr=math.sqrt(msq_var / n),
    )


def _relative_violation(lhs, rhs, slack=1e-9):
    return lhs > rhs + slack * max(1.0, abs(rhs))


def verify_affine_lipschitz(true_subgrad, dim, c, d, n_pairs, rng, scale=3.0):
    """Count pairs violating ||g(w1) - g(w2)|| <= c ||w1 - w2|| + d.

    Probe points are Gaussian with the given scale; violations are counted
    beyond a 1e-9 relative slack.
    """
    violations = 0
    for _ in range(n_pairs):
        w1 = scale * standard_normal(rng, dim)
        w2 = scale * standard_normal(rng, dim)
        lhs = float(np.linalg.norm(true_subgrad(w1) - true_subgrad(w2)))
        rhs = c * float(np.linalg.norm(w1 - w2)) + d
        if _relative_violation(lhs, rhs):
            violations += 1
    return violations


def verify_subgradient_inequality(risk, subgrad, dim, n_pairs, rng, scale=3.0):
    """Count pairs violating J(w) >= J(w0) + g(w0).(w - w0) beyond 1e-9 slack."""
    violations = 0
    for _ in range(n_pairs):
        w = scale * standard_normal(rng, dim)
        w0 = scale * standard_normal(rng, dim)
        lower = risk(w0) + float(subgrad(w0) @ (w - w0))
        if _relative_violation(lower, risk(w)):
            violations += 1
    return violations


def verify_strong_monotonicity(true_subgrad, w_star, eta, dim, n_points, rng, scale=3.0):
    """Count points violating ||g(w)|| >= eta ||w - w*|| beyond 1e-9 slack."""
    w_star = np.asarray(w_star, dtype=float)
    violations = 0
    for _ in range(n_points):
        w = scale * standard_normal(rng, dim)
        lhs = eta * float(np.linalg.norm(w - w_star))
        if _relative_violation(lhs, float(np.linalg.norm(true_subgrad(w)))):
            violations += 1
    return violations


def fit_rate(curve, floor, series="smoothed_excess_risk", burn_fraction=0.05):
    """Fit the geometric decay factor of a recorded excess-risk curve.

    Takes the leading stretch of the curve that sits above twice ``floor``
    (the steady-state bound), drops the first ``burn_fraction`` of it while
    the smoothing window fills, and least-squares fits
    log(value - floor) against the iteration index.  Returns the implied
    per-iteration factor.
    """
    values = np.asarray(getattr(curve, series), dtype=float)
    iters = np.asarray(curve.iterations, dtype=float)
    if values.shape != iters.shape:
        raise ValueError("curve series and iterations differ in length")
    above = values > 2.0 * floor
    lead = int(np.argmin(above)) if not above.all() else above.size
    start = int(math.ceil(burn_fraction * lead))
    idx = np.arange(start, lead)
    if idx.size < 10:
        raise InsufficientData(
            f"only {idx.size} transient points above twice the floor; need 10"
        )
    slope = np.polyfit(iters[idx], np.log(values[idx] - floor), 1)[0]
    return float(math.exp(slope))
