"""Built-in problem families: regularized SVM, stochastic LASSO, TV denoising.

Each family provides the per-sample (instantaneous) subgradient used by the
streaming loop, plus whatever exact quantities are available: the LASSO risk
and its subgradient are closed-form under the linear regression model, the
SVM ones can be evaluated exactly on a frozen sample set or estimated by
Monte Carlo, and the TV objective is deterministic.

Subgradient conventions are fixed once and kept for the whole run:
``sgn(0) = 0`` everywhere, and the hinge indicator is active at margin
exactly 1.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import NumericError, UnsupportedConfiguration


class Sample(NamedTuple):
    """One labelled observation: feature/regression vector and target."""

    h: np.ndarray
    gamma: float


def soft_threshold(x, delta):
    """Componentwise shrinkage sgn(x) * max(|x| - delta, 0)."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - delta, 0.0)


def hinge_loss(w, sample, rho):
    """Per-sample regularized SVM loss (rho/2)||w||^2 + max(0, 1 - gamma h.w)."""
    w = np.asarray(w, dtype=float)
    h = np.asarray(sample.h, dtype=float)
    if h.shape != w.shape:
        raise ValueError(f"dimension mismatch: w has {w.shape}, h has {h.shape}")
    margin = sample.gamma * (h @ w)
    return 0.5 * rho * (w @ w) + max(0.0, 1.0 - margin)


def _check_label(gamma):
    if gamma not in (-1, 1, -1.0, 1.0):
        raise ValueError(f"SVM label must be -1 or +1, got {gamma!r}")


@dataclass(frozen=True, eq=False)
class SvmProblem:
    """Two-class linear SVM with risk (rho/2)||w||^2 + E max(0, 1 - gamma h.w).

    Parameters
    ----------
    rho : float
        Regularization weight; also the strong-convexity modulus of the risk.
    dim : int
        Feature dimension.
    """

    rho: float
    dim: int

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")

    def instantaneous_subgradient(self, w, sample):
        """Per-sample subgradient rho*w - gamma*h * [gamma h.w <= 1].

        The indicator is taken active at margin exactly 1 and the choice is
        kept fixed, so the update is the usual shrink-then-correct step
        w <- (1 - mu*rho) w + mu*gamma*h on margin violators.
        """
        _check_label(sample.gamma)
        h = sample.h
        if h.shape != np.shape(w):
            raise ValueError("dimension mismatch between w and sample")
        g = self.rho * np.asarray(w, dtype=float)
        if sample.gamma * (h @ w) <= 1.0:
            g = g - sample.gamma * h
        return g

    def loss(self, w, sample):
        return hinge_loss(w, sample, self.rho)

    def true_subgradient_mc(self, w, sampler, n):
        """Monte-Carlo mean of the instantaneous subgradient over n fresh draws."""
        if n < 1:
            raise ValueError("n must be at least 1")
        w = np.asarray(w, dtype=float)
        feats, labels = sampler.draw_batch(n)
        margins = labels * (feats @ w)
        active = (margins <= 1.0).astype(float)
        return self.rho * w - ((labels * active) @ feats) / n

    def risk_mc(self, w, sampler, n):
        """Monte-Carlo risk estimate over n fresh draws from ``sampler``."""
        if n < 1:
            raise ValueError("n must be at least 1")
        w = np.asarray(w, dtype=float)
        feats, labels = sampler.draw_batch(n)
        margins = labels * (feats @ w)
        return 0.5 * self.rho * (w @ w) + np.maximum(0.0, 1.0 - margins).mean()


@dataclass(frozen=True, eq=False)
class SvmSampleSet:
    """SVM risk restricted to a frozen sample set.

    On a fixed set the "expected" risk is just the sample average, so the
    exact risk, its exact subgradient, and a deterministic minimizer are all
    computable.  Streaming uniformly with replacement from the set makes the
    per-sample subgradient an unbiased estimate of :meth:`subgradient`, which
    is what the steady-state bounds assume.
    """

    features: np.ndarray
    labels: np.ndarray
    rho: float

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=float)
        if feats.ndim != 2 or labels.shape != (feats.shape[0],):
            raise ValueError("features must be (n, dim) with matching labels")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def dim(self):
        return self.features.shape[1]

    @cached_property
    def _signed(self):
        # gamma_k * h_k rows, C order for A @ w
        return np.ascontiguousarray(self.labels[:, None] * self.features)

    @cached_property
    def _signed_f(self):
        # Fortran order so mask @ A is a fast gemv as well
        return np.asfortranarray(self._signed)

    @cached_property
    def trace_second_moment(self):
        """Average squared feature norm (1/n) sum ||h_k||^2."""
        return float(np.einsum("ij,ij->", self.features, self.features) / self.n)

    def instantaneous_subgradient(self, w, sample):
        _check_label(sample.gamma)
        g = self.rho * np.asarray(w, dtype=float)
        if sample.gamma * (sample.h @ w) <= 1.0:
            g = g - sample.gamma * sample.h
        return g

    def risk(self, w):
        """Exact regularized hinge risk on the set."""
        w = np.asarray(w, dtype=float)
        margins = self._signed @ w
        return 0.5 * self.rho * (w @ w) + np.maximum(0.0, 1.0 - margins).mean()

    def subgradient(self, w):
        """Exact subgradient of :meth:`risk` (indicator active at margin 1)."""
        w = np.asarray(w, dtype=float)
        active = (self._signed @ w <= 1.0).astype(float)
        return self.rho * w - (active @ self._signed_f) / self.n

    # engine/theory duck-typing alias
    true_subgradient = subgradient

    def minimize(self, n_iters=100_000):
        """Deterministic full-risk subgradient descent to the set minimizer.

        Runs diminishing steps mu_t = 1/(rho (t+1)) from zero and returns the
        average of the second half of the trajectory, the standard tail
        average for strongly convex subgradient descent.
        """
        if n_iters < 1:
            raise ValueError("n_iters must be at least 1")
        signed = self._signed
        signed_f = self._signed_f
        n = float(self.n)
        rho = self.rho
        w = np.zeros(self.dim)
        w_avg = np.zeros(self.dim)
        margins = np.empty(self.n)
        active = np.empty(self.n)
        tail_start = n_iters // 2
        n_avg = 0
        for t in range(n_iters):
            np.dot(signed, w, out=margins)
            np.less_equal(margins, 1.0, out=active, casting="unsafe")
            gsum = active @ signed_f
            w -= (1.0 / (rho * (t + 1))) * (rho * w - gsum / n)
            if t >= tail_start:
                n_avg += 1
                w_avg += (w - w_avg) / n_avg
        return w_avg

    def accuracy(self, w):
        """Fraction of samples with sign(h.w) equal to the label; sign(0) -> +1."""
        scores = self.features @ np.asarray(w, dtype=float)
        pred = np.where(scores >= 0.0, 1.0, -1.0)
        return float(np.mean(pred == self.labels))


@dataclass(frozen=True, eq=False)
class LassoProblem:
    """Stochastic LASSO: risk (1/2) E (gamma - h.w)^2 + delta ||w||_1.

    The data model is gamma = h.w_true + noise with zero-mean regressors of
    covariance ``cov_h`` and independent zero-mean noise of variance
    ``noise_var``, which makes the risk and its subgradient closed-form.
    """

    delta: float
    w_true: np.ndarray
    cov_h: np.ndarray
    noise_var: float

    def __post_init__(self):
        w_true = np.asarray(self.w_true, dtype=float)
        cov = np.asarray(self.cov_h, dtype=float)
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.noise_var < 0:
            raise ValueError("noise_var must be nonnegative")
        if w_true.ndim != 1:
            raise ValueError("w_true must be a vector")
        m = w_true.shape[0]
        if cov.shape != (m, m):
            raise ValueError("cov_h must be square and match w_true")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ValueError("cov_h must be symmetric")
        if np.linalg.eigvalsh(cov).min() <= 0:
            raise ValueError("cov_h must be positive definite")
        object.__setattr__(self, "w_true", w_true)
        object.__setattr__(self, "cov_h", cov)

    @property
    def dim(self):
        return self.w_true.shape[0]

    @cached_property
    def _identity_cov(self):
        return bool(np.array_equal(self.cov_h, np.eye(self.dim)))

    @cached_property
    def min_eigenvalue(self):
        """Smallest eigenvalue of the regressor covariance."""
        return float(np.linalg.eigvalsh(self.cov_h)[0])

    @cached_property
    def spectral_norm(self):
        """2-norm of the regressor covariance."""
        return float(np.abs(np.linalg.eigvalsh(self.cov_h)).max())

    @cached_property
    def trace(self):
        return float(np.trace(self.cov_h))

    def instantaneous_subgradient(self, w, sample):
        """Per-sample subgradient -h (gamma - h.w) + delta sgn(w), sgn(0)=0."""
        h = sample.h
        residual = sample.gamma - h @ w
        return self.delta * np.sign(w) - residual * h

    def true_subgradient(self, w):
        """Exact subgradient cov_h (w - w_true) + delta sgn(w)."""
        w = np.asarray(w, dtype=float)
        return self.cov_h @ (w - self.w_true) + self.delta * np.sign(w)

    def risk(self, w):
        """Closed-form risk (1/2)(w-w_true).cov.(w-w_true) + noise_var/2 + delta||w||_1.

        The constant noise_var/2 keeps the value aligned with Monte-Carlo
        estimates of the risk; it cancels in excess-risk differences.
        """
        w = np.asarray(w, dtype=float)
        d = w - self.w_true
        quad = d @ d if self._identity_cov else d @ self.cov_h @ d
        return 0.5 * quad + 0.5 * self.noise_var + self.delta * np.abs(w).sum()

    def optimum(self):
        """Minimizer soft_threshold(w_true, delta); identity covariance only.

        The shrinkage formula solves the first-order condition coordinatewise,
        which decouples only when cov_h is the identity.  The returned point
        is re-checked against the optimality condition before returning.
        """
        if not self._identity_cov:
            raise UnsupportedConfiguration(
                "closed-form LASSO optimum requires identity covariance"
            )
        w_star = soft_threshold(self.w_true, self.delta)
        # 0 must lie in the subdifferential: residual + delta*t = 0 with
        # t = sgn(w*_j) on the support and |t| <= 1 off it.
        resid = w_star - self.w_true
        on = w_star != 0.0
        if not np.all(np.abs(resid[on] + self.delta * np.sign(w_star[on])) <= 1e-12):
            raise NumericError("optimality condition failed on the support")
        if not np.all(np.abs(self.w_true[~on]) <= self.delta + 1e-12):
            raise NumericError("optimality condition failed off the support")
        return w_star


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Grayscale image: float pixel matrix plus its nominal peak value.

    ``peak`` is 255.0 for 8-bit pipelines and 1.0 for normalized ones.  Pixel
    values may leave [0, peak] transiently (e.g. after additive noise or
    during optimization); clamping happens only when writing files.
    """

    pixels: np.ndarray
    peak: float = 255.0

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2 or px.shape[0] < 2 or px.shape[1] < 2:
            raise ValueError("image must be at least 2x2")
        if not np.all(np.isfinite(px)):
            raise NumericError("image contains non-finite pixels")
        if self.peak <= 0:
            raise ValueError("peak must be positive")
        object.__setattr__(self, "pixels", px)

    @property
    def shape(self):
        return self.pixels.shape


def tv_value(img):
    """Anisotropic total variation: sum of |down-neighbor| and |right-neighbor|
    differences, boundary terms dropped."""
    p = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=float)
    return float(np.abs(np.diff(p, axis=0)).sum() + np.abs(np.diff(p, axis=1)).sum())


def _tv_sign_sum(p):
    # sum over existing neighbors of sgn(pixel - neighbor); shares the
    # dropped-boundary convention of tv_value so the step is a true
    # subgradient of fidelity + lam * tv_value.
    g = np.zeros_like(p)
    d = np.sign(p[1:, :] - p[:-1, :])
    g[1:, :] += d
    g[:-1, :] -= d
    d = np.sign(p[:, 1:] - p[:, :-1])
    g[:, 1:] += d
    g[:, :-1] -= d
    return g


def tv_subgradient_step(img, noisy, mu, lam):
    """One subgradient step on (1/2)||I - I_noisy||_F^2 + lam * TV(I).

    Returns a new image; pixels are not clipped to the display range during
    iteration.
    """
    if img.shape != noisy.shape:
        raise ValueError(f"dimension mismatch: {img.shape} vs {noisy.shape}")
    if mu <= 0 or lam < 0:
        raise ValueError("mu must be positive and lam nonnegative")
    p = img.pixels
    g = (p - noisy.pixels) + lam * _tv_sign_sum(p)
    return GrayImage(p - mu * g, peak=img.peak)
