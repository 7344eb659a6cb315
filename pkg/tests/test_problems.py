import math

import numpy as np
import pytest

from sgsmooth import data, problems
from sgsmooth.errors import NumericError, UnsupportedConfiguration
from sgsmooth.problems import GrayImage, Sample


def make_lasso(dim=6, delta=0.01, noise_var=0.01, cov=None, w_true=None, seed=0):
    rng = np.random.default_rng(seed)
    if w_true is None:
        w_true = np.zeros(dim)
        w_true[0], w_true[1] = 1.0, -1.0
    if cov is None:
        cov = np.eye(dim)
    return problems.LassoProblem(
        delta=delta, w_true=w_true, cov_h=cov, noise_var=noise_var
    )


def random_spd(dim, rng):
    a = rng.normal(size=(dim, dim))
    return a @ a.T + dim * np.eye(dim)


# ---------- soft threshold ----------


def test_soft_threshold_values():
    assert problems.soft_threshold(0.5, 0.002) == pytest.approx(0.498, abs=1e-15)
    assert problems.soft_threshold(0.001, 0.002) == 0.0
    assert problems.soft_threshold(-0.5, 0.002) == pytest.approx(-0.498, abs=1e-15)


def test_soft_threshold_vector_and_validation():
    np.testing.assert_allclose(
        problems.soft_threshold([1.0, -1.0, 0.0], 0.25), [0.75, -0.75, 0.0]
    )
    with pytest.raises(ValueError):
        problems.soft_threshold([1.0], -0.1)


# ---------- SVM ----------


def test_svm_subgradient_at_zero_is_negative_label_times_feature():
    p = problems.SvmProblem(rho=0.1, dim=3)
    h = np.array([1.0, 2.0, -1.0])
    g = p.instantaneous_subgradient(np.zeros(3), Sample(h, -1.0))
    np.testing.assert_allclose(g, h)  # -gamma*h with gamma=-1


def test_svm_subgradient_inactive_hinge_is_pure_regularizer():
    p = problems.SvmProblem(rho=0.1, dim=2)
    w = np.array([2.0, 0.0])
    s = Sample(np.array([1.0, 0.0]), 1.0)  # margin = 2 > 1
    np.testing.assert_allclose(p.instantaneous_subgradient(w, s), 0.1 * w)


def test_svm_subgradient_boundary_margin_is_active():
    p = problems.SvmProblem(rho=0.1, dim=2)
    w = np.array([1.0, 0.0])
    s = Sample(np.array([1.0, 0.0]), 1.0)  # margin exactly 1
    np.testing.assert_allclose(
        p.instantaneous_subgradient(w, s), 0.1 * w - s.h
    )


def test_svm_rejects_bad_label():
    p = problems.SvmProblem(rho=0.1, dim=2)
    with pytest.raises(ValueError):
        p.instantaneous_subgradient(np.zeros(2), Sample(np.zeros(2), 0.5))


def test_svm_mc_subgradient_single_draw_matches_instantaneous():
    p = problems.SvmProblem(rho=0.05, dim=3)
    spec = data.TwoClassGaussianSpec.symmetric(np.array([0.5, 0.2, -0.1]))
    w = np.array([0.3, -0.4, 0.1])
    g_mc = p.true_subgradient_mc(w, data.TwoClassGaussianSampler(spec, 5), 1)
    g_one = p.instantaneous_subgradient(
        w, data.TwoClassGaussianSampler(spec, 5).draw()
    )
    np.testing.assert_allclose(g_mc, g_one, rtol=1e-12)


def test_svm_mc_subgradient_matches_analytic_mean_at_zero():
    # at w = 0 every margin is 0 <= 1, so the mean is -E[gamma h] = -m exactly
    m = np.array([0.8, -0.3, 0.5])
    p = problems.SvmProblem(rho=0.05, dim=3)
    spec = data.TwoClassGaussianSpec.symmetric(m)
    n = 40_000
    g = p.true_subgradient_mc(np.zeros(3), data.TwoClassGaussianSampler(spec, 8), n)
    stderr = math.sqrt((1.0 + float(m @ m) / 3) / n)  # crude per-component scale
    np.testing.assert_allclose(g, -m, atol=4 * stderr + 0.01)


def test_svm_mc_subgradient_scaling_consistency():
    p = problems.SvmProblem(rho=0.05, dim=3)
    spec = data.TwoClassGaussianSpec.symmetric(np.array([0.5, 0.5, 0.5]))
    w = np.array([0.2, 0.1, -0.3])
    small = p.true_subgradient_mc(w, data.TwoClassGaussianSampler(spec, 21), 10_000)
    big = p.true_subgradient_mc(w, data.TwoClassGaussianSampler(spec, 22), 40_000)
    # component std is O(1); combined standard error of the difference
    se = math.sqrt(1.0 / 10_000 + 1.0 / 40_000)
    assert np.max(np.abs(small - big)) <= 5 * se


def test_svm_risk_mc_at_zero_is_exactly_one():
    p = problems.SvmProblem(rho=0.7, dim=2)
    spec = data.TwoClassGaussianSpec.symmetric(np.array([1.0, 0.0]))
    r = p.risk_mc(np.zeros(2), data.TwoClassGaussianSampler(spec, 3), 500)
    assert r == 1.0


def test_svm_risk_mc_all_margins_large_leaves_only_regularizer():
    p = problems.SvmProblem(rho=0.5, dim=2)

    class SeparableSampler:
        def draw_batch(self, n):
            feats = np.tile([5.0, 0.0], (n, 1))
            return feats, np.ones(n)

    w = np.array([1.0, 0.0])  # margin = 5 > 1 for every sample
    r = p.risk_mc(w, SeparableSampler(), 100)
    assert r == pytest.approx(0.5 * 0.5 * 1.0, abs=0)


def test_svm_empirical_minimizer_is_locally_optimal():
    rng = np.random.default_rng(42)
    spec = data.TwoClassGaussianSpec.symmetric(np.array([1.0, 0.5]))
    feats, labels = data.TwoClassGaussianSampler(spec, 12).draw_batch(3000)
    sset = problems.SvmSampleSet(feats, labels, rho=0.05)
    w_star = sset.minimize(4000)
    base = sset.risk(w_star)
    for _ in range(20):
        assert base <= sset.risk(w_star + 0.05 * rng.normal(size=2)) + 1e-9


def test_hinge_loss_values():
    assert problems.hinge_loss(np.zeros(2), Sample(np.array([3.0, 1.0]), 1.0), 0.2) == 1.0
    w = np.array([1.0, 0.0])
    s = Sample(np.array([1.0, 0.0]), 1.0)  # margin exactly 1: hinge vanishes
    assert problems.hinge_loss(w, s, 0.2) == pytest.approx(0.1, abs=1e-15)


def test_mean_hinge_loss_equals_empirical_risk():
    spec = data.TwoClassGaussianSpec.symmetric(np.array([0.5, -0.5]))
    feats, labels = data.TwoClassGaussianSampler(spec, 9).draw_batch(400)
    sset = problems.SvmSampleSet(feats, labels, rho=0.3)
    w = np.array([0.4, 0.2])
    mean_loss = np.mean(
        [problems.hinge_loss(w, Sample(feats[k], labels[k]), 0.3) for k in range(400)]
    )
    assert mean_loss == pytest.approx(sset.risk(w), rel=1e-12)


# ---------- LASSO ----------


def test_lasso_instantaneous_subgradient_at_zero():
    p = make_lasso(dim=2, delta=0.5, w_true=np.array([1.0, 1.0]))
    g = p.instantaneous_subgradient(np.zeros(2), Sample(np.array([1.0, 0.0]), 1.0))
    np.testing.assert_allclose(g, [-1.0, 0.0])  # sgn(0) = 0 contributes nothing


def test_lasso_instantaneous_subgradient_zero_residual():
    p = make_lasso(dim=3, delta=0.25, w_true=np.array([1.0, -2.0, 0.0]))
    h = np.array([0.5, 1.0, 2.0])
    s = Sample(h, float(h @ p.w_true))  # noiseless sample
    g = p.instantaneous_subgradient(p.w_true, s)
    np.testing.assert_allclose(g, 0.25 * np.sign(p.w_true), atol=1e-15)


def test_lasso_mc_mean_matches_true_subgradient():
    p = make_lasso(dim=5, delta=0.05, noise_var=0.04)
    spec = data.RegressionStreamSpec(p.w_true, p.cov_h, p.noise_var)
    sampler = data.RegressionSampler(spec, 123)
    w = np.array([0.5, -0.2, 0.1, 0.0, -0.4])
    n = 100_000
    feats, targets = sampler.draw_batch(n)
    resid = targets - feats @ w
    ghat_mean = p.delta * np.sign(w) - (resid @ feats) / n
    g_true = p.true_subgradient(w)
    # componentwise 3 standard errors
    draws = p.delta * np.sign(w)[None, :] - resid[:, None] * feats
    stderr = draws.std(axis=0, ddof=1) / math.sqrt(n)
    assert np.all(np.abs(ghat_mean - g_true) <= 3 * stderr)


def test_lasso_true_subgradient_at_w_true():
    p = make_lasso(dim=4, delta=0.3, w_true=np.array([1.0, -2.0, 3.0, -4.0]))
    np.testing.assert_allclose(
        p.true_subgradient(p.w_true), 0.3 * np.sign(p.w_true), atol=1e-15
    )


def test_lasso_soft_threshold_point_is_stationary():
    p = make_lasso(dim=4, delta=0.1, w_true=np.array([1.0, -1.0, 0.5, 0.0]))
    w_star = problems.soft_threshold(p.w_true, p.delta)
    np.testing.assert_allclose(p.true_subgradient(w_star), np.zeros(4), atol=1e-15)


def test_lasso_true_subgradient_matches_finite_differences():
    rng = np.random.default_rng(31)
    cov = random_spd(5, rng)
    p = make_lasso(dim=5, delta=0.07, cov=cov, w_true=rng.normal(size=5))
    for _ in range(25):
        w = rng.normal(size=5)
        if np.min(np.abs(w)) < 0.05:
            continue  # stay away from the kinks
        g = p.true_subgradient(w)
        fd = np.empty(5)
        eps = 1e-5
        for j in range(5):
            e = np.zeros(5)
            e[j] = eps
            fd[j] = (p.risk(w + e) - p.risk(w - e)) / (2 * eps)
        np.testing.assert_allclose(g, fd, atol=1e-6)


def test_lasso_risk_closed_form_values():
    w_true = np.array([1.0, -1.0, 0.0])
    p = problems.LassoProblem(
        delta=1e-9, w_true=w_true, cov_h=np.eye(3), noise_var=0.04
    )
    # at w_true the quadratic part vanishes: risk = noise_var/2 + delta*||w||_1
    assert p.risk(w_true) == pytest.approx(0.02 + 1e-9 * 2.0, rel=1e-12)
    rng = np.random.default_rng(2)
    cov = random_spd(3, rng)
    p2 = problems.LassoProblem(delta=0.3, w_true=w_true, cov_h=cov, noise_var=0.04)
    expected = 0.5 * float(w_true @ cov @ w_true) + 0.02
    assert p2.risk(np.zeros(3)) == pytest.approx(expected, rel=1e-12)


def test_lasso_risk_matches_monte_carlo():
    p = make_lasso(dim=4, delta=0.05, noise_var=0.09)
    spec = data.RegressionStreamSpec(p.w_true, p.cov_h, p.noise_var)
    sampler = data.RegressionSampler(spec, 55)
    w = np.array([0.3, -0.8, 0.2, 0.0])
    n = 200_000
    feats, targets = sampler.draw_batch(n)
    sq = 0.5 * (targets - feats @ w) ** 2
    mc = sq.mean() + p.delta * np.abs(w).sum()
    stderr = sq.std(ddof=1) / math.sqrt(n)
    assert abs(mc - p.risk(w)) <= 3 * stderr


def test_lasso_optimum_basic_and_dead_zone():
    p = make_lasso(dim=4, delta=0.002, w_true=np.array([1.0, -1.0, 0.0, 0.0]))
    np.testing.assert_allclose(p.optimum(), [0.998, -0.998, 0.0, 0.0], atol=1e-15)
    p2 = make_lasso(dim=3, delta=2.0, w_true=np.array([1.0, -1.0, 0.5]))
    np.testing.assert_array_equal(p2.optimum(), np.zeros(3))


def test_lasso_optimum_coordinate_probes():
    p = make_lasso(dim=5, delta=0.05, w_true=np.array([1.0, -0.5, 0.2, 0.03, 0.0]))
    w_star = p.optimum()
    base = p.risk(w_star)
    step = 1e-4
    for j in range(5):
        e = np.zeros(5)
        e[j] = step
        assert base <= p.risk(w_star + e) + 1e-15
        assert base <= p.risk(w_star - e) + 1e-15


def test_lasso_optimum_requires_identity_covariance():
    rng = np.random.default_rng(8)
    p = make_lasso(dim=3, cov=random_spd(3, rng))
    with pytest.raises(UnsupportedConfiguration):
        p.optimum()


def test_lasso_validation():
    with pytest.raises(ValueError):
        make_lasso(delta=0.0)
    with pytest.raises(ValueError):
        problems.LassoProblem(
            delta=0.1,
            w_true=np.zeros(2),
            cov_h=np.array([[1.0, 2.0], [0.0, 1.0]]),
            noise_var=0.1,
        )
    with pytest.raises(ValueError):
        problems.LassoProblem(
            delta=0.1,
            w_true=np.zeros(2),
            cov_h=-np.eye(2),
            noise_var=0.1,
        )


# ---------- total variation ----------


def tv_double_loop(pixels):
    rows, cols = pixels.shape
    total = 0.0
    for m in range(rows):
        for n in range(cols):
            if m + 1 < rows:
                total += abs(pixels[m, n] - pixels[m + 1, n])
            if n + 1 < cols:
                total += abs(pixels[m, n] - pixels[m, n + 1])
    return total


def test_tv_constant_image_is_zero():
    img = GrayImage(np.full((4, 4), 3.0), peak=255.0)
    assert problems.tv_value(img) == 0.0


def test_tv_2x2_hand_count():
    img = GrayImage(np.array([[0.0, 1.0], [0.0, 1.0]]), peak=1.0)
    assert problems.tv_value(img) == 2.0


def test_tv_matches_double_loop_oracle():
    rng = np.random.default_rng(17)
    pixels = rng.uniform(0, 255, size=(16, 16))
    img = GrayImage(pixels, peak=255.0)
    assert problems.tv_value(img) == pytest.approx(tv_double_loop(pixels), rel=1e-12)


def test_tv_invariants():
    rng = np.random.default_rng(18)
    pixels = rng.uniform(size=(8, 8))
    img = GrayImage(pixels, peak=1.0)
    assert problems.tv_value(img) > 0
    shifted = GrayImage(pixels + 5.0, peak=1.0)
    assert problems.tv_value(shifted) == pytest.approx(problems.tv_value(img), rel=1e-12)


def test_tv_step_fixed_point_on_constant_image():
    img = GrayImage(np.full((5, 5), 0.5), peak=1.0)
    out = problems.tv_subgradient_step(img, img, mu=0.1, lam=10.0)
    np.testing.assert_array_equal(out.pixels, img.pixels)


def test_tv_step_lambda_zero_is_pure_fidelity():
    rng = np.random.default_rng(19)
    img = GrayImage(rng.uniform(size=(6, 6)), peak=1.0)
    noisy = GrayImage(rng.uniform(size=(6, 6)), peak=1.0)
    out = problems.tv_subgradient_step(img, noisy, mu=0.25, lam=0.0)
    np.testing.assert_allclose(
        out.pixels, 0.75 * img.pixels + 0.25 * noisy.pixels, rtol=1e-12
    )


def test_tv_step_raised_interior_pixel_decreases():
    base = np.full((5, 5), 0.5)
    raised = base.copy()
    raised[2, 2] += 0.2
    img = GrayImage(raised, peak=1.0)
    noisy = GrayImage(raised.copy(), peak=1.0)  # fidelity term vanishes
    mu, lam = 0.01, 0.5
    out = problems.tv_subgradient_step(img, noisy, mu=mu, lam=lam)
    # all four sign terms are +1 at the raised pixel
    assert out.pixels[2, 2] == pytest.approx(raised[2, 2] - 4 * mu * lam, abs=1e-15)
    # each neighbor sees exactly one -1 sign term
    assert out.pixels[1, 2] == pytest.approx(0.5 + mu * lam, abs=1e-15)


def test_tv_step_dimension_mismatch():
    a = GrayImage(np.zeros((4, 4)), peak=1.0)
    b = GrayImage(np.zeros((4, 5)), peak=1.0)
    with pytest.raises(ValueError):
        problems.tv_subgradient_step(a, b, 0.1, 0.1)


def test_tv_step_is_true_subgradient_of_implemented_objective():
    # J(X) = 0.5 ||X - noisy||_F^2 + lam * tv_value(X) must satisfy the
    # subgradient inequality for the direction the step implements
    rng = np.random.default_rng(20)
    lam = 0.3
    noisy_px = rng.uniform(size=(7, 7))
    noisy = GrayImage(noisy_px, peak=1.0)

    def objective(px):
        return 0.5 * float(np.sum((px - noisy_px) ** 2)) + lam * problems.tv_value(
            GrayImage(px, peak=1.0)
        )

    for _ in range(100):
        x = rng.normal(size=(7, 7))
        y = rng.normal(size=(7, 7))
        img = GrayImage(x, peak=1.0)
        stepped = problems.tv_subgradient_step(img, noisy, mu=1.0, lam=lam)
        g = x - stepped.pixels  # mu = 1 recovers the subgradient
        lower = objective(x) + float(np.sum(g * (y - x)))
        assert objective(y) >= lower - 1e-9


def test_gray_image_validation():
    with pytest.raises(ValueError):
        GrayImage(np.zeros((1, 5)), peak=1.0)
    with pytest.raises(NumericError):
        GrayImage(np.full((3, 3), np.inf), peak=1.0)
    with pytest.raises(ValueError):
        GrayImage(np.zeros((3, 3)), peak=0.0)
