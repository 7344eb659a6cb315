"""Experiment runner: ``sgsmooth run | verify | denoise | svm-train``.

Experiments are described by flat INI files (see the shipped ``configs/``
directory and the README for the key reference).  Exit codes: 0 success,
1 property/verification failure, 2 usage or configuration error, 3 I/O error.
"""

import argparse
import configparser
import functools
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import data, engine, problems, theory
from .errors import (
    ConfigError,
    FormatError,
    InsufficientData,
    NumericError,
    ParseError,
    StreamExhausted,
    UnsupportedConfiguration,
)

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_CONFIG = 2
EXIT_IO = 3

CSV_HEADER = "iteration,excess_risk_raw,excess_risk_smoothed,msd,bound"


# ---------- config handling ----------


def _load_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file {path!r} not found")
    return parser


def _get(cfg, section, key, cast, default=None, required=False):
    if not cfg.has_option(section, key):
        if required:
            raise ConfigError(f"[{section}] {key} is required")
        return default
    raw = cfg.get(section, key)
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


def _positive(cfg, section, key, cast, default=None, required=False):
    val = _get(cfg, section, key, cast, default=default, required=required)
    if val is not None and val <= 0:
        raise ConfigError(f"[{section}] {key} must be positive, got {val}")
    return val


def _parse_sparse_vector(raw, dim):
    """Parse 'idx:val idx:val ...' (0-based) into a dense length-dim vector."""
    vec = np.zeros(dim)
    for tok in raw.split():
        try:
            idx_text, val_text = tok.split(":", 1)
            idx = int(idx_text)
            val = float(val_text)
        except ValueError:
            raise ConfigError(f"[problem] w_true: cannot parse entry {tok!r}") from None
        if not 0 <= idx < dim:
            raise ConfigError(f"[problem] w_true: index {idx} outside 0..{dim - 1}")
        vec[idx] = val
    return vec


def _run_config(cfg, seed_override=None):
    mu = _positive(cfg, "run", "mu", float, required=True)
    kappa_raw = _get(cfg, "run", "kappa", str, default="auto").strip()
    kappa = "auto" if kappa_raw == "auto" else float(kappa_raw)
    seed = _get(cfg, "run", "seed", int, default=0)
    if seed_override is not None:
        seed = seed_override
    try:
        return engine.RunConfig(
            mu=mu,
            kappa=kappa,
            iterations=_get(cfg, "run", "iterations", int, default=10_000),
            record_stride=_positive(cfg, "run", "record_stride", int, default=100),
            seed=seed,
            replications=_positive(cfg, "run", "replications", int, default=1),
        )
    except ValueError as exc:
        raise ConfigError(f"[run] {exc}") from None


class _LassoBundle:
    """Problem, stream factory, oracle and constants for a LASSO experiment."""

    kind = "lasso"

    def __init__(self, cfg, seed):
        dim = _positive(cfg, "problem", "dim", int, required=True)
        delta = _positive(cfg, "problem", "delta", float, required=True)
        noise_var = _get(cfg, "problem", "noise_var", float, default=0.01)
        w_true_raw = _get(cfg, "problem", "w_true", str, required=True)
        w_true = _parse_sparse_vector(w_true_raw, dim)
        self.problem = problems.LassoProblem(
            delta=delta, w_true=w_true, cov_h=np.eye(dim), noise_var=noise_var
        )
        self.spec = data.RegressionStreamSpec(
            w_true=w_true, cov_h=self.problem.cov_h, noise_var=noise_var
        )
        self.stream_factory = functools.partial(data.make_sampler, self.spec)
        self.w_star = self.problem.optimum()
        self.oracle = engine.RiskOracle(
            risk=self.problem.risk,
            w_star=self.w_star,
            risk_star=self.problem.risk(self.w_star),
        )
        n_mc = _positive(cfg, "problem", "a_mc_samples", int, default=100_000)
        self.a_estimate = theory.estimate_lasso_a(self.problem, n_mc, seed=seed + 10**6)
        self.a_gaussian = theory.lasso_gaussian_noise_modulus(self.problem)
        self.constants_mc = theory.lasso_constants(
            self.problem, self.a_estimate.value, w_star=self.w_star
        )
        # Exact modulus for Gaussian regressors; unlike the distribution-free
        # estimate it keeps moderate step sizes below the stability ceiling,
        # so rate-dependent outputs (auto kappa, bound column) use it.
        self.constants = theory.lasso_constants(
            self.problem, self.a_gaussian, w_star=self.w_star
        )

    def alpha_for_auto(self, mu):
        return theory.rate_alpha(mu, self.constants)

    def summary_lines(self, mu):
        lines = [
            f"problem = lasso (dim={self.problem.dim}, delta={self.problem.delta}, "
            f"noise_var={self.problem.noise_var}, identity covariance)",
            f"w_star = soft_threshold(w_true, delta); ||w_star||^2 = "
            f"{float(self.w_star @ self.w_star)!r}",
            f"noise modulus a (Monte-Carlo spectral estimate) = "
            f"{self.a_estimate.value!r} +- {self.a_estimate.stderr:.3g}",
            f"noise modulus a (exact Gaussian) = {self.a_gaussian!r}",
        ]
        for tag, k in (("mc-modulus", self.constants_mc), ("gaussian-modulus", self.constants)):
            lines += _constants_lines(tag, k, mu)
        lines.append("rate-dependent outputs (auto kappa, bound column) use the "
                     "gaussian-modulus constants")
        return lines


class _SvmBundle:
    """Frozen-set SVM experiment: exact empirical risk and minimizer."""

    kind = "svm"

    def __init__(self, cfg, seed):
        rho = _positive(cfg, "problem", "rho", float, required=True)
        mean_raw = _get(cfg, "problem", "mean", str, required=True)
        try:
            mean = np.array([float(tok) for tok in mean_raw.split(",")])
        except ValueError:
            raise ConfigError(f"[problem] mean: cannot parse {mean_raw!r}") from None
        cov_scale = _positive(cfg, "problem", "cov_scale", float, default=1.0)
        prior_pos = _get(cfg, "problem", "prior_pos", float, default=0.5)
        train_size = _positive(cfg, "problem", "train_size", int, default=100_000)
        oracle_iters = _positive(cfg, "problem", "oracle_iterations", int, default=100_000)

        self.spec = data.TwoClassGaussianSpec.symmetric(
            mean, cov_scale=cov_scale, prior_pos=prior_pos
        )
        sampler = data.TwoClassGaussianSampler(self.spec, seed + 10**6)
        feats, labels = sampler.draw_batch(train_size)
        self.sample_set = problems.SvmSampleSet(feats, labels, rho)
        self.problem = self.sample_set
        self.stream_factory = functools.partial(data.SetSampler, feats, labels)
        self.w_star = self.sample_set.minimize(oracle_iters)
        self.oracle = engine.RiskOracle(
            risk=self.sample_set.risk,
            w_star=self.w_star,
            risk_star=self.sample_set.risk(self.w_star),
        )
        self.constants = theory.svm_constants(rho, self.sample_set.trace_second_moment)

    def alpha_for_auto(self, mu):
        return theory.rate_alpha(mu, self.constants)

    def summary_lines(self, mu):
        sset = self.sample_set
        wn2 = float(self.w_star @ self.w_star)
        tight = theory.svm_tight_bound(mu, sset.rho, wn2, sset.trace_second_moment)
        lines = [
            f"problem = svm (dim={sset.dim}, rho={sset.rho}, frozen set n={sset.n})",
            f"empirical Tr(R_h) = {sset.trace_second_moment!r}",
            f"||w_star||^2 = {wn2!r} (deterministic full-risk descent)",
        ]
        lines += _constants_lines("svm", self.constants, mu)
        lines.append(f"tight steady-state excess-risk bound = {tight.bound!r} "
                     f"(alpha = {tight.alpha!r})")
        return lines


def _constants_lines(tag, k, mu):
    lines = [
        f"constants[{tag}]: eta={k.eta!r} c={k.c!r} d={k.d!r} e2={k.e2!r} "
        f"f2={k.f2!r} beta2={k.beta2!r} sigma2={k.sigma2!r} tau2={k.tau2!r}"
    ]
    alpha = theory.rate_alpha(mu, k)
    ceiling = theory.step_size_ceiling(k)
    line = f"rates[{tag}]: alpha={alpha!r} mu_ceiling={ceiling!r}"
    if 0.0 < alpha < 1.0:
        ss = theory.steady_state_bounds(mu, k)
        line += f" steady_excess<={ss.excess_risk!r} steady_msd<={ss.msd!r}"
    else:
        line += " (mu exceeds ceiling; rate bounds not applicable)"
    lines.append(line)
    return lines


def _build_bundle(cfg, seed):
    kind = _get(cfg, "problem", "kind", str, required=True).strip().lower()
    if kind == "lasso":
        return _LassoBundle(cfg, seed)
    if kind == "svm":
        return _SvmBundle(cfg, seed)
    raise ConfigError(f"[problem] kind must be 'lasso' or 'svm', got {kind!r}")


# ---------- run ----------


def cmd_run(ns):
    cfg = _load_config(ns.config)
    run_cfg = _run_config(cfg, ns.seed)
    bundle = _build_bundle(cfg, run_cfg.seed)
    run_cfg = engine.resolve_kappa(run_cfg, bundle.alpha_for_auto(run_cfg.mu))

    out_dir = Path(ns.out or _get(cfg, "output", "dir", str, default="out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = ns.workers or min(os.cpu_count() or 1, run_cfg.replications)

    t0 = time.perf_counter()
    results = engine.run_replications(
        bundle.problem,
        bundle.stream_factory,
        run_cfg,
        oracle=bundle.oracle,
        workers=workers,
    )
    elapsed = time.perf_counter() - t0
    stats = engine.average_trajectories([r.trajectory for r in results])

    msd0 = float(bundle.w_star @ bundle.w_star)  # runs start at w_0 = 0
    try:
        # horizon L = i + 1: the smoothed iterate after i updates combines i+1 iterates
        bound_fn = lambda i: theory.finite_horizon_bound(
            run_cfg.mu, bundle.constants, int(i) + 1, msd0
        )
        bound_fn(1)
    except UnsupportedConfiguration:
        bound_fn = None

    csv_path = out_dir / "curves.csv"
    with open(csv_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row, i in enumerate(stats.iterations):
            bound = "" if bound_fn is None else repr(float(bound_fn(i)))
            fh.write(
                f"{int(i)},{max(float(stats.excess_risk[row]), 0.0)!r},"
                f"{max(float(stats.smoothed_excess_risk[row]), 0.0)!r},"
                f"{float(stats.msd[row])!r},{bound}\n"
            )

    lines = [f"config = {ns.config}"]
    lines += bundle.summary_lines(run_cfg.mu)
    lines += [
        f"run: mu={run_cfg.mu!r} kappa={run_cfg.kappa!r} iterations={run_cfg.iterations} "
        f"record_stride={run_cfg.record_stride} seed={run_cfg.seed} "
        f"replications={run_cfg.replications} workers={workers}",
        f"msd0 = ||w_0 - w_star||^2 = {msd0!r}",
    ]
    if stats.iterations.size:
        lines += [
            f"final raw excess risk (mean of {stats.replications}) = "
            f"{float(stats.excess_risk[-1])!r}",
            f"final smoothed excess risk = {float(stats.smoothed_excess_risk[-1])!r} "
            f"+- {stats.smoothed_excess_risk_stderr[-1]:.3g}",
            f"final raw msd = {float(stats.msd[-1])!r}",
            f"final smoothed msd = {float(stats.smoothed_msd[-1])!r}",
        ]
        if bound_fn is not None:
            lines.append(
                f"finite-horizon bound at final record = "
                f"{float(bound_fn(stats.iterations[-1]))!r}"
            )
        try:
            floor = theory.steady_state_bounds(run_cfg.mu, bundle.constants).excess_risk
            fitted = theory.fit_rate(stats, floor)
            lines.append(f"fitted per-iteration rate = {fitted!r} (floor {floor!r})")
        except (InsufficientData, UnsupportedConfiguration) as exc:
            lines.append(f"fitted per-iteration rate = n/a ({exc})")
    lines.append(f"elapsed_seconds = {elapsed:.3f}")

    summary_path = out_dir / "summary.txt"
    summary_path.write_text("\n".join(lines) + "\n", encoding="ascii")
    print(f"wrote {csv_path} and {summary_path}")
    if stats.iterations.size:
        print(lines[-5] if bound_fn is not None else lines[-2])
    return EXIT_OK


# ---------- verify ----------


def _report_check(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


def _noise_probes(w_star, dim, rng, count):
    probes = [np.asarray(w_star, dtype=float)]
    ladder = (0.1, 0.3, 1.0, 3.0, 10.0)
    for k in range(count - 1):
        scale = ladder[k % len(ladder)]
        probes.append(w_star + scale * data.standard_normal(rng, dim))
    return probes


def _check_noise(problem, sampler_factory, w_star, beta2, sigma2, probes, n, rng, seed):
    mean_ok = True
    var_ok = True
    worst_ratio = 0.0
    for idx, w in enumerate(probes):
        report = theory.verify_noise_moments(problem, sampler_factory(seed + idx), w, n)
        bad = np.abs(report.mean) > 3.0 * report.mean_stderr
        mean_ok = mean_ok and not bad.any()
        gap = w - w_star
        limit = beta2 * float(gap @ gap) + sigma2
        var_ok = var_ok and (
            report.second_moment <= limit + 3.0 * report.second_moment_stderr
        )
        if limit > 0:
            worst_ratio = max(worst_ratio, report.second_moment / limit)
    return mean_ok, var_ok, worst_ratio


def cmd_verify(ns):
    cfg = _load_config(ns.config)
    run_cfg = _run_config(cfg, ns.seed)
    seed = run_cfg.seed
    bundle = _build_bundle(cfg, seed)

    pairs = _positive(cfg, "verify", "pairs", int, default=10_000)
    n_noise = _positive(cfg, "verify", "noise_samples", int, default=20_000)
    probes = _positive(cfg, "verify", "probes", int, default=5)
    scale = _positive(cfg, "verify", "scale", float, default=3.0)
    # the statistical checks are sharp (3 stderr, componentwise, zero violations
    # allowed), so their sampler seed is its own knob; rerun with another seed
    # if a borderline z-score trips on an otherwise sound problem
    seed = _get(cfg, "verify", "seed", int, default=seed)

    p = bundle.problem
    dim = p.dim
    all_ok = True

    rng = np.random.default_rng(seed + 1)
    viol = theory.verify_subgradient_inequality(
        p.risk, p.true_subgradient, dim, pairs, rng, scale=scale
    )
    all_ok &= _report_check(
        "subgradient-inequality",
        viol == 0,
        f"{viol}/{pairs} violations beyond 1e-9 relative slack",
    )

    k = bundle.constants if bundle.kind == "svm" else bundle.constants_mc
    rng = np.random.default_rng(seed + 2)
    viol = theory.verify_affine_lipschitz(
        p.true_subgradient, dim, k.c, k.d, pairs, rng, scale=scale
    )
    all_ok &= _report_check(
        "affine-lipschitz",
        viol == 0,
        f"{viol}/{pairs} violations with c={k.c:.6g}, d={k.d:.6g}",
    )

    rng = np.random.default_rng(seed + 3)
    probe_points = _noise_probes(bundle.w_star, dim, rng, probes)
    if bundle.kind == "lasso":
        sampler_factory = functools.partial(data.make_sampler, bundle.spec)
    else:
        sampler_factory = bundle.stream_factory
    mean_ok, var_ok, worst = _check_noise(
        p, sampler_factory, bundle.w_star, k.beta2, k.sigma2,
        probe_points, n_noise, rng, seed + 4,
    )
    all_ok &= _report_check(
        "noise-zero-mean",
        mean_ok,
        f"componentwise |mean| <= 3 stderr at {probes} probes, n={n_noise}",
    )
    all_ok &= _report_check(
        "noise-variance",
        var_ok,
        f"E||s||^2 <= beta2 ||w*-w||^2 + sigma2 (+3 stderr); worst ratio {worst:.3f}",
    )

    if bundle.kind == "lasso":
        rng = np.random.default_rng(seed + 5)
        viol = theory.verify_strong_monotonicity(
            p.true_subgradient, bundle.w_star, p.min_eigenvalue, dim, pairs, rng,
            scale=scale,
        )
        all_ok &= _report_check(
            "strong-monotonicity",
            viol == 0,
            f"{viol}/{pairs} violations with eta={p.min_eigenvalue:.6g}",
        )

    return EXIT_OK if all_ok else EXIT_PROPERTY


# ---------- denoise ----------


def _tv_alpha(mu):
    # fidelity term has unit curvature: eta = c = 1, so alpha = 1 - mu + 2 mu^2
    return 1.0 - mu + 2.0 * mu * mu


def cmd_denoise(ns):
    if ns.input is None and ns.clean is None:
        raise ConfigError("provide --input NOISY.pgm or --clean CLEAN.pgm --noise-std S")
    clean = None
    if ns.clean is not None:
        clean = data.read_pgm(ns.clean)
    if ns.input is not None:
        noisy = data.read_pgm(ns.input)
    else:
        if ns.noise_std is None:
            raise ConfigError("--noise-std is required when generating noise from --clean")
        noisy = None

    peak = 1.0 if ns.normalize else 255.0
    if ns.normalize:
        if clean is not None:
            clean = problems.GrayImage(clean.pixels / 255.0, peak=1.0)
        if noisy is not None:
            noisy = problems.GrayImage(noisy.pixels / 255.0, peak=1.0)
    if noisy is None:
        noisy = data.add_gaussian_noise(clean, ns.noise_std, ns.seed)

    if ns.kappa == "auto":
        kappa = _tv_alpha(ns.mu)
    else:
        kappa = float(ns.kappa)
        if not 0.0 <= kappa < 1.0:
            raise ConfigError(f"--kappa must lie in [0,1) or be 'auto', got {kappa}")

    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    img = noisy  # denoising starts from the observation
    state = engine.init_smoothing(img.pixels, kappa)
    for _ in range(ns.iterations):
        img = problems.tv_subgradient_step(img, noisy, ns.mu, ns.lam)
        state = engine.smoothing_update(state, img.pixels)
    denoised = problems.GrayImage(state.w_bar, peak=peak)
    elapsed = time.perf_counter() - t0

    out_path = out_dir / "denoised.pgm"
    data.write_pgm(denoised, out_path)
    if ns.input is None:
        data.write_pgm(noisy, out_dir / "noisy.pgm")

    print(f"peak convention: {peak}")
    print(f"iterations={ns.iterations} mu={ns.mu} lam={ns.lam} kappa={kappa!r}")
    print(f"tv: noisy={problems.tv_value(noisy):.6g} "
          f"denoised={problems.tv_value(denoised):.6g}")
    if clean is not None:
        before = data.psnr(noisy, clean)
        after = data.psnr(denoised, clean)
        print(f"psnr vs clean: noisy={before:.2f} dB denoised={after:.2f} dB "
              f"(gain {after - before:+.2f} dB)")
    print(f"wrote {out_path} in {elapsed:.2f} s")
    return EXIT_OK


# ---------- svm-train ----------


def _pad_dataset(ds, dim):
    if ds.dim == dim:
        return ds
    feats = np.zeros((ds.n, dim))
    feats[:, : ds.dim] = ds.features
    return data.DatasetFile(feats, ds.labels)


def cmd_svm_train(ns):
    train = data.load_libsvm(ns.train)
    test = data.load_libsvm(ns.test) if ns.test else None
    dim = max(train.dim, test.dim if test else 0)
    if dim == 0:
        raise ConfigError(f"--train {ns.train}: dataset is empty")
    train = _pad_dataset(train, dim)
    if test is not None:
        test = _pad_dataset(test, dim)

    kappa = 1.0 - 2.0 * ns.mu * ns.rho + 2.0 * (ns.mu * ns.rho) ** 2
    if not 0.0 <= kappa < 1.0:
        raise ConfigError(
            f"mu*rho={ns.mu * ns.rho:.6g} puts the smoothing factor {kappa:.6g} "
            "outside [0,1); reduce mu or rho"
        )
    problem = problems.SvmProblem(rho=ns.rho, dim=dim)
    run_cfg = engine.RunConfig(
        mu=ns.mu,
        kappa=kappa,
        iterations=train.n * ns.epochs,
        record_stride=max(1, train.n // 4),
        seed=ns.seed,
    )
    stream = data.dataset_stream(
        train, epochs=ns.epochs, shuffle_seed=None if ns.no_shuffle else ns.seed
    )
    t0 = time.perf_counter()
    result = engine.run(problem, stream, run_cfg)
    elapsed = time.perf_counter() - t0
    w_bar = result.smoothing.w_bar

    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = out_dir / "model.txt"
    model_path.write_text("".join(f"{float(x)!r}\n" for x in w_bar), encoding="ascii")

    def accuracy(ds):
        pred = np.where(ds.features @ w_bar >= 0.0, 1.0, -1.0)
        return float(np.mean(pred == ds.labels))

    print(f"trained on {train.n} samples x {ns.epochs} epoch(s), dim={dim}, "
          f"rho={ns.rho}, mu={ns.mu}, kappa={kappa!r}")
    print(f"train accuracy = {accuracy(train):.4f}")
    if test is not None:
        print(f"test accuracy = {accuracy(test):.4f} ({test.n} samples)")
    print(f"wrote {model_path} in {elapsed:.2f} s")
    return EXIT_OK


# ---------- entry point ----------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="sgsmooth",
        description="Constant step-size stochastic subgradient learning "
        "with exponential iterate smoothing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured streaming experiment")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None, help="override [run] seed")
    p_run.add_argument("--workers", type=int, default=None,
                       help="parallel replication processes (default: cpu count)")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_ver = sub.add_parser("verify", help="verify model assumptions on live samplers")
    p_ver.add_argument("--config", required=True)
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.set_defaults(func=cmd_verify)

    p_den = sub.add_parser("denoise", help="total-variation denoise a PGM image")
    p_den.add_argument("--input", default=None, help="noisy PGM to denoise")
    p_den.add_argument("--clean", default=None, help="clean PGM reference")
    p_den.add_argument("--noise-std", type=float, default=None,
                       help="noise std to add to --clean (in the working range)")
    p_den.add_argument("--lam", type=float, default=0.08)
    p_den.add_argument("--mu", type=float, default=0.002)
    p_den.add_argument("--iterations", type=int, default=300)
    p_den.add_argument("--kappa", default="auto")
    p_den.add_argument("--seed", type=int, default=0)
    p_den.add_argument("--out", default="out")
    p_den.add_argument("--no-normalize", dest="normalize", action="store_false",
                       help="work in 8-bit units (peak 255) instead of [0,1]")
    p_den.set_defaults(func=cmd_denoise)

    p_svm = sub.add_parser("svm-train", help="train a linear SVM on a LIBSVM file")
    p_svm.add_argument("--train", required=True)
    p_svm.add_argument("--test", default=None)
    p_svm.add_argument("--rho", type=float, default=2e-3)
    p_svm.add_argument("--mu", type=float, default=0.05)
    p_svm.add_argument("--epochs", type=int, default=1)
    p_svm.add_argument("--seed", type=int, default=0)
    p_svm.add_argument("--no-shuffle", action="store_true",
                       help="stream samples in file order")
    p_svm.add_argument("--out", default="out")
    p_svm.set_defaults(func=cmd_svm_train)
    return parser


def main(argv=None):
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except (ConfigError, UnsupportedConfiguration, StreamExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROPERTY


if __name__ == "__main__":
    sys.exit(main())
