"""Generic constant step-size stochastic subgradient loop with smoothing.

The loop is problem-agnostic: anything exposing ``dim`` and
``instantaneous_subgradient(w, sample)`` can be run against any iterable of
samples.  Alongside the raw iterate it maintains the exponentially smoothed
iterate

    S_i = kappa * S_{i-1} + 1
    w_bar_i = (1 - 1/S_i) * w_bar_{i-1} + (1/S_i) * w_i

which is the realizable substitute for best-iterate tracking when the risk
cannot be evaluated online.  A single run is strictly sequential;
replications are independent and may execute in parallel processes.
"""

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional
import concurrent.futures
import math

import numpy as np

from .errors import NumericError, StreamExhausted, UnsupportedConfiguration


class SmoothingState(NamedTuple):
    """Running geometric weight sum S, smoothed iterate, and the factor kappa."""

    s: float
    w_bar: np.ndarray
    kappa: float


def init_smoothing(w0, kappa):
    """Initial smoothing state: S = 1 and w_bar = w_0."""
    if not 0.0 <= kappa < 1.0:
        raise ValueError("kappa must lie in [0, 1)")
    return SmoothingState(1.0, np.array(w0, dtype=float), kappa)


def smoothing_update(state, w):
    """Advance the smoothing recursion by one iterate; returns a new state."""
    s = state.kappa * state.s + 1.0
    # the (1 - 1/S) form makes kappa = 0 reduce to the last iterate exactly
    w_bar = (1.0 - 1.0 / s) * state.w_bar + np.asarray(w, dtype=float) / s
    return SmoothingState(s, w_bar, state.kappa)


def weighted_average_direct(iterates, kappa):
    """Direct kappa-geometric weighted average of an iterate sequence.

    Computes sum_j kappa^(L-j) w_j / sum_j kappa^(L-j); the most recent
    iterate carries the largest weight.  This is the reference form the
    smoothing recursion must reproduce.
    """
    if len(iterates) == 0:
        raise ValueError("need at least one iterate")
    if not 0.0 <= kappa < 1.0:
        raise ValueError("kappa must lie in [0, 1)")
    stack = np.asarray(iterates, dtype=float)
    last = stack.shape[0] - 1
    weights = kappa ** np.arange(last, -1, -1, dtype=float)
    return weights @ stack / weights.sum()


def sgd_step(w, g_hat, mu):
    """One subgradient step w - mu * g_hat."""
    w = np.asarray(w, dtype=float)
    g_hat = np.asarray(g_hat, dtype=float)
    if g_hat.shape != w.shape:
        raise ValueError(f"dimension mismatch: w {w.shape}, g_hat {g_hat.shape}")
    if mu <= 0:
        raise ValueError("mu must be positive")
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(g_hat))):
        raise NumericError("non-finite entry in iterate or subgradient")
    return w - mu * g_hat


def pocket_update(current_best, candidate, risk_estimate):
    """Keep whichever of incumbent/candidate has the lower (estimated) risk.

    Ties keep the incumbent.  The pocket is only as exact as the risk
    estimates fed to it; with Monte-Carlo risks it is an estimator of the
    best iterate, not the exact object.
    """
    if math.isnan(risk_estimate):
        raise NumericError("pocket risk estimate is NaN")
    best_w, best_risk = current_best
    if risk_estimate < best_risk:
        return (np.array(candidate, dtype=float), float(risk_estimate))
    return (best_w, best_risk)


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one streaming run.

    ``kappa`` may be a float in [0, 1) or the string "auto", in which case it
    must be resolved to the problem's theoretical rate before running (see
    :func:`resolve_kappa`).  Replication r uses seed ``seed + r``.
    """

    mu: float
    kappa: object = "auto"
    iterations: int = 10_000
    record_stride: int = 100
    seed: int = 0
    replications: int = 1

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")
        if self.record_stride < 1:
            raise ValueError("record_stride must be positive")
        if self.replications < 1:
            raise ValueError("replications must be positive")
        if self.kappa != "auto":
            k = float(self.kappa)
            if not 0.0 <= k < 1.0:
                raise ValueError("kappa must lie in [0, 1) or be 'auto'")


def resolve_kappa(config, theoretical_alpha=None):
    """Replace kappa='auto' with the problem's theoretical rate alpha.

    The smoothing guarantee needs alpha <= kappa < 1, so 'auto' uses alpha
    itself.  If alpha >= 1 the step size is too large for the rate theory
    (it exceeds the ceiling eta / (e^2 + beta^2)) and the run is rejected.
    """
    if config.kappa != "auto":
        return config
    if theoretical_alpha is None:
        raise ValueError("kappa='auto' needs the problem's theoretical alpha")
    if not 0.0 <= theoretical_alpha < 1.0:
        raise UnsupportedConfiguration(
            f"theoretical rate alpha={theoretical_alpha:.6g} is outside [0, 1); "
            "the step size exceeds the ceiling eta/(e^2 + beta^2) -- reduce mu "
            "or set kappa explicitly"
        )
    return replace(config, kappa=float(theoretical_alpha))


@dataclass(frozen=True)
class RiskOracle:
    """Exact (or high-quality estimated) risk information for diagnostics.

    ``risk`` maps an iterate to its mean risk, ``w_star`` is the minimizer
    and ``risk_star`` its risk value.  Excess risk and mean-square deviation
    can only be recorded when an oracle is available.
    """

    risk: Callable[[np.ndarray], float]
    w_star: np.ndarray
    risk_star: float


@dataclass(eq=False)
class Trajectory:
    """Per-run diagnostics recorded every ``iteration_stride`` updates.

    Excess risks and deviations are recorded for both the raw and the
    smoothed iterate.  Values are stored exactly as computed; tiny negative
    excess-risk values from oracle noise are clamped only when reports are
    emitted, never here.
    """

    iterations: np.ndarray
    excess_risk: np.ndarray
    smoothed_excess_risk: np.ndarray
    msd: np.ndarray
    smoothed_msd: np.ndarray
    iteration_stride: int
    iterates: Optional[list] = None


class RunResult(NamedTuple):
    w: np.ndarray
    smoothing: SmoothingState
    trajectory: Trajectory
    pocket: Optional[tuple]


def run(problem, stream, config, *, oracle=None, w0=None, track_pocket=False):
    """Run the subgradient + smoothing loop for ``config.iterations`` steps.

    Parameters
    ----------
    problem : object
        Must expose ``dim`` and ``instantaneous_subgradient(w, sample)``.
    stream : iterable
        Yields one sample per iteration; exhausting it early raises
        :class:`StreamExhausted` rather than truncating silently.
    config : RunConfig
        ``config.kappa`` must already be numeric (see :func:`resolve_kappa`).
    oracle : RiskOracle, optional
        Enables excess-risk / MSD recording and pocket tracking.  Without it
        only iterate snapshots are recorded.
    w0 : array, optional
        Start point; defaults to the zero vector.
    """
    if config.kappa == "auto":
        raise ValueError("kappa is unresolved; call resolve_kappa first")
    kappa = float(config.kappa)
    if w0 is None:
        w = np.zeros(problem.dim)
    else:
        w = np.array(w0, dtype=float)
    if track_pocket and oracle is None:
        raise ValueError("pocket tracking requires a risk oracle")

    mu = config.mu
    stride = config.record_stride
    n_iters = config.iterations
    subgrad = problem.instantaneous_subgradient

    w_bar = w.copy()
    s_sum = 1.0
    it = iter(stream)

    rec_i, rec_a, rec_a_sm, rec_b, rec_b_sm = [], [], [], [], []
    snapshots = [] if oracle is None else None
    pocket = (w.copy(), float(oracle.risk(w))) if track_pocket else None

    for i in range(1, n_iters + 1):
        try:
            sample = next(it)
        except StopIteration:
            raise StreamExhausted(
                f"stream exhausted at iteration {i} of {n_iters}"
            ) from None
        g = subgrad(w, sample)
        w -= mu * g
        s_sum = kappa * s_sum + 1.0
        w_bar *= 1.0 - 1.0 / s_sum
        w_bar += w / s_sum

        if i % stride == 0:
            if oracle is None:
                snapshots.append(w.copy())
            else:
                risk_raw = float(oracle.risk(w))
                if not math.isfinite(risk_raw):
                    raise NumericError(f"risk diverged at iteration {i}")
                d = w - oracle.w_star
                d_bar = w_bar - oracle.w_star
                rec_i.append(i)
                rec_a.append(risk_raw - oracle.risk_star)
                rec_a_sm.append(float(oracle.risk(w_bar)) - oracle.risk_star)
                rec_b.append(float(d @ d))
                rec_b_sm.append(float(d_bar @ d_bar))
                if track_pocket:
                    pocket = pocket_update(pocket, w, risk_raw)

    trajectory = Trajectory(
        iterations=np.asarray(rec_i, dtype=np.int64),
        excess_risk=np.asarray(rec_a, dtype=float),
        smoothed_excess_risk=np.asarray(rec_a_sm, dtype=float),
        msd=np.asarray(rec_b, dtype=float),
        smoothed_msd=np.asarray(rec_b_sm, dtype=float),
        iteration_stride=stride,
        iterates=snapshots,
    )
    return RunResult(w, SmoothingState(s_sum, w_bar, kappa), trajectory, pocket)


def _run_one(args):
    problem, stream_factory, config, oracle, w0, track_pocket = args
    stream = stream_factory(config.seed)
    return run(
        problem, stream, config, oracle=oracle, w0=w0, track_pocket=track_pocket
    )


def run_replications(
    problem,
    stream_factory,
    config,
    *,
    oracle=None,
    w0=None,
    track_pocket=False,
    workers=1,
):
    """Run ``config.replications`` independent replications.

    ``stream_factory(seed)`` must build a fresh stream; replication r gets
    seed ``config.seed + r``.  With ``workers > 1`` replications execute in
    separate processes (everything passed in must be picklable).  Results are
    returned in replication order either way.
    """
    tasks = [
        (
            problem,
            stream_factory,
            replace(config, seed=config.seed + r, replications=1),
            oracle,
            w0,
            track_pocket,
        )
        for r in range(config.replications)
    ]
    if workers <= 1 or len(tasks) == 1:
        return [_run_one(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, tasks))


@dataclass(eq=False)
class TrajectoryStats:
    """Across-replication mean and standard error of each recorded curve."""

    iterations: np.ndarray
    excess_risk: np.ndarray
    excess_risk_stderr: np.ndarray
    smoothed_excess_risk: np.ndarray
    smoothed_excess_risk_stderr: np.ndarray
    msd: np.ndarray
    msd_stderr: np.ndarray
    smoothed_msd: np.ndarray
    smoothed_msd_stderr: np.ndarray
    replications: int
    iteration_stride: int


def average_trajectories(trajectories):
    """Arithmetic mean (and stderr) of trajectories at matched iterations."""
    if not trajectories:
        raise ValueError("need at least one trajectory")
    base = trajectories[0].iterations
    for t in trajectories[1:]:
        if not np.array_equal(t.iterations, base):
            raise ValueError("trajectories were recorded at different iterations")
    n_rep = len(trajectories)

    def mean_stderr(name):
        stack = np.asarray([getattr(t, name) for t in trajectories], dtype=float)
        mean = stack.mean(axis=0)
        if n_rep > 1:
            stderr = stack.std(axis=0, ddof=1) / math.sqrt(n_rep)
        else:
            stderr = np.zeros_like(mean)
        return mean, stderr

    a, a_se = mean_stderr("excess_risk")
    asm, asm_se = mean_stderr("smoothed_excess_risk")
    b, b_se = mean_stderr("msd")
    bsm, bsm_se = mean_stderr("smoothed_msd")
    return TrajectoryStats(
        iterations=base.copy(),
        excess_risk=a,
        excess_risk_stderr=a_se,
        smoothed_excess_risk=asm,
        smoothed_excess_risk_stderr=asm_se,
        msd=b,
        msd_stderr=b_se,
        smoothed_msd=bsm,
        smoothed_msd_stderr=bsm_se,
        replications=n_rep,
        iteration_stride=trajectories[0].iteration_stride,
    )
