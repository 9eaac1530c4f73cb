"""Certainty-equivalent adaptive LQR with doubling epochs.

The loop: during epoch k play u_t = K_hat_k x_t + sigma_k g_t; at the epoch's
end, fit theta on that epoch's transitions through the basis representation,
realize [A_hat B_hat], and synthesize the next gain from the Riccati solution.
Epoch lengths double (tau_{k+1} = 2 tau_k), so epoch k covers
t = tau_{k-1}+1 .. tau_k with tau_k = tau1 * 2^{k-1} and the run ends at
T = tau1 * 2^{k_fin - 1}.

A safeguard aborts to the initial controller forever when the state or the
synthesized gain exceeds its bound. Regret is accounted against the true
system's optimal steady-state cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matkit
from .estimator import Trajectory, least_squares, affine_least_squares
from .riccati import LinearSystem, LQRWeights, StabilizabilityError, dare, lqr_gain
from .sysrep import AffineBase, Representation, realize

__all__ = [
    "ExplorationSpec",
    "AdaptiveRunConfig",
    "EpochRecord",
    "RegretTrace",
    "exploration_schedule",
    "run_adaptive",
    "optimal_baseline",
]

ABORT_RULES = ("theory", "fixed")
EXPLORATION_KINDS = ("continual", "none", "custom")


def exploration_schedule(kind: str, k: int, tau1: int, du: int, dtheta: int,
                         gamma: float = 1.0, misspec_bound: float = 0.0,
                         custom=None, scale: float = 1.0) -> float:
    """Per-epoch exploration variance sigma_k^2.

    continual: max{ scale * sqrt(du/dtheta)/sqrt(tau1 * 2^{k-1}), gamma * sqrt(d) }
    where d is the caller's bound on the representation misspecification;
    none: 0; custom: looked up from the user-provided list.

    The analysis pins only the decay rate 1/sqrt(tau1 * 2^{k-1}) of the
    exploration term; ``scale`` is the free proportionality constant in front
    of it (it does not touch the misspecification floor).
    """
    if kind not in EXPLORATION_KINDS:
        raise ValueError(f"unknown exploration kind {kind!r}")
    if k < 1:
        raise ValueError("epoch index starts at 1")
    if kind == "none":
        return 0.0
    if kind == "custom":
        if custom is None or len(custom) < k:
            raise ValueError(f"custom schedule has no entry for epoch {k}")
        val = float(custom[k - 1])
        if val < 0.0:
            raise ValueError("custom sigma_k^2 must be nonnegative")
        return val
    if gamma < 1.0:
        raise ValueError("gamma must be >= 1")
    if misspec_bound < 0.0:
        raise ValueError("misspec_bound must be nonnegative")
    if scale < 0.0:
        raise ValueError("scale must be nonnegative")
    decaying = scale * math.sqrt(du / dtheta) / math.sqrt(tau1 * 2 ** (k - 1))
    return max(decaying, gamma * math.sqrt(misspec_bound))


@dataclass(frozen=True)
class ExplorationSpec:
    """Which sigma_k^2 schedule an adaptive run uses."""

    kind: str = "continual"
    gamma: float = 1.0
    misspec_bound: float = 0.0
    custom: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in EXPLORATION_KINDS:
            raise ValueError(f"unknown exploration kind {self.kind!r}")
        if self.gamma < 1.0:
            raise ValueError("gamma must be >= 1")
        if self.misspec_bound < 0.0:
            raise ValueError("misspec_bound must be nonnegative")
        if self.scale < 0.0:
            raise ValueError("scale must be nonnegative")
        object.__setattr__(self, "custom", tuple(float(v) for v in self.custom))

    def sigma_sq(self, k: int, tau1: int, du: int, dtheta: int) -> float:
        return exploration_schedule(
            self.kind, k, tau1, du, dtheta, self.gamma, self.misspec_bound,
            self.custom, self.scale,
        )


@dataclass(frozen=True)
class AdaptiveRunConfig:
    """Everything one adaptive run needs besides the true system."""

    rep: Representation
    k0: np.ndarray
    tau1: int = 1024
    k_fin: int = 7
    exploration: ExplorationSpec = field(default_factory=ExplorationSpec)
    x_b: float = 50.0
    k_b: float = 15.0
    abort_rule: str = "fixed"
    base: AffineBase | None = None
    weights: LQRWeights | None = None
    noise_std: float = 0.1
    seed: int = 0
    cumulative_data: bool = False  # estimate from all data so far instead of the epoch's

    def __post_init__(self):
        if self.tau1 < 1 or self.k_fin < 1:
            raise ValueError("need tau1 >= 1 and k_fin >= 1")
        if self.x_b <= 0.0 or self.k_b <= 0.0:
            raise ValueError("abort bounds must be positive")
        if self.abort_rule not in ABORT_RULES:
            raise ValueError(f"unknown abort rule {self.abort_rule!r}")
        if self.noise_std < 0.0:
            raise ValueError("noise_std must be nonnegative")
        k0 = matkit.as_matrix(self.k0, rows=self.rep.du, cols=self.rep.dx, name="k0")
        object.__setattr__(self, "k0", k0)
        w = self.weights or LQRWeights.identity(self.rep.dx, self.rep.du)
        object.__setattr__(self, "weights", w)
        if self.exploration.kind == "custom" and len(self.exploration.custom) < self.k_fin:
            raise ValueError(
                f"custom exploration schedule has {len(self.exploration.custom)} entries "
                f"but the run has {self.k_fin} epochs"
            )

    @property
    def horizon(self) -> int:
        return self.tau1 * 2 ** (self.k_fin - 1)

    def epoch_end(self, k: int) -> int:
        """tau_k = tau1 * 2^{k-1}."""
        return self.tau1 * 2 ** (k - 1)


@dataclass(frozen=True)
class EpochRecord:
    """Bookkeeping for one epoch: the gain and exploration level in force, and
    the estimate formed from the epoch's data (nan fields when skipped)."""

    k: int
    tau_k: int
    gain: np.ndarray
    sigma_sq: float
    est_error_sq: float
    lambda_min: float
    dare_failed: bool
    estimated: bool


@dataclass(frozen=True)
class RegretTrace:
    """Full per-step and per-epoch record of one adaptive run."""

    t: np.ndarray  # 1..T
    inst_cost: np.ndarray
    cum_cost: np.ndarray
    regret: np.ndarray
    epoch_index: np.ndarray  # epoch k active at each step
    epochs: tuple[EpochRecord, ...]
    aborted: bool
    abort_t: int | None
    dare_failures: int
    baseline: float  # per-step optimal cost J(K*) used for the regret line

    @property
    def horizon(self) -> int:
        return int(self.t[-1])


def optimal_baseline(sys_true: LinearSystem, w: LQRWeights, noise_std: float) -> float:
    """Per-step optimal steady-state cost noise_std^2 * trace(P*).

    The identity-covariance optimal cost is trace(P*); isotropic noise of
    standard deviation noise_std scales it by the variance.
    """
    p_star = dare(sys_true, w)
    return noise_std**2 * float(np.trace(p_star))


def _state_bound_violated(x: np.ndarray, cfg: AdaptiveRunConfig, log_t: float) -> bool:
    # theory keeps the horizon-dependent slack log(T); fixed drops
    # only that factor so the rule no longer depends on T.  Both compare the
    # squared norm against x_b^2: with the benchmark x_b = 50 the plain-x_b
    # reading (||x||^2 >= 50, i.e. ||x|| >= 7.07) trips on ordinary noise
    # excursions of the stabilized fixture (E||x||^2 is ~6 under the initial
    # gain) and falsely aborts a sizable share of healthy runs.
    sq = float(x @ x)
    if cfg.abort_rule == "fixed":
        return sq >= cfg.x_b**2
    return sq >= cfg.x_b**2 * log_t


def run_adaptive(sys_true: LinearSystem, cfg: AdaptiveRunConfig) -> RegretTrace:
    """Run the adaptive loop for T = tau1 * 2^{k_fin - 1} steps.

    Before every step the abort safeguard is checked (state bound per step;
    gain bound once per epoch since the gain is constant within an epoch).
    After an abort the initial controller runs unexplored for the rest of the
    horizon and no further estimation happens. A synthesis failure on a bad
    estimate keeps the previous epoch's gain and is counted, not raised.
    """
    if (sys_true.dx, sys_true.du) != (cfg.rep.dx, cfg.rep.du):
        raise ValueError("system dimensions do not match the representation")
    if matkit.spectral_radius(sys_true.a + sys_true.b @ cfg.k0) >= 1.0:
        raise ValueError("k0 does not stabilize the true system")

    dx, du = sys_true.dx, sys_true.du
    horizon = cfg.horizon
    log_t = math.log(horizon) if horizon > 1 else 1.0
    q, r = cfg.weights.q, cfg.weights.r
    ab_true = np.hstack([sys_true.a, sys_true.b])
    baseline = optimal_baseline(sys_true, cfg.weights, cfg.noise_std)

    # Independent noise sub-streams: enabling/disabling exploration must not
    # perturb the process-noise sample path.
    w_seq, g_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    w_noise = cfg.noise_std * np.random.default_rng(w_seq).standard_normal((horizon, dx))
    g_noise = np.random.default_rng(g_seq).standard_normal((horizon, du))

    states = np.zeros((horizon + 1, dx))
    inputs = np.zeros((horizon, du))
    inst_cost = np.zeros(horizon)
    epoch_index = np.zeros(horizon, dtype=np.int64)

    gain = cfg.k0.copy()
    aborted = False
    abort_t: int | None = None
    dare_failures = 0
    epochs: list[EpochRecord] = []

    tau_prev = 0
    for k in range(1, cfg.k_fin + 1):
        tau_k = cfg.epoch_end(k)
        sigma_sq = 0.0 if aborted else cfg.exploration.sigma_sq(k, cfg.tau1, du, cfg.rep.dtheta)
        if not aborted and float(np.linalg.norm(gain, 2)) >= cfg.k_b:
            aborted = True
            abort_t = tau_prev + 1
            gain = cfg.k0.copy()
            sigma_sq = 0.0
        sigma = math.sqrt(sigma_sq)
        epoch_gain = gain.copy()

        for i in range(tau_prev, tau_k):  # i is 0-based; step t = i + 1
            x = states[i]
            if not aborted and _state_bound_violated(x, cfg, log_t):
                aborted = True
                abort_t = i + 1
                gain = cfg.k0.copy()
                sigma = 0.0
            u = gain @ x
            if sigma > 0.0:
                u = u + sigma * g_noise[i]
            inputs[i] = u
            inst_cost[i] = float(x @ (q @ x) + u @ (r @ u))
            states[i + 1] = sys_true.a @ x + sys_true.b @ u + w_noise[i]
            epoch_index[i] = k

        if aborted:
            epochs.append(EpochRecord(
                k=k, tau_k=tau_k, gain=epoch_gain, sigma_sq=sigma_sq,
                est_error_sq=math.nan, lambda_min=math.nan,
                dare_failed=False, estimated=False,
            ))
            tau_prev = tau_k
            continue

        lo = 0 if cfg.cumulative_data else tau_prev
        traj = Trajectory(states=states[lo : tau_k + 1], inputs=inputs[lo:tau_k])
        if cfg.base is None:
            fit = least_squares(cfg.rep, traj)
        else:
            fit = affine_least_squares(cfg.rep, cfg.base, traj)
        sys_hat = realize(cfg.rep, fit.theta_hat, cfg.base)
        est_error_sq = float(
            np.linalg.norm(np.hstack([sys_hat.a, sys_hat.b]) - ab_true, "fro") ** 2
        )
        dare_failed = False
        try:
            gain = lqr_gain(sys_hat, cfg.weights).k
        except StabilizabilityError:
            dare_failed = True
            dare_failures += 1  # keep the previous gain
        epochs.append(EpochRecord(
            k=k, tau_k=tau_k, gain=epoch_gain, sigma_sq=sigma_sq,
            est_error_sq=est_error_sq, lambda_min=fit.lambda_min,
            dare_failed=dare_failed, estimated=True,
        ))
        tau_prev = tau_k

    cum_cost = np.cumsum(inst_cost)
    t_axis = np.arange(1, horizon + 1, dtype=np.int64)
    regret = cum_cost - baseline * t_axis
    return RegretTrace(
        t=t_axis,
        inst_cost=inst_cost,
        cum_cost=cum_cost,
        regret=regret,
        epoch_index=epoch_index,
        epochs=tuple(epochs),
        aborted=aborted,
        abort_t=abort_t,
        dare_failures=dare_failures,
        baseline=baseline,
    )
