"""Multi-task representation learning from offline trajectories.

Jointly fits an orthonormal basis Phi and per-task coefficients theta^(i) by
alternating exact least squares on

    sum_i sum_s || x_{s+1}^(i) - vec_inv(Phi theta^(i)) [x_s; u_s]^(i) ||^2.

The theta-step reuses the structured estimator; the Phi-step solves the
unconstrained linear problem in the basis entries, then orthonormalizes and
absorbs the mixing into the thetas (the objective is invariant under that
reparametrization). Initialization stacks per-task full least-squares
estimates and takes their top left singular vectors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import matkit
from .estimator import Trajectory, least_squares
from .riccati import LinearSystem
from .sysrep import Representation, cartpole_system, realize, vec

__all__ = [
    "MultiTaskDataset",
    "PretrainResult",
    "pretrain",
    "generate_offline_data",
]

_MARGINAL_RADIUS = 0.999


@dataclass(frozen=True)
class MultiTaskDataset:
    """Trajectories collected from several systems sharing one basis."""

    tasks: tuple[Trajectory, ...]
    dx: int
    du: int

    def __post_init__(self):
        tasks = tuple(self.tasks)
        if not tasks:
            raise ValueError("dataset needs at least one task")
        for i, traj in enumerate(tasks):
            if (traj.dx, traj.du) != (self.dx, self.du):
                raise ValueError(
                    f"task {i} has dims ({traj.dx}, {traj.du}), expected ({self.dx}, {self.du})"
                )
        object.__setattr__(self, "tasks", tasks)


@dataclass(frozen=True)
class PretrainResult:
    """Learned basis with per-task coefficients and the fit diagnostics."""

    phi_hat: Representation
    thetas: tuple[np.ndarray, ...]
    objective: float
    iterations: int
    converged: bool
    objective_history: tuple[float, ...]
    excluded_tasks: tuple[int, ...]


def _objective(rep: Representation, thetas, tasks) -> float:
    total = 0.0
    for theta, traj in zip(thetas, tasks):
        sys_i = realize(rep, theta)
        pred = traj.z @ np.hstack([sys_i.a, sys_i.b]).T
        total += float(np.sum((traj.states[1:] - pred) ** 2))
    return total


def _full_ls_vec(traj: Trajectory) -> tuple[np.ndarray, int]:
    """Unstructured least-squares estimate of [A B], vectorized, plus rank."""
    sol, _, rank, _ = np.linalg.lstsq(traj.z, traj.states[1:], rcond=None)
    return vec(sol.T), rank


def _initial_basis(dataset: MultiTaskDataset, task_idx, dtheta: int, seed) -> Representation:
    n = dataset.dx * (dataset.dx + dataset.du)
    cols = np.stack([_full_ls_vec(dataset.tasks[i])[0] for i in task_idx], axis=1)
    u, s, _ = matkit.svd(cols)
    keep = min(dtheta, int(np.sum(s > 1e-12 * max(s[0], 1.0))))
    basis = u[:, :keep]
    if keep < dtheta:
        # not enough informative directions: complete with a random
        # orthonormal extension so the alternation can still reshape the span
        rng = np.random.default_rng(seed)
        extra = rng.standard_normal((n, dtheta - keep))
        extra -= basis @ (basis.T @ extra)
        basis = np.hstack([basis, matkit.qr_orthonormalize(extra)])
    return Representation(phi=basis, dx=dataset.dx, du=dataset.du)


def _completed_basis(raw: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal basis containing span(raw), padded to full column count.

    The unconstrained Phi-step is under-determined when the informative tasks
    span fewer than dtheta directions (the minimum-norm solution zeroes the
    unconstrained part), so the columns of `raw` can collapse; the random
    padding keeps the alternation running and cannot increase the objective
    because the padded span contains the raw span.
    """
    n, dtheta = raw.shape
    u, s, _ = matkit.svd(raw)
    keep = int(np.sum(s > 1e-12 * max(float(s[0]), 1.0))) if s.size else 0
    basis = u[:, :keep]
    extra = rng.standard_normal((n, dtheta - keep))
    extra -= basis @ (basis.T @ extra)
    return np.hstack([basis, matkit.qr_orthonormalize(extra)])


def _phi_step(dataset: MultiTaskDataset, task_idx, thetas, dtheta: int) -> np.ndarray:
    """Solve the unconstrained Phi least squares with all thetas fixed.

    Equation (task i, sample s, output a) constrains the unknowns
    Phi[a + dx*j, m] with coefficient z_{s,j}^(i) * theta_m^(i).
    """
    dx, du = dataset.dx, dataset.du
    n = dx * (dx + du)
    blocks, targets = [], []
    for theta, i in zip(thetas, task_idx):
        traj = dataset.tasks[i]
        z = traj.z
        t = z.shape[0]
        design = np.zeros((t, dx, n, dtheta))
        rows = np.arange(dx)
        for j in range(dx + du):
            design[:, rows, rows + dx * j, :] = z[:, j, None, None] * theta[None, None, :]
        blocks.append(design.reshape(t * dx, n * dtheta))
        targets.append(traj.states[1:].reshape(-1))
    sol, _, _, _ = np.linalg.lstsq(np.vstack(blocks), np.concatenate(targets), rcond=None)
    return sol.reshape(n, dtheta)


def pretrain(data: MultiTaskDataset, dtheta: int, tol: float = 1e-9,
             max_iter: int = 500, seed: int = 0) -> PretrainResult:
    """Alternating minimization for the shared basis.

    Stops when the relative objective decrease falls below `tol` or after
    `max_iter` alternations. Tasks whose regressors are rank-deficient
    (singular per-task Gram) are excluded with a warning.
    """
    n = data.dx * (data.dx + data.du)
    if not 1 <= dtheta <= n:
        raise ValueError(f"need 1 <= dtheta <= {n}")
    nz = data.dx + data.du
    task_idx, excluded = [], []
    for i, traj in enumerate(data.tasks):
        rank = _full_ls_vec(traj)[1] if traj.t >= dtheta + 1 else 0
        if rank < nz:
            excluded.append(i)
            warnings.warn(f"task {i} has degenerate data (rank {rank} < {nz}); excluded")
        else:
            task_idx.append(i)
    if not task_idx:
        raise ValueError("all tasks are degenerate")

    rep = _initial_basis(data, task_idx, dtheta, seed)
    tasks = [data.tasks[i] for i in task_idx]
    thetas = [least_squares(rep, traj).theta_hat for traj in tasks]
    history = [_objective(rep, thetas, tasks)]
    converged = False
    iterations = 0
    rescue_rng = np.random.default_rng(seed)
    for _ in range(max_iter):
        iterations += 1
        raw = _phi_step(data, task_idx, thetas, dtheta)
        try:
            phi = matkit.qr_orthonormalize(raw)
        except matkit.RankDeficientError:
            phi = _completed_basis(raw, rescue_rng)
        rep = Representation(phi=phi, dx=data.dx, du=data.du)
        thetas = [least_squares(rep, traj).theta_hat for traj in tasks]
        obj = _objective(rep, thetas, tasks)
        history.append(obj)
        prev = history[-2]
        if prev - obj < tol * max(prev, 1e-300):
            converged = True
            break

    return PretrainResult(
        phi_hat=rep,
        thetas=tuple(thetas),
        objective=history[-1],
        iterations=iterations,
        converged=converged,
        objective_history=tuple(history),
        excluded_tasks=tuple(excluded),
    )


def generate_offline_data(param_list, gravity: float, dt: float, horizon: int,
                          k0, noise_std: float, input_noise_std: float,
                          seed: int) -> MultiTaskDataset:
    """Simulate one trajectory per (m_cart, m_pole, length) tuple.

    Each system runs from x_1 = 0 under u_t = K0 x_t + eta_t with
    eta ~ N(0, input_noise_std^2 I) and process noise N(0, noise_std^2 I).
    A closed loop that is marginally stable (or worse) under K0 is only
    warned about — the horizon is finite, so collection still proceeds.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    params = [tuple(float(v) for v in p) for p in param_list]
    if not params:
        raise ValueError("param_list is empty")
    systems: list[LinearSystem] = []
    for p in params:
        if len(p) != 3:
            raise ValueError("each parameter tuple must be (m_cart, m_pole, length)")
        systems.append(cartpole_system(p[0], p[1], p[2], gravity, dt))
    dx, du = systems[0].dx, systems[0].du
    k0m = matkit.as_matrix(k0, rows=du, cols=dx, name="k0")

    tasks = []
    seqs = np.random.SeedSequence(seed).spawn(len(systems))
    for i, (sys_i, seq) in enumerate(zip(systems, seqs)):
        rho = matkit.spectral_radius(sys_i.a + sys_i.b @ k0m)
        if rho >= _MARGINAL_RADIUS:
            warnings.warn(
                f"task {i} closed loop is marginally stable or worse under k0 "
                f"(spectral radius {rho:.4f}); collecting anyway"
            )
        rng = np.random.default_rng(seq)
        w = noise_std * rng.standard_normal((horizon, dx))
        eta = input_noise_std * rng.standard_normal((horizon, du))
        xs = np.zeros((horizon + 1, dx))
        us = np.zeros((horizon, du))
        for t in range(horizon):
            us[t] = k0m @ xs[t] + eta[t]
            xs[t + 1] = sys_i.a @ xs[t] + sys_i.b @ us[t] + w[t]
        tasks.append(Trajectory(states=xs, inputs=us))
    return MultiTaskDataset(tasks=tuple(tasks), dx=dx, du=du)
