"""Structured least squares over a basis representation, plus the
persistence-of-excitation functional and the closed-loop covariance oracle.

The regression treats the dynamics as x_{s+1} = vec_inv(Phi theta) z_s + noise
with z_s = [x_s; u_s], and solves for theta through the normal equations
Lambda theta = rhs with Lambda = sum_s Phi'(z_s z_s' kron I_dx)Phi. The
Kronecker products are never materialized: each sample's dtheta-column design
block is G_s = sum_j z_{s,j} * Phi[j*dx:(j+1)*dx, :], accumulated in explicit
coordinate order so the result is bit-identical to the naive materialized
reference kept in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matkit
from .riccati import InstabilityError, LinearSystem
from .sysrep import AffineBase, Representation

__all__ = [
    "Trajectory",
    "LsOutput",
    "least_squares",
    "affine_least_squares",
    "excitation_check",
    "steady_covariance",
]


@dataclass(frozen=True)
class Trajectory:
    """States x_1..x_{t+1} paired with the inputs u_1..u_t that produced them."""

    states: np.ndarray
    inputs: np.ndarray

    def __post_init__(self):
        xs = matkit.as_matrix(self.states, name="states")
        us = matkit.as_matrix(self.inputs, name="inputs")
        if xs.shape[0] != us.shape[0] + 1:
            raise ValueError(
                f"need one more state than input, got {xs.shape[0]} states / {us.shape[0]} inputs"
            )
        if us.shape[0] < 1:
            raise ValueError("trajectory must contain at least one transition")
        object.__setattr__(self, "states", xs)
        object.__setattr__(self, "inputs", us)

    @property
    def t(self) -> int:
        return self.inputs.shape[0]

    @property
    def dx(self) -> int:
        return self.states.shape[1]

    @property
    def du(self) -> int:
        return self.inputs.shape[1]

    @property
    def z(self) -> np.ndarray:
        """Regressors [x_s; u_s], one row per transition."""
        return np.hstack([self.states[:-1], self.inputs])


@dataclass(frozen=True)
class LsOutput:
    """Estimate theta_hat with its Gram matrix Lambda and lambda_min(Lambda)."""

    theta_hat: np.ndarray
    lam: np.ndarray
    lambda_min: float


def _design(rep: Representation, z: np.ndarray) -> np.ndarray:
    """Stacked per-sample design blocks, (t*dx) x dtheta.

    Block s is (z_s kron I_dx)' Phi = sum_j z_{s,j} Phi[j*dx:(j+1)*dx, :].
    The sum runs in increasing j with elementwise accumulation; this exactly
    reproduces the floating-point result of materializing z_s kron I_dx.
    """
    t, nz = z.shape
    dx = rep.dx
    g = np.zeros((t, dx, rep.dtheta))
    for j in range(nz):
        g += z[:, j, None, None] * rep.phi[j * dx : (j + 1) * dx, :][None, :, :]
    return g.reshape(t * dx, rep.dtheta)


def _solve(rep: Representation, z: np.ndarray, targets: np.ndarray) -> LsOutput:
    gf = _design(rep, z)
    lam = gf.T @ gf
    rhs = gf.T @ targets.reshape(-1)
    theta_hat = matkit.pinv(lam) @ rhs
    lambda_min = matkit.sym_eig_min(0.5 * (lam + lam.T))
    return LsOutput(theta_hat=theta_hat, lam=lam, lambda_min=lambda_min)


def _check_dims(rep: Representation, traj: Trajectory):
    if (traj.dx, traj.du) != (rep.dx, rep.du):
        raise ValueError(
            f"trajectory dims ({traj.dx}, {traj.du}) do not match "
            f"representation ({rep.dx}, {rep.du})"
        )


def least_squares(rep: Representation, traj: Trajectory) -> LsOutput:
    """theta_hat = Lambda^+ sum_s Phi'(z_s kron I_dx) x_{s+1}.

    Singular Lambda is resolved by the pseudo-inverse (minimum-norm solution);
    callers judge trustworthiness through lambda_min.
    """
    _check_dims(rep, traj)
    return _solve(rep, traj.z, traj.states[1:])


def affine_least_squares(rep: Representation, base: AffineBase, traj: Trajectory) -> LsOutput:
    """least_squares on targets shifted by the known affine part:
    x_{s+1} - [A_bar B_bar] z_s."""
    _check_dims(rep, traj)
    z = traj.z
    return _solve(rep, z, traj.states[1:] - z @ base.stacked.T)


def excitation_check(rep: Representation, k) -> float:
    """lambda_min(Phi' ([I;K][I;K]' kron I_dx) Phi) — the closed-loop
    identifiability level of the representation under gain K.

    Equals the minimum over unit v of ||sum_i v_i (Phi_i^A + Phi_i^B K)||_F^2.
    """
    km = matkit.as_matrix(k, rows=rep.du, cols=rep.dx, name="k")
    w = np.vstack([np.eye(rep.dx), km])
    n_mat = w @ w.T
    n_mat = 0.5 * (n_mat + n_mat.T)
    gram = rep.phi.T @ matkit.kron(n_mat, np.eye(rep.dx)) @ rep.phi
    return matkit.sym_eig_min(0.5 * (gram + gram.T))


def steady_covariance(sys: LinearSystem, k, sigma_u: float, t: int) -> np.ndarray:
    """Expected time-averaged covariance of z_s = [x_s; u_s] over s = 1..t
    under u = Kx + sigma_u*g, unit process noise, x_1 = 0:

        (1/t) sum_{s=0}^{t-2} sum_{j=0}^{s} W A_K^j (sigma_u^2 BB' + I) A_K^j' W'
            + blockdiag(0, sigma_u^2 I_du),      W = [I; K].

    Evaluated by the literal double sum with running inner partial sums.
    """
    km = matkit.as_matrix(k, rows=sys.du, cols=sys.dx, name="k")
    if t < 2:
        raise ValueError("need t >= 2")
    if not 0.0 <= sigma_u <= 1.0:
        raise ValueError("need 0 <= sigma_u <= 1")
    a_cl = sys.a + sys.b @ km
    rho = matkit.spectral_radius(a_cl)
    if rho >= 1.0:
        raise InstabilityError(f"closed loop is not stable (spectral radius {rho:.6f})")
    noise_cov = sigma_u**2 * (sys.b @ sys.b.T) + np.eye(sys.dx)

    power_term = noise_cov.copy()  # A_K^j N A_K^j' at the current j
    partial = power_term.copy()  # inner sum S_s = sum_{j<=s} ...
    acc = partial.copy()  # outer sum over s
    for _ in range(1, t - 1):
        power_term = a_cl @ power_term @ a_cl.T
        partial = partial + power_term
        acc = acc + partial

    w = np.vstack([np.eye(sys.dx), km])
    out = w @ (acc / t) @ w.T
    out[sys.dx :, sys.dx :] += sigma_u**2 * np.eye(sys.du)
    return out
