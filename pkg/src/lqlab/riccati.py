"""LQR synthesis and evaluation.

Discrete algebraic Riccati equation (fixed-point iteration), discrete
Lyapunov equation (doubling recursion), optimal gains, infinite-horizon
closed-loop cost, and the certainty-equivalence closeness diagnostic.

Conventions: dynamics x_{t+1} = A x_t + B u_t + w_t with feedback u = K x
(so the closed loop is A + B K), cost x'Qx + u'Ru, and the infinite-horizon
cost of a stabilizing K under identity-covariance noise is trace(P_K) with
P_K = dlyap(A + BK, Q + K'RK).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matkit

__all__ = [
    "LinearSystem",
    "LQRWeights",
    "SynthesisResult",
    "CeCloseness",
    "StabilizabilityError",
    "InstabilityError",
    "dare",
    "dlyap",
    "lqr_gain",
    "closed_loop_cost",
    "ce_closeness",
]

DARE_REL_TOL = 1e-12
DARE_MAX_ITER = 100_000
DLYAP_REL_TOL = 1e-14
DLYAP_MAX_DOUBLINGS = 200


class StabilizabilityError(RuntimeError):
    """DARE iteration failed to converge: (A, B) is not stabilizable (or close to it)."""


class InstabilityError(ValueError):
    """An operation requiring a stable closed loop received ρ(A_cl) >= 1."""


@dataclass(frozen=True)
class LinearSystem:
    """Ground-truth pair (A, B) with state dimension dx and input dimension du."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = matkit.as_matrix(self.a, name="A")
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"A must be square, got {a.shape}")
        b = matkit.as_matrix(self.b, rows=a.shape[0], name="B")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dx(self) -> int:
        return self.a.shape[0]

    @property
    def du(self) -> int:
        return self.b.shape[1]


@dataclass(frozen=True)
class LQRWeights:
    """Cost weights with the normalization Q >= I (in Loewner order) and R = I."""

    q: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        q = matkit.as_matrix(self.q, name="Q")
        r = matkit.as_matrix(self.r, name="R")
        if q.shape[0] != q.shape[1] or r.shape[0] != r.shape[1]:
            raise ValueError("Q and R must be square")
        if float(np.abs(q - q.T).max()) > 1e-10 * max(float(np.abs(q).max()), 1.0):
            raise ValueError("Q must be symmetric")
        if matkit.sym_eig_min(q) < 1.0 - 1e-8:
            raise ValueError("Q must satisfy Q >= I")
        if not np.allclose(r, np.eye(r.shape[0]), atol=1e-12):
            raise ValueError("R must be the identity (normalization)")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @staticmethod
    def identity(dx: int, du: int) -> "LQRWeights":
        return LQRWeights(np.eye(dx), np.eye(du))


@dataclass(frozen=True)
class SynthesisResult:
    p: np.ndarray
    k: np.ndarray
    cost: float


@dataclass(frozen=True)
class CeCloseness:
    """Closeness gate for certainty equivalence and its suboptimality bound."""

    epsilon: float
    within: bool
    suboptimality_bound: float


def dare(sys: LinearSystem, w: LQRWeights) -> np.ndarray:
    """Solve P = A'PA - A'PB (B'PB + R)^{-1} B'PA + Q by fixed-point iteration.

    Starts from P0 = Q; stops when the relative Frobenius change drops below
    DARE_REL_TOL. Non-convergence within the budget (or a non-finite iterate)
    signals an unstabilizable pair.
    """
    a, b = sys.a, sys.b
    q, r = w.q, w.r
    if q.shape[0] != sys.dx or r.shape[0] != sys.du:
        raise ValueError("weight dimensions do not match the system")
    p = q.copy()
    for _ in range(DARE_MAX_ITER):
        pb = p @ b
        gain_term = a.T @ pb @ np.linalg.solve(b.T @ pb + r, pb.T @ a)
        p_next = a.T @ p @ a - gain_term + q
        p_next = 0.5 * (p_next + p_next.T)
        if not np.all(np.isfinite(p_next)):
            raise StabilizabilityError("DARE iteration diverged (non-finite iterate)")
        delta = float(np.linalg.norm(p_next - p, "fro"))
        p = p_next
        norm_p = float(np.linalg.norm(p, "fro"))
        # the squared entries inside the Frobenius norms can overflow while the
        # iterate itself is still finite; inf <= tol * inf would then read as
        # converged, so treat non-finite norms as divergence
        if not np.isfinite(delta) or not np.isfinite(norm_p):
            raise StabilizabilityError("DARE iteration diverged (norm overflow)")
        if delta <= DARE_REL_TOL * norm_p:
            return p
    raise StabilizabilityError(
        f"DARE did not converge in {DARE_MAX_ITER} iterations; (A, B) likely unstabilizable"
    )


def dlyap(a_cl, q) -> np.ndarray:
    """Solve P = A' P A + Q for ρ(A) < 1 by the doubling recursion.

    S <- S + M'SM, M <- M^2 accumulates the series sum_j (A')^j Q A^j with
    quadratically growing coverage; stops when the latest increment is below
    DLYAP_REL_TOL relative to the accumulant.
    """
    a = matkit.as_matrix(a_cl, name="a_cl")
    qm = matkit.as_matrix(q, name="q")
    if a.shape[0] != a.shape[1] or qm.shape != a.shape:
        raise ValueError("a_cl and q must be square with matching shapes")
    rho = matkit.spectral_radius(a)
    if rho >= 1.0:
        raise InstabilityError(f"closed loop is not stable: spectral radius {rho:.6f} >= 1")
    s = 0.5 * (qm + qm.T)
    m = a.copy()
    for _ in range(DLYAP_MAX_DOUBLINGS):
        incr = m.T @ s @ m
        s = s + incr
        s = 0.5 * (s + s.T)
        if float(np.linalg.norm(incr, "fro")) <= DLYAP_REL_TOL * float(np.linalg.norm(s, "fro")):
            return s
        m = m @ m
    raise InstabilityError("dlyap doubling recursion failed to converge")


def lqr_gain(sys: LinearSystem, w: LQRWeights) -> SynthesisResult:
    """Optimal gain K = -(B'PB + R)^{-1} B'PA and its realized closed-loop cost."""
    p = dare(sys, w)
    k = -matkit.solve_spd(sys.b.T @ p @ sys.b + w.r, sys.b.T @ p @ sys.a)
    cost = closed_loop_cost(sys, w, k)
    return SynthesisResult(p=p, k=k, cost=cost)


def closed_loop_cost(sys: LinearSystem, w: LQRWeights, k) -> float:
    """Infinite-horizon cost trace(dlyap(A + BK, Q + K'RK)) of a stabilizing K."""
    km = matkit.as_matrix(k, rows=sys.du, cols=sys.dx, name="K")
    a_cl = sys.a + sys.b @ km
    p_k = dlyap(a_cl, w.q + km.T @ w.r @ km)
    return float(np.trace(p_k))


def ce_closeness(p_star, est_error_sq: float) -> CeCloseness:
    """Certainty-equivalence closeness gate.

    epsilon = 1 / (2916 ||P*||^10) is the estimation-error level (squared
    Frobenius) below which the certainty-equivalent gain is guaranteed
    stabilizing with suboptimality at most 142 ||P*||^8 * err^2. Norms are
    spectral. The constants 2916 and 142 are fixed by the underlying analysis.
    """
    if est_error_sq < 0:
        raise ValueError("est_error_sq must be non-negative")
    p = matkit.as_matrix(p_star, name="p_star")
    norm_p = float(np.linalg.norm(p, 2))
    epsilon = 1.0 / (2916.0 * norm_p**10)
    return CeCloseness(
        epsilon=epsilon,
        within=bool(est_error_sq <= epsilon),
        suboptimality_bound=142.0 * norm_p**8 * est_error_sq,
    )
