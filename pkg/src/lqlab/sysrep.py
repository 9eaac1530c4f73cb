"""Basis-decomposition model of the dynamics: [A B] = VEC^{-1}(Phi theta).

Vectorization maps, orthonormal representations, the subspace-distance
misspecification metric, the cartpole benchmark generator and fixture, the
basis builders used by the experiment scenarios, and the theory-constant
calculators (state/controller bound floors, warm-up bounds, misspecification
ceilings).

VEC stacks a dx x (dx+du) matrix column-major: length-dx blocks of the vector
fill columns top-to-bottom, left-to-right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import matkit
from .riccati import LinearSystem, LQRWeights, dare, dlyap, lqr_gain

__all__ = [
    "Representation",
    "AffineBase",
    "BasisBundle",
    "TheoryConstants",
    "BuilderError",
    "vec",
    "vec_inv",
    "realize",
    "subspace_distance",
    "cartpole_system",
    "cartpole_fixture",
    "fixture_initial_gain",
    "FROZEN_ANGLE_A",
    "full_basis",
    "scale_known_a",
    "lumped_cartpole",
    "extended_lumped",
    "known_b_embedding",
    "known_a_embedding",
    "perturb_to_distance",
    "excitation_alpha_min",
    "theory_constants",
]


class BuilderError(RuntimeError):
    """A basis construction failed its post-conditions."""


# --------------------------------------------------------------------------
# vectorization and representations
# --------------------------------------------------------------------------

def vec(m) -> np.ndarray:
    """Column-major stacking of a matrix into a vector."""
    return matkit.as_matrix(m, name="vec input").flatten(order="F")


def vec_inv(v, dx: int) -> np.ndarray:
    """Inverse of `vec`: reshape a length dx*(dx+du) vector into dx rows."""
    a = matkit.as_vector(v, name="vec_inv input")
    if dx < 1 or a.size % dx != 0:
        raise ValueError(f"vector length {a.size} is not divisible by dx={dx}")
    return a.reshape(dx, -1, order="F")


@dataclass(frozen=True)
class Representation:
    """Orthonormal basis Phi (dx*(dx+du) x dtheta) for the dynamics matrices."""

    phi: np.ndarray
    dx: int
    du: int

    def __post_init__(self):
        n = self.dx * (self.dx + self.du)
        phi = matkit.as_matrix(self.phi, rows=n, name="phi")
        dth = phi.shape[1]
        if not 1 <= dth <= n:
            raise ValueError(f"need 1 <= dtheta <= {n}, got {dth}")
        gram_err = float(np.abs(phi.T @ phi - np.eye(dth)).max())
        if gram_err > 1e-10:
            raise ValueError(f"phi columns are not orthonormal (max |Phi'Phi - I| = {gram_err:.2e})")
        object.__setattr__(self, "phi", phi)

    @property
    def dtheta(self) -> int:
        return self.phi.shape[1]


@dataclass(frozen=True)
class AffineBase:
    """Known affine part (A_bar, B_bar) added to the basis expansion."""

    a_bar: np.ndarray
    b_bar: np.ndarray

    def __post_init__(self):
        a = matkit.as_matrix(self.a_bar, name="a_bar")
        if a.shape[0] != a.shape[1]:
            raise ValueError("a_bar must be square")
        b = matkit.as_matrix(self.b_bar, rows=a.shape[0], name="b_bar")
        object.__setattr__(self, "a_bar", a)
        object.__setattr__(self, "b_bar", b)

    @property
    def stacked(self) -> np.ndarray:
        return np.hstack([self.a_bar, self.b_bar])


def realize(rep: Representation, theta, base: AffineBase | None = None) -> LinearSystem:
    """Materialize (A, B) = base + VEC^{-1}(Phi theta)."""
    th = matkit.as_vector(theta, length=rep.dtheta, name="theta")
    ab = vec_inv(rep.phi @ th, rep.dx)
    if base is not None:
        ab = base.stacked + ab
    return LinearSystem(a=ab[:, : rep.dx], b=ab[:, rep.dx :])


def subspace_distance(phi_hat: Representation, phi_star: Representation) -> float:
    """Misspecification metric d(Phi_hat, Phi_star) = ||Phi_hat' Phi_star_perp||.

    Computed as sqrt(1 - sigma_min(Phi_hat' Phi_star)^2), which is algebraically
    identical and avoids materializing the orthocomplement. Always in [0, 1].
    """
    if (phi_hat.dx, phi_hat.du) != (phi_star.dx, phi_star.du):
        raise ValueError("representations live in different ambient spaces")
    if phi_hat.dtheta != phi_star.dtheta:
        raise ValueError("representations must share dtheta")
    s = np.linalg.svd(phi_hat.phi.T @ phi_star.phi, compute_uv=False)
    s_min = float(s[-1])
    return math.sqrt(max(0.0, 1.0 - min(1.0, s_min) ** 2))


# --------------------------------------------------------------------------
# cartpole benchmark
# --------------------------------------------------------------------------

def cartpole_system(m_cart: float, m_pole: float, length: float,
                    gravity: float = 1.0, dt: float = 0.25) -> LinearSystem:
    """Cart-pole linearized at the upright equilibrium, forward-Euler discretized.

    State [cart position, cart velocity, pole angle, pole angular rate],
    scalar force input. A = I + dt*A_c, B = dt*B_c.
    """
    if min(m_cart, m_pole, length, gravity, dt) <= 0:
        raise ValueError("all cartpole parameters must be positive")
    big_m, m, ell, g = m_cart, m_pole, length, gravity
    a_c = np.zeros((4, 4))
    a_c[0, 1] = 1.0
    a_c[1, 2] = -m * g / big_m
    a_c[2, 3] = 1.0
    a_c[3, 2] = (big_m + m) * g / (big_m * ell)
    b_c = np.array([[0.0], [1.0 / big_m], [0.0], [-1.0 / (big_m * ell)]])
    return LinearSystem(a=np.eye(4) + dt * a_c, b=dt * b_c)


def cartpole_fixture() -> LinearSystem:
    """The benchmark system: unit-parameter cartpole at dt = 0.25.

    Identical to cartpole_system(1, 1, 1, 1, 0.25). A commonly printed variant
    of this benchmark zeroes the angle/angle-rate coupling (see FROZEN_ANGLE_A);
    that variant is unstabilizable and is kept only as a reference constant.
    """
    return cartpole_system(1.0, 1.0, 1.0, 1.0, 0.25)


# Variant of the benchmark A with the angle/angle-rate Euler coupling dropped
# (entry (2,3) zero, 0-indexed). The angle coordinate becomes a frozen mode:
# row 2 equals e2' and B[2] = 0, so e2'(A + BK) = e2' for every K — eigenvalue
# exactly 1 under any feedback, hence not stabilizable. Reference only; the
# working fixture is cartpole_fixture().
FROZEN_ANGLE_A = np.array([
    [1.0, 0.25, 0.0, 0.0],
    [0.0, 1.0, -0.25, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.5, 1.0],
])

_FIXTURE_K0 = np.array([[0.37, 1.64, 4.49, 3.89]])


def fixture_initial_gain() -> np.ndarray:
    """The benchmark's initial stabilizing controller K0 (u = K0 x)."""
    return _FIXTURE_K0.copy()


# --------------------------------------------------------------------------
# basis builders
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisBundle:
    """A builder's output: representation, optional affine base, and the
    parameter vector that reproduces its target system."""

    rep: Representation
    base: AffineBase | None
    theta_star: np.ndarray


def _coordinate_column(n: int, flat_index: int) -> np.ndarray:
    e = np.zeros(n)
    e[flat_index] = 1.0
    return e


def _flat_index(dx: int, row: int, col: int) -> int:
    # column-major position of entry (row, col) of the stacked [A B] matrix
    return row + dx * col


def _validate_bundle(bundle: BasisBundle, target: LinearSystem, tol: float = 1e-12) -> BasisBundle:
    got = realize(bundle.rep, bundle.theta_star, bundle.base)
    err = max(float(np.abs(got.a - target.a).max()), float(np.abs(got.b - target.b).max()))
    if err > tol:
        raise BuilderError(f"basis does not reproduce its target system (max err {err:.2e})")
    return bundle


def full_basis(dx: int, du: int) -> BasisBundle:
    """Complete coordinate basis: dtheta = dx*(dx+du), Phi = I."""
    n = dx * (dx + du)
    rep = Representation(phi=np.eye(n), dx=dx, du=du)
    fixture = cartpole_fixture()
    if (dx, du) == (fixture.dx, fixture.du):
        theta = vec(np.hstack([fixture.a, fixture.b]))
        return _validate_bundle(BasisBundle(rep, None, theta), fixture)
    return BasisBundle(rep, None, np.zeros(n))


def scale_known_a(sys: LinearSystem) -> BasisBundle:
    """A known up to an unknown scaling, B entirely unknown: dtheta = 1 + dx*du."""
    dx, du = sys.dx, sys.du
    n = dx * (dx + du)
    a_dir = vec(np.hstack([sys.a, np.zeros((dx, du))]))
    a_norm = float(np.linalg.norm(a_dir))
    if a_norm == 0.0:
        raise BuilderError("scale_known_a needs a nonzero A")
    cols = [a_dir / a_norm]
    theta = [a_norm]
    for j in range(du):
        for i in range(dx):
            cols.append(_coordinate_column(n, _flat_index(dx, i, dx + j)))
            theta.append(float(sys.b[i, j]))
    rep = Representation(phi=np.stack(cols, axis=1), dx=dx, du=du)
    return _validate_bundle(BasisBundle(rep, None, np.array(theta)), sys)


def _lumped_columns(dt: float) -> tuple[list[np.ndarray], LinearSystem]:
    """Five-column lumped cartpole structure at step size dt.

    Column 1 collects the parameter-independent entries (the identity diagonal
    and the dt integrators); the rest are unit coordinates for the four entries
    that vary with the physical parameters: A[1,2], A[3,2], B[1], B[3]
    (0-indexed).
    """
    target = cartpole_system(1.0, 1.0, 1.0, 1.0, dt)
    dx, du = target.dx, target.du
    n = dx * (dx + du)
    structure = np.zeros((dx, dx + du))
    structure[0, 0] = structure[1, 1] = structure[2, 2] = structure[3, 3] = 1.0
    structure[0, 1] = structure[2, 3] = dt
    s_vec = vec(structure)
    cols = [s_vec / float(np.linalg.norm(s_vec))]
    for (i, j) in [(1, 2), (3, 2), (1, 4), (3, 4)]:
        cols.append(_coordinate_column(n, _flat_index(dx, i, j)))
    return cols, target


def lumped_cartpole(dt: float = 0.25) -> BasisBundle:
    """Lumped parameter model: dtheta = 5 (structure scale + 4 physical entries)."""
    cols, target = _lumped_columns(dt)
    rep = Representation(phi=np.stack(cols, axis=1), dx=target.dx, du=target.du)
    theta = rep.phi.T @ vec(np.hstack([target.a, target.b]))
    return _validate_bundle(BasisBundle(rep, None, theta), target)


def extended_lumped(dt: float = 0.25) -> BasisBundle:
    """Lumped model plus one column that defeats closed-loop excitation: dtheta = 6.

    The extra column is the unit projection of vec([-e1 K0, e1]) (e1 = the
    cart-velocity coordinate) onto the orthocomplement of the lumped span.
    Directions of that form are exactly the kernel of the excitation functional
    v -> ||sum_i v_i (Phi_i^A + Phi_i^B K0)||_F^2, so the check value under K0
    is zero to machine precision; the benchmark's optimal gain is nearly
    parallel to K0, which drags its check value below the admissible floor as
    well. A plain search over coordinate directions cannot get anywhere near
    the floor (best candidate ~5e-2), hence this construction.
    """
    cols, target = _lumped_columns(dt)
    dx, du = target.dx, target.du
    k0 = _FIXTURE_K0
    b_dir = np.zeros((dx, du))
    b_dir[1, 0] = 1.0
    kernel_vec = vec(np.hstack([-b_dir @ k0, b_dir]))
    phi5 = np.stack(cols, axis=1)
    resid = kernel_vec - phi5 @ (phi5.T @ kernel_vec)
    norm = float(np.linalg.norm(resid))
    if norm < 1e-10:
        raise BuilderError("kernel direction degenerate against the lumped span")
    rep = Representation(phi=np.hstack([phi5, (resid / norm)[:, None]]), dx=dx, du=du)
    theta = rep.phi.T @ vec(np.hstack([target.a, target.b]))
    bundle = _validate_bundle(BasisBundle(rep, None, theta), target)
    if dt == 0.25:
        # post-condition: excitation broken under both benchmark gains
        from .estimator import excitation_check

        opt = lqr_gain(target, LQRWeights.identity(dx, du))
        floor = excitation_alpha_min(target)
        for gain in (k0, opt.k):
            value = excitation_check(rep, gain)
            if value >= floor:
                raise BuilderError(
                    f"extension fails to break excitation: value {value:.3e} >= floor {floor:.3e}"
                )
    return bundle


def known_b_embedding(sys: LinearSystem) -> BasisBundle:
    """B known exactly, A unknown: base (0, B), coordinate basis over A entries."""
    dx, du = sys.dx, sys.du
    n = dx * (dx + du)
    cols = [
        _coordinate_column(n, _flat_index(dx, i, j)) for j in range(dx) for i in range(dx)
    ]
    rep = Representation(phi=np.stack(cols, axis=1), dx=dx, du=du)
    base = AffineBase(a_bar=np.zeros((dx, dx)), b_bar=sys.b.copy())
    theta = vec(sys.a)
    return _validate_bundle(BasisBundle(rep, base, theta), sys)


def known_a_embedding(sys: LinearSystem) -> BasisBundle:
    """A known exactly, B unknown: base (A, 0), coordinate basis over B entries."""
    dx, du = sys.dx, sys.du
    n = dx * (dx + du)
    cols = [
        _coordinate_column(n, _flat_index(dx, i, dx + j)) for j in range(du) for i in range(dx)
    ]
    rep = Representation(phi=np.stack(cols, axis=1), dx=dx, du=du)
    base = AffineBase(a_bar=sys.a.copy(), b_bar=np.zeros((dx, du)))
    theta = vec(sys.b)
    return _validate_bundle(BasisBundle(rep, base, theta), sys)


def perturb_to_distance(phi_star: Representation, target_d: float, seed: int) -> Representation:
    """Orthonormal Phi_hat at subspace distance ~target_d from phi_star.

    Phi_hat = orthonormalize(Phi_star + s*E) for a fixed Gaussian direction E
    drawn from `seed`; the scale s is found by bisection (the distance is
    monotone in s near zero). Tolerance 1e-3 on the achieved distance.
    """
    if not 0.0 < target_d < 1.0:
        raise ValueError("target distance must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(phi_star.phi.shape)

    def at_scale(s: float) -> tuple[Representation, float]:
        cand = Representation(
            phi=matkit.qr_orthonormalize(phi_star.phi + s * direction),
            dx=phi_star.dx,
            du=phi_star.du,
        )
        return cand, subspace_distance(cand, phi_star)

    lo, hi = 0.0, 1.0
    for _ in range(60):
        _, d_hi = at_scale(hi)
        if d_hi >= target_d:
            break
        hi *= 2.0
    else:
        raise BuilderError("could not bracket the target distance")
    best, best_d = at_scale(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        cand, d_mid = at_scale(mid)
        if abs(d_mid - target_d) < abs(best_d - target_d):
            best, best_d = cand, d_mid
        if d_mid < target_d:
            lo = mid
        else:
            hi = mid
    if abs(best_d - target_d) > 1e-3:
        raise BuilderError(
            f"bisection failed: achieved distance {best_d:.5f} vs target {target_d:.5f}"
        )
    return best


# --------------------------------------------------------------------------
# theory constants
# --------------------------------------------------------------------------

def excitation_alpha_min(sys: LinearSystem, w: LQRWeights | None = None) -> float:
    """Smallest admissible excitation level alpha = 1 / (3 ||P*||^{3/2})."""
    w = w or LQRWeights.identity(sys.dx, sys.du)
    p_star = dare(sys, w)
    return 1.0 / (3.0 * float(np.linalg.norm(p_star, 2)) ** 1.5)


@dataclass(frozen=True)
class TheoryConstants:
    """Analysis-side quantities, evaluated with every unspecified universal
    constant set to 1 (see `up_to_universal_constants`)."""

    epsilon: float
    psi_b: float
    beta1: float
    beta2: float
    x_b_min: float
    k_b_min: float
    tau_warmup_min_exploration: float
    tau_warmup_min_noexploration: float
    sigma: float
    gamma: float
    alpha: float
    misspec_ceiling_exploration: float
    misspec_ceiling_noexploration: float
    x_b_used: float
    theta_star_norm: float
    p_star_norm: float
    p_k0_norm: float
    up_to_universal_constants: bool = True


def theory_constants(sys: LinearSystem, rep: Representation, k0,
                     sigma: float = 1.0, gamma: float = 1.0,
                     alpha: float | None = None, x_b: float | None = None) -> TheoryConstants:
    """Evaluate the bound formulas backing the adaptive scheme's guarantees.

    All unspecified universal constants are set to 1, so every returned value
    is meaningful up to those constants only. `x_b` enters both warm-up
    formulas; when omitted, the computed floor x_b_min is used.
    """
    if gamma < 1.0:
        raise ValueError("gamma must be >= 1")
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    k0m = matkit.as_matrix(k0, rows=sys.du, cols=sys.dx, name="k0")
    w = LQRWeights.identity(sys.dx, sys.du)
    p_star = dare(sys, w)
    a_cl = sys.a + sys.b @ k0m
    if matkit.spectral_radius(a_cl) >= 1.0:
        raise ValueError("k0 does not stabilize the system")
    p_k0 = dlyap(a_cl, w.q + k0m.T @ k0m)

    norm_ps = float(np.linalg.norm(p_star, 2))
    norm_p0 = float(np.linalg.norm(p_k0, 2))
    dx, du, dth = sys.dx, sys.du, rep.dtheta
    psi = max(1.0, float(np.linalg.norm(sys.b, 2)))
    epsilon = 1.0 / (2916.0 * norm_ps**10)
    theta_star = rep.phi.T @ vec(np.hstack([sys.a, sys.b]))
    th_norm = float(np.linalg.norm(theta_star))
    if alpha is None:
        alpha = 1.0 / (3.0 * norm_ps**1.5)

    x_b_min = 400.0 * norm_p0**2 * psi * sigma * math.sqrt(dx + du)
    k_b_min = math.sqrt(2.0 * norm_p0)
    x_b_used = x_b_min if x_b is None else float(x_b)

    beta1 = sigma**4 * norm_p0**12 * psi**8 * th_norm**2 * (dx + du) * math.sqrt(dth / du)
    beta2 = (
        epsilon * norm_p0**9 * psi**8 * th_norm**2 * (dx + du)
        / (dth * min(alpha**2, alpha**4))
    )

    def neg_log_shrink(half: bool) -> float:
        # -log_{1 - 1/(c ||P*||)}(||P*||) with c = 2 for the zero-exploration bound
        c = 2.0 if half else 1.0
        base = 1.0 - 1.0 / (c * norm_ps)
        if base <= 0.0 or norm_ps <= 1.0:
            return 0.0  # trivially contractive; no warm-up epochs needed
        return -math.log(norm_ps) / math.log(base)

    tau1 = sigma**4 * norm_p0**3 * max(
        psi**2 * (dx + du),
        x_b_used**2,
        neg_log_shrink(half=False),
        dth * du / epsilon,
    )
    tau2 = sigma**4 * norm_p0**3 * psi**2 * max(
        float(dx + du),
        x_b_used**2,
        neg_log_shrink(half=True),
        dth / (2.0 * epsilon * alpha**2),
    )

    return TheoryConstants(
        epsilon=epsilon,
        psi_b=psi,
        beta1=beta1,
        beta2=beta2,
        x_b_min=x_b_min,
        k_b_min=k_b_min,
        tau_warmup_min_exploration=tau1,
        tau_warmup_min_noexploration=tau2,
        sigma=sigma,
        gamma=gamma,
        alpha=float(alpha),
        misspec_ceiling_exploration=epsilon**2 / (4.0 * beta1**2),
        misspec_ceiling_noexploration=math.sqrt(epsilon / (2.0 * beta2)),
        x_b_used=x_b_used,
        theta_star_norm=th_norm,
        p_star_norm=norm_ps,
        p_k0_norm=norm_p0,
    )
