import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

import lab_support
from lqlab import matkit
from lqlab.riccati import (
    InstabilityError,
    LinearSystem,
    LQRWeights,
    StabilizabilityError,
    ce_closeness,
    closed_loop_cost,
    dare,
    dlyap,
    lqr_gain,
)

# For a scalar system x' = a x + b u with q = r = 1 the Riccati equation
# reduces to p = a^2 p - a^2 b^2 p^2 / (b^2 p + 1) + 1, whose positive root
# for a = 0.5, b = 1 solves p^2 - 0.25 p - 1 = 0 hand-derived below.
SCALAR_P = (0.25 + np.sqrt(0.0625 + 4.0)) / 2.0  # 1.1327822185373186...


def scalar_system(a=0.5, b=1.0):
    return LinearSystem(a=[[a]], b=[[b]]), LQRWeights.identity(1, 1)


# -- weights ------------------------------------------------------------------


def test_weights_identity_constructor():
    w = LQRWeights.identity(4, 1)
    assert_allclose(w.q, np.eye(4))
    assert_allclose(w.r, np.eye(1))


def test_weights_reject_q_below_identity():
    with pytest.raises(ValueError):
        LQRWeights(q=0.5 * np.eye(2), r=np.eye(1))


def test_weights_reject_asymmetric_q():
    with pytest.raises(ValueError):
        LQRWeights(q=np.array([[2.0, 1.0], [0.0, 2.0]]), r=np.eye(1))


def test_weights_reject_non_identity_r():
    with pytest.raises(ValueError):
        LQRWeights(q=np.eye(2), r=2.0 * np.eye(1))


def test_weights_accept_q_above_identity():
    w = LQRWeights(q=np.diag([1.0, 3.0]), r=np.eye(2))
    assert w.q[1, 1] == 3.0


# -- DARE ----------------------------------------------------------------------


def test_dare_scalar_a_zero():
    sys, w = scalar_system(a=0.0)
    assert_allclose(dare(sys, w), [[1.0]], atol=1e-12)


def test_dare_scalar_known_root():
    sys, w = scalar_system()
    p = dare(sys, w)
    assert p[0, 0] == pytest.approx(SCALAR_P, abs=1e-9)


def test_dare_fixture_residual(fixture_sys, weights):
    p = dare(fixture_sys, weights)
    a, b = fixture_sys.a, fixture_sys.b
    res = a.T @ p @ a - a.T @ p @ b @ np.linalg.solve(
        b.T @ p @ b + weights.r, b.T @ p @ a
    ) + weights.q - p
    assert np.linalg.norm(res, "fro") <= 1e-9 * np.linalg.norm(p, "fro")


def test_dare_unstabilizable_raises():
    sys = LinearSystem(a=2.0 * np.eye(2), b=np.zeros((2, 1)))
    with pytest.raises(StabilizabilityError):
        dare(sys, LQRWeights.identity(2, 1))


def test_dare_matches_scipy_on_random_systems():
    rng = np.random.default_rng(7)
    for _ in range(10):
        sys = lab_support.random_stabilizable(rng)
        w = LQRWeights.identity(sys.dx, sys.du)
        ours = dare(sys, w)
        ref = scipy.linalg.solve_discrete_are(sys.a, sys.b, w.q, w.r)
        assert_allclose(ours, ref, atol=1e-7 * max(1.0, np.linalg.norm(ref, 2)))


# -- dlyap ----------------------------------------------------------------------


def test_dlyap_zero_dynamics_returns_q():
    q = np.array([[2.0, 0.5], [0.5, 1.0]])
    assert_allclose(dlyap(np.zeros((2, 2)), q), q, atol=1e-14)


def test_dlyap_scalar_geometric_series():
    # p = 0.25 p + 1 => p = 4/3
    p = dlyap(np.array([[0.5]]), np.array([[1.0]]))
    assert p[0, 0] == pytest.approx(4.0 / 3.0, abs=1e-12)


def test_dlyap_nilpotent_two_term_series():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    p = dlyap(a, np.eye(2))
    assert_allclose(p, np.diag([1.0, 2.0]), atol=1e-14)


def test_dlyap_residual_random():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((4, 4))
    a *= 0.9 / matkit.spectral_radius(a)
    q = np.eye(4)
    p = dlyap(a, q)
    assert np.linalg.norm(a.T @ p @ a + q - p, "fro") <= 1e-10 * np.linalg.norm(p, "fro")


def test_dlyap_unstable_raises():
    with pytest.raises(InstabilityError):
        dlyap(np.eye(2), np.eye(2))


def test_dlyap_matches_scipy():
    rng = np.random.default_rng(9)
    for _ in range(5):
        a = rng.standard_normal((3, 3))
        a *= float(rng.uniform(0.2, 0.95)) / matkit.spectral_radius(a)
        m = rng.standard_normal((3, 3))
        q = m @ m.T + np.eye(3)
        ours = dlyap(a, q)
        # scipy solves X = A X A' + Q; ours solves P = A' P A + Q
        ref = scipy.linalg.solve_discrete_lyapunov(a.T, q)
        assert_allclose(ours, ref, atol=1e-9 * np.linalg.norm(ref, 2))


# -- gains and costs -------------------------------------------------------------


def test_lqr_gain_scalar():
    sys, w = scalar_system()
    res = lqr_gain(sys, w)
    # k = -b p a / (b^2 p + r) with the hand-derived scalar root
    assert res.k[0, 0] == pytest.approx(-0.5 * SCALAR_P / (SCALAR_P + 1.0), abs=1e-9)


def test_lqr_gain_zero_dynamics_needs_no_control():
    sys, w = scalar_system(a=0.0)
    res = lqr_gain(sys, w)
    assert res.k[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert res.cost == pytest.approx(1.0, abs=1e-12)


def test_lqr_cost_equals_trace_p(fixture_sys, weights):
    res = lqr_gain(fixture_sys, weights)
    assert res.cost == pytest.approx(float(np.trace(res.p)), rel=1e-8)
    assert matkit.spectral_radius(fixture_sys.a + fixture_sys.b @ res.k) < 1.0


def test_lqr_gain_is_optimal_among_perturbations(fixture_sys, weights):
    res = lqr_gain(fixture_sys, weights)
    rng = np.random.default_rng(21)
    for _ in range(50):
        k_alt = res.k + 0.05 * rng.standard_normal(res.k.shape)
        if matkit.spectral_radius(fixture_sys.a + fixture_sys.b @ k_alt) >= 1.0:
            continue
        assert closed_loop_cost(fixture_sys, weights, k_alt) >= res.cost - 1e-9


def test_closed_loop_cost_open_loop_stable():
    sys = LinearSystem(a=np.zeros((2, 2)), b=np.ones((2, 1)))
    w = LQRWeights.identity(2, 1)
    assert closed_loop_cost(sys, w, np.zeros((1, 2))) == pytest.approx(2.0)


def test_closed_loop_cost_scalar_hand_value():
    # a=1, b=1, k=-0.5: closed loop 0.5, cost weight q + k^2 r = 1.25,
    # so p = 1.25 / (1 - 0.25) = 5/3
    sys, w = scalar_system(a=1.0)
    assert closed_loop_cost(sys, w, [[-0.5]]) == pytest.approx(5.0 / 3.0, abs=1e-12)


def test_closed_loop_cost_rejects_destabilizing_gain():
    sys, w = scalar_system(a=1.0)
    with pytest.raises(InstabilityError):
        closed_loop_cost(sys, w, [[0.5]])


def test_cost_matches_monte_carlo(fixture_sys, weights, k0):
    analytic = closed_loop_cost(fixture_sys, weights, k0)
    mc = lab_support.mc_time_average_cost(fixture_sys, weights, k0, 40_000, [0, 1])
    assert mc == pytest.approx(analytic, rel=0.05)


# -- certainty-equivalence closeness gate ------------------------------------------


def test_ce_closeness_unit_norm():
    out = ce_closeness(np.eye(2), 0.0)
    assert out.epsilon == pytest.approx(1.0 / 2916.0)
    assert out.within
    assert out.suboptimality_bound == 0.0


def test_ce_closeness_bound_scales_with_error():
    out = ce_closeness(np.eye(3), 1e-4)
    assert out.suboptimality_bound == pytest.approx(142.0 * 1e-4)
    assert out.within  # 1e-4 < 1/2916


def test_ce_closeness_norm_dependence():
    out = ce_closeness(2.0 * np.eye(2), 1e-3)
    assert out.epsilon == pytest.approx(1.0 / (2916.0 * 1024.0))
    assert not out.within
    assert out.suboptimality_bound == pytest.approx(142.0 * 256.0 * 1e-3)


def test_ce_closeness_rejects_negative_error():
    with pytest.raises(ValueError):
        ce_closeness(np.eye(2), -1.0)
