"""
Tests for the root-of-unity representation: d/w/lambda, the finite and Kashaev R-matrices, and the delta limit.
"""

import numpy as np
import pytest

from check_report import CheckStatus
from quantum_torus import RepresentationError
from root_of_unity import (
    ConstraintError,
    KappaParams,
    PoleError,
    RootParams,
    branch_winding,
    build_R_matrix,
    build_RK,
    build_Y_rep,
    check_clock_shift,
    clock_shift,
    d_fn,
    delta_fn,
    delta_limit_study,
    fit_gauge,
    fourier_w_check,
    gauge_compare,
    lambda_checks,
    lambda_fn,
    limit_dressing,
    limit_qY_check,
    pochhammer_identity_check,
    theta_indicator,
    verify_braid_matrix,
    verify_rk,
    w_fn,
    w_multival,
)

RK_N2 = np.array([
    [-1, -1, 1, 0],
    [0, -1, 0, 0],
    [0, 0, -1, 0],
    [0, 1, -1, -1],
], dtype=complex)


def test_root_params():
    params = RootParams(4)
    assert params.omega == pytest.approx(1j)
    assert params.zeta == pytest.approx(-1j)
    assert params.zeta_half ** 2 == pytest.approx(params.zeta)
    with pytest.raises(ConstraintError):
        RootParams(0)


def test_kappa_params_validation():
    with pytest.raises(ConstraintError):
        KappaParams(1.2, 0.5, 0.5)
    with pytest.raises(ConstraintError):
        KappaParams.limit(3, 0.0, 0.4, 0.3)
    kappa = KappaParams.limit(3, 0.1, 0.4, 0.3)
    assert kappa.k4 == pytest.approx(0.999)
    assert kappa.delta == 0.1


def test_clock_shift_n2():
    Z, X = clock_shift(2)
    np.testing.assert_allclose(Z, np.diag([1, -1]))
    np.testing.assert_allclose(X, [[0, 1], [1, 0]])


@pytest.mark.parametrize("N", [1, 2, 3, 5])
@pytest.mark.parametrize("mode", ["complex", "cyclotomic"])
def test_clock_shift_relations(N, mode):
    assert check_clock_shift(N, mode).is_pass


def test_clock_shift_modes_agree():
    Z, X = clock_shift(5, "cyclotomic")
    Zc, Xc = clock_shift(5)
    np.testing.assert_allclose(Z.to_numpy(), Zc, atol=1e-12)
    np.testing.assert_allclose(X.to_numpy(), Xc, atol=1e-12)


def test_y_representation():
    Y2, Y4, Y6 = build_Y_rep(3, KappaParams(0.4, 0.5 + 0.2j, 0.3))
    assert Y2.shape == (9, 9)
    zeta = RootParams(3).zeta
    np.testing.assert_allclose(Y4 @ Y2, zeta * Y2 @ Y4, atol=1e-12)
    np.testing.assert_allclose(Y2 @ Y6, Y6 @ Y2, atol=1e-12)


def test_d_hand_value():
    expected = (16 / 25) ** 0.25 * (8 / 5) ** -0.5
    assert d_fn(3 / 5, 2) == pytest.approx(expected)
    assert d_fn(0.7, 1) == pytest.approx(1)
    with pytest.raises(PoleError):
        d_fn(1.0, 3)


def test_delta_fn():
    assert delta_fn(3 / 5, 2) == pytest.approx(4 / 5)
    assert delta_fn(0, 4) == pytest.approx(1)


def test_w_hand_values():
    assert w_fn(3 / 5, 4 / 5, 0, 2) == pytest.approx(np.sqrt(2))
    assert w_fn(3 / 5, 4 / 5, 1, 2) == pytest.approx(np.sqrt(2) / 2)
    assert w_fn(3 / 5, 4 / 5, 2, 2) == pytest.approx(np.sqrt(2))
    assert w_fn(0.3, 0.9, 0, 1, check=False) == pytest.approx(1)


def test_w_constraint():
    with pytest.raises(ConstraintError):
        w_fn(0.5, 0.5, 0, 2)


def test_w_matches_inverse_d():
    for N in (2, 3, 5):
        x = 0.35 + 0.2j
        for n in range(N):
            shifted = np.exp(2j * np.pi * n / N) * x
            assert w_multival(x, n, N) == pytest.approx(1 / d_fn(shifted, N), rel=1e-12)


def test_lambda_hand_values():
    assert lambda_fn(4 / 5, 3 / 5, 2) == pytest.approx(np.sqrt(2))
    assert lambda_fn(0.3, 0.7, 1) == pytest.approx(1)


def test_fourier_w_hand_value():
    x, y = 3 / 5, 4 / 5
    lhs = w_fn(x, y, 0, 2) + w_fn(x, y, 1, 2)
    assert lhs == pytest.approx(np.sqrt(2) + np.sqrt(2) / 2, abs=1e-12)
    rhs = 2 * np.sqrt(x / y) / lambda_fn(y, x, 2) / w_fn(y, x, -1, 2)
    assert abs(lhs - rhs) <= 1e-12


@pytest.mark.parametrize("N", [2, 3, 5, 8, 12])
def test_fourier_w_identities(N):
    report = fourier_w_check(N, samples=25, seed=7)
    assert report.is_pass, [e.check_id for e in report.failures()]


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_lambda_checks(N):
    assert lambda_checks(N, samples=10).is_pass


def test_winding_vanishes_inside_disc():
    assert branch_winding(0.4 + 0.3j, 5) == 0


def test_limit_qY():
    report = limit_qY_check(x=0.4, N=3, eps=(1e-1, 1e-2, 1e-3))
    assert report.is_pass
    assert report.get("rk.limit_qY.N3.x.final").metric <= 1e-3


def test_limit_qY_uses_inverse_root_of_unity():
    report = limit_qY_check(x=0.4, N=3, eps=(1e-1, 1e-2, 1e-3))
    assert report.get("rk.limit_qY.N3.x.final").metric <= 1e-4
    assert report.get("rk.limit_qY.N3.x.trend").status == CheckStatus.PASS


def test_limit_qY_rejects_large_x():
    with pytest.raises(ConstraintError):
        limit_qY_check(x=1.2, N=3)


def test_theta_indicator():
    assert theta_indicator(0, 0, 0, 1, 2) == 1
    assert theta_indicator(0, 1, 0, 0, 2) == 0
    assert theta_indicator(0, 0, 0, 0, 1) == 1


@pytest.mark.parametrize("N", [2, 3, 4, 5, 7])
def test_pochhammer_identity(N):
    assert pochhammer_identity_check(N).is_pass


def test_rk_n2_matches_hand_matrix():
    np.testing.assert_allclose(build_RK(2), RK_N2, atol=1e-12)
    np.testing.assert_allclose(build_RK(2, "cyclotomic").to_numpy(), RK_N2, atol=1e-12)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_rk_modes_agree(N):
    np.testing.assert_allclose(build_RK(N, "cyclotomic").to_numpy(), build_RK(N), atol=1e-10)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_rk_braid_exact(N):
    report = verify_rk(N, "cyclotomic")
    assert report.is_pass


def test_rk_braid_complex():
    report = verify_rk(5)
    assert report.is_pass
    assert report.get("rk.braid.RK.complex.N5").metric <= 1e-9


def test_corrupted_rk_fails():
    report = verify_braid_matrix(build_RK(2, "cyclotomic", corrupt=True), 2, label="corrupt")
    assert report.status == CheckStatus.FAIL


def test_braid_guard():
    with pytest.raises(RepresentationError):
        verify_braid_matrix(np.zeros((1, 1)), 17)


def test_routes_agree():
    kappa = KappaParams(0.3 + 0.1j, 0.8 * np.exp(0.2j), 0.2 - 0.15j)
    Rd = build_R_matrix(3, kappa, route="d")
    Rw = build_R_matrix(3, kappa, route="w")
    scale = np.max(np.abs(Rd))
    assert np.max(np.abs(Rd - Rw)) / scale <= 1e-10
    Rmp = build_R_matrix(3, kappa, route="w", dps=30)
    assert np.max(np.abs(Rd - Rmp)) / scale <= 1e-10


def test_unknown_route():
    with pytest.raises(ConstraintError):
        build_R_matrix(2, KappaParams(0.3, 0.5, 0.3), route="x")


def test_n1_matrices_trivial():
    assert build_RK(1)[0, 0] == pytest.approx(1)
    R = build_R_matrix(1, KappaParams(0.3, 0.5, 0.2))
    assert R.shape == (1, 1)
    assert R[0, 0] == pytest.approx(1)


def test_gauge_compare_is_scale_invariant():
    RK = build_RK(3)
    report, fit = gauge_compare(2.5j * RK, RK, 3)
    assert report.is_pass
    assert fit.rho == pytest.approx(2.5j)
    assert fit.deviation <= 1e-12
    assert fit.off_support == 0


def test_delta_limit_study():
    report = delta_limit_study(3, deltas=(1e-1, 1e-2, 1e-3), k2=0.4, k6=0.3)
    assert report.is_pass, [(e.check_id, e.metric) for e in report.failures()]
    assert report.get("rk.limit.N3.final").metric <= 1e-2
    assert report.get("rk.limit.N3.branch").status == CheckStatus.PASS


def test_limit_dressing_entries():
    D = limit_dressing(2, 0.4, 0.3)
    assert D.shape == (4, 4)
    assert D[0, 0] == pytest.approx(1)
    assert D[0, 2] == pytest.approx(-0.4)
    assert D[1, 0] == pytest.approx(-0.3j * np.sqrt(0.75))


def test_fit_gauge_recovers_dressing():
    RK = build_RK(3)
    fitted = fit_gauge(1.7 * limit_dressing(3, 0.4, 0.3) * RK, RK, 3)
    assert fitted["deviation"] <= 1e-9
    assert len(fitted["phase_exponents"]) == 3
    with pytest.raises(ConstraintError):
        fit_gauge(np.zeros((9, 9)), RK, 3)
