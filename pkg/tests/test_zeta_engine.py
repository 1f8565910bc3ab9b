import math

import mpmath as mp
import numpy as np
import pytest

from kinkzeta.classical import FluctuationCase
from kinkzeta.resolvent import eval_diag_green, solve_PQ
from kinkzeta.special_fn import DomainError, elliptic_E, elliptic_K
from kinkzeta.zeta_engine import (
    ConvergenceError,
    HeatTrace,
    PoleError,
    bromwich_terms,
    delta_epsilon,
    dimension_lift,
    gamma_hat,
    gamma_t_bromwich,
    gamma_t_closed,
    mellin_zeta,
    mellin_zeta_prime0,
    period_moments,
    periodic_zeta_numeric,
    phi4_kink_trace,
    sg_kink_trace,
    vacuum_trace,
    zeta_background,
    zeta_closed_sg_kink,
    zeta_closed_sg_kink_prime0,
)


def test_gamma_hat_A():
    A = FluctuationCase("A", 1.0)
    assert gamma_hat(A, 1.0) == pytest.approx(1 / math.sqrt(2), rel=1e-14)
    assert gamma_hat(A, 1e-6) * 1e-6 == pytest.approx(1.0, rel=1e-5)
    b = 1.7
    assert gamma_hat(FluctuationCase("A", b), 0.4) == pytest.approx(b / (0.4 * math.sqrt(0.4 + b * b)), rel=1e-14)


def test_gamma_hat_D_quadrature():
    case = FluctuationCase("D", 1.0, 0.6)
    res = solve_PQ(case)
    val = float(mp.quad(lambda x: eval_diag_green(res, 1.0, float(x)), [0, case.period]))
    assert gamma_hat(case, 1.0, vacuum_subtracted=False) == pytest.approx(val, rel=1e-8)


def test_period_moments():
    k = 0.6
    m = period_moments(k)
    K, E = elliptic_K(k), elliptic_E(k)
    assert m.I0 == pytest.approx(K)
    assert m.I1 == pytest.approx((K - E) / k**2, rel=1e-13)
    assert m.I2 == pytest.approx(((2 + k * k) * K - 2 * (1 + k * k) * E) / (3 * k**4), rel=1e-12)
    assert m.I2 <= m.I1 <= m.I0
    assert period_moments(1e-4).I1 == pytest.approx(math.pi / 4, rel=1e-7)
    for k in (0.05, 0.2, 0.9):
        mm = period_moments(k)
        i1 = float(mp.quad(lambda x: mp.ellipfun("sn", x, m=k * k) ** 2, [0, mp.ellipk(k * k)]))
        assert mm.I1 == pytest.approx(i1, rel=1e-12)


def test_bromwich_A_is_erf():
    for b in (1.0, 1.7):
        A = FluctuationCase("A", b)
        ts = np.geomspace(0.1, 10, 25)
        ref = np.array([math.erf(b * math.sqrt(t)) for t in ts])
        assert np.max(np.abs(gamma_t_bromwich(A, ts) - ref)) <= 1e-8


def test_bromwich_C_closed():
    C = FluctuationCase("C", 1.0)
    ts = np.geomspace(0.1, 10, 15)
    assert np.max(np.abs(gamma_t_bromwich(C, ts) - gamma_t_closed(C, ts))) <= 1e-8


def test_residue_census():
    assert len(bromwich_terms(FluctuationCase("A", 1.0))) == 1
    poles = sorted(p for p, _ in bromwich_terms(FluctuationCase("C", 1.0)))
    assert poles == pytest.approx([-3.0, 0.0])


def test_gamma_closed_examples():
    A = FluctuationCase("A", 1.0)
    assert gamma_t_closed(A, 1.0) == pytest.approx(0.842701, abs=1e-6)
    assert gamma_t_closed(A, 400.0) == pytest.approx(1.0, abs=1e-15)
    g = gamma_t_closed(A, np.linspace(0.01, 20, 200))
    assert np.all((g >= 0) & (g <= 1)) and np.all(np.diff(g) > 0)
    with pytest.raises(DomainError):
        gamma_t_closed(FluctuationCase("B", 1.0, 0.5), 1.0)


def test_dimension_lift():
    tr = sg_kink_trace(1.0)
    assert dimension_lift(tr, 1) is tr
    assert dimension_lift(tr, 3)(1.0) == pytest.approx(tr(1.0) / (4 * math.pi), rel=1e-15)
    free = HeatTrace("vacuum", 1, "closed_exp", evaluate=lambda t: (4 * math.pi * t) ** -0.5)
    for d in (2, 3, 4):
        t = 0.37
        assert dimension_lift(free, d)(t) == pytest.approx((4 * math.pi * t) ** (-d / 2), rel=1e-14)


def test_zeta_examples():
    for m in (0.5, 1.0, 3.0):
        assert zeta_closed_sg_kink(0.0, 1, m) == pytest.approx(-1.0, abs=1e-15)
        assert mellin_zeta(sg_kink_trace(m), 0.0) == pytest.approx(-1.0, abs=1e-12)
    assert zeta_closed_sg_kink(0.0, 3, 1.0) == 0.0
    assert zeta_closed_sg_kink(0.0, 2, 1.0) == pytest.approx(1 / math.pi, rel=1e-14)
    assert mellin_zeta_prime0(sg_kink_trace(1.0))[1] == pytest.approx(2 * math.log(2), abs=1e-8)


def test_zeta_closed_vs_mpmath_mellin():
    # zeta(s) for 0 < s: 1/Gamma(s) [int_0^1 erf t^(s-1) + int_1^inf (erf - 1) t^(s-1) - 1/s]
    m, s = 1.3, 0.4
    f = lambda t: mp.erf(m * mp.sqrt(t))
    val = (mp.quad(lambda t: f(t) * t ** (s - 1), [0, 1]) + mp.quad(lambda t: (f(t) - 1) * t ** (s - 1), [1, mp.inf]) - 1 / s) / mp.gamma(s)
    assert zeta_closed_sg_kink(s, 1, m) == pytest.approx(float(val), rel=1e-10)


def test_zeta_C_vs_mpmath_mellin():
    b, s = 1.0, 0.4
    f = lambda t: mp.erf(2 * b * mp.sqrt(t)) + mp.exp(-3 * b * b * t) * mp.erf(b * mp.sqrt(t))
    val = (mp.quad(lambda t: f(t) * t ** (s - 1), [0, 1]) + mp.quad(lambda t: (f(t) - 1) * t ** (s - 1), [1, mp.inf]) - 1 / s) / mp.gamma(s)
    assert mellin_zeta(phi4_kink_trace(b), s) == pytest.approx(float(val), rel=1e-9)


def test_background_vs_mellin():
    val = mellin_zeta(dimension_lift(vacuum_trace(1.0), 3), 0.3)
    assert val == pytest.approx(zeta_background(0.3, 3, 1.0), rel=1e-6)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
def test_dual_path(d, m):
    r = delta_epsilon(d, m)
    assert r.discrepancy <= 1e-5
    assert r.closed.delta_eps == -0.5 * r.closed.zeta_prime0
    expected = {1: -math.log(2 * m), 2: m / math.pi * (math.log(m) - 1), 3: m * m / (4 * math.pi)}[d]
    assert r.closed.delta_eps == pytest.approx(expected, abs=1e-12)


def test_M_dependence():
    for d in (1, 2, 3):
        M = 2.5
        r1 = delta_epsilon(d, 0.8, 1.0)
        rM = delta_epsilon(d, 0.8, M)
        # delta_eps = -zeta'(0)/2 and zeta(s) carries M^(2s): shift is -zeta(0) ln M
        assert rM.closed.delta_eps - r1.closed.delta_eps == pytest.approx(-r1.closed.zeta0 * math.log(M), abs=1e-8)
        assert rM.numeric.delta_eps - r1.numeric.delta_eps == pytest.approx(-r1.numeric.zeta0 * math.log(M), abs=1e-8)


def test_d4_pole():
    with pytest.raises(PoleError):
        zeta_closed_sg_kink(0.5, 2, 1.0)
    with pytest.raises(DomainError):
        delta_epsilon(5, 1.0)


def test_convergence_error():
    with pytest.raises(ConvergenceError):
        mellin_zeta(sg_kink_trace(1.0), -5.0)


def test_background_flag():
    r = delta_epsilon(1, 1.0, include_background=True)
    assert r.background is not None
    assert delta_epsilon(1, 1.0).background is None


def test_periodic_self_convergence():
    D = FluctuationCase("D", 1.0, 0.6)
    a = periodic_zeta_numeric(D, s_grid=(0.3,))
    b = periodic_zeta_numeric(D, s_grid=(0.3,), nodes=900, t_points=600)
    assert math.isfinite(a.zeta_prime0)
    assert abs(a.zeta_prime0 / b.zeta_prime0 - 1) <= 1e-3
    assert abs(a.zeta[0] / b.zeta[0] - 1) <= 1e-3
    assert a.provenance["reference_value"] == "none"


def test_periodic_trend_towards_kink():
    kink = 2 * math.log(2)
    errs = [abs(periodic_zeta_numeric(FluctuationCase("B", 1.0, k)).zeta_prime0 / kink - 1) for k in (0.99, 0.999, 0.9999)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 2e-3


def test_periodic_literal_trend_at_099():
    kink = 2 * math.log(2)
    val = periodic_zeta_numeric(FluctuationCase("B", 1.0, 0.99)).zeta_prime0
    assert abs(val / kink - 1) <= 0.05


def test_periodic_rejects():
    with pytest.raises(DomainError):
        periodic_zeta_numeric(FluctuationCase("A", 1.0))
    with pytest.raises(ConvergenceError):
        periodic_zeta_numeric(FluctuationCase("B", 1.0, 0.5))


def test_closed_prime0_matches_difference():
    for d in (1, 2, 3):
        z0, zp = zeta_closed_sg_kink_prime0(d, 1.3, 1.1)
        h = 1e-5
        num = (zeta_closed_sg_kink(h, d, 1.3, 1.1) - zeta_closed_sg_kink(-h, d, 1.3, 1.1)) / (2 * h)
        assert zp == pytest.approx(num, rel=1e-7)
