import math
import warnings

import numpy as np
import pytest

from kinkzeta.classical import FluctuationCase
from kinkzeta.resolvent import q_roots, solve_PQ
from kinkzeta.spectral_oracle import (
    Grid1D,
    TruncationWarning,
    band_edges,
    bloch_spectrum,
    dirichlet_grid,
    fd_spectrum,
    heat_trace_fd,
    kink_box_spectrum,
    wronskian_green,
)
from kinkzeta.special_fn import DomainError
from kinkzeta.zeta_engine import gamma_t_bromwich, gamma_t_closed


def test_free_box_literal_example():
    grid = Grid1D(0.0, math.pi, 2000, "dirichlet")
    ev = fd_spectrum(lambda x: 0.0 * x, grid, count=10).eigenvalues
    j = np.arange(1, 11)
    assert np.max(np.abs(ev / j**2 - 1)) <= 1e-5


def test_free_box_discrete_formula():
    grid = Grid1D(0.0, math.pi, 2000, "dirichlet")
    ev = fd_spectrum(lambda x: 0.0 * x, grid, count=10).eigenvalues
    h = grid.h
    j = np.arange(1, 11)
    exact = 4 / h**2 * np.sin(j * h / 2) ** 2
    np.testing.assert_allclose(ev, exact, rtol=1e-10)
    assert np.max(np.abs(ev[:6] / j[:6] ** 2 - 1)) <= 1e-5


def _sech2_bound(h):
    n = int(round(40 / h)) + 1
    ev = fd_spectrum(lambda x: -6 / np.cosh(np.clip(x, -300, 300)) ** 2, dirichlet_grid(20.0, n), count=2).eigenvalues
    return ev


def test_sech2_bound_states():
    ev = _sech2_bound(0.01)
    np.testing.assert_allclose(ev, [-4.0, -1.0], atol=1e-3)


def test_sech2_richardson_ratio():
    e1 = _sech2_bound(0.04) - np.array([-4.0, -1.0])
    e2 = _sech2_bound(0.02) - np.array([-4.0, -1.0])
    e3 = _sech2_bound(0.01) - np.array([-4.0, -1.0])
    # second-order scheme: errors shrink fourfold per halving of h
    np.testing.assert_allclose(e1 / e2, 4.0, rtol=0.02)
    np.testing.assert_allclose(e2 / e3, 4.0, rtol=0.02)


def test_band_edges_B():
    k = 0.6
    edges = band_edges(FluctuationCase("B", 1.0, k))
    np.testing.assert_allclose(edges, [-(1 - k * k), 0.0, k * k], atol=1e-3)


@pytest.mark.parametrize("cid", ["B", "D"])
@pytest.mark.parametrize("k", [0.3, 0.6, 0.9])
def test_band_edges_match_roots(cid, k):
    case = FluctuationCase(cid, 1.0, k)
    ref = sorted(-r for r in q_roots(solve_PQ(case)).all_roots)
    np.testing.assert_allclose(band_edges(case), ref, atol=1e-3)


def test_band_edges_degenerate_D():
    edges = band_edges(FluctuationCase("D", 1.0, 1.0))
    np.testing.assert_allclose(edges, [0.0, 3.0, 4.0], atol=1e-3)


def test_band_gap_closes_B():
    gaps = []
    for k in (0.9, 0.99, 0.999):
        e = band_edges(FluctuationCase("B", 1.0, k))
        gaps.append(e[1] - e[0])
    assert gaps[0] > gaps[1] > gaps[2]


def test_bloch_theta_zero_periodic_bottom():
    case = FluctuationCase("B", 1.0, 0.6)
    ev = bloch_spectrum(case, 0.0, count=1).eigenvalues
    assert ev[0] == pytest.approx(-(1 - 0.36), abs=1e-4)


def test_kink_box_C():
    ev = kink_box_spectrum(FluctuationCase("C", 1.0), count=2).eigenvalues
    np.testing.assert_allclose(ev, [0.0, 3.0], atol=1e-3)


def test_heat_trace_A():
    assert heat_trace_fd(FluctuationCase("A", 1.0), 1.0) == pytest.approx(math.erf(1.0), abs=1e-2)
    ts = np.linspace(0.2, 5, 25)
    g = heat_trace_fd(FluctuationCase("A", 1.0), ts)
    assert np.all(np.diff(g) > 0)
    assert heat_trace_fd(FluctuationCase("A", 1.0), 60.0) == pytest.approx(1.0, abs=1e-3)


def test_heat_trace_C_and_D():
    C = FluctuationCase("C", 1.0)
    assert heat_trace_fd(C, 2.0) == pytest.approx(gamma_t_bromwich(C, 2.0), abs=1e-2)
    assert heat_trace_fd(C, 2.0) == pytest.approx(gamma_t_closed(C, 2.0), abs=1e-2)
    D = FluctuationCase("D", 1.0, 0.6)
    assert heat_trace_fd(D, 2.0) == pytest.approx(gamma_t_bromwich(D, 2.0), abs=1e-2)


def test_heat_trace_truncation_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        heat_trace_fd(FluctuationCase("A", 1.0), 1.0, check_truncation=True)
    with pytest.warns(TruncationWarning):
        heat_trace_fd(FluctuationCase("A", 1.0), 1.0, half_width=1.5, n=600, check_truncation=True)


def test_heat_trace_domain():
    with pytest.raises(DomainError):
        heat_trace_fd(FluctuationCase("A", 1.0), -1.0)


def test_wronskian_constant():
    nu = 1.7
    for p in (0.1, 1.0, 5.0):
        assert wronskian_green(lambda x: nu + 0.0 * x, p, 0.3) == pytest.approx(1 / (2 * math.sqrt(p + nu)), rel=1e-8)


def test_wronskian_examples():
    assert wronskian_green(FluctuationCase("A", 1.0), 1.0, 0.0) == pytest.approx(0.707107, abs=1e-6)
    assert wronskian_green(FluctuationCase("C", 1.0), 1.0, 0.0) == pytest.approx(0.894427, abs=1e-6)


def test_grid_validation():
    with pytest.raises(DomainError):
        fd_spectrum(np.zeros(5), Grid1D(0.0, 1.0, 10, "dirichlet"))
