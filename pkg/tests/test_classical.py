import math

import mpmath as mp
import numpy as np
import pytest

from kinkzeta import classical as cl
from kinkzeta.special_fn import DomainError, elliptic_E, elliptic_K

XS = np.linspace(-10, 10, 401)


def families():
    return [
        cl.make_family("sg", "kink", 1.0, 1.0),
        cl.make_family("sg", "antikink", 1.3, 0.7),
        cl.make_family("sg", "periodic", 1.0, 1.0, 0.6),
        cl.make_family("sg", "periodic", 0.8, 2.0, 0.95),
        cl.make_family("phi4", "kink", 1.0, 1.0),
        cl.make_family("phi4", "kink", math.sqrt(2), 2.0),
        cl.make_family("phi4", "periodic", 1.0, 1.0, 0.6),
        cl.make_family("phi4", "periodic", 1.2, 0.5, 0.3),
    ]


def test_params_validation():
    with pytest.raises(DomainError):
        cl.ModelParams("sg", -1.0, 1.0)
    with pytest.raises(DomainError):
        cl.make_family("sg", "periodic", 1.0, 1.0, None)
    with pytest.raises(DomainError):
        cl.make_family("phi4", "periodic", 1.0, 1.0, 1.5)


@pytest.mark.parametrize("fam", families(), ids=lambda f: f"{f.params.model.value}-{f.kind.value}-{f.k}")
def test_eom_residual(fam):
    assert np.max(cl.eom_residual(fam, XS)) <= 1e-6


def test_vacuum_residual_exact():
    fam = cl.make_family("phi4", "vacuum", 1.0, 1.0)
    assert np.all(cl.eom_residual(fam, XS) == 0.0)


@pytest.mark.parametrize("fam", families(), ids=lambda f: f"{f.params.model.value}-{f.kind.value}-{f.k}")
def test_first_integral_conserved(fam):
    phi = cl.profile(fam, XS)
    dphi = cl.profile_derivative(fam, XS)
    c = 0.5 * dphi**2 - cl.potential(fam.params, phi) - fam.W
    assert np.max(np.abs(c)) <= 1e-8


def test_W_examples():
    assert cl.make_family("sg", "kink", 1.0, 1.0).W == 0.0
    assert cl.make_family("sg", "periodic", 1.0, 1.0, 0.5).W == pytest.approx(-1.0, abs=1e-14)
    assert cl.make_family("phi4", "periodic", 1.0, 1.0, 1.0).W == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9])
def test_W_bounds(k):
    for model in ("sg", "phi4"):
        fam = cl.make_family(model, "periodic", 1.1, 0.9, k)
        assert cl.W_lower_bound(fam.params) < fam.W < 0


def test_W_lower_bound_is_minus_V_at_maximum():
    p = cl.ModelParams("phi4", 1.3, 0.8)
    assert cl.W_lower_bound(p) == pytest.approx(-cl.potential(p, 0.0), rel=1e-15)
    p = cl.ModelParams("sg", 1.3, 0.8)
    assert cl.W_lower_bound(p) == pytest.approx(-cl.potential(p, 0.0), rel=1e-15)


def test_phi4_kink_limits():
    fam = cl.make_family("phi4", "kink", math.sqrt(2), 2.0)
    assert cl.profile(fam, 0.0) == 0.0
    assert cl.profile(fam, 40.0) == pytest.approx(1.0, abs=1e-14)


def test_phi4_periodic_k1_is_kink():
    kink = cl.make_family("phi4", "kink", 1.0, 1.0)
    per = cl.make_family("phi4", "periodic", 1.0, 1.0, 1.0)
    assert np.max(np.abs(cl.profile(kink, XS) - cl.profile(per, XS))) <= 1e-10


def test_sg_kink_amplitude():
    p = cl.ModelParams("sg", 1.0, 1.0)
    fam = cl.make_family("sg", "kink", 1.0, 1.0)
    jump = cl.profile(fam, 50.0) - cl.profile(fam, -50.0)
    assert jump == pytest.approx(p.Phi, rel=1e-12)
    name, res = cl.select_sg_prefactor(p)
    assert name == "derived"
    assert res["derived"] < 1e-6 < min(res["printed_kink"], res["printed_periodic"])


def test_fluctuation_potential_examples():
    assert cl.fluctuation_potential(cl.FluctuationCase("C", 1.0), 0.0) == pytest.approx(-2.0)
    assert cl.fluctuation_potential(cl.FluctuationCase("A", 1.3), 60.0) == pytest.approx(1.69, abs=1e-12)
    d = cl.FluctuationCase("D", 1.0, 1.0)
    c = cl.FluctuationCase("C", 1.0)
    np.testing.assert_allclose(cl.fluctuation_potential(d, XS), cl.fluctuation_potential(c, XS), atol=1e-12)


@pytest.mark.parametrize("fam", families(), ids=lambda f: f"{f.params.model.value}-{f.kind.value}-{f.k}")
def test_fluctuation_potential_is_V2(fam):
    if fam.kind is cl.Kind.ANTIKINK:
        pytest.skip("same potential as the kink")
    case = cl.fluctuation_case(fam)
    vpp = cl.d2potential(fam.params, cl.profile(fam, XS))
    assert np.max(np.abs(vpp - cl.fluctuation_potential(case, XS))) <= 1e-10


def test_case_invariants():
    m, k = 1.7, 0.6
    assert cl.fluctuation_case(cl.make_family("sg", "kink", m, 1.0)).b == m
    assert cl.fluctuation_case(cl.make_family("phi4", "kink", m, 1.0)).b == pytest.approx(m / math.sqrt(2))
    assert cl.fluctuation_case(cl.make_family("phi4", "periodic", m, 1.0, k)).b == pytest.approx(m / math.sqrt(1 + k * k))
    D = cl.FluctuationCase("D", 2.0, k)
    assert (D.u0, D.u1) == pytest.approx(((5 * k * k - 1) * 4, -6 * k * k * 4))


def test_energy_sg_kink():
    e = cl.classical_energy(cl.make_family("sg", "kink", 1.0, 1.0))
    assert e.closed_form == 16.0
    # phi' = c sech(x), c = 2 sqrt(2/3): E = int phi'^2 = 2 c^2
    assert e.quadrature == pytest.approx(16.0 / 3.0, rel=1e-10)
    assert e.closed_form_corrected == pytest.approx(e.quadrature, rel=1e-10)


def test_energy_phi4_kink():
    e = cl.classical_energy(cl.make_family("phi4", "kink", 1.0, 1.0))
    assert e.quadrature == pytest.approx(2 * math.sqrt(2) / 3, rel=1e-9)


def test_energy_sg_periodic_mpmath():
    k, m, g = 0.6, 1.0, 1.0
    fam = cl.make_family("sg", "periodic", m, g, k)
    c = 2 * m * math.sqrt(2 / (3 * g))
    W = fam.W
    K = float(mp.ellipk(k * k))
    # phi' = c k m cn(mx), density = phi'^2 - W
    oracle = 2 * float(mp.quad(lambda x: (c * k * m * mp.ellipfun("cn", m * x, m=k * k)) ** 2 - W, [0, K / m]))
    e = cl.classical_energy(fam)
    assert e.quadrature == pytest.approx(oracle, rel=1e-10)
    assert e.closed_form_corrected == pytest.approx(oracle, rel=1e-10)
    kp2 = 1 - k * k
    assert e.closed_form == pytest.approx(8 * m**2 / g * (kp2 * elliptic_K(k) + 2 * elliptic_E(k)))


def test_energy_periodic_to_kink():
    kink = cl.classical_energy(cl.make_family("sg", "kink", 1.0, 1.0)).quadrature
    e = cl.classical_energy(cl.make_family("sg", "periodic", 1.0, 1.0, 0.999999))
    assert e.quadrature == pytest.approx(kink, rel=1e-6)
    assert cl.classical_energy(cl.make_family("sg", "periodic", 1.0, 1.0, 1 - 1e-12)).closed_form == pytest.approx(16.0, rel=1e-9)


def test_energy_vacuum_rejected():
    with pytest.raises(DomainError):
        cl.classical_energy(cl.make_family("sg", "vacuum", 1.0, 1.0))


def test_profile_table_columns():
    rows = cl.profile_table(cl.make_family("sg", "kink", 1.0, 1.0), [0.0, 1.0])
    assert len(rows) == 2 and len(rows[0]) == 5
    assert rows[0][1] == 0.0
