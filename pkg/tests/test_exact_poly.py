from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from kinkzeta.exact_poly import (
    KAPPA,
    ONE,
    P,
    Z,
    InconsistentSystem,
    RationalPoly,
    UnderdeterminedSystem,
    solve_exact_linear,
)
from kinkzeta.resolvent import exact_PQ

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)
exps = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2))
polys = st.dictionaries(exps, fractions, max_size=5).map(RationalPoly)
points = st.tuples(fractions, fractions, fractions)

zs, ps, ks = sp.symbols("z p kappa")


def to_sympy(a: RationalPoly):
    return sum(sp.Rational(c.numerator, c.denominator) * zs**i * ps**j * ks**l
               for (i, j, l), c in a.terms.items()) + sp.Integer(0)


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == RationalPoly()
    assert a * ONE == a


@settings(max_examples=60, deadline=None)
@given(polys, polys, points)
def test_evaluation_homomorphism(a, b, pt):
    z, p, k = pt
    assert (a * b).evaluate(z=z, p=p, kappa=k) == a.evaluate(z=z, p=p, kappa=k) * b.evaluate(z=z, p=p, kappa=k)


@settings(max_examples=25, deadline=None)
@given(polys, polys)
def test_matches_sympy(a, b):
    assert sp.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0
    assert sp.expand(to_sympy(a.diff_z()) - sp.diff(to_sympy(a), zs)) == 0
    assert sp.expand(to_sympy(a.integrate_z()).diff(zs) - to_sympy(a)) == 0


def test_no_zero_terms():
    a = Z + 1
    assert (a - a).terms == {}
    assert all(c != 0 for c in ((Z + 1) * (Z - 1)).terms.values())


def test_examples():
    assert str((Z + 1) * (Z + 1)) == "z^2 + 2*z + 1"
    assert (Z**3).diff_z() == 3 * Z**2
    rho = Z * (1 - Z) * (1 - KAPPA + KAPPA * Z)
    assert rho == (1 - KAPPA) * Z + (2 * KAPPA - 1) * Z**2 - KAPPA * Z**3
    assert rho.evaluate(z=2, kappa=3) == -8
    assert (P**2 + 3 * P * Z).extract_coeff(1) == 3 * Z


def test_extract_monic_QD():
    _, Q = exact_PQ("D")
    assert Q.extract_coeff(5) == ONE


def test_canonical_ordering():
    a = Z * KAPPA + P**2 + P * Z + 1
    assert str(a) == "p^2 + p*z + z*kappa + 1"


def test_subs_exact():
    a = P * Z + KAPPA**2
    assert a.subs(kappa=Fraction(1, 2)) == P * Z + Fraction(1, 4)


def test_solve_linear():
    assert solve_exact_linear([{"x": 2, None: -6}], ["x"]) == {"x": 3}
    sol = solve_exact_linear([{"x": 1, "y": 1, None: -1}, {"x": 1, "y": -1, None: -1}], ["x", "y"])
    assert sol == {"x": 1, "y": 0}


def test_solve_linear_errors():
    with pytest.raises(InconsistentSystem):
        solve_exact_linear([{"x": 1, None: -1}, {"x": 1, None: -2}], ["x"])
    with pytest.raises(UnderdeterminedSystem):
        solve_exact_linear([{"x": 1, "y": 1, None: -1}], ["x", "y"])


def test_case_B_first_coefficient():
    P_, _ = exact_PQ("B")
    assert P_.extract_coeff(0) == KAPPA * Z
