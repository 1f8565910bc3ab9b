"""Closed-form diagonal resolvents of L = -d^2/dx^2 + u(x) for the four cases.

The diagonal of the resolvent kernel of L + p has the form

    G(p, x) = P(p, z(x)) / (2 sqrt(Q(p)))

with P monic of degree n in p and Q monic of degree 2n + 1.  P and Q are
found in exact rational arithmetic at b = 1 with kappa = k^2 kept symbolic;
the scale b enters through G_b(p, x) = G_1(p / b^2, b x) / b.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .classical import GAP_COUNT, FluctuationCase, z_of_x
from .exact_poly import (
    ONE,
    P as PVAR,
    RationalPoly,
    solve_exact_linear,
)
from .special_fn import DomainError

__all__ = [
    "BranchError",
    "ExactRoot",
    "BranchData",
    "DiagonalResolvent",
    "solve_PQ",
    "exact_PQ",
    "bilinear_defect",
    "q_roots",
    "exact_roots",
    "eval_diag_green",
    "green_complex",
    "sqrt_Q",
    "hermite_residual",
    "hermite_residual_constant",
    "split_constant_kink",
    "resolvent_json",
    "exact_kappa",
]


class BranchError(DomainError):
    """Spectral parameter lies on (or below) the branch cuts of sqrt(Q)."""


# ---------------------------------------------------------------------------
# exact solver


def _L_operator(F: RationalPoly, rho: RationalPoly, u: RationalPoly) -> RationalPoly:
    # F_xxx - 4 u F_x - 2 u_x F written in z, with the common factor z_x removed
    d1 = F.diff_z()
    d2 = d1.diff_z()
    d3 = d2.diff_z()
    r1 = rho.diff_z()
    r2 = r1.diff_z()
    return 4 * rho * d3 + 6 * r1 * d2 + 2 * r2 * d1 - 4 * u * d1 - 2 * u.diff_z() * F


class _Affine:
    """Polynomial that depends affinely on named unknown scalars."""

    def __init__(self, parts: Dict[Optional[str], RationalPoly]):
        self.parts = {k: v for k, v in parts.items() if not v.is_zero()}

    def map(self, f: Callable[[RationalPoly], RationalPoly]) -> "_Affine":
        return _Affine({k: f(v) for k, v in self.parts.items()})

    def __add__(self, other: "_Affine") -> "_Affine":
        out = dict(self.parts)
        for k, v in other.parts.items():
            out[k] = out.get(k, RationalPoly()) + v
        return _Affine(out)

    def substitute(self, values: Dict[str, Fraction]) -> RationalPoly:
        total = self.parts.get(None, RationalPoly())
        for k, v in self.parts.items():
            if k is not None:
                total = total + v * values[k]
        return total


def bilinear_defect(P: RationalPoly, Q: RationalPoly, rho: RationalPoly, u: RationalPoly) -> RationalPoly:
    """rho (2 P P'' - P'^2) + rho' P P' - (p + u) P^2 + Q at b = 1 (zero for a solution)."""
    d1 = P.diff_z()
    d2 = d1.diff_z()
    return rho * (2 * P * d2 - d1 * d1) + rho.diff_z() * P * d1 - (PVAR + u) * P * P + Q


@lru_cache(maxsize=None)
def exact_PQ(case_id: str) -> Tuple[RationalPoly, RationalPoly]:
    """Exact (P, Q) at b = 1 with kappa symbolic.

    P = sum_j P_j p^(n-j) solves the linearised third-order equation for the
    resolvent diagonal, which gives P_{j+1}' = L(P_j)/4 in z; each step leaves
    an integration constant c_j, a polynomial in kappa with unknown rational
    coefficients.  The termination condition L(P_n) = 0 must hold identically
    in (z, kappa) and fixes every unknown.  Q then follows from the bilinear
    identity and must come out independent of z.
    """
    cid = case_id.upper()
    n = GAP_COUNT[cid]
    rho = FluctuationCase.exact_rho(cid)
    u = FluctuationCase.exact_u(cid)

    levels: List[_Affine] = [_Affine({None: ONE})]
    unknowns: List[str] = []
    for j in range(1, n + 1):
        prev = levels[-1]
        nxt = prev.map(lambda F: _L_operator(F, rho, u).integrate_z() * Fraction(1, 4))
        consts = {}
        for r in range(2 * j + 1):
            name = f"c{j}_{r}"
            unknowns.append(name)
            consts[name] = RationalPoly.monomial(kappa=r)
        levels.append(nxt + _Affine(consts))

    last = levels[-1].map(lambda F: _L_operator(F, rho, u))
    # one equation per (z, kappa) monomial
    monos = set()
    for v in last.parts.values():
        monos.update(v.terms)
    equations = []
    for mono in sorted(monos):
        eq = {}
        for name, v in last.parts.items():
            c = v.terms.get(mono)
            if c:
                eq[name] = c
        equations.append(eq)
    sol = solve_exact_linear(equations, unknowns)

    P = RationalPoly()
    for j, lev in enumerate(levels):
        P = P + lev.substitute(sol) * PVAR ** (n - j)

    d1 = P.diff_z()
    d2 = d1.diff_z()
    Q = (PVAR + u) * P * P - rho * (2 * P * d2 - d1 * d1) - rho.diff_z() * P * d1
    if Q.degree("z") > 0:
        raise ArithmeticError(f"case {cid}: Q depends on z; ansatz does not close")
    if Q.degree("p") != 2 * n + 1 or Q.coeff(p=2 * n + 1) != 1:
        raise ArithmeticError(f"case {cid}: Q is not monic of degree {2 * n + 1}")
    if not bilinear_defect(P, Q, rho, u).is_zero():
        raise ArithmeticError(f"case {cid}: bilinear identity fails")
    return P, Q


def exact_kappa(k: Optional[float]) -> Fraction:
    """kappa = k^2 as an exact rational, reading k through its shortest decimal repr."""
    if k is None:
        return Fraction(1)
    return Fraction(repr(float(k))) ** 2


# ---------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class ExactRoot:
    """a + c sqrt(d) with rational a, c, d."""

    a: Fraction
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __float__(self):
        return float(self.a) + float(self.c) * math.sqrt(float(self.d))

    def __str__(self):
        if self.c == 0 or self.d == 0:
            return str(self.a)
        sign = "-" if self.c < 0 else "+"
        rad = f"sqrt({self.d})"
        mag = abs(self.c)
        tail = rad if mag == 1 else f"{mag}*{rad}"
        if self.a == 0:
            return ("-" if sign == "-" else "") + tail
        return f"{self.a} {sign} {tail}"


def _univariate(Q: RationalPoly, kappa: Fraction) -> List[Fraction]:
    """Coefficients of Q(p) at fixed kappa, highest power first."""
    q = Q.subs(kappa=kappa)
    deg = q.degree("p")
    return [q.coeff(p=j) for j in range(deg, -1, -1)]


def _eval_exact(coeffs: List[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _deflate(coeffs: List[Fraction], r: Fraction) -> List[Fraction]:
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + out[-1] * r)
    return out


def _simplify_surd(d: Fraction) -> Tuple[Fraction, Fraction]:
    """Write sqrt(d) as c * sqrt(r) with r a square-free integer where feasible."""
    n = d.numerator * d.denominator
    c = Fraction(1, d.denominator)
    f = 2
    while f * f <= n and f < 10**6:
        while n % (f * f) == 0:
            n //= f * f
            c *= f
        f += 1
    return c, Fraction(n)


def exact_roots(Q: RationalPoly, kappa: Fraction) -> List[ExactRoot]:
    """All roots of Q(p) at rational kappa, with multiplicity, ascending.

    Rational roots are located numerically, confirmed exactly and deflated;
    what remains (degree <= 2 for the cases at hand) is solved in closed form.
    """
    coeffs = _univariate(Q, kappa)
    found: List[ExactRoot] = []
    while len(coeffs) > 1:
        if coeffs[-1] == 0:
            found.append(ExactRoot(Fraction(0)))
            coeffs = coeffs[:-1]
            continue
        hit = None
        for z in np.roots([float(c) for c in coeffs]):
            if abs(z.imag) > 1e-6 * max(1.0, abs(z)):
                continue
            for den in (1, 4, 25, 100, 10**4, 10**6):
                cand = Fraction(z.real).limit_denominator(den)
                if _eval_exact(coeffs, cand) == 0:
                    hit = cand
                    break
            if hit is not None:
                break
        if hit is None:
            break
        found.append(ExactRoot(hit))
        coeffs = _deflate(coeffs, hit)

    deg = len(coeffs) - 1
    if deg == 1:
        found.append(ExactRoot(-coeffs[1] / coeffs[0]))
    elif deg == 2:
        a, b, c = coeffs
        disc = (b * b - 4 * a * c) / (4 * a * a)
        if disc < 0:
            raise ArithmeticError("complex roots of Q")
        scale, rad = _simplify_surd(disc)
        found.append(ExactRoot(-b / (2 * a), -scale, rad))
        found.append(ExactRoot(-b / (2 * a), scale, rad))
    elif deg > 2:
        # irreducible cubic or worse: numeric roots rendered as floats
        for z in np.roots([float(c) for c in coeffs]):
            found.append(ExactRoot(Fraction(float(z.real))))
    return sorted(found, key=float)


@dataclass(frozen=True)
class BranchData:
    roots: Tuple[float, ...]
    multiplicities: Tuple[int, ...]

    @property
    def all_roots(self) -> Tuple[float, ...]:
        out = []
        for r, m in zip(self.roots, self.multiplicities):
            out.extend([r] * m)
        return tuple(out)

    @property
    def top(self) -> float:
        return self.roots[-1]

    @property
    def double_roots(self) -> Tuple[float, ...]:
        return tuple(r for r, m in zip(self.roots, self.multiplicities) if m >= 2)

    @property
    def simple_roots(self) -> Tuple[float, ...]:
        return tuple(r for r, m in zip(self.roots, self.multiplicities) if m % 2 == 1)


def _group(roots: List[ExactRoot]) -> Tuple[List[ExactRoot], List[int]]:
    distinct: List[ExactRoot] = []
    mult: List[int] = []
    for r in roots:
        if distinct and distinct[-1] == r:
            mult[-1] += 1
        else:
            distinct.append(r)
            mult.append(1)
    return distinct, mult


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class DiagonalResolvent:
    """Exact resolvent data for one fluctuation operator.

    ``P`` and ``Q`` are stored at b = 1 with kappa symbolic; ``b`` and ``k``
    select the numeric member of the family.
    """

    case: FluctuationCase
    n: int
    P: RationalPoly
    Q: RationalPoly

    @property
    def case_id(self) -> str:
        return self.case.case_id

    @property
    def b(self) -> float:
        return self.case.b

    @property
    def k(self) -> Optional[float]:
        return self.case.k

    @property
    def kappa_exact(self) -> Fraction:
        return exact_kappa(self.k)

    def exact_unit_roots(self) -> List[ExactRoot]:
        return _exact_unit_roots(self.Q, self.kappa_exact)

    def branch(self) -> BranchData:
        return _unit_branch(self.Q, self.kappa_exact)

    def P_float(self) -> Dict[Tuple[int, int], float]:
        return _p_table(self.P, self.kappa_exact)

    def Q_coefficients(self) -> List[float]:
        """(q_{2n}, ..., q_0) at the instance scale b."""
        b2 = self.b**2
        coeffs = _univariate(self.Q, self.kappa_exact)
        return [float(c) * b2 ** (j) for j, c in enumerate(coeffs)][1:]

    def at_scale(self, kappa: Fraction, b2: Fraction) -> Tuple[RationalPoly, RationalPoly]:
        """Exact P(p, z) and Q(p) at rational kappa and b^2."""
        n = self.n
        P = self.P.subs(kappa=kappa)
        Q = self.Q.subs(kappa=kappa)
        P = RationalPoly({(a, d, 0): c * b2 ** (n - d) for (a, d, _), c in P.terms.items()})
        Q = RationalPoly({(a, d, 0): c * b2 ** (2 * n + 1 - d) for (a, d, _), c in Q.terms.items()})
        return P, Q


@lru_cache(maxsize=256)
def _exact_unit_roots(Q: RationalPoly, kappa: Fraction) -> List[ExactRoot]:
    return exact_roots(Q, kappa)


@lru_cache(maxsize=256)
def _unit_branch(Q: RationalPoly, kappa: Fraction) -> BranchData:
    distinct, mult = _group(exact_roots(Q, kappa))
    return BranchData(tuple(float(r) for r in distinct), tuple(mult))


@lru_cache(maxsize=256)
def _p_table(P: RationalPoly, kappa: Fraction) -> Dict[Tuple[int, int], float]:
    return P.subs(kappa=kappa).to_float_table(0.0)


def solve_PQ(case: FluctuationCase) -> DiagonalResolvent:
    P, Q = exact_PQ(case.case_id)
    return DiagonalResolvent(case, case.n_gaps, P, Q)


def q_roots(res: DiagonalResolvent) -> BranchData:
    """Roots of Q at the instance's b and k, ascending, with multiplicities."""
    unit = res.branch()
    b2 = res.b**2
    return BranchData(tuple(r * b2 for r in unit.roots), unit.multiplicities)


def sqrt_Q(res: DiagonalResolvent, p) -> complex:
    """sqrt(Q(p)) on the principal sheet at b = 1, continued to p + i0 on the cuts."""
    unit = res.branch()
    p = complex(p)
    if p.imag == 0.0:
        p = complex(p.real, 0.0)
    acc = 1.0 + 0.0j
    for r, m in zip(unit.roots, unit.multiplicities):
        w = p - r
        acc *= w ** (m // 2)
        if m % 2:
            acc *= cmath.sqrt(w)
    return acc


def _P_value(table, p, z):
    total = 0.0
    for (a, d), c in table.items():
        total = total + c * z**a * p**d
    return total


def green_complex(res: DiagonalResolvent, p, x):
    """G(p, x) for complex p (real p inside a band is read as p + i0)."""
    b = res.b
    pu = complex(p) / b**2
    z = z_of_x(res.case, x)
    num = _P_value(res.P_float(), pu, z)
    return num / (2.0 * sqrt_Q(res, pu)) / b


def eval_diag_green(res: DiagonalResolvent, p: float, x):
    """Real diagonal Green function on the principal branch (p above every root of Q)."""
    p = float(p)
    top = q_roots(res).top
    if not p > top:
        raise BranchError(f"p = {p} is not above the spectrum image (top root {top})")
    b = res.b
    pu = p / b**2
    z = z_of_x(res.case, x)
    num = _P_value(res.P_float(), pu, z)
    den = 1.0
    unit = res.branch()
    for r, m in zip(unit.roots, unit.multiplicities):
        den *= (pu - r) ** (0.5 * m)
    return num / (2.0 * den) / b


_D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_D2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])


def hermite_residual(case: FluctuationCase, p: float, x: float, h: float = 0.01) -> float:
    """|2 G G'' - G'^2 - 4 (u + p) G^2 + 1| with 8th-order x-derivatives."""
    res = solve_PQ(case)
    offs = np.arange(-4, 5) * h
    g = np.array([green_complex(res, p, x + o) for o in offs])
    G = g[4]
    G1 = np.dot(_D1, g) / h
    G2 = np.dot(_D2, g) / (h * h)
    u = case.u0 + case.u1 * z_of_x(case, x)
    return float(abs(2 * G * G2 - G1 * G1 - 4.0 * (u + p) * G * G + 1.0))


def hermite_residual_constant(nu: float, p: float, sign: int = 1) -> float:
    """Residual for G = 1/(2 sqrt(p + nu)) with the (u + sign * p) convention."""
    G = 1.0 / (2.0 * math.sqrt(p + nu))
    return abs(-4.0 * (nu + sign * p) * G * G + 1.0)


def split_constant_kink(res: DiagonalResolvent):
    """(G_c, G_k) for case A: constant-background part and localised kink part."""
    if res.case_id != "A":
        raise DomainError("split applies to case A only")
    b = res.b

    def G_c(p):
        return 1.0 / (2.0 * math.sqrt(p + b * b))

    def G_k(p, x):
        z = z_of_x(res.case, x)
        return b * b * z / (2.0 * p * math.sqrt(p + b * b))

    return G_c, G_k


def resolvent_json(res: DiagonalResolvent, b2: Optional[Fraction] = None) -> str:
    """JSON with exact P, Q and roots of Q at the instance's kappa and b^2."""
    kappa = res.kappa_exact
    if b2 is None:
        b2 = Fraction(repr(res.b)) ** 2
    P, Q = res.at_scale(kappa, b2)
    roots = [
        ExactRoot(r.a * b2, r.c * b2, r.d) for r in res.exact_unit_roots()
    ]
    doc = {
        "case": res.case_id,
        "kappa": str(kappa),
        "b2": str(b2),
        "P": str(P),
        "Q": str(Q),
        "roots": [str(r) for r in roots],
    }
    return json.dumps(doc, indent=2, sort_keys=True)
