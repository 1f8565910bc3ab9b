"""Exact polynomials over the rationals in z, p and kappa = k^2.

A :class:`RationalPoly` is a sparse map from exponent triples
``(deg_z, deg_p, deg_kappa)`` to :class:`fractions.Fraction`.  Values are
immutable; every operation returns a new polynomial.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Tuple

Exponent = Tuple[int, int, int]

__all__ = [
    "RationalPoly",
    "InconsistentSystem",
    "UnderdeterminedSystem",
    "solve_exact_linear",
    "Z",
    "P",
    "KAPPA",
    "ONE",
]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


class RationalPoly:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, object] | None = None):
        clean: Dict[Exponent, Fraction] = {}
        for exp, c in (terms or {}).items():
            if len(exp) != 3 or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp}")
            c = _as_fraction(c)
            if c:
                clean[tuple(int(e) for e in exp)] = c
        self._terms = clean
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def const(cls, c) -> "RationalPoly":
        return cls({(0, 0, 0): c})

    @classmethod
    def monomial(cls, c=1, z: int = 0, p: int = 0, kappa: int = 0) -> "RationalPoly":
        return cls({(z, p, kappa): c})

    @staticmethod
    def _coerce(other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return other
        return RationalPoly.const(other)

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self, var: str) -> int:
        idx = {"z": 0, "p": 1, "kappa": 2}[var]
        if not self._terms:
            return -1
        return max(e[idx] for e in self._terms)

    def coeff(self, z: int = 0, p: int = 0, kappa: int = 0) -> Fraction:
        return self._terms.get((z, p, kappa), Fraction(0))

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return RationalPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: Dict[Exponent, Fraction] = {}
        for (a1, b1, c1), x in self._terms.items():
            for (a2, b2, c2), y in other._terms.items():
                e = (a1 + a2, b1 + b2, c1 + c2)
                out[e] = out.get(e, 0) + x * y
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus and substitution ------------------------------------
    def diff_z(self) -> "RationalPoly":
        return RationalPoly(
            {(a - 1, b, c): a * x for (a, b, c), x in self._terms.items() if a > 0}
        )

    def integrate_z(self) -> "RationalPoly":
        """Antiderivative in z with zero constant of integration."""
        return RationalPoly(
            {(a + 1, b, c): x / (a + 1) for (a, b, c), x in self._terms.items()}
        )

    def extract_coeff(self, deg_p: int) -> "RationalPoly":
        """Polynomial in (z, kappa) multiplying p**deg_p."""
        if deg_p < 0:
            raise ValueError("deg_p must be non-negative")
        return RationalPoly(
            {(a, 0, c): x for (a, b, c), x in self._terms.items() if b == deg_p}
        )

    def coefficient_map(self, var: str) -> Dict[int, "RationalPoly"]:
        """Split by powers of one variable: {power: remaining polynomial}."""
        idx = {"z": 0, "p": 1, "kappa": 2}[var]
        groups: Dict[int, Dict[Exponent, Fraction]] = {}
        for e, x in self._terms.items():
            rest = list(e)
            rest[idx] = 0
            groups.setdefault(e[idx], {})[tuple(rest)] = x
        return {k: RationalPoly(v) for k, v in groups.items()}

    def subs(self, z=None, p=None, kappa=None) -> "RationalPoly":
        """Substitute exact rational values for any subset of the variables."""
        vals = (z, p, kappa)
        vals = tuple(None if v is None else _as_fraction(v) for v in vals)
        out: Dict[Exponent, Fraction] = {}
        for e, x in self._terms.items():
            new_e = list(e)
            for i, v in enumerate(vals):
                if v is not None:
                    x = x * v ** e[i]
                    new_e[i] = 0
            key = tuple(new_e)
            out[key] = out.get(key, 0) + x
        return RationalPoly(out)

    def evaluate(self, z=0, p=0, kappa=0):
        """Evaluate at a point.  Exact if the arguments are rational, float otherwise."""
        total = 0
        for (a, b, c), x in self._terms.items():
            total = total + x * z**a * p**b * kappa**c
        return total

    def to_float_table(self, kappa) -> Dict[Tuple[int, int], float]:
        """Numeric coefficients {(deg_z, deg_p): value} at a given kappa."""
        out: Dict[Tuple[int, int], float] = {}
        for (a, b, c), x in self._terms.items():
            out[(a, b)] = out.get((a, b), 0.0) + float(x) * kappa**c
        return out

    # -- rendering ----------------------------------------------------
    def sorted_terms(self) -> Iterable[Tuple[Exponent, Fraction]]:
        # descending p, then z, then kappa
        return sorted(self._terms.items(), key=lambda t: (-t[0][1], -t[0][0], -t[0][2]))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (a, b, c), x in self.sorted_terms():
            factors = []
            for name, e in (("p", b), ("z", a), ("kappa", c)):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(x)
            if factors:
                body = "*".join(factors)
                if mag != 1:
                    body = f"{mag}*{body}"
            else:
                body = str(mag)
            sign = "-" if x < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"RationalPoly({self})"


ONE = RationalPoly.const(1)
Z = RationalPoly.monomial(z=1)
P = RationalPoly.monomial(p=1)
KAPPA = RationalPoly.monomial(kappa=1)


class InconsistentSystem(ArithmeticError):
    """Linear system has no solution."""


class UnderdeterminedSystem(ArithmeticError):
    """Linear system leaves some unknowns free."""


def solve_exact_linear(equations, unknowns=None) -> Dict[str, Fraction]:
    """Solve affine relations exactly.

    Each equation is a mapping ``{name: coefficient}`` where the key ``None``
    (or ``1``) holds the constant term; the relation is ``sum + const == 0``.
    Returns ``{name: Fraction}``.
    """
    eqs = []
    names = set()
    for eq in equations:
        row = {}
        const = Fraction(0)
        for key, c in eq.items():
            c = _as_fraction(c)
            if key is None or key == 1:
                const += c
            elif c:
                row[key] = row.get(key, 0) + c
                names.add(key)
        eqs.append((row, const))
    if unknowns is None:
        unknowns = sorted(names, key=str)
    else:
        unknowns = list(unknowns)
    index = {u: i for i, u in enumerate(unknowns)}
    n = len(unknowns)
    # augmented rows [a_0 .. a_{n-1} | rhs]
    rows = []
    for row, const in eqs:
        r = [Fraction(0)] * (n + 1)
        for key, c in row.items():
            if key not in index:
                raise KeyError(f"unknown {key!r} not declared")
            r[index[key]] = c
        r[n] = -const
        rows.append(r)

    pivot_cols = []
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        inv = 1 / pr[col]
        pr = [x * inv for x in pr]
        rows[rank] = pr
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivot_cols.append(col)
        rank += 1

    for i in range(rank, len(rows)):
        if rows[i][n] != 0:
            raise InconsistentSystem(f"equation {i} reduces to 0 = {rows[i][n]}")
    if rank < n:
        free = [unknowns[c] for c in range(n) if c not in pivot_cols]
        raise UnderdeterminedSystem(f"free unknowns: {free}")
    return {unknowns[c]: rows[i][n] for i, c in enumerate(pivot_cols)}
