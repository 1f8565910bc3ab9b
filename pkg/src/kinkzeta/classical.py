"""Static solutions of the sine-Gordon and phi^4 models.

Conventions
-----------
* The first integral is ``(phi')**2 = 2 V(phi) + 2 W``.
* phi^4 uses the non-negative form ``V = g/4 (phi^2 - m^2/g)^2`` so kinks
  have ``W = 0`` and energies need no further vacuum subtraction.
* sine-Gordon: ``V = 2 m^4/(3 g) (1 + cos(alpha phi))`` with
  ``alpha = sqrt(3 g / 2) / m``; the vacua sit at ``alpha phi = +-pi``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .exact_poly import KAPPA, ONE, Z, RationalPoly
from .special_fn import DomainError, elliptic_E, elliptic_K, jacobi_sn_cn_dn

__all__ = [
    "Model",
    "Kind",
    "ModelParams",
    "SolutionFamily",
    "FluctuationCase",
    "EnergyResult",
    "QuadratureError",
    "make_family",
    "first_integral_W",
    "W_lower_bound",
    "potential",
    "dpotential",
    "d2potential",
    "profile",
    "profile_derivative",
    "eom_residual",
    "sg_prefactor_candidates",
    "select_sg_prefactor",
    "fluctuation_case",
    "fluctuation_potential",
    "z_of_x",
    "classical_energy",
    "energy_density",
    "profile_table",
]


class Model(str, enum.Enum):
    SG = "sg"
    PHI4 = "phi4"


class Kind(str, enum.Enum):
    KINK = "kink"
    ANTIKINK = "antikink"
    PERIODIC = "periodic"
    VACUUM = "vacuum"


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelParams:
    model: Model
    m: float
    g: float

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if not (self.m > 0 and self.g > 0):
            raise DomainError(f"m and g must be positive (m={self.m}, g={self.g})")

    @property
    def alpha(self) -> float:
        """sine-Gordon field scale: V depends on cos(alpha * phi)."""
        return math.sqrt(1.5 * self.g) / self.m

    @property
    def Phi(self) -> float:
        """Topological period of the sine-Gordon field, 2 pi / alpha."""
        return 2.0 * math.pi * self.m * math.sqrt(2.0 / (3.0 * self.g))


@dataclass(frozen=True)
class SolutionFamily:
    params: ModelParams
    kind: Kind
    k: Optional[float] = None
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.PERIODIC:
            if self.k is None or not 0.0 < self.k <= 1.0:
                raise DomainError(f"periodic family needs 0 < k <= 1, got {self.k}")
        if self.kind is Kind.ANTIKINK:
            object.__setattr__(self, "sign", -1)
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")

    @property
    def W(self) -> float:
        return first_integral_W(self)

    @property
    def Phi(self) -> float:
        return self.params.Phi

    @property
    def b(self) -> float:
        """Spatial scale of the solution (argument of tanh / sn)."""
        m, model = self.params.m, self.params.model
        if model is Model.SG:
            return m
        if self.kind is Kind.PERIODIC:
            return m / math.sqrt(1.0 + self.k**2)
        return m / math.sqrt(2.0)


def make_family(model, kind, m: float, g: float, k: Optional[float] = None, sign: int = 1) -> SolutionFamily:
    return SolutionFamily(ModelParams(Model(model), m, g), Kind(kind), k, sign)


# ---------------------------------------------------------------------------
# potentials


def potential(params: ModelParams, phi):
    m, g = params.m, params.g
    if params.model is Model.SG:
        return 2.0 * m**4 / (3.0 * g) * (1.0 + np.cos(params.alpha * phi))
    return 0.25 * g * (phi * phi - m * m / g) ** 2


def dpotential(params: ModelParams, phi):
    m, g = params.m, params.g
    if params.model is Model.SG:
        return -2.0 * m**4 / (3.0 * g) * params.alpha * np.sin(params.alpha * phi)
    return g * phi**3 - m * m * phi


def d2potential(params: ModelParams, phi):
    m, g = params.m, params.g
    if params.model is Model.SG:
        return -(m**2) * np.cos(params.alpha * phi)
    return 3.0 * g * phi * phi - m * m


def W_lower_bound(params: ModelParams) -> float:
    """Smallest W with bounded oscillating solutions (value of -V at its maximum)."""
    m, g = params.m, params.g
    if params.model is Model.SG:
        return -4.0 * m**4 / (3.0 * g)
    return -(m**4) / (4.0 * g)


def first_integral_W(family: SolutionFamily) -> float:
    """Integration constant W of (phi')^2 = 2 V + 2 W."""
    if family.kind in (Kind.KINK, Kind.ANTIKINK, Kind.VACUUM):
        return 0.0
    m, g, k = family.params.m, family.params.g, family.k
    if family.params.model is Model.SG:
        return 4.0 * (k * k - 1.0) * m**4 / (3.0 * g)
    return -(((1.0 - k * k) / (1.0 + k * k)) ** 2) * m**4 / (4.0 * g)


# ---------------------------------------------------------------------------
# profiles


def sg_prefactor_candidates(params: ModelParams) -> dict:
    """Amplitude prefactors c in phi = c * arcsin(tanh(m x)) for the SG kink.

    ``printed_kink`` and ``printed_periodic`` are the two forms found in the
    source text; ``derived`` is 2/alpha, obtained from the first integral.
    """
    m, g = params.m, params.g
    return {
        "printed_kink": math.sqrt(2.0 / (3.0 * g)),
        "printed_periodic": 2.0 * m * 2.0 / (3.0 * g),
        "derived": 2.0 * m * math.sqrt(2.0 / (3.0 * g)),
    }


def _sg_kink_residual(params: ModelParams, c: float, xs) -> float:
    m = params.m
    h = 1e-3
    f = lambda x: c * np.arcsin(np.tanh(m * x))
    d2 = (-f(xs + 2 * h) + 16 * f(xs + h) - 30 * f(xs) + 16 * f(xs - h) - f(xs - 2 * h)) / (12 * h * h)
    return float(np.max(np.abs(d2 - dpotential(params, f(xs)))))


def select_sg_prefactor(params: ModelParams, xs=None) -> tuple:
    """Pick the candidate prefactor with the smallest equation-of-motion residual.

    Returns ``(name, residuals)``.
    """
    if xs is None:
        xs = np.linspace(-5.0 / params.m, 5.0 / params.m, 201)
    residuals = {
        name: _sg_kink_residual(params, c, xs)
        for name, c in sg_prefactor_candidates(params).items()
    }
    return min(residuals, key=residuals.get), residuals


def _sech(x):
    ax = np.abs(x)
    e = np.exp(-ax)
    return 2.0 * e / (1.0 + e * e)


def _sg_amplitude(params: ModelParams) -> float:
    return 2.0 / params.alpha


def profile(family: SolutionFamily, x):
    """Field profile phi(x).  SG profiles lie in the fundamental domain (-Phi/2, Phi/2]."""
    p = family.params
    s = family.sign
    x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    if family.kind is Kind.VACUUM:
        if p.model is Model.SG:
            val = s * 0.5 * p.Phi
        else:
            val = s * p.m / math.sqrt(p.g)
        return val + 0.0 * x
    if p.model is Model.SG:
        c = _sg_amplitude(p)
        if family.kind is Kind.PERIODIC and family.k < 1.0:
            sn, _, _ = jacobi_sn_cn_dn(p.m * x, family.k)
            return s * c * np.arcsin(family.k * sn)
        # arcsin(tanh y) written as the Gudermannian 2 arctan(tanh(y/2)), stable as |y| grows
        return s * c * 2.0 * np.arctan(np.tanh(0.5 * p.m * x))
    b = family.b
    amp = math.sqrt(2.0 / p.g) * b
    if family.kind is Kind.PERIODIC:
        sn, _, _ = jacobi_sn_cn_dn(b * x, family.k)
        return s * amp * family.k * sn
    return s * amp * np.tanh(b * x)


def profile_derivative(family: SolutionFamily, x):
    """Analytic phi'(x)."""
    p = family.params
    s = family.sign
    x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    if family.kind is Kind.VACUUM:
        return 0.0 * x
    if p.model is Model.SG:
        c = _sg_amplitude(p)
        if family.kind is Kind.PERIODIC:
            _, cn, _ = jacobi_sn_cn_dn(p.m * x, family.k)
            return s * c * family.k * p.m * cn
        return s * c * p.m * _sech(p.m * x)
    b = family.b
    amp = math.sqrt(2.0 / p.g) * b
    if family.kind is Kind.PERIODIC:
        _, cn, dn = jacobi_sn_cn_dn(b * x, family.k)
        return s * amp * family.k * b * cn * dn
    return s * amp * b * _sech(b * x) ** 2


def eom_residual(family: SolutionFamily, x, h: float = 1e-3):
    """|phi'' - V'(phi)| with phi'' from the 5-point stencil."""
    if family.kind is Kind.VACUUM:
        # constant solution sits at a critical point of V
        return 0.0 * np.asarray(x, dtype=float) if np.ndim(x) else 0.0
    x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    f = lambda y: profile(family, y)
    d2 = (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)
    return np.abs(d2 - dpotential(family.params, f(x)))


# ---------------------------------------------------------------------------
# fluctuation operators


_U_TABLE = {
    # (u0, u1) in units of b^2, as polynomials in kappa = k^2
    "A": (ONE, -2 * ONE),
    "B": (2 * KAPPA - 1, -2 * KAPPA),
    "C": (4 * ONE, -6 * ONE),
    "D": (5 * KAPPA - 1, -6 * KAPPA),
}
_Z_MAP = {"A": "sech2", "B": "cn2", "C": "sech2", "D": "cn2"}
GAP_COUNT = {"A": 1, "B": 1, "C": 2, "D": 2}


@dataclass(frozen=True)
class FluctuationCase:
    """Operator L = -d^2/dx^2 + u(x) with u = b^2 (u0 + u1 z(x)).

    ``u0`` and ``u1`` are stored in physical units (already multiplied by b^2).
    """

    case_id: str
    b: float
    k: Optional[float] = None
    u0: float = field(init=False)
    u1: float = field(init=False)
    z_map: str = field(init=False)

    def __post_init__(self):
        cid = str(self.case_id).upper()
        if cid not in _U_TABLE:
            raise DomainError(f"unknown case {self.case_id!r}")
        object.__setattr__(self, "case_id", cid)
        if not self.b > 0:
            raise DomainError("b must be positive")
        if _Z_MAP[cid] == "cn2":
            if self.k is None or not 0.0 <= self.k <= 1.0:
                raise DomainError(f"case {cid} needs 0 <= k <= 1")
            kappa = self.k**2
        else:
            object.__setattr__(self, "k", None)
            kappa = 1.0
        u0, u1 = _U_TABLE[cid]
        object.__setattr__(self, "u0", float(u0.evaluate(kappa=kappa)) * self.b**2)
        object.__setattr__(self, "u1", float(u1.evaluate(kappa=kappa)) * self.b**2)
        object.__setattr__(self, "z_map", _Z_MAP[cid])

    @property
    def n_gaps(self) -> int:
        return GAP_COUNT[self.case_id]

    @property
    def is_periodic(self) -> bool:
        return self.z_map == "cn2"

    @property
    def kappa(self) -> float:
        return 1.0 if self.k is None else self.k**2

    @property
    def period(self) -> float:
        """Period of u(x) in x (2K/b); infinite for kinks."""
        if not self.is_periodic:
            return math.inf
        return 2.0 * elliptic_K(self.k) / self.b

    def rho(self, z):
        """(dz/dx)^2 / (4 b^2) as a function of z."""
        if self.z_map == "sech2":
            return z * z * (1.0 - z)
        kap = self.kappa
        return z * (1.0 - z) * (1.0 - kap + kap * z)

    @staticmethod
    def exact_u(case_id: str) -> RationalPoly:
        """u(z) at b = 1 with kappa symbolic."""
        u0, u1 = _U_TABLE[case_id.upper()]
        return u0 + u1 * Z

    @staticmethod
    def exact_rho(case_id: str) -> RationalPoly:
        if _Z_MAP[case_id.upper()] == "sech2":
            return Z * Z * (1 - Z)
        return Z * (1 - Z) * (1 - KAPPA + KAPPA * Z)

    def degenerate(self) -> "FluctuationCase":
        """k = 1 partner: B -> A, D -> C."""
        if self.k != 1.0:
            return self
        return FluctuationCase({"B": "A", "D": "C"}[self.case_id], self.b)


def fluctuation_case(family: SolutionFamily) -> FluctuationCase:
    p = family.params
    if family.kind is Kind.VACUUM:
        raise DomainError("vacuum has a constant fluctuation potential")
    if p.model is Model.SG:
        if family.kind is Kind.PERIODIC:
            return FluctuationCase("B", p.m, family.k)
        return FluctuationCase("A", p.m)
    if family.kind is Kind.PERIODIC:
        return FluctuationCase("D", family.b, family.k)
    return FluctuationCase("C", family.b)


def z_of_x(case: FluctuationCase, x):
    bx = case.b * (np.asarray(x, dtype=float) if np.ndim(x) else float(x))
    if case.z_map == "sech2":
        return _sech(bx) ** 2
    _, cn, _ = jacobi_sn_cn_dn(bx, case.k)
    return cn * cn


def fluctuation_potential(case: FluctuationCase, x):
    """u(x) = u0 + u1 z(x); the essential spectrum of -d^2 + u starts at the band edge."""
    return case.u0 + case.u1 * z_of_x(case, x)


# ---------------------------------------------------------------------------
# energies


@dataclass(frozen=True)
class EnergyResult:
    quadrature: float
    closed_form: Optional[float]
    closed_form_corrected: Optional[float]
    interval: tuple


def energy_density(family: SolutionFamily, x):
    phi = profile(family, x)
    dphi = profile_derivative(family, x)
    # both potentials already vanish at their minima
    return 0.5 * dphi * dphi + potential(family.params, phi)


def _quad(f, a, b):
    val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=400)
    if not math.isfinite(val) or err > 1e-9 * max(1.0, abs(val)):
        raise QuadratureError(f"quadrature did not converge (err={err:g})")
    return val


def classical_energy(family: SolutionFamily) -> EnergyResult:
    """Energy by quadrature together with the closed forms.

    Kinks are integrated over the real line; periodic solutions over one
    period of the energy density (half a period of phi), which is the
    interval whose energy tends to the kink energy as k -> 1.
    ``closed_form`` reproduces the printed expression where one exists and
    ``closed_form_corrected`` the expression that follows from the model's
    potential.
    """
    if family.kind is Kind.VACUUM:
        raise DomainError("energy of the vacuum family is zero by construction")
    p = family.params
    m, g = p.m, p.g
    dens = lambda x: float(energy_density(family, x))
    if family.kind is Kind.PERIODIC:
        k = family.k
        scale = m if p.model is Model.SG else family.b
        if k == 1.0:
            quad = 2.0 * _quad(dens, 0.0, math.inf)
            interval = (-math.inf, math.inf)
        else:
            K = elliptic_K(k)
            half = K / scale
            quad = 2.0 * _quad(dens, 0.0, half)
            interval = (-half, half)
        closed = corrected = None
        if p.model is Model.SG:
            KK = K if k < 1.0 else 0.0
            EE = elliptic_E(k)
            kp2 = (1.0 - k) * (1.0 + k)
            closed = 8.0 * m**2 / g * (kp2 * KK + 2.0 * EE)
            corrected = 8.0 * m**3 / (3.0 * g) * (2.0 * EE - kp2 * KK)
        return EnergyResult(quad, closed, corrected, interval)

    quad = 2.0 * _quad(dens, 0.0, math.inf)
    if p.model is Model.SG:
        return EnergyResult(quad, 16.0 * m**2 / g, 16.0 * m**3 / (3.0 * g), (-math.inf, math.inf))
    return EnergyResult(quad, None, 2.0 * math.sqrt(2.0) * m**3 / (3.0 * g), (-math.inf, math.inf))


def profile_table(family: SolutionFamily, xs) -> list:
    """Rows (x, phi, dphi, u, density) for CSV export."""
    xs = np.asarray(xs, dtype=float)
    phi = profile(family, xs)
    dphi = profile_derivative(family, xs)
    u = d2potential(family.params, phi)
    dens = 0.5 * dphi * dphi + potential(family.params, phi)
    return [tuple(float(v) for v in row) for row in zip(xs, phi, dphi, u, dens)]
