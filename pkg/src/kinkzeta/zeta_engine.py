"""Heat traces, zeta functions and one-loop corrections.

Traces are obtained from the resolvent either in closed form or by
collapsing the Bromwich contour onto the real-axis cuts of sqrt(Q).  The
zeta function is the Mellin transform of the trace, continued to s = 0 by
splitting off the small- and large-t power laws; the correction is
delta_eps = -zeta'(0)/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .classical import FluctuationCase
from .resolvent import BranchError, solve_PQ
from .special_fn import DomainError, digamma, elliptic_E, elliptic_K, erf, erfc, log_gamma, rgamma

__all__ = [
    "ConvergenceError",
    "ContourResolutionError",
    "PoleError",
    "HeatTrace",
    "CorrectionResult",
    "DualCorrection",
    "PeriodMoments",
    "PeriodicZetaResult",
    "period_moments",
    "gamma_hat",
    "gamma_t_closed",
    "gamma_t_bromwich",
    "bromwich_terms",
    "BromwichTrace",
    "sg_kink_trace",
    "phi4_kink_trace",
    "vacuum_trace",
    "dimension_lift",
    "mellin_zeta",
    "mellin_zeta_prime0",
    "zeta_closed_sg_kink",
    "zeta_closed_sg_kink_prime0",
    "zeta_background",
    "zeta_background_prime0",
    "delta_epsilon",
    "periodic_zeta_numeric",
]


class ConvergenceError(ArithmeticError):
    """Mellin integral does not converge at the requested s."""


class ContourResolutionError(ArithmeticError):
    """Cut quadrature disagrees with its half-resolution copy."""


class PoleError(DomainError):
    """Closed form evaluated at a pole of its Gamma factors."""


# ---------------------------------------------------------------------------
# period moments


_SERIES_KAPPA = 0.1
_SERIES_TERMS = 40


def _kE_series_coeffs(nterms: int):
    a = [1.0]
    for n in range(1, nterms + 1):
        a.append(a[-1] * ((2 * n - 1) / (2 * n)) ** 2)
    e = [a[0]] + [-a[n] / (2 * n - 1) for n in range(1, nterms + 1)]
    return a, e


@dataclass(frozen=True)
class PeriodMoments:
    """Integrals of sn^(2r) and cn^(2r) over [0, K(k)] in the argument u."""

    k: float
    I0: float
    I1: float
    I2: float

    @property
    def C1(self) -> float:
        return self.I0 - self.I1

    @property
    def C2(self) -> float:
        return self.I0 - 2.0 * self.I1 + self.I2

    def cn_moment(self, r: int) -> float:
        return (self.I0, self.C1, self.C2)[r]


def period_moments(k: float) -> PeriodMoments:
    """I0 = K, I1 = (K - E)/k^2, I2 = ((2 + k^2) K - 2 (1 + k^2) E)/(3 k^4).

    Small k uses the Maclaurin series in kappa = k^2, which avoids the
    cancellation in the closed forms.
    """
    if not 0.0 < k < 1.0:
        raise DomainError(f"period moments need 0 < k < 1, got {k}")
    kap = k * k
    K = elliptic_K(k)
    if kap < _SERIES_KAPPA:
        a, e = _kE_series_coeffs(_SERIES_TERMS + 2)
        half_pi = 0.5 * math.pi
        i1 = half_pi * sum((a[n + 1] - e[n + 1]) * kap**n for n in range(_SERIES_TERMS))
        i2 = 0.0
        for n in range(2, _SERIES_TERMS + 2):
            c = 2 * a[n] + a[n - 1] - 2 * e[n] - 2 * e[n - 1]
            i2 += c * kap ** (n - 2)
        i2 *= half_pi / 3.0
        return PeriodMoments(k, K, i1, i2)
    E = elliptic_E(k)
    return PeriodMoments(k, K, (K - E) / kap, ((2 + kap) * K - 2 * (1 + kap) * E) / (3 * kap * kap))


# ---------------------------------------------------------------------------
# Laplace-space trace


def _dfact_ratio(r: int) -> float:
    # (2r-2)!! / (2r-1)!!
    out = 1.0
    for j in range(1, r):
        out *= (2 * j) / (2 * j + 1)
    return out


@lru_cache(maxsize=256)
def _unit_trace_data(case_id: str, k: Optional[float]):
    """Numerator polynomial N(q) (ascending coefficients), vacuum weight and nu at b = 1.

    gamma_hat_1(q) = N(q) / (2 sqrt(Q(q))) - ell / (2 sqrt(q + nu)).
    Kinks carry ell = 0: their z-independent part of P cancels the constant
    background exactly and is dropped from N.
    """
    case = FluctuationCase(case_id, 1.0, k)
    res = solve_PQ(case)
    table = res.P_float()
    if case.is_periodic:
        mom = period_moments(k)
        weights = {r: 2.0 * mom.cn_moment(r) for r in range(res.n + 1)}
        ell = 2.0 * mom.I0
    else:
        weights = {r: 2.0 * _dfact_ratio(r) for r in range(1, res.n + 1)}
        ell = 0.0
    coeffs = np.zeros(res.n + 1)
    for (dz, dp), c in table.items():
        if dz in weights:
            coeffs[dp] += c * weights[dz]
    return coeffs, ell, case.u0, res.branch()


def _case_data(case: FluctuationCase):
    if case.is_periodic and case.k >= 1.0:
        case = case.degenerate()
    return case, _unit_trace_data(case.case_id, case.k if case.is_periodic else None)


def _sqrt_prod(q, roots, mult):
    acc = np.ones_like(q, dtype=complex)
    for r, m in zip(roots, mult):
        w = q - r
        acc = acc * w ** (m // 2)
        if m % 2:
            acc = acc * np.sqrt(w)
    return acc


def _gamma_hat_unit(data, q, vacuum: bool = True):
    coeffs, ell, nu, branch = data
    q = np.asarray(q, dtype=complex)
    # real arguments on a cut are read as q + i0
    q = np.where(q.imag == 0.0, q.real + 0.0j, q)
    num = np.polynomial.polynomial.polyval(q, coeffs)
    val = num / (2.0 * _sqrt_prod(q, branch.roots, branch.multiplicities))
    if vacuum and ell:
        val = val - ell / (2.0 * np.sqrt(q + nu))
    return val


def gamma_hat(case: FluctuationCase, p, vacuum_subtracted: bool = True):
    """Laplace transform of the regularised trace (per period for B and D).

    Kinks: integral over the line of G - G_c.  Periodic cases: integral of G
    over one period of u, minus the same for -d^2/dx^2 + u0 when
    ``vacuum_subtracted``.  Complex p is accepted; real p must lie above
    every branch point.
    """
    case, data = _case_data(case)
    b2 = case.b**2
    if np.isrealobj(p) and np.ndim(p) == 0:
        top = data[3].top
        if data[1] and vacuum_subtracted:
            top = max(top, -data[2])
        if not p / b2 > top:
            raise BranchError(f"p = {p} is on or below the branch points")
        return float(_gamma_hat_unit(data, p / b2, vacuum_subtracted).real) / b2
    out = _gamma_hat_unit(data, np.asarray(p) / b2, vacuum_subtracted) / b2
    return complex(out) if np.ndim(p) == 0 else out


# ---------------------------------------------------------------------------
# inverse Laplace transform


def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


class BromwichTrace:
    """gamma(t) = sum_k Res_k e^(p_k t) - (1/pi) int_cuts e^(p t) Im gamma_hat(p + i0) dp.

    Works at b = 1; physical times are mapped by t -> b^2 t.  Cut integrals
    use fixed Gauss-Legendre rules after substitutions that remove the
    inverse square-root endpoint behaviour: p = a + (c - a)(1 - cos th)/2 on
    finite cuts and p = a - tan(phi)^2 on the semi-infinite one.  The node
    values of Im gamma_hat are computed once, so any number of t values is a
    matrix-vector product.
    """

    def __init__(self, case: FluctuationCase, nodes: int = 600, exclude_lowest_band: bool = False,
                 vacuum: bool = True):
        self.case, data = _case_data(case)
        self.data = data
        self.nodes = nodes
        coeffs, ell, nu, branch = data
        self.exclude_lowest_band = exclude_lowest_band
        self.vacuum = vacuum and bool(ell)

        # poles: double roots of Q with non-vanishing residue
        self.residues: List[Tuple[float, float]] = []
        for r, m in zip(branch.roots, branch.multiplicities):
            if m >= 2:
                others_r = [x for x in branch.roots]
                others_m = [mm - 2 if x == r else mm for x, mm in zip(branch.roots, branch.multiplicities)]
                s = _sqrt_prod(np.array([r + 0j]), others_r, others_m)[0]
                res = np.polynomial.polynomial.polyval(r, coeffs) / (2.0 * s)
                if abs(res.imag) > 1e-12 * max(1.0, abs(res)):
                    raise ArithmeticError("complex residue")
                self.residues.append((r, float(res.real)))

        # cut segments between consecutive branch points
        points = sorted(set(branch.simple_roots) | ({-nu} if self.vacuum else set()))
        self.band_cut = None
        if exclude_lowest_band:
            if not branch.simple_roots:
                raise DomainError("no band to exclude")
            simple = branch.simple_roots
            self.band_cut = (simple[-2], simple[-1])
            if self.vacuum and -nu > simple[-2]:
                raise ConvergenceError("vacuum threshold lies inside the excluded band")
        p_nodes, w_nodes = [], []
        x, w = _gl(nodes)
        lo_pt = points[0]
        # semi-infinite cut (-inf, lo_pt]
        phi = 0.25 * math.pi * (x + 1.0)
        tphi = np.tan(phi)
        p_inf = lo_pt - tphi**2
        jac = 2.0 * tphi / np.cos(phi) ** 2 * (0.25 * math.pi)
        p_nodes.append(p_inf)
        w_nodes.append(w * jac)
        for a, c in zip(points[:-1], points[1:]):
            if self.band_cut and (a, c) == self.band_cut:
                continue
            mid = _gamma_hat_unit(data, np.array([0.5 * (a + c)]), self.vacuum)[0]
            if abs(mid.imag) < 1e-300:
                continue
            th = 0.5 * math.pi * (x + 1.0)
            p_fin = a + (c - a) * 0.5 * (1.0 - np.cos(th))
            jac_f = (c - a) * 0.5 * np.sin(th) * (0.5 * math.pi)
            p_nodes.append(p_fin)
            w_nodes.append(w * jac_f)
        self.p = np.concatenate(p_nodes)
        im = _gamma_hat_unit(data, self.p, self.vacuum).imag
        self.wim = np.concatenate(w_nodes) * im / math.pi
        self.segments = [(-math.inf, lo_pt)] + [
            (a, c) for a, c in zip(points[:-1], points[1:])
        ]
        self._band_p = None
        if self.band_cut:
            a, c = self.band_cut
            th = 0.5 * math.pi * (x + 1.0)
            pb = a + (c - a) * 0.5 * (1.0 - np.cos(th))
            jb = (c - a) * 0.5 * np.sin(th) * (0.5 * math.pi)
            self._band_p = pb
            self._band_w = w * jb * _gamma_hat_unit(data, pb, self.vacuum).imag / math.pi

    def unit(self, tau) -> np.ndarray:
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        out = -np.exp(np.outer(tau, self.p)) @ self.wim
        for r, res in self.residues:
            out = out + res * np.exp(r * tau)
        return out

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        out = self.unit(np.asarray(t, dtype=float) * self.case.b**2)
        return float(out[0]) if scalar else out

    def band_moments(self) -> Tuple[float, float]:
        """(B(0), B'(0)) of the excluded band's contribution, at b = 1."""
        if self._band_p is None:
            raise DomainError("no excluded band")
        return float(-np.sum(self._band_w)), float(-np.sum(self._band_w * self._band_p))


@lru_cache(maxsize=64)
def _bromwich(key, nodes: int, exclude: bool, vacuum: bool) -> BromwichTrace:
    return BromwichTrace(FluctuationCase(*key), nodes, exclude, vacuum)


def _case_key(case: FluctuationCase):
    return (case.case_id, case.b, case.k)


def bromwich_terms(case: FluctuationCase) -> List[Tuple[float, float]]:
    """Residue census: (pole p_k, residue) pairs at the instance scale."""
    tr = _bromwich(_case_key(case), 600, False, True)
    b2 = tr.case.b**2
    return [(r * b2, res) for r, res in tr.residues]


def gamma_t_bromwich(case: FluctuationCase, t, nodes: int = 600, exclude_lowest_band: bool = False,
                     check: bool = True):
    """Regularised heat trace by inverse Laplace transform of gamma_hat.

    With ``check`` the result is compared against a half-resolution rule and
    :class:`ContourResolutionError` is raised when they differ by more than
    1e-9 (absolute, relative to max(1, |gamma|)).
    """
    if np.any(np.asarray(t) <= 0):
        raise DomainError("t must be positive")
    tr = _bromwich(_case_key(case), nodes, exclude_lowest_band, True)
    val = tr(t)
    if check:
        coarse = _bromwich(_case_key(case), nodes // 2, exclude_lowest_band, True)(t)
        err = np.max(np.abs(np.asarray(val) - np.asarray(coarse)) / np.maximum(1.0, np.abs(val)))
        if err > 1e-9:
            raise ContourResolutionError(f"cut quadrature unresolved (difference {err:.2e})")
    return val


def gamma_t_closed(case: FluctuationCase, t):
    """Closed-form regularised traces of the kink operators.

    A: erf(b sqrt t).  C: erf(2 b sqrt t) + exp(-3 b^2 t) erf(b sqrt t).
    """
    b = case.b
    st = np.sqrt(np.asarray(t, dtype=float))
    if case.case_id == "A":
        out = erf(b * st)
    elif case.case_id == "C":
        out = erf(2 * b * st) + np.exp(-3 * b * b * st * st) * erf(b * st)
    else:
        raise DomainError("closed-form trace exists for kink cases A and C only")
    return float(out) if np.ndim(t) == 0 else out


# ---------------------------------------------------------------------------
# heat traces for the Mellin transform


@dataclass(frozen=True)
class HeatTrace:
    """Regularised trace gamma(t) with its power-law ends.

    ``small_t`` lists (c, a) with gamma ~ sum c t^a as t -> 0 and
    ``small_order`` is the exponent of the first omitted term;
    ``large_t`` lists (c, a) with gamma ~ sum c t^a as t -> infinity up to
    exponentially small terms.  ``small_tail`` / ``large_tail`` return the
    remainders directly when they can be computed without cancellation.
    """

    case_id: str
    d: int
    form: str
    evaluate: Optional[Callable] = None
    small_t: Tuple[Tuple[float, float], ...] = ()
    small_order: float = math.inf
    large_t: Tuple[Tuple[float, float], ...] = ()
    small_tail: Optional[Callable] = None
    large_tail: Optional[Callable] = None
    samples: Optional[Tuple[np.ndarray, np.ndarray]] = None
    subtraction: str = ""

    def __call__(self, t):
        if self.evaluate is not None:
            return self.evaluate(t)
        ts, gs = self.samples
        return np.interp(np.log(t), np.log(ts), gs)

    def small_remainder(self, t):
        if self.small_tail is not None:
            return self.small_tail(t)
        return self(t) - sum(c * t**a for c, a in self.small_t)

    def large_remainder(self, t):
        if self.large_tail is not None:
            return self.large_tail(t)
        return self(t) - sum(c * t**a for c, a in self.large_t)


def _erf_series_tail(x, start: int):
    # (2/sqrt(pi)) sum_{n >= start} (-1)^n x^(2n+1) / (n! (2n+1))
    x = float(x)
    term = x * (-1) ** start * x ** (2 * start) / math.factorial(start)
    total = 0.0
    n = start
    while True:
        contrib = term / (2 * n + 1)
        total += contrib
        if abs(contrib) < 1e-18 * max(abs(total), 1e-300) and n > start + 2:
            break
        n += 1
        term *= -x * x / n
        if n > start + 400:
            break
    return 2.0 / math.sqrt(math.pi) * total


_ERF_TERMS = 4


def sg_kink_trace(m: float) -> HeatTrace:
    """gamma(t) = erf(m sqrt t) for the sine-Gordon kink (b = m), d = 1."""
    b = m
    small = tuple(
        (2.0 / math.sqrt(math.pi) * (-1) ** n * b ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1)), n + 0.5)
        for n in range(_ERF_TERMS)
    )
    return HeatTrace(
        "A", 1, "closed_erf",
        evaluate=lambda t: erf(b * math.sqrt(t)),
        small_t=small,
        small_order=_ERF_TERMS + 0.5,
        large_t=((1.0, 0.0),),
        small_tail=lambda t: _erf_series_tail(b * math.sqrt(t), _ERF_TERMS),
        large_tail=lambda t: -erfc(b * math.sqrt(t)),
        subtraction="-d^2/dx^2 + m^2 on the line",
    )


def _erf_coeffs(c: float, order: int) -> np.ndarray:
    # erf(c sqrt t) as a series in sqrt(t): entry j multiplies t^(j/2)
    out = np.zeros(order + 1)
    for n in range((order - 1) // 2 + 1):
        out[2 * n + 1] = 2.0 / math.sqrt(math.pi) * (-1) ** n * c ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1))
    return out


def phi4_kink_trace(b: float, order: int = 9) -> HeatTrace:
    """gamma(t) = erf(2b sqrt t) + exp(-3b^2 t) erf(b sqrt t) for the phi^4 kink, d = 1."""
    ex = np.zeros(order + 1)
    for n in range(order // 2 + 1):
        ex[2 * n] = (-3.0 * b * b) ** n / math.factorial(n)
    series = _erf_coeffs(2 * b, order) + np.convolve(ex, _erf_coeffs(b, order))[: order + 1]
    small = tuple((float(c), 0.5 * j) for j, c in enumerate(series) if c != 0.0)
    return HeatTrace(
        "C", 1, "closed_erf",
        evaluate=lambda t: gamma_t_closed(FluctuationCase("C", b), t),
        small_t=small,
        small_order=0.5 * (order + 1),
        large_t=((1.0, 0.0),),
        large_tail=lambda t: -erfc(2 * b * math.sqrt(t)) + math.exp(-3 * b * b * t) * erf(b * math.sqrt(t)),
        subtraction="-d^2/dx^2 + 4 b^2 on the line",
    )


def vacuum_trace(nu: float, terms: int = 6) -> HeatTrace:
    """exp(-nu t): one-dimensional factor of the constant-potential trace."""
    small = tuple(((-nu) ** n / math.factorial(n), float(n)) for n in range(terms))

    def tail(t):
        x = -nu * t
        term = x**terms / math.factorial(terms)
        total, n = 0.0, terms
        while abs(term) > 1e-18 * max(abs(total), 1e-300) or n == terms:
            total += term
            n += 1
            term *= x / n
        return total

    return HeatTrace(
        "vacuum", 1, "closed_exp",
        evaluate=lambda t: math.exp(-nu * t),
        small_t=small,
        small_order=float(terms),
        large_t=(),
        small_tail=tail,
        large_tail=lambda t: math.exp(-nu * t),
        subtraction="none",
    )


def dimension_lift(trace: HeatTrace, d: int) -> HeatTrace:
    """gamma_d(t) = gamma_1(t) (4 pi t)^(-(d-1)/2)."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if trace.d != 1:
        raise DomainError("lift starts from a one-dimensional trace")
    if d == 1:
        return trace
    sh = 0.5 * (d - 1)
    f = (4.0 * math.pi) ** (-sh)

    def wrap(g):
        if g is None:
            return None
        return lambda t: g(t) * f * t ** (-sh)

    terms = dict(
        d=d,
        small_t=tuple((c * f, a - sh) for c, a in trace.small_t),
        small_order=trace.small_order - sh,
        large_t=tuple((c * f, a - sh) for c, a in trace.large_t),
    )
    if trace.samples is not None:
        ts, gs = trace.samples
        return replace(trace, samples=(ts, gs * f * ts ** (-sh)), **terms)
    return replace(trace, evaluate=wrap(trace.evaluate), small_tail=wrap(trace.small_tail),
                   large_tail=wrap(trace.large_tail), **terms)


def _quad(f, a, b):
    val, err = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=400)
    if not math.isfinite(val):
        raise ConvergenceError("Mellin integral diverged")
    return val


def _power_images(terms, s: float, sign: float):
    """sum sign * c / (s + a) split into the part multiplying 1/Gamma(s) and the a = 0 part."""
    regular, at_zero = 0.0, 0.0
    for c, a in terms:
        if a == 0.0:
            at_zero += sign * c
        else:
            if s + a == 0.0:
                raise ConvergenceError(f"pole of the Mellin image at s = {-a}")
            regular += sign * c / (s + a)
    return regular, at_zero


def _mellin_integrals(trace: HeatTrace, s: float) -> float:
    if trace.samples is not None:
        return _mellin_sampled(trace, s)
    small = _quad(lambda u: 2.0 * trace.small_remainder(u * u) * u ** (2 * s - 1), 0.0, 1.0)
    large = _quad(lambda t: trace.large_remainder(t) * t ** (s - 1), 1.0, math.inf)
    return small + large


def _mellin_sampled(trace: HeatTrace, s: float) -> float:
    ts, gs = trace.samples
    lt = np.log(ts)
    small_mask = ts <= 1.0
    rem_small = gs[small_mask] - sum(c * ts[small_mask] ** a for c, a in trace.small_t)
    rem_large = gs[ts >= 1.0] - sum(c * ts[ts >= 1.0] ** a for c, a in trace.large_t)
    spl_s = CubicSpline(lt[small_mask], rem_small * ts[small_mask] ** s)
    spl_l = CubicSpline(lt[ts >= 1.0], rem_large * ts[ts >= 1.0] ** s)
    total = float(spl_s.integrate(lt[0], 0.0)) + float(spl_l.integrate(0.0, lt[-1]))
    # below the grid: remainder ~ R(t_min) (t/t_min)^small_order
    t0 = ts[0]
    total += rem_small[0] * t0**s / (trace.small_order + s)
    # above the grid the remainder must already be negligible
    if abs(rem_large[-1]) > 1e-10 * max(1.0, float(np.max(np.abs(gs)))):
        raise ConvergenceError("trace has not decayed at the end of the sample grid")
    return total


def mellin_zeta(trace: HeatTrace, s: float, M: float = 1.0) -> float:
    """zeta(s) = M^(2s)/Gamma(s) int_0^inf gamma(t) t^(s-1) dt, continued past the strip.

    The integral is split at t = 1; the small-t power laws are subtracted on
    (0, 1] and the large-t ones on [1, inf), and their Mellin images
    c/(s + a) are added back analytically.  Terms with a = 0 combine with
    1/Gamma(s) into 1/Gamma(s + 1).
    """
    if not s + trace.small_order > 0:
        raise ConvergenceError(f"s = {s} outside the strip continued by the small-t subtraction")
    lo = [a for _, a in trace.large_t]
    if lo and s + min(lo) >= 0 and trace.large_tail is None and trace.samples is None:
        raise ConvergenceError("large-t remainder not available")
    reg_s, zero_s = _power_images(trace.small_t, s, 1.0)
    reg_l, zero_l = _power_images(trace.large_t, s, -1.0)
    body = _mellin_integrals(trace, s) + reg_s + reg_l
    return M ** (2 * s) * (rgamma(s) * body + (zero_s + zero_l) * rgamma(s + 1.0))


def mellin_zeta_prime0(trace: HeatTrace, M: float = 1.0, h: float = 1e-4) -> Tuple[float, float]:
    """(zeta(0), zeta'(0)) with a Richardson-extrapolated central difference."""
    z = lambda s: mellin_zeta(trace, s, M)
    d1 = (z(h) - z(-h)) / (2 * h)
    d2 = (z(0.5 * h) - z(-0.5 * h)) / h
    return z(0.0), (4.0 * d2 - d1) / 3.0


# ---------------------------------------------------------------------------
# closed forms for the sine-Gordon kink


def _closed_ratio(s: float, d: int) -> float:
    # Gamma(s + 1 - d/2) / ((2s + 1 - d) Gamma(s)), regular at s = 0 for d <= 4
    if d == 1:
        return math.exp(log_gamma(s + 0.5) - log_gamma(s + 1.0)) / 2.0 if s > -0.5 else _ratio_generic(s, d)
    if d % 2 == 0:
        prod = 2 * s + 1 - d
        for j in range(1, d // 2):
            prod *= s - j
        if prod == 0:
            raise PoleError(f"pole at s = {s}, d = {d}")
        return 1.0 / prod
    return _ratio_generic(s, d)


def _ratio_generic(s: float, d: int) -> float:
    from scipy.special import gamma as _g

    x = s + 1 - 0.5 * d
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma pole at s = {s}, d = {d}")
    if 2 * s + 1 - d == 0:
        raise PoleError(f"pole at s = {s}, d = {d}")
    return float(_g(x)) * rgamma(s) / (2 * s + 1 - d)


def zeta_closed_sg_kink(s: float, d: int, m: float, M: float = 1.0) -> float:
    """-4 (4 pi)^(-d/2) m^(d-1-2s) M^(2s) Gamma(s+1-d/2) / ((2s+1-d) Gamma(s))."""
    if d < 1:
        raise DomainError("d must be >= 1")
    pref = -4.0 * (4.0 * math.pi) ** (-0.5 * d) * m ** (d - 1 - 2 * s) * M ** (2 * s)
    return pref * _closed_ratio(s, d)


def zeta_closed_sg_kink_prime0(d: int, m: float, M: float = 1.0) -> Tuple[float, float]:
    """(zeta(0), zeta'(0)) of the closed form, differentiated analytically."""
    if d < 1:
        raise DomainError("d must be >= 1")
    C = -4.0 * (4.0 * math.pi) ** (-0.5 * d) * m ** (d - 1)
    L = 2.0 * math.log(M / m)
    if d == 1:
        # R(s) = Gamma(s+1/2)/(2 Gamma(s+1)); R'/R = psi(s+1/2) - psi(s+1)
        R0 = math.sqrt(math.pi) / 2.0
        dR = R0 * (digamma(0.5) - digamma(1.0))
        return C * R0, C * (L * R0 + dR)
    if d % 2 == 1:
        # R(0) = 0 from 1/Gamma(s); R'(0) = Gamma(1-d/2)/(1-d)
        from scipy.special import gamma as _g

        return 0.0, C * float(_g(1 - 0.5 * d)) / (1 - d)
    roots = [0.5 * (d - 1)] + list(range(1, d // 2))
    lead = 2.0
    R0 = 1.0 / (lead * np.prod([-r for r in roots]))
    dlog = -sum(1.0 / (0.0 - r) for r in roots)
    return C * R0, C * (L * R0 + R0 * dlog)


def zeta_background(s: float, d: int, nu: float, M: float = 1.0) -> float:
    """Per-unit-length zeta of -d^2 + nu with d-1 free transverse directions."""
    x = s + 0.5 * (1 - d)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma pole at s = {s}, d = {d}")
    from scipy.special import gamma as _g

    return M ** (2 * s) * (4 * math.pi) ** (0.5 * (1 - d)) * float(_g(x)) * rgamma(s) * nu ** (-x)


def zeta_background_prime0(d: int, nu: float, M: float = 1.0, h: float = 1e-4) -> Tuple[float, float]:
    if d % 2 == 1:
        # Gamma(s + (1-d)/2)/Gamma(s) is a polynomial-type ratio regular at 0
        n = (d - 1) // 2
        # Gamma(s)/Gamma(s-n) = (s-1)...(s-n)
        roots = list(range(1, n + 1))
        R0 = 1.0 / np.prod([-r for r in roots]) if roots else 1.0
        dlog = -sum(1.0 / (0.0 - r) for r in roots)
        f = (4 * math.pi) ** (0.5 * (1 - d)) * nu ** (0.5 * (d - 1))
        L = 2 * math.log(M) - math.log(nu)
        return f * R0, f * R0 * (L + dlog)
    z = lambda s: zeta_background(s, d, nu, M)
    d1 = (z(h) - z(-h)) / (2 * h)
    d2 = (z(0.5 * h) - z(-0.5 * h)) / h
    return z(0.0), (4.0 * d2 - d1) / 3.0


# ---------------------------------------------------------------------------
# corrections


@dataclass(frozen=True)
class CorrectionResult:
    case_id: str
    d: int
    m: float
    M: float
    zeta0: float
    zeta_prime0: float
    delta_eps: float
    path: str


@dataclass(frozen=True)
class DualCorrection:
    closed: CorrectionResult
    numeric: CorrectionResult
    background: Optional[CorrectionResult] = None

    @property
    def discrepancy(self) -> float:
        return abs(self.closed.delta_eps - self.numeric.delta_eps)


def delta_epsilon(d: int, m: float, M: float = 1.0, include_background: bool = False) -> DualCorrection:
    """Sine-Gordon kink correction -zeta'(0)/2 by closed form and by numeric Mellin."""
    if not 1 <= d <= 4:
        raise DomainError("dimension must lie in 1..4")
    if not (m > 0 and M > 0):
        raise DomainError("m and M must be positive")
    z0, zp = zeta_closed_sg_kink_prime0(d, m, M)
    closed = CorrectionResult("A", d, m, M, z0, zp, -0.5 * zp, "closed_form")
    trace = dimension_lift(sg_kink_trace(m), d)
    nz0, nzp = mellin_zeta_prime0(trace, M)
    numeric = CorrectionResult("A", d, m, M, nz0, nzp, -0.5 * nzp, "numeric_mellin")
    bg = None
    if include_background:
        b0, bp = zeta_background_prime0(d, m * m, M)
        bg = CorrectionResult("background", d, m, M, b0, bp, -0.5 * bp, "closed_form")
    return DualCorrection(closed, numeric, bg)


# ---------------------------------------------------------------------------
# periodic cases


@dataclass(frozen=True)
class PeriodicZetaResult:
    case_id: str
    k: float
    b: float
    d: int
    M: float
    s_grid: Tuple[float, ...]
    zeta: Tuple[float, ...]
    zeta0: float
    zeta_prime0: float
    delta_eps: float
    provenance: Dict[str, object] = field(default_factory=dict)


def periodic_zeta_numeric(case: FluctuationCase, d: int = 1, s_grid: Sequence[float] = (),
                          M: float = 1.0, nodes: int = 600, t_points: int = 400,
                          t_min: float = 1e-4) -> PeriodicZetaResult:
    """Per-period zeta function of a periodic fluctuation operator.

    The lowest band (image of the zero mode of the kink limit) is removed
    from the trace and the rest is compared with -d^2/dx^2 + u0 on the same
    period.  The trace is sampled by the Bromwich route on a log-spaced
    t-grid; the small-t behaviour -1 + c_h t^(1/2) + c_1 t is split off with
    c_h from the heat-kernel coefficient and c_1 from the excluded band.
    """
    if not case.is_periodic or not 0.0 < case.k < 1.0:
        raise DomainError("periodic case with 0 < k < 1 required")
    nu = case.u0
    if not nu > 0:
        raise ConvergenceError(f"constant part u0 = {nu:g} is not positive; the comparison trace grows")
    b = case.b
    tr = BromwichTrace(case, nodes, exclude_lowest_band=True)
    B0, B1 = tr.band_moments()
    mom = period_moments(case.k)
    # -int_cell (u - u0) dx / sqrt(4 pi), with int_cell z dx = 2 (K - I1)/b
    c_half = -case.u1 * 2.0 * mom.C1 / b / math.sqrt(4 * math.pi)
    c_one = -B1 * b * b

    # decay scale: vacuum threshold and bottom of the second band
    simple = tr.data[3].simple_roots
    rate = min(nu, -simple[-3] * b * b) if len(simple) >= 3 else nu
    t_max = 45.0 / rate
    ts = np.geomspace(t_min, t_max, t_points)
    gs = tr(ts)
    trace = HeatTrace(
        case.case_id, 1, "bromwich_sampled",
        samples=(ts, gs),
        small_t=((-B0, 0.0), (c_half, 0.5), (c_one, 1.0)),
        small_order=1.5,
        large_t=(),
        subtraction="lowest band removed; -d^2/dx^2 + u0 per period",
    )
    trace = dimension_lift(trace, d)
    z0, zp = mellin_zeta_prime0(trace, M)
    zs = tuple(mellin_zeta(trace, float(s), M) for s in s_grid)
    prov = {
        "reference_value": "none",
        "vacuum": f"-d^2/dx^2 + {nu!r}",
        "excluded_band_weight": B0,
        "excluded_band_first_moment": B1,
        "c_half": c_half,
        "c_one": c_one,
        "t_grid": (t_min, t_max, t_points),
        "nodes": nodes,
    }
    return PeriodicZetaResult(case.case_id, case.k, b, d, M, tuple(float(s) for s in s_grid), zs,
                              z0, zp, -0.5 * zp, prov)
