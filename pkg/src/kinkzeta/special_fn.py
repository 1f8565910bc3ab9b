"""Special-function kernel.

Complete elliptic integrals and Jacobi elliptic functions are computed with
the arithmetic-geometric mean (descending Landen) scheme.  The error
function and log-gamma come from libm, digamma from scipy; they are wrapped
here so that every caller gets the same domain checks.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special as _sp

__all__ = [
    "DomainError",
    "agm",
    "elliptic_K",
    "elliptic_E",
    "jacobi_sn_cn_dn",
    "erf",
    "erfc",
    "log_gamma",
    "digamma",
    "rgamma",
]

_AGM_TOL = 4e-16
_AGM_MAXITER = 64
_SERIES_KAPPA = 1e-8


class DomainError(ValueError):
    """Argument outside the domain on which a function is defined."""


def _check_finite(name, value):
    if isinstance(value, np.ndarray):
        if not np.all(np.isfinite(value)):
            raise DomainError(f"{name} must be finite")
    elif not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two non-negative numbers."""
    for _ in range(_AGM_MAXITER):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


@lru_cache(maxsize=256)
def _agm_sequence(k: float):
    # (a_n, c_n) with a_0 = 1, b_0 = k', c_0 = k; stops when c_n is negligible
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    a, b, c = 1.0, kp, k
    seq_a, seq_c = [a], [c]
    for _ in range(_AGM_MAXITER):
        if abs(c) <= _AGM_TOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        seq_a.append(a)
        seq_c.append(c)
    return tuple(seq_a), tuple(seq_c)


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, K(k) = pi / (2 AGM(1, k'))."""
    _check_finite("k", k)
    if not 0.0 <= k < 1.0:
        raise DomainError(f"elliptic_K needs 0 <= k < 1, got {k}")
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * agm(1.0, kp))


def elliptic_E(k: float) -> float:
    """Complete elliptic integral of the second kind.

    Uses E = K (1 - sum_n 2^(n-1) c_n^2) over the AGM sequence; E(1) = 1.
    """
    _check_finite("k", k)
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"elliptic_E needs 0 <= k <= 1, got {k}")
    if k == 1.0:
        return 1.0
    seq_a, seq_c = _agm_sequence(k)
    s = 0.5 * seq_c[0] ** 2
    for n in range(1, len(seq_c)):
        s += 2.0 ** (n - 1) * seq_c[n] ** 2
    return math.pi / (2.0 * seq_a[-1]) * (1.0 - s)


def _jacobi_small_kappa(x, kappa):
    # first order in kappa = k^2 (DLMF 22.10.4-6)
    s, c = np.sin(x), np.cos(x)
    corr = 0.25 * kappa * (x - s * c)
    sn = s - corr * c
    cn = c + corr * s
    dn = 1.0 - 0.5 * kappa * s * s
    return sn, cn, dn


def _jacobi_agm(x, k):
    seq_a, seq_c = _agm_sequence(k)
    n = len(seq_a) - 1
    phi = (2.0 ** n) * seq_a[-1] * x
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(seq_c[j] / seq_a[j] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    # dn^2 = k'^2 + k^2 cn^2 keeps full absolute accuracy as k -> 1
    dn = np.sqrt((1.0 - k) * (1.0 + k) + k * k * cn * cn)
    return sn, cn, dn


def _jacobi_agm_scalar(x, k):
    seq_a, seq_c = _agm_sequence(k)
    n = len(seq_a) - 1
    phi = (2.0 ** n) * seq_a[-1] * x
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + math.asin(seq_c[j] / seq_a[j] * math.sin(phi)))
    sn = math.sin(phi)
    cn = math.cos(phi)
    dn = math.sqrt((1.0 - k) * (1.0 + k) + k * k * cn * cn)
    return sn, cn, dn


@lru_cache(maxsize=256)
def _quarter_period(k: float) -> float:
    return elliptic_K(k)


def jacobi_sn_cn_dn(x, k: float):
    """Jacobi elliptic functions (sn, cn, dn) of argument ``x`` and modulus ``k``.

    ``x`` may be a scalar or an array; ``k`` is a scalar in [0, 1].  The
    argument is reduced modulo 4K before the AGM back-recursion, and k = 1
    takes the hyperbolic branch (tanh, sech, sech) directly.
    """
    _check_finite("k", k)
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"modulus must lie in [0, 1], got {k}")
    k = float(k)
    if np.ndim(x) == 0:
        x = float(x)
        _check_finite("x", x)
        if k == 1.0:
            ch = math.cosh(x)
            return math.tanh(x), 1.0 / ch, 1.0 / ch
        period = 4.0 * _quarter_period(k)
        xr = x - period * round(x / period)
        if k * k < _SERIES_KAPPA:
            sn, cn, dn = _jacobi_small_kappa(xr, k * k)
            return float(sn), float(cn), float(dn)
        return _jacobi_agm_scalar(xr, k)

    xa = np.asarray(x, dtype=float)
    _check_finite("x", xa)
    if k == 1.0:
        sn = np.tanh(xa)
        cn = 1.0 / np.cosh(xa)
        return sn, cn, cn.copy()
    period = 4.0 * _quarter_period(k)
    xr = xa - period * np.round(xa / period)
    if k * k < _SERIES_KAPPA:
        return _jacobi_small_kappa(xr, k * k)
    return _jacobi_agm(xr, k)


def erf(x):
    """Error function (libm)."""
    if np.ndim(x) == 0:
        _check_finite("x", x)
        return math.erf(x)
    xa = np.asarray(x, dtype=float)
    _check_finite("x", xa)
    return _sp.erf(xa)


def erfc(x):
    """Complementary error function (libm)."""
    if np.ndim(x) == 0:
        _check_finite("x", x)
        return math.erfc(x)
    xa = np.asarray(x, dtype=float)
    _check_finite("x", xa)
    return _sp.erfc(xa)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    _check_finite("x", x)
    if x <= 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def digamma(x: float) -> float:
    """psi(x) = Gamma'(x)/Gamma(x); poles at the non-positive integers."""
    _check_finite("x", x)
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"digamma has a pole at {x}")
    return float(_sp.digamma(x))


def rgamma(x: float) -> float:
    """1/Gamma(x), entire; zero at the non-positive integers."""
    _check_finite("x", x)
    return float(_sp.rgamma(x))
