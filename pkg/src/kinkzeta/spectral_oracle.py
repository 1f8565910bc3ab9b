"""Finite-difference spectra of L = -d^2/dx^2 + u(x).

Independent numerical ground truth for the closed forms: Dirichlet boxes for
kinks, Bloch-twisted cells for periodic potentials, vacuum-subtracted heat
traces and a Riccati-integrated Wronskian Green function.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy import linalg
from scipy.integrate import solve_ivp

from .classical import FluctuationCase, fluctuation_potential
from .special_fn import DomainError

__all__ = [
    "Grid1D",
    "SpectrumResult",
    "SpectralConvergenceError",
    "TruncationWarning",
    "fd_spectrum",
    "dirichlet_grid",
    "bloch_grid",
    "kink_box_spectrum",
    "bloch_spectrum",
    "band_edges",
    "heat_trace_fd",
    "wronskian_green",
]

KINK_HALF_WIDTH = 20.0
KINK_NODES = 4000
CELL_NODES = 2000
BLOCH_ANGLES = 64


class SpectralConvergenceError(RuntimeError):
    pass


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int
    bc: str = "dirichlet"
    theta: float = 0.0

    def __post_init__(self):
        if self.bc not in ("dirichlet", "periodic", "bloch"):
            raise DomainError(f"unknown boundary condition {self.bc!r}")
        if self.n < 64:
            raise DomainError("grid needs at least 64 nodes")
        if not self.x_max > self.x_min:
            raise DomainError("empty interval")

    @property
    def h(self) -> float:
        if self.bc == "dirichlet":
            return (self.x_max - self.x_min) / (self.n - 1)
        return (self.x_max - self.x_min) / self.n

    @property
    def nodes(self) -> np.ndarray:
        """Unknown nodes: interior points (Dirichlet) or one period without its endpoint."""
        if self.bc == "dirichlet":
            return self.x_min + self.h * np.arange(1, self.n - 1)
        return self.x_min + self.h * np.arange(self.n)

    @property
    def phase(self) -> float:
        return 0.0 if self.bc == "periodic" else self.theta


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    grid: Grid1D
    tag: str = ""


def dirichlet_grid(half_width: float, n: int) -> Grid1D:
    return Grid1D(-half_width, half_width, n, "dirichlet")


def bloch_grid(period: float, n: int, theta: float) -> Grid1D:
    return Grid1D(0.0, period, n, "bloch", theta)


def _zigzag(n: int) -> np.ndarray:
    order = np.empty(n, dtype=int)
    order[0::2] = np.arange((n + 1) // 2)
    order[1::2] = n - 1 - np.arange(n // 2)
    return order


def _bloch_band(diag: np.ndarray, h: float, theta: float) -> np.ndarray:
    """Lower band storage (3 x n) of the Bloch matrix in zigzag node order.

    The ring coupling i <-> i+1 (with the twist on the closing bond) becomes a
    pentadiagonal Hermitian matrix when nodes are visited 0, n-1, 1, n-2, ...
    """
    n = diag.size
    order = _zigzag(n)
    pos = np.empty(n, dtype=int)
    pos[order] = np.arange(n)
    off = -1.0 / (h * h)
    band = np.zeros((3, n), dtype=complex)
    band[0] = diag[order]
    for i in range(n):
        j = (i + 1) % n
        # H[j, i] for the bond i -> j; the twist sits on the bond n-1 -> 0
        val = off * (np.exp(1j * theta) if j == 0 else 1.0)
        pi, pj = pos[i], pos[j]
        if pj < pi:
            # store H[pi, pj] = conj(H[j->i entry]) so the lower triangle is used
            pi, pj, val = pj, pi, np.conj(val)
        band[pj - pi, pi] = val
    return band


def fd_spectrum(u: Union[Callable, np.ndarray], grid: Grid1D, count: Optional[int] = None,
                tag: str = "") -> SpectrumResult:
    """Eigenvalues of the three-point discretisation of -d^2/dx^2 + u.

    ``u`` is a callable or an array sampled at ``grid.nodes``.  ``count``
    limits the output to the lowest eigenvalues.
    """
    x = grid.nodes
    uv = np.asarray(u(x) if callable(u) else u, dtype=float)
    if uv.shape != x.shape:
        raise DomainError("potential samples do not match the grid")
    h = grid.h
    diag = 2.0 / (h * h) + uv
    select, rng = ("a", None) if count is None else ("i", (0, count - 1))
    try:
        if grid.bc == "dirichlet":
            off = np.full(x.size - 1, -1.0 / (h * h))
            ev = linalg.eigh_tridiagonal(diag, off, eigvals_only=True, select=select,
                                         select_range=rng)
        else:
            band = _bloch_band(diag, h, grid.phase)
            ev = linalg.eig_banded(band, lower=True, eigvals_only=True, select=select,
                                   select_range=rng)
    except linalg.LinAlgError as exc:
        raise SpectralConvergenceError(str(exc)) from exc
    return SpectrumResult(np.sort(np.asarray(ev, dtype=float)), grid, tag)


def _free_dirichlet(grid: Grid1D, nu: float) -> np.ndarray:
    m = grid.n - 2
    j = np.arange(1, m + 1)
    return nu + 4.0 / grid.h**2 * np.sin(0.5 * math.pi * j / (m + 1)) ** 2


def _free_bloch(grid: Grid1D, nu: float) -> np.ndarray:
    j = np.arange(grid.n)
    return np.sort(nu + 4.0 / grid.h**2 * np.sin((grid.phase + 2 * math.pi * j) / (2 * grid.n)) ** 2)


# ---------------------------------------------------------------------------
# cached spectra for the fluctuation cases


def _case_key(case: FluctuationCase):
    return (case.case_id, case.b, case.k)


@lru_cache(maxsize=64)
def _kink_box(key, half_width: float, n: int, count: Optional[int]) -> np.ndarray:
    case = FluctuationCase(*key)
    grid = dirichlet_grid(half_width / case.b, n)
    return fd_spectrum(lambda x: fluctuation_potential(case, x), grid, count).eigenvalues


def kink_box_spectrum(case: FluctuationCase, half_width: float = KINK_HALF_WIDTH,
                      n: int = KINK_NODES, count: Optional[int] = None) -> SpectrumResult:
    """Dirichlet spectrum on [-half_width/b, half_width/b]."""
    grid = dirichlet_grid(half_width / case.b, n)
    ev = _kink_box(_case_key(case), half_width, n, count)
    return SpectrumResult(ev, grid, f"case {case.case_id} box")


@lru_cache(maxsize=256)
def _bloch(key, n: int, theta: float, count: Optional[int]) -> np.ndarray:
    case = FluctuationCase(*key)
    grid = bloch_grid(case.period, n, theta)
    return fd_spectrum(lambda x: fluctuation_potential(case, x), grid, count).eigenvalues


def bloch_spectrum(case: FluctuationCase, theta: float, n: int = CELL_NODES,
                   count: Optional[int] = None) -> SpectrumResult:
    if not case.is_periodic or case.k >= 1.0:
        raise DomainError("Bloch spectra need a periodic case with k < 1")
    return SpectrumResult(_bloch(_case_key(case), n, float(theta), count),
                          bloch_grid(case.period, n, theta), f"case {case.case_id} theta={theta:g}")


def _theta_samples(count: int):
    """Half of a periodic trapezoid rule over [0, 2 pi) using theta <-> -theta symmetry."""
    if count % 2:
        raise DomainError("number of Bloch angles must be even")
    half = count // 2
    thetas = 2.0 * math.pi * np.arange(half + 1) / count
    weights = np.full(half + 1, 2.0 / count)
    weights[0] = weights[-1] = 1.0 / count
    return thetas, weights


def band_edges(case: FluctuationCase, resolution: int = 16, n: int = CELL_NODES) -> list:
    """Band edges [min_0, max_0, min_1, max_1, ..., min_{2g}] for a periodic case.

    At k = 1 the cell is infinite; the kink limit is then reported from a
    Dirichlet box as its discrete eigenvalues followed by the continuum edge.
    """
    if not case.is_periodic:
        raise DomainError("band edges need case B or D")
    count = 2 * case.n_gaps + 1
    if case.k >= 1.0:
        kink = case.degenerate()
        ev = kink_box_spectrum(kink, count=count).eigenvalues
        edge = kink.u0
        return [float(v) for v in ev if v < edge - 1e-3] + [edge]
    thetas = np.linspace(0.0, math.pi, resolution + 1)
    rows = np.array([bloch_spectrum(case, th, n, count).eigenvalues for th in thetas])
    edges = []
    for j in range(count):
        edges.append(float(rows[:, j].min()))
        if len(edges) < count:
            edges.append(float(rows[:, j].max()))
    return edges[:count]


# ---------------------------------------------------------------------------
# heat traces


def _trace_kink(case: FluctuationCase, t: np.ndarray, half_width: float, n: int) -> np.ndarray:
    spec = kink_box_spectrum(case, half_width, n)
    free = _free_dirichlet(spec.grid, case.u0)
    return np.array([np.sum(np.exp(-spec.eigenvalues * tt)) - np.sum(np.exp(-free * tt)) for tt in t])


def _trace_cell(case: FluctuationCase, t: np.ndarray, n: int, angles: int) -> np.ndarray:
    thetas, weights = _theta_samples(angles)
    out = np.zeros_like(t)
    for th, w in zip(thetas, weights):
        ev = bloch_spectrum(case, th, n).eigenvalues
        free = _free_bloch(bloch_grid(case.period, n, th), case.u0)
        out += w * np.array([np.sum(np.exp(-ev * tt)) - np.sum(np.exp(-free * tt)) for tt in t])
    return out


def heat_trace_fd(case: FluctuationCase, t, half_width: float = KINK_HALF_WIDTH,
                  n: Optional[int] = None, angles: int = BLOCH_ANGLES,
                  check_truncation: bool = False, tol: float = 1e-3):
    """Vacuum-subtracted trace sum_j [exp(-lambda_j t) - exp(-lambda0_j t)].

    The comparison operator is -d^2/dx^2 + u0 on the same grid.  Periodic
    cases return the trace per potential period (theta-averaged Bloch sums).
    With ``check_truncation`` the kink box is doubled and a
    :class:`TruncationWarning` is issued when the result moves by more than
    ``tol``.
    """
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tt <= 0):
        raise DomainError("t must be positive")
    if case.is_periodic and case.k < 1.0:
        out = _trace_cell(case, tt, n or CELL_NODES, angles)
    else:
        kink = case.degenerate() if case.is_periodic else case
        nn = n or KINK_NODES
        out = _trace_kink(kink, tt, half_width, nn)
        if check_truncation:
            big = _trace_kink(kink, tt, 2 * half_width, 2 * nn)
            drift = float(np.max(np.abs(big - out)))
            if drift > tol:
                warnings.warn(f"box truncation changes the trace by {drift:.2e}", TruncationWarning)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Wronskian Green function


def _riccati(u: Callable, p: float, x0: float, x1: float, w0: float) -> float:
    sol = solve_ivp(lambda x, w: u(x) + p - w * w, (x0, x1), [w0], method="DOP853",
                    rtol=1e-12, atol=1e-12)
    if not sol.success or not np.isfinite(sol.y[0, -1]):
        raise SpectralConvergenceError(f"Riccati integration failed: {sol.message}")
    return float(sol.y[0, -1])


def wronskian_green(u: Union[Callable, FluctuationCase], p: float, x: float,
                    span: Optional[float] = None) -> float:
    """Diagonal Green function psi_-(x) psi_+(x) / W of L + p.

    The decaying solutions are carried as log-derivatives w = psi'/psi
    obeying w' = u + p - w^2; w_+ is integrated leftward from x + span and
    w_- rightward from x - span, the directions in which both are stable.
    Then G = 1 / (w_- - w_+).
    """
    if isinstance(u, FluctuationCase):
        case = u
        scale = case.b
        u = lambda y, case=case: fluctuation_potential(case, y)
    else:
        scale = 1.0
    if span is None:
        span = 60.0 / scale
    xr, xl = x + span, x - span
    # any negative (positive) start relaxes onto w_+ (w_-); take the local
    # maximum of u + p near each end so the start is real even where u + p < 0
    ar = p + max(float(u(y)) for y in np.linspace(xr - 4.0 / scale, xr, 65))
    al = p + max(float(u(y)) for y in np.linspace(xl, xl + 4.0 / scale, 65))
    if ar <= 0 or al <= 0:
        raise DomainError("p lies below the potential everywhere near the integration ends")
    w_plus = _riccati(u, p, xr, x, -math.sqrt(ar))
    w_minus = _riccati(u, p, xl, x, math.sqrt(al))
    return 1.0 / (w_minus - w_plus)
