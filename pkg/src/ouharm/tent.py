"""Admissible cones, conical square function, and Gaussian tent norms.

The admissible cone at x is Gamma(x) = {(y,t) in D : |y-x| < t}, sitting
inside the region D = {t < m_tilde(y)}.  Three integrals built on it:

* the conical square function

      Sf(x)^2 = integral_0^{2m(x)} 1/gamma(B(x,t))
                integral_{B(x,t)} |t^2 L e^{-t^2 L} f(y)|^2 dgamma(y) dt/t,

  whose upper limit uses the continuous admissibility m (as defined),
  while cones use the dyadic m_tilde -- the two conventions are kept
  verbatim rather than unified;

* the cone integral

      A(u)(x)^2 = double integral over Gamma(x) of
                  |u(y,t)|^2 dgamma(y) dt / (t gamma(B(y,t))),

  note the weight's ball is centered at y, not at x;

* the tent norm  ||u||_{t^p} = || A(u) ||_{Lp(gamma)}  for 1 <= p <= 2.

The slice radius of D is piecewise constant with jumps at dyadic heights,
so all time quadratures pin panel edges at the jumps plus the heights where
a cone edge crosses the slice boundary.  Within a band everything is
vectorized over a (time node) x (space node) grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import NonConvergenceError
from .decomposition import UField
from .gaussian import admissibility, ball_measure, log_ball_measure_grid, lp_norm, region_slice
from .gaussian import _GL_NODES, _GL_WEIGHTS, hermite_basis
from .spectral import HermiteExpansion

__all__ = [
    "ConeSpec",
    "square_function",
    "cone_integral",
    "tent_norm",
    "aperture_compare",
    "region_square_integral",
    "ApertureComparison",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class ConeSpec:
    """Vertex and aperture of an admissible cone {(y,t) in D : |y-x| < a t}."""

    vertex: float
    aperture: float = 1.0

    def __post_init__(self):
        if not self.aperture > 0:
            raise ValueError("aperture must be positive")


def _t_floor(tol: float) -> float:
    # integrands below are O(t^4) dt/t near zero; the discarded head is O(t^4)
    return min(0.25, (1e-3 * tol) ** 0.25)


def _unit_panels(count: int):
    """Nodes/weights of `count` equal Gauss-Legendre panels on [0, 1]."""
    edges = np.linspace(0.0, 1.0, count + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _log_segments(lo: float, hi: float, interior):
    pts = sorted({lo, hi, *(p for p in interior if lo < p < hi)})
    return list(zip(pts[:-1], pts[1:]))


def _field_on_grid(coeffs, damping: float, ts, ys):
    """Values of sum_k c_k (t^2 k) e^{-damping t^2 k} h_k(y) on a (t, y) grid."""
    kmax = len(coeffs) - 1
    h = hermite_basis(kmax, ys)  # (k+1, nt, ny)
    tt = ts * ts
    out = np.zeros(ys.shape, dtype=complex)
    for k in range(1, kmax + 1):
        sym = tt * k * np.exp(-damping * tt * k)  # (nt,)
        out += coeffs[k] * sym[:, None] * h[k]
    return out


def _cone_weight_grid(ys, ts):
    """density(y) / gamma(B(y,t)) on a grid, assembled in the log domain.

    Both factors underflow (or the erf difference cancels) already around
    |y| ~ 6; their ratio is tame, so only the combined exponent is ever
    exponentiated.
    """
    log_bm = log_ball_measure_grid(ys, ts[:, None])
    return np.exp(-ys * ys - 0.5 * math.log(math.pi) - log_bm)


def _band_cone_contribution(coeffs, damping, x, aperture, rho, t_lo, t_hi, level):
    """One slice-radius band of the cone integral, fully vectorized.

    Integrates |field|^2 dgamma(y) dt / (t gamma(B(y,t))) over
    {(y,t) : t_lo < t < t_hi, |y - x| < aperture t, |y| < rho}.
    """
    kinks = []
    if abs(x) > rho:
        kinks.append((abs(x) - rho) / aperture)  # cone enters the slice
    kinks.extend(((rho - x) / aperture, (rho + x) / aperture))  # edge clamping
    if abs(x) > rho:
        entry = (abs(x) - rho) / aperture
        if entry >= t_hi:
            return 0.0
        t_lo = max(t_lo, entry)
    if t_lo >= t_hi:
        return 0.0
    segments = _log_segments(math.log(t_lo), math.log(t_hi),
                             [math.log(k) for k in kinks if k > 0])
    total = 0.0
    for slo, shi in segments:
        count = max(2, int(math.ceil((shi - slo) / 0.4))) * 2**level
        edges = np.linspace(slo, shi, count + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        snodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        sweights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        ts = np.exp(snodes)
        lo = np.maximum(x - aperture * ts, -rho)
        hi = np.minimum(x + aperture * ts, rho)
        widths = np.maximum(hi - lo, 0.0)
        if not np.any(widths > 0):
            continue
        ny = max(2, int(math.ceil(float(widths.max()) / 0.5))) * 2 ** min(level, 2)
        unit_n, unit_w = _unit_panels(ny)
        ys = lo[:, None] + widths[:, None] * unit_n[None, :]
        wy = widths[:, None] * unit_w[None, :]
        vals = _field_on_grid(coeffs, damping, ts, ys)
        weight = _cone_weight_grid(ys, ts)
        inner = np.sum(wy * (vals.real**2 + vals.imag**2) * weight, axis=1)
        total += float(np.sum(sweights * inner))
    return total


def _conical_integral(coeffs, damping, x, aperture, radius_at, jump_heights, tol):
    """Adaptive cone-type integral over bands of constant slice radius."""
    t_min = _t_floor(tol)
    heights = [h for h in jump_heights if h > t_min]
    heights.append(t_min)
    heights = sorted(set(heights))
    bands = list(zip(heights[:-1], heights[1:]))
    prev = None
    for level in range(6):
        total = 0.0
        for t_lo, t_hi in bands:
            rho = radius_at(0.5 * (t_lo + t_hi))
            if rho <= 0.0:
                continue
            total += _band_cone_contribution(coeffs, damping, x, aperture,
                                             rho, t_lo, t_hi, level)
        if prev is not None and abs(total - prev) <= tol * max(total, prev, 1e-30):
            return total
        prev = total
    raise NonConvergenceError(
        f"cone integral at x={x} did not stabilize", last_estimate=prev
    )


def cone_integral(u: UField, cone: ConeSpec, tol: float = 1e-6) -> float:
    """The squared cone functional A(u)(x)^2 over the admissible cone."""
    coeffs = np.asarray(u.f.coefficients)
    t_min = _t_floor(tol)
    jumps = _dyadic_heights(t_min, 1.0)
    return _conical_integral(coeffs, u.delta, cone.vertex, cone.aperture,
                             lambda t: region_slice(t).radius, jumps, tol)


def _dyadic_heights(t_min: float, top: float):
    out = []
    j = 0
    while 2.0**-j > t_min:
        if 2.0**-j <= top:
            out.append(2.0**-j)
        j += 1
    return out


def square_function(f: HermiteExpansion, x: float, tol: float = 1e-6) -> float:
    """Admissible conical square function Sf(x).

    Nested composite quadrature; the inner ball integral is smooth (no
    slice truncation appears in the definition) so only panel doubling is
    needed.
    """
    coeffs = np.asarray(f.coefficients)
    if len(coeffs) <= 1:
        return 0.0
    m = admissibility(x)
    t_hi = 2.0 * m
    t_min = _t_floor(tol) * min(1.0, t_hi)
    prev = None
    for level in range(6):
        count = max(8, int(math.ceil((math.log(t_hi) - math.log(t_min)) / 0.4))) * 2**level
        edges = np.linspace(math.log(t_min), math.log(t_hi), count + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        snodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        sweights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        ts = np.exp(snodes)
        ny = 4 * 2 ** min(level, 2)
        unit_n, unit_w = _unit_panels(ny)
        ys = (x - ts)[:, None] + (2.0 * ts)[:, None] * unit_n[None, :]
        wy = (2.0 * ts)[:, None] * unit_w[None, :]
        vals = _field_on_grid(coeffs, 1.0, ts, ys)
        dens = np.exp(-ys * ys) / _SQRT_PI
        inner = np.sum(wy * (vals.real**2 + vals.imag**2) * dens, axis=1)
        balls = np.array([ball_measure(x, t) for t in ts])
        total = float(np.sum(sweights * inner / balls))
        if prev is not None and abs(total - prev) <= tol * max(total, prev, 1e-30):
            return math.sqrt(total)
        prev = total
    raise NonConvergenceError(f"square function at x={x} did not stabilize",
                              last_estimate=prev)


def tent_norm(u: UField, p: float, tol: float = 1e-5) -> float:
    """||u||_{t^p(gamma)}: the Lp(gamma) norm of x -> sqrt(A(u)(x)^2).

    The outer norm reuses the truncated composite Lp machinery; each cone
    integral underneath runs at a tenfold tighter tolerance.
    """
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"tent norms are defined for 1 <= p <= 2, got {p}")
    inner_tol = tol / 10.0

    def amplitude(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        out = np.empty(xs.shape)
        for i, xv in enumerate(xs):
            if abs(xv) > 27.0:
                out[i] = 0.0  # gamma density underflows; weightless either way
            else:
                out[i] = math.sqrt(cone_integral(u, ConeSpec(float(xv)), inner_tol))
        return out

    return lp_norm(amplitude, p, tol)


def region_square_integral(u: UField, tol: float = 1e-6) -> float:
    """Direct double integral of |u|^2 dgamma(y) dt/t over the region D.

    This is the Fubini partner of the p = 2 tent norm: integrating the
    cone weight 1_{|y-x|<t} dgamma(x) / gamma(B(y,t)) out exactly cancels,
    so ||u||_{t^2}^2 must match this value.
    """
    coeffs = np.asarray(u.f.coefficients)
    t_min = _t_floor(tol)
    heights = sorted({t_min, *_dyadic_heights(t_min, 1.0)})
    bands = list(zip(heights[:-1], heights[1:]))
    y_cap = 8.0 + 0.5 * u.f.degree
    prev = None
    for level in range(6):
        total = 0.0
        for t_lo, t_hi in bands:
            rho = min(region_slice(0.5 * (t_lo + t_hi)).radius, y_cap)
            if rho <= 0:
                continue
            count = max(2, int(math.ceil((math.log(t_hi) - math.log(t_lo)) / 0.4))) * 2**level
            edges = np.linspace(math.log(t_lo), math.log(t_hi), count + 1)
            half = 0.5 * (edges[1:] - edges[:-1])
            mid = 0.5 * (edges[1:] + edges[:-1])
            snodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
            sweights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
            ts = np.exp(snodes)
            ny = max(4, int(math.ceil(2.0 * rho / 0.5))) * 2 ** min(level, 2)
            unit_n, unit_w = _unit_panels(ny)
            ys = -rho + 2.0 * rho * unit_n
            wy = 2.0 * rho * unit_w
            ys_grid = np.broadcast_to(ys, (len(ts), len(ys)))
            vals = _field_on_grid(coeffs, u.delta, ts, ys_grid)
            dens = np.exp(-ys * ys) / _SQRT_PI
            inner = np.sum(wy * dens * (vals.real**2 + vals.imag**2), axis=1)
            total += float(np.sum(sweights * inner))
        if prev is not None and abs(total - prev) <= tol * max(total, prev, 1e-30):
            return total
        prev = total
    raise NonConvergenceError("region integral did not stabilize", last_estimate=prev)


@dataclass(frozen=True)
class ApertureComparison:
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        if self.lhs == 0.0:
            return 0.0
        return self.lhs / self.rhs


def aperture_compare(f: HermiteExpansion, delta: float, x: float,
                     tol: float = 1e-5) -> ApertureComparison:
    """Both sides of the change-of-aperture comparison at x.

    Left: the cone integral of s^2 L e^{-s^2 L} f over Gamma(x) intersected
    with the shrunken region D' = {s < sqrt(delta) m_tilde(y)}.  Right: the
    square of the conical square function.  The ratio is reported; only its
    finiteness is asserted by callers, the implied constant is empirical.
    """
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    coeffs = np.asarray(f.coefficients)
    root = math.sqrt(delta)

    def radius_at(s):
        scaled = s / root
        return region_slice(scaled).radius if scaled > 0 else 0.0

    t_min = _t_floor(tol)
    jumps = [root * h for h in _dyadic_heights(t_min / root, 1.0)]
    lhs = _conical_integral(coeffs, 1.0, x, 1.0, radius_at, jumps, tol)
    s = square_function(f, x, tol)
    return ApertureComparison(lhs, s * s)
