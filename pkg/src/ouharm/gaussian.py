"""Gaussian measure geometry in one dimension.

The reference measure throughout is

    dgamma(x) = pi^(-1/2) exp(-x^2) dx,

a probability measure on the real line.  This module collects the
geometric primitives everything else is built on:

* balls and dyadic annuli and their gamma-measures (closed forms via erf);
* the admissibility function ``m(x) = min(1, 1/|x|)`` together with its
  dyadic discretization ``m_tilde`` and the associated region
  ``D = {(y,t) : 0 < t < m_tilde(y)}``;
* orthonormal Hermite polynomials, the eigenfunctions of the
  Ornstein-Uhlenbeck operator ``L = -1/2 Delta + x d/dx``;
* Gauss-Hermite quadrature against gamma and a truncated composite
  Gauss-Legendre Lp(gamma) norm for non-polynomial integrands.

Geometry is deliberately fixed to dimension one: every estimate exercised
downstream is dimension-generic, and n = 1 keeps all nested quadratures
two-level while the erf closed forms stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy import special

from .errors import NonConvergenceError

__all__ = [
    "GaussianContext",
    "DEFAULT_CONTEXT",
    "RegionSlice",
    "Annulus",
    "gaussian_density",
    "ball_measure",
    "log_ball_measure",
    "annulus",
    "annulus_star",
    "annulus_measure",
    "log_annulus_measure",
    "admissibility",
    "discrete_admissibility",
    "region_slice",
    "hermite_orthonormal",
    "hermite_basis",
    "gamma_quadrature",
    "lp_norm",
    "interval_lp_norm",
]

_SQRT_PI = math.sqrt(math.pi)
_LOG_SQRT_PI = 0.5 * math.log(math.pi)

# 16-point Gauss-Legendre rule on [-1, 1]; shared by all composite panels.
_GL_NODES, _GL_WEIGHTS = leggauss(16)


@dataclass(frozen=True)
class GaussianContext:
    """Ambient parameters: dimension, maximal Hermite degree, base tolerance."""

    dimension: int = 1
    degree_max: int = 16
    tol: float = 1e-10

    def __post_init__(self):
        if self.dimension != 1:
            raise ValueError("geometric operations are implemented for dimension 1 only")
        if self.degree_max < 1:
            raise ValueError("degree_max must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


DEFAULT_CONTEXT = GaussianContext()


@dataclass(frozen=True)
class RegionSlice:
    """Spatial slice {|y| < radius} of the admissible region at height t.

    ``radius == 0`` encodes the empty slice (every t >= 1).
    """

    t: float
    radius: float

    def contains(self, y):
        return np.abs(y) < self.radius


@dataclass(frozen=True)
class Annulus:
    """Dyadic annulus C_k (or enlarged C_k^* when ``starred``)."""

    k: int
    inner: float
    outer: float
    starred: bool = False

    def indicator(self, x):
        a = np.abs(x)
        return (a >= self.inner) & (a < self.outer)


def gaussian_density(x):
    """Density of gamma with respect to Lebesgue measure: pi^(-1/2) e^(-x^2)."""
    return np.exp(-np.square(x)) / _SQRT_PI


def ball_measure(center: float, radius: float) -> float:
    """gamma(B(center, radius)) = (erf(center+radius) - erf(center-radius)) / 2."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if math.isinf(radius):
        return 1.0
    return 0.5 * (math.erf(center + radius) - math.erf(center - radius))


def log_ball_measure(center: float, radius: float) -> float:
    """log gamma(B(center, radius)), stable far out where erf saturates.

    For |center| large both erf arguments are ~1 and the direct difference
    cancels; rewrite through the scaled complement erfcx(z) = e^{z^2} erfc(z).
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    c = abs(center)
    lo, hi = c - radius, c + radius
    if lo < 2.0:
        return math.log(ball_measure(center, radius))
    # log erfc(z) = log erfcx(z) - z^2 for z > 0
    log_erfc_lo = math.log(special.erfcx(lo)) - lo * lo
    log_erfc_hi = math.log(special.erfcx(hi)) - hi * hi
    return math.log(0.5) + log_erfc_lo + math.log1p(-math.exp(log_erfc_hi - log_erfc_lo))


def log_ball_measure_grid(centers, radii):
    """Elementwise log gamma(B(center, radius)) on broadcast arrays.

    Once |center| - radius exceeds ~2 the plain erf difference starts to
    cancel (both arguments approach 1), so the tail switches to the scaled
    complementary form; the cone-integral weights rely on this.
    """
    a = np.abs(np.asarray(centers, dtype=float))
    t = np.asarray(radii, dtype=float)
    a, t = np.broadcast_arrays(a, t)
    lo = a - t
    hi = a + t
    out = np.empty(a.shape)
    near = lo < 2.0
    if np.any(near):
        direct = 0.5 * (special.erf(hi[near]) - special.erf(lo[near]))
        out[near] = np.log(direct)
    far = ~near
    if np.any(far):
        l1 = np.log(special.erfcx(lo[far])) - lo[far] ** 2
        l2 = np.log(special.erfcx(hi[far])) - hi[far] ** 2
        out[far] = math.log(0.5) + l1 + np.log1p(-np.exp(l2 - l1))
    return out


def annulus(k: int) -> Annulus:
    """C_0 = B(0,1); C_k = B(0, 2^k) \\ B(0, 2^(k-1)) for k >= 1."""
    if k < 0:
        raise ValueError("annulus index must be nonnegative")
    if k == 0:
        return Annulus(0, 0.0, 1.0)
    return Annulus(k, 2.0 ** (k - 1), 2.0**k)


def annulus_star(k: int) -> Annulus:
    """C_0^* = B(0,2); C_1^* = B(0,4); C_k^* = B(0, 2^(k+1)) \\ B(0, 2^(k-2))."""
    if k < 0:
        raise ValueError("annulus index must be nonnegative")
    if k == 0:
        return Annulus(0, 0.0, 2.0, starred=True)
    if k == 1:
        return Annulus(1, 0.0, 4.0, starred=True)
    return Annulus(k, 2.0 ** (k - 2), 2.0 ** (k + 1), starred=True)


def _log_half_erfc(z: float) -> float:
    # log( erfc(z) / 2 ) for z >= 0 without underflow
    return math.log(0.5) + math.log(special.erfcx(z)) - z * z


def annulus_measure(a: Annulus) -> float:
    """gamma-measure of a centered annulus, via complementary error functions.

    Computed as erfc(inner) - erfc(outer) (both halves of the line), which
    avoids the catastrophic cancellation of erf differences once the radii
    exceed a few units.
    """
    if a.inner == 0.0:
        return math.erf(a.outer)
    return math.erfc(a.inner) - math.erfc(a.outer)


def log_annulus_measure(a: Annulus) -> float:
    """log gamma(C), usable beyond the underflow range of annulus_measure."""
    if a.inner == 0.0:
        return math.log(math.erf(a.outer))
    li = _log_half_erfc(a.inner) + math.log(2.0)
    lo = _log_half_erfc(a.outer) + math.log(2.0)
    return li + math.log1p(-math.exp(lo - li))


def admissibility(x) -> float:
    """m(x) = min(1, 1/|x|)."""
    a = abs(x)
    return 1.0 if a <= 1.0 else 1.0 / a


def discrete_admissibility(x) -> float:
    """Dyadic admissibility: 1 on |x| < 1, and 2^(-k) on 2^(k-1) <= |x| < 2^k.

    Interval boundaries are left-closed; frexp makes the dyadic comparison
    exact in floating point.
    """
    a = abs(x)
    if a < 1.0:
        return 1.0
    _, k = math.frexp(a)  # 2^(k-1) <= a < 2^k with k >= 1 here
    return 2.0**-k


def region_slice(t: float) -> RegionSlice:
    """Slice {y : m_tilde(y) > t} of the admissible region at height t."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if t >= 1.0:
        return RegionSlice(t, 0.0)
    k = 0
    while 0.5 ** (k + 1) > t:
        k += 1
    return RegionSlice(t, 2.0**k)


def hermite_basis(degree: int, x):
    """Stacked orthonormal Hermite values h_0..h_degree at x.

    Uses the normalized three-term recurrence
        h_{k+1}(x) = sqrt(2/(k+1)) x h_k(x) - sqrt(k/(k+1)) h_{k-1}(x),
    equivalent to H_{k+1} = 2x H_k - 2k H_{k-1} after dividing by
    sqrt(2^k k!).  Returns an array of shape (degree+1,) + shape(x).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((degree + 1,) + x.shape, dtype=float)
    out[0] = 1.0
    if degree >= 1:
        out[1] = math.sqrt(2.0) * x
    for k in range(1, degree):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1.0)) * out[k - 1]
    return out


def hermite_orthonormal(k: int, x, ctx: GaussianContext = DEFAULT_CONTEXT):
    """h_k(x) = H_k(x) / sqrt(2^k k!), orthonormal in L^2(gamma)."""
    if not 0 <= k <= ctx.degree_max:
        raise ValueError(f"degree {k} outside [0, {ctx.degree_max}]")
    values = hermite_basis(k, x)[k]
    return values if np.ndim(x) else float(values)


def gamma_quadrature(n: int):
    """Gauss-Hermite nodes and weights normalized for gamma.

    Exact for polynomial integrands of degree <= 2n - 1; the weights sum
    to one because gamma is a probability measure.
    """
    if n < 1:
        raise ValueError("node count must be at least 1")
    nodes, weights = hermgauss(n)
    return nodes, weights / _SQRT_PI


def _panel_nodes(edges):
    """Flattened 16-point Gauss-Legendre nodes/weights for consecutive panels."""
    lo = edges[:-1]
    hi = edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    weights = half[:, None] * _GL_WEIGHTS[None, :]
    return nodes.ravel(), weights.ravel()


def _gamma_power_integral(f, p, nodes, weights):
    """(integral of |f|^p dgamma over the given nodes)^(1/p), via log factoring.

    The integrand is assembled as exp(p log|f| - x^2 - log sqrt(pi) - M)
    with M the maximum of that exponent, so the dominating node contributes
    exactly one: no overflow for the very large exponents produced by
    hypercontractive pairings, and no underflow when the pointwise max of
    |f| sits outside the density's support.
    """
    vals = np.abs(np.asarray(f(nodes)))
    if not np.all(np.isfinite(vals)):
        return math.inf
    with np.errstate(divide="ignore"):
        logs = p * np.log(vals) - np.square(nodes) - _LOG_SQRT_PI
    m = float(np.max(logs, initial=-math.inf))
    if m == -math.inf:
        return 0.0
    total = float(np.sum(weights * np.exp(logs - m)))
    return math.exp((m + math.log(total)) / p)


def lp_norm(f, p: float, tol: float = 1e-10) -> float:
    """(integral |f|^p dgamma)^(1/p) for an evaluable f of polynomial growth.

    Composite 16-point Gauss-Legendre on [-R, R], starting from R = 8 with
    64 panels and doubling both together (at most four times) until two
    successive estimates agree to relative ``tol``.  Gauss-Hermite exactness
    is useless here: |f|^p is not smooth at zeros of f, so panels it is.

    Raises NonConvergenceError if the doubling budget is exhausted.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    prev = None
    seen_positive = False
    for i in range(5):
        r = 8.0 * 2**i
        panels = 64 * 2**i
        nodes, weights = _panel_nodes(np.linspace(-r, r, panels + 1))
        est = _gamma_power_integral(f, p, nodes, weights)
        if not math.isfinite(est):
            raise NonConvergenceError(
                f"lp_norm integrand overflowed at truncation radius {r}",
                last_estimate=est)
        if prev is not None:
            # a zero pair after positive estimates means the max-factored
            # integrand collapsed under super-polynomial growth; not converged
            if est == prev == 0.0 and not seen_positive:
                return est
            if est > 0.0 and abs(est - prev) <= tol * max(abs(est), abs(prev)):
                return est
        seen_positive = seen_positive or est > 0.0
        prev = est
    raise NonConvergenceError(
        f"lp_norm did not stabilize after 4 doublings (last estimate {prev})",
        last_estimate=prev,
    )


def interval_lp_norm(f, p: float, intervals, tol: float = 1e-10,
                     max_rounds: int = 8) -> float:
    """Lp(gamma) norm of f restricted to a union of intervals.

    Panels never straddle an interval boundary, so indicator truncations
    stay invisible to the quadrature.  Nodes where the gamma density
    underflows are skipped: their contribution is an exact floating zero.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    clipped = [(lo, hi) for lo, hi in intervals if hi > lo]
    if not clipped:
        return 0.0
    prev = None
    for level in range(max_rounds):
        all_nodes = []
        all_weights = []
        for lo, hi in clipped:
            if min(abs(lo), abs(hi)) > 27.0 and lo * hi > 0:
                continue  # e^{-x^2} underflows on the whole interval
            count = max(2, int(math.ceil((hi - lo) / 0.5))) * 2**level
            nodes, weights = _panel_nodes(np.linspace(lo, hi, count + 1))
            all_nodes.append(nodes)
            all_weights.append(weights)
        if not all_nodes:
            return 0.0
        est = _gamma_power_integral(f, p, np.concatenate(all_nodes), np.concatenate(all_weights))
        if prev is not None:
            if est == prev == 0.0 or abs(est - prev) <= tol * max(abs(est), abs(prev)):
                return est
        prev = est
    raise NonConvergenceError(
        f"interval_lp_norm did not stabilize after {max_rounds} rounds",
        last_estimate=prev,
    )
