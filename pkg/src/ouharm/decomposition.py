"""Admissible three-part decomposition of a spectral multiplier.

For zero-mean polynomials f the multiplier admits the integral
representation (with parameters delta, delta' > 0 and kappa >= 1)

    phi(L) f = c * integral_0^inf PhiS(t^2) (t^2 L)^2 e^{-(d'+d) t^2 L} f dt/t
             = c * ( pi1 u + pi2 f + pi3 f ),

where PhiS(t) = Phi((delta'+delta) t), the field

    u(., t) = 1_D(., t) t^2 L e^{-delta t^2 L} f

lives on the admissible region D = {(y,t) : t < m_tilde(y)}, and the three
parts split the time integral at m_tilde(.)/kappa and the space variable
along D:

    pi1 u  = integral_0^{m~/kappa} PhiS(t^2) t^2 L e^{-d' t^2 L} u(., t) dt/t
    pi2 f  = same with 1_{D^c}(., t) t^2 L e^{-d t^2 L} f in place of u
    pi3 f  = integral_{m~/kappa}^inf PhiS(t^2) (t^2 L)^2 e^{-(d'+d) t^2 L} f dt/t.

The substitution s = (delta'+delta) t^2 (ds/s = 2 dt/t) fixes the constant:
c = 2 (delta' + delta)^2.  pi1 and pi2 act on indicator-truncated
polynomials and therefore go through the Mehler kernel; pi3 is purely
spectral.  ``reconstruction_residual`` closes the loop by comparing
c (pi1 + pi2 + pi3) against phi(L) f on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import NonConvergenceError
from .gaussian import _panel_nodes, discrete_admissibility, region_slice
from .mehler import TruncatedPolynomial, kernel_apply_t2l
from .multipliers import PhiSpec, apply_multiplier
from .spectral import HermiteExpansion, t2l_semigroup

__all__ = [
    "DecompositionParams",
    "UField",
    "scaling_constant",
    "build_u",
    "pi1",
    "pi2",
    "pi3",
    "reconstruction_residual",
]


@dataclass(frozen=True)
class DecompositionParams:
    """Parameters (delta, delta', kappa) plus the shared dt/t tolerance.

    kappa is expected to be a power of 4 so the dyadic time-partition
    bookkeeping of the verification suites stays exact.
    """

    delta: float = 1.0 / 128.0
    delta_prime: float = 1.0 / 128.0
    kappa: float = 4.0
    t_tol: float = 1e-7

    def __post_init__(self):
        if not (self.delta > 0 and self.delta_prime > 0):
            raise ValueError("delta and delta' must be positive")
        if self.kappa < 1:
            raise ValueError("kappa must be at least 1")
        if not self.t_tol > 0:
            raise ValueError("t_tol must be positive")

    @property
    def delta_sum(self) -> float:
        return self.delta + self.delta_prime

    def constraint_flags(self):
        """Proof-side smallness hypotheses that the current values violate.

        Violations are reported, never enforced: the decomposition identity
        itself holds for any positive parameters.
        """
        flags = []
        if not self.delta_prime < 4.0**-3:
            flags.append("delta' >= 4^-3 (intermediate-part hypothesis)")
        if not 8.0 * self.delta_sum <= 4.0**-3:
            flags.append("8(delta'+delta) > 4^-3 (non-admissible-part hypothesis)")
        log4 = math.log(self.kappa, 4.0)
        if abs(log4 - round(log4)) > 1e-12:
            flags.append("kappa is not a power of 4 (dyadic partition bookkeeping)")
        return flags


def scaling_constant(delta: float, delta_prime: float) -> float:
    """c = 2 (delta' + delta)^2, forced by the substitution s = (d'+d) t^2."""
    if not (delta > 0 and delta_prime > 0):
        raise ValueError("delta and delta' must be positive")
    return 2.0 * (delta + delta_prime) ** 2


@dataclass(frozen=True)
class UField:
    """u(y, t) = 1_D(y, t) [t^2 L e^{-delta t^2 L} f](y) for zero-mean f."""

    f: HermiteExpansion
    delta: float

    def poly_at(self, t: float) -> HermiteExpansion:
        """The polynomial factor t^2 L e^{-delta t^2 L} f at fixed t."""
        return t2l_semigroup(self.f, t, self.delta)

    def slice_radius(self, t: float) -> float:
        return region_slice(t).radius

    def truncated(self, t: float) -> TruncatedPolynomial:
        return TruncatedPolynomial(self.poly_at(t), radius=self.slice_radius(t))

    def evaluate(self, y, t: float):
        """u(y, t), vectorized over y at fixed t."""
        if t >= 1.0:
            y = np.asarray(y, dtype=float)
            return np.zeros(y.shape, dtype=complex)
        return self.truncated(t).evaluate(y)


def build_u(f: HermiteExpansion, delta: float) -> UField:
    if not delta > 0:
        raise ValueError("delta must be positive")
    if abs(f.mean) > 1e-12 * max(f.coefficient_norm, 1.0):
        raise ValueError("u is defined for zero-mean polynomials (c_0 = 0)")
    return UField(f, delta)


def _dyadic_log_edges(t_lo: float, t_hi: float):
    """log-domain panel edges for (t_lo, t_hi] with every dyadic 2^-j inside.

    The slice radius of the admissible region jumps at dyadic heights, so
    integrands built from it are discontinuous there; pinning those points
    as edges keeps each panel smooth.
    """
    edges = {math.log(t_lo), math.log(t_hi)}
    j = 0
    while 2.0**-j > t_lo:
        if t_lo < 2.0**-j < t_hi:
            edges.add(math.log(2.0**-j))
        j += 1
    return np.array(sorted(edges))


def _outer_log_integral(integrand, t_lo: float, t_hi: float, tol: float,
                        scale: float, base_panels: int = 1):
    """Adaptive composite quadrature of integrand(t) dt/t in log time.

    Segments between dyadic discontinuities carry analytic integrands, so a
    single 16-point panel per ~0.8 log-units is already accurate; doubling
    is the safety net.
    """
    base_edges = _dyadic_log_edges(t_lo, t_hi)
    prev = None
    for level in range(7):
        pieces = []
        for lo, hi in zip(base_edges[:-1], base_edges[1:]):
            count = max(base_panels, int(math.ceil((hi - lo) / 0.8))) * 2**level
            pieces.append(np.linspace(lo, hi, count + 1))
        edges = np.unique(np.concatenate(pieces))
        nodes, weights = _panel_nodes(edges)
        ts = np.exp(nodes)
        vals = np.array([integrand(t) for t in ts])
        est = complex(np.sum(weights * vals))
        if prev is not None and abs(est - prev) <= tol * max(abs(est), abs(prev), 0.01 * scale):
            return est
        prev = est
    raise NonConvergenceError(
        f"outer dt/t integral on ({t_lo:.3g}, {t_hi:.3g}] did not stabilize",
        last_estimate=prev,
    )


def _t_lower_cutoff(t_hi: float, t_tol: float) -> float:
    # the integrand is O(t^4) dt/t near zero, so the discarded piece is
    # O(t_lo^4); keep it well under t_tol
    return min(0.5 * t_hi, (1e-4 * t_tol) ** 0.25)


def pi1(u: UField, spec: PhiSpec, params: DecompositionParams, x: float) -> complex:
    """Admissible part at x: the dt/t integral of PhiS(t^2) t^2L e^{-d't^2L} u(.,t)."""
    t_hi = discrete_admissibility(x) / params.kappa
    t_lo = _t_lower_cutoff(t_hi, params.t_tol)
    inner_tol = max(1e-12, 0.01 * params.t_tol)
    scale = u.f.coefficient_norm
    ds = params.delta_sum

    def integrand(t):
        inner = kernel_apply_t2l(u.truncated(t), t, params.delta_prime, x, inner_tol)
        return spec.phi(ds * t * t) * inner

    return _outer_log_integral(integrand, t_lo, t_hi, params.t_tol, scale)


def pi2(f: HermiteExpansion, spec: PhiSpec, params: DecompositionParams, x: float) -> complex:
    """Intermediate part: same integral with the complementary truncation."""
    if abs(f.mean) > 1e-12 * max(f.coefficient_norm, 1.0):
        raise ValueError("pi2 is defined for zero-mean polynomials")
    t_hi = discrete_admissibility(x) / params.kappa
    t_lo = _t_lower_cutoff(t_hi, params.t_tol)
    inner_tol = max(1e-12, 0.01 * params.t_tol)
    ds = params.delta_sum

    def integrand(t):
        g = TruncatedPolynomial(
            t2l_semigroup(f, t, params.delta),
            radius=region_slice(t).radius,
            complement=True,
        )
        inner = kernel_apply_t2l(g, t, params.delta_prime, x, inner_tol)
        return spec.phi(ds * t * t) * inner

    return _outer_log_integral(integrand, t_lo, t_hi, params.t_tol, f.coefficient_norm)


def _phi_abs_bound(spec: PhiSpec, s_max: float, power: int) -> float:
    grid = np.geomspace(1e-6, max(s_max, 1.0), 400)
    vals = [abs(spec.phi(s)) / (1.0 + s**power) for s in grid]
    return float(max(vals))


def pi3(f: HermiteExpansion, spec: PhiSpec, params: DecompositionParams, x: float) -> complex:
    """Non-admissible part, purely spectral.

    In the variable v = t^2 each eigenvalue k contributes
    (1/2) integral_{a^2}^{inf} Phi((d'+d) v) (v k)^2 e^{-(d'+d) v k} dv/v
    with a = m_tilde(x)/kappa.  The infinite range is cut at an explicit
    tail bound: with |Phi(s)| <= B (1 + s^M) the discarded tail is at most
    B/(2 (d'+d)^2) [Gamma(2, W) + k^{-M} Gamma(M+2, W)] (upper incomplete
    gamma, W = (d'+d) k V).  M comes from the profile's declared growth
    power; if the cut never clears the tolerance the profile grows faster
    than declared and the failure is reported.
    """
    if abs(f.mean) > 1e-12 * max(f.coefficient_norm, 1.0):
        raise ValueError("pi3 is defined for zero-mean polynomials")
    coeffs = np.asarray(f.coefficients)
    ks = np.nonzero(np.abs(coeffs) > 0)[0]
    ks = ks[ks >= 1]
    if len(ks) == 0:
        return 0j
    a = discrete_admissibility(x) / params.kappa
    ds = params.delta_sum
    power = (spec.growth_power + 1) if spec.growth_power is not None else 0
    tol = params.t_tol
    scale = max(f.coefficient_norm, 1e-30)

    v_lo = a * a
    v_hi = max(4.0 * v_lo, 1.0)
    for _ in range(60):
        b_const = _phi_abs_bound(spec, ds * v_hi * 4.0, power)
        tails = []
        for k in ks:
            w = ds * float(k) * v_hi
            tail = (special.gammaincc(2, w) * special.gamma(2)
                    + float(k) ** -power * special.gammaincc(power + 2, w)
                    * special.gamma(power + 2))
            tails.append(b_const / (2.0 * ds * ds) * tail)
        if max(tails) <= 0.01 * tol * scale:
            break
        v_hi *= 2.0
    else:
        raise NonConvergenceError(
            f"pi3 tail bound unattainable for profile {spec.label!r}: "
            "growth exceeds the declared power"
        )

    from .gaussian import hermite_basis

    hx = hermite_basis(int(ks.max()), np.array(float(x)))
    weights_k = np.array([coeffs[k] * hx[k] for k in ks])
    kf = ks.astype(float)

    # edges: log v grid plus the C^2 joints of damped cutoffs at (d'+d)v in {1,2}
    joints = [v / ds for v in (1.0, 2.0) if v_lo < v / ds < v_hi]
    prev = None
    for level in range(8):
        count = 64 * 2**level
        edges = np.unique(np.concatenate([
            np.geomspace(v_lo, v_hi, count + 1), np.array(joints)]))
        nodes, wq = _panel_nodes(edges)
        phiv = np.array([spec.phi(ds * v) for v in nodes])
        vk = np.outer(kf, nodes)  # (n_k, n_nodes)
        spectral = (vk * vk) * np.exp(-ds * vk)
        vals = phiv * (weights_k @ spectral) / nodes  # dv/v
        est = 0.5 * complex(np.sum(wq * vals))
        if prev is not None and abs(est - prev) <= tol * max(abs(est), abs(prev), 0.01 * scale):
            return est
        prev = est
    raise NonConvergenceError("pi3 quadrature did not stabilize", last_estimate=prev)


def reconstruction_residual(f: HermiteExpansion, spec: PhiSpec,
                            params: DecompositionParams, grid) -> float:
    """max over the grid of |phi(L)f(x) - c (pi1 u + pi2 f + pi3 f)(x)|.

    The left side goes through the multiplier quadrature, the right side
    through the kernel/spectral decomposition; nothing is shared beyond the
    profile, so the residual is an end-to-end consistency measure for
    Eq-level correctness of the whole pipeline.
    """
    u = build_u(f, params.delta)
    c = scaling_constant(params.delta, params.delta_prime)
    phif = apply_multiplier(f, spec, tol=min(1e-9, 0.01 * params.t_tol))
    worst = 0.0
    for x in grid:
        lhs = phif.eval(float(x))
        rhs = c * (pi1(u, spec, params, float(x))
                   + pi2(f, spec, params, float(x))
                   + pi3(f, spec, params, float(x)))
        worst = max(worst, abs(lhs - rhs))
    return worst
