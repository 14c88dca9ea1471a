"""Exact functional calculus of the Ornstein-Uhlenbeck operator.

On the orthonormal Hermite basis the operator acts diagonally,
``L h_k = k h_k``, so any finite expansion ``f = sum c_k h_k`` carries its
own spectral resolution.  Applying a function of L is a coefficient-wise
multiplication, which this module implements together with the semigroup
``e^{-tL}``, the square-function integrand ``t^2 L e^{-s t^2 L}``, spectral
projections, and the local maximal function

    Mf(x) = sup over eps m(x)^2 < t <= 1 of |e^{-tL} f(x)|.

Coefficients are complex throughout so that imaginary-power multipliers
need no special casing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .gaussian import DEFAULT_CONTEXT, GaussianContext, admissibility

__all__ = [
    "HermiteExpansion",
    "SpectralSymbol",
    "expansion",
    "basis_vector",
    "apply_symbol",
    "semigroup",
    "t2l_semigroup",
    "constant_projection",
    "maximal_function",
]


@dataclass(frozen=True)
class HermiteExpansion:
    """Polynomial represented by coefficients in the orthonormal Hermite basis."""

    coefficients: tuple
    context: GaussianContext = field(default=DEFAULT_CONTEXT, compare=False)

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        if not coeffs:
            coeffs = (0j,)
        if len(coeffs) - 1 > self.context.degree_max:
            raise ValueError(
                f"degree {len(coeffs) - 1} exceeds degree_max {self.context.degree_max}"
            )
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def mean(self) -> complex:
        """Integral against gamma; equals c_0 since h_k has zero mean for k >= 1."""
        return self.coefficients[0]

    @property
    def coefficient_norm(self) -> float:
        """l^2 norm of the coefficients = L^2(gamma) norm, by Parseval."""
        return float(np.linalg.norm(self.coefficients))

    def eval(self, x):
        """Evaluate sum c_k h_k(x) by the normalized three-term recurrence."""
        x = np.asarray(x, dtype=float)
        c = self.coefficients
        acc = np.full(x.shape, c[0], dtype=complex)
        if len(c) == 1:
            return acc if acc.ndim else complex(acc)
        h_prev = np.ones_like(x)
        h_cur = math.sqrt(2.0) * x
        acc = acc + c[1] * h_cur
        for k in range(1, len(c) - 1):
            h_prev, h_cur = h_cur, (
                math.sqrt(2.0 / (k + 1)) * x * h_cur - math.sqrt(k / (k + 1.0)) * h_prev
            )
            acc = acc + c[k + 1] * h_cur
        return acc if acc.ndim else complex(acc)

    def __call__(self, x):
        return self.eval(x)

    def __add__(self, other):
        if not isinstance(other, HermiteExpansion):
            return NotImplemented
        n = max(len(self.coefficients), len(other.coefficients))
        a = np.zeros(n, dtype=complex)
        a[: len(self.coefficients)] = self.coefficients
        a[: len(other.coefficients)] += other.coefficients
        return HermiteExpansion(tuple(a), self.context)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return HermiteExpansion(tuple(scalar * c for c in self.coefficients), self.context)

    __rmul__ = __mul__


def expansion(coefficients, ctx: GaussianContext = DEFAULT_CONTEXT) -> HermiteExpansion:
    """Build an expansion from an iterable of coefficients c_0, c_1, ..."""
    return HermiteExpansion(tuple(coefficients), ctx)


def basis_vector(k: int, ctx: GaussianContext = DEFAULT_CONTEXT) -> HermiteExpansion:
    """The expansion of the single basis polynomial h_k."""
    return HermiteExpansion((0j,) * k + (1.0 + 0j,), ctx)


@dataclass(frozen=True)
class SpectralSymbol:
    """A map k -> psi(k) defining the diagonal operator psi(L)."""

    func: Callable[[int], complex]
    label: str = ""

    def __call__(self, k: int) -> complex:
        return complex(self.func(k))


def apply_symbol(f: HermiteExpansion, symbol) -> HermiteExpansion:
    """Coefficient map c_k -> psi(k) c_k.

    ``symbol`` may be a SpectralSymbol or any callable on integers.
    Composition of symbols is the pointwise product, which tests rely on.
    """
    psi = symbol if callable(symbol) else symbol.func
    coeffs = tuple(complex(psi(k)) * c for k, c in enumerate(f.coefficients))
    return HermiteExpansion(coeffs, f.context)


def semigroup(f: HermiteExpansion, t: float) -> HermiteExpansion:
    """e^{-tL} f, i.e. c_k -> e^{-tk} c_k.  Conservative: the mean is kept."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return apply_symbol(f, lambda k: math.exp(-t * k))


def t2l_semigroup(f: HermiteExpansion, t: float, s: float) -> HermiteExpansion:
    """(t^2 L) e^{-s t^2 L} f, the square-function integrand at scale t."""
    if not t > 0:
        raise ValueError(f"scale must be positive, got {t}")
    if not s > 0:
        raise ValueError(f"damping must be positive, got {s}")
    tt = t * t
    return apply_symbol(f, lambda k: tt * k * math.exp(-s * tt * k))


def constant_projection() -> SpectralSymbol:
    """Spectral projection onto the kernel of L (the constants)."""
    return SpectralSymbol(lambda k: 1.0 if k == 0 else 0.0, "E0")


def _golden_max(g, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Golden-section maximization of a unimodal-enough g on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = g(d)
    return max(gc, gd)


def maximal_function(f: HermiteExpansion, x: float, eps: float = 1.0 / 64.0) -> float:
    """sup over t in (eps m(x)^2, 1] of |e^{-tL} f(x)|.

    The supremum is located on a 256-point log-uniform grid and then
    polished by golden-section search around the best grid cell; by
    continuity the value at the open left endpoint is attained as a limit
    and is included.
    """
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    m = admissibility(x)
    t_lo = eps * m * m
    if t_lo >= 1.0:
        t_lo = 1.0
    coeffs = np.asarray(f.coefficients)
    ks = np.arange(len(coeffs))
    hx = np.array([c * h for c, h in zip(coeffs, _hermite_values_at(x, len(coeffs) - 1))])

    def g(t):
        return abs(np.sum(hx * np.exp(-t * ks)))

    grid = np.geomspace(t_lo, 1.0, 256)
    vals = np.abs(np.exp(-np.outer(grid, ks)) @ hx)
    j = int(np.argmax(vals))
    best = float(vals[j])
    lo = grid[max(j - 1, 0)]
    hi = grid[min(j + 1, len(grid) - 1)]
    if hi > lo:
        best = max(best, _golden_max(g, lo, hi))
    return max(best, float(vals[0]), float(vals[-1]))


def _hermite_values_at(x: float, degree: int):
    vals = [1.0]
    if degree >= 1:
        vals.append(math.sqrt(2.0) * x)
    for k in range(1, degree):
        vals.append(math.sqrt(2.0 / (k + 1)) * x * vals[k] - math.sqrt(k / (k + 1.0)) * vals[k - 1])
    return vals
