"""Independent reference implementations used only as test oracles.

Everything here deliberately avoids the code paths of the package (and of
math.erf / scipy.special where the package uses them), so each check pits
two unrelated computations against each other.
"""

import cmath
import math

import numpy as np


def erf_series(z: float) -> float:
    """erf by Maclaurin series for |z| <= 3, continued fraction beyond.

    Series: erf(z) = 2/sqrt(pi) sum_n (-1)^n z^(2n+1) / (n! (2n+1)).
    Tail:   erfc(z) = e^(-z^2)/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(...))))
    (modified Lentz evaluation, 80 levels).
    """
    if z < 0:
        return -erf_series(-z)
    if z <= 3.0:
        total = 0.0
        term = z
        n = 0
        while abs(term) > 1e-18 * max(1.0, abs(total)):
            total += term / (2 * n + 1)
            n += 1
            term *= -z * z / n
        return 2.0 / math.sqrt(math.pi) * total
    value = 0.0
    for level in range(80, 0, -1):
        value = (level / 2.0) / (z + value)
    erfc = math.exp(-z * z) / math.sqrt(math.pi) / (z + value)
    return 1.0 - erfc


def gauss_moment(m: int) -> float:
    """integral of x^(2m) dgamma = (2m-1)!! / 2^m."""
    double_fact = 1.0
    for j in range(2 * m - 1, 0, -2):
        double_fact *= j
    return double_fact / 2.0**m


_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lanczos_gamma(z: complex) -> complex:
    """Complex gamma via the 9-term Lanczos approximation (g = 7)."""
    z = complex(z)
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * lanczos_gamma(1.0 - z))
    z -= 1.0
    series = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        series += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * series


def central_difference(f, x: float, h: float = 1e-5):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def brute_force_square_function(coeffs, x: float, n_t: int = 10**4, n_y: int = 10**4,
                                chunk: int = 50) -> float:
    """Midpoint double Riemann sum for the conical square function.

    Direct transliteration of the definition: outer uniform cells in t over
    (0, 2 m(x)], inner uniform cells in y over B(x, t).  Slow by design;
    the accuracy target is only ~1e-4 relative.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    m = min(1.0, 1.0 / abs(x)) if x != 0 else 1.0
    top = 2.0 * m
    dt = top / n_t
    ts = (np.arange(n_t) + 0.5) * dt
    total = 0.0
    for block in np.array_split(ts, max(1, n_t // chunk)):
        tb = block[:, None]
        ys = (x - tb) + (np.arange(n_y)[None, :] + 0.5) * (2.0 * tb / n_y)
        vals = np.zeros(ys.shape, dtype=complex)
        h_prev = np.ones_like(ys)
        h_cur = math.sqrt(2.0) * ys
        if len(coeffs) > 1:
            vals += coeffs[1] * (tb**2 * 1) * np.exp(-(tb**2) * 1) * h_cur
        for k in range(1, len(coeffs) - 1):
            h_prev, h_cur = h_cur, (
                math.sqrt(2.0 / (k + 1)) * ys * h_cur - math.sqrt(k / (k + 1.0)) * h_prev
            )
            sym = (tb**2 * (k + 1)) * np.exp(-(tb**2) * (k + 1))
            vals += coeffs[k + 1] * sym * h_cur
        dens = np.exp(-ys * ys) / math.sqrt(math.pi)
        inner = np.sum((vals.real**2 + vals.imag**2) * dens, axis=1) * (2.0 * block / n_y)
        balls = np.array([0.5 * (erf_series(x + t) - erf_series(x - t)) for t in block])
        total += float(np.sum(inner / balls / block * dt))
    return math.sqrt(total)
