import math

import numpy as np
import pytest

from ouharm import gaussian as ga
from ouharm import mehler as me
from ouharm import spectral as sp
from ouharm.errors import KernelOverflowError

from oracles import central_difference, erf_series


def test_kernel_value_at_origin():
    want = (1.0 - math.exp(-1.0)) ** -0.5
    assert me.mehler_kernel(0.5, 0.0, 0.0) == pytest.approx(want, rel=1e-14)


def test_kernel_symmetry_and_positivity():
    rng = np.random.default_rng(1)
    for _ in range(100):
        t = float(rng.uniform(0.02, 3.0))
        x, y = rng.uniform(-3, 3, 2)
        a = me.mehler_kernel(t, float(x), float(y))
        b = me.mehler_kernel(t, float(y), float(x))
        assert a == b
        assert a > 0.0


def test_kernel_long_time_limit():
    assert me.mehler_kernel(40.0, 1.3, -2.1) == pytest.approx(1.0, abs=1e-12)
    assert me.mehler_kernel_dt(40.0, 1.3, -2.1) == pytest.approx(0.0, abs=1e-12)


def test_kernel_domain_and_overflow():
    with pytest.raises(ValueError):
        me.mehler_kernel(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        me.mehler_kernel(-1.0, 0.0, 0.0)
    with pytest.raises(KernelOverflowError):
        me.mehler_kernel(1e-3, 30.0, 30.0)
    with pytest.raises(KernelOverflowError):
        me.mehler_kernel_dt(1e-3, 30.0, 30.0)


def test_kernel_dt_against_central_difference():
    got = me.mehler_kernel_dt(0.7, 0.3, -0.2)
    fd = central_difference(lambda t: me.mehler_kernel(t, 0.3, -0.2), 0.7)
    assert got == pytest.approx(fd, rel=1e-6)

    rng = np.random.default_rng(4)
    for _ in range(100):
        t = float(rng.uniform(0.05, 3.0))
        x, y = (float(v) for v in rng.uniform(-3, 3, 2))
        got = me.mehler_kernel_dt(t, x, y)
        fd = central_difference(lambda s: me.mehler_kernel(s, x, y), t)
        assert abs(got - fd) <= 1e-6 * max(abs(got), 1e-12)


def test_kernel_dt_sign_on_diagonal():
    # at x = y = 0 the kernel is (1-e^{-2t})^{-1/2}, strictly decreasing
    for t in (0.1, 0.5, 2.0):
        assert me.mehler_kernel_dt(t, 0.0, 0.0) < 0.0


def test_kernel_apply_reproduces_semigroup():
    h1 = me.TruncatedPolynomial(sp.basis_vector(1))
    got = me.kernel_apply(h1, 0.5, 1.0, 1e-10)
    assert got == pytest.approx(math.exp(-0.5) * math.sqrt(2.0), rel=1e-9)
    one = me.TruncatedPolynomial(sp.basis_vector(0))
    for s in (0.05, 1.0):
        for x in (0.0, -1.5, 2.0):
            assert me.kernel_apply(one, s, x, 1e-11) == pytest.approx(1.0, abs=1e-10)


def test_kernel_apply_spectral_agreement_sample():
    for k in (0, 3, 7, 10):
        hk = sp.basis_vector(k)
        g = me.TruncatedPolynomial(hk)
        for s in (0.01, 0.1, 1.0):
            for x in (-3.0, 0.5, 2.0):
                want = math.exp(-s * k) * complex(hk.eval(x))
                got = me.kernel_apply(g, s, x, 1e-11)
                assert got == pytest.approx(want, abs=1e-9 + 1e-8 * abs(want))


def test_kernel_apply_truncated_long_time():
    # e^{-sL} 1_{B(0,rho)} -> gamma(B(0, rho)) as s grows
    g = me.TruncatedPolynomial(sp.basis_vector(0), radius=1.5)
    got = me.kernel_apply(g, 40.0, 0.0, 1e-11)
    assert got == pytest.approx(erf_series(1.5), abs=1e-9)


def test_kernel_apply_complement_support():
    g = me.TruncatedPolynomial(sp.basis_vector(0), radius=1.5, complement=True)
    got = me.kernel_apply(g, 40.0, 0.0, 1e-11)
    assert got == pytest.approx(1.0 - erf_series(1.5), abs=1e-9)
    # inside + outside = whole line, pointwise in the integrand
    inside = me.TruncatedPolynomial(sp.basis_vector(2), radius=2.0)
    outside = me.TruncatedPolynomial(sp.basis_vector(2), radius=2.0, complement=True)
    ys = np.linspace(-4, 4, 33)
    full = sp.basis_vector(2).eval(ys)
    assert np.max(np.abs(inside.evaluate(ys) + outside.evaluate(ys) - full)) == 0.0


def test_kernel_apply_t2l_examples():
    one = me.TruncatedPolynomial(sp.basis_vector(0))
    assert abs(me.kernel_apply_t2l(one, 0.7, 1.0, 0.4, 1e-10)) < 1e-9
    h1 = me.TruncatedPolynomial(sp.basis_vector(1))
    want = 0.25 * math.exp(-0.25) * math.sqrt(2.0)  # (t^2 k) e^{-d' t^2 k} h_1(1)
    got = me.kernel_apply_t2l(h1, 0.5, 1.0, 1.0, 1e-10)
    assert got == pytest.approx(want, rel=1e-8)


def test_kernel_apply_t2l_matches_s_derivative():
    # t^2 L e^{-s L} = -t^2 d/ds e^{-sL}: finite differences on kernel_apply
    g = me.TruncatedPolynomial(sp.basis_vector(2), radius=2.0)
    t, dprime, x = 0.3, 1.0, 0.0
    s = dprime * t * t
    got = me.kernel_apply_t2l(g, t, dprime, x, 1e-11)
    h = 1e-5 * s
    lo = me.kernel_apply(g, s - h, x, 1e-12)
    hi = me.kernel_apply(g, s + h, x, 1e-12)
    fd = -t * t * (hi - lo) / (2.0 * h)
    assert got == pytest.approx(fd, rel=1e-5)


def test_kernel_apply_t2l_spectral_oracle_random():
    rng = np.random.default_rng(8)
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    f = sp.expansion(c)
    g = me.TruncatedPolynomial(f)
    for t, dprime, x in ((0.2, 0.5, 1.0), (1.0, 1.0 / 128, -0.7)):
        want = complex(sp.t2l_semigroup(f, t, dprime).eval(x))
        got = me.kernel_apply_t2l(g, t, dprime, x, 1e-11)
        assert got == pytest.approx(want, abs=1e-9 + 1e-8 * abs(want))


def test_conservativity_grid():
    one = me.TruncatedPolynomial(sp.basis_vector(0))
    for t in (0.01, 0.1, 0.5, 1.0, 3.0):
        for x in (0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0):
            assert abs(me.kernel_apply(one, t, x, 1e-11) - 1.0) < 1e-10


def test_truncated_polynomial_validation():
    with pytest.raises(ValueError):
        me.TruncatedPolynomial(sp.basis_vector(1), radius=-1.0)
    g = me.TruncatedPolynomial(sp.basis_vector(1), radius=0.0)
    assert g.support_intervals(8.0) == []
    comp = me.TruncatedPolynomial(sp.basis_vector(1), radius=0.0, complement=True)
    assert comp.support_intervals(8.0) == [(-8.0, 8.0)]
