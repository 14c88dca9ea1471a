import math

import numpy as np
import pytest
from scipy import integrate, special

from ouharm import decomposition as dec
from ouharm import gaussian as ga
from ouharm import multipliers as mu
from ouharm import spectral as sp


DEFAULTS = dec.DecompositionParams()


def test_params_validation_and_flags():
    with pytest.raises(ValueError):
        dec.DecompositionParams(delta=0.0)
    with pytest.raises(ValueError):
        dec.DecompositionParams(kappa=0.5)
    flags = DEFAULTS.constraint_flags()
    # the default delta = delta' = 1/128 satisfies delta' < 4^-3 but not
    # 8(delta'+delta) <= 4^-3; the validator must say so honestly
    assert not any("intermediate" in f for f in flags)
    assert any("non-admissible" in f for f in flags)
    tight = dec.DecompositionParams(delta=1.0 / 1024, delta_prime=1.0 / 1024)
    assert tight.constraint_flags() == []
    odd = dec.DecompositionParams(kappa=3.0)
    assert any("power of 4" in f for f in odd.constraint_flags())


def test_scaling_constant():
    assert dec.scaling_constant(1 / 128, 1 / 128) == pytest.approx(1 / 2048, rel=1e-15)
    assert dec.scaling_constant(0.5 / math.sqrt(2), 0.5 / math.sqrt(2)) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        dec.scaling_constant(0.0, 0.1)


def test_scalar_reconstruction_identity_quad_oracle():
    # c * integral_0^inf Phi(ds t^2) (t^2 k)^2 e^{-ds t^2 k} dt/t == phi(k),
    # verified against scipy quadrature, independently of the package path
    ds = DEFAULTS.delta_sum
    c = dec.scaling_constant(DEFAULTS.delta, DEFAULTS.delta_prime)
    for k in (1, 2, 3):
        val, _ = integrate.quad(
            lambda t, _k=k: (t * t * _k) ** 2 * math.exp(-ds * t * t * _k) / t,
            0, np.inf, limit=400)
        want = mu.phi_lambda(mu.make_phi("constant"), float(k), 1e-10)
        assert c * val == pytest.approx(complex(want).real, abs=1e-8)


def test_build_u():
    f = sp.basis_vector(1)
    u = dec.build_u(f, DEFAULTS.delta)
    # inside the region: the spectral value
    want = 0.25 * math.exp(-DEFAULTS.delta * 0.25) * complex(sp.basis_vector(1).eval(0.5))
    assert complex(u.evaluate(np.array([0.5]), 0.5)[0]) == pytest.approx(want, rel=1e-13)
    # outside: m_tilde(3) = 1/4 <= 1/2
    assert u.evaluate(np.array([3.0]), 0.5)[0] == 0.0
    assert np.all(u.evaluate(np.linspace(-5, 5, 11), 1.0) == 0.0)
    with pytest.raises(ValueError):
        dec.build_u(sp.basis_vector(0), DEFAULTS.delta)
    with pytest.raises(ValueError):
        dec.build_u(f, 0.0)


def test_indicator_partition_exact():
    from ouharm.mehler import TruncatedPolynomial

    f = sp.basis_vector(1) + sp.basis_vector(3)
    u = dec.build_u(f, DEFAULTS.delta)
    for t in (0.05, 0.3, 0.9):
        ys = np.linspace(-6, 6, 41)
        full = sp.t2l_semigroup(f, t, DEFAULTS.delta).eval(ys)
        comp = TruncatedPolynomial(sp.t2l_semigroup(f, t, DEFAULTS.delta),
                                   radius=ga.region_slice(t).radius,
                                   complement=True).evaluate(ys)
        assert np.max(np.abs(u.evaluate(ys, t) + comp - full)) == 0.0


def test_pi_of_zero_field():
    zero = dec.UField(sp.expansion([0.0]), DEFAULTS.delta)
    spec = mu.make_phi("constant")
    assert dec.pi1(zero, spec, DEFAULTS, 0.7) == 0.0
    assert dec.pi3(zero.f, spec, DEFAULTS, 0.7) == 0.0


def test_pi_zero_mean_required():
    spec = mu.make_phi("constant")
    with pytest.raises(ValueError):
        dec.pi2(sp.basis_vector(0), spec, DEFAULTS, 0.0)
    with pytest.raises(ValueError):
        dec.pi3(sp.expansion([1.0, 1.0]), spec, DEFAULTS, 0.0)


def test_pi3_trivial_points():
    spec = mu.make_phi("constant")
    # h_1(0) = 0, and pi3 acts diagonally
    assert abs(dec.pi3(sp.basis_vector(1), spec, DEFAULTS, 0.0)) < 1e-12


def test_pi3_incomplete_gamma_closed_form():
    # constant profile, f = h_1, x = 1: the dt/t integral reduces to an
    # upper incomplete gamma after v = ds t^2
    spec = mu.make_phi("constant")
    ds = DEFAULTS.delta_sum
    a = ga.discrete_admissibility(1.0) / DEFAULTS.kappa
    want = (special.gammaincc(2, ds * a * a) * special.gamma(2)
            / (2.0 * ds * ds)) * math.sqrt(2.0)
    got = dec.pi3(sp.basis_vector(1), spec, DEFAULTS, 1.0)
    assert complex(got).real == pytest.approx(want, rel=1e-8)
    assert abs(complex(got).imag) < 1e-9 * want


def test_pi2_is_gaussian_tail_small():
    f = sp.basis_vector(1)
    spec = mu.make_phi("constant")
    val = dec.pi2(f, spec, DEFAULTS, 0.0)
    assert abs(val) <= 1e-3 * ga.lp_norm(f, 2.0)


def test_pi1_plus_pi2_matches_spectral_truncated_integral():
    # 1_D + 1_{D^c} = 1 collapses the kernel split into the purely spectral
    #   integral_0^{m~(x)/kappa} Phi(ds t^2) (t^2 L)^2 e^{-ds t^2 L} f (x) dt/t,
    # computed here with scipy quadrature as an independent oracle
    f = sp.basis_vector(1) + sp.basis_vector(3)
    u = dec.build_u(f, DEFAULTS.delta)
    spec = mu.make_phi("constant")
    ds = DEFAULTS.delta_sum
    coeffs = np.asarray(f.coefficients)

    for x in (0.0, 1.0, -1.0, 2.0, -2.0):
        upper = ga.discrete_admissibility(x) / DEFAULTS.kappa

        def integrand(t):
            total = 0.0j
            for k, c in enumerate(coeffs):
                if k == 0 or c == 0:
                    continue
                sym = (t * t * k) ** 2 * math.exp(-ds * t * t * k)
                total += c * sym * ga.hermite_orthonormal(k, x)
            return total.real / t

        want, _ = integrate.quad(integrand, 0, upper, limit=300)
        got = dec.pi1(u, spec, DEFAULTS, x) + dec.pi2(f, spec, DEFAULTS, x)
        assert complex(got).real == pytest.approx(want, abs=1e-5)
        assert abs(complex(got).imag) < 1e-6


def test_reconstruction_residual_single_combo():
    f = sp.basis_vector(1)
    spec = mu.make_phi("constant")
    resid = dec.reconstruction_residual(f, spec, DEFAULTS, [0.0, 1.0, -2.0])
    assert resid <= 1e-5


def test_residual_decreases_with_tolerance():
    f = sp.basis_vector(1) + sp.basis_vector(3)
    spec = mu.make_phi("constant")
    resids = []
    for t_tol in (1e-3, 1e-5, 1e-7):
        params = dec.DecompositionParams(t_tol=t_tol)
        resids.append(dec.reconstruction_residual(f, spec, params, [1.0, -0.5]))
    assert resids[0] >= resids[1] - 1e-12
    assert resids[1] >= resids[2] - 1e-12
    assert resids[2] <= 1e-7
