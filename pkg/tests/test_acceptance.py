"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Every tolerance below is pinned to its stated value; runtime budgets are
asserted against wall time.  Run with ``pytest -v`` (add ``-s`` to see the
per-criterion lines inline).
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy import special

from ouharm import decomposition as dec
from ouharm import gaussian as ga
from ouharm import harness as hn
from ouharm import mehler as me
from ouharm import multipliers as mu
from ouharm import spectral as sp
from ouharm import tent as te

DEFAULTS = dec.DecompositionParams()
GRID7 = [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0]


def _line(num, ok, detail, elapsed, budget):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:>2} [{status}] {detail} ({elapsed:.1f}s < {budget:.0f}s)",
          flush=True)


def test_criterion_01_kernel_spectral_agreement():
    start = time.perf_counter()
    worst_rel = 0.0
    worst_zero = 0.0
    xs = np.linspace(-4.0, 4.0, 9)
    for k in range(0, 11):
        hk = sp.basis_vector(k)
        g = me.TruncatedPolynomial(hk)
        for s in (0.01, 0.1, 1.0):
            wants = np.array([math.exp(-s * k) * complex(hk.eval(float(x))) for x in xs])
            scale = float(np.max(np.abs(wants)))
            for x, want in zip(xs, wants):
                got = me.kernel_apply(g, s, float(x), 1e-10)
                if abs(want) > 0:
                    worst_rel = max(worst_rel, abs(got - want) / abs(want))
                else:
                    worst_zero = max(worst_zero, abs(got) / scale)
    elapsed = time.perf_counter() - start
    ok = worst_rel <= 1e-8 and worst_zero <= 1e-8 and elapsed < 10.0
    _line(1, ok, f"kernel/spectral agreement worst rel {worst_rel:.2e}", elapsed, 10)
    assert worst_rel <= 1e-8
    assert worst_zero <= 1e-8
    assert elapsed < 10.0


def test_criterion_02_conservativity_and_symmetry():
    start = time.perf_counter()
    one = me.TruncatedPolynomial(sp.basis_vector(0))
    worst = 0.0
    for t in (0.01, 0.1, 0.5, 1.0, 3.0):
        for x in (0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0):
            worst = max(worst, abs(me.kernel_apply(one, t, x, 1e-11) - 1.0))
    rng = np.random.default_rng(7)
    symmetric = True
    for _ in range(100):
        t = float(rng.uniform(0.02, 3.0))
        x, y = (float(v) for v in rng.uniform(-3, 3, 2))
        symmetric &= me.mehler_kernel(t, x, y) == me.mehler_kernel(t, y, x)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and symmetric and elapsed < 5.0
    _line(2, ok, f"conservativity worst {worst:.2e}, symmetry exact {symmetric}", elapsed, 5)
    assert worst <= 1e-10
    assert symmetric
    assert elapsed < 5.0


def test_criterion_03_multiplier_closed_forms():
    start = time.perf_counter()
    worst = 0.0
    for tau in (0.5, 1.0, 2.0):
        spec = mu.make_phi("imaginary_power", tau=tau)
        for k in range(1, 9):
            want = complex(math.cos(tau * math.log(k)), math.sin(tau * math.log(k)))
            worst = max(worst, abs(mu.phi_lambda(spec, float(k), 1e-10) - want))
    const = mu.make_phi("constant")
    for k in range(1, 9):
        worst = max(worst, abs(mu.phi_lambda(const, float(k), 1e-10) - 1.0))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 5.0
    _line(3, ok, f"multiplier closed forms worst {worst:.2e}", elapsed, 5)
    assert worst <= 1e-8
    assert elapsed < 5.0


def test_criterion_04_decomposition_identity():
    start = time.perf_counter()
    h = sp.basis_vector
    f_set = {"h1": h(1), "h1+h3": h(1) + h(3), "h2-h4": h(2) - h(4)}
    phi_set = {
        "constant": mu.make_phi("constant"),
        "imaginary(1)": mu.make_phi("imaginary_power", tau=1.0),
        "damped(1)": mu.make_phi("damped_imaginary", tau=1.0),
    }
    worst = 0.0
    for f in f_set.values():
        for spec in phi_set.values():
            worst = max(worst, dec.reconstruction_residual(f, spec, DEFAULTS, GRID7))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-5 and elapsed < 300.0
    _line(4, ok, f"decomposition residual worst {worst:.2e}", elapsed, 300)
    assert worst <= 1e-5
    assert elapsed < 300.0


def test_criterion_05_hypercontractivity():
    start = time.perf_counter()
    rep = hn.hypercontractivity_suite(seed=7, trials=1000, p_list=(1.5, 2.0))
    elapsed = time.perf_counter() - start
    worst = rep.summary()["worst_ratio"]
    ok = rep.passed and worst <= 1.0 + 1e-9 and elapsed < 120.0
    _line(5, ok, f"hypercontractivity zero violations, worst ratio {worst:.12f}", elapsed, 120)
    assert rep.passed
    assert worst <= 1.0 + 1e-9
    assert elapsed < 120.0


def test_criterion_06_spectral_gap_exactness():
    start = time.perf_counter()
    h1 = sp.basis_vector(1)
    worst_h1 = max(
        abs(ga.lp_norm(sp.semigroup(h1, t), 2.0, 1e-12) * math.exp(t) - 1.0)
        for t in (0.1, 1.0, 3.0)
    )
    bank = hn.random_bank(7, 200, zero_mean=True)
    contract = True
    for f in bank:
        n2 = ga.lp_norm(f, 2.0, 1e-10)
        for t in (0.1, 1.0):
            contract &= ga.lp_norm(sp.semigroup(f, t), 2.0, 1e-10) <= math.exp(-t) * n2 * (1 + 1e-10)
    elapsed = time.perf_counter() - start
    ok = worst_h1 <= 1e-12 and contract and elapsed < 10.0
    _line(6, ok, f"spectral gap: h1 ratio error {worst_h1:.2e}, 200 contractions {contract}",
          elapsed, 10)
    assert worst_h1 <= 1e-12
    assert contract
    assert elapsed < 10.0


def test_criterion_07_tent_fubini():
    start = time.perf_counter()
    worst = 0.0
    for f in (sp.basis_vector(1), sp.basis_vector(2)):
        u = dec.build_u(f, DEFAULTS.delta)
        tn = te.tent_norm(u, 2.0, 1e-5)
        direct = te.region_square_integral(u, 1e-5)
        worst = max(worst, abs(tn * tn - direct) / direct)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and elapsed < 120.0
    _line(7, ok, f"tent p=2 Fubini worst rel {worst:.2e}", elapsed, 120)
    assert worst <= 1e-4
    assert elapsed < 120.0


def test_criterion_08_ondiagonal_chain():
    start = time.perf_counter()
    # dyadic partition identity, exactly, for kappa in {4, 16} and k <= 8
    partition = all(
        4 ** (-k + hn._band_count(k, float(kappa)) + 1) == kappa * kappa
        for kappa in (4, 16) for k in range(0, 9)
    )
    # Hoelder step for all k <= 6, j <= N(k), over the bank
    p = 1.5
    ds = DEFAULTS.delta_sum
    kappa2 = DEFAULTS.kappa**2
    bank = hn.random_bank(7, 3)
    worst_hoelder = 0.0
    decay_pts = []
    for k in range(0, 7):
        ann = ga.annulus(k)
        log_gamma = ga.log_annulus_measure(ann)
        intervals = ([(-ann.outer, ann.outer)] if ann.inner == 0.0
                     else [(-ann.outer, -ann.inner), (ann.inner, ann.outer)])
        for j in range(0, hn._band_count(k, DEFAULTS.kappa) + 1):
            q = 1.0 + (p - 1.0) * math.exp(2.0 * ds * 4.0 ** (-k + j) / kappa2)
            e_gap = 1.0 / p - 1.0 / q
            decay_pts.append((j, e_gap * log_gamma))
            gamma_pow = math.exp(e_gap * log_gamma)
            for g in bank:
                lhs = ga.interval_lp_norm(g, p, intervals, 1e-9)
                rhs = gamma_pow * ga.lp_norm(g, q, 1e-9)
                worst_hoelder = max(worst_hoelder, lhs / rhs)
    xs = np.array([4.0**j for j, _ in decay_pts])
    ys = np.array([v for _, v in decay_pts])
    c_decay = -float(np.polyfit(xs, ys, 1)[0])
    elapsed = time.perf_counter() - start
    ok = partition and worst_hoelder <= 1.0 + 1e-9 and c_decay > 0 and elapsed < 60.0
    _line(8, ok, f"partition exact {partition}, Hoelder worst {worst_hoelder:.6f}, "
                 f"decay c {c_decay:.2e}", elapsed, 60)
    assert partition
    assert worst_hoelder <= 1.0 + 1e-9
    assert c_decay > 0
    assert elapsed < 60.0


def test_criterion_09_kernel_derivative():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    h = 1e-5
    for _ in range(100):
        t = float(rng.uniform(0.05, 3.0))
        x, y = (float(v) for v in rng.uniform(-3, 3, 2))
        fd = (me.mehler_kernel(t + h, x, y) - me.mehler_kernel(t - h, x, y)) / (2 * h)
        an = me.mehler_kernel_dt(t, x, y)
        worst = max(worst, abs(an - fd) / max(abs(an), 1e-30))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 5.0
    _line(9, ok, f"kernel derivative vs central differences worst rel {worst:.2e}", elapsed, 5)
    assert worst <= 1e-6
    assert elapsed < 5.0


def test_criterion_10_determinism(tmp_path):
    start = time.perf_counter()
    outs = []
    for name in ("a.json", "b.json"):
        target = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "ouharm.cli", "verify", "spectral-gap",
             "--seed", "7", "--trials", "25", "--out", str(target)],
            capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0, proc.stderr
        outs.append(target.read_bytes())
    identical = outs[0] == outs[1]
    payload = json.loads(outs[0])
    elapsed = time.perf_counter() - start
    _line(10, identical, f"byte-identical reports with --seed 7: {identical}", elapsed, 300)
    assert identical
    assert payload["config"]["seed"] == 7
