"""Verification suites for the quantitative skeleton of the estimates.

Each suite replays one strand of the analysis on seeded random polynomial
banks and returns a SuiteReport: a list of cases, each either *asserted*
(an inequality whose constant the mathematics pins down exactly -- Nelson
hypercontractivity, Hoelder steps, the p = 2 spectral gap, dyadic partition
identities -- allowed a relative slack of 1e-9) or *reported* (evidence for
a "up to a constant" estimate, where the constant is fitted once on a
designated anchor case and then reused verbatim across the whole sample;
refitting per case is forbidden so the claims stay falsifiable).

Identical seeds produce bit-identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import decomposition as dec
from . import gaussian as ga
from . import mehler as me
from . import multipliers as mu
from . import spectral as sp
from . import tent as te
from .errors import NonConvergenceError

__all__ = [
    "SuiteReport",
    "hypercontractive_exponent",
    "hypercontractivity_suite",
    "semigroup_suite",
    "kernel_suite",
    "annuli_geometry_suite",
    "ondiagonal_suite",
    "offdiagonal_suite",
    "spectral_gap_suite",
    "pi3_pointwise_suite",
    "decomposition_suite",
    "tent_suite",
    "random_bank",
]

EXACT_SLACK = 1e-9


@dataclass
class SuiteReport:
    """Structured outcome of one verification suite."""

    suite: str
    config: dict
    cases: list = field(default_factory=list)
    fitted_constants: dict = field(default_factory=dict)

    def assert_case(self, name: str, inputs: dict, computed: float, bound: float,
                    slack: float = EXACT_SLACK):
        computed = float(computed)
        bound = float(bound)
        passed = computed <= bound * (1.0 + slack) + 1e-300
        self.cases.append({
            "case": name,
            "kind": "assert",
            "inputs": inputs,
            "computed": computed,
            "bound": bound,
            "slack": slack,
            "ratio": computed / bound if bound != 0.0 else (0.0 if computed == 0.0 else math.inf),
            "passed": passed,
        })
        return passed

    def report_case(self, name: str, inputs: dict, **values):
        self.cases.append({
            "case": name,
            "kind": "report",
            "inputs": inputs,
            **values,
            "passed": None,
        })

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.cases if c["kind"] == "assert")

    def summary(self) -> dict:
        asserted = [c for c in self.cases if c["kind"] == "assert"]
        ratios = [c["ratio"] for c in asserted if math.isfinite(c["ratio"])]
        return {
            "pass": sum(1 for c in asserted if c["passed"]),
            "total": len(asserted),
            "worst_ratio": max(ratios) if ratios else None,
            "fitted_constants": self.fitted_constants,
        }

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "cases": self.cases,
            "summary": self.summary(),
        }


def random_bank(seed: int, count: int, degree: int = 8, zero_mean: bool = False):
    """Seeded polynomials with coefficients uniform on the complex unit disc.

    The bank drives every randomized suite; c_0 is zeroed where the
    estimate under test lives on the zero-mean subspace.
    """
    rng = np.random.default_rng(seed)
    bank = []
    for _ in range(count):
        r = np.sqrt(rng.uniform(0.0, 1.0, degree + 1))
        theta = rng.uniform(0.0, 2.0 * math.pi, degree + 1)
        c = r * np.exp(1j * theta)
        if zero_mean:
            c[0] = 0.0
        bank.append(sp.expansion(c))
    return bank


def hypercontractive_exponent(p: float, t: float) -> float:
    """q(t) = 1 + (p - 1) e^{2t}: the largest target exponent from time t."""
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return 1.0 + (p - 1.0) * math.exp(2.0 * t)


def _default_t_grid():
    return [float(t) for t in np.geomspace(0.01, 3.0, 12)]


def hypercontractivity_suite(seed: int = 7, trials: int = 1000,
                             p_list=(1.5, 2.0), t_grid=None,
                             norm_tol: float = 1e-9) -> SuiteReport:
    """Contractivity Lp -> Lq(t) with constant exactly one, plus sharpness.

    For every bank polynomial, every p and every grid time the inequality
    ||e^{-tL} f||_{q(t)} <= ||f||_p is asserted with 1e-9 relative slack.
    A witness search then probes the overshot exponent 1.1 q(t) with
    perturbations 1 + eps h_1; found witnesses are evidence of sharpness
    and are reported, never asserted.
    """
    t_grid = list(t_grid) if t_grid is not None else _default_t_grid()
    rep = SuiteReport("hypercontractivity", {
        "seed": seed, "trials": trials, "p_list": list(p_list), "t_grid": t_grid,
    })
    bank = random_bank(seed, trials)

    h0 = sp.basis_vector(0)
    for p in p_list:
        q = hypercontractive_exponent(p, t_grid[0])
        rep.assert_case("constant_polynomial_equality", {"p": p, "t": t_grid[0], "q": q},
                        ga.lp_norm(sp.semigroup(h0, t_grid[0]), q, norm_tol),
                        ga.lp_norm(h0, p, norm_tol))

    worst = {(p, t): 0.0 for p in p_list for t in t_grid}
    for f in bank:
        base = {p: ga.lp_norm(f, p, norm_tol) for p in p_list}
        for t in t_grid:
            g = sp.semigroup(f, t)
            for p in p_list:
                q = hypercontractive_exponent(p, t)
                val = ga.lp_norm(g, q, norm_tol)
                worst[(p, t)] = max(worst[(p, t)], val / base[p])
    for p in p_list:
        for t in t_grid:
            rep.assert_case("nelson_bound_worst_over_bank",
                            {"p": p, "t": t, "q": hypercontractive_exponent(p, t),
                             "trials": trials},
                            worst[(p, t)], 1.0)

    # sharpness probes: exponent pushed 10% past q(t)
    for p in p_list:
        for t in (t_grid[0], t_grid[len(t_grid) // 2], t_grid[-1]):
            q_over = 1.1 * hypercontractive_exponent(p, t)
            found = []
            for eps in (0.5, 0.1, 0.02):
                f = sp.expansion([1.0, eps])
                ratio = (ga.lp_norm(sp.semigroup(f, t), q_over, norm_tol)
                         / ga.lp_norm(f, p, norm_tol))
                if ratio > 1.0:
                    found.append({"eps": eps, "ratio": ratio})
            rep.report_case("overshoot_witness_search", {"p": p, "t": t, "q": q_over},
                            witnesses=found, witness_found=bool(found))

    # fixed-exponent probe: q = 4 from p = 2 needs t >= (1/2) log 3
    t_star = 0.5 * math.log(3.0)
    f = sp.expansion([1.0, 0.5])
    probes = []
    for factor in (0.25, 0.5, 1.0, 2.0):
        t = factor * t_star
        ratio = ga.lp_norm(sp.semigroup(f, t), 4.0, norm_tol) / ga.lp_norm(f, 2.0, norm_tol)
        probes.append({"t": t, "t_over_threshold": factor, "ratio": ratio,
                       "violates": ratio > 1.0})
    rep.report_case("below_threshold_probe", {"p": 2.0, "q": 4.0, "t_threshold": t_star},
                    probes=probes)
    return rep


def semigroup_suite(seed: int = 7, trials: int = 500, t_grid=None,
                    eps_maximal: float = 1.0 / 64.0,
                    norm_tol: float = 1e-9) -> SuiteReport:
    """Semigroup laws, contractivity, and maximal-function spot checks."""
    t_grid = list(t_grid) if t_grid is not None else [float(t) for t in np.geomspace(0.01, 3.0, 8)]
    rep = SuiteReport("semigroup", {"seed": seed, "trials": trials, "t_grid": t_grid,
                                    "eps_maximal": eps_maximal})
    bank = random_bank(seed, max(20, trials // 25))

    # composition law in coefficient norm
    worst = 0.0
    for f in bank:
        for s, t in ((0.1, 0.3), (0.05, 1.7), (1.0, 2.0)):
            lhs = sp.semigroup(sp.semigroup(f, s), t)
            rhs = sp.semigroup(f, s + t)
            worst = max(worst, (lhs - rhs).coefficient_norm)
    rep.assert_case("semigroup_law_coefficient_residual",
                    {"pairs": 3, "bank": len(bank)}, worst, 1e-12, slack=0.0)

    f0 = bank[0]
    rep.assert_case("identity_at_t0", {}, (sp.semigroup(f0, 0.0) - f0).coefficient_norm,
                    1e-15, slack=0.0)
    drift = sp.semigroup(f0, 40.0)
    rep.assert_case("ergodic_limit_to_mean", {"t": 40.0},
                    abs(complex(drift.eval(1.23)) - f0.mean), 1e-12, slack=0.0)
    rep.assert_case("mean_preservation", {"t": 0.7},
                    abs(sp.semigroup(f0, 0.7).mean - f0.mean), 1e-15, slack=0.0)

    # symbol composition = pointwise product
    sym1 = lambda k: math.exp(-0.2 * k)
    sym2 = lambda k: 0.3 * k
    comp = sp.apply_symbol(sp.apply_symbol(f0, sym1), sym2)
    prod = sp.apply_symbol(f0, lambda k: sym1(k) * sym2(k))
    rep.assert_case("symbol_composition", {}, (comp - prod).coefficient_norm, 1e-12, slack=0.0)

    # L1 contraction across the bank and grid
    big_bank = random_bank(seed + 1, trials)
    worst_ratio = 0.0
    for f in big_bank:
        n1 = ga.lp_norm(f, 1.0, norm_tol)
        for t in t_grid:
            worst_ratio = max(worst_ratio, ga.lp_norm(sp.semigroup(f, t), 1.0, norm_tol) / n1)
    rep.assert_case("l1_contraction_worst_over_bank",
                    {"trials": trials, "t_grid": len(t_grid)}, worst_ratio, 1.0)

    # uniform boundedness of tL e^{-tL} (reported, constant fitted over the scan)
    sup_ratio = {}
    for p in (1.25, 1.5, 2.0):
        best = 0.0
        for f in bank:
            base = ga.lp_norm(f, p, norm_tol)
            for t in t_grid:
                g = sp.apply_symbol(f, lambda k, _t=t: _t * k * math.exp(-_t * k))
                best = max(best, ga.lp_norm(g, p, norm_tol) / base)
        sup_ratio[str(p)] = best
    rep.report_case("tl_semigroup_uniform_bound", {"p_list": [1.25, 1.5, 2.0]},
                    sup_ratios=sup_ratio)
    rep.fitted_constants["tl_semigroup_sup_ratio"] = sup_ratio

    # maximal function spot checks
    rep.assert_case("maximal_constant", {"x": 1.7, "eps": eps_maximal},
                    abs(sp.maximal_function(sp.basis_vector(0), 1.7, eps_maximal) - 1.0),
                    1e-12, slack=0.0)
    h1 = sp.basis_vector(1)
    rep.assert_case("maximal_h1_at_origin", {"x": 0.0, "eps": eps_maximal},
                    sp.maximal_function(h1, 0.0, eps_maximal), 1e-12, slack=0.0)
    expected = math.exp(-0.01) * math.sqrt(2.0)
    rep.assert_case("maximal_h1_left_endpoint", {"x": 1.0, "eps": 0.01},
                    abs(sp.maximal_function(h1, 1.0, 0.01) - expected), 1e-9, slack=0.0)
    return rep


def kernel_suite(seed: int = 7, tol: float = 1e-10) -> SuiteReport:
    """Mehler kernel: conservativity, symmetry, spectral agreement, derivative."""
    rep = SuiteReport("kernel", {"seed": seed, "tol": tol})
    one = me.TruncatedPolynomial(sp.basis_vector(0))

    worst = 0.0
    for t in (0.01, 0.1, 0.5, 1.0, 3.0):
        for x in (0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0):
            worst = max(worst, abs(me.kernel_apply(one, t, x, tol) - 1.0))
    rep.assert_case("conservativity", {"t_grid": 5, "x_grid": 7}, worst, 1e-10, slack=0.0)

    rng = np.random.default_rng(seed)
    sym_ok = True
    pos_ok = True
    for _ in range(50):
        t = float(rng.uniform(0.05, 3.0))
        x = float(rng.uniform(-3.0, 3.0))
        y = float(rng.uniform(-3.0, 3.0))
        a, b = me.mehler_kernel(t, x, y), me.mehler_kernel(t, y, x)
        sym_ok &= (a == b)
        pos_ok &= (a > 0.0)
    rep.assert_case("symmetry_exact", {"samples": 50}, 0.0 if sym_ok else 1.0, 0.0, slack=0.0)
    rep.assert_case("positivity", {"samples": 50}, 0.0 if pos_ok else 1.0, 0.0, slack=0.0)

    # kernel path reproduces the eigenvalue action e^{-sk} h_k(x)
    xs = np.linspace(-4.0, 4.0, 9)
    worst_rel = 0.0
    for k in range(0, 11):
        hk = sp.basis_vector(k)
        g = me.TruncatedPolynomial(hk)
        for s in (0.01, 0.1, 1.0):
            expected = np.array([math.exp(-s * k) * complex(hk.eval(float(x))) for x in xs])
            scale = float(np.max(np.abs(expected)))
            for x, want in zip(xs, expected):
                got = me.kernel_apply(g, s, float(x), tol)
                worst_rel = max(worst_rel, abs(got - want) / scale)
    rep.assert_case("spectral_agreement_k_le_10", {"s_grid": [0.01, 0.1, 1.0]},
                    worst_rel, 1e-8, slack=0.0)

    worst_rel = 0.0
    h = 1e-5
    for _ in range(100):
        t = float(rng.uniform(0.05, 3.0))
        x = float(rng.uniform(-3.0, 3.0))
        y = float(rng.uniform(-3.0, 3.0))
        fd = (me.mehler_kernel(t + h, x, y) - me.mehler_kernel(t - h, x, y)) / (2.0 * h)
        an = me.mehler_kernel_dt(t, x, y)
        worst_rel = max(worst_rel, abs(an - fd) / max(abs(an), 1e-30))
    rep.assert_case("time_derivative_vs_central_difference", {"samples": 100, "h": h},
                    worst_rel, 1e-6, slack=0.0)
    return rep


def annuli_geometry_suite(seed: int = 7) -> SuiteReport:
    """Measure identities, admissibility comparability, doubling constant."""
    rep = SuiteReport("annuli_geometry", {"seed": seed})

    worst = 0.0
    for k in range(0, 7):
        total = sum(ga.annulus_measure(ga.annulus(j)) for j in range(k + 1))
        worst = max(worst, abs(total - ga.ball_measure(0.0, 2.0**k)))
    rep.assert_case("annulus_additivity", {"k_max": 6}, worst, 1e-12, slack=0.0)

    nested = all(
        ga.annulus_star(k).inner <= ga.annulus(k).inner
        and ga.annulus(k).outer <= ga.annulus_star(k).outer
        for k in range(0, 9)
    )
    rep.assert_case("star_contains_plain", {"k_max": 8}, 0.0 if nested else 1.0, 0.0, slack=0.0)

    # gaussian tail: log gamma(C_k) <= -c 4^k with one fitted c > 0
    ks = np.arange(2, 7)
    logs = np.array([ga.log_annulus_measure(ga.annulus(int(k))) for k in ks])
    ratios = -logs / 4.0**ks
    c_fit = float(np.min(ratios))
    slope = float(np.polyfit(4.0**ks, logs, 1)[0])
    rep.fitted_constants["annulus_tail_c"] = c_fit
    rep.fitted_constants["annulus_tail_ls_slope"] = slope
    rep.assert_case("annulus_tail_decay_constant_positive", {"k_range": [2, 6]},
                    -c_fit, 0.0, slack=0.0)
    worst = float(np.max(logs + c_fit * 4.0**ks))
    rep.assert_case("annulus_tail_bound", {"c": c_fit}, worst, 0.0, slack=0.0)

    rng = np.random.default_rng(seed)

    def doubling_ratio(x, t):
        # log-domain ratio: the raw measures underflow far out
        return math.exp(ga.log_ball_measure(x, 2.0 * t) - ga.log_ball_measure(x, t))

    # fit the constant on a deterministic dense scan of the admissible range,
    # then check a random fresh sample against it (1% headroom)
    c_doub = 0.0
    for x in np.concatenate([[0.0], np.geomspace(1e-3, 20.0, 400)]):
        m = ga.admissibility(float(x))
        for frac in np.linspace(0.05, 1.0, 12):
            c_doub = max(c_doub, doubling_ratio(float(x), max(frac * m, 1e-6)))
    fresh = 0.0
    for _ in range(200):
        x = float(rng.uniform(-20.0, 20.0))
        t = max(float(rng.uniform(0.0, 1.0)) * ga.admissibility(x), 1e-6)
        fresh = max(fresh, doubling_ratio(x, t))
    rep.fitted_constants["doubling_constant"] = c_doub
    rep.assert_case("doubling_within_admissibility", {"scan_n": 401 * 12, "fresh_n": 200},
                    fresh, c_doub * 1.01, slack=0.0)

    worst = 0.0
    ok = True
    for _ in range(500):
        x = float(rng.uniform(-40.0, 40.0))
        m, mt = ga.admissibility(x), ga.discrete_admissibility(x)
        ok &= (m <= 2.0 * mt + 1e-15) and (mt <= 2.0 * m + 1e-15)
        worst = max(worst, m / mt, mt / m)
    rep.assert_case("discretization_two_sided_comparability", {"samples": 500},
                    0.0 if ok else 1.0, 0.0, slack=0.0)
    rep.report_case("discretization_worst_ratio", {"samples": 500}, worst_ratio=worst)

    slice_ok = (
        ga.region_slice(0.3).radius == 2.0
        and ga.region_slice(1.0).radius == 0.0
        and ga.region_slice(0.05).radius == 16.0
    )
    rep.assert_case("region_slice_values", {}, 0.0 if slice_ok else 1.0, 0.0, slack=0.0)

    member_ok = True
    for _ in range(300):
        t = float(rng.uniform(0.01, 1.2))
        y = float(rng.uniform(-20.0, 20.0))
        inside = abs(y) < ga.region_slice(t).radius if t < 1.0 else False
        member_ok &= inside == (ga.discrete_admissibility(y) > t)
    rep.assert_case("region_slice_membership", {"samples": 300},
                    0.0 if member_ok else 1.0, 0.0, slack=0.0)
    return rep


def _band_count(k: int, kappa: float) -> int:
    m = round(math.log(kappa, 4.0))
    return k - 1 + 2 * m


def ondiagonal_suite(params: dec.DecompositionParams, p: float = 1.5,
                     k_max: int = 6, seed: int = 7, bank_size: int = 3,
                     chain_k_max: int = 3, norm_tol: float = 1e-9) -> SuiteReport:
    """Dyadic time partition, Hoelder step, and the hypercontractive chain.

    With kappa = 4^m the band count N(k) = k - 1 + 2m makes the partition
    of (4^{-k}/kappa^2, 1] into bands (4^{-k+j}/kappa^2, 4^{-k+j+1}/kappa^2]
    exact: 4^{-k+N(k)+1} = kappa^2.  On each band the exponent
    q(k,j) = 1 + (p-1) e^{2 (d'+d) 4^{-k+j}/kappa^2} is hypercontractive
    from the band's left endpoint, so Hoelder plus contractivity give

        ||1_{C_k} e^{-(d'+d) t L} (1_{C_k^*} f)||_p
            <= gamma(C_k)^{1/p - 1/q(k,j)} ||1_{C_k^*} f||_p

    exactly (no unspecified constant), which is asserted.  The decay
    gamma(C_k)^{1/p-1/q(k,j)} <= A e^{-c 4^j} is fitted and reported.
    """
    kappa = params.kappa
    m = math.log(kappa, 4.0)
    if abs(m - round(m)) > 1e-12:
        raise ValueError("the dyadic partition requires kappa to be a power of 4")
    m = round(m)
    rep = SuiteReport("ondiagonal", {
        "p": p, "kappa": kappa, "k_max": k_max, "seed": seed,
        "delta": params.delta, "delta_prime": params.delta_prime,
        "bank_size": bank_size,
    })

    exact = all(4 ** (-k + _band_count(k, kappa) + 1) == round(kappa) ** 2
                for k in range(0, 9))
    rep.assert_case("partition_identity_exact", {"k_max": 8, "kappa": kappa},
                    0.0 if exact else 1.0, 0.0, slack=0.0)

    bank = random_bank(seed, bank_size)
    ds = params.delta_sum
    kappa2 = kappa * kappa

    gap_ratios = []
    decay_pts = []
    worst_hoelder = 0.0
    for k in range(0, k_max + 1):
        ann = ga.annulus(k)
        log_gamma = ga.log_annulus_measure(ann)
        intervals = ([(-ann.outer, ann.outer)] if ann.inner == 0.0
                     else [(-ann.outer, -ann.inner), (ann.inner, ann.outer)])
        for j in range(0, _band_count(k, kappa) + 1):
            t_left = 4.0 ** (-k + j) / kappa2
            q = 1.0 + (p - 1.0) * math.exp(2.0 * ds * t_left)
            e_gap = 1.0 / p - 1.0 / q
            gap_ratios.append(e_gap / (4.0 ** (-k + j)))
            decay_pts.append((j, e_gap * log_gamma))
            gamma_pow = math.exp(e_gap * log_gamma)
            for idx, g in enumerate(bank):
                lhs = ga.interval_lp_norm(g, p, intervals, norm_tol)
                rhs = gamma_pow * ga.lp_norm(g, q, norm_tol)
                ratio = lhs / rhs if rhs > 0 else 0.0
                worst_hoelder = max(worst_hoelder, ratio)
                if ratio > 1.0 + EXACT_SLACK:
                    rep.assert_case("hoelder_step", {"k": k, "j": j, "bank": idx}, lhs, rhs)
    rep.assert_case("hoelder_step_worst_over_sample",
                    {"k_max": k_max, "bank_size": bank_size}, worst_hoelder, 1.0)

    c_gap = min(gap_ratios)
    rep.fitted_constants["exponent_gap_c"] = c_gap
    rep.assert_case("exponent_gap_positive", {"pairs": len(gap_ratios)}, -c_gap, 0.0, slack=0.0)

    xs = np.array([4.0**j for j, _ in decay_pts])
    ys = np.array([v for _, v in decay_pts])
    slope = float(np.polyfit(xs, ys, 1)[0])
    c_decay = -slope
    log_a = float(np.max(ys + c_decay * xs))
    rep.fitted_constants["band_decay_c"] = c_decay
    rep.fitted_constants["band_decay_A"] = math.exp(log_a)
    rep.assert_case("band_decay_constant_positive", {"points": len(decay_pts)},
                    -c_decay, 0.0, slack=0.0)

    # full chain through the kernel path (truncated inputs are not polynomials)
    def restricted_semigroup_values(xs_arr, s, source: ga.Annulus, f):
        outer = me.TruncatedPolynomial(f, radius=source.outer)
        inner = (me.TruncatedPolynomial(f, radius=source.inner)
                 if source.inner > 0 else None)
        out = np.empty(len(xs_arr), dtype=complex)
        for i, xv in enumerate(xs_arr):
            val = me.kernel_apply(outer, s, float(xv), 1e-7)
            if inner is not None:
                val -= me.kernel_apply(inner, s, float(xv), 1e-7)
            out[i] = val
        return out

    worst_chain = 0.0
    chain_cases = 0
    for k in range(0, min(chain_k_max, k_max) + 1):
        ann = ga.annulus(k)
        star = ga.annulus_star(k)
        targets = ([(-ann.outer, ann.outer)] if ann.inner == 0.0
                   else [(-ann.outer, -ann.inner), (ann.inner, ann.outer)])
        star_iv = ([(-star.outer, star.outer)] if star.inner == 0.0
                   else [(-star.outer, -star.inner), (star.inner, star.outer)])
        nk = _band_count(k, kappa)
        f = bank[0]
        for j in sorted({0, nk}):
            t_left = 4.0 ** (-k + j) / kappa2
            s = ds * t_left
            q = 1.0 + (p - 1.0) * math.exp(2.0 * s)
            gamma_pow = math.exp((1.0 / p - 1.0 / q) * ga.log_annulus_measure(ann))
            lhs = ga.interval_lp_norm(
                lambda xv: restricted_semigroup_values(np.atleast_1d(xv), s, star, f),
                p, targets, 1e-4)
            rhs = gamma_pow * ga.interval_lp_norm(f, p, star_iv, norm_tol)
            chain_cases += 1
            ratio = lhs / rhs if rhs > 0 else 0.0
            worst_chain = max(worst_chain, ratio)
            if ratio > 1.0 + EXACT_SLACK:
                rep.assert_case("hypercontractive_chain", {"k": k, "j": j}, lhs, rhs)
    rep.assert_case("hypercontractive_chain_worst",
                    {"cases": chain_cases, "chain_k_max": chain_k_max}, worst_chain, 1.0)

    # empirical probe of the open L1 band-decay hypothesis; reported only
    k = 2
    ann, star = ga.annulus(k), ga.annulus_star(k)
    targets = [(-ann.outer, -ann.inner), (ann.inner, ann.outer)]
    star_iv = [(-star.outer, -star.inner), (star.inner, star.outer)]
    f = bank[0]
    den = ga.interval_lp_norm(f, 1.0, star_iv, norm_tol)
    probe = []
    for j in range(1, _band_count(k, kappa) + 1):
        s = 4.0 ** (-k + j) / kappa2
        num = ga.interval_lp_norm(
            lambda xv: restricted_semigroup_values(np.atleast_1d(xv), s, star, f),
            1.0, targets, 1e-4)
        probe.append({"j": j, "l1_ratio": num / den})
    js = np.array([c["j"] for c in probe], dtype=float)
    vals = np.array([max(c["l1_ratio"], 1e-300) for c in probe])
    alpha = float(-np.polyfit(np.log(js), np.log(vals), 1)[0]) if len(probe) > 1 else 0.0
    rep.report_case("l1_band_decay_hypothesis", {"k": k}, ratios=probe,
                    best_empirical_alpha=alpha)
    rep.fitted_constants["l1_band_decay_alpha"] = alpha
    return rep


def offdiagonal_suite(params: dec.DecompositionParams, p: float = 1.5,
                      k_max: int = 4, l_max: int = 2, seed: int = 7,
                      bank_size: int = 1) -> SuiteReport:
    """Off-diagonal decay of tL e^{-tL} between separated dyadic sets.

    The bound has the shape t^{-1/2} exp(-d^2/(8t)) exp((sup|x|^2+sup|y|^2)/2)
    and both sides are handled in the log domain (the raw factors overflow
    float64 massively).  The distance entering the bound is the dyadic
    shorthand 2^{k+l-2}, which equals the true set distance only at l = 2
    and underestimates it for l > 2 (making the bound larger, hence safe);
    at l = 1 the annuli touch and the shorthand has no metric meaning, so
    it is reported but not asserted.  The constant is fitted once on
    (k, l) = (2, 1) and reused.
    """
    rep = SuiteReport("offdiagonal", {
        "p": p, "k_max": k_max, "l_max": l_max, "seed": seed,
        "delta": params.delta, "delta_prime": params.delta_prime,
        "bank_size": bank_size,
    })
    ds = params.delta_sum
    bank = random_bank(seed, bank_size)

    for k in range(2, k_max + 1):
        for l in range(1, l_max + 1):
            true_d = 2.0 ** (k + l - 1) - 2.0**k
            formula_d = 2.0 ** (k + l - 2)
            if l >= 2:
                rep.assert_case("distance_formula_lower_bound", {"k": k, "l": l, "true": true_d},
                                formula_d, true_d, slack=0.0)
                if l == 2:
                    rep.assert_case("distance_formula_exact_at_l2", {"k": k},
                                    abs(true_d - formula_d), 0.0, slack=0.0)
            else:
                rep.report_case("distance_formula_adjacent_annuli", {"k": k, "l": l},
                                true_distance=true_d, dyadic_shorthand=formula_d)
        rep.assert_case("ball_distance_exact", {"k": k},
                        abs((2.0 ** (k - 1) - 2.0 ** (k - 2)) - 2.0 ** (k - 2)),
                        0.0, slack=0.0)

    def log_ratio(target: ga.Annulus, source_iv, source_trunc, f, t_op):
        def values(xs_arr):
            xs_arr = np.atleast_1d(xs_arr)
            out = np.empty(len(xs_arr), dtype=complex)
            root = math.sqrt(t_op)
            for i, xv in enumerate(xs_arr):
                val = me.kernel_apply_t2l(source_trunc[0], root, 1.0, float(xv), 1e-7)
                if len(source_trunc) > 1:
                    val -= me.kernel_apply_t2l(source_trunc[1], root, 1.0, float(xv), 1e-7)
                out[i] = val
            return out

        targets = [(-target.outer, -target.inner), (target.inner, target.outer)]
        num = ga.interval_lp_norm(values, p, targets, 1e-4)
        den = ga.interval_lp_norm(f, p, source_iv, 1e-9)
        if num == 0.0:
            return -math.inf
        return math.log(num / den)

    def log_bound(t_op, d, sup_src_sq, sup_tgt_sq):
        return -0.5 * math.log(t_op) - d * d / (8.0 * t_op) + 0.5 * (sup_src_sq + sup_tgt_sq)

    def case_data(k, l, f, t_scale):
        t_op = ds * t_scale
        target = ga.annulus(k)
        if l == 0:  # source is the inner ball B(0, 2^{k-2})
            r = 2.0 ** (k - 2)
            src_iv = [(-r, r)]
            trunc = [me.TruncatedPolynomial(f, radius=r)]
            d = 2.0 ** (k - 2)
            sup_src = r * r
        else:
            src = ga.annulus(k + l)
            src_iv = [(-src.outer, -src.inner), (src.inner, src.outer)]
            trunc = [me.TruncatedPolynomial(f, radius=src.outer),
                     me.TruncatedPolynomial(f, radius=src.inner)]
            d = 2.0 ** (k + l - 2)
            sup_src = src.outer**2
        lr = log_ratio(target, src_iv, trunc, f, t_op)
        lb = log_bound(t_op, d, sup_src, target.outer**2)
        return lr, lb

    # anchor: (k, l) = (2, 1) at the slower representative time.  The anchor
    # pair is adjacent, so its bound is wildly generous and the fitted
    # constant is huge; the asserted cases below all carry genuine
    # separation and sit far inside it.
    anchor_lr, anchor_lb = case_data(2, 1, bank[0], 2.0**-3)
    log_c = anchor_lr - anchor_lb
    rep.fitted_constants["log_fitted_constant"] = log_c
    rep.report_case("anchor_adjacent_pair", {"k": 2, "l": 1, "t_scale": 2.0**-3},
                    log_ratio=anchor_lr, log_bound=anchor_lb)

    separations = [0] + list(range(2, l_max + 1))
    ratios = {}
    for k in range(2, k_max + 1):
        for l in separations:
            for t_scale in (2.0 ** (-k - 1), 2.0**-k):
                for idx, f in enumerate(bank):
                    lr, lb = case_data(k, l, f, t_scale)
                    ratios[(k, l, t_scale, idx)] = lr
                    margin = lr - (log_c + lb)  # -inf when the ratio underflows
                    rep.assert_case(
                        "offdiagonal_log_bound",
                        {"k": k, "l": l, "t_scale": t_scale, "bank": idx,
                         "log_ratio": None if lr == -math.inf else lr,
                         "log_bound": lb},
                        max(margin, 0.0), 1e-9, slack=0.0)

    second, _ = case_data(2, 2, bank[0], 2.0**-3)
    rep.assert_case("decay_in_separation",
                    {"k": 2, "adjacent_log_ratio": anchor_lr,
                     "separated_log_ratio": None if second == -math.inf else second},
                    0.0 if second <= anchor_lr else 1.0, 0.0, slack=0.0)
    return rep


def spectral_gap_suite(p_list=(1.25, 1.5), t_grid=None, seed: int = 7,
                       trials: int = 200, norm_tol: float = 1e-10) -> SuiteReport:
    """Exact p = 2 gap through the quadrature path, fitted decay for p < 2."""
    t_grid = list(t_grid) if t_grid is not None else [float(t) for t in np.geomspace(0.1, 3.0, 8)]
    rep = SuiteReport("spectral_gap", {"p_list": list(p_list), "t_grid": t_grid,
                                       "seed": seed, "trials": trials})
    h1 = sp.basis_vector(1)
    worst = 0.0
    for t in (0.1, 1.0, 3.0):
        worst = max(worst, abs(ga.lp_norm(sp.semigroup(h1, t), 2.0, 1e-12) * math.exp(t) - 1.0))
    rep.assert_case("h1_saturates_gap", {"t_grid": [0.1, 1.0, 3.0]}, worst, 1e-12, slack=0.0)

    rep.assert_case("theta_formula", {},
                    abs((2.0 - 2.0 / 2.0) - 1.0) + abs((2.0 - 2.0 / 1.5) - 2.0 / 3.0),
                    1e-15, slack=0.0)

    h3 = sp.basis_vector(3)
    rep.assert_case("h3_decay_dominated", {"t": 1.0},
                    ga.lp_norm(sp.semigroup(h3, 1.0), 2.0, norm_tol),
                    math.exp(-1.0) * ga.lp_norm(h3, 2.0, norm_tol))

    bank = random_bank(seed, trials, zero_mean=True)
    worst = 0.0
    for f in bank:
        n2 = ga.lp_norm(f, 2.0, norm_tol)
        for t in t_grid:
            worst = max(worst, ga.lp_norm(sp.semigroup(f, t), 2.0, norm_tol)
                        / (math.exp(-t) * n2))
    rep.assert_case("l2_gap_contraction_worst", {"trials": trials}, worst, 1.0, slack=1e-10)

    # p in (1, 2): constant fitted at the anchor time, reused across the grid
    small_bank = [h1] + random_bank(seed + 2, 20, zero_mean=True)
    anchor_t = min(t_grid, key=lambda t: abs(t - 0.1))
    for p in p_list:
        theta = 2.0 - 2.0 / p
        base = {id(f): ga.lp_norm(f, p, norm_tol) for f in small_bank}
        fitted = max(
            ga.lp_norm(sp.semigroup(f, anchor_t), p, norm_tol)
            * math.exp(theta * anchor_t) / base[id(f)]
            for f in small_bank
        )
        rep.fitted_constants[f"interpolated_gap_constant_p{p}"] = fitted
        worst = 0.0
        for f in small_bank:
            for t in t_grid:
                ratio = (ga.lp_norm(sp.semigroup(f, t), p, norm_tol)
                         * math.exp(theta * t) / base[id(f)])
                worst = max(worst, ratio)
        rep.assert_case("interpolated_gap_fitted", {"p": p, "theta": theta,
                                                    "anchor_t": anchor_t},
                        worst, fitted)
    return rep


def pi3_pointwise_suite(params: dec.DecompositionParams, phispec: mu.PhiSpec,
                        seed: int = 7, bank_size: int = 4, grid=None,
                        tol: float = 1e-7) -> SuiteReport:
    """Pointwise control of the non-admissible part by three boundary terms.

    Requires a profile with integrable derivatives (the suite precondition);
    the right-hand side combines the two boundary-time evaluations and the
    remaining derivative-weighted time integral.  A single constant is
    fitted on the first bank polynomial over the grid and reused (with a
    fixed, recorded safety margin) for the rest of the bank; refitting per
    case is forbidden.
    """
    cond = mu.check_condition_d(phispec)
    if not cond.holds:
        raise ValueError(
            f"profile {phispec.label!r} lacks integrable derivatives on [1, inf)")
    grid = list(grid) if grid is not None else [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0]
    rep = SuiteReport("pi3_pointwise", {
        "profile": phispec.label, "grid": grid, "seed": seed,
        "bank_size": bank_size, "condition_d_integral": cond.value,
        "delta": params.delta, "delta_prime": params.delta_prime,
        "kappa": params.kappa,
    })
    bounds = mu.check_bounds(phispec)
    sup_phi = bounds.sup_phi
    sup_phi_dphi = bounds.sup_phi + bounds.sup_t_dphi
    ds = params.delta_sum
    bank = random_bank(seed, bank_size, zero_mean=True)

    def rhs_terms(f, x):
        tb = ga.discrete_admissibility(x) ** 2 / params.kappa**2
        tlf = sp.apply_symbol(f, lambda k: tb * k * math.exp(-ds * tb * k))
        t1 = sup_phi * abs(complex(tlf.eval(x)))
        sgf = sp.apply_symbol(f, lambda k: math.exp(-ds * tb * k))
        t2 = sup_phi_dphi * abs(complex(sgf.eval(x)))

        def derivative_weight(t):
            return abs(phispec.dphi(t)) + t * abs(phispec.d2phi(t))

        total = 0.0
        lo = tb
        hi = max(2.0 * lo, 1.0)
        for _ in range(40):
            nodes, weights = ga._panel_nodes(np.linspace(math.log(lo), math.log(hi), 65))
            ts = np.exp(nodes)
            vals = np.array([
                derivative_weight(t) * abs(complex(
                    sp.apply_symbol(f, lambda k, _t=t: math.exp(-ds * _t * k)).eval(x))) * t
                for t in ts
            ])  # extra t from dt = t dsigma
            piece = float(np.sum(weights * vals))
            total += piece
            if piece < 0.01 * tol * max(total, 1.0):
                break
            lo = hi
            hi *= 2.0
        return t1, t2, total

    data = []
    for idx, f in enumerate(bank):
        for x in grid:
            lhs = abs(dec.pi3(f, phispec, params, float(x)))
            t1, t2, t3 = rhs_terms(f, float(x))
            data.append((idx, x, lhs, t1 + t2 + t3))

    # the pointwise ratio spikes where the boundary terms nearly cancel, so
    # the anchor constant (first bank polynomial over the grid) carries a
    # fixed, recorded safety margin for the rest of the sample
    margin = 8.0
    anchor = [d for d in data if d[0] == 0]
    fitted = max((lhs / rhs) for _, _, lhs, rhs in anchor if rhs > 0)
    rep.fitted_constants["pointwise_constant"] = fitted
    rep.fitted_constants["cross_sample_margin"] = margin
    worst = 0.0
    for idx, x, lhs, rhs in data:
        ratio = lhs / (margin * fitted * rhs) if rhs > 0 else 0.0
        worst = max(worst, ratio)
    rep.assert_case("pointwise_bound_fitted_on_first_bank_poly",
                    {"bank_size": bank_size, "grid_size": len(grid),
                     "margin": margin}, worst, 1.0)

    def log_weight_norm(f):
        def g(xs):
            xs = np.asarray(xs)
            vals = np.asarray(f.eval(xs))
            w = 1.0 + np.log(np.maximum(np.abs(xs), 1.0))
            return w * vals
        return ga.lp_norm(g, 1.0, 1e-9)

    rep.report_case("log_weighted_l1_norms", {"bank_size": bank_size},
                    values=[log_weight_norm(f) for f in bank])
    return rep


def decomposition_suite(params: dec.DecompositionParams, tau: float = 1.0,
                        grid=None, residual_bound: float = 1e-5) -> SuiteReport:
    """End-to-end verification of the three-part multiplier identity."""
    grid = list(grid) if grid is not None else [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0]
    rep = SuiteReport("decomposition", {
        "delta": params.delta, "delta_prime": params.delta_prime,
        "kappa": params.kappa, "t_tol": params.t_tol, "tau": tau, "grid": grid,
        "constraint_flags": params.constraint_flags(),
    })
    c = dec.scaling_constant(params.delta, params.delta_prime)
    rep.report_case("scaling_constant", {"delta": params.delta,
                                         "delta_prime": params.delta_prime}, value=c)

    profiles = [
        mu.make_phi("constant"),
        mu.make_phi("imaginary_power", tau=tau),
        mu.make_phi("damped_imaginary", tau=tau),
    ]

    # per-eigenvalue scalar identity: c * integral equals phi(k)
    ds = params.delta_sum
    for spec_phi in profiles:
        worst = 0.0
        for k in (1, 2, 3):
            lhs = c * _scalar_decomposition_integral(spec_phi, ds, k)
            rhs = mu.phi_lambda(spec_phi, float(k), 1e-10)
            worst = max(worst, abs(lhs - rhs))
        rep.assert_case("scalar_reconstruction", {"profile": spec_phi.label},
                        worst, 1e-8, slack=0.0)

    h = sp.basis_vector
    f_bank = {
        "h1": h(1),
        "h1+h3": h(1) + h(3),
        "h2-h4": h(2) - h(4),
    }

    # indicator partition: u plus the complementary truncation restores the field
    f = f_bank["h1+h3"]
    u = dec.build_u(f, params.delta)
    worst = 0.0
    for t in (0.05, 0.2, 0.7):
        ys = np.linspace(-6.0, 6.0, 41)
        full = sp.t2l_semigroup(f, t, params.delta).eval(ys)
        comp = me.TruncatedPolynomial(sp.t2l_semigroup(f, t, params.delta),
                                      radius=ga.region_slice(t).radius,
                                      complement=True).evaluate(ys)
        worst = max(worst, float(np.max(np.abs(u.evaluate(ys, t) + comp - full))))
    rep.assert_case("indicator_partition_exact", {"t_grid": [0.05, 0.2, 0.7]},
                    worst, 0.0, slack=0.0)

    rep.assert_case("pi2_gaussian_tail_at_origin", {"f": "h1"},
                    abs(dec.pi2(f_bank["h1"], profiles[0], params, 0.0)),
                    1e-3 * ga.lp_norm(f_bank["h1"], 2.0, 1e-9), slack=0.0)

    worst_resid = 0.0
    for fname, fpoly in f_bank.items():
        for spec_phi in profiles:
            resid = dec.reconstruction_residual(fpoly, spec_phi, params, grid)
            worst_resid = max(worst_resid, resid)
            rep.assert_case("reconstruction_residual",
                            {"f": fname, "profile": spec_phi.label},
                            resid, residual_bound, slack=0.0)
    rep.fitted_constants["max_residual"] = worst_resid
    return rep


def _scalar_decomposition_integral(spec_phi: mu.PhiSpec, ds: float, k: int) -> complex:
    """integral_0^inf Phi(ds t^2) (t^2 k)^2 e^{-ds t^2 k} dt/t by log quadrature."""
    prev = None
    for level in range(8):
        count = 128 * 2**level
        v_edges = np.geomspace(1e-10, 2000.0 / (ds * k), count + 1)  # v = t^2
        nodes, weights = ga._panel_nodes(v_edges)
        vals = np.array([spec_phi.phi(ds * v) * (v * k) ** 2 * math.exp(-ds * v * k) / v
                         for v in nodes])
        est = 0.5 * complex(np.sum(weights * vals))
        if prev is not None and abs(est - prev) <= 1e-10 * max(abs(est), 1e-3):
            return est
        prev = est
    raise NonConvergenceError("scalar decomposition integral did not stabilize")


def tent_suite(params: dec.DecompositionParams, tol: float = 1e-4,
               seed: int = 7) -> SuiteReport:
    """Tent-norm geometry: Fubini identity, homogeneity, aperture behavior."""
    rep = SuiteReport("tent", {"delta": params.delta, "tol": tol, "seed": seed})
    h = sp.basis_vector

    for name, f in (("h1", h(1)), ("h2", h(2))):
        u = dec.build_u(f, params.delta)
        tn = te.tent_norm(u, 2.0, tol=tol / 10.0)
        direct = te.region_square_integral(u, tol=tol / 10.0)
        rep.assert_case("fubini_identity_p2", {"f": name},
                        abs(tn * tn - direct), tol * direct, slack=0.0)

    f = h(1) + h(3)
    s1 = te.square_function(f, 0.7, 1e-7)
    s2 = te.square_function(2.0 * f, 0.7, 1e-7)
    rep.assert_case("square_function_homogeneity", {"x": 0.7},
                    abs(s2 - 2.0 * s1), 1e-10 * s1, slack=0.0)

    u = dec.build_u(f, params.delta)
    narrow = te.cone_integral(u, te.ConeSpec(0.5, 1.0), 1e-6)
    wide = te.cone_integral(u, te.ConeSpec(0.5, 2.0), 1e-6)
    rep.assert_case("cone_monotone_in_aperture", {"x": 0.5}, narrow, wide, slack=1e-9)

    ratios = {}
    worst = 0.0
    for fname, fpoly in (("h1", h(1)), ("h2", h(2)), ("h1+h3", h(1) + h(3))):
        for x in (0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0):
            cmp_res = te.aperture_compare(fpoly, 1.0, x, 1e-4)
            ratios[f"{fname}@x={x}"] = cmp_res.ratio
            worst = max(worst, cmp_res.ratio)
            if not math.isfinite(cmp_res.ratio):
                rep.assert_case("aperture_ratio_finite", {"f": fname, "x": x},
                                math.inf, 1.0)
    rep.fitted_constants["aperture_comparison_constant"] = worst
    rep.assert_case("aperture_ratios_finite", {"cases": len(ratios)},
                    0.0 if math.isfinite(worst) else math.inf, 0.0, slack=0.0)
    rep.report_case("aperture_ratios", {}, ratios=ratios)

    base = te.square_function(f, 0.5, 1e-7)
    lipschitz = {}
    for eps in (1e-2, 1e-3):
        pert = f + eps * h(5)
        lipschitz[str(eps)] = abs(te.square_function(pert, 0.5, 1e-7) - base) / eps
    rep.report_case("coefficient_perturbation_stability", {"x": 0.5},
                    difference_per_eps=lipschitz)
    return rep
