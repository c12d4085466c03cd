"""Acceptance gate: the quantitative checks the build must clear, at fixed
tolerances.

Each test prints one ``ACCEPTANCE C<k>`` pass/fail line (run with ``-s`` to
see them live). Expensive experiment runs are shared through session
fixtures. Criterion 5's halving clause is asserted exactly as stated; the
measured ratio of the exact moduli is ~0.65, so that single clause fails and
the printed line carries the measured numbers.
"""

import math

import numpy as np
import pytest

from oscmax import harness
from oscmax.constructions import build_perturbation, ramp_average_exact
from oscmax.maximal import dyadic_nonlocal, mhl_point, mhl_point_bruteforce
from oscmax.oscillation import average, bmo_norm_1d, subset_osc
from oscmax.sampling import log_abs_sampler, sample_to_step
from oscmax.stepfn import StepFunction1D, indicator

CFG = harness.DEFAULT_CONFIG


def report(cid: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {cid}: {'PASS' if ok else 'FAIL'} ({detail})")


def rows_by_metric(rows, metric):
    return [r for r in rows if r.metric == metric]


@pytest.fixture(scope="session")
def disc_rows():
    return harness.exp_discontinuity(CFG)


@pytest.fixture(scope="session")
def vmo_rows():
    return harness.exp_vmo(CFG)


@pytest.fixture(scope="session")
def vmo_jump_rows():
    return harness.exp_vmo(CFG, profile="jump")


@pytest.fixture(scope="session")
def product_rows():
    return harness.exp_product(CFG)


@pytest.fixture(scope="session")
def strong_rows():
    return harness.exp_strong(CFG)


@pytest.fixture(scope="session")
def expint_rows():
    return harness.exp_expint(CFG)


def test_c01_maximal_exactness():
    chi = indicator((0.0, 1.0))
    win = (-12.0, 4.0)
    worst_rel = 0.0
    for x in np.linspace(-10.0, 0.0, 100):
        got = mhl_point(chi, float(x), win)
        want = 1.0 / (1.0 - float(x))
        worst_rel = max(worst_rel, abs(got - want) / want)
    rng = np.random.default_rng(CFG.seed)
    worst_abs = 0.0
    for _ in range(200):
        f = harness._random_step(rng, int(rng.integers(2, 51)))
        lo, hi = f.span
        w = (lo - 1.0, hi + 1.0)
        x = float(rng.uniform(*w))
        worst_abs = max(worst_abs,
                        abs(mhl_point(f, x, w) - mhl_point_bruteforce(f, x, w)))
    ok = worst_rel <= 1e-9 and worst_abs <= 1e-9
    report("C1 maximal exactness", ok,
           f"formula rel err {worst_rel:.2e}, oracle dev {worst_abs:.2e}")
    assert worst_rel <= 1e-9
    assert worst_abs <= 1e-9


def test_c02_even_periodic_extension():
    rng = np.random.default_rng(CFG.seed + 1)
    worst = 0.0
    periods = (1.0, 2.0, 8.0)
    for case in range(50):
        t = periods[case % 3]
        n = int(rng.integers(2, 10))
        bp = np.sort(rng.uniform(0.0, t / 2, n + 1))
        while np.min(np.diff(bp)) <= 1e-6:
            bp = np.sort(rng.uniform(0.0, t / 2, n + 1))
        h = StepFunction1D(bp, rng.normal(0, 1, n))
        from oscmax.stepfn import periodic_even_extend
        ext = periodic_even_extend(h, t)
        m = ext.materialize((-3 * t, 3 * t))
        norm_h = bmo_norm_1d(h, (0.0, t / 2), 10).value
        norm_big = bmo_norm_1d(m, (-3 * t, 3 * t), 10).value
        if norm_h > 0:
            worst = max(worst, norm_big / norm_h)
        else:
            assert norm_big <= 1e-12
    ok = worst <= 10.0
    report("C2 periodic extension bound", ok,
           f"max norm ratio {worst:.3f} <= 10")
    assert ok


def test_c03_perturbation_profile_suite(disc_rows):
    details = []
    for n in (100, 1000, 10000):
        g = build_perturbation(n, -3.0, CFG.disc_cell_error, (-12.0, 2.0 * n))
        xs = np.linspace(-2.999, 0.999, 61)
        assert np.all(g(xs) == 0.0)                   # vanishes on [c, 1]
        assert np.all(g.values >= 0.0)                # nonnegative
        assert g.values.max() < 1.0                   # bounded by 1
        avg = average(g, (0.0, float(n)))
        exact = ramp_average_exact(n)
        details.append(abs(avg - exact))
        assert abs(avg - exact) <= 1e-4
    norms = [r.value for r in rows_by_metric(disc_rows, "perturbation_bmo")]
    decreasing = all(a > b for a, b in zip(norms, norms[1:]))
    # the measured norms also keep the log(|c|)/(1 + log n) shape: one fitted
    # constant across the sweep
    fits = [v * (1 + math.log(n)) / math.log(3.0)
            for v, n in zip(norms, (100, 1000, 10000))]
    shape_ok = max(fits) / min(fits) <= 1.5
    ok = decreasing and shape_ok and max(details) <= 1e-4
    report("C3 perturbation suite", ok,
           f"avg err {max(details):.2e}, norms {['%.4f' % v for v in norms]}, "
           f"shape fit spread {max(fits) / min(fits):.3f}")
    assert decreasing
    assert shape_ok


def test_c04_discontinuity(disc_rows):
    diffs = rows_by_metric(disc_rows, "max_abs_diff_on_mask")
    oscs = rows_by_metric(disc_rows, "osc_diff")
    final = rows_by_metric(disc_rows, "perturbation_bmo_final")[0]
    big_n = [r for r in oscs if r.params["n"] == 10000][0]
    norms = [r.value for r in rows_by_metric(disc_rows, "perturbation_bmo")]
    ok = (all(r.value <= 1e-6 for r in diffs)
          and all(r.passed for r in oscs)
          and big_n.value >= 0.003
          and all(a > b for a, b in zip(norms, norms[1:]))
          and final.value <= 0.1)
    report("C4 discontinuity", ok,
           f"max|Mf_n-Mf|={max(r.value for r in diffs):.2e}, "
           f"osc@1e4={big_n.value:.4f}>=0.003, final norm={final.value:.4f}")
    assert all(r.value <= 1e-6 for r in diffs)
    assert all(r.passed for r in oscs)
    assert big_n.value >= 0.003
    assert all(a > b for a, b in zip(norms, norms[1:]))
    assert final.value <= 0.1


def test_c05a_vmo_monotone_and_flag(vmo_rows, vmo_jump_rows):
    mf = rows_by_metric(vmo_rows, "omega_mf")
    vals = [r.value for r in sorted(mf, key=lambda r: r.params["j"])]
    mono = all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    flagged = any(r.metric == "non_vmo_flag" and r.passed for r in vmo_jump_rows)
    jump_omegas = [r.value for r in rows_by_metric(vmo_jump_rows, "omega_f")]
    flat = (max(jump_omegas) - min(jump_omegas)) <= 0.05 * max(jump_omegas)
    ok = mono and flagged and flat
    report("C5a vmo monotone + flag", ok,
           f"omega(Mf) {vals[0]:.4f}..{vals[-1]:.4f}, jump flagged={flagged}")
    assert mono and flagged and flat


def test_c05b_vmo_halving(vmo_rows):
    row = rows_by_metric(vmo_rows, "omega_mf_halving")[0]
    ok = row.value <= 0.5
    report("C5b vmo halving", ok,
           f"omega(Mf,2^-10)/omega(Mf,2^-2) = {row.value:.4f}, required <= 0.5; "
           "the exact modulus of this profile decays like the measured curve, "
           "slower than the halving model at these scales")
    assert row.value <= 0.5


def test_c06_subset_bound():
    f = sample_to_step(log_abs_sampler(-1, 1), (-1, 1), 1e-3)
    worst = 0.0
    for k in range(1, 6):
        v, _ = subset_osc(f, (-1, 1), (-math.exp(-k), math.exp(-k)))
        worst = max(worst, abs(v - k))
    rng = np.random.default_rng(CFG.seed + 2)
    c_fit = 0.0
    for _ in range(100):
        g = harness._random_step(rng, int(rng.integers(3, 30)))
        lo, hi = g.span
        norm = bmo_norm_1d(g, (lo, hi), 8).value
        if norm <= 1e-9:
            continue
        g = g.scale(1.0 / norm)
        a = float(rng.uniform(lo, hi - 1e-3))
        b = float(rng.uniform(a + 1e-4 * (hi - lo), hi))
        v, bound = subset_osc(g, (lo, hi), (a, b))
        c_fit = max(c_fit, v / bound)
    ok = worst <= 1e-3 and c_fit <= 2.0
    report("C6 subset bound", ok,
           f"well depth err {worst:.2e}, fitted constant {c_fit:.3f} <= 2")
    assert worst <= 1e-3
    assert c_fit <= 2.0 and c_fit < 10.0


def test_c07_product_suite(product_rows):
    drift = rows_by_metric(product_rows, "squares_bmo_drift")[0]
    rects = [r.value for r in rows_by_metric(product_rows, "rects_bmo")]
    fub_lo = rows_by_metric(product_rows, "fubini_ratio_min")[0]
    fub_hi = rows_by_metric(product_rows, "fubini_ratio_max")[0]
    increasing = all(a < b for a, b in zip(rects, rects[1:]))
    ok = (0 <= drift.value <= 0.02 and increasing
          and fub_lo.value >= 0.25 and fub_hi.value <= 4.0)
    report("C7 product suite", ok,
           f"drift {drift.value:.4f} <= 0.02, rects {['%.3f' % v for v in rects]}, "
           f"fubini [{fub_lo.value:.3f}, {fub_hi.value:.3f}]")
    assert 0 <= drift.value <= 0.02
    assert increasing
    assert fub_lo.value >= 0.25 and fub_hi.value <= 4.0


def test_c08_strong_directional(strong_rows):
    factor = rows_by_metric(strong_rows, "squares_bmo_factor")[0]
    me1 = rows_by_metric(strong_rows, "me1_min_minus_bound")
    below = rows_by_metric(strong_rows, "me1_below_support")
    me1_osc = [r.value for r in rows_by_metric(strong_rows, "me1_osc_box")]
    ms_osc = [r.value for r in rows_by_metric(strong_rows, "ms_osc_box")]
    ok = (factor.value <= 1.5
          and all(r.value >= -1e-3 for r in me1)
          and all(r.value == 0.0 for r in below)
          and all(a < b for a, b in zip(me1_osc, me1_osc[1:]))
          and all(a < b for a, b in zip(ms_osc, ms_osc[1:])))
    report("C8 strong/directional", ok,
           f"norm factor {factor.value:.3f} <= 1.5, "
           f"me1 margin {min(r.value for r in me1):.4f}, "
           f"osc growth me1 {['%.3f' % v for v in me1_osc]} "
           f"ms {['%.3f' % v for v in ms_osc]}")
    assert factor.value <= 1.5
    assert all(r.value >= -1e-3 for r in me1)
    assert all(r.value == 0.0 for r in below)
    assert all(a < b for a, b in zip(me1_osc, me1_osc[1:]))
    assert all(a < b for a, b in zip(ms_osc, ms_osc[1:]))


def test_c09_dyadic_remark():
    rng = np.random.default_rng(CFG.seed + 3)
    worst = 0.0
    for _ in range(100):
        f = harness._random_step(rng, int(rng.integers(2, 25)), -4, 4)
        m = int(rng.integers(-3, 2))
        scale = math.ldexp(1.0, m)
        k = int(rng.integers(-4, 4))
        q0 = (k * scale, (k + 1) * scale)
        if q0[0] < -8.0 or q0[1] > 8.0:
            continue
        _, osc = dyadic_nonlocal(f, q0, (-8.0, 8.0))
        worst = max(worst, abs(osc))
    ok = worst == 0.0
    report("C9 dyadic remark", ok, f"max oscillation {worst}")
    assert worst == 0.0


def test_c10_exponential_integrability(expint_rows):
    stab = rows_by_metric(expint_rows, "integral_stability")[0]
    rate = rows_by_metric(expint_rows, "tail_decay_rate")[0]
    ok = stab.value <= 0.05 and rate.value > 0.0
    report("C10 exponential integrability", ok,
           f"K-stability {stab.value:.4f} <= 0.05, decay rate {rate.value:.3f} > 0")
    assert stab.value <= 0.05
    assert rate.value > 0.0
