"""Builders for the explicit counterexample functions."""

import math

import numpy as np
import pytest

from oscmax.bumps import X_SPACING
from oscmax.constructions import (
    build_dyadic_bump_rows,
    build_instance,
    build_perturbation,
    build_rational_bump_rows,
    mass_threshold,
    ramp_average_exact,
    stern_brocot_rationals,
)
from oscmax.oscillation import average, mean_osc
from oscmax.stepfn import RejectionError, indicator


class TestThreshold:
    def test_closed_form(self):
        assert mass_threshold(-3.0) == pytest.approx((4 / 3) * math.log(7 / 4))

    def test_limit_is_log2(self):
        assert mass_threshold(-1e9) == pytest.approx(math.log(2), abs=1e-6)

    def test_accept_reject(self):
        inst = build_instance(None, -3.0, 100, 1e-2)
        assert inst.mass == 1.0
        with pytest.raises(RejectionError, match="threshold"):
            build_instance(indicator((0, 1), height=0.70), -1.01, 100, 1e-2)
        with pytest.raises(RejectionError, match="log 2"):
            build_instance(indicator((0, 1), height=0.5), -3.0, 100, 1e-2)
        with pytest.raises(RejectionError):
            build_instance(None, -0.5, 100, 1e-2)


@pytest.fixture(scope="module")
def g100():
    return build_perturbation(100, -3.0, 1e-3, (-12.0, 200.0))


class TestPerturbation:
    def test_vanishes_on_masked_region(self, g100):
        xs = np.linspace(-2.999, 0.999, 113)
        assert np.all(g100(xs) == 0.0)

    def test_nonnegative_and_below_one(self, g100):
        assert np.all(g100.values >= 0.0)
        assert g100.values.max() < 1.0
        assert g100.values.max() == pytest.approx(
            math.log(100) / (1 + math.log(100)), abs=1e-3)

    def test_average_closed_form(self, g100):
        assert average(g100, (0.0, 100.0)) == pytest.approx(
            ramp_average_exact(100), abs=1e-12)

    def test_average_tends_to_one(self):
        avgs = [ramp_average_exact(n) for n in (100, 1000, 10000)]
        assert avgs[0] < avgs[1] < avgs[2] < 1.0

    def test_periodicity_inside_window(self, g100):
        # beyond the masked region the profile repeats with period 2n
        assert g100(150.0) == pytest.approx(g100(50.0), abs=2e-3)


class TestInstance:
    def test_difference_identity(self):
        inst = build_instance(None, -3.0, 100, 1e-2)
        diff = inst.perturbed + inst.base.scale(-1.0)
        assert diff.approx_equal(inst.perturbation.scale(inst.coefficient))
        assert inst.coefficient == pytest.approx(0.25)

    def test_window_contract(self):
        inst = build_instance(None, -3.0, 50, 1e-2)
        assert inst.window == (-12.0, 100.0)
        with pytest.raises(RejectionError, match="window"):
            build_instance(None, -3.0, 50, 1e-2, window=(-2.0, 100.0))


class TestRationals:
    def test_stern_brocot_prefix(self):
        got = stern_brocot_rationals(7)
        assert got == [1.0, 0.5, 1.5, 1 / 3, 2 / 3, 4 / 3, 5 / 3]

    def test_all_distinct_in_range(self):
        got = stern_brocot_rationals(200)
        assert len(set(got)) == 200
        assert all(0 < r < 2 for r in got)


class TestBumpBuilders:
    def test_dyadic_hypotheses(self):
        b = build_dyadic_bump_rows(2, 0.5, 0.5)
        assert b.count == 7
        with pytest.raises(RejectionError):
            build_dyadic_bump_rows(2, 0.6, 0.6)
        with pytest.raises(RejectionError):
            build_dyadic_bump_rows(1, 0.5, 0.5)

    def test_rational_rows_slice_formula(self):
        b = build_rational_bump_rows(5, 0.5, 0.5)
        assert b.count == 5 and b.spacing_certified
        rs = stern_brocot_rationals(5)
        m = 2  # second translate
        y = rs[m - 1] + 0.17
        iv = (X_SPACING * m - 1, X_SPACING * m + 1)
        sl = b.slice_y(y, iv, 1e-3)
        got = mean_osc(sl, iv)
        # single translated bump: oscillation = profile oscillation x weight
        from oscmax.sampling import log_minus_power_sampler, sample_to_step
        prof = sample_to_step(log_minus_power_sampler(0.5), (-1, 1), 1e-3)
        want = mean_osc(prof, (-1, 1)) * (-math.log(0.17)) ** 0.5
        assert got == pytest.approx(want, rel=1e-3)

    def test_single_center(self):
        b = build_rational_bump_rows(1, 0.5, 0.5)
        assert b.count == 1

    def test_slice_sup_grows_with_count(self):
        # density trend: more translates means larger worst-row oscillation
        y = 0.415
        sups = []
        for count in (4, 16, 64):
            b = build_rational_bump_rows(count, 0.5, 0.5)
            rs = stern_brocot_rationals(count)
            vals = []
            for m, r in enumerate(rs, start=1):
                d = abs(y - r)
                if 0 < d < 1:
                    vals.append((-math.log(d)) ** 0.5)
            sups.append(max(vals))
            assert b.count == count
        assert sups[0] < sups[1] < sups[2]
