"""Step-function carrier: cell algebra, integration, periodic extension."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscmax.stepfn import (
    RejectionError,
    StepFunction1D,
    constant,
    dumps_stepfn,
    indicator,
    integrate,
    jump,
    loads_stepfn,
    periodic_even_extend,
    step_algebra,
)


def random_step(rng, n=6, lo=-3.0, hi=3.0):
    bp = np.sort(rng.uniform(lo, hi, n + 1))
    while np.min(np.diff(bp)) <= 1e-9:
        bp = np.sort(rng.uniform(lo, hi, n + 1))
    return StepFunction1D(bp, rng.normal(0, 1, n))


steps = st.integers(0, 10_000).map(
    lambda s: random_step(np.random.default_rng(s)))


class TestConstruction:
    def test_validation(self):
        with pytest.raises(RejectionError):
            StepFunction1D([0.0, 0.0, 1.0], [1.0, 2.0])
        with pytest.raises(RejectionError):
            StepFunction1D([0.0, 1.0], [math.nan])
        with pytest.raises(RejectionError):
            StepFunction1D([0.0], [])

    def test_call_semantics(self):
        f = StepFunction1D([0.0, 1.0, 2.0], [3.0, 5.0])
        assert f(0.5) == 3.0
        assert f(1.5) == 5.0
        assert f(-0.1) == 0.0 and f(2.1) == 0.0
        # breakpoint evaluation picks the right-hand cell
        assert f(1.0) == 5.0

    def test_merge_and_equality(self):
        f = StepFunction1D([0.0, 1.0, 2.0, 3.0], [2.0, 2.0, 1.0])
        g = StepFunction1D([0.0, 2.0, 3.0], [2.0, 1.0])
        assert f.merged().num_cells == 2
        assert f == g
        assert not (f == g.scale(1 + 1e-6))
        assert f.approx_equal(g.scale(1 + 1e-12))


class TestAlgebra:
    def test_add_refinement(self):
        h = indicator((0, 1)) + indicator((0.5, 2))
        assert np.allclose(h.breakpoints, [0, 0.5, 1, 2])
        assert np.allclose(h.values, [1, 2, 1])

    def test_clamp_of_constant(self):
        f = indicator((0, 1), height=5.0).clamp(2.0)
        assert f == indicator((0, 1), height=2.0)
        with pytest.raises(RejectionError):
            f.clamp(0.0)

    def test_mask_zero(self):
        f = constant(1.0, (-2, 2)).mask_zero((-1, 0))
        assert np.allclose(f.breakpoints, [-2, -1, 0, 2])
        assert np.allclose(f.values, [1, 0, 1])

    def test_dispatcher(self):
        f = indicator((0, 1))
        assert step_algebra("add", f, f) == f.scale(2.0)
        assert step_algebra("scale", f, alpha=3.0) == f.scale(3.0)
        assert step_algebra("abs", f.scale(-1.0)) == f
        with pytest.raises(RejectionError):
            step_algebra("frobnicate", f)

    @settings(max_examples=40, deadline=None)
    @given(steps, steps)
    def test_add_commutes(self, f, g):
        assert (f + g).approx_equal(g + f)

    @settings(max_examples=25, deadline=None)
    @given(steps, steps, steps)
    def test_add_associates(self, f, g, h):
        assert ((f + g) + h).approx_equal(f + (g + h))

    @settings(max_examples=40, deadline=None)
    @given(steps)
    def test_merge_preserves_integrals(self, f):
        lo, hi = f.span
        m = f.merged()
        for a, b in [(lo, hi), (lo - 1, hi + 1), (lo + 0.3, lo + 0.9)]:
            assert integrate(f, a, b) == pytest.approx(integrate(m, a, b),
                                                       abs=1e-12)


class TestIntegrate:
    def test_examples(self):
        assert integrate(indicator((0, 1)), -1, 1) == 1.0
        assert integrate(indicator((0, 1)), 5, 6) == 0.0
        with pytest.raises(RejectionError):
            integrate(indicator((0, 1)), 1, 1)

    @settings(max_examples=40, deadline=None)
    @given(steps)
    def test_abs_integral_dominates(self, f):
        lo, hi = f.span
        assert integrate(abs(f), lo, hi) >= abs(integrate(f, lo, hi)) - 1e-12


class TestPeriodicExtension:
    def test_reflection_and_period(self):
        ext = periodic_even_extend(indicator((0, 1)), 2.0)
        m = ext.materialize((-4, 6))
        for x in (0.5, -0.5, 2.5, 1.5, -3.5, 4.5):
            assert m(x) == 1.0
        assert m(1.0 + 1e-9) == 1.0  # reflected copy on [1, 2]

    def test_identity_profile_reflects(self):
        base = StepFunction1D(np.linspace(0, 1, 21), np.linspace(0.025, 0.975, 20))
        ext = periodic_even_extend(base, 2.0)
        m = ext.materialize((-2, 4))
        assert m(-0.5) == pytest.approx(0.5, abs=0.05)
        assert m(2.5) == pytest.approx(0.5, abs=0.05)

    def test_support_violation_rejected(self):
        with pytest.raises(RejectionError, match="escapes"):
            periodic_even_extend(indicator((0, 1.5)), 2.0)

    def test_window_consistency(self):
        rng = np.random.default_rng(7)
        base = random_step(rng, 5, 0.0, 1.0)
        ext = periodic_even_extend(base, 2.0)
        small = ext.materialize((-1.0, 1.0))
        big = ext.materialize((-3.0, 5.0))
        xs = np.linspace(-0.99, 0.99, 113)
        assert np.allclose(small(xs), big(xs))


class TestSerialization:
    def test_roundtrip(self):
        f = StepFunction1D([0.0, 1 / 3, 2.0], [math.pi, -1e-17])
        g = loads_stepfn(dumps_stepfn(f))
        assert np.array_equal(g.breakpoints, f.breakpoints)
        assert np.array_equal(g.values, f.values)

    def test_header(self):
        text = dumps_stepfn(jump((-1, 1)))
        assert text.splitlines()[0] == "stepfn v1 n=2"
        with pytest.raises(RejectionError):
            loads_stepfn("nonsense v9\n1\n2 3\n")
