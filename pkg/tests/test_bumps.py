"""Bump sums: implicit dyadic centers, closed-form integrals against
quadrature, clamping, slices and the structured maximal families."""

import math

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from oscmax.bumps import (
    BumpSum2D,
    DyadicRowCenters,
    ExplicitCenters,
    X_SPACING,
    bump_directional_profile,
    bump_m_e1_point,
    bump_m_s_point,
    loads_bumpsum,
    rect_interval_values,
    slice_interval_values,
)
from oscmax.plane import Rect, directional_maximal_e1
from oscmax.stepfn import RejectionError, integrate


def bump_value(x, y, p=0.5, q=0.5):
    dx, dy = abs(x), abs(y)
    if dx >= 1 or dy >= 1:
        return 0.0
    return (-math.log(dx)) ** p * (-math.log(dy)) ** q


class TestStructure:
    def test_dyadic_counts(self):
        dc = DyadicRowCenters(2)
        assert dc.count == 7
        xy = dc.centers_in_x_range(-math.inf, math.inf)
        assert xy.shape == (7, 2)
        assert sorted(set(xy[:, 1])) == [0.0, 0.5, 1.0]
        assert np.allclose(sorted(xy[:, 0]), X_SPACING * np.arange(1, 8))

    def test_huge_level_count_without_materializing(self):
        dc = DyadicRowCenters(64)
        assert dc.count == 2 ** 65 - 1
        with pytest.raises(RejectionError):
            dc.centers_in_x_range(-math.inf, math.inf)

    def test_hypothesis_validation(self):
        with pytest.raises(RejectionError):
            BumpSum2D(0.7, 0.7, DyadicRowCenters(2))  # p + q > 1
        with pytest.raises(RejectionError):
            BumpSum2D(0.5, 0.5, DyadicRowCenters(2), clamp=-1.0)

    def test_spacing_certification(self):
        ok = ExplicitCenters(np.array([[0.0, 0.0], [X_SPACING, 1.0]]))
        assert BumpSum2D(0.5, 0.5, ok).spacing_certified
        bad = ExplicitCenters(np.array([[0.0, 0.0], [1.0, 1.0]]))
        assert not BumpSum2D(0.5, 0.5, bad).spacing_certified


class TestEvaluation:
    def test_single_term(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
        assert b.eval_points(X_SPACING + 0.3, 0.4) == pytest.approx(
            bump_value(0.3, 0.4))

    def test_zero_outside_rows(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
        assert b.eval_points(X_SPACING, -1.5) == 0.0
        assert b.eval_points(0.0, 0.5) == 0.0  # left of the first bump

    def test_certified_vs_naive(self):
        rng = np.random.default_rng(3)
        xs = np.cumsum(rng.uniform(X_SPACING, X_SPACING + 1, 5))
        ys = rng.uniform(0, 2, 5)
        b = BumpSum2D(0.5, 0.5, ExplicitCenters(np.column_stack([xs, ys])))
        px = rng.uniform(xs[0] - 2, xs[-1] + 2, 40)
        py = rng.uniform(-1.5, 3.5, 40)
        assert np.allclose(b.eval_points(px, py), b.eval_naive(px, py))

    def test_clamp_applies(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2), clamp=1.2)
        assert b.eval_points(X_SPACING, 0.0) == 1.2  # singular point hits clamp


class TestIntegrals:
    def test_slice_integral_vs_quadrature(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
        y = 0.21
        got = b._slice_interval_integral(y, X_SPACING - 1, X_SPACING + 1)
        w = (-math.log(y)) ** 0.5
        ref = quad(lambda t: w * (-math.log(abs(t))) ** 0.5
                   if 0 < abs(t) < 1 else 0.0,
                   -1, 1, points=[0], limit=400, epsabs=1e-12)[0]
        assert got == pytest.approx(ref, abs=1e-8)

    def test_rect_integral_vs_dblquad(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
        r = Rect((X_SPACING - 1, X_SPACING + 0.5), (-0.7, 0.6))
        ref = dblquad(lambda yy, xx: bump_value(xx - X_SPACING, yy),
                      r.x[0], r.x[1], r.y[0], r.y[1])[0]
        assert b.rect_integral(r) == pytest.approx(ref, abs=1e-7)

    def test_clamped_rect_integral_vs_dblquad(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2), clamp=1.2)
        r = Rect((X_SPACING - 1, X_SPACING + 0.5), (-0.7, 0.6))
        ref = dblquad(lambda yy, xx: min(1.2, bump_value(xx - X_SPACING, yy)
                                         if (xx, yy) != (X_SPACING, 0) else 1.2),
                      r.x[0], r.x[1], r.y[0], r.y[1], epsabs=1e-11)[0]
        assert b.rect_integral(r) == pytest.approx(ref, abs=1e-7)

    def test_vectorized_paths_match_loops(self):
        for clamp in (None, 17.0):
            b = BumpSum2D(0.5, 0.5, DyadicRowCenters(4), clamp=clamp)
            y = 0.3
            ivs = [(0.2, X_SPACING * 2.3), (-1.0, 50.0),
                   (X_SPACING - 0.5, X_SPACING + 0.2), (3.0, 200.0)]
            fast = slice_interval_values(b, y, ivs)
            slow = [b._slice_interval_integral(y, a, c) / (c - a)
                    for a, c in ivs]
            assert np.allclose(fast, slow, atol=1e-12)
            fast_r = rect_interval_values(b, ivs, (0.1, 0.9))
            slow_r = [b.rect_avg(Rect(iv, (0.1, 0.9))) for iv in ivs]
            # the fast clamped path is conservative by at most the full excess
            assert np.all(fast_r <= np.array(slow_r) + 1e-12)
            assert np.allclose(fast_r, slow_r, atol=1e-6)

    def test_raster_cell_averages_are_exact(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
        w = Rect((3.0, 6.0), (-1.2, 1.2))
        g = b.rasterize(w, 48, 40)
        assert g.rect_integral(w) == pytest.approx(b.rect_integral(w), rel=1e-12)
        # any cell-aligned subrectangle integrates identically
        aligned = Rect((3.0 + 3 / 48 * 8, 3.0 + 3 / 48 * 20),
                       (-1.2 + 2.4 / 40 * 5, -1.2 + 2.4 / 40 * 25))
        assert g.rect_integral(aligned) == pytest.approx(
            b.rect_integral(aligned), rel=1e-10)


class TestSlices:
    def test_slice_matches_pointwise(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
        y = 0.37
        sl = b.slice_y(y, (3.0, 10.0), 1e-3)
        xs = np.linspace(3.05, 9.95, 171)
        assert np.max(np.abs(sl(xs) - b.eval_points(xs, y))) <= 2e-3

    def test_slice_integrates_exactly(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
        y = 0.37
        sl = b.slice_y(y, (3.0, 10.0), 1e-3)
        assert integrate(sl, 3.0, 10.0) == pytest.approx(
            b._slice_interval_integral(y, 3.0, 10.0), rel=1e-10)

    def test_singular_row_rejected(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
        with pytest.raises(RejectionError, match="singular"):
            b.slice_y(0.5, (3.0, 10.0), 1e-3)


class TestMaximalFamilies:
    def test_witness_bound(self):
        for n_lev in (4, 16):
            b = BumpSum2D(0.5, 0.5, DyadicRowCenters(n_lev))
            bound = (1 / (6 * math.sqrt(2))) * math.sqrt(math.pi) * \
                math.log(n_lev) ** 0.5
            for x in (0.1, 0.9):
                for y in (0.13, 0.77):
                    assert bump_m_e1_point(b, x, y) >= bound

    def test_symbolic_vs_slice_oracle(self):
        # the structured family is a lower bound for, and close to, the exact
        # windowed operator applied to the materialized slice
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(4))
        from oscmax.maximal import MaximalEvaluator
        y = 0.42
        hi = X_SPACING * 2 ** 5
        sl = b.slice_y(y, (-1.0, hi), 1e-3)
        for x in (0.3, 0.8):
            sym = bump_m_e1_point(b, x, y)
            exact = MaximalEvaluator(sl, (-1.0, hi)).point(x)
            assert sym <= exact + 1e-9
            assert sym >= 0.8 * exact

    def test_ms_dominates_me1_family(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(4), clamp=10.0)
        for x, y in [(0.3, 0.4), (0.9, 0.1), (-2.0, -1.2)]:
            assert bump_m_s_point(b, x, y) >= 0.5 * bump_m_e1_point(b, x, y)

    def test_profile_matrix(self):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
        out = bump_directional_profile(b, [-1.5, 0.4], [0.1, 0.6], (-1, 40))
        assert out.shape == (2, 2)
        assert np.all(out[0] == 0.0) and np.all(out[1] > 0.0)
        # dispatch through the generic surface
        out2 = directional_maximal_e1(b, [-1.5, 0.4], [0.1, 0.6], (-1, 40))
        assert np.array_equal(out, out2)


def test_generic_slice_surface():
    from oscmax.plane import GridFunction2D, slice_y
    g = GridFunction2D([-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0],
                       np.array([[0.0, 0.0], [1.0, 2.0]]))
    assert slice_y(g, 0.5)(0.5) == 2.0
    b = BumpSum2D(0.5, 0.5, DyadicRowCenters(2))
    sl = slice_y(b, 0.37, (3.0, 6.0), 1e-3)
    assert sl(X_SPACING + 0.2) > 0.0
    with pytest.raises(RejectionError, match="x_window"):
        slice_y(b, 0.37)


def test_translate_sum_norm_tracks_single_bump():
    # the row-sum's square-family norm stays within one constant of a single
    # bump's, uniformly over the construction size
    from oscmax.plane import bmo_norm_2d
    single = BumpSum2D(0.5, 0.5, ExplicitCenters(np.array([[X_SPACING, 0.0]])))
    w = Rect((X_SPACING - 1.5, X_SPACING + 1.5), (-1.5, 1.5))
    base = bmo_norm_2d(single.rasterize(w, 96, 96), w, "squares", 4).value
    w_sum = Rect((X_SPACING - 1.5, 3 * X_SPACING + 1.5), (-1.5, 2.5))
    fits = []
    for n_lev in (4, 16):
        b = BumpSum2D(0.5, 0.5, DyadicRowCenters(n_lev))
        norm = bmo_norm_2d(b.rasterize(w_sum, 128, 96), w_sum, "squares", 4).value
        fits.append(norm / base)
    assert max(fits) <= 1.5


def test_serialization_explicit_and_guard():
    b = BumpSum2D(0.5, 0.25, ExplicitCenters(np.array([[X_SPACING, 0.3]])),
                  clamp=2.0)
    c = loads_bumpsum(b.dumps())
    assert c.p == b.p and c.q == b.q and c.clamp == 2.0
    assert np.allclose(c.centers.xy, b.centers.xy)
    big = BumpSum2D(0.5, 0.5, DyadicRowCenters(64))
    with pytest.raises(RejectionError):
        big.dumps()
