"""Window-restricted uncentered Hardy-Littlewood maximal operator, exact on
step functions.

With F the piecewise-linear antiderivative of |f| on the window, the maximal
value at x is the largest chord slope (F(b) - F(a))/(b - a) over a <= x <= b.
A two-sided average is a convex combination of the two one-sided averages, so
the supremum equals the larger of the two one-sided suprema, each of which is
attained with the far endpoint at a vertex of F. That gives an O(n) exact
evaluation per query; the O(n^2) candidate-pair maximum is kept as an oracle.
"""

from __future__ import annotations

import math

import numpy as np

from .oscillation import WindowedCells
from .stepfn import RejectionError, StepFunction1D, as_interval

_E = math.e


class MaximalEvaluator:
    """Shared chord envelope for many queries against one (f, window) pair."""

    __slots__ = ("lo", "hi", "xs", "Fs", "vals")

    def __init__(self, f: StepFunction1D, window):
        self.lo, self.hi = as_interval(window)
        cells = WindowedCells(f, self.lo, self.hi)
        vals = np.abs(cells.vals)
        lens = np.diff(cells.edges)
        self.xs = cells.edges
        self.vals = vals
        self.Fs = np.concatenate([[0.0], np.cumsum(vals * lens)])

    def envelope(self) -> tuple[np.ndarray, np.ndarray]:
        """Vertices (x, F(x)) of the antiderivative of |f| on the window."""
        return self.xs, self.Fs

    def antiderivative_at(self, x):
        idx = np.searchsorted(self.xs, x, side="right") - 1
        idx = np.clip(idx, 0, self.vals.size - 1)
        return self.Fs[idx] + self.vals[idx] * (np.asarray(x) - self.xs[idx])

    def point(self, x: float) -> float:
        if not self.lo <= x <= self.hi:
            raise RejectionError(f"query x={x} outside window [{self.lo}, {self.hi}]")
        fx = float(self.antiderivative_at(x))
        best = -math.inf
        right = self.xs > x
        if right.any():
            slopes = (self.Fs[right] - fx) / (self.xs[right] - x)
            best = max(best, float(slopes.max()))
        left = self.xs < x
        if left.any():
            slopes = (fx - self.Fs[left]) / (x - self.xs[left])
            best = max(best, float(slopes.max()))
        return best

    def profile(self, queries) -> list[tuple[float, float]]:
        qs = np.asarray(queries, dtype=float)
        if qs.size and np.any(np.diff(qs) < 0):
            raise RejectionError("queries must be sorted ascending")
        return [(float(x), self.point(float(x))) for x in qs]

    def bruteforce(self, x: float) -> float:
        """O(n^2) candidate-pair oracle over (vertices union {x})^2."""
        if not self.lo <= x <= self.hi:
            raise RejectionError(f"query x={x} outside window [{self.lo}, {self.hi}]")
        cand = np.unique(np.concatenate([self.xs, [x]]))
        fc = self.antiderivative_at(cand)
        a_side = cand[cand <= x]
        fa = fc[cand <= x]
        b_side = cand[cand >= x]
        fb = fc[cand >= x]
        lengths = b_side[None, :] - a_side[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = (fb[None, :] - fa[:, None]) / lengths
        avg[lengths <= 0] = -math.inf
        return float(avg.max())

    def constrained(self, x: float, length_min: float | None = None,
                    length_max: float | None = None) -> float:
        """Sup of averages over intervals containing x with length constraints.

        Candidates are vertex pairs plus, for each active length bound L, the
        one-parameter boundary family [a, a+L]; the average along that family
        is piecewise linear in a, so its kinks (vertices and vertices - L)
        together with the range ends are exhaustive.
        """
        if not self.lo <= x <= self.hi:
            raise RejectionError(f"query x={x} outside window [{self.lo}, {self.hi}]")
        cand = np.unique(np.concatenate([self.xs, [x]]))
        fc = self.antiderivative_at(cand)
        mask_a = cand <= x
        mask_b = cand >= x
        a_side, fa = cand[mask_a], fc[mask_a]
        b_side, fb = cand[mask_b], fc[mask_b]
        lengths = b_side[None, :] - a_side[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = (fb[None, :] - fa[:, None]) / lengths
        ok = lengths > 0
        if length_min is not None:
            ok &= lengths >= length_min * (1 - 1e-12)
        if length_max is not None:
            ok &= lengths <= length_max * (1 + 1e-12)
        best = float(avg[ok].max()) if ok.any() else -math.inf
        for bound in (length_min, length_max):
            if bound is not None and bound > 0:
                best = max(best, self._fixed_length_max(x, bound))
        return best if best > -math.inf else 0.0

    def _fixed_length_max(self, x: float, length: float) -> float:
        alo = max(self.lo, x - length)
        ahi = min(x, self.hi - length)
        if alo > ahi:
            return -math.inf
        kinks = np.concatenate([self.xs, self.xs - length, [alo, ahi]])
        kinks = np.unique(kinks[(kinks >= alo) & (kinks <= ahi)])
        if kinks.size == 0:
            return -math.inf
        vals = (self.antiderivative_at(kinks + length) - self.antiderivative_at(kinks)) / length
        return float(np.max(vals))


def mhl_point(f: StepFunction1D, x: float, window) -> float:
    """Maximal value at x: sup of averages of |f| over window intervals containing x."""
    return MaximalEvaluator(f, window).point(x)


def mhl_profile(f: StepFunction1D, queries, window) -> list[tuple[float, float]]:
    """Element-wise maximal values over a sorted query list (shared envelope)."""
    return MaximalEvaluator(f, window).profile(queries)


def mhl_point_bruteforce(f: StepFunction1D, x: float, window) -> float:
    return MaximalEvaluator(f, window).bruteforce(x)


def mhl_scale_split(f: StepFunction1D, x: float, q0, cfactor: float,
                    window) -> tuple[float, float]:
    """Split the maximal supremum at interval length cfactor * |Q0|.

    Returns (local, nonlocal): suprema over intervals containing x of length
    at most / at least the cut. Their max equals the unrestricted value.
    Requires cfactor > e.
    """
    q_lo, q_hi = as_interval(q0)
    lo, hi = as_interval(window)
    if not (q_lo >= lo and q_hi <= hi):
        raise RejectionError(f"Q0 [{q_lo}, {q_hi}] escapes window [{lo}, {hi}]")
    if not q_lo <= x <= q_hi:
        raise RejectionError(f"x={x} outside Q0 [{q_lo}, {q_hi}]")
    if not cfactor > _E:
        raise RejectionError(f"cfactor must exceed e, got {cfactor}")
    cut = cfactor * (q_hi - q_lo)
    ev = MaximalEvaluator(f, window)
    return ev.constrained(x, None, cut), ev.constrained(x, cut, None)


def _dyadic_index(q0) -> tuple[int, int]:
    lo, hi = as_interval(q0)
    length = hi - lo
    m = round(math.log2(length))
    scale = math.ldexp(1.0, m)
    if abs(length - scale) > 1e-9 * scale:
        raise RejectionError(f"interval length {length} is not a power of 2")
    k = round(lo / scale)
    if abs(lo - k * scale) > 1e-9 * scale:
        raise RejectionError(f"left endpoint {lo} is not a multiple of {scale}")
    return k, m


def dyadic_nonlocal(f: StepFunction1D, q0, window) -> tuple[float, float]:
    """Sup of plain averages of f over dyadic ancestors of Q0 inside the window.

    The supremum is the same for every x in Q0 (dyadic intervals either nest
    or are disjoint), so the oscillation of the nonlocal dyadic part on Q0 is
    identically 0; it is returned explicitly as the second component.
    """
    lo, hi = as_interval(window)
    k, m = _dyadic_index(q0)
    tol = 1e-9 * (hi - lo)
    cells = WindowedCells(f, lo, hi)
    best = -math.inf
    while True:
        scale = math.ldexp(1.0, m)
        a, b = k * scale, (k + 1) * scale
        if a < lo - tol or b > hi + tol:
            break
        best = max(best, float(cells.avg(max(a, lo), min(b, hi))))
        k, m = k >> 1, m + 1  # arithmetic shift = floor(k/2), valid for k < 0 too
    if best == -math.inf:
        raise RejectionError("Q0 does not fit inside the window")
    return best, 0.0
