"""Mean oscillation on intervals and supremum searches over interval families.

The searches return certified lower bounds on the true supremum: candidates
are exhaustive over a finite endpoint set (breakpoints of the function plus a
nested uniform refinement grid) and the L1 maximizer is never discarded. Big
sweeps screen the O(n^2) candidate pairs with O(1) two-sided bounds on the L1
oscillation (value-threshold prefix sums; L2 plays the same role in L2 mode)
and compute the exact cell-scan value only for pairs whose upper bound
reaches the best lower bound seen, so every discarded pair provably cannot
beat the reported maximum.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .stepfn import RejectionError, StepFunction1D, as_interval

OSC_CSV_COLUMNS = (
    "family", "window_lo", "window_hi", "refine", "mode", "delta",
    "value", "argmax_lo", "argmax_hi",
)


@dataclass(frozen=True)
class OscillationReport:
    """Result row of a supremum search; ``value`` is the oscillation of ``argmax``."""

    family: str
    window: tuple
    refinement_level: int
    value: float
    argmax: tuple
    mode: str
    delta: float | None = None
    # second axis, present only for 2D searches
    window_y: tuple | None = None
    argmax_y: tuple | None = None

    def csv_row(self) -> list[str]:
        row = [
            self.family,
            f"{self.window[0]:.17g}", f"{self.window[1]:.17g}",
            str(self.refinement_level), self.mode,
            "" if self.delta is None else f"{self.delta:.17g}",
            f"{self.value:.17g}",
            f"{self.argmax[0]:.17g}", f"{self.argmax[1]:.17g}",
        ]
        if self.window_y is not None:
            row += [f"{v:.17g}" for v in (*self.window_y, *self.argmax_y)]
        return row


def write_reports(reports, path) -> None:
    two_d = any(r.window_y is not None for r in reports)
    cols = list(OSC_CSV_COLUMNS)
    if two_d:
        cols += ["window_y_lo", "window_y_hi", "argmax_y_lo", "argmax_y_hi"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in reports:
            w.writerow(r.csv_row())


class WindowedCells:
    """Cell view of a step function on a window, with zero padding outside
    the span and prefix sums of f and f^2 for O(1) interval statistics."""

    __slots__ = ("lo", "hi", "edges", "vals", "vals2", "pref1", "pref2")

    def __init__(self, f: StepFunction1D, lo: float, hi: float):
        bp = f.breakpoints
        inner = bp[(bp > lo) & (bp < hi)]
        edges = np.concatenate([[lo], inner, [hi]])
        mids = 0.5 * (edges[:-1] + edges[1:])
        vals = np.asarray(f(mids), dtype=float)
        lens = np.diff(edges)
        self.lo, self.hi = lo, hi
        self.edges, self.vals = edges, vals
        self.vals2 = vals * vals
        self.pref1 = np.concatenate([[0.0], np.cumsum(vals * lens)])
        self.pref2 = np.concatenate([[0.0], np.cumsum(self.vals2 * lens)])

    def _interp(self, x, pref, density):
        idx = np.searchsorted(self.edges, x, side="right") - 1
        idx = np.clip(idx, 0, self.vals.size - 1)
        return pref[idx] + density[idx] * (np.asarray(x) - self.edges[idx])

    def s1(self, x):
        return self._interp(x, self.pref1, self.vals)

    def s2(self, x):
        return self._interp(x, self.pref2, self.vals2)

    def integral(self, a, b):
        return self.s1(b) - self.s1(a)

    def avg(self, a, b):
        return (self.s1(b) - self.s1(a)) / (b - a)

    def l2_osc(self, a, b):
        length = b - a
        m = (self.s1(b) - self.s1(a)) / length
        msq = (self.s2(b) - self.s2(a)) / length
        return math.sqrt(max(msq - m * m, 0.0))

    def l1_osc(self, a, b) -> float:
        """Exact (1/|I|) * integral over I of |f - f_I| by cell scan."""
        length = b - a
        m = (self.s1(b) - self.s1(a)) / length
        i0 = max(np.searchsorted(self.edges, a, side="right") - 1, 0)
        i1 = min(np.searchsorted(self.edges, b, side="left"), self.edges.size - 1)
        e = self.edges[i0:i1 + 1]
        v = self.vals[i0:i1]
        w = np.minimum(e[1:], b) - np.maximum(e[:-1], a)
        return float(np.sum(np.abs(v - m) * w)) / length


def average(f: StepFunction1D, interval) -> float:
    """(1/|I|) * integral of f over I."""
    a, b = as_interval(interval)
    return WindowedCells(f, a, b).avg(a, b)


def mean_osc(f: StepFunction1D, interval, mode: str = "L1") -> float:
    """Mean oscillation of f on an interval; L1 exact, L2 = sqrt(var)."""
    a, b = as_interval(interval)
    cells = WindowedCells(f, a, b)
    if mode == "L1":
        return cells.l1_osc(a, b)
    if mode == "L2":
        return cells.l2_osc(a, b)
    raise RejectionError(f"unknown oscillation mode {mode!r}")


def candidate_endpoints(f: StepFunction1D, lo: float, hi: float,
                        refinement_level: int) -> np.ndarray:
    """Breakpoints of f inside the window plus a nested uniform grid."""
    if refinement_level < 0:
        raise RejectionError("refinement_level must be >= 0")
    bp = f.breakpoints
    grid = np.linspace(lo, hi, 2 ** refinement_level + 1)
    cand = np.unique(np.concatenate([grid, bp[(bp > lo) & (bp < hi)]]))
    if cand.size < 2:
        raise RejectionError("empty candidate set")
    return cand


class _Best:
    """Deterministic maximum tracker: first strict improvement wins, so the
    scan order (ascending left endpoint, then ascending right) realizes the
    leftmost-then-shortest tie rule."""

    __slots__ = ("value", "arg")

    def __init__(self):
        self.value = -math.inf
        self.arg = None

    def offer(self, value: float, arg) -> None:
        if value > self.value:
            self.value = value
            self.arg = arg


def _band_limits(cand: np.ndarray, max_len: float | None) -> np.ndarray:
    """For each left index i, one past the last admissible right index."""
    if max_len is None:
        return np.full(cand.size, cand.size, dtype=np.int64)
    return np.searchsorted(cand, cand + max_len, side="right")


class _BucketBracket:
    """Two-sided bounds on the L1 oscillation of candidate intervals.

    For value thresholds T[0] <= ... <= T[K-1] (quantiles of the cell
    values), row b of (G, H) holds prefix sums, evaluated at the candidate
    positions, of v * len and len restricted to cells with v >= T[b]. For an
    interval with mean m and T[b-1] <= m < T[b],

        low  = (2/|I|) * (G_b - m * H_b)                   <=  L1
        high = low + (2/|I|) * (T[b] - m) * (H_{b-1} - H_b) >=  L1

    since cells with v >= T[b] contribute exactly and cells in the bracket
    [T[b-1], T[b]) contribute between 0 and (T[b] - m) each per unit length.
    """

    def __init__(self, cells: WindowedCells, cand: np.ndarray, buckets: int):
        vals, lens = cells.vals, np.diff(cells.edges)
        qs = np.linspace(0.0, 1.0, buckets)
        self.thresholds = np.unique(np.quantile(vals, qs))
        k = self.thresholds.size
        idx = np.clip(np.searchsorted(cells.edges, cand, "right") - 1,
                      0, vals.size - 1)
        frac = cand - cells.edges[idx]
        self.G = np.zeros((k + 1, cand.size))
        self.H = np.zeros((k + 1, cand.size))
        for b, t in enumerate(self.thresholds):
            mask = vals >= t
            dv = np.where(mask, vals, 0.0)
            dh = np.where(mask, 1.0, 0.0)
            pv = np.concatenate([[0.0], np.cumsum(dv * lens)])
            ph = np.concatenate([[0.0], np.cumsum(dh * lens)])
            self.G[b] = pv[idx] + dv[idx] * frac
            self.H[b] = ph[idx] + dh[idx] * frac
        self.t_ext = np.append(self.thresholds, self.thresholds[-1])

    def bounds(self, i: int, js: np.ndarray, m: np.ndarray, length: np.ndarray):
        b = np.clip(np.searchsorted(self.thresholds, m, "right"), 1,
                    self.thresholds.size)
        g_above = self.G[b, js] - self.G[b, i]
        h_above = self.H[b, js] - self.H[b, i]
        low = 2.0 * (g_above - m * h_above) / length
        inband = (self.H[b - 1, js] - self.H[b - 1, i]) - h_above
        high = low + 2.0 * np.maximum(self.t_ext[b] - m, 0.0) * inband / length
        return low, high


_MAX_SURVIVORS = 5_000_000


def _sweep(cells: WindowedCells, cand: np.ndarray, mode: str,
           max_len: float | None, bracket: _BucketBracket | None = None):
    """Certified supremum of mean oscillation over candidate endpoint pairs.

    L1 mode runs two vectorized passes: first the global maximum of the
    bracket's lower bound, then collection of every pair whose upper bound
    reaches it. Exact L1 is computed only for the collected pairs; any pair
    left out satisfies L1 <= high < max(low) <= max exact, so the maximizer
    is never discarded.
    """
    s1c = cells.s1(cand)
    n = cand.size
    jmax = _band_limits(cand, max_len)

    def rows():
        for i in range(n):
            j1 = jmax[i]
            if j1 <= i + 1:
                continue
            js = np.arange(i + 1, j1)
            length = cand[js] - cand[i]
            m = (s1c[js] - s1c[i]) / length
            yield i, js, m, length

    best = _Best()
    if mode == "L2":
        s2c = cells.s2(cand)
        for i, js, m, length in rows():
            msq = (s2c[js] - s2c[i]) / length
            l2 = np.sqrt(np.maximum(msq - m * m, 0.0))
            k = int(np.argmax(l2))
            best.offer(float(l2[k]), (float(cand[i]), float(cand[js[k]])))
        if best.arg is None:
            raise RejectionError("no admissible candidate interval")
        return best.value, best.arg

    if bracket is None:
        buckets = max(64, min(512, int(1e7 / max(n, 1))))
        bracket = _BucketBracket(cells, cand, buckets)
    low_max = 0.0
    any_pair = False
    for i, js, m, length in rows():
        any_pair = True
        low, _ = bracket.bounds(i, js, m, length)
        low_max = max(low_max, float(low.max()))
    if not any_pair:
        raise RejectionError("no admissible candidate interval")
    survivors_i: list[np.ndarray] = []
    survivors_j: list[np.ndarray] = []
    count = 0
    for i, js, m, length in rows():
        _, high = bracket.bounds(i, js, m, length)
        take = high >= low_max * (1 - 1e-12)
        hits = js[take]
        if hits.size:
            count += hits.size
            if count > _MAX_SURVIVORS:
                raise RejectionError(
                    "oscillation landscape too flat for the exact pass; "
                    "reduce the refinement level")
            survivors_i.append(np.full(hits.size, i))
            survivors_j.append(hits)
    for ii, jj in zip(survivors_i, survivors_j):
        for i, j in zip(ii, jj):
            a, b = float(cand[i]), float(cand[j])
            best.offer(cells.l1_osc(a, b), (a, b))
    return best.value, best.arg


def bmo_norm_1d(f: StepFunction1D, window, refinement_level: int,
                mode: str = "L1") -> OscillationReport:
    """Supremum of mean oscillation over intervals with endpoints in the
    candidate set; a lower bound on the BMO norm over the window, monotone
    nondecreasing in the refinement level."""
    lo, hi = as_interval(window)
    cand = candidate_endpoints(f, lo, hi, refinement_level)
    cells = WindowedCells(f, lo, hi)
    value, arg = _sweep(cells, cand, mode, None)
    return OscillationReport("intervals", (lo, hi), refinement_level,
                             value, arg, mode)


def omega(f: StepFunction1D, delta: float, window, refinement_level: int,
          mode: str = "L1") -> OscillationReport:
    """Modulus of mean oscillation: supremum over intervals of length <= delta."""
    lo, hi = as_interval(window)
    if not delta > 0:
        raise RejectionError(f"delta must be positive, got {delta}")
    spacing = (hi - lo) / 2 ** refinement_level
    if spacing > delta / 8:
        raise RejectionError(
            f"candidate grid spacing {spacing:g} exceeds delta/8 = {delta / 8:g}; "
            "raise refinement_level"
        )
    cand = candidate_endpoints(f, lo, hi, refinement_level)
    cells = WindowedCells(f, lo, hi)
    value, arg = _sweep(cells, cand, mode, delta)
    return OscillationReport("intervals_leq_delta", (lo, hi), refinement_level,
                             value, arg, mode, delta=delta)


def omega_profile(f: StepFunction1D, deltas, window, refinement_level: int,
                  mode: str = "L1") -> list[OscillationReport]:
    """omega at several deltas in one banded traversal over a shared candidate
    grid, so the values are exactly monotone in delta.

    Per candidate row the admissible right endpoints are already sorted by
    interval length; prefix maxima give every delta's row maximum at the cost
    of the widest band alone.
    """
    lo, hi = as_interval(window)
    deltas = sorted(float(d) for d in deltas)
    if deltas[0] <= 0:
        raise RejectionError("deltas must be positive")
    spacing = (hi - lo) / 2 ** refinement_level
    if spacing > deltas[0] / 8:
        raise RejectionError(
            f"grid spacing {spacing:g} exceeds min(delta)/8; raise refinement_level"
        )
    cand = candidate_endpoints(f, lo, hi, refinement_level)
    cells = WindowedCells(f, lo, hi)
    n = cand.size
    nd = len(deltas)
    dmax = deltas[-1]

    def rows():
        s1c = cells.s1(cand)
        for i in range(n):
            j1 = int(np.searchsorted(cand, cand[i] + dmax, "right"))
            if j1 <= i + 1:
                continue
            js = np.arange(i + 1, j1)
            length = cand[js] - cand[i]
            m = (s1c[js] - s1c[i]) / length
            # one past the last partner for each delta
            ks = np.searchsorted(cand[js], cand[i] + np.asarray(deltas), "right")
            yield i, js, m, length, ks

    if mode == "L2":
        best = [_Best() for _ in deltas]
        s2c = cells.s2(cand)
        for i, js, m, length, ks in rows():
            msq = (s2c[js] - s2c[i]) / length
            l2 = np.sqrt(np.maximum(msq - m * m, 0.0))
            run = np.maximum.accumulate(l2)
            for d in range(nd):
                if ks[d] > 0:
                    k = int(np.argmax(l2[:ks[d]]))
                    best[d].offer(float(run[ks[d] - 1]),
                                  (float(cand[i]), float(cand[js[k]])))
        values = [(b.value, b.arg) for b in best]
    else:
        buckets = max(64, min(512, int(1e7 / max(n, 1))))
        bracket = _BucketBracket(cells, cand, buckets)
        low_max = np.zeros(nd)
        for i, js, m, length, ks in rows():
            low, _ = bracket.bounds(i, js, m, length)
            run = np.maximum.accumulate(low)
            for d in range(nd):
                if ks[d] > 0:
                    low_max[d] = max(low_max[d], float(run[ks[d] - 1]))
        survivors: list[tuple[int, int, int]] = []  # (d, i, j)
        for i, js, m, length, ks in rows():
            _, high = bracket.bounds(i, js, m, length)
            for d in range(nd):
                if ks[d] > 0:
                    take = high[:ks[d]] >= low_max[d] * (1 - 1e-12)
                    for j in js[:ks[d]][take]:
                        survivors.append((d, i, int(j)))
            if len(survivors) > _MAX_SURVIVORS:
                raise RejectionError("oscillation landscape too flat; "
                                     "reduce the refinement level")
        memo: dict[tuple[int, int], float] = {}
        best = [_Best() for _ in deltas]
        for d, i, j in survivors:
            if (i, j) not in memo:
                memo[(i, j)] = cells.l1_osc(float(cand[i]), float(cand[j]))
            best[d].offer(memo[(i, j)], (float(cand[i]), float(cand[j])))
        values = [(b.value, b.arg) for b in best]
    out = []
    for d, (value, arg) in zip(deltas, values):
        if arg is None:
            raise RejectionError(f"no admissible interval of length <= {d}")
        out.append(OscillationReport("intervals_leq_delta", (lo, hi),
                                     refinement_level, value, arg, mode, delta=d))
    return out


def subset_osc(f: StepFunction1D, q_interval, subset) -> tuple[float, float]:
    """Average of |f - f_Q| over a subset A of Q, with the John-Nirenberg
    shape bound 1 + log(|Q|/|A|) returned alongside for constant fitting.

    ``subset`` is an interval or a list of disjoint intervals inside Q.
    """
    qlo, qhi = as_interval(q_interval)
    parts = subset if isinstance(subset, (list, tuple)) and not np.isscalar(subset[0]) \
        else [subset]
    ivs = [as_interval(p) for p in parts]
    measure = sum(b - a for a, b in ivs)
    if measure <= 0:
        raise RejectionError("subset has zero measure")
    tol = 1e-12 * max(1.0, qhi - qlo)
    for a, b in ivs:
        if a < qlo - tol or b > qhi + tol:
            raise RejectionError(f"subset part [{a}, {b}] escapes Q=[{qlo}, {qhi}]")
    cells = WindowedCells(f, qlo, qhi)
    f_q = cells.avg(qlo, qhi)
    total = 0.0
    for a, b in ivs:
        a, b = max(a, qlo), min(b, qhi)
        i0 = max(np.searchsorted(cells.edges, a, side="right") - 1, 0)
        i1 = min(np.searchsorted(cells.edges, b, side="left"), cells.edges.size - 1)
        e = cells.edges[i0:i1 + 1]
        v = cells.vals[i0:i1]
        w = np.minimum(e[1:], b) - np.maximum(e[:-1], a)
        total += float(np.sum(np.abs(v - f_q) * w))
    value = total / measure
    jn_bound = 1.0 + math.log((qhi - qlo) / measure)
    return value, jn_bound
