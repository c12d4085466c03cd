"""2D carriers and operators: cell-averaged grids, rectangle oscillation,
directional (row-wise) and strong maximal operators, and the 2D BMO searches.

Rectangle statistics on grids are exact: arbitrary rectangles use partial-cell
overlap vectors, grid-aligned families use 2D prefix sums in O(1) per
rectangle. The BMO searches resample the grid onto the union of its edges and
a uniform lattice (pure subdivision, still exact) so every candidate corner
sits on prefix-sum coordinates; L1 sweeps are L2-prefiltered exactly as in 1D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .maximal import MaximalEvaluator
from .oscillation import OscillationReport, WindowedCells, _Best
from .stepfn import RejectionError, StepFunction1D, as_interval


@dataclass(frozen=True)
class Rect:
    """Axis-parallel rectangle I x J."""

    x: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", as_interval(self.x))
        object.__setattr__(self, "y", as_interval(self.y))

    @property
    def width(self) -> float:
        return self.x[1] - self.x[0]

    @property
    def height(self) -> float:
        return self.y[1] - self.y[0]

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def eccentricity(self) -> float:
        a, b = self.width, self.height
        return max(a, b) / min(a, b)

    def contains_point(self, x: float, y: float) -> bool:
        return self.x[0] <= x <= self.x[1] and self.y[0] <= y <= self.y[1]


def _overlaps(edges: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return np.clip(np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo), 0.0, None)


@dataclass(eq=False)
class GridFunction2D:
    """Cell-averaged function on a rectangular grid; zero outside the span.

    ``values[i, j]`` is the average on cell [x_edges[i], x_edges[i+1]] x
    [y_edges[j], y_edges[j+1]].
    """

    x_edges: np.ndarray
    y_edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xe = np.asarray(self.x_edges, dtype=float)
        ye = np.asarray(self.y_edges, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if xe.ndim != 1 or ye.ndim != 1 or v.shape != (xe.size - 1, ye.size - 1):
            raise RejectionError(
                f"values shape {v.shape} does not match edges "
                f"({xe.size - 1} x {ye.size - 1})"
            )
        if not (np.all(np.diff(xe) > 0) and np.all(np.diff(ye) > 0)):
            raise RejectionError("grid edges must be strictly increasing")
        if not (np.all(np.isfinite(xe)) and np.all(np.isfinite(ye))
                and np.all(np.isfinite(v))):
            raise RejectionError("non-finite grid data")
        self.x_edges, self.y_edges, self.values = xe, ye, v

    @property
    def span(self) -> Rect:
        return Rect((self.x_edges[0], self.x_edges[-1]),
                    (self.y_edges[0], self.y_edges[-1]))

    @cached_property
    def _cell_areas(self) -> np.ndarray:
        return np.outer(np.diff(self.x_edges), np.diff(self.y_edges))

    @cached_property
    def prefix1(self) -> np.ndarray:
        s = np.zeros((self.x_edges.size, self.y_edges.size))
        s[1:, 1:] = np.cumsum(np.cumsum(self.values * self._cell_areas, 0), 1)
        return s

    @cached_property
    def prefix2(self) -> np.ndarray:
        s = np.zeros((self.x_edges.size, self.y_edges.size))
        s[1:, 1:] = np.cumsum(np.cumsum(self.values ** 2 * self._cell_areas, 0), 1)
        return s

    def value_at(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ix = np.clip(np.searchsorted(self.x_edges, x, "right") - 1, 0,
                     self.values.shape[0] - 1)
        iy = np.clip(np.searchsorted(self.y_edges, y, "right") - 1, 0,
                     self.values.shape[1] - 1)
        inside = ((x >= self.x_edges[0]) & (x <= self.x_edges[-1])
                  & (y >= self.y_edges[0]) & (y <= self.y_edges[-1]))
        out = np.where(inside, self.values[ix, iy], 0.0)
        return float(out) if out.ndim == 0 else out

    def rect_integral(self, rect: Rect) -> float:
        ox = _overlaps(self.x_edges, *rect.x)
        oy = _overlaps(self.y_edges, *rect.y)
        return float(ox @ self.values @ oy)

    def rect_avg(self, rect: Rect) -> float:
        return self.rect_integral(rect) / rect.area

    def _slice_index(self, edges: np.ndarray, coord: float, axis: str) -> int:
        span = edges[-1] - edges[0]
        if np.min(np.abs(edges - coord)) <= 1e-12 * max(1.0, span):
            raise RejectionError(f"{axis}={coord} lies on a grid edge (ambiguous row)")
        idx = int(np.searchsorted(edges, coord, "right") - 1)
        if idx < 0 or idx >= edges.size - 1:
            raise RejectionError(f"{axis}={coord} outside grid span")
        return idx

    def slice_y(self, y: float) -> StepFunction1D:
        """Horizontal slice x -> f(x, y); exact row extraction."""
        j = self._slice_index(self.y_edges, y, "y")
        return StepFunction1D(self.x_edges, self.values[:, j])

    def slice_x(self, x: float) -> StepFunction1D:
        i = self._slice_index(self.x_edges, x, "x")
        return StepFunction1D(self.y_edges, self.values[i, :])


# -- serialization -----------------------------------------------------------

def dumps_grid(g: GridFunction2D) -> str:
    nx, ny = g.values.shape
    lines = [f"grid2d v1 nx={nx} ny={ny}",
             " ".join(f"{v:.17g}" for v in g.x_edges),
             " ".join(f"{v:.17g}" for v in g.y_edges)]
    for i in range(nx):
        lines.append(" ".join(f"{v:.17g}" for v in g.values[i]))
    return "\n".join(lines) + "\n"


def loads_grid(text: str) -> GridFunction2D:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[:2] != ["grid2d", "v1"]:
        raise RejectionError(f"bad grid2d header: {lines[0]!r}")
    nx = int(head[2].split("=")[1])
    ny = int(head[3].split("=")[1])
    xe = np.array([float(t) for t in lines[1].split()])
    ye = np.array([float(t) for t in lines[2].split()])
    vals = np.array([[float(t) for t in ln.split()] for ln in lines[3:3 + nx]])
    if vals.shape != (nx, ny):
        raise RejectionError("grid2d payload shape mismatch")
    return GridFunction2D(xe, ye, vals)


# -- oscillation on rectangles ------------------------------------------------

def _rect_cells(g: GridFunction2D, rect: Rect):
    """Local cell decomposition of a rectangle, zero-padded outside the span."""
    (x1, x2), (y1, y2) = rect.x, rect.y
    xe = np.unique(np.concatenate(
        [[x1], g.x_edges[(g.x_edges > x1) & (g.x_edges < x2)], [x2]]))
    ye = np.unique(np.concatenate(
        [[y1], g.y_edges[(g.y_edges > y1) & (g.y_edges < y2)], [y2]]))
    mx = 0.5 * (xe[:-1] + xe[1:])
    my = 0.5 * (ye[:-1] + ye[1:])
    vals = g.value_at(mx[:, None], my[None, :])
    areas = np.outer(np.diff(xe), np.diff(ye))
    return vals, areas


def mean_osc_2d(g: GridFunction2D, rect: Rect, mode: str = "L1") -> float:
    """Mean oscillation of a grid function on an arbitrary rectangle, exact."""
    vals, areas = _rect_cells(g, rect)
    total = rect.area
    m = float(np.sum(vals * areas)) / total
    if mode == "L1":
        return float(np.sum(np.abs(vals - m) * areas)) / total
    if mode == "L2":
        msq = float(np.sum(vals ** 2 * areas)) / total
        return math.sqrt(max(msq - m * m, 0.0))
    raise RejectionError(f"unknown oscillation mode {mode!r}")


# -- strong maximal on grids ---------------------------------------------------

def strong_maximal(g: GridFunction2D, queries, window: Rect,
                   ecc_cap: float | None = None) -> np.ndarray:
    """Sup of averages of |f| over grid-aligned rectangles inside the window
    containing each query point; optional eccentricity cap on the family."""
    absg = GridFunction2D(g.x_edges, g.y_edges, np.abs(g.values))
    s = absg.prefix1
    (wx1, wx2), (wy1, wy2) = window.x, window.y
    tolx = 1e-12 * max(1.0, wx2 - wx1)
    toly = 1e-12 * max(1.0, wy2 - wy1)
    xe_idx = np.nonzero((g.x_edges >= wx1 - tolx) & (g.x_edges <= wx2 + tolx))[0]
    ye_idx = np.nonzero((g.y_edges >= wy1 - toly) & (g.y_edges <= wy2 + toly))[0]
    if xe_idx.size < 2 or ye_idx.size < 2:
        raise RejectionError("window contains fewer than one grid cell")
    out = np.empty(len(queries))
    for t, (qx, qy) in enumerate(queries):
        if not window.contains_point(qx, qy):
            raise RejectionError(f"query ({qx}, {qy}) outside window")
        li = xe_idx[g.x_edges[xe_idx] <= qx]
        ri = xe_idx[g.x_edges[xe_idx] >= qx]
        bj = ye_idx[g.y_edges[ye_idx] <= qy]
        tj = ye_idx[g.y_edges[ye_idx] >= qy]
        if li.size == 0 or ri.size == 0 or bj.size == 0 or tj.size == 0:
            raise RejectionError(f"no grid-aligned rectangle contains ({qx}, {qy})")
        xlen = g.x_edges[ri][None, :] - g.x_edges[li][:, None]
        # integral over [x_i, x_k] for all pairs, as a (pairs, ny-edges) slab
        dx_slab = s[ri][None, :, :] - s[li][:, None, :]   # (L, R, ny+1)
        best = -math.inf
        ylen = g.y_edges[tj][None, :] - g.y_edges[bj][:, None]
        ok_y = ylen > 0
        for a in range(li.size):
            for b in range(ri.size):
                lx = xlen[a, b]
                if lx <= 0:
                    continue
                col = dx_slab[a, b]
                ints = col[tj][None, :] - col[bj][:, None]
                with np.errstate(divide="ignore", invalid="ignore"):
                    avg = ints / (lx * ylen)
                ok = ok_y.copy()
                if ecc_cap is not None:
                    cap = ecc_cap * (1 + 1e-12)
                    with np.errstate(divide="ignore", invalid="ignore"):
                        ok &= (lx / ylen <= cap) & (ylen / lx <= cap)
                if ok.any():
                    best = max(best, float(avg[ok].max()))
        if best == -math.inf:
            raise RejectionError(
                f"eccentricity cap {ecc_cap} admits no rectangle at ({qx}, {qy})")
        out[t] = best
    return out


def strong_maximal_naive(g: GridFunction2D, query, window: Rect,
                         ecc_cap: float | None = None,
                         rng: np.random.Generator | None = None,
                         sample: int | None = None) -> float:
    """Direct-summation oracle: averages recomputed by masked cell sums."""
    qx, qy = query
    (wx1, wx2), (wy1, wy2) = window.x, window.y
    xe = g.x_edges[(g.x_edges >= wx1 - 1e-12) & (g.x_edges <= wx2 + 1e-12)]
    ye = g.y_edges[(g.y_edges >= wy1 - 1e-12) & (g.y_edges <= wy2 + 1e-12)]
    lefts = xe[xe <= qx]
    rights = xe[xe >= qx]
    bots = ye[ye <= qy]
    tops = ye[ye >= qy]
    rects = [(a, b, c, d) for a in lefts for b in rights if b > a
             for c in bots for d in tops if d > c]
    if sample is not None and rng is not None and len(rects) > sample:
        idx = rng.choice(len(rects), size=sample, replace=False)
        rects = [rects[i] for i in idx]
    absg = GridFunction2D(g.x_edges, g.y_edges, np.abs(g.values))
    best = -math.inf
    for a, b, c, d in rects:
        if ecc_cap is not None:
            e = max(b - a, d - c) / min(b - a, d - c)
            if e > ecc_cap * (1 + 1e-12):
                continue
        r = Rect((a, b), (c, d))
        best = max(best, absg.rect_integral(r) / r.area)
    return best


# -- slices and directional maximal ---------------------------------------------

def slice_y(g, y: float, x_window=None, max_cell_error: float = 1e-3
            ) -> StepFunction1D:
    """Horizontal slice of either carrier as a step function: exact row
    extraction for grids, windowed sampling for bump sums."""
    from .bumps import BumpSum2D  # local import, no cycle

    if isinstance(g, BumpSum2D):
        if x_window is None:
            raise RejectionError("bump-sum slices need an explicit x_window")
        return g.slice_y(y, x_window, max_cell_error)
    return g.slice_y(y)


def directional_maximal_e1(g, y_rows, x_queries, x_window,
                           max_cell_error: float = 1e-3) -> np.ndarray:
    """Row-wise 1D uncentered maximal operator: for each y, slice and take the
    exact windowed maximal profile in x. Accepts grid or bump-sum carriers."""
    from .bumps import BumpSum2D, bump_directional_profile  # local import, no cycle

    if isinstance(g, BumpSum2D):
        return bump_directional_profile(g, y_rows, x_queries, x_window)
    qs = np.asarray(x_queries, dtype=float)
    if qs.size and np.any(np.diff(qs) < 0):
        raise RejectionError("x_queries must be sorted ascending")
    out = np.empty((len(y_rows), qs.size))
    for r, y in enumerate(y_rows):
        span = g.span
        if y <= span.y[0] or y >= span.y[1]:
            sl = StepFunction1D(np.array(as_interval(x_window)), np.array([0.0]))
        else:
            sl = g.slice_y(y)
        ev = MaximalEvaluator(sl, x_window)
        out[r] = [v for _, v in ev.profile(qs)]
    return out


# -- 2D BMO searches -----------------------------------------------------------

def _merge_lattice(uniform: np.ndarray, extra: np.ndarray, scale: float):
    """Sorted union with tolerance dedupe; returns (lattice, uniform positions)."""
    tol = 1e-12 * max(1.0, scale)
    allpts = np.sort(np.concatenate([uniform, extra]))
    keep = np.concatenate([[True], np.diff(allpts) > tol])
    lattice = allpts[keep]
    pos = np.searchsorted(lattice, uniform - tol / 2, side="left")
    pos = np.clip(pos, 0, lattice.size - 1)
    # snap each uniform point to its lattice representative
    adjust = np.abs(lattice[np.minimum(pos + 1, lattice.size - 1)] - uniform) < \
        np.abs(lattice[pos] - uniform)
    pos = pos + adjust
    return lattice, pos.astype(np.int64)


class _LatticeSweep:
    """Exact prefix-sum statistics on the union lattice of a window."""

    def __init__(self, g: GridFunction2D, window: Rect, refinement_level: int):
        (x1, x2), (y1, y2) = window.x, window.y
        w, h = x2 - x1, y2 - y1
        step = min(w, h) / 2 ** refinement_level
        nxu = int(math.floor(w / step + 1e-9))
        nyu = int(math.floor(h / step + 1e-9))
        ux = x1 + step * np.arange(nxu + 1)
        uy = y1 + step * np.arange(nyu + 1)
        gx = g.x_edges[(g.x_edges > x1) & (g.x_edges < x2)]
        gy = g.y_edges[(g.y_edges > y1) & (g.y_edges < y2)]
        self.latx, self.posx = _merge_lattice(ux, np.concatenate([gx, [x2]]), w)
        self.laty, self.posy = _merge_lattice(uy, np.concatenate([gy, [y2]]), h)
        self.step, self.nxu, self.nyu = step, nxu, nyu
        mx = 0.5 * (self.latx[:-1] + self.latx[1:])
        my = 0.5 * (self.laty[:-1] + self.laty[1:])
        self.vals = g.value_at(mx[:, None], my[None, :])
        self.ax = np.diff(self.latx)
        self.ay = np.diff(self.laty)
        areas = np.outer(self.ax, self.ay)
        self.p1 = np.zeros((self.latx.size, self.laty.size))
        self.p1[1:, 1:] = np.cumsum(np.cumsum(self.vals * areas, 0), 1)
        self.p2 = np.zeros_like(self.p1)
        self.p2[1:, 1:] = np.cumsum(np.cumsum(self.vals ** 2 * areas, 0), 1)

    def _corner(self, p, i, j):
        return p[i[:, None], j[None, :]]

    def stats(self, i1, i2, j1, j2):
        """avg and L2 osc for the index-rect grid (i1[a]..i2[a]) x (j1[b]..j2[b])."""
        area = np.outer(self.latx[i2] - self.latx[i1], self.laty[j2] - self.laty[j1])
        ints = (self._corner(self.p1, i2, j2) - self._corner(self.p1, i1, j2)
                - self._corner(self.p1, i2, j1) + self._corner(self.p1, i1, j1))
        sq = (self._corner(self.p2, i2, j2) - self._corner(self.p2, i1, j2)
              - self._corner(self.p2, i2, j1) + self._corner(self.p2, i1, j1))
        avg = ints / area
        l2 = np.sqrt(np.maximum(sq / area - avg ** 2, 0.0))
        return avg, l2

    def l1_exact(self, i1, i2, j1, j2) -> float:
        block = self.vals[i1:i2, j1:j2]
        w = np.outer(self.ax[i1:i2], self.ay[j1:j2])
        area = float(w.sum())
        m = float((block * w).sum()) / area
        return float((np.abs(block - m) * w).sum()) / area

    def rect_of(self, i1, i2, j1, j2) -> Rect:
        return Rect((self.latx[i1], self.latx[i2]), (self.laty[j1], self.laty[j2]))


def _side_pairs(family: str, nxu: int, nyu: int, ecc_cap: float | None):
    if family == "squares":
        return [(k, k) for k in range(1, min(nxu, nyu) + 1)]
    if family == "rects":
        cap = math.inf if ecc_cap is None else ecc_cap * (1 + 1e-12)
        pairs = [(kx, ky) for kx in range(1, nxu + 1) for ky in range(1, nyu + 1)
                 if max(kx, ky) / min(kx, ky) <= cap]
        return pairs
    raise RejectionError(f"unknown 2D family {family!r}")


def bmo_norm_2d(g: GridFunction2D, window: Rect, family: str,
                refinement_level: int, mode: str = "L1",
                ecc_cap: float | None = None,
                max_candidates: int = 80_000_000) -> OscillationReport:
    """Supremum of rectangle mean oscillation over a grid-anchored family.

    Candidates are anchored on the uniform refinement lattice with side
    lengths that are multiples of the lattice step ("squares" forces equal
    sides, "rects" admits an eccentricity cap). Values are exact for every
    candidate, so the report value is a certified lower bound, monotone in
    the refinement level.
    """
    sweep = _LatticeSweep(g, window, refinement_level)
    pairs = _side_pairs(family, sweep.nxu, sweep.nyu, ecc_cap)
    total = sum((sweep.nxu - kx + 1) * (sweep.nyu - ky + 1) for kx, ky in pairs)
    if total > max_candidates:
        raise RejectionError(
            f"candidate family too large ({total}); lower the refinement level")

    def enumerate_blocks():
        for kx, ky in pairs:
            ia = sweep.posx[np.arange(0, sweep.nxu - kx + 1)]
            ib = sweep.posx[np.arange(kx, sweep.nxu + 1)]
            ja = sweep.posy[np.arange(0, sweep.nyu - ky + 1)]
            jb = sweep.posy[np.arange(ky, sweep.nyu + 1)]
            yield (kx, ky), ia, ib, ja, jb

    best = _Best()
    if mode == "L2":
        for _, ia, ib, ja, jb in enumerate_blocks():
            _, l2 = sweep.stats(ia, ib, ja, jb)
            k = np.unravel_index(int(np.argmax(l2)), l2.shape)
            best.offer(float(l2[k]), (ia[k[0]], ib[k[0]], ja[k[1]], jb[k[1]]))
    else:
        l2best = _Best()
        for _, ia, ib, ja, jb in enumerate_blocks():
            _, l2 = sweep.stats(ia, ib, ja, jb)
            k = np.unravel_index(int(np.argmax(l2)), l2.shape)
            l2best.offer(float(l2[k]), (ia[k[0]], ib[k[0]], ja[k[1]], jb[k[1]]))
        if l2best.arg is None:
            raise RejectionError("empty candidate family")
        best.offer(sweep.l1_exact(*l2best.arg), l2best.arg)
        threshold = best.value
        for _, ia, ib, ja, jb in enumerate_blocks():
            _, l2 = sweep.stats(ia, ib, ja, jb)
            hits = np.argwhere(l2 >= threshold)
            for a, b in hits:
                idx = (ia[a], ib[a], ja[b], jb[b])
                best.offer(sweep.l1_exact(*idx), idx)
    if best.arg is None:
        raise RejectionError("empty candidate family")
    rect = sweep.rect_of(*best.arg)
    name = family if family != "rects" or ecc_cap is None else f"rects(ecc<={ecc_cap:g})"
    return OscillationReport(name, window.x, refinement_level, best.value,
                             rect.x, mode, window_y=window.y, argmax_y=rect.y)


# -- separable product condition ------------------------------------------------

def _fixed_length_candidates(f: StepFunction1D, lo: float, hi: float,
                             delta: float) -> np.ndarray:
    """Left endpoints for the sliding family [a, a+delta] inside [lo, hi]:
    kinks of the sliding statistics plus their midpoints and a coarse grid."""
    bp = f.breakpoints
    base = np.concatenate([bp, bp - delta, [lo, hi - delta],
                           np.linspace(lo, hi - delta, 65)])
    base = np.unique(base[(base >= lo) & (base <= hi - delta)])
    mids = 0.5 * (base[:-1] + base[1:])
    return np.unique(np.concatenate([base, mids]))


def sliding_sup_avg_abs(f: StepFunction1D, delta: float, window) -> float:
    """sup over intervals of length exactly delta of the average of |f|."""
    lo, hi = as_interval(window)
    if delta >= hi - lo:
        raise RejectionError("delta exceeds the window")
    cells = WindowedCells(abs(f), lo, hi)
    a = _fixed_length_candidates(f, lo, hi, delta)
    return float(np.max((cells.s1(a + delta) - cells.s1(a)) / delta))


def sliding_sup_osc(f: StepFunction1D, delta: float, window,
                    mode: str = "L1") -> float:
    """sup over intervals of length exactly delta of the mean oscillation."""
    lo, hi = as_interval(window)
    if delta >= hi - lo:
        raise RejectionError("delta exceeds the window")
    cells = WindowedCells(f, lo, hi)
    a = _fixed_length_candidates(f, lo, hi, delta)
    if mode == "L2":
        return float(max(cells.l2_osc(x, x + delta) for x in a))
    return float(max(cells.l1_osc(x, x + delta) for x in a))


def product_separable_norm(phi: StepFunction1D, psi: StepFunction1D,
                           delta_grid, window) -> float:
    """Scale-matched product condition for f(x,y) = phi(x) psi(y):

        max over delta of  sup_{|I|=delta} <|phi|>_I * sup_{|J|=delta} O(psi, J)
                         + sup_{|I|=delta} O(phi, I) * sup_{|J|=delta} <|psi|>_J
    """
    deltas = sorted(float(d) for d in delta_grid)
    if not deltas:
        raise RejectionError("empty delta grid")
    if deltas[0] <= 0:
        raise RejectionError("delta grid must be positive")
    best = -math.inf
    for d in deltas:
        a1 = sliding_sup_avg_abs(phi, d, window)
        o1 = sliding_sup_osc(phi, d, window)
        a2 = sliding_sup_avg_abs(psi, d, window)
        o2 = sliding_sup_osc(psi, d, window)
        best = max(best, a1 * o2 + o1 * a2)
    return best


# -- slice decomposition ----------------------------------------------------------

def _aligned_weights(edges: np.ndarray, parts, what: str) -> np.ndarray:
    """Per-cell overlap with a union of grid-aligned intervals."""
    span = edges[-1] - edges[0]
    tol = 1e-9 * max(1.0, span)
    w = np.zeros(edges.size - 1)
    for part in parts:
        a, b = as_interval(part)
        if (np.min(np.abs(edges - a)) > tol) or (np.min(np.abs(edges - b)) > tol):
            raise RejectionError(f"{what} part [{a}, {b}] is not grid-aligned")
        w += _overlaps(edges, a, b)
    if not w.sum() > 0:
        raise RejectionError(f"{what} has zero measure")
    return w


def slice_osc_decomposition(g: GridFunction2D, x_set, y_set) -> tuple[float, float]:
    """Compare the mean oscillation on a product set A x B with the two
    slice-averaged terms; both sides exact on the grid.

    Returns (lhs, rhs) with
      lhs = O(f, A x B),
      rhs = avg over B of O(f_y, A) + avg over A of O(f_x, B).
    """
    parts_x = x_set if isinstance(x_set[0], (tuple, list, np.ndarray)) else [x_set]
    parts_y = y_set if isinstance(y_set[0], (tuple, list, np.ndarray)) else [y_set]
    wx = _aligned_weights(g.x_edges, parts_x, "A")
    wy = _aligned_weights(g.y_edges, parts_y, "B")
    ma, mb = float(wx.sum()), float(wy.sum())
    v = g.values
    mean = float(wx @ v @ wy) / (ma * mb)
    lhs = float(wx @ np.abs(v - mean) @ wy) / (ma * mb)
    # slice terms: rows f_y are constant per y-cell, columns per x-cell
    row_means = (wx @ v) / ma                      # per y-cell
    osc_rows = (wx @ np.abs(v - row_means[None, :])) / ma
    col_means = (v @ wy) / mb                      # per x-cell
    osc_cols = (np.abs(v - col_means[:, None]) @ wy) / mb
    rhs = float(osc_rows @ wy) / mb + float(osc_cols @ wx) / ma
    return lhs, rhs
