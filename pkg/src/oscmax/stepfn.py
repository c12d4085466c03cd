"""Piecewise-constant functions on the line with exact cell arithmetic.

``StepFunction1D`` is the universal 1D carrier: finitely many cells, value
zero outside the breakpoint span. All operations are pure; "exact" means
exact modulo double rounding. ``PeriodicExtension1D`` wraps a step function
supported in ``[0, T/2]`` as its even, T-periodic extension and materializes
it on explicit windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Relative tolerance used throughout for "exact modulo rounding" claims.
REL_TOL = 1e-9


class RejectionError(ValueError):
    """An operation rejected its inputs (precondition violation)."""


def as_interval(interval) -> tuple[float, float]:
    """Validate and unpack a nondegenerate finite interval."""
    lo, hi = float(interval[0]), float(interval[1])
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise RejectionError(f"interval endpoints must be finite, got [{lo}, {hi}]")
    if not lo < hi:
        raise RejectionError(f"degenerate interval [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True, eq=False)
class StepFunction1D:
    """Step function with value ``values[i]`` on ``(breakpoints[i], breakpoints[i+1])``.

    Implicitly zero outside ``[breakpoints[0], breakpoints[-1]]``. Point
    evaluation at a breakpoint returns the right-hand cell value (a
    measure-zero convention; all integral quantities are unaffected).
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.atleast_1d(np.asarray(self.breakpoints, dtype=float)).copy()
        va = np.atleast_1d(np.asarray(self.values, dtype=float)).copy()
        if bp.ndim != 1 or va.ndim != 1 or bp.size != va.size + 1 or va.size < 1:
            raise RejectionError("need n+1 breakpoints for n >= 1 cell values")
        if not np.all(np.isfinite(bp)):
            raise RejectionError("non-finite breakpoint")
        if not np.all(np.isfinite(va)):
            raise RejectionError("non-finite cell value")
        if not np.all(np.diff(bp) > 0):
            raise RejectionError("breakpoints must be strictly increasing")
        bp.setflags(write=False)
        va.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", va)

    # -- shape -----------------------------------------------------------

    @property
    def span(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def num_cells(self) -> int:
        return self.values.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        idx = np.clip(idx, 0, self.num_cells - 1)
        inside = (x >= self.breakpoints[0]) & (x <= self.breakpoints[-1])
        out = np.where(inside, self.values[idx], 0.0)
        return float(out) if out.ndim == 0 else out

    def merged(self) -> "StepFunction1D":
        """Normal form: adjacent cells with exactly equal values collapsed."""
        keep = np.empty(self.num_cells, dtype=bool)
        keep[0] = True
        keep[1:] = self.values[1:] != self.values[:-1]
        if keep.all():
            return self
        idx = np.flatnonzero(keep)
        bp = np.concatenate([self.breakpoints[idx], self.breakpoints[-1:]])
        return StepFunction1D(bp, self.values[idx])

    def __eq__(self, other):
        if not isinstance(other, StepFunction1D):
            return NotImplemented
        a, b = self.merged(), other.merged()
        return np.array_equal(a.breakpoints, b.breakpoints) and np.array_equal(
            a.values, b.values
        )

    __hash__ = None

    def approx_equal(self, other: "StepFunction1D", rtol: float = REL_TOL) -> bool:
        """Compare as functions (union refinement), tolerating rounding."""
        lo = min(self.span[0], other.span[0])
        hi = max(self.span[1], other.span[1])
        edges = np.unique(np.concatenate([self.breakpoints, other.breakpoints, [lo, hi]]))
        mids = 0.5 * (edges[:-1] + edges[1:])
        va, vb = self(mids), other(mids)
        scale = max(np.abs(va).max(), np.abs(vb).max(), 1.0)
        return bool(np.all(np.abs(va - vb) <= rtol * scale))

    # -- algebra ---------------------------------------------------------

    def _binary(self, other: "StepFunction1D", op) -> "StepFunction1D":
        lo = min(self.span[0], other.span[0])
        hi = max(self.span[1], other.span[1])
        edges = np.unique(np.concatenate([self.breakpoints, other.breakpoints, [lo, hi]]))
        mids = 0.5 * (edges[:-1] + edges[1:])
        return StepFunction1D(edges, op(self(mids), other(mids))).merged()

    def __add__(self, other):
        if isinstance(other, StepFunction1D):
            return self._binary(other, np.add)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, StepFunction1D):
            return self._binary(other, np.subtract)
        return NotImplemented

    def __neg__(self):
        return StepFunction1D(self.breakpoints, -self.values)

    def scale(self, alpha: float) -> "StepFunction1D":
        return StepFunction1D(self.breakpoints, float(alpha) * self.values).merged()

    def __mul__(self, alpha):
        return self.scale(alpha)

    __rmul__ = __mul__

    def __abs__(self):
        return StepFunction1D(self.breakpoints, np.abs(self.values)).merged()

    def clamp(self, height: float) -> "StepFunction1D":
        """Truncate to ``[-height, height]``; rejects nonpositive heights."""
        if not height > 0:
            raise RejectionError(f"clamp height must be positive, got {height}")
        return StepFunction1D(
            self.breakpoints, np.clip(self.values, -height, height)
        ).merged()

    def mask_zero(self, interval) -> "StepFunction1D":
        """Set the function to zero on the given interval."""
        lo, hi = as_interval(interval)
        s0, s1 = self.span
        edges = np.unique(
            np.concatenate([self.breakpoints, np.clip([lo, hi], s0, s1)])
        )
        mids = 0.5 * (edges[:-1] + edges[1:])
        vals = self(mids)
        vals[(mids > lo) & (mids < hi)] = 0.0
        return StepFunction1D(edges, vals).merged()

    def translate(self, dx: float) -> "StepFunction1D":
        return StepFunction1D(self.breakpoints + float(dx), self.values)

    def reflected(self) -> "StepFunction1D":
        """Reflection around the origin."""
        return StepFunction1D(-self.breakpoints[::-1], self.values[::-1])


def integrate(f: StepFunction1D, a: float, b: float) -> float:
    """Exact ``\\int_a^b f``: sum of value * overlap over cells, left to right.

    Summed with ``math.fsum`` so the result is deterministic and immune to
    intermediate rounding order.
    """
    if not a < b:
        raise RejectionError(f"integration bounds must satisfy a < b, got [{a}, {b}]")
    bp, va = f.breakpoints, f.values
    left = np.maximum(bp[:-1], a)
    right = np.minimum(bp[1:], b)
    overlap = np.clip(right - left, 0.0, None)
    return math.fsum(va * overlap)


def step_algebra(op: str, f: StepFunction1D, g: StepFunction1D | None = None, **kw):
    """Dispatch-style surface over the cell algebra (add/scale/abs/clamp/mask_zero)."""
    if op == "add":
        if g is None:
            raise RejectionError("add requires two operands")
        return f + g
    if op == "scale":
        return f.scale(kw["alpha"])
    if op == "abs":
        return abs(f)
    if op == "clamp":
        return f.clamp(kw["height"])
    if op == "mask_zero":
        return f.mask_zero(kw["interval"])
    raise RejectionError(f"unknown step_algebra op {op!r}")


@dataclass(frozen=True, eq=False)
class PeriodicExtension1D:
    """Even, T-periodic extension of a step function supported in [0, T/2].

    Evaluation folds the argument: reduce mod T into ``[-T/2, T/2]``, then
    reflect negative arguments. ``materialize`` produces the exact step
    function on any window (breakpoints are shifted/mirrored copies of the
    base's, no resampling).
    """

    base: StepFunction1D
    period: float

    def __post_init__(self):
        t = float(self.period)
        if not (math.isfinite(t) and t > 0):
            raise RejectionError(f"period must be positive and finite, got {t}")
        object.__setattr__(self, "period", t)
        lo, hi = self.base.span
        half = t / 2.0
        tol = REL_TOL * max(1.0, half)
        if lo < -tol or hi > half + tol:
            # name the first escaping cell for the error message
            bad = lo if lo < -tol else hi
            raise RejectionError(
                f"base support [{lo}, {hi}] escapes [0, {half}] near x={bad}"
            )

    def fold(self, x):
        """Map x into [0, T/2] using periodicity and evenness."""
        x = np.asarray(x, dtype=float)
        r = np.mod(x, self.period)
        r = np.where(r > self.period / 2.0, self.period - r, r)
        return float(r) if r.ndim == 0 else r

    def __call__(self, x):
        return self.base(self.fold(x))

    def materialize(self, window) -> StepFunction1D:
        lo, hi = as_interval(window)
        t, half = self.period, self.period / 2.0
        bp = self.base.breakpoints
        pieces = []
        j0 = math.floor(lo / t) - 1
        j1 = math.ceil(hi / t) + 1
        for j in range(j0, j1 + 1):
            pieces.append(bp + j * t)            # direct copy on [jT, jT + T/2]
            pieces.append((t - bp)[::-1] + j * t)  # mirror on [jT + T/2, (j+1)T]
            pieces.append((-bp)[::-1] + j * t)     # mirror on [jT - T/2, jT]
        edges = np.concatenate(pieces + [np.array([lo, hi])])
        edges = np.unique(edges[(edges >= lo) & (edges <= hi)])
        if edges.size < 2:
            edges = np.array([lo, hi])
        mids = 0.5 * (edges[:-1] + edges[1:])
        return StepFunction1D(edges, self(mids)).merged()


def periodic_even_extend(h: StepFunction1D, period: float) -> PeriodicExtension1D:
    return PeriodicExtension1D(h, period)


# -- serialization ---------------------------------------------------------

def dumps_stepfn(f: StepFunction1D) -> str:
    """Text format: ``stepfn v1 n=<cells>``, then x0, then n lines ``x_i v_i``."""
    lines = [f"stepfn v1 n={f.num_cells}", f"{f.breakpoints[0]:.17g}"]
    for x, v in zip(f.breakpoints[1:], f.values):
        lines.append(f"{x:.17g} {v:.17g}")
    return "\n".join(lines) + "\n"


def loads_stepfn(text: str) -> StepFunction1D:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 3 or head[0] != "stepfn" or head[1] != "v1":
        raise RejectionError(f"bad stepfn header: {lines[0]!r}")
    n = int(head[2].split("=")[1])
    if len(lines) != n + 2:
        raise RejectionError(f"expected {n + 2} lines, got {len(lines)}")
    bp = [float(lines[1])]
    vals = []
    for ln in lines[2:]:
        xs, vs = ln.split()
        bp.append(float(xs))
        vals.append(float(vs))
    return StepFunction1D(np.array(bp), np.array(vals))


def write_stepfn(f: StepFunction1D, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_stepfn(f))


def read_stepfn(path) -> StepFunction1D:
    with open(path) as fh:
        return loads_stepfn(fh.read())


# -- common builders --------------------------------------------------------

def indicator(interval, height: float = 1.0, pad: float = 0.0) -> StepFunction1D:
    """Indicator of an interval times ``height``, optionally with zero padding cells."""
    lo, hi = as_interval(interval)
    if pad > 0:
        return StepFunction1D(
            [lo - pad, lo, hi, hi + pad], [0.0, float(height), 0.0]
        )
    return StepFunction1D([lo, hi], [float(height)])


def constant(value: float, interval) -> StepFunction1D:
    lo, hi = as_interval(interval)
    return StepFunction1D([lo, hi], [float(value)])


def jump(window, height: float = 1.0) -> StepFunction1D:
    """Materialized Heaviside jump at 0 on the given window (0 left, height right)."""
    lo, hi = as_interval(window)
    if not lo < 0 < hi:
        raise RejectionError("jump window must contain 0")
    return StepFunction1D([lo, 0.0, hi], [0.0, float(height)])
