"""Controlled sampling of smooth profiles into step functions.

A ``Sampler1D`` carries a pointwise evaluator together with its monotonicity
intervals. ``sample_to_step`` chooses cell edges on each monotone piece so
the profile oscillates by at most ``max_cell_error`` within every cell, and
fills each cell with its exact average (closed-form antiderivative when
available, adaptive quadrature otherwise). Near a declared singularity the
subdivision is geometric and stops at a width floor; the final sliver still
receives its exact (improper) cell average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sciint
from scipy.special import gamma as _gamma
from scipy.special import gammaincc as _gammaincc

from .stepfn import RejectionError, StepFunction1D, as_interval

_BISECT_ITERS = 80


@dataclass(frozen=True)
class Sampler1D:
    """Profile plus the metadata sampling needs.

    ``pieces`` are closed intervals, in increasing order, on each of which
    the evaluator is monotone; together they must cover any window passed to
    ``sample_to_step``. ``singularities`` lists coordinates (piece endpoints)
    where the evaluator may be non-finite; anywhere else a non-finite value
    is a hard error.
    """

    evaluator: object
    pieces: tuple
    antiderivative: object = None
    singularities: tuple = ()
    name: str = "profile"

    @property
    def domain(self) -> tuple[float, float]:
        return self.pieces[0][0], self.pieces[-1][1]

    def __call__(self, x: float) -> float:
        return float(self.evaluator(x))


def _is_singular(s: Sampler1D, x: float, scale: float) -> bool:
    return any(abs(x - t) <= 1e-12 * max(1.0, scale) for t in s.singularities)


def _cell_average(s: Sampler1D, a: float, b: float) -> float:
    if s.antiderivative is not None:
        return (s.antiderivative(b) - s.antiderivative(a)) / (b - a)
    val, _ = _sciint.quad(s.evaluator, a, b, limit=200)
    return val / (b - a)


def _bisect_increment(f, cur: float, fcur: float, hi: float, eps: float) -> float:
    """Smallest t in (cur, hi] with |f(t) - f(cur)| = eps (f monotone there)."""
    lo_t, hi_t = cur, hi
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo_t + hi_t)
        if mid <= lo_t or mid >= hi_t:
            break
        fm = f(mid)
        if not math.isfinite(fm):
            hi_t = mid
            continue
        if abs(fm - fcur) > eps:
            hi_t = mid
        else:
            lo_t = mid
    return hi_t


def _walk_piece(s: Sampler1D, a: float, b: float, eps: float, floor: float,
                singular_right: bool) -> list[float]:
    """Cell edges on a monotone piece, walking from the finite end a toward b."""
    f = s.evaluator
    edges = [a]
    cur = a
    fcur = f(a)
    if not math.isfinite(fcur):
        raise RejectionError(f"{s.name}: non-finite value at x={a}")
    if singular_right:
        fb = math.inf
    else:
        fb = f(b)
        if not math.isfinite(fb):
            raise RejectionError(f"{s.name}: non-finite value at x={b}")
    while True:
        if b - cur <= floor * (1 + 1e-9):
            edges.append(b)
            break
        if math.isfinite(fb) and abs(fb - fcur) <= eps:
            edges.append(b)
            break
        nxt = _bisect_increment(f, cur, fcur, b, eps)
        if nxt - cur < floor:
            nxt = cur + floor
        if b - nxt <= floor:
            nxt = b
        edges.append(nxt)
        if nxt >= b:
            break
        cur = nxt
        fcur = f(cur)
        if not math.isfinite(fcur):
            raise RejectionError(f"{s.name}: non-finite value at x={cur}")
    return edges


def sample_to_step(s: Sampler1D, window, max_cell_error: float,
                   min_cell_width: float | None = None) -> StepFunction1D:
    """Step approximation with per-cell oscillation <= max_cell_error.

    Cell values are exact cell averages, so integrals of the result over
    cell-aligned ranges reproduce the profile's integrals to rounding.
    """
    lo, hi = as_interval(window)
    if not max_cell_error > 0:
        raise RejectionError(f"max_cell_error must be positive, got {max_cell_error}")
    span = hi - lo
    if min_cell_width is None:
        min_cell_width = 1e-12 * max(1.0, span)
    dom_lo, dom_hi = s.domain
    tol = 1e-12 * max(1.0, span)
    if lo < dom_lo - tol or hi > dom_hi + tol:
        raise RejectionError(
            f"window [{lo}, {hi}] escapes sampler domain [{dom_lo}, {dom_hi}]"
        )

    all_edges: list[float] = []
    all_vals: list[float] = []
    last_right = None
    for plo, phi in s.pieces:
        a, b = max(plo, lo), min(phi, hi)
        if not a < b:
            continue
        if last_right is not None and a > last_right + tol:
            raise RejectionError(f"monotone pieces leave [{last_right}, {a}] uncovered")
        sing_left = _is_singular(s, a, span)
        sing_right = _is_singular(s, b, span)
        if sing_left and sing_right:
            raise RejectionError(f"{s.name}: piece [{a}, {b}] singular at both ends")
        if sing_left:
            # walk the mirrored piece, then flip back
            g = Sampler1D(lambda t, _a=a, _b=b: s.evaluator(_a + _b - t), ((a, b),),
                          name=s.name, singularities=(b,))
            edges = _walk_piece(g, a, b, max_cell_error, min_cell_width, True)
            edges = [a + b - e for e in reversed(edges)]
        else:
            edges = _walk_piece(s, a, b, max_cell_error, min_cell_width, sing_right)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            v = _cell_average(s, e0, e1)
            if not math.isfinite(v):
                raise RejectionError(f"{s.name}: non-finite cell average on [{e0}, {e1}]")
            all_edges.append(e0)
            all_vals.append(v)
        last_right = b
    if not all_vals:
        raise RejectionError("window does not intersect any sampler piece")
    if abs(all_edges[0] - lo) > tol or abs(last_right - hi) > tol:
        raise RejectionError("monotone pieces do not cover the window")
    all_edges.append(last_right)
    return StepFunction1D(np.array(all_edges), np.array(all_vals)).merged()


# -- named profiles ----------------------------------------------------------

def log_plus_sampler(hi: float) -> Sampler1D:
    """max(0, ln x) on [0, hi]."""
    if not hi > 1:
        raise RejectionError("log_plus domain must extend past 1")

    def ev(x):
        return math.log(x) if x > 1 else 0.0

    def anti(x):
        return x * math.log(x) - x + 1.0 if x > 1 else 0.0

    return Sampler1D(ev, ((0.0, 1.0), (1.0, hi)), anti, (), "log_plus")


def log_abs_sampler(lo: float, hi: float) -> Sampler1D:
    """ln|x| on [lo, hi] with lo < 0 < hi; singular (to -inf) at 0."""
    if not lo < 0 < hi:
        raise RejectionError("log_abs domain must straddle 0")

    def ev(x):
        return math.log(abs(x)) if x != 0 else -math.inf

    def anti(x):
        return x * math.log(abs(x)) - x if x != 0 else 0.0

    return Sampler1D(ev, ((lo, 0.0), (0.0, hi)), anti, (0.0,), "log_abs")


def _psi_log_minus(p: float, t: float) -> float:
    """Antiderivative of (log^- |s|)^p from -1 to t; total mass 2*Gamma(p+1)."""
    gp = _gamma(p + 1.0)
    if t <= -1.0:
        return 0.0
    if t >= 1.0:
        return 2.0 * gp
    if t < 0.0:
        return gp * (1.0 - _gammaincc(p + 1.0, -math.log(-t)))
    if t == 0.0:
        return gp
    return gp * (1.0 + _gammaincc(p + 1.0, -math.log(t)))


def psi_log_minus_vec(p: float, t) -> np.ndarray:
    """Vectorized ``_psi_log_minus``."""
    t = np.asarray(t, dtype=float)
    gp = float(_gamma(p + 1.0))
    out = np.full(t.shape, gp)
    out[t <= -1.0] = 0.0
    out[t >= 1.0] = 2.0 * gp
    neg = (t > -1.0) & (t < 0.0)
    pos = (t > 0.0) & (t < 1.0)
    if neg.any():
        out[neg] = gp * (1.0 - _gammaincc(p + 1.0, -np.log(-t[neg])))
    if pos.any():
        out[pos] = gp * (1.0 + _gammaincc(p + 1.0, -np.log(t[pos])))
    return out


def log_minus_mass(p: float) -> float:
    """integral over [-1,1] of (log^-|t|)^p; equals 2*Gamma(p+1)."""
    return 2.0 * float(_gamma(p + 1.0))


def clamp_radius(p: float, weight: float, height: float) -> float:
    """Distance from the center at which weight*(log^-|x|)^p reaches height."""
    return math.exp(-((height / weight) ** (1.0 / p)))


def log_minus_power_sampler(p: float, center: float = 0.0, weight: float = 1.0,
                            clamp: float | None = None,
                            domain: tuple | None = None) -> Sampler1D:
    """weight * (log^-|x - center|)^p, optionally truncated at ``clamp``.

    Supported on [center-1, center+1]; an explicitly wider ``domain`` adds
    constant-zero pieces on both sides so windows can extend past the bump.
    """
    if not p > 0:
        raise RejectionError("exponent p must be positive")
    if not weight > 0:
        raise RejectionError("weight must be positive")
    if clamp is not None and not clamp > 0:
        raise RejectionError("clamp height must be positive")
    c = float(center)
    tstar = clamp_radius(p, weight, clamp) if clamp is not None else 0.0

    def ev(x):
        d = abs(x - c)
        if d >= 1.0:
            return 0.0
        if d == 0.0:
            return math.inf if clamp is None else float(clamp)
        v = weight * (-math.log(d)) ** p
        return min(v, clamp) if clamp is not None else v

    def anti(x):
        t = x - c
        if clamp is None:
            return weight * _psi_log_minus(p, t)
        if t <= -tstar:
            return weight * _psi_log_minus(p, t)
        left = weight * _psi_log_minus(p, -tstar)
        if t <= tstar:
            return left + clamp * (t + tstar)
        return left + 2.0 * clamp * tstar + weight * (
            _psi_log_minus(p, t) - _psi_log_minus(p, tstar)
        )

    pieces = [(c - 1.0, c), (c, c + 1.0)]
    sing = () if clamp is not None else (c,)
    if domain is not None:
        dlo, dhi = as_interval(domain)
        if dlo > c - 1.0 or dhi < c + 1.0:
            raise RejectionError("domain must contain the bump support")
        pieces = [(dlo, c - 1.0)] + pieces + [(c + 1.0, dhi)]
        pieces = [(a, b) for a, b in pieces if b > a]
    return Sampler1D(ev, tuple(pieces), anti, sing,
                     f"log_minus^{p}" + ("_clamped" if clamp is not None else ""))


def clamped_bump_integral(p: float, weight: float, clamp: float | None,
                          lo: float, hi: float) -> float:
    """Exact integral of min(clamp, weight*(log^-|x|)^p) over [lo, hi]."""
    if hi <= lo:
        return 0.0
    if clamp is None:
        return weight * (_psi_log_minus(p, hi) - _psi_log_minus(p, lo))
    s = log_minus_power_sampler(p, 0.0, weight, clamp)
    return s.antiderivative(hi) - s.antiderivative(lo)


def identity_sampler(lo: float, hi: float) -> Sampler1D:
    return Sampler1D(lambda x: x, ((lo, hi),), lambda x: 0.5 * x * x, (), "identity")


PROFILE_BUILDERS = {
    "logplus": lambda window: log_plus_sampler(window[1]),
    "logabs": lambda window: log_abs_sampler(window[0], window[1]),
    "logminus_sqrt": lambda window: log_minus_power_sampler(0.5, domain=window),
    "logminus_p": lambda window, p=0.5: log_minus_power_sampler(p, domain=window),
}
