"""Builders for the explicit counterexample functions, with their hypotheses
enforced as preconditions.

The discontinuity construction perturbs a nonnegative unit-size profile by a
scaled, masked, periodized logarithmic ramp whose BMO norm vanishes like
1/(1 + log n) while its average over [0, n] tends to 1. The 2D builders
assemble dyadic rows of translated log-bumps and the rational-translate
variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bumps import BumpSum2D, DyadicRowCenters, ExplicitCenters, X_SPACING
from .sampling import log_plus_sampler, sample_to_step
from .stepfn import (
    PeriodicExtension1D,
    RejectionError,
    StepFunction1D,
    as_interval,
    indicator,
    integrate,
)

LOG2 = math.log(2.0)


def mass_threshold(mask_left: float) -> float:
    """Minimum integral the base profile must exceed for the construction to
    produce a non-vanishing oscillation gap; decreases to log 2 as the mask
    extends to -infinity."""
    c = mask_left
    if not c < -1:
        raise RejectionError(f"mask_left must be < -1, got {c}")
    return ((c - 1.0) / c) * math.log(1.0 + c / (c - 1.0))


def build_perturbation(length: int, mask_left: float, max_cell_error: float,
                       window) -> StepFunction1D:
    """The vanishing-norm perturbation profile g for a given size n:
    the even 2n-periodic extension of log^+ on [0, n], scaled by
    1/(1 + log n) and masked to zero on [mask_left, 0]."""
    if length < 2:
        raise RejectionError(f"length must be >= 2, got {length}")
    if not mask_left < -1:
        raise RejectionError(f"mask_left must be < -1, got {mask_left}")
    lo, hi = as_interval(window)
    n = float(length)
    ramp = sample_to_step(log_plus_sampler(n), (0.0, n), max_cell_error)
    extension = PeriodicExtension1D(ramp, 2.0 * n)
    profile = extension.materialize((lo, hi))
    scaled = profile.scale(1.0 / (1.0 + math.log(n)))
    return scaled.mask_zero((mask_left, 0.0))


@dataclass(frozen=True)
class DiscontinuityInstance:
    """One run of the discontinuity construction.

    base: nonnegative profile, sup <= 1, supported in [0, 1]
    mass: integral of base over [0, 1] (must exceed log 2 and the threshold)
    mask_left: left end of the masked region (c < -1)
    length: ramp size n
    perturbation: the vanishing-norm profile g
    perturbed: base + (mass / (1 - mask_left)) * g
    """

    base: StepFunction1D
    mass: float
    mask_left: float
    length: int
    window: tuple
    perturbation: StepFunction1D
    perturbed: StepFunction1D

    @property
    def coefficient(self) -> float:
        return self.mass / (1.0 - self.mask_left)


def build_instance(base: StepFunction1D | None, mask_left: float, length: int,
                   max_cell_error: float,
                   window: tuple | None = None) -> DiscontinuityInstance:
    """Assemble a DiscontinuityInstance, enforcing every hypothesis."""
    if base is None:
        base = indicator((0.0, 1.0))
    s0, s1 = base.span
    if s0 < -1e-12 or s1 > 1.0 + 1e-12:
        raise RejectionError(f"base support [{s0}, {s1}] escapes [0, 1]")
    if np.any(base.values < 0):
        raise RejectionError("base must be nonnegative")
    if np.max(base.values) > 1.0 + 1e-12:
        raise RejectionError("base must be bounded by 1")
    if not mask_left < -1:
        raise RejectionError(f"mask_left must be < -1, got {mask_left}")
    mass = integrate(base, 0.0, 1.0)
    if not mass > LOG2:
        raise RejectionError(
            f"base integral {mass:.6f} must exceed log 2 = {LOG2:.6f}")
    thr = mass_threshold(mask_left)
    if not mass > thr:
        raise RejectionError(
            f"base integral {mass:.6f} does not clear the mask threshold "
            f"{thr:.6f} at mask_left={mask_left}")
    if window is None:
        window = (4.0 * mask_left, 2.0 * float(length))
    lo, hi = as_interval(window)
    if lo > 4.0 * mask_left + 1e-12 or hi < 2.0 * float(length) - 1e-12:
        raise RejectionError(
            f"window [{lo}, {hi}] must contain [{4 * mask_left}, {2 * length}]")
    g = build_perturbation(length, mask_left, max_cell_error, (lo, hi))
    coeff = mass / (1.0 - mask_left)
    return DiscontinuityInstance(base, mass, mask_left, length, (lo, hi),
                                 g, base + g.scale(coeff))


def ramp_average_exact(length: int) -> float:
    """Closed-form average of the perturbation over [0, n]:
    (n log n - n + 1) / (n (1 + log n))."""
    n = float(length)
    return (n * math.log(n) - n + 1.0) / (n * (1.0 + math.log(n)))


# -- 2D builders -----------------------------------------------------------------

def build_dyadic_bump_rows(levels: int, p: float, q: float,
                           clamp: float | None = None) -> BumpSum2D:
    """Dyadic rows of translated bumps: row k = 0..levels holds 2^k bumps at
    (3*sqrt(2)*m, k/levels) for m in [2^k, 2^(k+1)); 2^(levels+1) - 1 in all."""
    if levels < 2:
        raise RejectionError(f"levels must be >= 2, got {levels}")
    return BumpSum2D(p, q, DyadicRowCenters(levels), clamp)


def stern_brocot_rationals(count: int, hi: float = 2.0) -> list[float]:
    """First ``count`` rationals in (0, hi) in Stern-Brocot (mediant BFS) order."""
    if count < 1:
        raise RejectionError("count must be >= 1")
    out: list[float] = []
    frontier = [(Fraction(0), Fraction(int(hi) if hi == int(hi) else hi))]
    while len(out) < count:
        nxt = []
        for lo, hi_f in frontier:
            med = Fraction(lo.numerator + hi_f.numerator,
                           lo.denominator + hi_f.denominator)
            out.append(float(med))
            if len(out) >= count:
                return out
            nxt.append((lo, med))
            nxt.append((med, hi_f))
        frontier = nxt
    return out


def build_rational_bump_rows(count: int, p: float, q: float,
                             clamp: float | None = None) -> BumpSum2D:
    """Translated bumps at (3*sqrt(2)*m, r_m) with r_m the Stern-Brocot
    enumeration of the rationals in (0, 2); x-spacing certified."""
    if count < 1:
        raise RejectionError("count must be >= 1")
    rs = stern_brocot_rationals(count)
    ms = np.arange(1, count + 1)
    xy = np.column_stack([X_SPACING * ms, np.array(rs)])
    return BumpSum2D(p, q, ExplicitCenters(xy), clamp)
