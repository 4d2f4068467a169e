"""Weighted Haar system of a shifted dyadic lattice over an atomic measure.

Each non-degenerate interval I (both halves carrying positive mass) gets the
two-valued function h_I with integral 0 and squared integral 1:

    h_I = (1/sqrt(mu(I))) * [ sqrt(mu(I+)/mu(I-)) on I-,  -sqrt(mu(I-)/mu(I+)) on I+ ]

Degenerate intervals contribute nothing; the expansion terminates at
single-atom intervals, so the whole system is finite at desk scale.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import DyadicInterval, ShiftedLattice
from .measure import DiscreteMeasure, ValidationError, WeightedFunction

__all__ = [
    "HaarFunction",
    "HaarCoefficients",
    "haar_function",
    "decompose",
    "reconstruct",
    "partial_synthesis",
    "rescale_pair_to_window",
    "standard_root",
]

WINDOW_LEFT = 0.25
WINDOW_RIGHT = 0.75


@dataclass(frozen=True)
class HaarFunction:
    interval: DyadicInterval
    value_minus: float
    value_plus: float
    degenerate: bool

    def evaluate(self, x: float) -> float:
        if not self.interval.contains_point(x):
            return 0.0
        return self.value_minus if x < self.interval.center else self.value_plus


def _child_split(measure: DiscreteMeasure, interval: DyadicInterval,
                 lo: int, hi: int) -> tuple[int, float, float]:
    """(mid_index, mass_minus, mass_plus) for the atom range [lo, hi) of I."""
    mid = bisect.bisect_left(measure._poslist, interval.center, lo, hi)
    return mid, measure.range_mass(lo, mid), measure.range_mass(mid, hi)


def haar_function(measure: DiscreteMeasure, interval: DyadicInterval) -> HaarFunction:
    lo, hi = measure.index_range(interval.as_interval())
    total = measure.range_mass(lo, hi)
    if total <= 0:
        raise ValidationError("haar_function requires mu(I) > 0")
    _, m_minus, m_plus = _child_split(measure, interval, lo, hi)
    if m_minus <= 0 or m_plus <= 0:
        return HaarFunction(interval, 0.0, 0.0, True)
    v_minus = math.sqrt(m_plus / (total * m_minus))
    v_plus = -math.sqrt(m_minus / (total * m_plus))
    return HaarFunction(interval, v_minus, v_plus, False)


@dataclass
class HaarCoefficients:
    """Expansion of f over {global average, h_I} of one lattice.

    `top` holds the plain integral of f; the projection onto constants is
    top/mu(root) * chi_root, so Parseval reads
    ||f||^2 = top^2/mu(root) + sum of squared entries.
    """

    lattice: ShiftedLattice
    root: DyadicInterval
    base: DiscreteMeasure
    top: float
    entries: dict[DyadicInterval, float] = field(default_factory=dict)

    def coefficient_norm_sq(self) -> float:
        s = sum(c * c for c in self.entries.values())
        return self.top * self.top / self.base.mass(self.root.as_interval()) + s


def decompose(f: WeightedFunction, lattice: ShiftedLattice, root: DyadicInterval) -> HaarCoefficients:
    """Haar analysis of f down to single-atom intervals (sparse: only
    non-degenerate intervals meeting the support appear)."""
    mu = f.base
    pos = mu.positions
    if pos[0] < root.left or pos[-1] >= root.right:
        raise ValidationError("support of f must lie inside the root interval")
    fw = f.values * mu.weights
    prefix_fw = np.concatenate(([0.0], np.cumsum(fw)))

    entries: dict[DyadicInterval, float] = {}

    def recurse(interval: DyadicInterval, lo: int, hi: int) -> None:
        if hi - lo <= 1:
            return
        mid, m_minus, m_plus = _child_split(mu, interval, lo, hi)
        left_child, right_child = interval.children()
        if m_minus > 0 and m_plus > 0:
            total = m_minus + m_plus
            v_minus = math.sqrt(m_plus / (total * m_minus))
            v_plus = -math.sqrt(m_minus / (total * m_plus))
            coeff = v_minus * (prefix_fw[mid] - prefix_fw[lo]) + v_plus * (prefix_fw[hi] - prefix_fw[mid])
            entries[interval] = coeff
        if m_minus > 0:
            recurse(left_child, lo, mid)
        if m_plus > 0:
            recurse(right_child, mid, hi)

    lo, hi = mu.index_range(root.as_interval())
    recurse(root, lo, hi)
    top = float(prefix_fw[-1])
    return HaarCoefficients(lattice, root, mu, top, entries)


def reconstruct(coeffs: HaarCoefficients, measure: DiscreteMeasure) -> WeightedFunction:
    if measure is not coeffs.base and measure != coeffs.base:
        raise ValidationError("reconstruct requires the measure the coefficients were built over")
    values = np.full(len(measure), coeffs.top / measure.mass(coeffs.root.as_interval()))
    for interval, c in coeffs.entries.items():
        lo, hi = measure.index_range(interval.as_interval())
        if hi <= lo:
            continue
        mid = bisect.bisect_left(measure._poslist, interval.center, lo, hi)
        h = haar_function(measure, interval)
        values[lo:mid] += c * h.value_minus
        values[mid:hi] += c * h.value_plus
    return WeightedFunction(measure, values)


def partial_synthesis(coeffs: HaarCoefficients, measure: DiscreteMeasure, min_scale: int) -> WeightedFunction:
    """Synthesis using only intervals of scale >= min_scale.

    By the martingale (telescoping) property this equals, at each atom x, the
    mu-average of f over the scale-min_scale lattice interval containing x.
    """
    trimmed = HaarCoefficients(
        coeffs.lattice, coeffs.root, coeffs.base, coeffs.top,
        {iv: c for iv, c in coeffs.entries.items() if iv.scale >= min_scale},
    )
    return reconstruct(trimmed, measure)


def standard_root(shift: float) -> DyadicInterval:
    """Scale-0 interval [shift, shift+1); contains [1/4, 3/4] for every
    admissible shift, so it is the canonical root for window-normalized data."""
    return DyadicInterval(0, 0, shift)


def rescale_pair_to_window(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[DiscreteMeasure, DiscreteMeasure, tuple[float, float]]:
    """Affine map (a, b): x -> a*x + b sending the combined support hull onto
    [1/4, 3/4] (dimensionless constants are invariant under it)."""
    lo = min(float(mu.positions[0]), float(nu.positions[0]))
    hi = max(float(mu.positions[-1]), float(nu.positions[-1]))
    span = hi - lo
    if span <= 0:
        a, b = 1.0, 0.5 - lo
    else:
        a = 0.5 / span
        b = 0.25 - a * lo
    return mu.translate_scale(a, b), nu.translate_scale(a, b), (a, b)
