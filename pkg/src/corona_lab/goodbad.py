"""Bad / essentially-bad interval classification and the Monte-Carlo decay
estimates over random shift pairs.

An interval I of one lattice is bad when a comparable-or-longer interval J of
the other lattice brings its boundary-plus-midpoint set e(J) within
|J|^(3/4) |I|^(1/4) of I; essentially bad further requires |J| >= 2^r |I|.
Candidate J run from |I| up to (but excluding) 2^scale_cap |I|, and never
beyond the other lattice's top scale, which mirrors working inside a fixed
unit root.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dyadic import (
    DyadicInterval,
    ShiftedLattice,
    dist_special_points,
    sample_shift_pairs,
)
from .haar import HaarCoefficients, decompose, standard_root
from .measure import DiscreteMeasure, ValidationError, WeightedFunction

__all__ = [
    "GoodBadConfig",
    "BadnessVerdict",
    "classify",
    "good_weak",
    "good_strong",
    "pair_separation_ok",
    "split_good_bad",
    "BadProbabilityGeometry",
    "estimate_bad_probability",
    "bad_probability_sweep",
    "estimate_epsilon_r",
    "epsilon_r_sweep",
    "worker_count",
]


def worker_count() -> int:
    """Worker count from CORONA_LAB_THREADS (results never depend on it)."""
    raw = os.environ.get("CORONA_LAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


@dataclass(frozen=True)
class GoodBadConfig:
    r: int = 4
    scale_cap: int = 40

    def __post_init__(self):
        if self.r < 1:
            raise ValidationError("goodness parameter r must be >= 1")
        if self.scale_cap < self.r:
            raise ValidationError("scale_cap must be >= r")


@dataclass(frozen=True)
class BadnessVerdict:
    bad: bool
    essentially_bad: bool
    witness: DyadicInterval | None


def _badness_threshold(j_length: float, i_length: float) -> float:
    return j_length ** 0.75 * i_length ** 0.25


def violating_gaps(interval: DyadicInterval, other: ShiftedLattice, cfg: GoodBadConfig):
    """Scale gaps j in [0, scale_cap) at which some candidate J of the other
    lattice violates the separation, with one witness per gap."""
    gaps = []
    max_gap = min(cfg.scale_cap - 1, other.scale_max - interval.scale)
    i_len = interval.length
    for j in range(0, max_gap + 1):
        s = interval.scale + j
        step = 2.0 ** s
        k = math.floor((interval.center - other.shift) / step)
        threshold = _badness_threshold(step, i_len)
        witness = None
        for idx in (k - 1, k, k + 1):
            cand = DyadicInterval(s, idx, other.shift)
            if dist_special_points(cand, interval) < threshold:
                witness = cand
                break
        if witness is not None:
            gaps.append((j, witness))
    return gaps


def classify(interval: DyadicInterval, other: ShiftedLattice, cfg: GoodBadConfig) -> BadnessVerdict:
    gaps = violating_gaps(interval, other, cfg)
    bad = bool(gaps)
    essential = [(j, w) for j, w in gaps if j >= cfg.r]
    if essential:
        return BadnessVerdict(True, True, essential[0][1])
    return BadnessVerdict(bad, False, gaps[0][1] if gaps else None)


def good_weak(interval: DyadicInterval, other: ShiftedLattice, cfg: GoodBadConfig) -> bool:
    """Not essentially bad (the predicate gating the bad/good split)."""
    return not classify(interval, other, cfg).essentially_bad


def good_strong(interval: DyadicInterval, other: ShiftedLattice, cfg: GoodBadConfig) -> bool:
    """Endpoint separation against every comparable-or-longer candidate J.

    Diagnostic only: for scale gaps below ~9 the threshold |J|^3/4 |I|^1/4
    exceeds the candidate grid spacing, so this predicate is unsatisfiable
    whenever such gaps are available; the working notion of good is
    `good_weak`, with pairwise separation imposed where a sum requires it.
    """
    i_len = interval.length
    max_gap = min(cfg.scale_cap - 1, other.scale_max - interval.scale)
    for j in range(0, max_gap + 1):
        s = interval.scale + j
        step = 2.0 ** s
        k = math.floor((interval.center - other.shift) / step)
        threshold = _badness_threshold(step, i_len)
        for idx in (k - 1, k, k + 1):
            cand = DyadicInterval(s, idx, other.shift)
            d = min(
                _point_interval_distance(cand.left, interval),
                _point_interval_distance(cand.right, interval),
            )
            if d < threshold:
                return False
    return True


def _point_interval_distance(p: float, interval: DyadicInterval) -> float:
    if p < interval.left:
        return interval.left - p
    if p > interval.right:
        return p - interval.right
    return 0.0


def pair_separation_ok(j_interval: DyadicInterval, i_interval: DyadicInterval) -> bool:
    """dist(J, boundary of I) >= |I|^3/4 |J|^1/4 for one specific pair with
    J inside the longer I: the condition the paraproduct family Phi imposes."""
    t = i_interval.length ** 0.75 * j_interval.length ** 0.25
    d = min(
        _point_interval_distance(i_interval.left, j_interval),
        _point_interval_distance(i_interval.right, j_interval),
    )
    return d >= t


def split_good_bad(coeffs: HaarCoefficients, other: ShiftedLattice,
                   cfg: GoodBadConfig) -> tuple[HaarCoefficients, HaarCoefficients]:
    """Split an expansion into (good, bad): bad carries exactly the entries on
    essentially-bad intervals, good keeps the rest plus the top term."""
    good_entries: dict[DyadicInterval, float] = {}
    bad_entries: dict[DyadicInterval, float] = {}
    for iv, c in coeffs.entries.items():
        if classify(iv, other, cfg).essentially_bad:
            bad_entries[iv] = c
        else:
            good_entries[iv] = c
    good = HaarCoefficients(coeffs.lattice, coeffs.root, coeffs.base, coeffs.top, good_entries)
    bad = HaarCoefficients(coeffs.lattice, coeffs.root, coeffs.base, 0.0, bad_entries)
    return good, bad


# ---------------------------------------------------------------------------
# Monte-Carlo sweeps

@dataclass(frozen=True)
class BadProbabilityGeometry:
    """Fixed lattice placement of the probed interval: scale 2^-depth, anchored
    half a unit into the root so it sits inside [1/4+w, 3/4+w] for every shift."""

    depth: int = 42

    def __post_init__(self):
        if self.depth < 1:
            raise ValidationError("geometry depth must be >= 1")


def _max_violating_gap_matrix(omega1: np.ndarray, omega2: np.ndarray,
                              depth: int, cfg: GoodBadConfig,
                              top_scale: int = 0) -> np.ndarray:
    """(samples, gaps) boolean matrix: gap j violates the separation.

    Works on the grid of boundary-plus-midpoint points of all candidate J at
    each scale (spacing |J|/2), which is equivalent to scanning the nearest
    candidates individually.
    """
    n = omega1.size
    i_len = 2.0 ** (-depth)
    left = omega1 + 0.5
    max_gap = min(cfg.scale_cap - 1, top_scale + depth)
    out = np.zeros((n, max_gap + 1), dtype=bool)
    for j in range(0, max_gap + 1):
        s = -depth + j
        h = 2.0 ** (s - 1)  # e-point grid spacing
        threshold = _badness_threshold(2.0 ** s, i_len)
        phase = np.mod(left - omega2, h)
        below = phase                      # distance down to the nearest grid point
        above = h - phase - i_len          # distance from the right end up to the next
        dist = np.minimum(below, np.maximum(above, 0.0))
        dist[above <= 0.0] = 0.0           # grid point inside the interval
        out[:, j] = dist < threshold
    return out


def _chunked(count: int, chunk: int = 2048):
    start = 0
    while start < count:
        yield start, min(start + chunk, count)
        start += chunk


def bad_probability_sweep(rs: Sequence[int], geometry: BadProbabilityGeometry,
                          cfg: GoodBadConfig, samples: int, seed: int) -> list[dict]:
    """Monte-Carlo frequency of essential badness for each r, with binomial
    standard errors.  Deterministic per seed and independent of thread count
    (chunks are fixed and counts merge by integer sums)."""
    if samples < 100:
        raise ValidationError("need at least 100 samples")
    pairs = sample_shift_pairs(seed, samples)
    rs = list(rs)
    counts = {r: 0 for r in rs}

    def work(bounds: tuple[int, int]) -> dict[int, int]:
        a, b = bounds
        viol = _max_violating_gap_matrix(pairs[a:b, 0], pairs[a:b, 1], geometry.depth, cfg)
        local = {}
        for r in rs:
            if r >= viol.shape[1]:
                local[r] = 0
            else:
                local[r] = int(np.any(viol[:, r:], axis=1).sum())
        return local

    results = _parallel_ordered(work, list(_chunked(samples)))
    for local in results:
        for r in rs:
            counts[r] += local[r]
    rows = []
    for r in rs:
        p = counts[r] / samples
        stderr = math.sqrt(max(p * (1.0 - p), 0.0) / samples)
        rows.append({"r": r, "estimate": p, "stderr": stderr, "samples": samples, "seed": seed})
    return rows


def estimate_bad_probability(geometry: BadProbabilityGeometry, cfg: GoodBadConfig,
                             samples: int, seed: int) -> tuple[float, float]:
    row = bad_probability_sweep([cfg.r], geometry, cfg, samples, seed)[0]
    return row["estimate"], row["stderr"]


def _parallel_ordered(fn, items):
    """Map fn over items, preserving order; honors CORONA_LAB_THREADS."""
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def epsilon_r_sweep(f: WeightedFunction, rs: Sequence[int], cfg: GoodBadConfig,
                    samples: int, seed: int) -> list[dict]:
    """Monte-Carlo estimate of E ||f_bad|| / ||f|| for each r.

    The function is mean-subtracted first (the top term never enters the bad
    part), support must sit inside [1/4, 3/4] so the scale-0 root of every
    shifted lattice contains it.
    """
    mu = f.base
    if mu.positions[0] < 0.25 or mu.positions[-1] > 0.75:
        raise ValidationError("epsilon sweep expects support inside [1/4, 3/4]")
    f0 = f.mean_zero()
    if f0.norm_sq <= 0:
        raise ValidationError("epsilon sweep needs a function with positive norm")
    pairs = sample_shift_pairs(seed, samples)
    rs = list(rs)
    scale_min = -(cfg.scale_cap + 16)

    def work(bounds: tuple[int, int]) -> np.ndarray:
        a, b = bounds
        acc = np.zeros((len(rs), 2))  # per r: sum of ratios, sum of squared ratios
        for w1, w2 in pairs[a:b]:
            lat1 = ShiftedLattice(float(w1), scale_min, 0)
            lat2 = ShiftedLattice(float(w2), scale_min, 0)
            coeffs = decompose(f0, lat1, standard_root(lat1.shift))
            if not coeffs.entries:
                continue
            ivs = list(coeffs.entries.keys())
            c2 = np.array([coeffs.entries[iv] ** 2 for iv in ivs])
            total = float(c2.sum())
            if total <= 0:
                continue
            max_gap = np.full(len(ivs), -1)
            for k, iv in enumerate(ivs):
                gaps = violating_gaps(iv, lat2, cfg)
                if gaps:
                    max_gap[k] = max(j for j, _ in gaps)
            for ridx, r in enumerate(rs):
                bad_mass = float(c2[max_gap >= r].sum())
                ratio = math.sqrt(bad_mass / total)
                acc[ridx, 0] += ratio
                acc[ridx, 1] += ratio * ratio
        return acc

    chunks = list(_chunked(samples, chunk=256))
    acc = np.zeros((len(rs), 2))
    for part in _parallel_ordered(work, chunks):
        acc += part
    rows = []
    for ridx, r in enumerate(rs):
        mean = acc[ridx, 0] / samples
        var = max(acc[ridx, 1] / samples - mean * mean, 0.0)
        rows.append({
            "r": r,
            "estimate": mean,
            "stderr": math.sqrt(var / samples),
            "samples": samples,
            "seed": seed,
        })
    return rows


def estimate_epsilon_r(f: WeightedFunction, cfg: GoodBadConfig,
                       samples: int, seed: int) -> tuple[float, float]:
    row = epsilon_r_sweep(f, [cfg.r], cfg, samples, seed)[0]
    return row["estimate"], row["stderr"]
