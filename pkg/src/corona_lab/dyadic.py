"""Shifted dyadic lattices: half-open intervals [w + n*2^k, w + (n+1)*2^k).

A lattice is a rigid shift of the standard dyadic grid by w in [-1/4, 1/4];
pairs of shifts are sampled uniformly from the square, which is the
probability space behind all good/bad Monte-Carlo estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import DiscreteMeasure, Interval, ValidationError

SHIFT_RANGE = 0.25  # shifts live in [-1/4, 1/4]


@dataclass(frozen=True)
class DyadicInterval:
    """I = [shift + index*2^scale, shift + (index+1)*2^scale), half-open."""

    scale: int
    index: int
    shift: float

    @property
    def length(self) -> float:
        return 2.0 ** self.scale

    @property
    def left(self) -> float:
        return self.shift + self.index * 2.0 ** self.scale

    @property
    def right(self) -> float:
        return self.shift + (self.index + 1) * 2.0 ** self.scale

    @property
    def center(self) -> float:
        # one fused expression in the (index, scale) coordinates avoids
        # accumulating error from left/right rounding separately
        return self.shift + (2 * self.index + 1) * 2.0 ** (self.scale - 1)

    def contains_point(self, x: float) -> bool:
        return self.left <= x < self.right

    def contains(self, other: "DyadicInterval") -> bool:
        """Set containment; works across lattices with different shifts."""
        if other.shift == self.shift:
            if other.scale > self.scale:
                return False
            return (other.index >> (self.scale - other.scale)) == self.index
        return self.left <= other.left and other.right <= self.right

    def parent(self) -> "DyadicInterval":
        return DyadicInterval(self.scale + 1, self.index >> 1, self.shift)

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        return (
            DyadicInterval(self.scale - 1, 2 * self.index, self.shift),
            DyadicInterval(self.scale - 1, 2 * self.index + 1, self.shift),
        )

    def as_interval(self, closed_right: bool = False) -> Interval:
        return Interval(self.left, self.right, closed_left=True, closed_right=closed_right)

    def closed(self) -> Interval:
        return Interval(self.left, self.right)


@dataclass(frozen=True)
class ShiftedLattice:
    shift: float
    scale_min: int
    scale_max: int

    def __post_init__(self):
        if abs(self.shift) > SHIFT_RANGE:
            raise ValidationError(f"lattice shift must lie in [-1/4, 1/4], got {self.shift}")
        if self.scale_min > self.scale_max:
            raise ValidationError("scale_min must not exceed scale_max")

    def interval(self, scale: int, index: int) -> DyadicInterval:
        return DyadicInterval(scale, index, self.shift)


@dataclass(frozen=True)
class ShiftPair:
    omega1: float
    omega2: float
    seed: int

    def __post_init__(self):
        for w in (self.omega1, self.omega2):
            if abs(w) > SHIFT_RANGE:
                raise ValidationError(f"shift {w} outside [-1/4, 1/4]")


def locate(lattice: ShiftedLattice, x: float, scale: int) -> DyadicInterval:
    """The unique half-open lattice interval of the given scale containing x."""
    if not (lattice.scale_min <= scale <= lattice.scale_max):
        raise ValidationError(f"scale {scale} outside lattice range "
                              f"[{lattice.scale_min}, {lattice.scale_max}]")
    n = math.floor((x - lattice.shift) / 2.0 ** scale)
    iv = DyadicInterval(scale, n, lattice.shift)
    # guard the floor against boundary rounding
    if x < iv.left:
        iv = DyadicInterval(scale, n - 1, lattice.shift)
    elif x >= iv.right:
        iv = DyadicInterval(scale, n + 1, lattice.shift)
    return iv


def sample_shift_pair(seed: int) -> ShiftPair:
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, 0x5F17]))
    w1, w2 = rng.uniform(-SHIFT_RANGE, SHIFT_RANGE, size=2)
    return ShiftPair(float(w1), float(w2), seed)


def sample_shift_pairs(seed: int, count: int) -> np.ndarray:
    """(count, 2) array of uniform shift pairs, deterministic per seed."""
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, 0x5F17]))
    return rng.uniform(-SHIFT_RANGE, SHIFT_RANGE, size=(count, 2))


def special_points(j: DyadicInterval) -> tuple[float, float, float]:
    """Boundary plus midpoint: the point set whose proximity makes intervals bad."""
    return (j.left, j.center, j.right)


def tree_distance(inner: DyadicInterval, outer: DyadicInterval) -> int:
    """Generations between nested intervals of one lattice (0 for equal)."""
    if inner.shift != outer.shift:
        raise ValidationError("tree distance requires intervals of the same lattice")
    if outer.contains(inner):
        return outer.scale - inner.scale
    if inner.contains(outer):
        return inner.scale - outer.scale
    raise ValidationError("tree distance requires one interval to contain the other")


def point_to_closed_interval_distance(p: float, left: float, right: float) -> float:
    if p < left:
        return left - p
    if p > right:
        return p - right
    return 0.0


def dist_special_points(j: DyadicInterval, i: DyadicInterval) -> float:
    """min over e(J) = {ends, midpoint} of the distance to the closed interval I."""
    il, ir = i.left, i.right
    return min(point_to_closed_interval_distance(p, il, ir) for p in special_points(j))


@dataclass
class LatticeNode:
    """Dyadic interval holding at least one point, with its live children."""

    interval: DyadicInterval
    lo: int
    hi: int
    depth: int
    children: list["LatticeNode"]

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    @property
    def count(self) -> int:
        return self.hi - self.lo


def build_lattice_tree(positions: np.ndarray, root: DyadicInterval, max_depth: int,
                       stop_at_single: bool = False) -> LatticeNode | None:
    """Tree of dyadic intervals under `root` that contain >= 1 of the sorted
    `positions`, down to `max_depth` generations below the root.

    With stop_at_single=True, recursion ends once an interval isolates a
    single point.  Returns None when no point lies in the (half-open) root.
    """
    import bisect

    poslist = positions.tolist()
    lo0 = bisect.bisect_left(poslist, root.left)
    hi0 = bisect.bisect_left(poslist, root.right)
    if hi0 <= lo0:
        return None

    def recurse(interval: DyadicInterval, lo: int, hi: int, depth: int) -> LatticeNode:
        node = LatticeNode(interval, lo, hi, depth, [])
        if depth >= max_depth or (stop_at_single and hi - lo <= 1):
            return node
        mid = bisect.bisect_left(poslist, interval.center, lo, hi)
        left_child, right_child = interval.children()
        if mid > lo:
            node.children.append(recurse(left_child, lo, mid, depth + 1))
        if hi > mid:
            node.children.append(recurse(right_child, mid, hi, depth + 1))
        return node

    return recurse(root, lo0, hi0, 0)


def scale_window(mu: DiscreteMeasure, nu: DiscreteMeasure | None = None,
                 pad: int = 2) -> tuple[int, int]:
    """Data-driven scale range: below the floor every interval holds <= 1 atom,
    above the cap a single interval holds the whole support."""
    if nu is None:
        pts = mu.positions
    else:
        pts = np.unique(np.concatenate([mu.positions, nu.positions]))
    diam = float(pts[-1] - pts[0]) if pts.size > 1 else 1.0
    gaps = np.diff(pts)
    gaps = gaps[gaps > 0]
    min_gap = float(gaps.min()) if gaps.size else diam
    if diam <= 0:
        diam = 1.0
    if min_gap <= 0:
        min_gap = diam
    k_min = math.ceil(math.log2(min_gap)) - pad
    k_max = math.ceil(math.log2(diam)) + pad
    return k_min, max(k_min, k_max)
