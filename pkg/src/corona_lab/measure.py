"""Finite positive atomic measures on the line and functions on their atoms.

Everything downstream (kernels, Haar systems, stopping trees) is computed
against measures of this kind, so the suprema over "all intervals" that the
constants modules evaluate collapse to finite enumerations produced by
:func:`canonical_intervals`.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Atom",
    "DiscreteMeasure",
    "WeightedFunction",
    "Interval",
    "MeasureFormatError",
    "ValidationError",
    "load_measure",
    "loads_measure",
    "save_measure",
    "generate_measure",
    "mass",
    "canonical_intervals",
    "tight_intervals",
    "subset_interval_ranges",
    "common_atom_positions",
    "combined_positions",
]


class MeasureFormatError(ValueError):
    """Raised when a measure file cannot be parsed."""


class ValidationError(ValueError):
    """Raised when data violates a measure invariant (e.g. weight <= 0)."""


@dataclass(frozen=True)
class Atom:
    position: float
    weight: float

    def __post_init__(self):
        if not math.isfinite(self.position):
            raise ValidationError(f"atom position must be finite, got {self.position}")
        if not (self.weight > 0) or not math.isfinite(self.weight):
            raise ValidationError(f"atom weight must be > 0 and finite, got {self.weight}")


@dataclass(frozen=True)
class Interval:
    """Real interval with explicit endpoint flags; atomic measures need them."""

    left: float
    right: float
    closed_left: bool = True
    closed_right: bool = True

    def __post_init__(self):
        if self.right < self.left:
            raise ValidationError(f"interval endpoints out of order: [{self.left}, {self.right}]")

    @property
    def length(self) -> float:
        return self.right - self.left

    @property
    def center(self) -> float:
        return 0.5 * (self.left + self.right)


class DiscreteMeasure:
    """Finite positive atomic measure: strictly increasing positions, positive weights."""

    __slots__ = ("positions", "weights", "label", "_prefix", "_poslist")

    def __init__(self, positions: Iterable[float], weights: Iterable[float], label: str = ""):
        pos = np.asarray(list(positions), dtype=float)
        wts = np.asarray(list(weights), dtype=float)
        if pos.shape != wts.shape or pos.ndim != 1:
            raise ValidationError("positions and weights must be 1-d sequences of equal length")
        if pos.size == 0:
            raise ValidationError("a measure needs at least one atom")
        if not np.all(np.isfinite(pos)):
            raise ValidationError("atom positions must be finite")
        if np.any(wts <= 0) or not np.all(np.isfinite(wts)):
            raise ValidationError("atom weights must be > 0 and finite")
        order = np.argsort(pos, kind="stable")
        pos, wts = pos[order], wts[order]
        # merge duplicates at identical positions by summing weights
        if pos.size > 1 and np.any(np.diff(pos) == 0):
            keep = np.concatenate(([True], np.diff(pos) != 0))
            idx = np.cumsum(keep) - 1
            merged = np.zeros(int(idx[-1]) + 1)
            np.add.at(merged, idx, wts)
            pos, wts = pos[keep], merged
        self.positions = pos
        self.weights = wts
        self.label = label
        self._prefix = np.concatenate(([0.0], np.cumsum(wts)))
        self._poslist = pos.tolist()

    def __len__(self) -> int:
        return int(self.positions.size)

    def __repr__(self) -> str:
        return f"DiscreteMeasure({len(self)} atoms, mass={self.total_mass:.6g}, label={self.label!r})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiscreteMeasure)
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.weights, other.weights)
            and self.label == other.label
        )

    @property
    def total_mass(self) -> float:
        return float(self._prefix[-1])

    @property
    def atoms(self) -> list[Atom]:
        return [Atom(float(x), float(w)) for x, w in zip(self.positions, self.weights)]

    def range_mass(self, lo_idx: int, hi_idx: int) -> float:
        """Mass of atoms with index in [lo_idx, hi_idx)."""
        return float(self._prefix[hi_idx] - self._prefix[lo_idx])

    def index_range(self, interval: Interval) -> tuple[int, int]:
        """Atom index half-open range [lo, hi) falling inside `interval`."""
        if interval.closed_left:
            lo = bisect.bisect_left(self._poslist, interval.left)
        else:
            lo = bisect.bisect_right(self._poslist, interval.left)
        if interval.closed_right:
            hi = bisect.bisect_right(self._poslist, interval.right)
        else:
            hi = bisect.bisect_left(self._poslist, interval.right)
        return lo, max(lo, hi)

    def mass(self, interval: Interval) -> float:
        lo, hi = self.index_range(interval)
        return self.range_mass(lo, hi)

    def translate_scale(self, scale: float, offset: float, weight_scale: float = 1.0,
                        label: str | None = None) -> "DiscreteMeasure":
        """New measure with positions scale*x + offset and weights weight_scale*w."""
        if scale == 0:
            raise ValidationError("scale must be nonzero")
        pos = self.positions * scale + offset
        if scale < 0:
            pos = pos[::-1]
            wts = self.weights[::-1] * weight_scale
        else:
            wts = self.weights * weight_scale
        return DiscreteMeasure(pos, wts, self.label if label is None else label)


def mass(measure: DiscreteMeasure, interval: Interval) -> float:
    """mu(I) with the interval's endpoint flags respected."""
    return measure.mass(interval)


@dataclass
class WeightedFunction:
    """Function living on the atoms of its base measure (an element of L2(mu))."""

    base: DiscreteMeasure
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.base.positions.shape:
            raise ValidationError("values length must equal the atom count of the base measure")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("function values must be finite")
        self.values = vals

    @property
    def norm_sq(self) -> float:
        return float(np.dot(self.values * self.values, self.base.weights))

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_sq)

    def integral(self) -> float:
        return float(np.dot(self.values, self.base.weights))

    def mean_zero(self) -> "WeightedFunction":
        """Subtract the mu-average so the top (global average) coefficient vanishes."""
        avg = self.integral() / self.base.total_mass
        return WeightedFunction(self.base, self.values - avg)


# ---------------------------------------------------------------------------
# File I/O.  Format: {"label": str, "atoms": [{"x": number, "w": number}, ...]}

def loads_measure(text: str, label_fallback: str = "") -> DiscreteMeasure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "atoms" not in doc:
        raise MeasureFormatError('measure document must be an object with an "atoms" array')
    atoms = doc["atoms"]
    if not isinstance(atoms, list) or not atoms:
        raise MeasureFormatError('"atoms" must be a non-empty array')
    xs, ws = [], []
    for i, a in enumerate(atoms):
        if not isinstance(a, dict) or "x" not in a or "w" not in a:
            raise MeasureFormatError(f'atom #{i} must be an object with "x" and "w"')
        x, w = a["x"], a["w"]
        if not isinstance(x, (int, float)) or not isinstance(w, (int, float)):
            raise MeasureFormatError(f'atom #{i}: "x" and "w" must be numbers')
        if not w > 0:
            raise ValidationError(f"atom #{i}: weight must be > 0, got {w}")
        xs.append(float(x))
        ws.append(float(w))
    label = doc.get("label", label_fallback)
    if not isinstance(label, str):
        raise MeasureFormatError('"label" must be a string')
    return DiscreteMeasure(xs, ws, label)


def load_measure(path) -> DiscreteMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return loads_measure(text, label_fallback=str(path))


def dumps_measure(measure: DiscreteMeasure) -> str:
    doc = {
        "label": measure.label,
        "atoms": [{"x": float(x), "w": float(w)} for x, w in zip(measure.positions, measure.weights)],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_measure(measure: DiscreteMeasure, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_measure(measure))


# ---------------------------------------------------------------------------
# Generators.  Deterministic per (spec, seed); the test ensembles come from here.

_GENERATORS = ("uniform-random", "lacunary", "cantor", "single-atom", "adversarial-clustered")


def _cantor_left_endpoints(depth: int) -> list[float]:
    pts = [0.0]
    width = 1.0
    for _ in range(depth):
        width /= 3.0
        pts = [p for p in pts] + [p + 2 * width for p in pts]
    return sorted(pts)


def generate_measure(generator: str, params: dict | None = None, seed: int = 0,
                     label: str | None = None) -> DiscreteMeasure:
    """Build a measure from a named generator, reproducibly for a given seed.

    Generators:
      uniform-random(n)            -- n atoms, positions uniform on [0,1],
                                      weights log-uniform in [0.1, 10]
      lacunary(n)                  -- atoms at 2^-k, k = 1..n, weights 1/n
      cantor(depth)                -- 2^depth equal atoms at the left endpoints
                                      of the depth-d Cantor construction
      single-atom(x, w)            -- one atom
      adversarial-clustered(clusters, per_cluster) -- geometric clusters with
                                      strong weight contrast
    """
    params = dict(params or {})
    if generator not in _GENERATORS:
        raise ValidationError(f"unknown generator {generator!r}; choose from {_GENERATORS}")
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, 0xC0120]))
    name = label if label is not None else f"{generator}:{seed}"

    if generator == "single-atom":
        x = float(params.get("x", 0.0))
        w = float(params.get("w", 1.0))
        return DiscreteMeasure([x], [w], name)

    if generator == "lacunary":
        n = int(params.get("n", 8))
        if n < 1:
            raise ValidationError("lacunary: n must be >= 1")
        pos = [2.0 ** (-k) for k in range(1, n + 1)]
        return DiscreteMeasure(pos, [1.0 / n] * n, name)

    if generator == "cantor":
        depth = int(params.get("depth", 3))
        if depth < 0:
            raise ValidationError("cantor: depth must be >= 0")
        pts = _cantor_left_endpoints(depth)
        w = 2.0 ** (-depth)
        return DiscreteMeasure(pts, [w] * len(pts), name)

    if generator == "uniform-random":
        n = int(params.get("n", 16))
        if n < 1:
            raise ValidationError("uniform-random: n must be >= 1")
        pos = rng.uniform(0.0, 1.0, size=n)
        wts = 10.0 ** rng.uniform(-1.0, 1.0, size=n)
        return DiscreteMeasure(pos, wts, name)

    # adversarial-clustered
    clusters = int(params.get("clusters", 4))
    per = int(params.get("per_cluster", 6))
    if clusters < 1 or per < 1:
        raise ValidationError("adversarial-clustered: clusters and per_cluster must be >= 1")
    centers = np.sort(rng.uniform(0.0, 1.0, size=clusters))
    pos, wts = [], []
    for c in centers:
        scale = 10.0 ** rng.uniform(-6.0, -2.0)
        offsets = scale * (4.0 ** (-np.arange(per, dtype=float)))
        base = 10.0 ** rng.uniform(-2.0, 2.0)
        decay = 10.0 ** rng.uniform(-1.0, 0.0)
        pos.extend((c + offsets).tolist())
        wts.extend((base * decay ** np.arange(per, dtype=float)).tolist())
    return DiscreteMeasure(pos, wts, name)


# ---------------------------------------------------------------------------
# Canonical interval families for the "forall I subset R" suprema.

def combined_positions(mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    return np.unique(np.concatenate([mu.positions, nu.positions]))


def common_atom_positions(mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    """Positions carrying an atom of both measures (exact coincidence)."""
    return np.intersect1d(mu.positions, nu.positions)


def _gap_midpoints(points: np.ndarray) -> np.ndarray:
    """m points -> m+1 delimiters: outer margins plus interior gap midpoints."""
    if points.size == 1:
        pad = 1.0
    else:
        pad = 0.5 * (points[-1] - points[0])
        pad = pad if pad > 0 else 1.0
    inner = 0.5 * (points[1:] + points[:-1])
    return np.concatenate(([points[0] - pad], inner, [points[-1] + pad]))


def subset_interval_ranges(points: np.ndarray) -> list[tuple[int, int]]:
    """All contiguous index runs [i, j) of a sorted point set, i < j."""
    m = points.size
    return [(i, j) for i in range(m) for j in range(i + 1, m + 1)]


def tight_intervals(mu: DiscreteMeasure, nu: DiscreteMeasure) -> list[Interval]:
    """Closed intervals [u_i, u_j], i < j, over the combined support positions."""
    u = combined_positions(mu, nu)
    return [Interval(float(u[i]), float(u[j])) for i in range(u.size) for j in range(i + 1, u.size)]


def canonical_intervals(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[list[Interval], list[Interval]]:
    """(subset representatives, tight representatives) for interval suprema.

    Subset representatives carve the combined support at gap midpoints: one
    closed interval per contiguous run of combined atoms, so any supremum that
    depends on atom content only is attained on this family.  Tight
    representatives are the closed hulls [u_i, u_j] of position pairs; suprema
    with |I| in a denominator are attained there.
    """
    u = combined_positions(mu, nu)
    cuts = _gap_midpoints(u)
    subset = [
        Interval(float(cuts[i]), float(cuts[j]))
        for i in range(cuts.size)
        for j in range(i + 1, cuts.size)
    ]
    return subset, tight_intervals(mu, nu)
