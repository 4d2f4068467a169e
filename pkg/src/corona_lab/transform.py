"""Discrete two-weight Hilbert transform kernel, Poisson extensions, the
maximal function, and the unit-circle (Blaschke / Cauchy kernel) objects.

Line kernel: (1/pi) * (y - x) / ((y - x)^2 + delta^2), rows indexed by target
atoms, columns by source atoms; delta = 0 uses the principal-value convention
(coincident atoms get entry 0 and the matrix is flagged).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .measure import DiscreteMeasure, Interval, ValidationError, WeightedFunction, common_atom_positions

__all__ = [
    "KernelMatrix",
    "HalfPlanePoint",
    "hilbert_matrix",
    "apply_hilbert",
    "apply_hilbert_range_prefix",
    "poisson_point",
    "poisson_interval",
    "poisson_kernel_weights",
    "maximal_value",
    "blaschke_factor",
    "blaschke_identity_residual",
    "cauchy_matrix_circle",
    "circle_poisson",
    "poisson_height_kernel_matrix",
]

INV_PI = 1.0 / math.pi


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0):
            raise ValidationError(f"half-plane point needs y > 0, got {self.y}")


@dataclass
class KernelMatrix:
    source: DiscreteMeasure
    target: DiscreteMeasure
    entries: np.ndarray = field(repr=False)  # (len(target), len(source))
    regularization: float = 0.0
    coincident_flagged: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def hilbert_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure, delta: float = 0.0) -> KernelMatrix:
    """Kernel matrix of H_mu from L2(mu) to L2(nu)."""
    if delta < 0:
        raise ValidationError("regularization delta must be >= 0")
    diff = nu.positions[:, None] - mu.positions[None, :]
    flagged = False
    if delta == 0.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            entries = INV_PI / diff
        zero = diff == 0.0
        if np.any(zero):
            entries[zero] = 0.0  # principal-value convention on coincident atoms
            flagged = True
    else:
        entries = INV_PI * diff / (diff * diff + delta * delta)
    return KernelMatrix(mu, nu, entries, delta, flagged)


def apply_hilbert(kernel: KernelMatrix, f: WeightedFunction) -> WeightedFunction:
    if f.base is not kernel.source and f.base != kernel.source:
        raise ValidationError("function base must equal the kernel source measure")
    values = kernel.entries @ (f.values * kernel.source.weights)
    return WeightedFunction(kernel.target, values)


def apply_hilbert_range_prefix(kernel: KernelMatrix) -> np.ndarray:
    """Prefix sums P with P[:, j] = sum over source atoms < j of entry*weight,
    so H_mu(chi over source index range [lo, hi)) = P[:, hi] - P[:, lo]."""
    kw = kernel.entries * kernel.source.weights[None, :]
    out = np.zeros((kernel.entries.shape[0], kernel.entries.shape[1] + 1))
    np.cumsum(kw, axis=1, out=out[:, 1:])
    return out


# ---------------------------------------------------------------------------
# Poisson extensions

def poisson_point(sigma: DiscreteMeasure, z: HalfPlanePoint) -> float:
    """P_sigma(z) = (1/pi) * sum of y/((x - t)^2 + y^2) * w over atoms (t, w)."""
    d = z.x - sigma.positions
    return INV_PI * float(np.dot(z.y / (d * d + z.y * z.y), sigma.weights))


def poisson_interval(sigma: DiscreteMeasure, interval: Interval) -> float:
    """Poisson integral at the point (center(I), |I|); the interval form used
    by the stopping criterion and the pivotal sums."""
    if not (interval.length > 0):
        raise ValidationError("poisson_interval needs a nondegenerate interval")
    return poisson_point(sigma, HalfPlanePoint(interval.center, interval.length))


def poisson_kernel_weights(sigma: DiscreteMeasure, center: float, length: float) -> np.ndarray:
    """Per-atom kernel values (1/pi) * length/(length^2 + (center-t)^2) * w;
    prefix sums of this array evaluate P_I over source index ranges in O(1)."""
    d = center - sigma.positions
    return INV_PI * (length / (length * length + d * d)) * sigma.weights


# ---------------------------------------------------------------------------
# Maximal function

def maximal_value(mu: DiscreteMeasure, f: WeightedFunction, x: float) -> float:
    """M_mu f(x) = sup over closed intervals containing x of (1/|I|) int_I |f| dmu.

    The supremum is attained with endpoints in (atom positions union {x}); if x
    sits exactly on an atom where |f| > 0 the shrinking-interval limit is
    +infinity (returned as math.inf).
    """
    if f.base is not mu and f.base != mu:
        raise ValidationError("maximal_value: f must live on mu")
    pos = mu.positions
    absfw = np.abs(f.values) * mu.weights
    prefix = np.concatenate(([0.0], np.cumsum(absfw)))
    hit = np.searchsorted(pos, x)
    if hit < pos.size and pos[hit] == x and absfw[hit] > 0:
        return math.inf
    lefts = np.concatenate((pos[pos <= x], [x]))
    rights = np.concatenate(([x], pos[pos >= x]))
    best = 0.0
    for left in lefts:
        lo = np.searchsorted(pos, left, side="left")
        for right in rights:
            if right <= left:
                continue
            hi = np.searchsorted(pos, right, side="right")
            m = prefix[hi] - prefix[lo]
            if m > 0:
                best = max(best, m / (right - left))
    return best


def maximal_values_for_indicator(mu: DiscreteMeasure, lo: int, hi: int,
                                 targets: np.ndarray) -> np.ndarray:
    """Vector of M_mu(chi_R)(y) over target points y, where R is the atom index
    range [lo, hi) of mu.  Vectorized over the candidate endpoint grid; +inf
    where y coincides with an atom of R."""
    pos = mu.positions[lo:hi]
    if pos.size == 0:
        return np.zeros(targets.shape)
    prefix = np.concatenate(([0.0], np.cumsum(mu.weights[lo:hi])))
    out = np.zeros(targets.shape)
    for t_idx, y in enumerate(np.asarray(targets, dtype=float)):
        k = np.searchsorted(pos, y)
        if k < pos.size and pos[k] == y:
            out[t_idx] = math.inf
            continue
        lefts = np.concatenate((pos[:k], [y]))
        l_idx = np.concatenate((np.arange(k), [k]))
        rights = np.concatenate(([y], pos[k:]))
        r_idx = np.concatenate(([k], np.arange(k, pos.size) + 1))
        span = rights[None, :] - lefts[:, None]
        massm = prefix[r_idx][None, :] - prefix[l_idx][:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(span > 0, massm / span, 0.0)
        out[t_idx] = float(ratio.max()) if ratio.size else 0.0
    return out


# ---------------------------------------------------------------------------
# Circle objects

def blaschke_factor(a: complex, z: complex) -> complex:
    return (z - a) / (1.0 - a.conjugate() * z)


def blaschke_identity_residual(a: complex, zeta: complex, z: complex) -> float:
    """| (1 - conj(b_a(zeta)) b_a(z)) / (1 - conj(zeta) z)
         - (1-|a|^2) / ((1 - a conj(zeta)) (1 - conj(a) z)) |."""
    if abs(a) >= 1:
        raise ValidationError("blaschke parameter must satisfy |a| < 1")
    denom = 1.0 - zeta.conjugate() * z
    if denom == 0:
        raise ValidationError("degenerate pair: zeta equals z")
    lhs = (1.0 - blaschke_factor(a, zeta).conjugate() * blaschke_factor(a, z)) / denom
    rhs = (1.0 - abs(a) ** 2) / ((1.0 - a * zeta.conjugate()) * (1.0 - a.conjugate() * z))
    return abs(lhs - rhs)


def _unit_circle(points: np.ndarray) -> np.ndarray:
    return np.exp(1j * points)


def cauchy_matrix_circle(mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    """Kernel matrix (1/2pi) / (1 - conj(zeta_i) z_j) of the circle transform,
    rows = nu atoms (angles), columns = mu atoms (angles).  Supports must not
    share an angle (the transform is not pinned down there)."""
    if common_atom_positions(mu, nu).size:
        raise ValidationError("circle kernel requires disjoint supports (no common angles)")
    zeta = _unit_circle(mu.positions)
    z = _unit_circle(nu.positions)
    return (0.5 * INV_PI) / (1.0 - zeta.conjugate()[None, :] * z[:, None])


def circle_poisson(sigma: DiscreteMeasure, a: complex) -> float:
    """P_sigma(a) = (1/2pi) int (1-|a|^2)/|1 - conj(a) z|^2 dsigma(z), atoms as angles."""
    if abs(a) >= 1:
        raise ValidationError("circle Poisson point must lie in the open disc")
    z = _unit_circle(sigma.positions)
    kern = (1.0 - abs(a) ** 2) / np.abs(1.0 - np.conj(a) * z) ** 2
    return (0.5 * INV_PI) * float(np.dot(kern, sigma.weights))


def poisson_height_kernel_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure, y: float) -> np.ndarray:
    """Matrix of the height-y averaging kernel y/(y^2 + (t-s)^2) (no 1/pi),
    rows = nu atoms, columns = mu atoms."""
    if not (y > 0):
        raise ValidationError("height must be positive")
    d = nu.positions[:, None] - mu.positions[None, :]
    return y / (y * y + d * d)
