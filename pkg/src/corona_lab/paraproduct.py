"""Paraproducts over a stopping tree and their Carleson sequences.

Three operators act from L2(mu) to L2(nu):

  pi_{H chi_S}    averages of the argument against next-generation Haar
                  coefficients of H_mu(chi_S), inside one corona family
  pi_O            sum over stopping S of <f>_{mu,S} P_{nu,O_S}(H_mu chi_S);
                  the families are disjoint so its norm is an exact sum
  pi_Q            sum over stopping S of <f>_{mu,F(S)} P_{nu,Q_S}(H_mu chi_{S^ minus S})

P_{nu,F} projects onto the span of the good nu-Haar functions indexed by the
family F ("good" is the strong separation predicate throughout).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corona import CoronaFamilies, StoppingTree
from .dyadic import DyadicInterval, ShiftedLattice
from .goodbad import GoodBadConfig, good_weak, pair_separation_ok
from .haar import HaarCoefficients, decompose, reconstruct, standard_root
from .measure import DiscreteMeasure, ValidationError, WeightedFunction
from .transform import hilbert_matrix, apply_hilbert_range_prefix

__all__ = [
    "CarlesonSequence",
    "carleson_constant",
    "embedding_constant",
    "ParaproductContext",
    "first_paraproduct_apply",
    "carleson_sequence_aI",
    "carleson_sequences_corona",
    "pi_O_apply",
    "pi_Q_apply",
]


@dataclass
class CarlesonSequence:
    base: DiscreteMeasure
    weights: dict[DyadicInterval, float] = field(default_factory=dict)

    def __post_init__(self):
        for iv, w in self.weights.items():
            if w < 0:
                raise ValidationError(f"Carleson weight must be >= 0, got {w} at {iv}")

    def total(self) -> float:
        return sum(self.weights.values())


def carleson_constant(seq: CarlesonSequence, mu: DiscreteMeasure,
                      candidates: list[DyadicInterval] | None = None) -> float:
    """sup over intervals I with mu(I) > 0 of sum_{l subset I} seq[l] / mu(I).

    Candidates default to every dyadic ancestor-of-an-entry within the entry
    lattice (the supremum lives there: other intervals either capture the same
    entries at no smaller mass, or none at all).
    """
    if not seq.weights:
        return 0.0
    entries = list(seq.weights.items())
    if candidates is None:
        # ancestors of every entry up to their common hull; above it the sum
        # is constant while the mass can only grow, so the ratio only drops
        cand: set[DyadicInterval] = set(iv for iv, _ in entries)
        frontier = set(cand)
        while len(frontier) > 1:
            low = min(i.scale for i in frontier)
            nxt: set[DyadicInterval] = set()
            for i in frontier:
                if i.scale == low:
                    p = i.parent()
                    cand.add(p)
                    nxt.add(p)
                else:
                    nxt.add(i)
            frontier = nxt
        candidates = sorted(cand, key=lambda i: (i.scale, i.index))
    best = 0.0
    for big in candidates:
        m = mu.mass(big.as_interval())
        if m <= 0:
            continue
        s = sum(w for iv, w in entries if big.contains(iv))
        best = max(best, s / m)
    return best


def embedding_constant(seq: CarlesonSequence, mu: DiscreteMeasure,
                       tol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Largest eigenvalue of phi -> sum_I seq[I] <phi>_{mu,I}^2 on L2(mu).

    The form factors through rows sqrt(seq[I])/mu(I) * sqrt(w) chi_I, so the
    eigenvalue is the squared top singular value of that factor matrix,
    computed by the same deterministic power iteration as the operator norm.
    """
    from .constants import operator_norm_matrix

    if not seq.weights:
        return 0.0
    sqw = np.sqrt(mu.weights)
    rows = []
    for iv, a in seq.weights.items():
        if a == 0:
            continue
        lo, hi = mu.index_range(iv.as_interval(closed_right=False))
        m = mu.range_mass(lo, hi)
        if m <= 0:
            continue
        row = np.zeros(len(mu))
        row[lo:hi] = math.sqrt(a) / m * sqw[lo:hi]
        rows.append(row)
    if not rows:
        return 0.0
    result = operator_norm_matrix(np.vstack(rows), tol=tol, max_iter=max_iter)
    return result.value ** 2


# ---------------------------------------------------------------------------
# Workspace shared by the corona paraproducts

class ParaproductContext:
    """Caches the kernel prefix sums, the nu-Haar analysis of transformed
    indicators, and the goodness verdicts, for one (pair, tree, families)."""

    def __init__(self, mu: DiscreteMeasure, nu: DiscreteMeasure, tree: StoppingTree,
                 families: CoronaFamilies, lattice_mu: ShiftedLattice,
                 lattice_nu: ShiftedLattice, good_cfg: GoodBadConfig, r: int):
        self.mu = mu
        self.nu = nu
        self.tree = tree
        self.families = families
        self.lattice_mu = lattice_mu
        self.lattice_nu = lattice_nu
        self.good_cfg = good_cfg
        self.r = r
        self.kernel = hilbert_matrix(mu, nu)
        self.prefix = apply_hilbert_range_prefix(self.kernel)
        self.nu_root = standard_root(lattice_nu.shift)
        self._coeff_cache: dict[tuple[int, int, int, int], dict[DyadicInterval, float]] = {}
        self._good_cache: dict[DyadicInterval, bool] = {}
        self._mu_prefix = np.concatenate(([0.0], np.cumsum(mu.weights)))
        self._mu_fw_cache: np.ndarray | None = None

    # -- mu side helpers

    def mu_range(self, iv: DyadicInterval) -> tuple[int, int]:
        lo = int(np.searchsorted(self.mu.positions, iv.left, side="left"))
        hi = int(np.searchsorted(self.mu.positions, iv.right, side="left"))
        return lo, hi

    def mu_average(self, f: WeightedFunction, iv: DyadicInterval) -> float:
        lo, hi = self.mu_range(iv)
        m = self._mu_prefix[hi] - self._mu_prefix[lo]
        if m <= 0:
            return 0.0
        return float(np.dot(f.values[lo:hi], self.mu.weights[lo:hi])) / m

    # -- nu side helpers

    def hilbert_indicator(self, iv: DyadicInterval) -> np.ndarray:
        lo, hi = self.mu_range(iv)
        return self.prefix[:, hi] - self.prefix[:, lo]

    def hilbert_annulus(self, outer: DyadicInterval, inner: DyadicInterval) -> np.ndarray:
        """H_mu(chi_{outer minus inner}) on the nu atoms."""
        return self.hilbert_indicator(outer) - self.hilbert_indicator(inner)

    def nu_coefficients(self, values: np.ndarray, key: tuple | None = None) -> dict[DyadicInterval, float]:
        if key is not None and key in self._coeff_cache:
            return self._coeff_cache[key]
        coeffs = decompose(WeightedFunction(self.nu, values), self.lattice_nu, self.nu_root)
        if key is not None:
            self._coeff_cache[key] = coeffs.entries
        return coeffs.entries

    def good_nu(self, j: DyadicInterval) -> bool:
        v = self._good_cache.get(j)
        if v is None:
            v = good_weak(j, self.lattice_mu, self.good_cfg)
            self._good_cache[j] = v
        return v

    def family_mu(self, s: DyadicInterval) -> list[DyadicInterval]:
        return [iv for iv in self.families.family(s) if iv.shift == self.lattice_mu.shift]

    def family_nu(self, s: DyadicInterval) -> list[DyadicInterval]:
        return [iv for iv in self.families.family(s) if iv.shift == self.lattice_nu.shift]

    def q_family_nu(self, s: DyadicInterval) -> list[DyadicInterval]:
        return [iv for iv in self.families.q_family(s) if iv.shift == self.lattice_nu.shift]

    def synthesize(self, coeffs: dict[DyadicInterval, float]) -> WeightedFunction:
        holder = HaarCoefficients(self.lattice_nu, self.nu_root, self.nu, 0.0, coeffs)
        return reconstruct(holder, self.nu)

    def project_family(self, values: np.ndarray, family: list[DyadicInterval],
                       key: tuple | None = None) -> dict[DyadicInterval, float]:
        """Coefficients of the projection of `values` onto the good nu-Haar
        span of `family` (as a sparse coefficient dict)."""
        coeffs = self.nu_coefficients(values, key)
        out = {}
        for j in family:
            c = coeffs.get(j)
            if c is not None and self.good_nu(j):
                out[j] = c
        return out


def _phi_set(ctx: ParaproductContext, s: DyadicInterval, i: DyadicInterval) -> list[DyadicInterval]:
    """Good J in O_S of the nu lattice with J inside I at the mandated scale
    gap and separated from the boundary of I."""
    want_scale = i.scale - (ctx.r - 1)
    return [
        j for j in ctx.family_nu(s)
        if j.scale == want_scale and i.contains(j) and ctx.good_nu(j)
        and pair_separation_ok(j, i)
    ]


def first_paraproduct_apply(mu: DiscreteMeasure, nu: DiscreteMeasure, s: DyadicInterval,
                            ctx: ParaproductContext, phi: WeightedFunction) -> WeightedFunction:
    """pi_{H chi_S} phi = sum over I in O_S of <phi>_{mu,I} times the
    next-generation good Haar pieces of H_mu(chi_S) below I."""
    if s not in ctx.tree.node_map():
        raise ValidationError("S must be a stopping node")
    h_vals = ctx.hilbert_indicator(s)
    coeffs = ctx.nu_coefficients(h_vals, key=("chi", s.scale, s.index, 0))
    out: dict[DyadicInterval, float] = {}
    for i in ctx.family_mu(s):
        avg = ctx.mu_average(phi, i)
        if avg == 0.0:
            continue
        for j in _phi_set(ctx, s, i):
            c = coeffs.get(j)
            if c is not None:
                out[j] = out.get(j, 0.0) + avg * c
    return ctx.synthesize(out)


def carleson_sequence_aI(mu: DiscreteMeasure, nu: DiscreteMeasure, s: DyadicInterval,
                         ctx: ParaproductContext) -> CarlesonSequence:
    """a_I = sum over J in Phi(I) of the squared good nu-Haar coefficients of
    H_mu(chi_S), indexed by I in O_S of the mu lattice."""
    h_vals = ctx.hilbert_indicator(s)
    coeffs = ctx.nu_coefficients(h_vals, key=("chi", s.scale, s.index, 0))
    weights: dict[DyadicInterval, float] = {}
    for i in ctx.family_mu(s):
        a = 0.0
        for j in _phi_set(ctx, s, i):
            c = coeffs.get(j)
            if c is not None:
                a += c * c
        weights[i] = a
    return CarlesonSequence(mu, weights)


def carleson_sequences_corona(mu: DiscreteMeasure, nu: DiscreteMeasure, tree: StoppingTree,
                              ctx: ParaproductContext, j_max: int = 6
                              ) -> tuple[CarlesonSequence, list[CarlesonSequence]]:
    """b_S = squared norm of P_{nu,O_S}(H chi_S) per stopping node, and the
    exponentially decaying ladder a_j[S] = sum over stopping S' inside S at
    stopping distance j of |P_{nu,Q_{S'}} H(chi_{S^ minus S})|^2."""
    nodes = tree.nodes()
    b_weights: dict[DyadicInterval, float] = {}
    for node in nodes:
        s = node.interval
        proj = ctx.project_family(ctx.hilbert_indicator(s), ctx.family_nu(s),
                                  key=("chi", s.scale, s.index, 0))
        b_weights[s] = sum(c * c for c in proj.values())
    a_weights: list[dict[DyadicInterval, float]] = [{} for _ in range(j_max + 1)]
    non_root = [n for n in nodes if tree.stopping_father(n.interval) is not None]
    for node in non_root:
        s = node.interval
        father = tree.stopping_father(s)
        annulus = ctx.hilbert_annulus(father, s)
        key = ("ann", s.scale, s.index, 0)
        for desc in node.walk():
            j = desc.generation - node.generation  # stopping-tree distance
            if j > j_max:
                continue
            proj = ctx.project_family(annulus, ctx.q_family_nu(desc.interval), key=key)
            contribution = sum(c * c for c in proj.values())
            a_weights[j][s] = a_weights[j].get(s, 0.0) + contribution
    a_list = [CarlesonSequence(mu, w) for w in a_weights]
    return CarlesonSequence(mu, b_weights), a_list


def pi_O_apply(mu: DiscreteMeasure, nu: DiscreteMeasure, tree: StoppingTree,
               ctx: ParaproductContext, f: WeightedFunction) -> WeightedFunction:
    out: dict[DyadicInterval, float] = {}
    for node in tree.nodes():
        s = node.interval
        avg = ctx.mu_average(f, s)
        if avg == 0.0:
            continue
        proj = ctx.project_family(ctx.hilbert_indicator(s), ctx.family_nu(s),
                                  key=("chi", s.scale, s.index, 0))
        for j, c in proj.items():
            out[j] = out.get(j, 0.0) + avg * c
    return ctx.synthesize(out)


def pi_Q_apply(mu: DiscreteMeasure, nu: DiscreteMeasure, tree: StoppingTree,
               ctx: ParaproductContext, f: WeightedFunction) -> WeightedFunction:
    out: dict[DyadicInterval, float] = {}
    for node in tree.nodes():
        s = node.interval
        father = tree.stopping_father(s)
        if father is None:
            continue
        avg = ctx.mu_average(f, s.parent())
        if avg == 0.0:
            continue
        annulus = ctx.hilbert_annulus(father, s)
        proj = ctx.project_family(annulus, ctx.q_family_nu(s), key=("ann", s.scale, s.index, 0))
        for j, c in proj.items():
            out[j] = out.get(j, 0.0) + avg * c
    return ctx.synthesize(out)
