"""The scalar characteristics of a measure pair.

Dimensionless (translation/dilation invariant once weights scale with the
dilation) quantities computed here:

  opnorm           largest singular value of the weighted Hilbert kernel
  cchi_*           Sawyer-type testing constants of the Hilbert transform,
                   sup_I ||H chi_I||^2 / (source mass of I), global and local
  cm_*             Sawyer testing constants of the maximal operator
  q                sup_I (mu(I)/|I|) (nu(I)/|I|)
  pq               sup over the upper half-plane of the Poisson product
                   (certified lower bound over a mandated candidate grid)
  pivotal_*        sup_I max over antichains of Poisson-mass sums, by dynamic
                   programming over the dyadic tree

All suprema over intervals are finite enumerations over the canonical
families of the measure module; no randomness enters except the recorded
lattice shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import (
    DyadicInterval,
    LatticeNode,
    ShiftedLattice,
    build_lattice_tree,
    sample_shift_pair,
)
from .haar import rescale_pair_to_window, standard_root
from .measure import (
    DiscreteMeasure,
    Interval,
    ValidationError,
    combined_positions,
    common_atom_positions,
)
from .transform import (
    KernelMatrix,
    hilbert_matrix,
    apply_hilbert_range_prefix,
    maximal_values_for_indicator,
    poisson_kernel_weights,
)

__all__ = [
    "PowerIterationResult",
    "operator_norm",
    "operator_norm_matrix",
    "weighted_kernel",
    "SawyerHilbertResult",
    "sawyer_hilbert_constant",
    "sawyer_maximal_constant",
    "a2_constant",
    "PoissonGrid",
    "PoissonA2Result",
    "poisson_a2",
    "PivotalResult",
    "pivotal_constant",
    "ConstantsConfig",
    "ConstantsReport",
    "full_constants",
]


# ---------------------------------------------------------------------------
# Operator norm

@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    iterations: int
    converged: bool
    residual: float
    restarted: bool = False


def operator_norm_matrix(a: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> PowerIterationResult:
    """Largest singular value of a (possibly complex) matrix by power iteration
    on the Gram matrix, with a deterministic all-ones start and at most one
    orthogonalized restart if the Rayleigh quotient refuses to grow."""
    if a.size == 0:
        return PowerIterationResult(0.0, 0, True, 0.0)
    gram = a.conj().T @ a
    n = gram.shape[0]
    gram_scale = float(np.max(np.abs(np.diagonal(gram)))) if n else 0.0
    if gram_scale == 0.0:
        return PowerIterationResult(0.0, 0, True, 0.0)
    v = np.ones(n, dtype=gram.dtype) / math.sqrt(n)
    lam = 0.0
    lam_prev = 0.0
    restarted = False
    it = 0
    while it < max_iter:
        it += 1
        u = gram @ v
        lam = float(np.real(np.vdot(v, u)))
        norm_u = float(np.linalg.norm(u))
        stagnant = it == 1 and lam <= 1e-14 * gram_scale
        if (norm_u == 0.0 or stagnant) and not restarted:
            # the all-ones start can miss the top eigenspace entirely;
            # restart once with an orthogonalized alternating-sign vector
            restarted = True
            w = np.array([(-1.0) ** i for i in range(n)], dtype=gram.dtype)
            w -= np.vdot(v, w) * v
            nw = float(np.linalg.norm(w))
            if nw == 0.0:
                return PowerIterationResult(math.sqrt(max(lam, 0.0)), it, True, 0.0, True)
            v = w / nw
            lam_prev = 0.0
            continue
        if norm_u == 0.0:
            return PowerIterationResult(math.sqrt(max(lam, 0.0)), it, True, 0.0, restarted)
        change = abs(lam - lam_prev)
        v = u / norm_u
        if it > 1 and change <= tol * max(lam, 1e-300):
            return PowerIterationResult(math.sqrt(max(lam, 0.0)), it, True, change, restarted)
        lam_prev = lam
    return PowerIterationResult(math.sqrt(max(lam, 0.0)), it, False, abs(lam - lam_prev), restarted)


def weighted_kernel(kernel: KernelMatrix) -> np.ndarray:
    """A = diag(sqrt(nu weights)) K diag(sqrt(mu weights)); the operator
    L2(mu) -> L2(nu) is unitarily equivalent to A on unweighted space."""
    sw = np.sqrt(kernel.source.weights)
    tw = np.sqrt(kernel.target.weights)
    return tw[:, None] * kernel.entries * sw[None, :]


def operator_norm(kernel: KernelMatrix, tol: float = 1e-12, max_iter: int = 100_000) -> PowerIterationResult:
    return operator_norm_matrix(weighted_kernel(kernel), tol=tol, max_iter=max_iter)


def weighted_complex_matrix(entries: np.ndarray, mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    return np.sqrt(nu.weights)[:, None] * entries * np.sqrt(mu.weights)[None, :]


# ---------------------------------------------------------------------------
# Sawyer testing constants

@dataclass(frozen=True)
class SawyerHilbertResult:
    global_constant: float
    local_constant: float
    coincident_flagged: bool


def _combined_run_ranges(mu: DiscreteMeasure, nu: DiscreteMeasure):
    """For every contiguous run of combined-support atoms yield the closed
    hull together with the mu and nu atom index ranges it captures."""
    u = combined_positions(mu, nu)
    mu_lo = np.searchsorted(mu.positions, u, side="left")
    nu_lo = np.searchsorted(nu.positions, u, side="left")
    mu_hi = np.searchsorted(mu.positions, u, side="right")
    nu_hi = np.searchsorted(nu.positions, u, side="right")
    m = u.size
    for i in range(m):
        for j in range(i, m):
            yield (u[i], u[j], mu_lo[i], mu_hi[j], nu_lo[i], nu_hi[j])


def sawyer_hilbert_constant(mu: DiscreteMeasure, nu: DiscreteMeasure,
                            direction: str = "forward", delta: float = 0.0) -> SawyerHilbertResult:
    """sup_I ||H_mu chi_I||^2_{L2(nu)} / mu(I) over canonical runs.

    The global constant uses the nu-norm over the whole line (the
    normalization the corona estimates consume); the local constant restricts
    the nu-norm to I.  `backward` swaps the measures.
    """
    if direction == "backward":
        return sawyer_hilbert_constant(nu, mu, "forward", delta)
    if direction != "forward":
        raise ValidationError("direction must be 'forward' or 'backward'")
    kernel = hilbert_matrix(mu, nu, delta)
    prefix = apply_hilbert_range_prefix(kernel)
    vw = nu.weights
    best_global = 0.0
    best_local = 0.0
    any_source = False
    for _, _, mlo, mhi, nlo, nhi in _combined_run_ranges(mu, nu):
        src_mass = mu.range_mass(mlo, mhi)
        if src_mass <= 0:
            continue
        any_source = True
        h = prefix[:, mhi] - prefix[:, mlo]
        h2w = h * h * vw
        best_global = max(best_global, float(h2w.sum()) / src_mass)
        best_local = max(best_local, float(h2w[nlo:nhi].sum()) / src_mass)
    if not any_source:
        raise ValidationError("no interval with positive source mass")
    return SawyerHilbertResult(best_global, best_local, kernel.coincident_flagged)


def sawyer_maximal_constant(mu: DiscreteMeasure, nu: DiscreteMeasure,
                            direction: str = "forward") -> float:
    """sup_I ||M_mu chi_I||^2_{L2(nu)} / mu(I); +inf when the measures share
    an atom position (a shrinking interval around it blows the ratio up)."""
    if direction == "backward":
        return sawyer_maximal_constant(nu, mu, "forward")
    if direction != "forward":
        raise ValidationError("direction must be 'forward' or 'backward'")
    if common_atom_positions(mu, nu).size:
        return math.inf
    m = len(mu)
    best = 0.0
    targets = nu.positions
    vw = nu.weights
    for i in range(m):
        for j in range(i + 1, m + 1):
            vals = maximal_values_for_indicator(mu, i, j, targets)
            best = max(best, float(np.dot(vals * vals, vw)) / mu.range_mass(i, j))
    return best


def a2_constant(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """sup over closed hulls [u_i, u_j] of (mu/|I|)(nu/|I|); +inf on a common atom."""
    if common_atom_positions(mu, nu).size:
        return math.inf
    u = combined_positions(mu, nu)
    if u.size < 2:
        return 0.0
    pm = np.concatenate(([0.0], np.cumsum([mu.mass(Interval(x, x)) for x in u])))
    pn = np.concatenate(([0.0], np.cumsum([nu.mass(Interval(x, x)) for x in u])))
    best = 0.0
    for i in range(u.size):
        for j in range(i + 1, u.size):
            length = u[j] - u[i]
            best = max(best, (pm[j + 1] - pm[i]) * (pn[j + 1] - pn[i]) / (length * length))
    return best


# ---------------------------------------------------------------------------
# Poisson A2

@dataclass(frozen=True)
class PoissonGrid:
    iterations: int = 24
    ladder_pad: int = 2


@dataclass(frozen=True)
class PoissonA2Result:
    value: float
    argmax_x: float
    argmax_y: float
    infinite: bool = False


def _poisson_products(mu: DiscreteMeasure, nu: DiscreteMeasure,
                      xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    inv_pi = 1.0 / math.pi

    def pois(sig: DiscreteMeasure) -> np.ndarray:
        d = xs[:, None] - sig.positions[None, :]
        k = ys[:, None] / (d * d + (ys * ys)[:, None])
        return inv_pi * (k @ sig.weights)

    return pois(mu) * pois(nu)


def poisson_a2(mu: DiscreteMeasure, nu: DiscreteMeasure,
               grid: PoissonGrid = PoissonGrid()) -> PoissonA2Result:
    """Certified lower bound for sup_z P_mu(z) P_nu(z).

    The candidate set always contains the point (center(I), |I|) of every
    tight-representative interval I, plus a dyadic ladder of heights (scaled
    from the minimal gap, so the set is covariant under affine maps of the
    data) over every support position and gap midpoint; the best point is then
    refined by a compass search with halving steps.
    """
    if common_atom_positions(mu, nu).size:
        return PoissonA2Result(math.inf, float(common_atom_positions(mu, nu)[0]), 0.0, True)
    u = combined_positions(mu, nu)
    xs, ys = [], []
    for i in range(u.size):
        for j in range(i + 1, u.size):
            xs.append(0.5 * (u[i] + u[j]))
            ys.append(u[j] - u[i])
    diam = float(u[-1] - u[0]) if u.size > 1 else 1.0
    gaps = np.diff(u)
    gaps = gaps[gaps > 0]
    min_gap = float(gaps.min()) if gaps.size else diam
    if diam <= 0:
        diam = 1.0
    if min_gap <= 0:
        min_gap = diam
    n_heights = max(1, math.ceil(math.log2(diam / min_gap))) + 1 + 2 * grid.ladder_pad
    heights = min_gap * 2.0 ** (np.arange(n_heights) - grid.ladder_pad)
    anchors = np.concatenate([u, 0.5 * (u[1:] + u[:-1])]) if u.size > 1 else u
    for x0 in anchors:
        xs.extend([float(x0)] * heights.size)
        ys.extend(heights.tolist())
    xs_arr = np.asarray(xs)
    ys_arr = np.asarray(ys)
    vals = _poisson_products(mu, nu, xs_arr, ys_arr)
    k = int(np.argmax(vals))
    best_val, bx, by = float(vals[k]), float(xs_arr[k]), float(ys_arr[k])
    dx, dy = by / 2.0, by / 2.0
    for _ in range(grid.iterations):
        cand_x = [bx, bx - dx, bx + dx, bx, bx]
        cand_y = [by, by, by, by + dy, by - dy if by - dy > 0 else by / 2.0]
        cv = _poisson_products(mu, nu, np.asarray(cand_x), np.asarray(cand_y))
        j = int(np.argmax(cv))
        if float(cv[j]) > best_val:
            best_val, bx, by = float(cv[j]), cand_x[j], cand_y[j]
        else:
            dx /= 2.0
            dy /= 2.0
    return PoissonA2Result(best_val, bx, by, False)


# ---------------------------------------------------------------------------
# Pivotal constant by antichain dynamic programming

@dataclass(frozen=True)
class PivotalResult:
    punctured: float   # sum of [P_{I_a}(chi_{I minus I_a} dmu)]^2 nu(I_a) <= P mu(I)
    full: float        # same with chi_I in place of chi_{I minus I_a}


def _node_ranges(node_list: list[LatticeNode], positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo = np.empty(len(node_list), dtype=int)
    hi = np.empty(len(node_list), dtype=int)
    for i, nd in enumerate(node_list):
        lo[i] = np.searchsorted(positions, nd.interval.left, side="left")
        hi[i] = np.searchsorted(positions, nd.interval.right, side="left")
    return lo, hi


def pivotal_constant(mu: DiscreteMeasure, nu: DiscreteMeasure, lattice: ShiftedLattice,
                     root: DyadicInterval, depth: int) -> PivotalResult:
    """sup over dyadic I under `root` (to `depth` generations) of the maximal
    antichain sum of [P_{I_a}(chi_{I minus I_a} dmu)]^2 nu(I_a), over mu(I).

    The inner maximum is a tree DP: value(node) = max(term(node),
    sum of child values); both the punctured and the full-characteristic
    variants are evaluated in one sweep.
    """
    if mu.mass(root.as_interval()) <= 0:
        raise ValidationError("pivotal constant requires mu(root) > 0")
    points = combined_positions(mu, nu)
    tree = build_lattice_tree(points, root, depth)
    if tree is None:
        raise ValidationError("no support inside the root interval")
    nodes = list(tree.walk())
    mu_lo, mu_hi = _node_ranges(nodes, mu.positions)
    nu_lo, nu_hi = _node_ranges(nodes, nu.positions)
    index_of = {id(nd): i for i, nd in enumerate(nodes)}

    # per-node prefix sums of the Poisson kernel against mu: row i gives
    # P_{node_i} over any mu index range in O(1)
    kernel_prefix = np.zeros((len(nodes), len(mu) + 1))
    for i, nd in enumerate(nodes):
        kw = poisson_kernel_weights(mu, nd.interval.center, nd.interval.length)
        np.cumsum(kw, out=kernel_prefix[i, 1:])
    nu_mass = np.array([nu.range_mass(int(a), int(b)) for a, b in zip(nu_lo, nu_hi)])

    best_punctured = 0.0
    best_full = 0.0

    for top_idx, top in enumerate(nodes):
        t_lo, t_hi = int(mu_lo[top_idx]), int(mu_hi[top_idx])
        top_mass = mu.range_mass(t_lo, t_hi)
        if top_mass <= 0:
            continue

        def dp(nd: LatticeNode) -> tuple[float, float]:
            i = index_of[id(nd)]
            p_top = kernel_prefix[i, t_hi] - kernel_prefix[i, t_lo]
            p_self = kernel_prefix[i, int(mu_hi[i])] - kernel_prefix[i, int(mu_lo[i])]
            nm = nu_mass[i]
            term_punct = (p_top - p_self) ** 2 * nm
            term_full = p_top * p_top * nm
            if not nd.children:
                return term_punct, term_full
            sp = sf = 0.0
            for c in nd.children:
                a, b = dp(c)
                sp += a
                sf += b
            return max(term_punct, sp), max(term_full, sf)

        v_punct, v_full = dp(top)
        best_punctured = max(best_punctured, v_punct / top_mass)
        best_full = max(best_full, v_full / top_mass)

    return PivotalResult(best_punctured, best_full)


# ---------------------------------------------------------------------------
# Assembly

@dataclass(frozen=True)
class ConstantsConfig:
    depth: int = 8
    seed: int = 0
    delta: float = 0.0
    grid: PoissonGrid = field(default_factory=PoissonGrid)
    opnorm_tol: float = 1e-12
    opnorm_max_iter: int = 100_000
    maximal: bool = True  # the maximal-operator tests cost O(m^4); skippable


@dataclass
class ConstantsReport:
    opnorm: float
    opnorm_converged: bool
    opnorm_iterations: int
    cchi_forward: float
    cchi_backward: float
    cchi_forward_local: float
    cchi_backward_local: float
    cm_forward: float
    cm_backward: float
    q: float
    pq: float
    pq_argmax: tuple[float, float]
    pivotal_forward: float
    pivotal_backward: float
    pivotal_forward_full: float
    pivotal_backward_full: float
    depth: int
    seed: int
    shifts: tuple[float, float]
    coincident_atoms: bool
    window_map: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "opnorm": self.opnorm,
            "opnorm_converged": self.opnorm_converged,
            "opnorm_iterations": self.opnorm_iterations,
            "cchi_forward": self.cchi_forward,
            "cchi_backward": self.cchi_backward,
            "cchi_forward_local": self.cchi_forward_local,
            "cchi_backward_local": self.cchi_backward_local,
            "cm_forward": self.cm_forward,
            "cm_backward": self.cm_backward,
            "q": self.q,
            "pq": self.pq,
            "pq_argmax": list(self.pq_argmax),
            "pivotal_forward": self.pivotal_forward,
            "pivotal_backward": self.pivotal_backward,
            "pivotal_forward_full": self.pivotal_forward_full,
            "pivotal_backward_full": self.pivotal_backward_full,
            "depth": self.depth,
            "seed": self.seed,
            "shifts": list(self.shifts),
            "coincident_atoms": self.coincident_atoms,
            "window_map": list(self.window_map),
        }


def full_constants(mu: DiscreteMeasure, nu: DiscreteMeasure,
                   config: ConstantsConfig = ConstantsConfig()) -> ConstantsReport:
    """Every constant of the report, with flags propagated instead of raised.

    Lattice-based quantities (the pivotal constants) are computed on the pair
    rescaled into [1/4, 3/4] with the recorded random shifts; they are
    invariant under that rescaling.
    """
    coincident = bool(common_atom_positions(mu, nu).size)
    kernel = hilbert_matrix(mu, nu, config.delta)
    pw = operator_norm(kernel, tol=config.opnorm_tol, max_iter=config.opnorm_max_iter)
    fwd = sawyer_hilbert_constant(mu, nu, "forward", config.delta)
    bwd = sawyer_hilbert_constant(mu, nu, "backward", config.delta)
    if config.maximal:
        cm_f = sawyer_maximal_constant(mu, nu, "forward")
        cm_b = sawyer_maximal_constant(mu, nu, "backward")
    else:
        cm_f = cm_b = math.nan  # skipped by configuration
    q = a2_constant(mu, nu)
    pq = poisson_a2(mu, nu, config.grid)
    pair = sample_shift_pair(config.seed)
    mu_w, nu_w, window_map = rescale_pair_to_window(mu, nu)
    scale_min = -(config.depth + 4)
    lat1 = ShiftedLattice(pair.omega1, scale_min, 0)
    lat2 = ShiftedLattice(pair.omega2, scale_min, 0)
    piv_f = pivotal_constant(mu_w, nu_w, lat1, standard_root(pair.omega1), config.depth)
    piv_b = pivotal_constant(nu_w, mu_w, lat2, standard_root(pair.omega2), config.depth)
    return ConstantsReport(
        opnorm=pw.value,
        opnorm_converged=pw.converged,
        opnorm_iterations=pw.iterations,
        cchi_forward=fwd.global_constant,
        cchi_backward=bwd.global_constant,
        cchi_forward_local=fwd.local_constant,
        cchi_backward_local=bwd.local_constant,
        cm_forward=cm_f,
        cm_backward=cm_b,
        q=q,
        pq=pq.value,
        pq_argmax=(pq.argmax_x, pq.argmax_y),
        pivotal_forward=piv_f.punctured,
        pivotal_backward=piv_b.punctured,
        pivotal_forward_full=piv_f.full,
        pivotal_backward_full=piv_b.full,
        depth=config.depth,
        seed=config.seed,
        shifts=(pair.omega1, pair.omega2),
        coincident_atoms=coincident,
        window_map=window_map,
    )
