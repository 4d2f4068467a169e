"""Numerical verification of the individual lemma inequalities.

Each check draws a seeded ensemble, evaluates the two sides of one
inequality with absolute constants stripped, and reports the worst ratio
against its frozen regression bound.  Every ratio is invariant under joint
translation/dilation of the instance (weights scaling with the dilation), and
the checks re-verify that invariance on the fly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import frozen
from .constants import (
    ConstantsConfig,
    full_constants,
    operator_norm_matrix,
    pivotal_constant,
    sawyer_maximal_constant,
    weighted_complex_matrix,
)
from .corona import build_stopping_tree, corona_families, generation_mass_profile, packing_ratio
from .dyadic import DyadicInterval, ShiftedLattice, build_lattice_tree, sample_shift_pair
from .goodbad import GoodBadConfig, good_weak
from .haar import decompose, haar_function, rescale_pair_to_window, standard_root
from .measure import DiscreteMeasure, Interval, ValidationError, WeightedFunction
from .paraproduct import (
    ParaproductContext,
    carleson_constant,
    carleson_sequences_corona,
    embedding_constant,
    pi_O_apply,
)
from .transform import (
    cauchy_matrix_circle,
    circle_poisson,
    hilbert_matrix,
    maximal_value,
    poisson_height_kernel_matrix,
    poisson_interval,
    poisson_kernel_weights,
)

__all__ = [
    "CheckResult",
    "check_longrange",
    "check_poisson_operator",
    "check_stopping_term",
    "check_projection_lemma",
    "check_maxop_pivotal",
    "check_diagonal_expansion",
    "necessity_lower_bound",
    "full_report",
]


@dataclass
class CheckResult:
    name: str
    ratio_max: float
    frozen_bound: float
    passed: bool
    samples: int
    seed: int
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ratio_max": self.ratio_max,
            "frozen_bound": self.frozen_bound,
            "pass": self.passed,
            "samples": self.samples,
            "seed": self.seed,
            "details": self.details,
        }


def _result(name: str, ratio_max: float, bound: float, samples: int, seed: int,
            details: dict | None = None) -> CheckResult:
    return CheckResult(name, ratio_max, bound, ratio_max <= bound, samples, seed, details or {})


def _cluster_measure(rng: np.random.Generator, left: float, right: float, count: int,
                     label: str) -> DiscreteMeasure:
    pos = rng.uniform(left, right, size=count)
    wts = 10.0 ** rng.uniform(-1.0, 1.0, size=count)
    return DiscreteMeasure(pos, wts, label)


def _haar_pieces(measure: DiscreteMeasure, interval: DyadicInterval, coeff: float) -> WeightedFunction | None:
    """coeff * h_I as a function on the measure, None if h_I degenerates."""
    lo, hi = measure.index_range(interval.as_interval(closed_right=False))
    if hi - lo < 2:
        return None
    h = haar_function(measure, interval)
    if h.degenerate:
        return None
    values = np.zeros(len(measure))
    mid = int(np.searchsorted(measure.positions, interval.center))
    values[lo:mid] = coeff * h.value_minus
    values[mid:hi] = coeff * h.value_plus
    return WeightedFunction(measure, values)


def _bilinear(mu: DiscreteMeasure, nu: DiscreteMeasure, f: WeightedFunction,
              g: WeightedFunction) -> float:
    """(H_mu f, g)_nu evaluated as the double kernel sum."""
    kernel = hilbert_matrix(mu, nu)
    hf = kernel.entries @ (f.values * mu.weights)
    return float(np.dot(hf * g.values, nu.weights))


# ---------------------------------------------------------------------------
# Long range interaction

def check_longrange(samples: int = 500, seed: int = 20260811) -> CheckResult:
    """|(H Delta_I f, Delta_J g)| <= A |I|/(dist+|I|+|J|)^2 sqrt(mu(I) nu(J))
    ||Delta_I f|| ||Delta_J g||  for |I| <= |J|, dist(I,J) >= |J|."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x10E6]))
    ratio_max = 0.0
    worst_drift = 0.0
    done = 0
    while done < samples:
        a = int(rng.integers(-3, 1))        # scale of I
        b = int(rng.integers(a, a + 4))     # scale of J >= scale of I
        li, lj = 2.0 ** a, 2.0 ** b
        gap = lj * float(rng.uniform(1.0, 8.0))
        i_left = 0.0
        j_left = i_left + li + gap
        lam = 10.0 ** float(rng.uniform(-2.0, 2.0))

        n_mu = int(rng.integers(2, 8))
        n_nu = int(rng.integers(2, 8))
        mu_pos = rng.uniform(i_left, i_left + li, n_mu)
        nu_pos = rng.uniform(j_left, j_left + lj, n_nu)
        mu_w = 10.0 ** rng.uniform(-1, 1, n_mu)
        nu_w = 10.0 ** rng.uniform(-1, 1, n_nu)
        cf, cg = float(rng.normal()), float(rng.normal())

        def ratio_at(scale: float, offset: float) -> float | None:
            # lengths and the gap scale exactly; only atom positions round
            mu = DiscreteMeasure(mu_pos * scale + offset, mu_w * scale)
            nu = DiscreteMeasure(nu_pos * scale + offset, nu_w * scale)
            s_li, s_lj, s_gap = li * scale, lj * scale, gap * scale
            iv_i = Interval(i_left * scale + offset, (i_left + li) * scale + offset)
            iv_j = Interval(j_left * scale + offset, (j_left + lj) * scale + offset)
            f = _haar_indicator_piece(mu, iv_i, cf)
            g = _haar_indicator_piece(nu, iv_j, cg)
            if f is None or g is None:
                return None
            lhs = abs(_bilinear(mu, nu, f, g))
            # every mu atom lies in I and every nu atom in J by construction
            rhs = (s_li / (s_gap + s_li + s_lj) ** 2
                   * math.sqrt(mu.total_mass * nu.total_mass) * f.norm * g.norm)
            if rhs <= 0:
                return None
            return lhs / rhs

        r0 = ratio_at(1.0, 0.0)
        if r0 is None:
            continue
        r1 = ratio_at(lam, 0.37 * lam)
        if r1 is not None and r0 > 0:
            worst_drift = max(worst_drift, abs(r0 - r1) / r0)
        ratio_max = max(ratio_max, r0)
        done += 1
    return _result("longrange", ratio_max, frozen.LONGRANGE_RATIO_BOUND, samples, seed,
                   {"dilation_drift": worst_drift})


def _haar_indicator_piece(measure: DiscreteMeasure, hull: Interval, coeff: float) -> WeightedFunction | None:
    """Mean-zero two-valued function on the atoms inside `hull`: the weighted
    Haar function of the hull split at its midpoint, scaled by coeff."""
    lo, hi = measure.index_range(hull)
    if hi - lo < 2:
        return None
    mid = int(np.searchsorted(measure.positions, hull.center, side="left"))
    m_minus = measure.range_mass(lo, mid)
    m_plus = measure.range_mass(mid, hi)
    if m_minus <= 0 or m_plus <= 0:
        return None
    total = m_minus + m_plus
    v_minus = math.sqrt(m_plus / (total * m_minus))
    v_plus = -math.sqrt(m_minus / (total * m_plus))
    values = np.zeros(len(measure))
    values[lo:mid] = coeff * v_minus
    values[mid:hi] = coeff * v_plus
    return WeightedFunction(measure, values)


# ---------------------------------------------------------------------------
# Poisson-kernel averaging operator

def check_poisson_operator(samples: int = 60, seed: int = 20260811) -> CheckResult:
    """Norm of phi -> int K_y(t,s) phi(t) dmu(t) from L2(mu) to L2(nu) is at
    most A sqrt(Q); ratio over a dyadic ladder of heights."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x9015]))
    from .constants import a2_constant

    ratio_max = 0.0
    worst_drift = 0.0
    done = 0
    while done < samples:
        n1, n2 = int(rng.integers(3, 12)), int(rng.integers(3, 12))
        base_mu = _cluster_measure(rng, 0.0, 1.0, n1, "mu")
        base_nu = _cluster_measure(rng, 0.0, 1.0, n2, "nu")
        if np.intersect1d(base_mu.positions, base_nu.positions).size:
            continue
        lam = 10.0 ** float(rng.uniform(-2.0, 2.0))

        def ratio_at(scale: float, offset: float) -> float:
            mu = base_mu.translate_scale(scale, offset, scale)
            nu = base_nu.translate_scale(scale, offset, scale)
            q = a2_constant(mu, nu)
            pts = np.unique(np.concatenate([mu.positions, nu.positions]))
            gaps = np.diff(pts)
            min_gap = float(gaps[gaps > 0].min())
            diam = float(pts[-1] - pts[0])
            best = 0.0
            k_hi = max(1, math.ceil(math.log2(diam / min_gap))) + 2
            for k in range(-2, k_hi + 1):
                y = min_gap * 2.0 ** k
                a = (np.sqrt(nu.weights)[:, None]
                     * poisson_height_kernel_matrix(mu, nu, y)
                     * np.sqrt(mu.weights)[None, :])
                norm = operator_norm_matrix(a).value
                best = max(best, norm / math.sqrt(q))
            return best

        r0 = ratio_at(1.0, 0.0)
        r1 = ratio_at(lam, 0.11 * lam)
        if r0 > 0:
            worst_drift = max(worst_drift, abs(r0 - r1) / r0)
        ratio_max = max(ratio_max, r0)
        done += 1
    return _result("poisson-operator", ratio_max, frozen.POISSON_OPERATOR_RATIO_BOUND,
                   samples, seed, {"dilation_drift": worst_drift})


# ---------------------------------------------------------------------------
# Stopping-term estimate

def check_stopping_term(samples: int = 500, seed: int = 20260811) -> CheckResult:
    """|(H chi_{Ihat minus I}, Delta_J g)| <= A sqrt(nu(J)) ||Delta_J g||
    (|J|/|I|)^(1/2) P_{I_i}(chi_{Ihat minus I} dmu)  for separated good J."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5709]))
    ratio_max = 0.0
    worst_drift = 0.0
    done = 0
    attempts = 0
    while done < samples and attempts < samples * 50:
        attempts += 1
        a = int(rng.integers(1, 4))          # I at scale -a inside [0,1)
        g_gap = int(rng.integers(9, 13))     # separation needs |J| <= 2^-8 |I|
        li = 2.0 ** (-a)
        lj = 2.0 ** (-a - g_gap)
        idx_i = int(rng.integers(0, 2 ** a))
        i_left = idx_i * li
        half = int(rng.integers(0, 2))
        ii_left = i_left + half * li / 2.0
        # J inside the half I_i, near its middle so it clears e(I) = {ends, mid of I}
        j_slots = int(li / 2.0 / lj)
        slot = int(rng.integers(j_slots // 4, 3 * j_slots // 4))
        j_left = ii_left + slot * lj
        sep = min(abs(j_left - p) for p in (i_left, i_left + li / 2.0, i_left + li))
        sep = min(sep, min(abs(j_left + lj - p) for p in (i_left, i_left + li / 2.0, i_left + li)))
        if sep < li ** 0.75 * lj ** 0.25:
            continue
        lam = 10.0 ** float(rng.uniform(-2.0, 2.0))

        # mu atoms in [0,1) outside I; nu atoms inside J
        n_mu = int(rng.integers(2, 10))
        mu_pos = []
        while len(mu_pos) < n_mu:
            x = float(rng.uniform(0.0, 1.0))
            if not (i_left <= x < i_left + li):
                mu_pos.append(x)
        n_nu = int(rng.integers(2, 6))
        nu_pos = rng.uniform(j_left, j_left + lj, n_nu)
        mu_w = 10.0 ** rng.uniform(-1, 1, n_mu)
        nu_w = 10.0 ** rng.uniform(-1, 1, n_nu)
        cg = float(rng.normal())

        def ratio_at(scale: float, offset: float) -> float | None:
            # transformed centers/lengths are computed directly (no endpoint
            # differencing) so the ratio is dilation-clean
            mu = DiscreteMeasure(np.asarray(mu_pos) * scale + offset, mu_w * scale)
            nu = DiscreteMeasure(nu_pos * scale + offset, nu_w * scale)
            iv_j = Interval(j_left * scale + offset, (j_left + lj) * scale + offset)
            g = _haar_indicator_piece(nu, iv_j, cg)
            if g is None:
                return None
            # (H chi, Delta_J g) with the kernel recentred at J's midpoint:
            # identical in exact arithmetic (Delta_J g is mean zero) and free
            # of the 2^gap cancellation of the raw double sum
            c_j = (j_left + lj / 2.0) * scale + offset
            kernel = hilbert_matrix(mu, nu)
            h_chi = kernel.entries @ mu.weights
            h_at_center = float(np.sum(mu.weights / (math.pi * (c_j - mu.positions))))
            lhs = abs(float(np.dot((h_chi - h_at_center) * g.values, nu.weights)))
            ii_center = (ii_left + li / 4.0) * scale + offset
            ii_len = (li / 2.0) * scale
            p = float(poisson_kernel_weights(mu, ii_center, ii_len).sum())
            rhs = math.sqrt(nu.total_mass) * g.norm * math.sqrt(lj / li) * p
            if rhs <= 0:
                return None
            return lhs / rhs

        r0 = ratio_at(1.0, 0.0)
        if r0 is None:
            continue
        r1 = ratio_at(lam, 0.29 * lam)
        if r1 is not None and r0 > 0:
            worst_drift = max(worst_drift, abs(r0 - r1) / r0)
        ratio_max = max(ratio_max, r0)
        done += 1
    return _result("stopping-term", ratio_max, frozen.STOPPING_TERM_RATIO_BOUND,
                   samples, seed, {"dilation_drift": worst_drift, "attempts": attempts})


# ---------------------------------------------------------------------------
# Projection-through-Poisson decay

def check_projection_lemma(samples_per_j: int = 60, j_max: int = 8,
                           seed: int = 20260811, r: int = 10) -> CheckResult:
    """||P_{nu,A'}(H chi_{B minus A})||^2 <= C 2^-j nu(A') (P_A chi_{B minus A})^2
    for nested dyadic A' inside A inside B with tree distance >= j."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x660A]))
    cfg = GoodBadConfig(r=r, scale_cap=40)
    ratio_by_j: dict[int, float] = {}
    for j in range(0, j_max + 1):
        done = 0
        while done < samples_per_j:
            a_scale = int(rng.integers(1, 4))
            la = 2.0 ** (-a_scale)
            idx_a = int(rng.integers(0, 2 ** a_scale))
            a_left = idx_a * la
            lap = la * 2.0 ** (-j)
            slot = int(rng.integers(0, 2 ** j))
            ap_left = a_left + slot * lap

            n_mu = int(rng.integers(2, 10))
            mu_pos = []
            while len(mu_pos) < n_mu:
                x = float(rng.uniform(0.0, 1.0))
                if not (a_left <= x < a_left + la):
                    mu_pos.append(x)
            n_nu = int(rng.integers(3, 9))
            nu_pos = rng.uniform(ap_left, ap_left + lap, n_nu)
            mu = DiscreteMeasure(mu_pos, 10.0 ** rng.uniform(-1, 1, n_mu))
            nu = DiscreteMeasure(nu_pos, 10.0 ** rng.uniform(-1, 1, n_nu))

            w2 = float(rng.uniform(-0.25, 0.25))
            lat_nu = ShiftedLattice(0.0, -60, 0)
            lat_mu = ShiftedLattice(w2, -60, 0)
            kernel = hilbert_matrix(mu, nu)
            values = kernel.entries @ mu.weights  # H(chi of all mu atoms) = H(chi_{B minus A})
            coeffs = decompose(WeightedFunction(nu, values), lat_nu, standard_root(0.0))
            a_prime = DyadicInterval(-a_scale - j, idx_a * 2 ** j + slot, 0.0)
            num = 0.0
            for iv, c in coeffs.entries.items():
                if a_prime.contains(iv) and good_weak(iv, lat_mu, cfg):
                    num += c * c
            iv_a = Interval(a_left, a_left + la)
            p = poisson_interval(mu, iv_a)
            nu_ap = nu.mass(Interval(ap_left, ap_left + lap, closed_right=False))
            den = 2.0 ** (-j) * nu_ap * p * p
            if den <= 0:
                continue
            ratio_by_j[j] = max(ratio_by_j.get(j, 0.0), num / den)
            done += 1
    ratio_max = max(ratio_by_j.values())
    return _result("projection-decay", ratio_max, frozen.PROJECTION_LEMMA_RATIO_BOUND,
                   samples_per_j * (j_max + 1), seed,
                   {"ratio_by_j": {str(k): v for k, v in sorted(ratio_by_j.items())}})


# ---------------------------------------------------------------------------
# Poisson vs maximal function, and the pivotal consequence

def check_maxop_pivotal(mu: DiscreteMeasure, nu: DiscreteMeasure, depth: int = 8,
                        seed: int = 20260811) -> CheckResult:
    """Pointwise P_{I_a}(chi_I dmu) <= A* inf_{x in I_a} M_mu(chi_I)(x) over
    nested dyadic pairs, then pivotal <= 4 A*^2 sup_I ||M chi_I||^2_nu / mu(I)."""
    from .measure import common_atom_positions

    if common_atom_positions(mu, nu).size:
        raise ValidationError("maxop check requires disjoint supports")
    a_star = frozen.ANNULUS_MAXIMAL_CONSTANT
    mu_w, nu_w, _ = rescale_pair_to_window(mu, nu)
    pair = sample_shift_pair(seed)
    lat = ShiftedLattice(pair.omega1, -(depth + 4), 0)
    root = standard_root(pair.omega1)
    tree = build_lattice_tree(mu_w.positions, root, depth)
    worst_pointwise = 0.0
    nodes = list(tree.walk()) if tree is not None else []
    for top in nodes:
        lo, hi = mu_w.index_range(top.interval.as_interval(closed_right=False))
        chi = np.zeros(len(mu_w))
        chi[lo:hi] = 1.0
        f = WeightedFunction(mu_w, chi)
        for nd in top.walk():
            iv = nd.interval
            p = float(poisson_kernel_weights(mu_w, iv.center, iv.length)[lo:hi].sum())
            if p <= 0:
                continue
            xs = [iv.left + t * iv.length for t in (0.1, 0.3, 0.5, 0.7, 0.9)]
            m_inf = min(maximal_value(mu_w, f, x) for x in xs)
            if math.isinf(m_inf) or m_inf <= 0:
                continue
            worst_pointwise = max(worst_pointwise, p / m_inf)
    piv = pivotal_constant(mu_w, nu_w, lat, root, depth)
    cm = sawyer_maximal_constant(mu, nu, "forward")
    chain_ok = piv.full <= frozen.EMBEDDING_FACTOR * a_star ** 2 * cm * (1 + 1e-9)
    passed = worst_pointwise <= a_star and chain_ok
    return CheckResult("maxop-pivotal", worst_pointwise, a_star, passed, len(nodes), seed,
                       {"pivotal_full": piv.full, "cm_forward": cm, "chain_ok": chain_ok})


# ---------------------------------------------------------------------------
# Haar-expansion consistency of the bilinear form

def check_diagonal_expansion(mu: DiscreteMeasure, nu: DiscreteMeasure,
                             seed: int = 20260811) -> CheckResult:
    """(H f, g) computed from the kernel equals the Haar double sum plus the
    top cross terms."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xD146]))
    mu_w, nu_w, _ = rescale_pair_to_window(mu, nu)
    pair = sample_shift_pair(seed)
    lat1 = ShiftedLattice(pair.omega1, -60, 0)
    lat2 = ShiftedLattice(pair.omega2, -60, 0)
    f = WeightedFunction(mu_w, rng.normal(size=len(mu_w)))
    g = WeightedFunction(nu_w, rng.normal(size=len(nu_w)))
    direct = _bilinear(mu_w, nu_w, f, g)

    cf = decompose(f, lat1, standard_root(pair.omega1))
    cg = decompose(g, lat2, standard_root(pair.omega2))
    kernel = hilbert_matrix(mu_w, nu_w)
    g_top_avg = cg.top / nu_w.mass(cg.root.as_interval())

    total = 0.0
    for iv, c in cf.entries.items():
        piece = _haar_pieces(mu_w, iv, c)
        h_piece = kernel.entries @ (piece.values * mu_w.weights)
        piece_coeffs = decompose(WeightedFunction(nu_w, h_piece), lat2, cg.root)
        total += sum(piece_coeffs.entries.get(jv, 0.0) * d for jv, d in cg.entries.items())
        total += g_top_avg * float(np.dot(h_piece, nu_w.weights))
    f_top = WeightedFunction(mu_w, np.full(len(mu_w), cf.top / mu_w.mass(cf.root.as_interval())))
    total += _bilinear(mu_w, nu_w, f_top, g)
    scale = abs(direct) + f.norm * g.norm
    resid = abs(direct - total) / scale
    return _result("diagonal-expansion", resid, frozen.DIAGONAL_EXPANSION_TOL, 1, seed,
                   {"direct": direct, "expanded": total})


# ---------------------------------------------------------------------------
# Circle necessity

def necessity_lower_bound(mu: DiscreteMeasure, nu: DiscreteMeasure, samples: int = 40,
                          seed: int = 20260811) -> CheckResult:
    """(P_{mu|E}(a) P_{nu|F}(a))^(1/2) <= bound * ||H_circle|| with E, F the
    half-circles of a near-balanced mu-cut, F the nu-heavier one."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xC14C]))
    angles = np.unique(np.concatenate([mu.positions, nu.positions]))
    if np.intersect1d(mu.positions, nu.positions).size:
        raise ValidationError("necessity check requires disjoint circle supports")
    kernel = cauchy_matrix_circle(mu, nu)
    opnorm = operator_norm_matrix(weighted_complex_matrix(kernel, mu, nu)).value
    if opnorm <= 0:
        raise ValidationError("degenerate circle operator")

    # candidate cut angles: midpoints of the combined angular gaps
    ext = np.concatenate([angles, [angles[0] + 2 * math.pi]])
    cuts = 0.5 * (ext[1:] + ext[:-1])

    def arc_mass(sig: DiscreteMeasure, start: float) -> float:
        rel = np.mod(sig.positions - start, 2 * math.pi)
        return float(sig.weights[rel < math.pi].sum())

    total_mu = mu.total_mass
    best_cut = min(cuts, key=lambda c: abs(arc_mass(mu, c) - 0.5 * total_mu))
    imbalance = abs(arc_mass(mu, best_cut) - 0.5 * total_mu) / total_mu
    balanced = imbalance <= 0.01
    bound = frozen.NECESSITY_BALANCED_BOUND if balanced else frozen.NECESSITY_RELAXED_BOUND

    def restrict(sig: DiscreteMeasure, start: float, first_half: bool) -> DiscreteMeasure | None:
        rel = np.mod(sig.positions - start, 2 * math.pi)
        mask = rel < math.pi if first_half else rel >= math.pi
        if not mask.any():
            return None
        return DiscreteMeasure(sig.positions[mask], sig.weights[mask])

    nu_first = restrict(nu, best_cut, True)
    first_is_f = (nu_first.total_mass if nu_first else 0.0) >= nu.total_mass / 2.0
    mu_e = restrict(mu, best_cut, not first_is_f)
    nu_f = restrict(nu, best_cut, first_is_f)

    ratio_max = 0.0
    for _ in range(samples):
        rho = float(rng.uniform(0.0, 0.7))
        theta = float(rng.uniform(0.0, 2 * math.pi))
        a = rho * complex(math.cos(theta), math.sin(theta))
        pe = circle_poisson(mu_e, a) if mu_e is not None else 0.0
        pf = circle_poisson(nu_f, a) if nu_f is not None else 0.0
        ratio_max = max(ratio_max, math.sqrt(pe * pf) / opnorm)
    return _result("necessity-circle", ratio_max, bound, samples, seed,
                   {"imbalance": imbalance, "balanced": balanced, "opnorm": opnorm})


# ---------------------------------------------------------------------------
# Full report

def full_report(mu: DiscreteMeasure, nu: DiscreteMeasure,
                config: ConstantsConfig = ConstantsConfig(),
                ensemble_samples: int = 120, r: int = 10) -> dict:
    """Constants, corona packing, paraproduct suites and the lemma checks for
    one instance, as one JSON-ready document.  Infinite constants mark which
    hypothesis fails; nothing aborts."""
    if not config.maximal:
        from dataclasses import replace
        config = replace(config, maximal=True)  # the report reads every hypothesis
    constants = full_constants(mu, nu, config)
    doc: dict = {"constants": constants.to_dict(), "checks": []}

    finite_hypotheses = all(
        math.isfinite(v) for v in (
            constants.cchi_forward, constants.cchi_backward,
            constants.cm_forward, constants.cm_backward,
            constants.q, constants.pq,
        )
    )
    doc["hypotheses_finite"] = finite_hypotheses
    doc["theorem_conclusion"] = (
        "all testing constants finite; operator norm reported" if finite_hypotheses
        else "testing hypotheses violated (common atoms or divergence); no conclusion"
    )

    if finite_hypotheses:
        pair = sample_shift_pair(config.seed)
        mu_w, nu_w, _ = rescale_pair_to_window(mu, nu)
        lat1 = ShiftedLattice(pair.omega1, -(config.depth + 4), 0)
        lat2 = ShiftedLattice(pair.omega2, -(config.depth + 4), 0)
        root = standard_root(pair.omega1)
        k_value = 4.0 * max(constants.pivotal_forward, 1e-12)
        tree = build_stopping_tree(mu_w, nu_w, lat1, root, k_value, config.depth)
        ratio = packing_ratio(tree, mu_w)
        profile = generation_mass_profile(tree)
        root_mass = tree.root.mu_mass
        packing_ok = ratio <= 0.25 + 1e-12 and all(
            m <= 2.0 ** (-g) * root_mass * (1 + 1e-9) for g, m in enumerate(profile, start=1)
        )
        doc["corona"] = {
            "k": k_value,
            "nodes": sum(1 for _ in tree.root.walk()),
            "packing_ratio": ratio,
            "generation_mass": profile,
            "packing_ok": packing_ok,
        }
        fams = corona_families(tree, (lat1, lat2))
        cfg = GoodBadConfig(r=r, scale_cap=40)
        ctx = ParaproductContext(mu_w, nu_w, tree, fams, lat1, lat2, cfg, r=r)
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xF00D]))
        f = WeightedFunction(mu_w, rng.normal(size=len(mu_w)))
        b_seq, a_seqs = carleson_sequences_corona(mu_w, nu_w, tree, ctx)
        pio = pi_O_apply(mu_w, nu_w, tree, ctx, f)
        rhs = sum(ctx.mu_average(f, n.interval) ** 2 * b_seq.weights[n.interval]
                  for n in tree.nodes())
        pio_residual = abs(pio.norm_sq - rhs) / max(rhs, 1e-300)
        doc["paraproducts"] = {
            "b_carleson_constant": carleson_constant(b_seq, mu_w),
            "b_embedding_constant": embedding_constant(b_seq, mu_w),
            "a_j_carleson_constants": [carleson_constant(a, mu_w) for a in a_seqs],
            "pi_o_identity_residual": pio_residual,
        }
        doc["checks"].append(check_maxop_pivotal(mu, nu, config.depth, config.seed).to_dict())
        doc["checks"].append(check_diagonal_expansion(mu, nu, config.seed).to_dict())
        # circle necessity on the angle-parameterized copy of the pair
        mu_ang = DiscreteMeasure(2 * math.pi * mu_w.positions, mu_w.weights, mu.label)
        nu_ang = DiscreteMeasure(2 * math.pi * nu_w.positions, nu_w.weights, nu.label)
        doc["checks"].append(
            necessity_lower_bound(mu_ang, nu_ang, seed=config.seed).to_dict())

    doc["checks"].append(check_longrange(ensemble_samples, config.seed).to_dict())
    doc["checks"].append(check_stopping_term(ensemble_samples, config.seed).to_dict())
    doc["checks"].append(
        check_poisson_operator(max(10, ensemble_samples // 8), config.seed).to_dict())
    doc["checks"].append(
        check_projection_lemma(max(10, ensemble_samples // 8), 8, config.seed).to_dict())
    doc["checks"].sort(key=lambda c: c["name"])
    return doc
