"""Derivative-free search for measure pairs where the pivotal constant is
large relative to everything known to be necessary for boundedness.

score = pivotal_max / (1 + opnorm^2 + pq + cchi_forward + cchi_backward).

A large score is the shape a counterexample to the necessity of the pivotal
condition would take; the search is an evidence generator, nothing more, and
every returned candidate carries enough lineage to be reproduced exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import ConstantsConfig, ConstantsReport, full_constants
from .measure import DiscreteMeasure, ValidationError, common_atom_positions, generate_measure

__all__ = ["Candidate", "ExplorerConfig", "score", "search"]


@dataclass(frozen=True)
class ExplorerConfig:
    population: int = 12
    generations: int = 4
    elite: int = 4
    atom_cap: int = 24
    depth: int = 6
    seed: int = 0
    jitter_rate: float = 0.5
    reweight_rate: float = 0.5
    split_merge_rate: float = 0.3
    cantor_rate: float = 0.15
    constants: ConstantsConfig = field(default_factory=lambda: ConstantsConfig(depth=6, maximal=False))


@dataclass
class Candidate:
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    score: float
    constants: ConstantsReport
    lineage: list[str]

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "lineage": list(self.lineage),
            "mu": {"atoms": [{"x": float(x), "w": float(w)}
                             for x, w in zip(self.mu.positions, self.mu.weights)]},
            "nu": {"atoms": [{"x": float(x), "w": float(w)}
                             for x, w in zip(self.nu.positions, self.nu.weights)]},
            "constants": self.constants.to_dict(),
        }


def score(mu: DiscreteMeasure, nu: DiscreteMeasure, config: ExplorerConfig,
          lineage: list[str] | None = None) -> Candidate:
    """Score one pair; any infinite denominator term (common atoms drive pq
    and the testing constants to infinity) collapses the score to 0."""
    report = full_constants(mu, nu, config.constants)
    denom_terms = (report.opnorm ** 2, report.pq, report.cchi_forward, report.cchi_backward)
    pivotal_max = max(report.pivotal_forward, report.pivotal_backward)
    if any(not math.isfinite(t) for t in denom_terms) or not math.isfinite(pivotal_max):
        value = 0.0
    else:
        value = pivotal_max / (1.0 + sum(denom_terms))
    return Candidate(mu, nu, value, report, list(lineage or []))


def _initial_population(config: ExplorerConfig) -> list[tuple[DiscreteMeasure, DiscreteMeasure, list[str]]]:
    out = []
    n = config.population
    for i in range(n):
        kind = i % 4
        sd = config.seed * 1000003 + i
        cap = max(4, config.atom_cap // 2)
        if kind == 0:
            mu = generate_measure("uniform-random", {"n": min(cap, 10)}, seed=sd)
            nu = generate_measure("uniform-random", {"n": min(cap, 10)}, seed=sd + 501)
        elif kind == 1:
            mu = generate_measure("lacunary", {"n": min(cap, 10)}, seed=sd)
            nu = generate_measure("uniform-random", {"n": min(cap, 10)}, seed=sd + 502)
        elif kind == 2:
            mu = generate_measure("cantor", {"depth": 3}, seed=sd)
            nu = generate_measure("adversarial-clustered", {"clusters": 2, "per_cluster": 4}, seed=sd + 503)
        else:
            mu = generate_measure("adversarial-clustered", {"clusters": 3, "per_cluster": 3}, seed=sd)
            nu = generate_measure("lacunary", {"n": min(cap, 8)}, seed=sd + 504)
        mu, nu = _ensure_disjoint(mu, nu)
        out.append((mu, nu, [f"init:{i}"]))
    return out


def _ensure_disjoint(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    common = common_atom_positions(mu, nu)
    if not common.size:
        return mu, nu
    pos = nu.positions.copy()
    gaps = np.diff(np.unique(np.concatenate([mu.positions, nu.positions])))
    step = float(gaps[gaps > 0].min()) / 7.0 if gaps.size and (gaps > 0).any() else 1e-6
    for c in common:
        pos[pos == c] += step
    return mu, DiscreteMeasure(pos, nu.weights, nu.label)


def _mutate(mu: DiscreteMeasure, nu: DiscreteMeasure, config: ExplorerConfig,
            rng: np.random.Generator, lineage: list[str]) -> tuple[DiscreteMeasure, DiscreteMeasure, list[str]]:
    """One mutation round over both measures; respects the atom cap and keeps
    supports disjoint."""
    tags = list(lineage)

    def jitter(m: DiscreteMeasure) -> DiscreteMeasure:
        pos = m.positions.copy()
        span = max(float(pos[-1] - pos[0]), 1e-9)
        k = int(rng.integers(0, len(pos)))
        pos[k] += span * 10.0 ** rng.uniform(-6.0, -1.0) * (1 if rng.uniform() < 0.5 else -1)
        return DiscreteMeasure(pos, m.weights, m.label)

    def reweight(m: DiscreteMeasure) -> DiscreteMeasure:
        w = m.weights.copy()
        k = int(rng.integers(0, len(w)))
        w[k] *= 10.0 ** rng.normal(0.0, 0.5)
        return DiscreteMeasure(m.positions, w, m.label)

    def split(m: DiscreteMeasure) -> DiscreteMeasure:
        if len(m) + 1 > config.atom_cap:
            return m
        pos, w = m.positions.copy(), m.weights.copy()
        k = int(rng.integers(0, len(pos)))
        span = max(float(pos[-1] - pos[0]), 1e-9)
        delta = span * 10.0 ** rng.uniform(-7.0, -3.0)
        new_pos = np.concatenate([pos, [pos[k] + delta]])
        new_w = np.concatenate([w, [w[k] / 2.0]])
        new_w[k] /= 2.0
        return DiscreteMeasure(new_pos, new_w, m.label)

    def merge(m: DiscreteMeasure) -> DiscreteMeasure:
        if len(m) < 3:
            return m
        gaps = np.diff(m.positions)
        k = int(np.argmin(gaps))
        pos = np.delete(m.positions, k + 1)
        w = m.weights.copy()
        w[k] += w[k + 1]
        w = np.delete(w, k + 1)
        return DiscreteMeasure(pos, w, m.label)

    def cantor_block(m: DiscreteMeasure) -> DiscreteMeasure:
        depth = 2
        block = 2 ** depth
        if len(m) + block - 1 > config.atom_cap:
            return m
        pos, w = m.positions.copy(), m.weights.copy()
        k = int(rng.integers(0, len(pos)))
        span = max(float(pos[-1] - pos[0]), 1e-9)
        width = span * 10.0 ** rng.uniform(-6.0, -2.0)
        base = generate_measure("cantor", {"depth": depth}, seed=0)
        new_pos = pos[k] + base.positions * width
        new_w = np.full(block, w[k] / block)
        pos = np.delete(pos, k)
        w = np.delete(w, k)
        return DiscreteMeasure(np.concatenate([pos, new_pos]), np.concatenate([w, new_w]), m.label)

    for name, op, rate in (("jitter", jitter, config.jitter_rate),
                           ("reweight", reweight, config.reweight_rate),
                           ("splitmerge", None, config.split_merge_rate),
                           ("cantor", cantor_block, config.cantor_rate)):
        if rng.uniform() >= rate:
            continue
        side = int(rng.integers(0, 2))
        if name == "splitmerge":
            op = split if rng.uniform() < 0.5 else merge
        target = mu if side == 0 else nu
        mutated = op(target)
        if side == 0:
            mu = mutated
        else:
            nu = mutated
        tags.append(f"{name}:{'mu' if side == 0 else 'nu'}")
    mu, nu = _ensure_disjoint(mu, nu)
    return mu, nu, tags


def search(config: ExplorerConfig) -> list[Candidate]:
    """Elitist evolutionary loop; deterministic per seed, max score monotone
    nondecreasing across generations, top candidates returned ranked."""
    population = [score(m, n, config, lin) for m, n, lin in _initial_population(config)]
    population.sort(key=lambda c: (-c.score, c.lineage))
    for gen in range(config.generations):
        elites = population[: config.elite]
        offspring: list[Candidate] = []
        idx = 0
        while len(elites) + len(offspring) < config.population:
            parent = elites[idx % len(elites)]
            rng = np.random.default_rng(
                np.random.SeedSequence([config.seed & 0xFFFFFFFFFFFFFFFF, gen + 1, idx]))
            m, n, lin = _mutate(parent.mu, parent.nu, config, rng,
                                parent.lineage + [f"gen{gen + 1}"])
            try:
                offspring.append(score(m, n, config, lin))
            except ValidationError:
                pass
            idx += 1
        population = elites + offspring
        population.sort(key=lambda c: (-c.score, c.lineage))
    return population
