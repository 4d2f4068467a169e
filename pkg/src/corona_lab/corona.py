"""Stopping-interval selection, the stopping tree, corona families and the
packing ratio.

A dyadic candidate I below the current stopping father F fires when

    [P_I(chi_{F minus I} dmu)]^2 nu(I) >= K mu(I)   (and the left side is > 0),

scanning top-down and never descending into a selected child, so selected
children are maximal.  With K > 2P (P the pivotal constant at the same depth)
the children of every node carry at most half of its mu-mass; K = 4P gives a
quarter.
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
)
from .measure import DiscreteMeasure, ValidationError, combined_positions
from .transform import poisson_kernel_weights

__all__ = [
    "StoppingNode",
    "StoppingTree",
    "build_stopping_tree",
    "packing_ratio",
    "generation_mass_profile",
    "CoronaFamilies",
    "corona_families",
    "stopping_distance",
]


@dataclass
class StoppingNode:
    interval: DyadicInterval
    generation: int
    mu_mass: float
    nu_mass: float
    criterion_lhs: float  # [P_I(chi_{father minus I} dmu)]^2 nu(I); 0 for the root
    children: list["StoppingNode"] = field(default_factory=list)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass
class StoppingTree:
    root: StoppingNode
    threshold: float
    depth_cap: int
    lattice: ShiftedLattice
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    parents: dict[DyadicInterval, DyadicInterval] = field(default_factory=dict)

    def nodes(self) -> list[StoppingNode]:
        return list(self.root.walk())

    def node_map(self) -> dict[DyadicInterval, StoppingNode]:
        return {n.interval: n for n in self.root.walk()}

    def stopping_father(self, interval: DyadicInterval) -> DyadicInterval | None:
        return self.parents.get(interval)


def _mu_range(mu: DiscreteMeasure, interval: DyadicInterval) -> tuple[int, int]:
    lo = int(np.searchsorted(mu.positions, interval.left, side="left"))
    hi = int(np.searchsorted(mu.positions, interval.right, side="left"))
    return lo, hi


def build_stopping_tree(mu: DiscreteMeasure, nu: DiscreteMeasure, lattice: ShiftedLattice,
                        root: DyadicInterval, threshold: float, depth_cap: int) -> StoppingTree:
    """Top-down construction over the combined-support lattice tree.

    Intervals with mu(I) = 0 are selected as soon as the Poisson term and
    nu(I) are positive (the criterion reads ">= K*0"); recursion inside them
    ends immediately since they carry no mu-mass to re-partition.
    """
    if threshold <= 0:
        raise ValidationError("stopping threshold K must be > 0")
    points = combined_positions(mu, nu)
    lattice_tree = build_lattice_tree(points, root, depth_cap, stop_at_single=True)
    if lattice_tree is None:
        raise ValidationError("no support inside the root interval")
    root_mu = mu.mass(root.as_interval())
    if root_mu <= 0:
        raise ValidationError("mu(root) must be > 0")

    def masses(iv: DyadicInterval) -> tuple[float, float]:
        a, b = _mu_range(mu, iv)
        c, d = _mu_range(nu, iv)
        return mu.range_mass(a, b), nu.range_mass(c, d)

    def poisson_mu_outside(father: DyadicInterval, iv: DyadicInterval) -> float:
        kw = poisson_kernel_weights(mu, iv.center, iv.length)
        f_lo, f_hi = _mu_range(mu, father)
        i_lo, i_hi = _mu_range(mu, iv)
        return float(kw[f_lo:f_hi].sum() - kw[i_lo:i_hi].sum())

    parents: dict[DyadicInterval, DyadicInterval] = {}

    def scan(parent_lattice_node: LatticeNode, father: StoppingNode) -> None:
        """Select maximal stopping descendants of the father among the lattice
        children; descend into unselected candidates, restart inside selected
        ones with the child as the new father."""
        for child in parent_lattice_node.children:
            iv = child.interval
            m, n = masses(iv)
            p = poisson_mu_outside(father.interval, iv)
            lhs = p * p * n
            if lhs >= threshold * m and lhs > 0.0:
                stop_child = StoppingNode(iv, father.generation + 1, m, n, lhs)
                father.children.append(stop_child)
                parents[iv] = father.interval
                if m > 0:
                    scan(child, stop_child)
            else:
                scan(child, father)

    m0, n0 = masses(root)
    root_node = StoppingNode(root, 0, m0, n0, 0.0)
    scan(lattice_tree, root_node)
    return StoppingTree(root_node, threshold, depth_cap, lattice, mu, nu, parents)


def packing_ratio(tree: StoppingTree, mu: DiscreteMeasure) -> float:
    """max over nodes of (sum of children's mu-mass) / (node's mu-mass)."""
    best = 0.0
    for node in tree.root.walk():
        if node.mu_mass > 0 and node.children:
            best = max(best, sum(c.mu_mass for c in node.children) / node.mu_mass)
    return best


def generation_mass_profile(tree: StoppingTree) -> list[float]:
    """Total mu-mass of the stopping intervals at each generation >= 1."""
    sums: dict[int, float] = {}
    for node in tree.root.walk():
        if node.generation >= 1:
            sums[node.generation] = sums.get(node.generation, 0.0) + node.mu_mass
    if not sums:
        return []
    return [sums.get(g, 0.0) for g in range(1, max(sums) + 1)]


# ---------------------------------------------------------------------------
# Corona families

@dataclass
class CoronaFamilies:
    """O_S per stopping interval: intervals of both lattices whose smallest
    enclosing stopping interval is S and which sit inside no stopping child."""

    assignment: dict[DyadicInterval, DyadicInterval]
    by_node: dict[DyadicInterval, list[DyadicInterval]]
    tree: StoppingTree

    def family(self, stopping_interval: DyadicInterval) -> list[DyadicInterval]:
        return self.by_node.get(stopping_interval, [])

    def q_family(self, stopping_interval: DyadicInterval) -> list[DyadicInterval]:
        """Q_S: union of O_{S'} over stopping descendants of S (inclusive)."""
        node_map = self.tree.node_map()
        node = node_map[stopping_interval]
        out: list[DyadicInterval] = []
        for sn in node.walk():
            out.extend(self.by_node.get(sn.interval, []))
        return out


def corona_families(tree: StoppingTree, lattices: tuple[ShiftedLattice, ShiftedLattice],
                    window_depth: int | None = None) -> CoronaFamilies:
    """Assign every live interval of both lattices (inside the root, within
    the window) to its corona family; the families partition the universe."""
    depth = tree.depth_cap if window_depth is None else window_depth
    points = combined_positions(tree.mu, tree.nu)
    assignment: dict[DyadicInterval, DyadicInterval] = {}
    by_node: dict[DyadicInterval, list[DyadicInterval]] = {}

    def assign(iv: DyadicInterval) -> None:
        if iv in assignment:
            return  # aligned lattices can present the same interval twice
        owner = tree.root
        descending = True
        while descending:
            descending = False
            for child in owner.children:
                if child.interval.contains(iv):
                    owner = child
                    descending = True
                    break
        assignment[iv] = owner.interval
        by_node.setdefault(owner.interval, []).append(iv)

    for lattice in lattices:
        anchor = DyadicInterval(tree.root.interval.scale, 0, lattice.shift)
        # enumerate the live intervals of this lattice that fit inside the root
        offset = math.floor((tree.root.interval.left - lattice.shift) / anchor.length)
        for idx in (offset, offset + 1):
            cand_root = DyadicInterval(tree.root.interval.scale, idx, lattice.shift)
            sub = build_lattice_tree(points, cand_root, depth, stop_at_single=True)
            if sub is None:
                continue
            for node in sub.walk():
                if tree.root.interval.contains(node.interval):
                    assign(node.interval)
    return CoronaFamilies(assignment, by_node, tree)


def stopping_distance(tree: StoppingTree, inner: DyadicInterval, outer: DyadicInterval) -> int:
    """Generation gap r(S1, S2) between nested stopping intervals."""
    node_map = tree.node_map()
    if inner not in node_map or outer not in node_map:
        raise ValidationError("both intervals must be stopping nodes")
    if inner == outer:
        return 0
    if not outer.contains(inner):
        if inner.contains(outer):
            inner, outer = outer, inner
        else:
            raise ValidationError("stopping distance requires nested nodes")
    steps = 0
    cur = inner
    while cur != outer:
        parent = tree.parents.get(cur)
        if parent is None:
            raise ValidationError("nodes are not nested inside the stopping tree")
        cur = parent
        steps += 1
    return steps
