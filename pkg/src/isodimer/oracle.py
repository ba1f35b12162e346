"""Brute-force ground truth at desk scale.

Exhaustive enumeration of perfect matchings, spin configurations, even
(polygonal-contour) subgraphs, and cycle-rooted spanning forests.  Every
routine refuses inputs beyond its budget rather than degrade, and iterates
in a deterministic order so reruns are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError
from .graphs import PeriodicGraph, ToroidalGraph


@dataclass
class EnumerationBudget:
    max_matching_vertices: int = 40
    max_spin_vertices: int = 20
    max_subset_edges: int = 20
    max_crsf_edges: int = 14
    max_crsf_vertices: int = 6


DEFAULT_BUDGET = EnumerationBudget()


# ---------------------------------------------------------------------------
# Perfect matchings
# ---------------------------------------------------------------------------


def enumerate_matchings(num_vertices, edges, weights=None, forced=(), forbidden=(),
                        budget: EnumerationBudget = DEFAULT_BUDGET,
                        marginals: bool = False):
    """Exact weighted count of perfect matchings.

    ``edges`` is a list of (u, v) pairs; parallel edges are allowed, loops
    never match.  Returns (count, weighted_sum) or, with marginals=True,
    (count, weighted_sum, per_edge_marginal) where the marginal of e is
    sum_{M containing e} w(M) / Z.

    ``forced`` edges must be in every matching, ``forbidden`` in none.
    Branches on the lowest-index unmatched vertex.
    """
    if num_vertices > budget.max_matching_vertices:
        raise BudgetExceededError(
            f"{num_vertices} vertices exceeds matching budget "
            f"{budget.max_matching_vertices}")
    if weights is None:
        weights = [1.0] * len(edges)
    forced = set(forced)
    forbidden = set(forbidden)
    if forced & forbidden:
        return 0, 0.0 if not marginals else (0, 0.0, np.zeros(len(edges)))

    matched = [False] * num_vertices
    base_weight = 1.0
    ok = True
    for e in forced:
        u, v = edges[e]
        if u == v or matched[u] or matched[v]:
            ok = False
            break
        matched[u] = matched[v] = True
        base_weight *= weights[e]
    incident = [[] for _ in range(num_vertices)]
    for idx, (u, v) in enumerate(edges):
        if idx in forced or idx in forbidden or u == v:
            continue
        incident[u].append((idx, v))
        if u != v:
            incident[v].append((idx, u))

    count = 0
    total = 0.0
    edge_totals = np.zeros(len(edges)) if marginals else None
    stack = []  # chosen edge indices

    def recurse(weight):
        nonlocal count, total
        if not ok:
            return
        v = next((i for i in range(num_vertices) if not matched[i]), None)
        if v is None:
            count += 1
            total += weight
            if marginals:
                for e in stack:
                    edge_totals[e] += weight
                for e in forced:
                    edge_totals[e] += weight
            return
        matched[v] = True
        for idx, other in incident[v]:
            if matched[other]:
                continue
            matched[other] = True
            stack.append(idx)
            recurse(weight * weights[idx])
            stack.pop()
            matched[other] = False
        matched[v] = False

    if ok:
        recurse(base_weight)
    if marginals:
        marg = edge_totals / total if total else np.zeros(len(edges))
        return count, total, marg
    return count, total


def toroidal_matchings(tg: ToroidalGraph, weights, **kw):
    """enumerate_matchings specialized to a torus quotient with per-base-edge
    weights (indexed by the base edge of each torus copy)."""
    edge_pairs = [(e.u, e.v) for e in tg.edges]
    w = [weights[e.base] for e in tg.edges]
    return enumerate_matchings(tg.num_vertices, edge_pairs, w, **kw)


# ---------------------------------------------------------------------------
# Ising partition function
# ---------------------------------------------------------------------------


def ising_partition(num_vertices, edges, couplings,
                    budget: EnumerationBudget = DEFAULT_BUDGET) -> float:
    """Exact sum over the 2^V spin configurations of exp(sum_e J_e s_u s_v).

    Loops contribute the constant factor exp(J_e).
    """
    if num_vertices > budget.max_spin_vertices:
        raise BudgetExceededError(
            f"{num_vertices} spins exceeds budget {budget.max_spin_vertices}")
    loop_energy = sum(j for (u, v), j in zip(edges, couplings) if u == v)
    pairs = [((u, v), j) for (u, v), j in zip(edges, couplings) if u != v]
    configs = np.arange(2 ** num_vertices, dtype=np.int64)
    spins = ((configs[:, None] >> np.arange(num_vertices)) & 1).astype(np.int8)
    spins = 2 * spins - 1
    energy = np.zeros(len(configs))
    for (u, v), j in pairs:
        energy += j * spins[:, u] * spins[:, v]
    return float(np.exp(energy + loop_energy).sum())


def toroidal_ising_partition(tg: ToroidalGraph, couplings,
                             budget: EnumerationBudget = DEFAULT_BUDGET) -> float:
    edges = [(e.u, e.v) for e in tg.edges]
    j = [couplings[e.base] for e in tg.edges]
    return ising_partition(tg.num_vertices, edges, j, budget=budget)


# ---------------------------------------------------------------------------
# Even subgraphs (polygonal contours)
# ---------------------------------------------------------------------------


def even_subgraphs(num_vertices, edges, wraps=None, homology_trivial=False,
                   budget: EnumerationBudget = DEFAULT_BUDGET):
    """All edge subsets with even degree at every vertex, as index tuples.

    Loops keep every parity, so they are unconstrained.  With
    homology_trivial=True only subsets whose total wrap is even in both
    directions are yielded (contours that bound on the torus, mod 2).
    """
    if len(edges) > budget.max_subset_edges:
        raise BudgetExceededError(
            f"{len(edges)} edges exceeds subset budget {budget.max_subset_edges}")
    m = len(edges)
    out = []
    chosen = []
    degree = [0] * num_vertices
    wrap = [0, 0]

    def recurse(i):
        if i == m:
            if all(d % 2 == 0 for d in degree):
                if not homology_trivial or (wrap[0] % 2 == 0 and wrap[1] % 2 == 0):
                    out.append(tuple(chosen))
            return
        recurse(i + 1)
        u, v = edges[i]
        degree[u] += 1
        degree[v] += 1
        if wraps is not None:
            wrap[0] += wraps[i][0]
            wrap[1] += wraps[i][1]
        chosen.append(i)
        recurse(i + 1)
        chosen.pop()
        degree[u] -= 1
        degree[v] -= 1
        if wraps is not None:
            wrap[0] -= wraps[i][0]
            wrap[1] -= wraps[i][1]

    recurse(0)
    return out


def even_subgraph_sum(num_vertices, edges, edge_weights, wraps=None,
                      homology_trivial=False,
                      budget: EnumerationBudget = DEFAULT_BUDGET) -> float:
    """sum over even subgraphs C of prod_{e in C} x_e (empty set contributes 1)."""
    total = 0.0
    for subset in even_subgraphs(num_vertices, edges, wraps=wraps,
                                 homology_trivial=homology_trivial, budget=budget):
        w = 1.0
        for e in subset:
            w *= edge_weights[e]
        total += w
    return total


def toroidal_even_subgraph_sum(tg: ToroidalGraph, edge_weights,
                               homology_trivial=False,
                               budget: EnumerationBudget = DEFAULT_BUDGET) -> float:
    edges = [(e.u, e.v) for e in tg.edges]
    wraps = [e.wrap for e in tg.edges]
    x = [edge_weights[e.base] for e in tg.edges]
    return even_subgraph_sum(tg.num_vertices, edges, x, wraps=wraps,
                             homology_trivial=homology_trivial, budget=budget)


# ---------------------------------------------------------------------------
# Cycle-rooted spanning forests
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleRootedForest:
    edges: tuple[int, ...]                 # torus edge indices, one per vertex
    components: tuple[tuple[int, ...], ...]  # edge indices per component
    homologies: tuple[tuple[int, int], ...]  # cycle homology per component (up to sign)


def enumerate_crsf(tg: ToroidalGraph,
                   budget: EnumerationBudget = DEFAULT_BUDGET):
    """All spanning subgraphs whose components are unicyclic with a
    non-contractible cycle, together with each cycle's homology class.

    Works on a torus quotient; a component's cycle homology is the signed
    total wrap along the cycle, recorded up to global sign.
    """
    nv, ne = tg.num_vertices, tg.num_edges
    if ne > budget.max_crsf_edges:
        raise BudgetExceededError(
            f"{ne} edges exceeds CRSF budget {budget.max_crsf_edges}")
    if nv > budget.max_crsf_vertices:
        raise BudgetExceededError(
            f"{nv} vertices exceeds CRSF budget {budget.max_crsf_vertices}")
    from itertools import combinations

    forests = []
    for subset in combinations(range(ne), nv):
        comp = _component_split(tg, subset)
        if comp is None:
            continue
        comps, homs = comp
        forests.append(CycleRootedForest(tuple(subset), comps, homs))
    return forests


def _component_split(tg: ToroidalGraph, subset):
    """Split an edge subset into unicyclic components; None if invalid."""
    nv = tg.num_vertices
    parent = list(range(nv))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in subset:
        te = tg.edges[e]
        parent[find(te.u)] = find(te.v)
    comp_edges: dict[int, list[int]] = {}
    comp_vertices: dict[int, set[int]] = {}
    for e in subset:
        r = find(tg.edges[e].u)
        comp_edges.setdefault(r, []).append(e)
        comp_vertices.setdefault(r, set()).update((tg.edges[e].u, tg.edges[e].v))
    covered = set()
    for verts in comp_vertices.values():
        covered |= verts
    if len(covered) != nv:
        return None
    comps, homs = [], []
    for r, eds in sorted(comp_edges.items()):
        verts = comp_vertices[r]
        if len(eds) != len(verts):
            return None  # not unicyclic
        hom = _cycle_homology(tg, eds)
        if hom is None or hom == (0, 0):
            return None  # contractible or broken
        comps.append(tuple(sorted(eds)))
        homs.append(hom)
    return tuple(comps), tuple(homs)


def _cycle_homology(tg: ToroidalGraph, comp_edges):
    """Homology (up to sign) of the unique cycle in a unicyclic component."""
    degree: dict[int, int] = {}
    alive = set(comp_edges)
    for e in comp_edges:
        te = tg.edges[e]
        degree[te.u] = degree.get(te.u, 0) + 1
        degree[te.v] = degree.get(te.v, 0) + 1
    # strip leaves until only the cycle remains
    changed = True
    while changed:
        changed = False
        for e in list(alive):
            te = tg.edges[e]
            if te.u != te.v and (degree[te.u] == 1 or degree[te.v] == 1):
                alive.remove(e)
                degree[te.u] -= 1
                degree[te.v] -= 1
                changed = True
    if not alive:
        return None
    # orient the cycle: walk successor edges, accumulating signed wraps
    adj: dict[int, list[int]] = {}
    for e in alive:
        te = tg.edges[e]
        adj.setdefault(te.u, []).append(e)
        adj.setdefault(te.v, []).append(e)
    start_edge = min(alive)
    te = tg.edges[start_edge]
    wx, wy = te.wrap
    cur, used = te.v, {start_edge}
    start = te.u
    while cur != start:
        nxt = next(e for e in adj[cur] if e not in used)
        used.add(nxt)
        te = tg.edges[nxt]
        if te.u == cur:
            wx, wy = wx + te.wrap[0], wy + te.wrap[1]
            cur = te.v
        else:
            wx, wy = wx - te.wrap[0], wy - te.wrap[1]
            cur = te.u
    if len(used) != len(alive):
        return None
    if wx < 0 or (wx == 0 and wy < 0):
        wx, wy = -wx, -wy
    return (wx, wy)
