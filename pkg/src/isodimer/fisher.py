"""Decorated dimer graph of an isoradial graph, with critical weights.

Every degree-k vertex is replaced by 3k decoration vertices: one triangle per
incident edge, consecutive triangles linked in a circle.  Each original edge
survives as a single "long" edge between the outer corners of the triangles
attached to its two ends.  All vertices of the decorated graph have degree 3.

Edge weights are 1 on decoration edges and cot(theta_e / 2) on long edges,
which equals coth(J(theta_e)) at the self-dual coupling.

The rotation system is fixed combinatorially (it is what any planar drawing
of the decoration gives); vertex positions are provided for plotting only,
on a circle of radius 0.3 around the original vertex.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotAContourError
from .graphs import Edge, PeriodicGraph, PeriodicIsoradialGraph, ToroidalGraph, quotient
from .oracle import DEFAULT_BUDGET, enumerate_matchings

DECORATION_RADIUS = 0.3


def critical_long_weight(theta: float) -> float:
    """cot(theta/2) = (1 + cos theta) / sin theta, the critical long-edge weight."""
    return (1.0 + math.cos(theta)) / math.sin(theta)


class FisherGraph(PeriodicGraph):
    """Periodic decorated graph with per-edge weights and roles.

    Attributes:
        base: the isoradial graph it decorates.
        weights: per-edge dimer weight (1 on decorations, cot(theta/2) long).
        roles: per-edge tag in {"triangle", "link", "long"}.
        long_edge: base edge index -> decorated edge index.
        long_base: decorated edge index -> base edge index (long edges only).
    """

    def __init__(self, base: PeriodicIsoradialGraph):
        self.base = base
        ids: list[str] = []
        pos: list[np.ndarray] = []
        vert_index: dict[tuple[int, int, str], int] = {}

        # decoration vertices: (vertex, rotation slot, corner) -> index
        for v in range(base.num_vertices):
            darts = base.rotation[v]
            k = len(darts)
            angles = [math.atan2(*base.dart_vector(d)[::-1]) for d in darts]
            for j, d in enumerate(darts):
                gap_prev = (angles[j] - angles[j - 1]) % (2 * math.pi)
                gap_next = (angles[(j + 1) % k] - angles[j]) % (2 * math.pi)
                if k == 1:
                    gap_prev = gap_next = 2 * math.pi
                eps = 0.25 * min(gap_prev, gap_next)
                for corner, ang in (("a", angles[j]),
                                    ("b", angles[j] - eps),
                                    ("c", angles[j] + eps)):
                    vert_index[(v, j, corner)] = len(ids)
                    ids.append(f"{base.ids[v]}.{j}{corner}")
                    pos.append(base.pos[v] + DECORATION_RADIUS
                               * np.array([math.cos(ang), math.sin(ang)]))

        edges: list[Edge] = []
        roles: list[str] = []
        tri_ab: dict[tuple[int, int], int] = {}
        tri_bc: dict[tuple[int, int], int] = {}
        tri_ca: dict[tuple[int, int], int] = {}
        links: dict[tuple[int, int], int] = {}

        def add(u, v, off, role):
            edges.append(Edge(u, v, off))
            roles.append(role)
            return len(edges) - 1

        for v in range(base.num_vertices):
            darts = base.rotation[v]
            k = len(darts)
            for j in range(k):
                a = vert_index[(v, j, "a")]
                b = vert_index[(v, j, "b")]
                c = vert_index[(v, j, "c")]
                tri_ab[(v, j)] = add(a, b, (0, 0), "triangle")
                tri_bc[(v, j)] = add(b, c, (0, 0), "triangle")
                tri_ca[(v, j)] = add(c, a, (0, 0), "triangle")
            for j in range(k):
                c = vert_index[(v, j, "c")]
                b_next = vert_index[(v, (j + 1) % k, "b")]
                links[(v, j)] = add(c, b_next, (0, 0), "link")

        # long edges: connect the outer corners across each base edge
        slot_of_dart = {}
        for v in range(base.num_vertices):
            for j, d in enumerate(base.rotation[v]):
                slot_of_dart[d] = (v, j)
        self.long_edge: dict[int, int] = {}
        self.long_base: dict[int, int] = {}
        for e, be in enumerate(base.edges):
            vu, ju = slot_of_dart[2 * e]
            vv, jv = slot_of_dart[2 * e + 1]
            au = vert_index[(vu, ju, "a")]
            av = vert_index[(vv, jv, "a")]
            idx = add(au, av, be.offset, "long")
            self.long_edge[e] = idx
            self.long_base[idx] = e

        # combinatorial rotation (ccw), as a planar drawing realizes it:
        #   outer corner a: [b, long, c]; corner b: [link in, a, next side]
        #   corner c: [side in, a, link out]
        rotation = [None] * len(ids)
        for v in range(base.num_vertices):
            k = len(base.rotation[v])
            for j in range(k):
                a = vert_index[(v, j, "a")]
                b = vert_index[(v, j, "b")]
                c = vert_index[(v, j, "c")]
                d = base.rotation[v][j]
                long_idx = self.long_edge[d >> 1]
                long_dart = 2 * long_idx + (0 if d & 1 == 0 else 1)
                rotation[a] = [2 * tri_ab[(v, j)], long_dart, 2 * tri_ca[(v, j)] + 1]
                rotation[b] = [2 * links[(v, (j - 1) % k)] + 1,
                               2 * tri_ab[(v, j)] + 1,
                               2 * tri_bc[(v, j)]]
                rotation[c] = [2 * tri_bc[(v, j)] + 1,
                               2 * tri_ca[(v, j)],
                               2 * links[(v, j)]]

        super().__init__(ids, np.array(pos), base.basis, edges, rotation=rotation)
        self.roles = roles
        self.weights = np.array(
            [critical_long_weight(base.theta[self.long_base[i]])
             if r == "long" else 1.0
             for i, r in enumerate(roles)])
        assert all(len(r) == 3 for r in self.rotation), "Fisher graph must be cubic"

    def long_edges(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r == "long"]

    def decoration_edges(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r != "long"]

    def to_spec(self) -> dict:
        doc = super().to_spec()
        for rec, role, w in zip(doc["edges"], self.roles, self.weights):
            rec["role"] = role
            rec["weight"] = float(w)
        return doc


def fisher_graph(base: PeriodicIsoradialGraph) -> FisherGraph:
    """Decorate an isoradial graph; output has 3 deg(v) vertices per vertex."""
    return FisherGraph(base)


def critical_weights(fg: FisherGraph) -> np.ndarray:
    """Per-edge weight map: 1 on decorations, cot(theta/2) on long edges."""
    return fg.weights.copy()


def matchings_of_contour(fg: FisherGraph, n: int, contour_edges,
                         budget=DEFAULT_BUDGET) -> int:
    """Number of dimer configurations of the decorated torus quotient whose
    long-edge pattern is the complement of the given contour.

    ``contour_edges`` indexes edges of the quotient of the base graph at the
    same n (see ToroidalGraph edge order).  The count is 2^{V(G_n)}; when the
    decorated quotient is within the enumeration budget this is verified by
    explicit enumeration.
    """
    tg_base = quotient(fg.base, n)
    contour = set(int(e) for e in contour_edges)
    degree = [0] * tg_base.num_vertices
    for e in contour:
        te = tg_base.edges[e]
        degree[te.u] += 1
        degree[te.v] += 1
    if any(d % 2 for d in degree):
        raise NotAContourError("contour has a vertex of odd degree")

    expected = 2 ** tg_base.num_vertices
    tg_f = quotient(fg, n)
    if tg_f.num_vertices <= budget.max_matching_vertices:
        forced, forbidden = [], []
        for idx, te in enumerate(tg_f.edges):
            if fg.roles[te.base] != "long":
                continue
            g_edge_idx = (te.cell[0] * n + te.cell[1]) * fg.base.num_edges \
                + fg.long_base[te.base]
            if g_edge_idx in contour:
                forbidden.append(idx)
            else:
                forced.append(idx)
        count, _ = enumerate_matchings(
            tg_f.num_vertices, [(e.u, e.v) for e in tg_f.edges],
            [fg.weights[e.base] for e in tg_f.edges],
            forced=forced, forbidden=forbidden, budget=budget)
        assert count == expected, (
            f"contour completion count {count} != 2^V = {expected}")
    return expected
