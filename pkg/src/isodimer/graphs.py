"""Periodic planar graphs with Z^2 symmetry: embeddings, faces, rhombus data.

A periodic graph is described by its fundamental domain: vertices with plane
positions, edges carrying an integer cell offset, and two period vectors.
This is exactly the quotient graph on the torus R^2 / (Z b1 + Z b2), and the
combinatorial faces of that torus embedding are recovered from the rotation
system (counterclockwise dart order around each vertex).

For isoradial graphs every face is inscribed in a circle of radius 1; each
edge is then the diagonal of a unit-side rhombus spanned by its endpoints and
the two incident circumcenters, with half-angle theta in (0, pi/2).

Crossing convention: an edge whose cell offset is (dx, dy) crosses the
vertical reference boundary dx times and the horizontal one dy times.  In the
torus quotient of size n, the wrap counts of a copy placed in cell (cx, cy)
are floor((cx+dx)/n) and floor((cy+dy)/n).  The first twist index of the
Kasteleyn machinery couples to the first (x) wrap count, which pairs it with
the first variable of the Fourier symbols.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAngleError, IsoradialityError, SchemaError

ISORADIAL_TOL = 1e-9

# ---------------------------------------------------------------------------
# Core periodic graph: darts, rotation system, faces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    offset: tuple[int, int]


class PeriodicGraph:
    """Fundamental-domain graph with explicit rotation system.

    Darts are indexed 0..2E-1; dart 2e is edge e traversed u->v, dart 2e+1
    the reverse.  ``rotation[v]`` lists the darts leaving v in ccw order.
    If no rotation is supplied it is derived from the embedded directions.
    """

    def __init__(self, ids, positions, basis, edges, rotation=None):
        self.ids = list(ids)
        self.pos = np.asarray(positions, dtype=float)
        self.basis = np.asarray(basis, dtype=float)
        self.edges = [Edge(e.u, e.v, (int(e.offset[0]), int(e.offset[1])))
                      if isinstance(e, Edge) else Edge(e[0], e[1], (int(e[2][0]), int(e[2][1])))
                      for e in edges]
        if self.pos.shape != (len(self.ids), 2):
            raise SchemaError("positions must be a (V, 2) array")
        if self.basis.shape != (2, 2) or abs(np.linalg.det(self.basis)) < 1e-12:
            raise SchemaError("basis must be two independent period vectors")
        if not np.all(np.isfinite(self.pos)):
            raise SchemaError("vertex positions must be finite")
        self.rotation = rotation if rotation is not None else self._rotation_from_embedding()
        self._dart_order = self._order_in_rotation()
        self._face_data = None

    # -- dart helpers ------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.ids)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def dart_tail(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.u if d & 1 == 0 else e.v

    def dart_head(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.v if d & 1 == 0 else e.u

    def dart_offset(self, d: int) -> tuple[int, int]:
        dx, dy = self.edges[d >> 1].offset
        return (dx, dy) if d & 1 == 0 else (-dx, -dy)

    def dart_vector(self, d: int) -> np.ndarray:
        off = np.array(self.dart_offset(d), dtype=float)
        return self.pos[self.dart_head(d)] + off @ self.basis - self.pos[self.dart_tail(d)]

    def _rotation_from_embedding(self):
        by_vertex = [[] for _ in range(self.num_vertices)]
        for d in range(2 * self.num_edges):
            vec = self.dart_vector(d)
            if np.hypot(*vec) < 1e-12:
                raise SchemaError(f"zero-length edge (dart {d})")
            by_vertex[self.dart_tail(d)].append((math.atan2(vec[1], vec[0]), d))
        rotation = []
        for v, darts in enumerate(by_vertex):
            darts.sort()
            for (a1, _), (a2, _) in zip(darts, darts[1:]):
                if a2 - a1 < 1e-12:
                    raise SchemaError(f"coincident edge directions at vertex {self.ids[v]}")
            rotation.append([d for _, d in darts])
        return rotation

    def _order_in_rotation(self):
        order = np.empty(2 * self.num_edges, dtype=int)
        for v, darts in enumerate(self.rotation):
            for k, d in enumerate(darts):
                order[d] = k
        return order

    def rotation_prev(self, d: int) -> int:
        darts = self.rotation[self.dart_tail(d)]
        return darts[(self._dart_order[d] - 1) % len(darts)]

    def face_next(self, d: int) -> int:
        """Next dart along the face lying to the left of d (ccw traversal)."""
        return self.rotation_prev(d ^ 1)

    # -- faces --------------------------------------------------------------

    def faces(self):
        """Face orbits of the torus embedding.

        Returns (faces, dart_face, dart_cell) where each face is a dart list
        in ccw order, dart_face maps a dart to its face index, and dart_cell
        gives the integer cell of the dart's tail in the face traversal frame
        (first dart at cell (0, 0)).  Every face must have zero winding and
        the count must satisfy V - E + F = 0; otherwise the data does not
        describe a planar periodic embedding.
        """
        if self._face_data is not None:
            return self._face_data
        nd = 2 * self.num_edges
        dart_face = np.full(nd, -1, dtype=int)
        dart_cell = [None] * nd
        faces = []
        for d0 in range(nd):
            if dart_face[d0] >= 0:
                continue
            orbit = []
            cell = (0, 0)
            d = d0
            while True:
                orbit.append(d)
                dart_face[d] = len(faces)
                dart_cell[d] = cell
                off = self.dart_offset(d)
                cell = (cell[0] + off[0], cell[1] + off[1])
                d = self.face_next(d)
                if d == d0:
                    break
                if dart_face[d] >= 0:
                    raise IsoradialityError("face traversal re-entered a closed orbit")
            if cell != (0, 0):
                raise IsoradialityError(
                    f"face with nonzero winding {cell}: not a planar periodic embedding")
            faces.append(orbit)
        if self.num_vertices - self.num_edges + len(faces) != 0:
            raise IsoradialityError("Euler characteristic is not 0: embedding is not cellular")
        self._face_data = (faces, dart_face, dart_cell)
        return self._face_data

    def to_spec(self) -> dict:
        return {
            "basis": self.basis.tolist(),
            "vertices": [{"id": i, "pos": list(map(float, p))}
                         for i, p in zip(self.ids, self.pos)],
            "edges": [{"u": self.ids[e.u], "v": self.ids[e.v], "offset": list(e.offset)}
                      for e in self.edges],
        }


# ---------------------------------------------------------------------------
# Isoradial graphs
# ---------------------------------------------------------------------------


def _circumcenter(p0, p1, p2):
    """Center of the circle through three non-collinear points."""
    ax, ay = p0
    bx, by = p1
    cx, cy = p2
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-12:
        return None
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    return np.array([ux, uy])


class PeriodicIsoradialGraph(PeriodicGraph):
    """Periodic graph whose every face is inscribed in a circle of radius 1.

    Construction derives, for every edge, the rhombus formed by its endpoints
    and the two incident circumcenters: half-angle ``theta[e]``, and the two
    centers lifted to the frame where the edge's tail sits in cell (0, 0).
    Rejects input violating isoradiality beyond ISORADIAL_TOL.
    """

    def __init__(self, ids, positions, basis, edges, tol: float = ISORADIAL_TOL):
        super().__init__(ids, positions, basis, edges)
        self.tol = tol
        self._inv_basis = np.linalg.inv(self.basis)
        self._build_face_geometry()
        self._build_rhombi()

    # -- face circumcenters --------------------------------------------------

    def _build_face_geometry(self):
        faces, dart_face, dart_cell = self.faces()
        self.face_center = np.zeros((len(faces), 2))       # canonical position
        self.dart_face_offset = [None] * (2 * self.num_edges)
        for f, orbit in enumerate(faces):
            lifts = []
            for d in orbit:
                cell = np.array(dart_cell[d], dtype=float)
                lifts.append(self.pos[self.dart_tail(d)] + cell @ self.basis)
            center = None
            for k in range(len(lifts)):
                center = _circumcenter(lifts[k], lifts[(k + 1) % len(lifts)],
                                       lifts[(k + 2) % len(lifts)])
                if center is not None:
                    break
            if center is None:
                raise IsoradialityError(f"face {f} is degenerate (collinear boundary)")
            radii = [np.hypot(*(p - center)) for p in lifts]
            worst = max(abs(r - 1.0) for r in radii)
            if worst > self.tol:
                raise IsoradialityError(
                    f"face {f} is not cyclic of radius 1 (max deviation {worst:.2e})")
            # canonical representative: reduce the center into the unit cell,
            # ties broken toward the smaller lexicographic lifted coordinate
            frac = center @ self._inv_basis
            cell_f = np.floor(frac + 1e-9).astype(int)
            self.face_center[f] = center - cell_f @ self.basis
            for d in orbit:
                self.dart_face_offset[d] = (int(cell_f[0] - dart_cell[d][0]),
                                            int(cell_f[1] - dart_cell[d][1]))

    def face_center_in_frame(self, d: int) -> np.ndarray:
        """Circumcenter of the face left of dart d, lifted so the dart's tail
        sits at its canonical position (cell (0, 0))."""
        _, dart_face, _ = self.faces()
        off = np.array(self.dart_face_offset[d], dtype=float)
        return self.face_center[dart_face[d]] + off @ self.basis

    # -- rhombi ---------------------------------------------------------------

    def _build_rhombi(self):
        nE = self.num_edges
        self.theta = np.zeros(nE)
        self.center_left = np.zeros((nE, 2))    # in the u-frame of the edge
        self.center_right = np.zeros((nE, 2))
        _, dart_face, _ = self.faces()
        self.edge_face_left = np.array([dart_face[2 * e] for e in range(nE)])
        self.edge_face_right = np.array([dart_face[2 * e + 1] for e in range(nE)])
        for e, edge in enumerate(self.edges):
            pu = self.pos[edge.u]
            pv = self.pos[edge.v] + np.array(edge.offset, dtype=float) @ self.basis
            cl = self.face_center_in_frame(2 * e)
            cr = self.face_center_in_frame(2 * e + 1) + np.array(edge.offset, float) @ self.basis
            m = 0.5 * (pu + pv)
            half_primal = 0.5 * np.hypot(*(pv - pu))
            hl, hr = np.hypot(*(cl - m)), np.hypot(*(cr - m))
            for corner, c in ((edge.u, cl), (edge.u, cr)):
                r = np.hypot(*(c - self.pos[corner]))
                if abs(r - 1.0) > self.tol * 10:
                    raise IsoradialityError(
                        f"edge {e}: rhombus side {r:.12f} deviates from 1")
            if abs(hl - hr) > self.tol * 10 or np.dot(cl - m, cr - m) > -0.5 * hl * hr:
                raise IsoradialityError(
                    f"edge {e}: incident circumcenters are not symmetric about the edge")
            theta = math.atan2(hl, half_primal)
            if not (self.tol < theta < math.pi / 2 - self.tol):
                raise DegenerateAngleError(
                    f"edge {e}: half-angle {theta:.3e} outside (0, pi/2)")
            self.theta[e] = theta
            self.center_left[e] = cl
            self.center_right[e] = cr

    def rhombus_side_directions(self, e: int) -> tuple[complex, complex]:
        """Unit vectors from the edge tail u to the two circumcenters."""
        pu = self.pos[self.edges[e].u]
        a = self.center_left[e] - pu
        b = self.center_right[e] - pu
        return complex(*a), complex(*b)


# ---------------------------------------------------------------------------
# Loading / standard lattices
# ---------------------------------------------------------------------------


def load_graph(doc) -> PeriodicIsoradialGraph:
    """Build a validated isoradial graph from a spec document.

    ``doc`` may be a dict, a JSON string, or a path to a JSON file following
    the schema {"basis": [[..], [..]], "vertices": [{"id", "pos"}],
    "edges": [{"u", "v", "offset"}]}.
    """
    if isinstance(doc, str):
        text = doc
        if not doc.lstrip().startswith("{"):
            with open(doc, "r", encoding="utf-8") as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("graph spec must be a JSON object")
    for key in ("basis", "vertices", "edges"):
        if key not in doc:
            raise SchemaError(f"missing key {key!r}")
    ids = []
    positions = []
    for rec in doc["vertices"]:
        if not isinstance(rec, dict) or "id" not in rec or "pos" not in rec:
            raise SchemaError("each vertex needs 'id' and 'pos'")
        if rec["id"] in ids:
            raise SchemaError(f"duplicate vertex id {rec['id']!r}")
        ids.append(rec["id"])
        positions.append([float(rec["pos"][0]), float(rec["pos"][1])])
    index = {vid: k for k, vid in enumerate(ids)}
    edges = []
    seen = set()
    for rec in doc["edges"]:
        if not isinstance(rec, dict) or not {"u", "v", "offset"} <= rec.keys():
            raise SchemaError("each edge needs 'u', 'v', 'offset'")
        if rec["u"] not in index or rec["v"] not in index:
            raise SchemaError(f"edge references unknown vertex in {rec}")
        u, v = index[rec["u"]], index[rec["v"]]
        off = (int(rec["offset"][0]), int(rec["offset"][1]))
        key = (u, v, off)
        rkey = (v, u, (-off[0], -off[1]))
        if key in seen or rkey in seen:
            raise SchemaError(f"duplicate edge {rec}")
        seen.add(key)
        edges.append(Edge(u, v, off))
    basis = doc["basis"]
    return PeriodicIsoradialGraph(ids, positions, basis, edges)


def standard_lattice(kind: str) -> PeriodicIsoradialGraph:
    """Canonical critical embedding (circumradius 1) of a named lattice."""
    if kind == "square":
        s = math.sqrt(2.0)
        return PeriodicIsoradialGraph(
            ["v0"], [[0.0, 0.0]], [[s, 0.0], [0.0, s]],
            [Edge(0, 0, (1, 0)), Edge(0, 0, (0, 1))])
    if kind == "triangular":
        # equilateral triangles of side sqrt(3) have circumradius 1
        s = math.sqrt(3.0)
        b1 = [s, 0.0]
        b2 = [s / 2.0, s * math.sqrt(3.0) / 2.0]
        return PeriodicIsoradialGraph(
            ["v0"], [[0.0, 0.0]], [b1, b2],
            [Edge(0, 0, (1, 0)), Edge(0, 0, (0, 1)), Edge(0, 0, (-1, 1))])
    if kind == "honeycomb":
        # regular hexagons of side 1 have circumradius 1
        return skewed_honeycomb((math.pi / 3, math.pi / 3, math.pi / 3))
    raise ValueError(f"unknown lattice kind {kind!r}")


def skewed_honeycomb(thetas) -> PeriodicIsoradialGraph:
    """Two-vertex isoradial graph with prescribed rhombus half-angles.

    The three half-angles must lie in (0, pi/2) and sum to pi; equal angles
    pi/3 give the regular honeycomb.  Useful as a generic test lattice.
    """
    t1, t2, t3 = thetas
    if abs(t1 + t2 + t3 - math.pi) > 1e-12:
        raise ValueError("half-angles must sum to pi")
    deltas = [0.0, t1 + t2, t1 + 2 * t2 + t3]
    d = [2 * math.cos(t) * np.array([math.cos(a), math.sin(a)])
         for t, a in zip((t1, t2, t3), deltas)]
    b1 = d[1] - d[0]
    b2 = d[2] - d[0]
    return PeriodicIsoradialGraph(
        ["u", "w"], [[0.0, 0.0], list(d[0])], [list(b1), list(b2)],
        [Edge(0, 1, (0, 0)), Edge(0, 1, (1, 0)), Edge(0, 1, (0, 1))])


# ---------------------------------------------------------------------------
# Dual graph
# ---------------------------------------------------------------------------


def dual(g: PeriodicIsoradialGraph) -> PeriodicIsoradialGraph:
    """Dual isoradial graph: vertices at circumcenters, theta* = pi/2 - theta.

    The dual edge of e runs from the face right of e to the face on its left
    (primal direction rotated by +90 degrees).
    """
    faces, dart_face, _ = g.faces()
    ids = [f"f{k}" for k in range(len(faces))]
    positions = [list(map(float, g.face_center[k])) for k in range(len(faces))]
    edges = []
    for e, edge in enumerate(g.edges):
        off_l = g.dart_face_offset[2 * e]
        off_r = g.dart_face_offset[2 * e + 1]
        off = (off_l[0] - off_r[0] - edge.offset[0],
               off_l[1] - off_r[1] - edge.offset[1])
        edges.append(Edge(int(g.edge_face_right[e]), int(g.edge_face_left[e]), off))
    return PeriodicIsoradialGraph(ids, positions, g.basis, edges, tol=g.tol)


def translate_isomorphic(g1: PeriodicGraph, g2: PeriodicGraph, tol: float = 1e-7) -> bool:
    """True when g2 is g1 shifted by a global translation (modulo periods)."""
    if g1.num_vertices != g2.num_vertices or g1.num_edges != g2.num_edges:
        return False
    if not np.allclose(g1.basis, g2.basis, atol=tol):
        return False
    inv_b = np.linalg.inv(g1.basis)

    def reduced(p):
        f = p @ inv_b
        return f - np.floor(f + 1e-7)

    for v0 in range(g2.num_vertices):
        shift = g2.pos[v0] - g1.pos[0]
        mapping = {}
        ok = True
        for i in range(g1.num_vertices):
            target = reduced(g1.pos[i] + shift)
            match = [j for j in range(g2.num_vertices)
                     if _frac_close(reduced(g2.pos[j]), target, tol)]
            if len(match) != 1:
                ok = False
                break
            mapping[i] = match[0]
        if not ok:
            continue
        keys1 = set()
        for e in g1.edges:
            lift = (g1.pos[e.v] + np.array(e.offset) @ g1.basis + shift) - (g1.pos[e.u] + shift)
            keys1.add((mapping[e.u], mapping[e.v], round(lift[0], 6), round(lift[1], 6)))
        keys2 = set()
        for e in g2.edges:
            lift = g2.pos[e.v] + np.array(e.offset) @ g2.basis - g2.pos[e.u]
            keys2.add((e.u, e.v, round(lift[0], 6), round(lift[1], 6)))
            keys2.add((e.v, e.u, round(-lift[0], 6), round(-lift[1], 6)))
        if keys1 <= keys2:
            return True
    return False


def _frac_close(a, b, tol):
    d = np.abs(a - b)
    d = np.minimum(d, 1.0 - d)
    return bool(np.all(d < tol))


# ---------------------------------------------------------------------------
# Torus quotients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusEdge:
    u: int                    # quotient vertex index
    v: int
    wrap: tuple[int, int]     # boundary crossing counts (x, y)
    base: int                 # edge index in the fundamental domain
    cell: tuple[int, int]     # cell the base copy starts in


class ToroidalGraph:
    """Quotient G/nZ^2 of a periodic graph.

    Vertices are (v, cx, cy) with cells in {0..n-1}^2, flattened as
    ``(v * n + cx) * n + cy``.  Each base edge appears once per cell; its wrap
    counts record signed crossings of the two reference boundary paths, which
    is what the twisted Kasteleyn matrices flip signs on.
    """

    def __init__(self, base: PeriodicGraph, n: int):
        if n < 1:
            raise ValueError("n must be a positive integer")
        self.base = base
        self.n = n
        self.edges: list[TorusEdge] = []
        for cx in range(n):
            for cy in range(n):
                for b, e in enumerate(base.edges):
                    hx, hy = cx + e.offset[0], cy + e.offset[1]
                    self.edges.append(TorusEdge(
                        u=self.vertex_index(e.u, cx, cy),
                        v=self.vertex_index(e.v, hx % n, hy % n),
                        wrap=(hx // n, hy // n),
                        base=b, cell=(cx, cy)))

    def vertex_index(self, v: int, cx: int, cy: int) -> int:
        return (v * self.n + cx) * self.n + cy

    def vertex_label(self, idx: int):
        v, rem = divmod(idx, self.n * self.n)
        cx, cy = divmod(rem, self.n)
        return (v, cx, cy)

    @property
    def num_vertices(self) -> int:
        return self.base.num_vertices * self.n * self.n

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def total_crossings(self) -> tuple[int, int]:
        """Signed crossing totals of the two reference paths (scale as n)."""
        wx = sum(e.wrap[0] for e in self.edges)
        wy = sum(e.wrap[1] for e in self.edges)
        return wx, wy

    def wrap_against_shifted_paths(self, e: TorusEdge, shift: tuple[int, int]):
        """Wrap counts measured against boundary paths moved to x=sx, y=sy.

        Used to check that downstream quantities do not depend on the path
        choice.  shift=(0, 0) reproduces ``e.wrap``.
        """
        sx, sy = shift
        cx, cy = e.cell
        dx, dy = self.base.edges[e.base].offset
        wx = (cx + dx - sx) // self.n - (cx - sx) // self.n
        wy = (cy + dy - sy) // self.n - (cy - sy) // self.n
        return wx, wy

    # -- faces of the quotient (needed for Kasteleyn certificates) ----------

    def faces(self):
        """Contractible faces of the torus quotient as lists of torus darts.

        A torus dart is (cell_index, base_dart); it is the copy of the base
        dart whose tail lies in that cell.  Returns (faces, dart_face) with
        dart_face a dict keyed by torus dart.
        """
        base = self.base
        n = self.n
        dart_face = {}
        faces = []
        for cx0 in range(n):
            for cy0 in range(n):
                for d0 in range(2 * base.num_edges):
                    key0 = ((cx0, cy0), d0)
                    if key0 in dart_face:
                        continue
                    orbit = []
                    cell, d = (cx0, cy0), d0
                    wind = (0, 0)
                    while True:
                        key = (cell, d)
                        orbit.append(key)
                        dart_face[key] = len(faces)
                        off = base.dart_offset(d)
                        hx, hy = cell[0] + off[0], cell[1] + off[1]
                        wind = (wind[0] + hx // n, wind[1] + hy // n)
                        cell = (hx % n, hy % n)
                        d = base.face_next(d)
                        if (cell, d) == key0:
                            break
                    if wind != (0, 0):
                        raise IsoradialityError("non-contractible face in quotient")
                    faces.append(orbit)
        if self.num_vertices - self.num_edges + len(faces) != 0:
            raise IsoradialityError("quotient embedding is not cellular")
        return faces, dart_face

    def torus_edge_of_dart(self, key) -> tuple[int, bool]:
        """Map a torus dart to (edge index in self.edges, forward flag)."""
        (cx, cy), d = key
        base_edge = d >> 1
        forward = (d & 1) == 0
        if not forward:
            off = self.base.edges[base_edge].offset
            cx, cy = (cx - off[0]) % self.n, (cy - off[1]) % self.n
        idx = (cx * self.n + cy) * self.base.num_edges + base_edge
        return idx, forward


def quotient(base: PeriodicGraph, n: int) -> ToroidalGraph:
    """Torus quotient of the fundamental domain by n Z^2."""
    return ToroidalGraph(base, n)
