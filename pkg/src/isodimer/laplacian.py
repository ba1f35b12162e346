"""Critical Laplacian, the bipartite double graph, and the identity suite.

The Laplacian carries conductance tan(theta_e); its characteristic
polynomial is taken as det(-Lap^), the spanning-forest-normalized sign that
is nonnegative on the unit torus and matches the cycle-rooted spanning
forest expansion coefficient by coefficient.

The double graph has a black vertex for every vertex of G and of its dual,
and a white vertex on every edge; the bipartite operator couples a white
vertex w to an adjacent black vertex b with weight 2 sin(theta_wb) times the
unit complex direction from w to b.  Weighted incidence operators of G and
G* factor it, which ties det of the bipartite symbol to the product of the
two Laplacian determinants and ultimately to the decorated-graph
characteristic polynomial.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IdentityViolationError, PoleHitError
from .fisher import fisher_graph
from .graphs import PeriodicIsoradialGraph, dual, quotient
from .kasteleyn import KasteleynSystem, kasteleyn_symbol
from .laurent import LaurentPoly2, newton_polygon
from .oracle import DEFAULT_BUDGET, enumerate_crsf
from .spectral import TorusSymbol, characteristic_polynomial


# ---------------------------------------------------------------------------
# Laplacian
# ---------------------------------------------------------------------------


def laplacian_symbol(g: PeriodicIsoradialGraph) -> TorusSymbol:
    """Symbol of the Laplacian: tan(theta) off the diagonal, minus the
    incident sum on it; row sums vanish at (z, w) = (1, 1)."""
    sym = TorusSymbol(g.num_vertices)
    for e, edge in enumerate(g.edges):
        t = math.tan(g.theta[e])
        sym.add_block_entry(edge.u, edge.v, edge.offset, t)
        sym.add_block_entry(edge.v, edge.u, (-edge.offset[0], -edge.offset[1]), t)
        sym.add_block_entry(edge.u, edge.u, (0, 0), -t)
        sym.add_block_entry(edge.v, edge.v, (0, 0), -t)
    return sym


def laplacian_char_poly(g: PeriodicIsoradialGraph, rng=None) -> LaurentPoly2:
    """det(-Lap^) as a Laurent polynomial (>= 0 on the torus, CRSF-normalized)."""
    return characteristic_polynomial(laplacian_symbol(g).scaled(-1.0), rng=rng)


# ---------------------------------------------------------------------------
# Double graph and its operators
# ---------------------------------------------------------------------------


@dataclass
class DoubleGraph:
    """Bipartite double of an isoradial graph with its operator symbols.

    Black vertices are ordered: the vertices of G first, then the faces
    (vertices of G*).  White vertices are the edges of G.  ``bipartite``
    is the white-by-black complex operator; ``incidence_g`` and
    ``incidence_dual`` are the weighted incidence symbols of G and G* (dual
    edges oriented as the primal ones rotated by +90 degrees); ``phases``
    is the diagonal that aligns the bipartite operator with them.
    """
    graph: PeriodicIsoradialGraph
    dual_graph: PeriodicIsoradialGraph
    bipartite: TorusSymbol
    incidence_g: TorusSymbol
    incidence_dual: TorusSymbol
    phases: np.ndarray          # diagonal entries, one per white vertex
    num_black_primal: int
    white_positions: np.ndarray

    @property
    def num_white(self) -> int:
        return self.bipartite.rows


def double_graph(g: PeriodicIsoradialGraph) -> DoubleGraph:
    gd = dual(g)
    n_white = g.num_edges
    n_black = g.num_vertices + gd.num_vertices
    bip = TorusSymbol(n_white, n_black)
    minc_g = TorusSymbol(n_white, g.num_vertices)
    minc_d = TorusSymbol(n_white, gd.num_vertices)
    phases = np.zeros(n_white, dtype=complex)
    wpos = np.zeros((n_white, 2))

    for e, edge in enumerate(g.edges):
        off = np.array(edge.offset, dtype=float)
        pu = g.pos[edge.u]
        pv = g.pos[edge.v] + off @ g.basis
        w = 0.5 * (pu + pv)
        wpos[e] = w
        theta = g.theta[e]
        t_primal = math.tan(theta)
        t_dual = 1.0 / t_primal

        def direction(target):
            d = target - w
            return complex(d[0], d[1]) / abs(complex(d[0], d[1]))

        # white-to-black couplings: 2 sin(theta_wb) e^{i arg(b - w)}
        bip.add_block_entry(e, edge.u, (0, 0), 2 * math.sin(theta) * direction(pu))
        bip.add_block_entry(e, edge.v, edge.offset, 2 * math.sin(theta) * direction(pv))
        fl = int(g.edge_face_left[e])
        fr = int(g.edge_face_right[e])
        off_l = g.dart_face_offset[2 * e]
        off_r_cell = (g.dart_face_offset[2 * e + 1][0] + edge.offset[0],
                      g.dart_face_offset[2 * e + 1][1] + edge.offset[1])
        cl = g.face_center[fl] + np.array(off_l, dtype=float) @ g.basis
        cr = g.face_center[fr] + np.array(off_r_cell, dtype=float) @ g.basis
        bip.add_block_entry(e, g.num_vertices + fl, off_l,
                            2 * math.cos(theta) * direction(cl))
        bip.add_block_entry(e, g.num_vertices + fr, off_r_cell,
                            2 * math.cos(theta) * direction(cr))

        # weighted incidence: edge oriented u -> v, dual edge right -> left
        root = math.sqrt(t_primal)
        minc_g.add_block_entry(e, edge.u, (0, 0), -root)
        minc_g.add_block_entry(e, edge.v, edge.offset, root)
        root_d = math.sqrt(t_dual)
        minc_d.add_block_entry(e, fr, off_r_cell, -root_d)
        minc_d.add_block_entry(e, fl, off_l, root_d)

        # phase aligning the bipartite row with (M^G | i M^{G*})
        psi = cmath.phase(complex(*(pv - pu)))
        phases[e] = cmath.exp(-1j * psi) / (2 * math.sqrt(math.sin(theta)
                                                          * math.cos(theta)))

    return DoubleGraph(graph=g, dual_graph=gd, bipartite=bip,
                       incidence_g=minc_g, incidence_dual=minc_d,
                       phases=phases, num_black_primal=g.num_vertices,
                       white_positions=wpos)


# ---------------------------------------------------------------------------
# Identity suite
# ---------------------------------------------------------------------------


@dataclass
class IdentityReport:
    residuals: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    passed: bool = True

    def record(self, key: str, residual: float, bound: float):
        self.residuals[key] = residual
        if not (residual <= bound):
            self.passed = False
            raise IdentityViolationError(key, residual, bound)


def identity_suite(g: PeriodicIsoradialGraph, bound: float = 1e-7,
                   samples: int = 20, ratio_samples: int = 120,
                   rng=None) -> IdentityReport:
    """Numerical certification of the factorization identities.

    (i)   phases * bipartite = (M^G | i M^{G*}) entrywise;
    (ii)  bipartite^dagger |A|^2 bipartite = diag(-Lap^G, -Lap^G*);
    (iii) prod 1/(4 sin cos) |det bipartite|^2 = P_Lap^G P_Lap^G*;
    (iv)  P_Lap^G = prod tan(theta) * P_Lap^G*;
    (v)   P_Lap^G = prod (2 cos theta)^-1 |det bipartite|;
    (vi)  P / P_Lap constant over random torus points;
    (vii) Newton polygons of P and P_Lap coincide.

    Residuals are relative; any residual above ``bound`` raises
    IdentityViolationError.  Returns the report with measured constants.
    """
    rng = np.random.default_rng(7) if rng is None else rng
    rep = IdentityReport()
    dg = double_graph(g)
    gd = dg.dual_graph
    z = np.exp(2j * np.pi * rng.random(samples))
    w = np.exp(2j * np.pi * rng.random(samples))

    # (i) entrywise alignment with the incidence block row
    kk = dg.bipartite(z, w)
    mg = dg.incidence_g(z, w)
    md = dg.incidence_dual(z, w)
    target = np.concatenate([mg, 1j * md], axis=-1)
    aligned = dg.phases[None, :, None] * kk
    scale = np.abs(target).max()
    rep.record("i", float(np.abs(aligned - target).max() / scale), bound)

    # (ii) block factorization into the two positive Laplacians
    lap_g = laplacian_symbol(g).scaled(-1.0)(z, w)
    lap_d = laplacian_symbol(gd).scaled(-1.0)(z, w)
    amod2 = (np.abs(dg.phases) ** 2)[None, :, None]
    lhs = np.conj(np.swapaxes(kk, -1, -2)) @ (amod2 * kk)
    nb = dg.num_black_primal
    blocks = np.zeros_like(lhs)
    blocks[..., :nb, :nb] = lap_g
    blocks[..., nb:, nb:] = lap_d
    scale = np.abs(blocks).max()
    rep.record("ii", float(np.abs(lhs - blocks).max() / scale), bound)

    # determinant identities (iii)-(v)
    det_k = np.linalg.det(kk)
    det_lg = np.linalg.det(lap_g)
    det_ld = np.linalg.det(lap_d)
    pref = np.prod([1.0 / (4 * math.sin(t) * math.cos(t)) for t in g.theta])
    lhs3 = pref * np.abs(det_k) ** 2
    rhs3 = (det_lg * det_ld).real
    scale3 = np.abs(rhs3).max()
    rep.record("iii", float(np.abs(lhs3 - rhs3).max() / scale3), bound)

    tan_prod = np.prod([math.tan(t) for t in g.theta])
    rep.record("iv", float(np.abs(det_lg - tan_prod * det_ld).max()
                           / np.abs(det_lg).max()), bound)
    rep.constants["tan_product"] = tan_prod

    cos_prod = np.prod([2.0 * math.cos(t) for t in g.theta])
    rep.record("v", float(np.abs(np.abs(det_lg) - np.abs(det_k) / cos_prod).max()
                          / np.abs(det_lg).max()), bound)
    # the phase of det of the bipartite symbol depends on cell conventions
    # (a monomial of modulus 1 on the torus), so only |zeta| is certified
    zeta = det_lg * cos_prod / det_k
    rep.constants["zeta_modulus"] = float(np.abs(zeta).mean())
    rep.constants["zeta_modulus_spread"] = float(np.abs(np.abs(zeta) - 1.0).max())

    # (vi) decorated-graph polynomial is proportional to the Laplacian one
    fg = fisher_graph(g)
    system = KasteleynSystem(fg)
    p_dimer = characteristic_polynomial(kasteleyn_symbol(fg, system.orientation),
                                        rng=rng)
    p_lap = laplacian_char_poly(g, rng=rng)
    zr = np.exp(2j * np.pi * rng.random(ratio_samples))
    wr = np.exp(2j * np.pi * rng.random(ratio_samples))
    num = p_dimer(zr, wr)
    den = p_lap(zr, wr)
    good = np.abs(den) > 1e-9 * p_lap.max_coeff()
    ratio = num[good] / den[good]
    c = complex(np.median(ratio.real), np.median(ratio.imag))
    rep.record("vi", float(np.abs(ratio - c).max() / abs(c)), bound)
    rep.constants["dimer_to_laplacian_ratio"] = c

    # (vii) equal Newton polygons
    n_p = set(newton_polygon(p_dimer))
    n_l = set(newton_polygon(p_lap))
    rep.record("vii", 0.0 if n_p == n_l else 1.0, bound)

    rep.constants["p_dimer"] = p_dimer
    rep.constants["p_laplacian"] = p_lap
    return rep


# ---------------------------------------------------------------------------
# Cycle-rooted spanning forest expansion (oracle side)
# ---------------------------------------------------------------------------


def crsf_polynomial(g: PeriodicIsoradialGraph, budget=DEFAULT_BUDGET) -> LaurentPoly2:
    """Combinatorial expansion of det(-Lap^): sum over cycle-rooted spanning
    forests of prod tan(theta) per tree times (2 - z^x w^y - z^-x w^-y) with
    (x, y) the tree's cycle homology."""
    tg = quotient(g, 1)
    total: dict = {}
    for forest in enumerate_crsf(tg, budget=budget):
        term = LaurentPoly2.constant(1.0)
        for comp, hom in zip(forest.components, forest.homologies):
            weight = 1.0
            for e in comp:
                weight *= math.tan(g.theta[tg.edges[e].base])
            x, y = hom
            factor = LaurentPoly2.from_dict(
                {(0, 0): 2.0, (x, y): -1.0, (-x, -y): -1.0})
            term = term * (weight * factor)
        for k, v in term.as_dict().items():
            total[k] = total.get(k, 0j) + v
    return LaurentPoly2.from_dict(total)


# ---------------------------------------------------------------------------
# Discrete exponentials
# ---------------------------------------------------------------------------


def _diamond_step_lattice(g: PeriodicIsoradialGraph):
    """Adjacency of the diamond graph on lifted nodes.

    Nodes are ('g', v, cell) and ('f', face, cell); each dart contributes the
    rhombus side between its tail and the circumcenter on its left.
    """
    steps: dict = {}
    for d in range(2 * g.num_edges):
        v = g.dart_tail(d)
        f = g.faces()[1][d]
        f_off = g.dart_face_offset[d]
        vec = g.face_center[f] + np.array(f_off, dtype=float) @ g.basis - g.pos[v]
        steps.setdefault(v, []).append((f, f_off, complex(vec[0], vec[1])))
    return steps


def _diamond_path_product(g: PeriodicIsoradialGraph, lam: complex,
                          target_cell: tuple[int, int]) -> complex:
    """Product of (lam - u)/(lam + u) over the unit steps of a diamond path
    from vertex 0 to its copy translated by ``target_cell``."""
    steps = _diamond_step_lattice(g)
    start = ("g", 0, (0, 0))
    goal = ("g", 0, target_cell)
    span = 2 + abs(target_cell[0]) + abs(target_cell[1])
    prev: dict = {start: None}
    frontier = [start]
    while frontier and goal not in prev:
        nxt = []
        for node in frontier:
            kind, idx, cell = node
            if kind == "g":
                for f, f_off, vec in steps.get(idx, ()):
                    to = ("f", f, (cell[0] + f_off[0], cell[1] + f_off[1]))
                    if to not in prev and all(abs(c) <= span for c in to[2]):
                        prev[to] = (node, vec)
                        nxt.append(to)
            else:
                for v in range(g.num_vertices):
                    for f, f_off, vec in steps.get(v, ()):
                        if f != idx:
                            continue
                        to = ("g", v, (cell[0] - f_off[0], cell[1] - f_off[1]))
                        if to not in prev and all(abs(c) <= span for c in to[2]):
                            prev[to] = (node, -vec)
                            nxt.append(to)
        frontier = nxt
    if goal not in prev:
        raise RuntimeError("diamond graph path search failed")
    product = 1.0 + 0j
    node = goal
    while prev[node] is not None:
        node, vec = prev[node]
        u = vec / abs(vec)
        if min(abs(lam - u), abs(lam + u)) < 1e-9:
            raise PoleHitError(f"lambda = {lam} hits a pole direction {u}")
        product *= (lam - u) / (lam + u)
    return product


def discrete_exponential_point(g: PeriodicIsoradialGraph, lam: complex
                               ) -> tuple[complex, complex]:
    """Point (z(lambda), w(lambda)) of the Laplacian spectral curve.

    z is the product of (lam - e^{i alpha})/(lam + e^{i alpha}) over the
    rhombus-side directions stepped through when translating by the first
    period vector; w likewise for the second.  As lambda -> infinity each
    factor tends to 1, so (z, w) -> (1, 1).
    """
    z = _diamond_path_product(g, lam, (1, 0))
    w = _diamond_path_product(g, lam, (0, 1))
    return z, w
