"""Gibbs edge correlations on the infinite decorated graph.

The inverse of the infinite Kasteleyn operator has coefficients

    U[(v,x,y), (v',x',y')] = torus mean of  K^(z,w)^{-1}[v,v']  z^{x'-x} w^{y'-y},

depending only on (v, v') and the cell difference.  The integrand has an
integrable order-1 singularity at (1, 1); Riemann sums on the (1,1)-shifted
root-of-unity grids stay clear of it, the grid's conjugation symmetry
cancels the odd leading term, and a resolution ladder with Richardson
extrapolation brings the coefficients to tolerance.

Edge probabilities are Pfaffians of finite submatrices of those cached
coefficients, matching the n -> infinity limit of the toroidal Boltzmann
measures.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergentError, NotDisjointError
from .kasteleyn import KasteleynSystem, kasteleyn_symbol
from .pfaffian import pfaffian

InfiniteEdge = tuple[int, tuple[int, int]]  # (base edge index, cell of its tail)


class GibbsCorrelator:
    """Inverse-Kasteleyn coefficient cache and Gibbs edge probabilities."""

    def __init__(self, system: KasteleynSystem, tol: float = 1e-6,
                 base_resolution: int = 32, max_resolution: int = 512,
                 threads: int = 1):
        self.system = system
        self.fg = system.fg
        self.symbol = kasteleyn_symbol(self.fg, system.orientation)
        self.tol = tol
        self.base_resolution = base_resolution
        self.max_resolution = max_resolution
        self.threads = threads
        # raw grid sums per resolution: m -> {offset: (V, V) array}
        self._sums: dict[int, dict[tuple[int, int], np.ndarray]] = {}
        self._value: dict[tuple[int, int], np.ndarray] = {}
        self._error: dict[tuple[int, int], float] = {}

    # -- quadrature ladder ---------------------------------------------------

    def _grid_sums(self, m: int, offsets) -> dict:
        """Mean over the (1,1)-shifted m x m grid of K^{-1} times the phases."""
        v = self.fg.num_vertices
        zs = np.exp(1j * math.pi * (2 * np.arange(m) + 1) / m)
        zg, wg = np.meshgrid(zs, zs, indexing="ij")
        zf, wf = zg.ravel(), wg.ravel()
        offsets = list(offsets)
        acc = {off: np.zeros((v, v), dtype=complex) for off in offsets}

        def accumulate(lo, hi):
            inv = np.linalg.inv(self.symbol(zf[lo:hi], wf[lo:hi]))
            out = {}
            for off in offsets:
                phase = (zf[lo:hi] ** off[0]) * (wf[lo:hi] ** off[1])
                out[off] = np.einsum("g,gij->ij", phase, inv)
            return out

        n = len(zf)
        chunk = 4096
        bounds = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                parts = list(pool.map(lambda b: accumulate(*b), bounds))
        else:
            parts = [accumulate(*b) for b in bounds]
        for part in parts:
            for off, mat in part.items():
                acc[off] += mat
        return {off: mat / n for off, mat in acc.items()}

    def _ensure_offsets(self, offsets):
        """Compute (or refine) the extrapolated coefficients for the offsets."""
        todo = [off for off in set(offsets) if off not in self._value]
        if not todo:
            return
        m = self.base_resolution
        ladder = []
        while m <= self.max_resolution:
            if m not in self._sums:
                self._sums[m] = {}
            missing = [off for off in todo if off not in self._sums[m]]
            if missing:
                self._sums[m].update(self._grid_sums(m, missing))
            ladder.append(m)
            if len(ladder) >= 3:
                done = True
                for off in todo:
                    s = [self._sums[k][off] for k in ladder[-3:]]
                    r1a = (4 * s[1] - s[0]) / 3
                    r1b = (4 * s[2] - s[1]) / 3
                    r2 = (16 * r1b - r1a) / 15
                    err = float(np.abs(r1b - r2).max())
                    self._value[off] = r2
                    self._error[off] = err
                    if err > self.tol:
                        done = False
                if done:
                    return
            m *= 2
        worst = max(self._error.get(off, math.inf) for off in todo)
        raise NonConvergentError(
            f"inverse-coefficient ladder stopped at error {worst:.2e} "
            f"(tol {self.tol:g}, max resolution {self.max_resolution})")

    # -- coefficients ----------------------------------------------------------

    def inverse_coefficient(self, a, b) -> complex:
        """Inverse-operator coefficient between sites a=(v,x,y), b=(v',x',y')."""
        v, x, y = a
        vp, xp, yp = b
        off = (xp - x, yp - y)
        self._ensure_offsets([off])
        return complex(self._value[off][v, vp])

    def coefficient_error(self, a, b) -> float:
        v, x, y = a
        vp, xp, yp = b
        return self._error[(xp - x, yp - y)]

    def convolution_residual(self, a, b) -> float:
        """| sum_c K[a, c] U[c, b] - delta_ab |, the defining identity."""
        v, x, y = a
        target = 0.0 + 0j
        for d in self.fg.rotation[v]:
            e = d >> 1
            forward = (d & 1) == 0
            edge = self.fg.edges[e]
            other = edge.v if forward else edge.u
            doff = self.fg.dart_offset(d)
            entry = self.system.orientation[e] * self.fg.weights[e]
            if not forward:
                entry = -entry
            target += entry * self.inverse_coefficient(
                (other, x + doff[0], y + doff[1]), b)
        expected = 1.0 if (v, x, y) == tuple(b) else 0.0
        return abs(target - expected)

    # -- edge probabilities -----------------------------------------------------

    def _edge_sites(self, edges):
        sites = []
        pairs = []
        for base, cell in edges:
            e = self.fg.edges[base]
            u = (e.u, cell[0], cell[1])
            v = (e.v, cell[0] + e.offset[0], cell[1] + e.offset[1])
            if u in sites or v in sites:
                raise NotDisjointError("edges must be pairwise vertex-disjoint")
            sites.extend((u, v))
            pairs.append((u, v, base))
        return sites, pairs

    def edge_probability(self, edges) -> float:
        """Gibbs probability that the listed infinite-graph edges all occur.

        ``edges`` is a list of (base edge index, tail cell) pairs.  The value
        is prod K[u_i, v_i] times the Pfaffian of the inverse-coefficient
        submatrix indexed u1, v1, ..., um, vm.
        """
        edges = list(edges)
        if not edges:
            return 1.0
        sites, pairs = self._edge_sites(edges)
        offs = [(b[1] - a[1], b[2] - a[2]) for a in sites for b in sites]
        self._ensure_offsets(offs)
        k = len(sites)
        # submatrix of coefficients indexed u1, v1, ..., um, vm; the limit of
        # the finite-n Boltzmann formula carries them transposed relative to
        # the convolution inverse (locked by the n -> infinity comparison)
        sub = np.zeros((k, k), dtype=complex)
        for i, a in enumerate(sites):
            for j, b in enumerate(sites):
                if i != j:
                    sub[i, j] = self.inverse_coefficient(b, a)
        sub = 0.5 * (sub - sub.T)  # quadrature noise breaks exact antisymmetry
        entry = 1.0
        for _, _, base in pairs:
            entry *= self.system.orientation[base] * self.fg.weights[base]
        return float((entry * pfaffian(sub)).real)

    def convergence_report(self, edges, n_list) -> list[dict]:
        """Finite-n Boltzmann probabilities against the Gibbs value.

        Returns rows {n, P_n, gap}; the listed cells must embed in the
        smallest quotient without vertex collisions.
        """
        p_inf = self.edge_probability(edges)
        rows = []
        for n in sorted(n_list):
            tg = self.system.torus(n)
            idx = []
            for base, cell in edges:
                cx, cy = cell[0] % n, cell[1] % n
                idx.append((cx * n + cy) * self.fg.num_edges + base)
            p_n = self.system.boltzmann_probability(n, idx)
            rows.append({"n": n, "P_n": p_n, "gap": abs(p_n - p_inf)})
        for row in rows:
            row["P_inf"] = p_inf
        return rows


@dataclass
class ProbabilityFlag:
    value: float
    clamped: bool


def clamp_probability(p: float, tol: float = 1e-6) -> ProbabilityFlag:
    """Clamp to [0, 1], flagging values outside [-tol, 1 + tol]."""
    flagged = not (-tol <= p <= 1.0 + tol)
    return ProbabilityFlag(value=min(1.0, max(0.0, p)), clamped=flagged)
