"""Fourier symbols of periodic operators and their characteristic polynomials.

A translation-invariant finite-range operator T on a periodic graph is stored
as its fundamental-domain blocks: T(x, y)[i, j] couples site i in cell (x, y)
to site j in cell (0, 0).  Its symbol is T^(z, w) = sum T(x,y) z^x w^y, an
analytic matrix-valued function; on |z| = |w| = 1 operator identities become
pointwise matrix identities of symbols.

The characteristic polynomial det T^ is recovered exactly by evaluating the
determinant on a large enough grid of roots of unity and inverse FFT.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InterpolationResidualError, NonConvergentError
from .laurent import LaurentPoly2


class TorusSymbol:
    """Matrix-valued Laurent function assembled from translation blocks."""

    def __init__(self, rows: int, cols: int | None = None):
        self.rows = rows
        self.cols = rows if cols is None else cols
        self.blocks: dict[tuple[int, int], np.ndarray] = {}

    @property
    def size(self) -> int:
        if self.rows != self.cols:
            raise ValueError("symbol is not square")
        return self.rows

    def add_block_entry(self, i: int, j: int, offset_of_j: tuple[int, int], value):
        """Add a coupling between site i (cell 0) and site j (cell ``offset``).

        Contributes ``value * z^-dx w^-dy`` to entry (i, j): with the block
        convention T(x,y) = T_{(i,(x,y)),(j,0)}, a neighbor of i living in
        cell +d appears in block -d.
        """
        dx, dy = offset_of_j
        key = (-dx, -dy)
        if key not in self.blocks:
            self.blocks[key] = np.zeros((self.rows, self.cols), dtype=complex)
        self.blocks[key][i, j] += value

    @property
    def bounds(self) -> tuple[int, int]:
        bx = max((abs(k[0]) for k in self.blocks), default=0)
        by = max((abs(k[1]) for k in self.blocks), default=0)
        return bx, by

    def __call__(self, z, w) -> np.ndarray:
        """Evaluate at (z, w); broadcasts, returning shape (..., rows, cols)."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        out = np.zeros(z.shape + (self.rows, self.cols), dtype=complex)
        for (dx, dy), block in self.blocks.items():
            phase = (z ** dx) * (w ** dy)
            out += phase[..., None, None] * block
        return out

    def dagger_at(self, z, w) -> np.ndarray:
        """Pointwise conjugate transpose; equals the adjoint symbol on |z|=|w|=1."""
        mat = self(z, w)
        return np.conj(np.swapaxes(mat, -1, -2))

    def scaled(self, factor) -> "TorusSymbol":
        out = TorusSymbol(self.rows, self.cols)
        out.blocks = {k: factor * v for k, v in self.blocks.items()}
        return out


def characteristic_polynomial(symbol: TorusSymbol, check_points: int = 100,
                              rel_tol: float = 1e-8, rng=None) -> LaurentPoly2:
    """det of the symbol as an exact Laurent polynomial via DFT interpolation.

    Grid sizes are 2 * size * bound + 1 per variable, enough to resolve every
    monomial the determinant expansion can produce.  A round-trip check at
    random torus points guards the interpolation.
    """
    size = symbol.size  # raises for rectangular symbols
    bx, by = symbol.bounds
    mx = 2 * size * bx + 1
    my = 2 * size * by + 1
    zs = np.exp(2j * np.pi * np.arange(mx) / mx)
    ws = np.exp(2j * np.pi * np.arange(my) / my)
    zg, wg = np.meshgrid(zs, ws, indexing="ij")
    dets = np.linalg.det(symbol(zg, wg))
    c = np.fft.ifft2(dets)
    lx, ly = mx // 2, my // 2
    coeffs = np.zeros((mx, my), dtype=complex)
    for p in range(mx):
        for q in range(my):
            x = p if p <= lx else p - mx
            y = q if q <= ly else q - my
            coeffs[x + lx, y + ly] = c[p, q]
    poly = LaurentPoly2(coeffs, -lx, -ly)
    rng = np.random.default_rng(0) if rng is None else rng
    zr = np.exp(2j * np.pi * rng.random(check_points))
    wr = np.exp(2j * np.pi * rng.random(check_points))
    direct = np.linalg.det(symbol(zr, wr))
    interp = poly(zr, wr)
    scale = max(np.abs(direct).max(), poly.max_coeff())
    resid = np.abs(direct - interp).max()
    if resid > rel_tol * scale:
        raise InterpolationResidualError(
            f"round-trip residual {resid:.3e} vs scale {scale:.3e}")
    return poly


# ---------------------------------------------------------------------------
# Zero at (1, 1)
# ---------------------------------------------------------------------------


@dataclass
class ZeroReport:
    """Local data of P at (z, w) = (1, 1) in the chart z=e^{i pi x}, w=e^{i pi y}."""
    value: complex
    grad_z: complex
    grad_w: complex
    alpha: float
    beta: float
    gamma: float
    coeff_scale: float

    @property
    def definite(self) -> bool:
        return self.alpha * self.gamma - self.beta ** 2 > 0

    @property
    def multiplicity_two(self) -> bool:
        tol_val = 1e-10 * self.coeff_scale
        tol_grad = 1e-8 * self.coeff_scale
        return (abs(self.value) < tol_val
                and abs(self.grad_z) < tol_grad and abs(self.grad_w) < tol_grad
                and self.definite)


def zero_at_one_one(p: LaurentPoly2) -> ZeroReport:
    """Value, gradient and Hessian quadratic form of P at (1, 1).

    Derivatives of a Laurent polynomial are exact exponent moments.  In the
    chart z = e^{i pi x}, w = e^{i pi y}, a double zero expands as
    alpha x^2 + 2 beta x y + gamma y^2 + O(3).
    """
    s00 = p.sum_weighted(0, 0)
    s10 = p.sum_weighted(1, 0)
    s01 = p.sum_weighted(0, 1)
    s20 = p.sum_weighted(2, 0)
    s11 = p.sum_weighted(1, 1)
    s02 = p.sum_weighted(0, 2)
    half = -0.5 * math.pi ** 2
    return ZeroReport(
        value=s00, grad_z=s10, grad_w=s01,
        alpha=float((half * s20).real),
        beta=float((half * s11).real),
        gamma=float((half * s02).real),
        coeff_scale=p.max_coeff())


# ---------------------------------------------------------------------------
# Free energy
# ---------------------------------------------------------------------------


def _log_mean_on_shifted_grid(p: LaurentPoly2, m: int, shift=(1, 0),
                              threads: int = 1) -> float:
    """(1/m^2) sum of log |P| over the (theta,tau)-shifted root-of-unity grid."""
    th, ta = shift
    zs = np.exp(1j * math.pi * (2 * np.arange(m) + th) / m)
    ws = np.exp(1j * math.pi * (2 * np.arange(m) + ta) / m)
    zg, wg = np.meshgrid(zs, ws, indexing="ij")
    zf, wf = zg.ravel(), wg.ravel()

    def chunk_vals(lo, hi):
        return np.log(np.abs(p(zf[lo:hi], wf[lo:hi])))

    total = 0.0
    n = len(zf)
    step = max(1, n // max(1, threads))
    if threads > 1:
        bounds = [(i, min(i + step, n)) for i in range(0, n, step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for vals in pool.map(lambda b: chunk_vals(*b), bounds):
                total += vals.sum()
    else:
        total = chunk_vals(0, n).sum()
    return float(total) / (m * m)


def free_energy(p: LaurentPoly2, tol: float = 1e-6, m0: int = 64,
                max_m: int = 1024, threads: int = 1) -> tuple[float, float]:
    """Free energy -1/(2 (2 pi i)^2) contour-mean of log P over the torus.

    Riemann sums on (1,0)-shifted grids (they avoid the zero at (1,1) by
    construction) at m, 2m, 4m, ... with two-stage Richardson extrapolation;
    returns (value, error_estimate).  Raises NonConvergentError when the
    successive extrapolated differences stop shrinking before reaching tol.
    """
    sums = []
    ms = []
    m = m0
    prev_gap = None
    while m <= max_m:
        sums.append(_log_mean_on_shifted_grid(p, m, threads=threads))
        ms.append(m)
        if len(sums) >= 3:
            r1 = [(4 * sums[i + 1] - sums[i]) / 3 for i in range(len(sums) - 1)]
            r2 = [(16 * r1[i + 1] - r1[i]) / 15 for i in range(len(r1) - 1)]
            gap = abs(r2[-1] - r1[-1]) if len(r2) == 1 else abs(r2[-1] - r2[-2])
            value = -0.5 * r2[-1]
            err = 0.5 * gap
            if err < tol:
                return value, err
            if prev_gap is not None and gap > prev_gap * 1.05:
                raise NonConvergentError(
                    f"free-energy ladder stalled at m={m} (gap {gap:.2e})")
            prev_gap = gap
        m *= 2
    raise NonConvergentError(
        f"free-energy ladder did not reach tol={tol:g} by m={max_m}")


# ---------------------------------------------------------------------------
# Torus grid scan and amoeba samples
# ---------------------------------------------------------------------------


def torus_grid_scan(p: LaurentPoly2, m: int = 200) -> np.ndarray:
    """|P| on the m x m grid (e^{2 pi i j / m}, e^{2 pi i k / m})."""
    zs = np.exp(2j * np.pi * np.arange(m) / m)
    zg, wg = np.meshgrid(zs, zs, indexing="ij")
    return np.abs(p(zg, wg))


def unique_torus_zero_certificate(p: LaurentPoly2, m: int = 200):
    """Grid evidence that |P| attains its minimum only next to (1, 1).

    Returns (ok, margin): ok means every global-minimum grid cell lies within
    one step of index (0, 0); margin is the smallest |P| outside the 3x3
    neighborhood of (0, 0), normalized by the largest coefficient.
    """
    vals = torus_grid_scan(p, m)
    lo = vals.min()
    near = np.zeros_like(vals, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            near[di % m, dj % m] = True
    argmins = np.argwhere(vals <= lo * (1 + 1e-9) + p.max_coeff() * 1e-300)
    ok = all(near[i, j] for i, j in argmins)
    margin = float(vals[~near].min() / p.max_coeff())
    return ok, margin


def amoeba_samples(p: LaurentPoly2, samples: int = 40, radius: float = 1.5,
                   rng=None) -> np.ndarray:
    """(log|z|, log|w|) points on the zero set, for plotting.

    Sweeps z over a grid of moduli and arguments, solving P(z, .) = 0 for w.
    """
    rows = []
    logr = np.linspace(-radius, radius, samples)
    args = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    for lr in logr:
        for ar in args:
            z = np.exp(lr + 1j * ar)
            zp = z ** (p.xmin + np.arange(p.coeffs.shape[0]))
            wcoef = zp @ p.coeffs  # polynomial in w with exponents ys
            top = np.abs(wcoef).max()
            if top == 0:
                continue
            nz = np.nonzero(np.abs(wcoef) > 1e-12 * top)[0]
            wc = wcoef[nz[0]:nz[-1] + 1]
            if len(wc) < 2:
                continue
            roots = np.roots(wc[::-1])  # highest power first
            for w in roots:
                if w != 0 and np.isfinite(w):
                    rows.append((lr, math.log(abs(w))))
    return np.array(rows) if rows else np.zeros((0, 2))
