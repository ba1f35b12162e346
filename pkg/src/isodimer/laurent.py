"""Bivariate Laurent polynomials with integer exponents and their Newton polygons."""

from __future__ import annotations

import numpy as np

from .errors import ZeroPolynomialError

PRUNE_REL_TOL = 1e-9


class LaurentPoly2:
    """sum_{x,y} c[x,y] z^x w^y stored densely over a rectangle of exponents.

    Coefficients below PRUNE_REL_TOL times the largest modulus are pruned to
    exact zero on construction.
    """

    def __init__(self, coeffs, xmin: int, ymin: int, prune: bool = True):
        self.coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        self.xmin = int(xmin)
        self.ymin = int(ymin)
        if prune:
            self._prune()

    # -- construction --------------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentPoly2":
        if not d:
            return cls(np.zeros((1, 1)), 0, 0, prune=False)
        xs = [k[0] for k in d]
        ys = [k[1] for k in d]
        xmin, xmax = min(xs), max(xs)
        ymin, ymax = min(ys), max(ys)
        c = np.zeros((xmax - xmin + 1, ymax - ymin + 1), dtype=complex)
        for (x, y), v in d.items():
            c[x - xmin, y - ymin] += v
        return cls(c, xmin, ymin)

    @classmethod
    def constant(cls, value) -> "LaurentPoly2":
        return cls(np.array([[value]]), 0, 0, prune=False)

    def _prune(self):
        scale = np.abs(self.coeffs).max()
        if scale > 0.0:
            self.coeffs = np.where(np.abs(self.coeffs) < PRUNE_REL_TOL * scale,
                                   0.0, self.coeffs)
        nz = np.nonzero(np.abs(self.coeffs))
        if len(nz[0]) == 0:
            self.coeffs = np.zeros((1, 1), dtype=complex)
            self.xmin = self.ymin = 0
            return
        i0, i1 = nz[0].min(), nz[0].max()
        j0, j1 = nz[1].min(), nz[1].max()
        self.xmin += int(i0)
        self.ymin += int(j0)
        self.coeffs = self.coeffs[i0:i1 + 1, j0:j1 + 1]

    # -- basic queries --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.coeffs == 0))

    def support(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.coeffs.shape[0]):
            for j in range(self.coeffs.shape[1]):
                if self.coeffs[i, j] != 0:
                    out.append((self.xmin + i, self.ymin + j))
        return out

    def coefficient(self, x: int, y: int) -> complex:
        i, j = x - self.xmin, y - self.ymin
        if 0 <= i < self.coeffs.shape[0] and 0 <= j < self.coeffs.shape[1]:
            return complex(self.coeffs[i, j])
        return 0j

    def max_coeff(self) -> float:
        return float(np.abs(self.coeffs).max())

    def as_dict(self) -> dict:
        return {k: self.coefficient(*k) for k in self.support()}

    def is_real(self, tol: float = 1e-9) -> bool:
        scale = self.max_coeff()
        return scale == 0.0 or float(np.abs(self.coeffs.imag).max()) <= tol * scale

    def realified(self) -> "LaurentPoly2":
        if not self.is_real():
            raise ValueError("polynomial has genuinely complex coefficients")
        return LaurentPoly2(self.coeffs.real, self.xmin, self.ymin, prune=False)

    # -- evaluation -----------------------------------------------------------

    def __call__(self, z, w):
        """Evaluate at (z, w); broadcasts over numpy arrays."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        nx, ny = self.coeffs.shape
        zp = z[..., None] ** (self.xmin + np.arange(nx))
        wp = w[..., None] ** (self.ymin + np.arange(ny))
        out = np.einsum("...x,xy,...y->...", zp, self.coeffs, wp)
        if out.ndim == 0:
            return complex(out)
        return out

    def eval_scale(self, z, w) -> float:
        """sum |c| |z|^x |w|^y, a cancellation-free magnitude at (z, w)."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        nx, ny = self.coeffs.shape
        zp = np.abs(z)[..., None] ** (self.xmin + np.arange(nx))
        wp = np.abs(w)[..., None] ** (self.ymin + np.arange(ny))
        out = np.einsum("...x,xy,...y->...", zp, np.abs(self.coeffs), wp)
        return float(out) if out.ndim == 0 else out

    # -- algebra ---------------------------------------------------------------

    def __add__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        d = self.as_dict()
        for k, v in other.as_dict().items():
            d[k] = d.get(k, 0j) + v
        return LaurentPoly2.from_dict(d)

    def __mul__(self, other) -> "LaurentPoly2":
        if np.isscalar(other):
            return LaurentPoly2(self.coeffs * other, self.xmin, self.ymin)
        d: dict[tuple[int, int], complex] = {}
        for (x1, y1), v1 in self.as_dict().items():
            for (x2, y2), v2 in other.as_dict().items():
                k = (x1 + x2, y1 + y2)
                d[k] = d.get(k, 0j) + v1 * v2
        return LaurentPoly2.from_dict(d)

    __rmul__ = __mul__

    # -- exact derivative data at (1, 1) ---------------------------------------

    def sum_weighted(self, px: int, py: int) -> complex:
        """sum c[x,y] x^px y^py (exponent moments; exact derivatives at (1,1))."""
        nx, ny = self.coeffs.shape
        xs = (self.xmin + np.arange(nx, dtype=float)) ** px if px else np.ones(nx)
        ys = (self.ymin + np.arange(ny, dtype=float)) ** py if py else np.ones(ny)
        return complex(xs @ self.coeffs @ ys)


def newton_polygon(p: LaurentPoly2) -> list[tuple[int, int]]:
    """Vertices of the convex hull of the support, ccw from the lexicographic
    minimum.  Degenerate hulls return 1 or 2 points."""
    pts = sorted(set(p.support()))
    if not pts:
        raise ZeroPolynomialError("Newton polygon of the zero polynomial")
    if len(pts) == 1:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[int, int]] = []
    for q in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    upper: list[tuple[int, int]] = []
    for q in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2 and len(pts) >= 2:
        hull = [pts[0], pts[-1]]
    return hull
