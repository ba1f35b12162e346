"""Elliptic parametrization of the coupling constants.

The star-triangle invariant family is sinh(2 J(theta)) = sn(2K(k) theta / pi | k)
/ cn(...), with K the complete elliptic integral of the first kind.  At the
self-dual point k = 0 this collapses to J(theta) = log sqrt((1+sin theta)/cos theta).

All elliptic evaluations use arithmetic-geometric-mean descent, accurate to
about 1e-14 in double precision; the module's accuracy target is 1e-12.
"""

from __future__ import annotations

import math

from .errors import DomainError

_AGM_EPS = 1e-16


def _check_modulus(k: float) -> float:
    k = float(k)
    if not 0.0 <= k < 1.0:
        raise DomainError(f"elliptic modulus k={k} outside [0, 1)")
    return k


def complete_elliptic_k(k: float) -> float:
    """Complete elliptic integral of the first kind, AGM iteration."""
    k = _check_modulus(k)
    a, b = 1.0, math.sqrt(1.0 - k * k)
    while abs(a - b) > _AGM_EPS * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def jacobi_sn_cn(u: float, k: float) -> tuple[float, float]:
    """Jacobi elliptic sn(u|k), cn(u|k) for real u, by descending Landen/AGM."""
    k = _check_modulus(k)
    if k < 1e-14:
        return math.sin(u), math.cos(u)
    a = [1.0]
    c = [k]
    b = math.sqrt(1.0 - k * k)
    while abs(c[-1]) > _AGM_EPS:
        a.append(0.5 * (a[-1] + b))
        c.append(0.5 * (a[-2] - b))
        b = math.sqrt(a[-2] * b)
    n = len(a) - 1
    phi = (2.0 ** n) * a[n] * u
    for i in range(n, 0, -1):
        phi = 0.5 * (phi + math.asin(max(-1.0, min(1.0, c[i] * math.sin(phi) / a[i]))))
    return math.sin(phi), math.cos(phi)


def coupling(theta: float, k: float = 0.0) -> float:
    """Coupling constant J(theta) of the invariant family at modulus k.

    theta is the rhombus half-angle in (0, pi/2).  For k = 0 the closed form
    log sqrt((1+sin theta)/cos theta) is used.
    """
    theta = float(theta)
    if not 0.0 < theta < math.pi / 2:
        raise DomainError(f"half-angle theta={theta} outside (0, pi/2)")
    k = _check_modulus(k)
    if k < 1e-14:
        return 0.5 * math.log((1.0 + math.sin(theta)) / math.cos(theta))
    u = 2.0 * complete_elliptic_k(k) * theta / math.pi
    sn, cn = jacobi_sn_cn(u, k)
    return 0.5 * math.asinh(sn / cn)


def dual_parameter(k: float) -> complex:
    """Dual modulus k* = i k / sqrt(1 - k^2); 0 maps to 0 (self-dual point)."""
    k = _check_modulus(k)
    if k == 0.0:
        return 0j
    return 1j * k / math.sqrt(1.0 - k * k)
