"""Pfaffians of skew-symmetric matrices.

Parlett-Reid style elimination with partial pivoting, O(n^3), works over the
reals and the complexes.  The sign is the one fixed by the matrix's row
order, so Pf(A)^2 = det(A) and Pf of a direct sum of [[0,1],[-1,0]] blocks
is +1.
"""

from __future__ import annotations

import numpy as np

from .errors import OddSizeError


def pfaffian(a) -> complex | float:
    """Signed Pfaffian of an even-sized skew-symmetric matrix."""
    a = np.array(a, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n % 2:
        raise OddSizeError("Pfaffian needs an even-sized matrix")
    if n == 0:
        return 1.0
    scale = np.abs(a).max()
    if scale == 0.0:
        return 0.0
    if np.abs(a + a.T).max() > 1e-8 * scale:
        raise ValueError("matrix is not skew-symmetric")
    if not np.iscomplexobj(a):
        a = a.astype(float)
    val = 1.0 + 0.0j if np.iscomplexobj(a) else 1.0
    for k in range(0, n - 1, 2):
        col = np.abs(a[k + 1:, k])
        kp = k + 1 + int(col.argmax())
        if col.max() == 0.0:
            return 0.0
        if kp != k + 1:
            a[[k + 1, kp], k:] = a[[kp, k + 1], k:]
            a[k:, [k + 1, kp]] = a[k:, [kp, k + 1]]
            val = -val
        val *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            w = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, w)
            a[k + 2:, k + 2:] -= np.outer(w, tau)
    if not np.iscomplexobj(a):
        return float(val)
    return complex(val)


def pfaffian_reference(a) -> complex | float:
    """Definitional Pfaffian by expansion along the first row (tests only)."""
    a = np.asarray(a)
    n = a.shape[0]
    if n % 2:
        raise OddSizeError("Pfaffian needs an even-sized matrix")
    if n == 0:
        return 1.0
    if n == 2:
        return a[0, 1]
    total = 0.0
    for j in range(1, n):
        keep = [i for i in range(n) if i not in (0, j)]
        sign = -1.0 if j % 2 == 0 else 1.0
        total = total + sign * a[0, j] * pfaffian_reference(a[np.ix_(keep, keep)])
    return total


def restriction_sign(pairs, size: int) -> int:
    """Sign relating Pf(A_{E^c}) to the terms of Pf(A) containing the pairs E.

    For disjoint index pairs E = ((a_1,b_1),...,(a_m,b_m)) of {0..size-1}:

        sum over matchings P >= E of sgn(P) prod A  =
            restriction_sign(E) * prod_i A[a_i, b_i] * Pf(A_{E^c})

    It is the parity of the permutation (a_1, b_1, ..., a_m, b_m, rest sorted).
    """
    flat = [i for pair in pairs for i in pair]
    rest = sorted(set(range(size)) - set(flat))
    perm = flat + rest
    sign = 1
    seen = [False] * size
    pos = {v: i for i, v in enumerate(perm)}
    for start in range(size):
        if seen[start]:
            continue
        length = 0
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cur = pos[cur]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
