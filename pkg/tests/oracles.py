"""Floating-point brute-force oracles, independent of the exact engine."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def float_in_cone(u, v, w, eps=1e-9):
    """u in R_{>0} v + R_{>0} w, by least squares in floating point."""
    a = np.array([v, w], dtype=float).T
    u = np.array(u, dtype=float)
    coef, *_ = np.linalg.lstsq(a, u, rcond=None)
    if np.linalg.norm(a @ coef - u) > eps * max(1.0, np.linalg.norm(u)):
        return False
    if np.linalg.matrix_rank(a, tol=eps) < 2:
        # parallel generators: fall back to direction checks
        vv = np.array(v, dtype=float)
        ww = np.array(w, dtype=float)
        if vv @ ww < 0:
            return True
        return bool(u @ vv > 0)
    return bool(coef[0] > eps and coef[1] > eps)


def float_centers(rays):
    n = len(rays)
    return [
        u for u in range(n)
        if all(any(float_in_cone(rays[u], rays[v], rays[w])
                   for w in range(n) if w not in (u, v))
               for v in range(n) if v != u)
    ]


def count_perfect_matchings(n, edges):
    """Exact count of perfect matchings on vertices 0..n-1 (bitmask DP)."""
    adj = [0] * n
    for a, b in edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a

    @lru_cache(maxsize=None)
    def count(mask):
        if mask == 0:
            return 1
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        total = 0
        m = adj[i] & rest
        while m:
            j = (m & -m).bit_length() - 1
            total += count(rest & ~(1 << j))
            m &= m - 1
        return total

    return count((1 << n) - 1)


def matchings_around(rays, center):
    """Number of perfect matchings of the non-center rays into pairs whose
    open cone contains the center."""
    others = [i for i in range(len(rays)) if i != center]
    idx = {r: k for k, r in enumerate(others)}
    edges = [
        (idx[a], idx[b]) for x, a in enumerate(others) for b in others[x + 1:]
        if float_in_cone(rays[center], rays[a], rays[b])
    ]
    return count_perfect_matchings(len(others), edges)
