"""Exact integer helpers."""

from __future__ import annotations

from itertools import combinations
from math import gcd
from typing import Sequence


def bareiss_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def maximal_minor_gcd(rows: Sequence[Sequence[int]]) -> int:
    """gcd of the k x k minors of a k x d integer matrix (k <= d).

    The rows extend to a basis of Z^d exactly when this is 1.
    """
    k = len(rows)
    if k == 0:
        return 1
    d = len(rows[0])
    if k > d:
        return 0
    g = 0
    for cols in combinations(range(d), k):
        g = gcd(g, bareiss_det([[r[c] for c in cols] for r in rows]))
        if g == 1:
            break
    return g
