"""Small exact integer/rational matrix routines.

Everything here works on Python ``int``/``Fraction`` entries held in
numpy ``object`` arrays or nested lists; sizes are tiny (at most 6x6) so
clarity wins over speed.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp


def as_int_matrix(m):
    a = np.array(m, dtype=object)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise ValueError("non-integral entry %s" % v)
            v = v.numerator
        iv = int(v)
        if iv != v:
            raise ValueError("non-integral entry %r" % (v,))
        out[idx] = iv
    return out


def as_frac_matrix(m):
    a = np.array(m, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = Fraction(v)
    return out


def identity(n):
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(n, m=None):
    return np.zeros((n, n if m is None else m), dtype=object) * 0


def to_key(m):
    """Hashable nested-tuple form of a matrix."""
    return tuple(tuple(row) for row in np.asarray(m).tolist())


def det(m):
    """Exact determinant by fraction-free Bareiss elimination."""
    a = [list(row) for row in np.asarray(m, dtype=object).tolist()]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num / prev if isinstance(num, Fraction) else _exact_div(num, prev)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _exact_div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        assert r == 0
        return q
    return Fraction(a) / Fraction(b)


def inverse(m):
    """Exact inverse over Q (entries returned as Fraction)."""
    a = as_frac_matrix(m)
    n = a.shape[0]
    aug = np.concatenate([a, as_frac_matrix(identity(n))], axis=1)
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r, col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] / aug[col, col]
        for r in range(n):
            if r != col and aug[r, col] != 0:
                aug[r] = aug[r] - aug[r, col] * aug[col]
    return aug[:, n:]


def int_inverse(m):
    """Inverse of a unimodular integer matrix, as an integer matrix."""
    inv = inverse(m)
    return as_int_matrix(inv)


def rank(m):
    a = as_frac_matrix(m)
    if a.size == 0:
        return 0
    rows, cols = a.shape
    r = 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if a[i, col] != 0), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(r + 1, rows):
            if a[i, col] != 0:
                a[i] = a[i] - (a[i, col] / a[r, col]) * a[r]
        r += 1
        if r == rows:
            break
    return r


def inertia(m):
    """(n_pos, n_neg, n_zero) of a symmetric rational matrix.

    Symmetric Gaussian elimination (congruence), exact over Q.
    """
    a = as_frac_matrix(m)
    n = a.shape[0]
    pos = neg = 0
    while n:
        piv = next((i for i in range(n) if a[i, i] != 0), None)
        if piv is None:
            # no diagonal pivot: either the block is zero or mix two rows
            off = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i, j] != 0), None)
            if off is None:
                break
            i, j = off
            # x_i -> x_i + x_j makes the (i,i) entry 2 a_ij != 0
            a[i] = a[i] + a[j]
            a[:, i] = a[:, i] + a[:, j]
            continue
        a[[0, piv]] = a[[piv, 0]]
        a[:, [0, piv]] = a[:, [piv, 0]]
        d = a[0, 0]
        if d > 0:
            pos += 1
        else:
            neg += 1
        rest = a[1:, 1:] - np.outer(a[1:, 0], a[0, 1:]) / d
        a = rest
        n -= 1
    zero = np.asarray(m).shape[0] - pos - neg
    return pos, neg, zero


def smith(m):
    """Smith form ``S = U M V`` with U, V unimodular; returns (diag, U, V)."""
    a = as_int_matrix(m)
    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in a.tolist()], a.shape, ZZ)
    s, u, v = smith_normal_decomp(dm)
    S = as_int_matrix(s.to_Matrix().tolist())
    U = as_int_matrix(u.to_Matrix().tolist())
    V = as_int_matrix(v.to_Matrix().tolist())
    diag = [abs(int(S[i, i])) for i in range(min(S.shape))]
    # absorb signs into U so that the diagonal is non-negative
    for i in range(min(S.shape)):
        if S[i, i] < 0:
            U[i] = -U[i]
    return diag, U, V


def row_hnf(m):
    """Row Hermite normal form ``H = U M`` with U unimodular.

    H is in row echelon form, pivots are positive and the entries above
    each pivot are reduced into ``[0, pivot)``.
    """
    h = as_int_matrix(m).copy()
    rows, cols = h.shape
    u = identity(rows)
    r = 0
    for col in range(cols):
        if r == rows:
            break
        # Euclid on column col below row r
        while True:
            nz = [i for i in range(r, rows) if h[i, col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(h[i, col]))
            if piv != r:
                h[[r, piv]] = h[[piv, r]]
                u[[r, piv]] = u[[piv, r]]
            done = True
            for i in range(r + 1, rows):
                if h[i, col] != 0:
                    q = h[i, col] // h[r, col]
                    h[i] = h[i] - q * h[r]
                    u[i] = u[i] - q * u[r]
                    if h[i, col] != 0:
                        done = False
            if done:
                break
        if h[r, col] == 0:
            continue
        if h[r, col] < 0:
            h[r] = -h[r]
            u[r] = -u[r]
        for i in range(r):
            q = h[i, col] // h[r, col]
            if q:
                h[i] = h[i] - q * h[r]
                u[i] = u[i] - q * u[r]
        r += 1
    return h, u


def kernel_basis(m):
    """Saturated basis of the integer right kernel, as columns."""
    a = as_int_matrix(m)
    h, u = row_hnf(a.T)
    zero_rows = [i for i in range(h.shape[0]) if all(x == 0 for x in h[i])]
    if not zero_rows:
        return np.zeros((a.shape[1], 0), dtype=object)
    return u[zero_rows].T.copy()


def minors_gcd(m):
    """gcd of the maximal minors of an r x n matrix (r <= n)."""
    a = as_int_matrix(m)
    r, n = a.shape
    g = 0
    for cols in combinations(range(n), r):
        g = gcd(g, int(det(a[:, list(cols)])))
        if g == 1:
            return 1
    return g


def is_primitive(m):
    """True iff the matrix can be completed to a unimodular matrix.

    Works for tall (columns completed) and wide (rows completed) shapes.
    """
    a = as_int_matrix(m)
    if a.shape[0] > a.shape[1]:
        a = a.T
    return minors_gcd(a) == 1


def complete_columns(x):
    """Unimodular matrix whose first columns are the primitive columns ``x``."""
    x = as_int_matrix(x)
    n, m = x.shape
    h, u = row_hnf(x)
    for i in range(m):
        for j in range(m):
            if h[i, j] != (1 if i == j else 0):
                raise ValueError("columns are not primitive")
    full = int_inverse(u)
    assert (full[:, :m] == x).all()
    return full


def complete_rows(x):
    """Unimodular matrix whose first rows are the primitive rows ``x``."""
    return complete_columns(as_int_matrix(x).T).T.copy()


def is_unimodular(m):
    a = as_int_matrix(m)
    return a.shape[0] == a.shape[1] and abs(det(a)) == 1


def matmul(*ms):
    out = ms[0]
    for m in ms[1:]:
        out = np.dot(out, m)
    return out


def height(m):
    a = np.asarray(m, dtype=object)
    return max((abs(int(x)) for x in a.flat), default=0)
