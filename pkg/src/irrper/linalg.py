"""Small dense linear algebra in any mpmath context (Gaussian elimination)."""

from __future__ import annotations


def lu_det(a):
    """Determinant by elimination with scaled partial pivoting (pivot chosen relative
    to the row's largest entry, so badly row-scaled matrices stay accurate)."""
    n = len(a)
    m = [list(row) for row in a]
    scale = [max(abs(v) for v in row) or 1 for row in m]
    det = 1
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(m[i][k]) / scale[i])
        if m[piv][k] == 0:
            return 0 * det
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            scale[k], scale[piv] = scale[piv], scale[k]
            det = -det
        det = det * m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f != 0:
                row_i, row_k = m[i], m[k]
                for j in range(k + 1, n):
                    row_i[j] = row_i[j] - f * row_k[j]
    return det


def solve(a, b):
    """Solve a x = b (b is a list of right-hand-side columns given as a matrix)."""
    n = len(a)
    m = [list(row) + list(rhs) for row, rhs in zip(a, b)]
    w = len(m[0])
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(m[i][k]))
        if m[piv][k] == 0:
            raise ZeroDivisionError("singular matrix")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        for j in range(k, w):
            m[k][j] = m[k][j] * inv
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                for j in range(k, w):
                    m[i][j] = m[i][j] - f * m[k][j]
    return [row[n:] for row in m]


def inverse(a):
    n = len(a)
    one = a[0][0] * 0 + 1
    ident = [[one if i == j else 0 * one for j in range(n)] for i in range(n)]
    return solve(a, ident)


def det_error_bound(a, errors):
    """First-order bound sum_ij |cofactor_ij| err_ij = |det| sum_ij |(A^-1)_ji| err_ij."""
    d = lu_det(a)
    inv = inverse(a)
    n = len(a)
    acc = 0.0
    for i in range(n):
        for j in range(n):
            acc += float(abs(inv[j][i])) * float(errors[i][j])
    return float(abs(d)) * acc


def lstsq(rows, rhs):
    """Least squares via normal equations (tiny, well-scaled systems only)."""
    k = len(rows[0])
    ata = [[sum(r[i].conjugate() * r[j] if hasattr(r[i], "conjugate") else r[i] * r[j] for r in rows)
            for j in range(k)] for i in range(k)]
    atb = [[sum((r[i].conjugate() if hasattr(r[i], "conjugate") else r[i]) * y for r, y in zip(rows, rhs))]
           for i in range(k)]
    return [row[0] for row in solve(ata, atb)]
