"""Exact linear algebra over Q(zeta_m) scalars.

Dense routines cover the small constant matrices that appear in
representation splitting; the sparse routines carry the section
computations, whose coefficient systems are large but very sparse.
Rows are dicts {column: CycNum}; reduced echelon form is unique, so
every kernel basis produced here is canonical.
"""

from __future__ import annotations

from .cyclotomic import CycNum


# -- dense helpers (grids are lists of lists of CycNum) -----------------------

def mat_mul_const(a, b, conductor):
    n, k, m = len(a), len(b), len(b[0])
    zero = CycNum.zero(conductor)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = zero
            for t in range(k):
                if not a[i][t].is_zero() and not b[t][j].is_zero():
                    acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec_const(a, v, conductor):
    return [row[0] for row in
            mat_mul_const(a, [[x] for x in v], conductor)]


def identity_const(n, conductor):
    one, zero = CycNum.one(conductor), CycNum.zero(conductor)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def det_const(grid, conductor):
    n = len(grid)
    m = [list(row) for row in grid]
    det = CycNum.one(conductor)
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if not m[i][k].is_zero():
                pivot = i
                break
        if pivot is None:
            return CycNum.zero(conductor)
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            det = -det
        det = det * m[k][k]
        inv = m[k][k].inverse()
        for i in range(k + 1, n):
            if m[i][k].is_zero():
                continue
            f = m[i][k] * inv
            for j in range(k, n):
                m[i][j] = m[i][j] - f * m[k][j]
    return det


def inverse_const(grid, conductor):
    n = len(grid)
    m = [list(row) + list(idrow) for row, idrow in
         zip(grid, identity_const(n, conductor))]
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if not m[i][k].is_zero():
                pivot = i
                break
        if pivot is None:
            raise ZeroDivisionError("singular constant matrix")
        m[k], m[pivot] = m[pivot], m[k]
        inv = m[k][k].inverse()
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and not m[i][k].is_zero():
                f = m[i][k]
                m[i] = [a - f * b for a, b in zip(m[i], m[k])]
    return [row[n:] for row in m]


def rref_dense(rows, conductor):
    """Reduced row echelon form; returns (rref rows, pivot column list)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(m)):
            if not m[i][c].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def kernel_dense(rows, ncols, conductor):
    """Canonical kernel basis (one vector per free column, ascending)."""
    rref, pivots = rref_dense(rows, conductor)
    pivot_set = set(pivots)
    zero, one = CycNum.zero(conductor), CycNum.one(conductor)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        vec = [zero] * ncols
        vec[f] = one
        for r, c in enumerate(pivots):
            vec[c] = -rref[r][f]
        basis.append(tuple(vec))
    return basis


def rank_dense(rows, conductor):
    return len(rref_dense(rows, conductor)[0])


def eigenspace(grid, lam, conductor):
    """Canonical basis of ker(grid - lam*I)."""
    n = len(grid)
    rows = [[grid[i][j] - lam if i == j else grid[i][j] for j in range(n)]
            for i in range(n)]
    return kernel_dense(rows, n, conductor)


def joint_kernel(row_blocks, ncols, conductor):
    rows = [row for block in row_blocks for row in block]
    return kernel_dense(rows, ncols, conductor)


# -- sparse echelon forms (rows are dicts {col: CycNum}) -----------------------

def _sparse_reduce(row, pivots):
    """Reduce a row against normalized pivot rows until its leading column
    is pivot-free; mutates and returns the row dict."""
    while row:
        c = min(row)
        p = pivots.get(c)
        if p is None:
            return row, c
        f = row[c]
        for col, val in p.items():
            cur = row.get(col)
            nxt = (cur - f * val) if cur is not None else -(f * val)
            if nxt.is_zero():
                row.pop(col, None)
            else:
                row[col] = nxt
    return row, None


def sparse_rank(rows):
    """Rank of a sparse matrix given as an iterable of {col: CycNum} rows."""
    pivots = {}
    for row in rows:
        row = dict(row)
        row, c = _sparse_reduce(row, pivots)
        if c is None:
            continue
        inv = row[c].inverse()
        pivots[c] = {col: val * inv for col, val in row.items()}
    return len(pivots)


def sparse_kernel(rows, ncols, conductor):
    """Canonical kernel basis of a sparse system (free columns ascending)."""
    pivots = {}
    for row in rows:
        row = dict(row)
        row, c = _sparse_reduce(row, pivots)
        if c is None:
            continue
        inv = row[c].inverse()
        pivots[c] = {col: val * inv for col, val in row.items()}
    # back-substitute to reach reduced form
    for c in sorted(pivots, reverse=True):
        prow = pivots[c]
        for c2, row2 in pivots.items():
            if c2 >= c or c not in row2:
                continue
            f = row2.pop(c)
            for col, val in prow.items():
                if col == c:
                    continue
                cur = row2.get(col)
                nxt = (cur - f * val) if cur is not None else -(f * val)
                if nxt.is_zero():
                    row2.pop(col, None)
                else:
                    row2[col] = nxt
    zero, one = CycNum.zero(conductor), CycNum.one(conductor)
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        vec = [zero] * ncols
        vec[f] = one
        for c, prow in pivots.items():
            if f in prow:
                vec[c] = -prow[f]
        basis.append(tuple(vec))
    return basis
