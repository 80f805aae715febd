"""Exact integer matrix routines: column echelon forms, Smith normal form,
integer linear solvers and kernels of maps between finite abelian groups.

All matrices are dense lists of rows of Python ints, so every computation is
exact at arbitrary precision.  Sizes here are tiny (desk scale); none of this
is tuned for large inputs.
"""

from __future__ import annotations


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        for t in range(inner):
            c = ai[t]
            if c:
                bt = b[t]
                oi = out[i]
                for j in range(cols):
                    oi[j] += c * bt[j]
    return out


def mat_vec(a, v):
    return [sum(c * x for c, x in zip(row, v)) for row in a]


def column_echelon(mat):
    """Column-style Hermite echelon of an integer matrix.

    Returns (pivots, basis) where basis is a list of column vectors spanning
    the same column lattice, in echelon order: the leading nonzero row index
    of each column is strictly increasing and the leading entry is positive.
    pivots is the list of (row, leading entry) pairs, one per basis column.
    """
    if not mat:
        return [], []
    rows = len(mat)
    cols = [[mat[i][j] for i in range(rows)] for j in range(len(mat[0]))]
    basis = []
    pivots = []
    for r in range(rows):
        live = [c for c in cols if c[r] != 0]
        if not live:
            continue
        # gcd-combine all columns with a nonzero entry in row r into one
        lead = live[0]
        for other in live[1:]:
            while other[r] != 0:
                if abs(lead[r]) > abs(other[r]):
                    lead, other = other, lead
                q = other[r] // lead[r]
                for i in range(r, rows):
                    other[i] -= q * lead[i]
        if lead[r] < 0:
            for i in range(r, rows):
                lead[i] = -lead[i]
        cols = [c for c in cols if c is not lead and any(c[i] for i in range(r, rows))]
        # reduce earlier basis columns' entries in row r into canonical range
        for b in basis:
            if b[r] != 0:
                q = b[r] // lead[r]
                for i in range(r, rows):
                    b[i] -= q * lead[i]
        basis.append(lead)
        pivots.append((r, lead[r]))
    return pivots, basis


def lattice_contains(pivots, basis, vec):
    """Membership of vec in the column lattice described by column_echelon."""
    v = list(vec)
    for (r, p), col in zip(pivots, basis):
        if v[r] % p != 0:
            return False
        q = v[r] // p
        if q:
            for i in range(r, len(v)):
                v[i] -= q * col[i]
    return all(x == 0 for x in v)


def lattice_index(pivots, nrows):
    """Index of a full-rank column lattice inside Z^nrows (None if not full)."""
    if len(pivots) != nrows:
        return None
    prod = 1
    for _, p in pivots:
        prod *= p
    return prod


def kernel_basis(mat):
    """Basis of the integer kernel {x : mat @ x = 0} as a list of vectors."""
    rows = len(mat)
    n = len(mat[0]) if rows else 0
    if n == 0:
        return []
    if rows == 0:
        return identity_matrix(n)
    cols = [[mat[i][j] for i in range(rows)] for j in range(n)]
    trans = identity_matrix(n)  # trans[j] tracks column j as a vector in Z^n
    tcols = [[trans[i][j] for i in range(n)] for j in range(n)]
    order = list(range(n))
    done = []
    for r in range(rows):
        live = [j for j in order if cols[j][r] != 0]
        if not live:
            continue
        lead = live[0]
        for other in live[1:]:
            while cols[other][r] != 0:
                if abs(cols[lead][r]) > abs(cols[other][r]):
                    lead, other = other, lead
                q = cols[other][r] // cols[lead][r]
                for i in range(rows):
                    cols[other][i] -= q * cols[lead][i]
                for i in range(n):
                    tcols[other][i] -= q * tcols[lead][i]
        order = [j for j in order if j != lead]
        done.append(lead)
    return [tcols[j] for j in order]


def smith_normal_form(mat):
    """Smith normal form with transforms: returns (U, Uinv, D, V) with
    U @ mat @ V = D, U and V unimodular, D diagonal with d1 | d2 | ...
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    a = [row[:] for row in mat]
    u = identity_matrix(rows)
    uinv = identity_matrix(rows)
    v = identity_matrix(cols)

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for r in range(rows):
            uinv[r][i], uinv[r][j] = uinv[r][j], uinv[r][i]

    def row_add(i, j, q):  # row i += q * row j
        for t in range(cols):
            a[i][t] += q * a[j][t]
        for t in range(rows):
            u[i][t] += q * u[j][t]
        for r in range(rows):
            uinv[r][j] -= q * uinv[r][i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        for r in range(rows):
            uinv[r][i] = -uinv[r][i]

    def col_swap(i, j):
        for r in range(rows):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(cols):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    def col_add(i, j, q):  # col i += q * col j
        for r in range(rows):
            a[r][i] += q * a[r][j]
        for r in range(cols):
            v[r][i] += q * v[r][j]

    def col_neg(i):
        for r in range(rows):
            a[r][i] = -a[r][i]
        for r in range(cols):
            v[r][i] = -v[r][i]

    t = 0
    while t < min(rows, cols):
        # find a nonzero pivot in the remaining block
        pr = pc = -1
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < best):
                    best, pr, pc = abs(a[i][j]), i, j
        if best is None:
            break
        row_swap(t, pr)
        col_swap(t, pc)
        while True:
            progressed = False
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    row_add(i, t, -q)
                    if a[i][t] != 0:
                        row_swap(t, i)
                        progressed = True
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_add(j, t, -q)
                    if a[t][j] != 0:
                        col_swap(t, j)
                        progressed = True
            if not progressed:
                break
        if a[t][t] < 0:
            row_neg(t)
        # enforce divisibility d_t | entries of the remaining block
        fixed = False
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t] != 0:
                    row_add(t, i, 1)
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        t += 1
    return u, uinv, a, v


def smith_diagonal(mat):
    _, _, d, _ = smith_normal_form(mat)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def solve_integer(mat, target):
    """One integer solution x of mat @ x = target, or None."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if rows == 0:
        return [0] * cols
    u, _, d, v = smith_normal_form(mat)
    ub = mat_vec(u, target)
    w = [0] * cols
    for i in range(rows):
        di = d[i][i] if i < cols else 0
        if di == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % di != 0:
                return None
            w[i] = ub[i] // di
    return mat_vec(v, w)


def kernel_mod_hom(mat, src_moduli, dst_moduli):
    """Generators of the kernel of the homomorphism between finite abelian
    groups (+)Z/src_i -> (+)Z/dst_j given by the integer matrix mat
    (len(dst_moduli) rows by len(src_moduli) columns).

    Returns a list of coefficient vectors (length len(src_moduli), reduced
    mod src_moduli) generating {x : mat @ x = 0 in the target group}.
    """
    n = len(src_moduli)
    m = len(dst_moduli)
    if n == 0:
        return []
    # lattice K = {x in Z^n : mat @ x in dst lattice}; solve via kernel of
    # the block matrix [mat | diag(dst_moduli)] projected onto x coordinates
    if m == 0:
        ker = identity_matrix(n)
    else:
        block = [[mat[i][j] for j in range(n)] + [dst_moduli[i] if t == i else 0 for t in range(m)]
                 for i in range(m)]
        ker = [k[:n] for k in kernel_basis(block)]
    # add the source moduli lattice and echelonize
    lattice_cols = ker + [[src_moduli[i] if t == i else 0 for t in range(n)][:] for i in range(n)]
    mat_cols = [[col[i] for col in lattice_cols] for i in range(n)]
    _, basis = column_echelon(mat_cols)
    gens = []
    for col in basis:
        red = [col[i] % src_moduli[i] for i in range(n)]
        if any(red):
            gens.append(red)
    return gens
