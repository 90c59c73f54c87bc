"""Generic exact linear algebra over any field-like scalars.

The routines only use +, -, *, /, == and truthiness of entries, so they work
uniformly over Fraction, CycNum, RatFunc and RadNum values.  Callers supply
explicit zero/one elements of the scalar field.
"""

from .errors import StructureError


def mat_mul(a, b, zero):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(m):
            acc = zero
            for t in range(k):
                x = ai[t]
                if x:
                    acc = acc + x * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_identity(n, zero, one):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def mat_eq(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def mat_inv(a, zero, one):
    """Inverse via Gauss-Jordan; raises StructureError when singular."""
    n = len(a)
    aug = [list(row) + [one if i == j else zero for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if aug[r][col]:
                pivot = r
                break
        if pivot is None:
            raise StructureError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = one / aug[col][col]
        aug[col] = [c * inv for c in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [c - f * d for c, d in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def rref(rows, zero, one):
    """Reduced row echelon form; returns (reduced nonzero rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    pr = 0
    for pc in range(ncols):
        pivot = None
        for r in range(pr, len(rows)):
            if rows[r][pc]:
                pivot = r
                break
        if pivot is None:
            continue
        rows[pr], rows[pivot] = rows[pivot], rows[pr]
        inv = one / rows[pr][pc]
        rows[pr] = [c * inv for c in rows[pr]]
        for r in range(len(rows)):
            if r != pr and rows[r][pc]:
                f = rows[r][pc]
                rows[r] = [c - f * d for c, d in zip(rows[r], rows[pr])]
        pivots.append(pc)
        pr += 1
        if pr == len(rows):
            break
    return rows[:pr], pivots


def kernel_basis(rows, ncols, zero, one):
    """Basis of the right kernel {v : A v = 0} of the stacked rows."""
    reduced, pivots = rref(rows, zero, one)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, pc in enumerate(pivots):
            coef = reduced[r][f]
            if coef:
                v[pc] = zero - coef
        basis.append(v)
    return basis


def reduce_against(vec, reduced, pivots):
    """Reduce a vector against an rref basis; returns the residue."""
    vec = list(vec)
    for r, pc in enumerate(pivots):
        c = vec[pc]
        if c:
            row = reduced[r]
            vec = [x - c * y for x, y in zip(vec, row)]
    return vec


def row_span_equal(rows_a, rows_b, zero, one):
    ra, pa = rref(rows_a, zero, one)
    rb, pb = rref(rows_b, zero, one)
    if pa != pb or len(ra) != len(rb):
        return False
    return all(x == y for rowa, rowb in zip(ra, rb) for x, y in zip(rowa, rowb))
