"""Matrices over F = F_Q((pi)): exact small-matrix linear algebra, column
Hermite reduction of lattice bases, and elementary divisor exponents.

Matrices are tuples of row tuples of Laurent entries.  Lattices are spanned
by matrix columns; the canonical basis is upper triangular with diagonal
pi^(a_i) and above-diagonal entries reduced mod the diagonal of their row.
All sizes here are desk scale (n <= 4), so determinants and characteristic
polynomials use Leibniz expansion.
"""

from __future__ import annotations

from math import inf

from .chain import _permutations_signed
from .errors import PrecisionError, PreconditionError
from .fq import FqField
from .laurent import DEFAULT_PREC, Laurent

WORK_PREC = 32


def mat_identity(field: FqField, n: int):
    one, zero = Laurent.one(field), Laurent.zero(field)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def mat_zero(field: FqField, n: int, m=None):
    zero = Laurent.zero(field)
    return tuple(tuple(zero for _ in range(m or n)) for _ in range(n))


def mat_from_ints(field: FqField, rows):
    """Entries given as ChainRing-style digit ints (base q, pi-adic)."""
    out = []
    for row in rows:
        r = []
        for a in row:
            digs = []
            x = a
            while x:
                digs.append(x % field.q)
                x //= field.q
            r.append(Laurent.from_digits(field, digs))
        out.append(tuple(r))
    return tuple(out)


def mat_add(A, B):
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B):
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(c: Laurent, A):
    return tuple(tuple(c * a for a in row) for row in A)


def mat_shift(A, k: int):
    """Multiply by pi^k entrywise."""
    return tuple(tuple(a.shift(k) for a in row) for row in A)


def mat_mul(A, B):
    n, mid, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for t in range(mid):
                term = A[i][t] * B[t][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def mat_vec(A, v):
    out = []
    for row in A:
        acc = None
        for a, x in zip(row, v):
            term = a * x
            acc = term if acc is None else acc + term
        out.append(acc)
    return tuple(out)


def transpose(A):
    return tuple(tuple(A[i][j] for i in range(len(A))) for j in range(len(A[0])))


def mat_frobenius(A, fp_times: int):
    return tuple(tuple(a.frobenius(fp_times) for a in row) for row in A)


def det(A) -> Laurent:
    n = len(A)
    field = A[0][0].field
    total = Laurent.zero(field)
    for perm, sign in _permutations_signed(n):
        term = Laurent.one(field)
        for i in range(n):
            term = term * A[i][perm[i]]
        total = total + (term if sign > 0 else -term)
    return total


def adjugate(A):
    """Transpose of cofactors; A * adj(A) = det(A) * I exactly."""
    n = len(A)
    field = A[0][0].field
    if n == 1:
        return ((Laurent.one(field),),)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = tuple(tuple(A[r][c] for c in range(n) if c != j)
                          for r in range(n) if r != i)
            cof = det(minor)
            if (i + j) % 2:
                cof = -cof
            out[j][i] = cof
    return tuple(tuple(row) for row in out)


def mat_inv(A, prec: int | None = None):
    d = det(A)
    dinv = d.inverse(prec)
    return mat_scale(dinv, adjugate(A))


def mat_inv_gauss(M, work_prec: int = WORK_PREC):
    """Inverse by elimination with minimal-valuation pivoting.

    Scales to sizes where the adjugate route blows up (the flattened n^2
    matrices used for endomorphism lattices).  Result entries are series
    truncated near work_prec.
    """
    n = len(M)
    field = M[0][0].field
    A = [list(row) for row in M]
    B = [[Laurent.one(field) if i == j else Laurent.zero(field) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv_r, piv_v = None, inf
        for r in range(col, n):
            x = A[r][col]
            if not x.is_zero():
                v = x.valuation()
                if v < piv_v:
                    piv_r, piv_v = r, v
        if piv_r is None:
            raise PreconditionError("matrix is singular at working precision")
        A[col], A[piv_r] = A[piv_r], A[col]
        B[col], B[piv_r] = B[piv_r], B[col]
        pinv = A[col][col].inverse(work_prec)
        A[col] = [x * pinv for x in A[col]]
        B[col] = [x * pinv for x in B[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                B[r] = [x - f * y for x, y in zip(B[r], B[col])]
    return tuple(tuple(row) for row in B)


def charpoly(A):
    """Coefficients of det(T*I - A), lowest degree first, length n+1, monic."""
    n = len(A)
    field = A[0][0].field
    zero = Laurent.zero(field)

    def entry(i, j):
        # the polynomial (T*delta_ij - A[i][j]) as a coefficient list
        if i == j:
            return [-A[i][j], Laurent.one(field)]
        return [-A[i][j]]

    total = [zero] * (n + 1)
    for perm, sign in _permutations_signed(n):
        prod = [Laurent.one(field)]
        for i in range(n):
            e = entry(i, perm[i])
            new = [zero] * (len(prod) + len(e) - 1)
            for a_i, a in enumerate(prod):
                for b_i, b in enumerate(e):
                    new[a_i + b_i] = new[a_i + b_i] + a * b
            prod = new
        for k, c in enumerate(prod):
            total[k] = total[k] + (c if sign > 0 else -c)
    return total


def companion(field: FqField, coeffs) -> tuple:
    """Companion matrix of a monic polynomial given low-first over Laurent."""
    n = len(coeffs) - 1
    if n < 1 or not (coeffs[-1] == Laurent.one(field)):
        raise PreconditionError("companion needs a monic polynomial of degree >= 1")
    zero, one = Laurent.zero(field), Laurent.one(field)
    rows = []
    for i in range(n):
        row = [zero] * n
        if i > 0:
            row[i - 1] = one
        row[n - 1] = -coeffs[i]
        rows.append(tuple(row))
    return tuple(rows)


def _exactify_below(x: Laurent, bound: int) -> Laurent:
    """Rebuild x from its digits at exponents < bound as an exact series."""
    if not x.known_to(bound):
        raise PrecisionError("cannot canonicalize: precision below reduction bound")
    return Laurent(x.field, {e: c for e, c in x.coeffs.items() if e < bound})


def hnf(columns, work_prec: int = WORK_PREC):
    """Canonical column-Hermite basis of the lattice spanned by `columns`.

    Input: a list of length-n column tuples (at least n of them, full rank).
    Output: an n x n upper triangular matrix (tuple of rows) with diagonal
    pi^(a_i) and the entry (i, j), j > i, supported on exponents < a_i.
    Entries of the result are exact.
    """
    n = len(columns[0])
    cols = [list(c) for c in columns]
    placed = [None] * n
    for i in range(n - 1, -1, -1):
        best = None
        best_v = inf
        for c in cols:
            x = c[i]
            if x.is_zero():
                if not x.exact and (x.prec is None or x.prec < work_prec // 2):
                    raise PrecisionError("pivot entry vanishes at precision, rank unclear")
                continue
            v = x.valuation()
            if v < best_v:
                best_v = v
                best = c
        if best is None:
            raise PreconditionError(f"columns do not have full rank at row {i}")
        cols.remove(best)
        pivot = best[i]
        # normalize the pivot column so its leading entry is exactly pi^a
        unit_inv = pivot.shift(-best_v).inverse(work_prec)
        best = [x * unit_inv for x in best]
        best[i] = Laurent.pi(pivot.field, best_v)
        placed[i] = best
        for c in cols:
            if not c[i].is_zero():
                factor = c[i].shift(-best_v)
                for r in range(n):
                    c[r] = c[r] - factor * best[r]
                c[i] = Laurent.zero(pivot.field)
    # above-diagonal reduction, top rows already triangular
    diag_exp = [placed[i][i].valuation() for i in range(n)]
    for j in range(n):
        col = placed[j]
        for i in range(j - 1, -1, -1):
            a_i = diag_exp[i]
            x = col[i]
            if x.is_zero():
                continue
            carry = Laurent(x.field, {e: c for e, c in x.coeffs.items() if e >= a_i})
            if not carry.is_zero():
                factor = carry.shift(-a_i)
                for r in range(i + 1):
                    col[r] = col[r] - factor * placed[i][r]
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            x = placed[j][i]
            if i == j:
                row.append(Laurent.pi(x.field, diag_exp[i]))
            elif j < i:
                row.append(Laurent.zero(x.field))
            else:
                row.append(_exactify_below(x, diag_exp[i]))
        rows.append(tuple(row))
    return tuple(rows)


def lattice_pi_normalize(H):
    """Scale a basis by a power of pi so the minimal entry valuation is 0."""
    v = inf
    for row in H:
        for x in row:
            if not x.is_zero():
                v = min(v, x.valuation())
    if v is inf:
        raise PreconditionError("zero lattice")
    return mat_shift(H, -v) if v else H


def lattice_dual(H, work_prec: int = WORK_PREC):
    """Basis of the dual lattice {x : <x, L> in o} = (H^T)^{-1} columns."""
    n = len(H)
    invT = transpose(mat_inv_gauss(H, work_prec))
    return hnf([tuple(invT[i][j] for i in range(n)) for j in range(n)], work_prec)


def lattice_intersect(H1, H2, work_prec: int = WORK_PREC):
    """Intersection via duality: L1 cap L2 = dual(dual(L1) + dual(L2))."""
    D1, D2 = lattice_dual(H1, work_prec), lattice_dual(H2, work_prec)
    n = len(H1)
    cols = [tuple(D[i][j] for i in range(n)) for D in (D1, D2) for j in range(n)]
    return lattice_dual(hnf(cols, work_prec), work_prec)


def lattice_sum(H1, H2, work_prec: int = WORK_PREC):
    n = len(H1)
    cols = [tuple(H[i][j] for i in range(n)) for H in (H1, H2) for j in range(n)]
    return hnf(cols, work_prec)


def smith_exponents(A) -> list:
    """Elementary divisor exponents of an integral full-rank matrix, ascending."""
    n = len(A)
    M = [list(row) for row in A]
    for row in M:
        for x in row:
            if not x.is_zero() and x.valuation() < 0:
                raise PreconditionError("matrix is not integral")
    out = []
    size = n
    while size > 0:
        best = None
        best_v = inf
        for i in range(size):
            for j in range(size):
                x = M[i][j]
                if not x.is_zero():
                    v = x.valuation()
                    if v < best_v:
                        best_v, best = v, (i, j)
        if best is None:
            raise PreconditionError("matrix is singular, no elementary divisors")
        bi, bj = best
        M[0], M[bi] = M[bi], M[0]
        for row in M:
            row[0], row[bj] = row[bj], row[0]
        piv = M[0][0]
        piv_inv = piv.inverse(WORK_PREC)
        for j in range(1, size):
            if not M[0][j].is_zero():
                f = M[0][j] * piv_inv
                for i in range(size):
                    M[i][j] = M[i][j] - f * M[i][0]
        for i in range(1, size):
            if not M[i][0].is_zero():
                f = M[i][0] * piv_inv
                for j in range(size):
                    M[i][j] = M[i][j] - f * M[0][j]
        out.append(best_v)
        M = [row[1:] for row in M[1:]]
        size -= 1
    return sorted(out)


def val_det(A):
    """Valuation of the determinant, computed exactly."""
    d = det(A)
    return d.valuation()


def mat_reduce_mod(A, m: int):
    """Entrywise image in (o/pi^m), ChainRing int codes."""
    return tuple(tuple(x.reduce_mod(m) for x in row) for row in A)


def mat_is_integral(A) -> bool:
    for row in A:
        for x in row:
            if x.is_zero():
                if not x.exact and x.prec < 0:
                    raise PrecisionError("integrality undecidable at this precision")
                continue
            if x.valuation() < 0:
                return False
    return True
