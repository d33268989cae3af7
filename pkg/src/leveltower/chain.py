"""The chain ring o/pi^m = F_q[pi]/(pi^m) with int-encoded elements, plus small
matrix/vector helpers over it.

An element is an int in [0, q^m) whose base-q digits are F_q-codes of the
pi-adic coefficients, lowest first.  Addition is digitwise (no carries),
multiplication is truncated convolution; both are table-backed at desk scale.
"""

from __future__ import annotations

from itertools import product

from .errors import CapExceeded, PreconditionError
from .fq import FqField

_TABLE_CAP = 729  # build full mul tables up to this ring size


class ChainRing:
    _cache: dict[tuple, "ChainRing"] = {}

    def __new__(cls, field: FqField, m: int):
        key = (field.p, field.f, field.modulus, m)
        if key in cls._cache:
            return cls._cache[key]
        if m < 1:
            raise PreconditionError("m must be >= 1")
        self = super().__new__(cls)
        self.field, self.m = field, m
        self.q = field.q
        self.size = field.q ** m
        if self.size > _TABLE_CAP:
            raise CapExceeded(f"chain ring size {self.size} exceeds desk-scale table cap")
        self._build()
        cls._cache[key] = self
        return self

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.m):
            out.append(a % self.q)
            a //= self.q
        return out

    def undigits(self, ds) -> int:
        a = 0
        for d in reversed(list(ds)[: self.m]):
            a = a * self.q + d
        return a

    def _build(self):
        f, q, m, size = self.field, self.q, self.m, self.size
        add = [[0] * size for _ in range(size)]
        mul = [[0] * size for _ in range(size)]
        digs = [self.digits(a) for a in range(size)]
        for a in range(size):
            da = digs[a]
            for b in range(a, size):
                db = digs[b]
                s = self.undigits([f.add(x, y) for x, y in zip(da, db)])
                add[a][b] = add[b][a] = s
                conv = [0] * m
                for i, x in enumerate(da):
                    if x:
                        for j in range(m - i):
                            y = db[j]
                            if y:
                                conv[i + j] = f.add(conv[i + j], f.mul(x, y))
                p = self.undigits(conv)
                mul[a][b] = mul[b][a] = p
        self._add, self._mul = add, mul
        self._neg = [self.undigits([f.neg(x) for x in digs[a]]) for a in range(size)]
        inv = [None] * size
        for a in range(size):
            if digs[a][0]:
                for b in range(size):
                    if mul[a][b] == 1:
                        inv[a] = b
                        break
        self._inv = inv
        self.pi = self.undigits([0, 1] + [0] * m) if m > 1 else 0
        self.one = 1

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def is_unit(self, a) -> bool:
        return a % self.q != 0

    def inv(self, a):
        r = self._inv[a]
        if r is None:
            raise PreconditionError("element is not a unit")
        return r

    def from_field(self, c: int) -> int:
        return c

    def units(self):
        return [a for a in range(self.size) if a % self.q]

    def elements(self):
        return range(self.size)

    def reduce_to(self, a: int, m2: int) -> int:
        """Image in o/pi^m2 for m2 <= m."""
        return a % (self.q ** m2)

    # -- vectors (tuples) and matrices (row-major tuples of tuples) ------------

    def vadd(self, v, w):
        add = self._add
        return tuple(add[a][b] for a, b in zip(v, w))

    def vneg(self, v):
        return tuple(self._neg[a] for a in v)

    def vscale(self, c, v):
        mul = self._mul
        return tuple(mul[c][a] for a in v)

    def matvec(self, M, v):
        add, mul = self._add, self._mul
        out = []
        for row in M:
            acc = 0
            for a, b in zip(row, v):
                if a and b:
                    acc = add[acc][mul[a][b]]
            out.append(acc)
        return tuple(out)

    def matmul(self, A, B):
        n, k = len(A), len(B[0])
        add, mul = self._add, self._mul
        out = []
        for i in range(n):
            row = []
            Ai = A[i]
            for j in range(k):
                acc = 0
                for t in range(len(B)):
                    a, b = Ai[t], B[t][j]
                    if a and b:
                        acc = add[acc][mul[a][b]]
                row.append(acc)
            out.append(tuple(row))
        return tuple(out)

    def identity(self, n):
        return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))

    def det(self, M):
        n = len(M)
        if n == 1:
            return M[0][0]
        if n == 2:
            return self.sub(self.mul(M[0][0], M[1][1]), self.mul(M[0][1], M[1][0]))
        # Leibniz is fine at desk scale (n <= 4)
        total = 0
        for perm, sign in _permutations_signed(n):
            term = 1
            for i in range(n):
                term = self.mul(term, M[i][perm[i]])
                if not term:
                    break
            total = self.add(total, term if sign > 0 else self.neg(term))
        return total

    def mat_invertible(self, M) -> bool:
        return self.is_unit(self.det(M))

    def mat_inv(self, M):
        """Inverse via Gaussian elimination with unit pivots (local ring)."""
        n = len(M)
        A = [list(row) for row in M]
        I = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = None
            for r in range(col, n):
                if self.is_unit(A[r][col]):
                    piv = r
                    break
            if piv is None:
                raise PreconditionError("matrix is not invertible")
            A[col], A[piv] = A[piv], A[col]
            I[col], I[piv] = I[piv], I[col]
            c = self.inv(A[col][col])
            A[col] = [self.mul(c, x) for x in A[col]]
            I[col] = [self.mul(c, x) for x in I[col]]
            for r in range(n):
                if r != col and A[r][col]:
                    f = A[r][col]
                    A[r] = [self.sub(x, self.mul(f, y)) for x, y in zip(A[r], A[col])]
                    I[r] = [self.sub(x, self.mul(f, y)) for x, y in zip(I[r], I[col])]
        return tuple(tuple(row) for row in I)

    def all_vectors(self, n):
        return product(range(self.size), repeat=n)

    def charpoly(self, M):
        """Coefficients of det(T*I - M), lowest first, length n+1."""
        n = len(M)
        total = [0] * (n + 1)
        one = 1
        for perm, sign in _permutations_signed(n):
            prod = [one]
            for i in range(n):
                j = perm[i]
                ent = [self._neg[M[i][j]], 1] if i == j else [self._neg[M[i][j]]]
                new = [0] * (len(prod) + len(ent) - 1)
                for a_i, a in enumerate(prod):
                    if a:
                        for b_i, b in enumerate(ent):
                            if b:
                                new[a_i + b_i] = self._add[new[a_i + b_i]][self._mul[a][b]]
                prod = new
            for k, c in enumerate(prod):
                total[k] = self._add[total[k]][c if sign > 0 else self._neg[c]]
        return total

    def __repr__(self):
        return f"ChainRing(q={self.q}, m={self.m})"


_GL_CAP = 200_000
_gl_cache: dict[tuple, list] = {}


def gl_elements(ch: ChainRing, n: int, cap: int = _GL_CAP):
    """All invertible n x n matrices over o/pi^m, cached.

    The raw scan has q^(m n^2) candidates; anything past the cap raises so
    callers can fall back or refuse loudly.
    """
    key = (ch.q, ch.m, n)
    if key in _gl_cache:
        return _gl_cache[key]
    total = ch.size ** (n * n)
    if total > cap:
        raise CapExceeded(f"unit group scan size {total} exceeds cap {cap}")
    out = []
    for flat in product(range(ch.size), repeat=n * n):
        M = tuple(flat[i * n:(i + 1) * n] for i in range(n))
        if ch.is_unit(ch.det(M)):
            out.append(M)
    _gl_cache[key] = out
    return out


def _permutations_signed(n: int):
    from itertools import permutations
    base = list(range(n))
    for perm in permutations(base):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        yield perm, (-1) ** inv
