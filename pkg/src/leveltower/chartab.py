"""Exact character tables of small finite groups by the modular method.

The table is found over a prime field F_p with p = 1 (mod exponent) and
p > 2*sqrt(|G|): the class-sum matrices are simultaneously diagonalized
over F_p, degrees are recovered from the second orthogonality relation,
and the mod-p character values are lifted to exact cyclotomic integers by
Fourier inversion over each element order.  Both orthogonality relations
are then re-verified exactly; any failure raises, it is never papered over.
"""

from fractions import Fraction

from .cyclotomic import Cyclotomic
from .errors import CapExceeded, OracleMismatch, PreconditionError
from .groups import FiniteGroup

__all__ = ["CharacterTable", "character_table", "cuspidal_characters"]

TABLE_ORDER_CAP = 5000
_FLAT_TABLE_CAP = 1500


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _prime_factors(n: int):
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return sorted(out)


def _choose_prime(exponent: int, order: int) -> int:
    p = exponent + 1
    while True:
        if _is_prime(p) and p * p > 4 * order and (p - 1) % exponent == 0:
            return p
        p += 1


def _primitive_root(p: int) -> int:
    fac = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in fac):
            return g
    raise OracleMismatch(f"no primitive root mod {p}")


def _echelon_mod_p(rows, p: int):
    """Reduced row echelon basis of the span of the given rows over F_p."""
    mat = [list(r) for r in rows]
    ncols = len(mat[0])
    r = 0
    pivots = []
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] % p), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = pow(mat[r][c], p - 2, p)
        mat[r] = [x * inv % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] % p:
                f = mat[i][c]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    return mat[:r], pivots


def _kernel_mod_p(rows, p: int):
    """Basis of the right kernel of the matrix with the given rows, over F_p."""
    if not rows:
        return []
    ncols = len(rows[0])
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] % p), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = pow(mat[r][c], p - 2, p)
        mat[r] = [x * inv % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] % p:
                f = mat[i][c]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for ri, pc in enumerate(pivots):
            v[pc] = (-mat[ri][fc]) % p
        basis.append(v)
    return basis


class CharacterTable:
    """Conjugacy data plus the full array of exact cyclotomic character values."""

    __slots__ = ("group", "class_reps", "class_sizes", "degrees", "values",
                 "conductor", "prime")

    def __init__(self, group, class_reps, class_sizes, degrees, values,
                 conductor, prime):
        self.group = group
        self.class_reps = tuple(class_reps)
        self.class_sizes = tuple(class_sizes)
        self.degrees = tuple(degrees)
        self.values = tuple(tuple(row) for row in values)
        self.conductor = conductor
        self.prime = prime

    @property
    def n_classes(self) -> int:
        return len(self.class_reps)

    def row_inner(self, i: int, j: int) -> Cyclotomic:
        acc = Cyclotomic.zero()
        for l, size in enumerate(self.class_sizes):
            acc = acc + self.values[i][l] * self.values[j][l].conjugate() * size
        return acc / self.group.order

    def verify(self):
        g = self.group
        k = self.n_classes
        if sum(d * d for d in self.degrees) != g.order:
            raise OracleMismatch("degree squares do not sum to the group order")
        if any(d < 1 for d in self.degrees):
            raise OracleMismatch("a character degree is not a positive integer")
        one = Cyclotomic.from_rational(1)
        zero = Cyclotomic.zero()
        for i in range(k):
            for j in range(i, k):
                got = self.row_inner(i, j)
                want = one if i == j else zero
                if got != want:
                    raise OracleMismatch(f"row orthogonality failed at ({i},{j}): {got}")
        for a in range(k):
            for b in range(a, k):
                acc = Cyclotomic.zero()
                for i in range(k):
                    acc = acc + self.values[i][a] * self.values[i][b].conjugate()
                want = (Cyclotomic.from_rational(Fraction(g.order, self.class_sizes[a]))
                        if a == b else zero)
                if acc != want:
                    raise OracleMismatch(f"column orthogonality failed at ({a},{b})")
        return True

    def to_doc(self) -> dict:
        return {
            "group": self.group.name,
            "order": self.group.order,
            "conductor": self.conductor,
            "prime": self.prime,
            "class_reps": [repr(r) for r in self.class_reps],
            "class_sizes": list(self.class_sizes),
            "degrees": list(self.degrees),
            "values": [[[ [c.numerator, c.denominator] for c in v.lift(self.conductor).coords]
                        for v in row] for row in self.values],
        }


def character_table(group: FiniteGroup, cap: int = TABLE_ORDER_CAP) -> CharacterTable:
    """The complete exact character table, verified against both orthogonality laws."""
    if group.order > cap:
        raise CapExceeded(f"group order {group.order} exceeds the table cap {cap}")
    k = len(group.classes)
    e = group.exponent
    p = _choose_prime(e, group.order)
    omega = pow(_primitive_root(p), (p - 1) // e, p)

    if group.order <= _FLAT_TABLE_CAP:
        flat = [[group.imul(i, j) for j in range(group.order)] for i in range(group.order)]
        imul = lambda i, j: flat[i][j]
    else:
        imul = group.imul

    cls_of = group.class_of
    sizes = group.class_sizes
    # class-sum matrices: A[i][j][l] = #{(x,y) in C_i x C_j : x y = z_l}
    mats = [[[0] * k for _ in range(k)] for _ in range(k)]
    for i, cls in enumerate(group.classes):
        acc = mats[i]
        for x in cls:
            row = flat[x] if group.order <= _FLAT_TABLE_CAP else None
            for y in range(group.order):
                z = row[y] if row is not None else imul(x, y)
                acc[cls_of[y]][cls_of[z]] += 1
    for i in range(k):
        for j in range(k):
            for l in range(k):
                cnt = mats[i][j][l]
                if cnt % sizes[l]:
                    raise OracleMismatch("class-sum count not divisible by the class size")
                mats[i][j][l] = cnt // sizes[l]

    # simultaneous diagonalization over F_p
    spaces = [([[1 if a == b else 0 for b in range(k)] for a in range(k)],
               list(range(k)))]
    for i in range(k):
        A = mats[i]
        nxt = []
        for S, pivots in spaces:
            d = len(S)
            if d == 1:
                nxt.append((S, pivots))
                continue
            act = []
            for v in S:
                img = [sum(A[j][l] * v[l] for l in range(k)) % p for j in range(k)]
                coeffs = [img[c] for c in pivots]
                rem = list(img)
                for co, row in zip(coeffs, S):
                    rem = [(x - co * y) % p for x, y in zip(rem, row)]
                if any(rem):
                    raise OracleMismatch("class-sum matrix does not preserve a split subspace")
                act.append(coeffs)
            found = 0
            for lam in range(p):
                shifted = [[(act[a][b] - (lam if a == b else 0)) % p for b in range(d)]
                           for a in range(d)]
                ker = _kernel_mod_p([list(col) for col in zip(*shifted)], p)
                if not ker:
                    continue
                sub = []
                for coeff in ker:
                    vec = [0] * k
                    for co, row in zip(coeff, S):
                        for ci in range(k):
                            vec[ci] = (vec[ci] + co * row[ci]) % p
                    sub.append(vec)
                nxt.append(_echelon_mod_p(sub, p))
                found += len(ker)
            if found != d:
                raise OracleMismatch("eigenspace dimensions did not add up")
        spaces = nxt
    if any(len(S) != 1 for S, _ in spaces) or len(spaces) != k:
        raise OracleMismatch(f"splitting stopped at {len(spaces)} blocks, expected {k}")

    ident_cls = cls_of[group.identity_index]
    inv_cls = [cls_of[group.inverse[cls[0]]] for cls in group.classes]
    inv_size = [pow(s, p - 2, p) for s in sizes]

    rows = []
    for S, _ in spaces:
        w = S[0]
        scale = pow(w[ident_cls], p - 2, p)
        w = [x * scale % p for x in w]
        s = sum(w[l] * w[inv_cls[l]] * inv_size[l] for l in range(k)) % p
        d2 = group.order * pow(s, p - 2, p) % p
        deg = next((r for r in range(1, (p + 1) // 2) if r * r % p == d2), None)
        if deg is None:
            raise OracleMismatch("no square root below p/2 for a degree")
        theta = [deg * w[l] * inv_size[l] % p for l in range(k)]
        rows.append((deg, theta))

    # lift mod-p values to exact cyclotomic sums of roots of unity
    orders = [group.element_order(cls[0]) for cls in group.classes]
    powmaps = []
    for ci, cls in enumerate(group.classes):
        rep = cls[0]
        cur = group.identity_index
        pm = []
        for _ in range(orders[ci]):
            pm.append(cls_of[cur])
            cur = imul(cur, rep)
        powmaps.append(pm)

    chars = []
    for deg, theta in rows:
        vals = []
        for ci in range(k):
            dl = orders[ci]
            wdl = pow(omega, e // dl, p)
            inv_dl = pow(dl, p - 2, p)
            total = 0
            acc = Cyclotomic.zero(e)
            for a in range(dl):
                m = sum(theta[powmaps[ci][t]] * pow(wdl, -a * t % (p - 1), p)
                        for t in range(dl)) * inv_dl % p
                if m > deg:
                    raise OracleMismatch("eigenvalue multiplicity exceeds the degree")
                total += m
                if m:
                    acc = acc + Cyclotomic.root_of_unity(e, (e // dl) * a) * m
            if total != deg:
                raise OracleMismatch("eigenvalue multiplicities do not sum to the degree")
            vals.append(acc)
        chars.append((deg, vals))

    def sort_key(item):
        deg, vals = item
        return (deg, tuple(tuple(v.lift(e).coords) for v in vals))

    chars.sort(key=sort_key)
    table = CharacterTable(group,
                           [group.elements[cls[0]] for cls in group.classes],
                           sizes,
                           [c[0] for c in chars],
                           [c[1] for c in chars],
                           e, p)
    table.verify()
    return table


def cuspidal_characters(table: CharacterTable):
    """Indices of the characters with no Borel-induced constituent.

    Only meaningful for GL_2 over the residue field: a character is kept
    when its restriction to the upper-triangular subgroup pairs to zero
    with every linear character of the diagonal torus.  The count must be
    q(q-1)/2.
    """
    group = table.group
    meta = group.meta
    if meta.get("kind") != "gl" or meta.get("n") != 2 or meta.get("m") != 1:
        raise PreconditionError("cuspidality testing expects GL_2 over the residue field")
    q = meta["q"]
    field = meta["chain"].field
    borel = [i for i, g in enumerate(group.elements) if g[1][0] == 0]
    if len(borel) != q * (q - 1) ** 2:
        raise OracleMismatch("Borel subgroup has the wrong order")
    cls_of = group.class_of
    out = []
    for row in range(table.n_classes):
        cusp = True
        for ja in range(q - 1):
            for jd in range(q - 1):
                acc = Cyclotomic.zero()
                for bi in borel:
                    g = group.elements[bi]
                    tw = (ja * field.log(g[0][0]) + jd * field.log(g[1][1])) % (q - 1) \
                        if q > 2 else 0
                    mu = Cyclotomic.root_of_unity(q - 1, tw) if q > 2 \
                        else Cyclotomic.from_rational(1)
                    acc = acc + table.values[row][cls_of[bi]] * mu.conjugate()
                if not acc.is_zero():
                    cusp = False
                    break
            if not cusp:
                break
        if cusp:
            out.append(row)
    if len(out) != q * (q - 1) // 2:
        raise OracleMismatch(
            f"found {len(out)} cuspidal characters, expected {q * (q - 1) // 2}")
    return tuple(out)
