"""Boundary labels: free direct summands of (o/pi^m)^n, their enumeration,
the induced action of invertible matrices, and flags of nested labels.

A label of corank type h is a free rank-h direct summand A of (o/pi^m)^n.
Canonical form: the unique generating matrix in reduced column echelon form
with unit pivots scaled to 1, pivot rows increasing, other columns zero at
pivot rows, and every entry lying strictly above a column's pivot row a
non-unit.  Greedy unit-pivot reduction from any generating set reaches this
form or proves the span is not a free direct summand.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .chain import ChainRing
from .errors import NotAFlag, PreconditionError
from .fq import FqField


def leadpos(v) -> int:
    """Index of the first nonzero coordinate; len(v) for the zero vector."""
    for i, x in enumerate(v):
        if x:
            return i
    return len(v)


def _canonicalize(ch: ChainRing, n: int, gens):
    """Greedy unit-pivot reduction.  Returns (pivot_rows, columns) or None."""
    cols = [list(g) for g in gens if any(g)]
    pivots = []
    piv_cols = []
    for r in range(n):
        hit = None
        for c in cols:
            if ch.is_unit(c[r]):
                hit = c
                break
        if hit is None:
            continue
        cols.remove(hit)
        inv = ch.inv(hit[r])
        hit = [ch.mul(inv, x) for x in hit]
        for c in cols + piv_cols:
            if c[r]:
                f = c[r]
                for i in range(n):
                    c[i] = ch.sub(c[i], ch.mul(f, hit[i]))
        pivots.append(r)
        piv_cols.append(hit)
    for c in cols:
        if any(c):
            return None
    return tuple(pivots), tuple(tuple(c) for c in piv_cols)


@dataclass(frozen=True)
class DirectSummand:
    """A free direct summand in canonical echelon form."""

    n: int
    q: int
    m: int
    pivots: tuple
    cols: tuple   # cols[k][i], generator k coordinate i

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def chain(self) -> ChainRing:
        return ChainRing(_field_cache(self.q), self.m)

    @staticmethod
    def from_generators(n: int, q: int, m: int, gens) -> "DirectSummand":
        ch = ChainRing(_field_cache(q), m)
        got = _canonicalize(ch, n, gens)
        if got is None:
            raise PreconditionError("generators do not span a free direct summand")
        pivots, cols = got
        return DirectSummand(n=n, q=q, m=m, pivots=pivots, cols=cols)

    def member(self, v) -> bool:
        ch = self.chain
        w = list(v)
        for r, col in zip(self.pivots, self.cols):
            c = w[r]
            if c:
                for i in range(self.n):
                    w[i] = ch.sub(w[i], ch.mul(c, col[i]))
        return not any(w)

    def contains(self, other: "DirectSummand") -> bool:
        return all(self.member(c) for c in other.cols)

    def is_summand_of(self, other: "DirectSummand") -> bool:
        """Whether self is a free direct summand of `other` (not just contained)."""
        if not other.contains(self):
            return False
        ch = self.chain
        coords = []
        for col in self.cols:
            w = list(col)
            cs = [0] * other.rank
            for k, (r, oc) in enumerate(zip(other.pivots, other.cols)):
                c = w[r]
                if c:
                    cs[k] = c
                    for i in range(self.n):
                        w[i] = ch.sub(w[i], ch.mul(c, oc[i]))
            coords.append(tuple(cs))
        return _canonicalize(ch, other.rank, coords) is not None

    def elements(self):
        ch = self.chain
        out = set()
        zero = tuple([0] * self.n)
        for cs in product(range(ch.size), repeat=self.rank):
            v = zero
            for c, col in zip(cs, self.cols):
                if c:
                    v = ch.vadd(v, ch.vscale(c, col))
            out.add(v)
        return out

    def key(self):
        return (self.pivots, self.cols)

    def describe(self) -> str:
        gens = ["(" + ",".join(str(x) for x in col) + ")" for col in self.cols]
        return f"rank {self.rank} label <" + ", ".join(gens) + ">"


_fields: dict[int, FqField] = {}


def _field_cache(q: int) -> FqField:
    if q not in _fields:
        p = 2
        while q % p:
            p += 1
        f = 0
        t = 1
        while t < q:
            t *= p
            f += 1
        _fields[q] = FqField(p, f)
    return _fields[q]


_enum_cache: dict[tuple, list] = {}


def enumerate_summands(n: int, q: int, m: int, h: int):
    """All rank-h labels, via the canonical-form parametrization.

    For each increasing pivot-row tuple, free entries are: anything at rows
    below a column's pivot, non-units at non-pivot rows above it, zero at
    pivot rows.
    """
    if not 0 <= h <= n:
        raise PreconditionError("rank out of range")
    key = (n, q, m, h)
    if key in _enum_cache:
        return _enum_cache[key]
    ch = ChainRing(_field_cache(q), m)
    nonunits = [a for a in range(ch.size) if not ch.is_unit(a)]
    full = list(range(ch.size))
    out = []
    for pivots in combinations(range(n), h):
        slots = []   # (col, row) in a fixed order
        choices = []
        for k, r in enumerate(pivots):
            for i in range(n):
                if i in pivots:
                    continue
                slots.append((k, i))
                choices.append(nonunits if i < r else full)
        for vals in product(*choices):
            cols = [[0] * n for _ in range(h)]
            for k, r in enumerate(pivots):
                cols[k][r] = 1
            for (k, i), v in zip(slots, vals):
                cols[k][i] = v
            out.append(DirectSummand(n=n, q=q, m=m, pivots=tuple(pivots),
                                     cols=tuple(tuple(c) for c in cols)))
    _enum_cache[key] = out
    return out


def dual_summand(A: DirectSummand) -> DirectSummand:
    """The annihilator under the standard dot pairing, rank n - h."""
    ch = A.chain
    gens = []
    pivset = set(A.pivots)
    for rho in range(A.n):
        if rho in pivset:
            continue
        w = [0] * A.n
        w[rho] = 1
        for k, r in enumerate(A.pivots):
            w[r] = ch.neg(A.cols[k][rho])
        gens.append(tuple(w))
    return DirectSummand.from_generators(A.n, A.q, A.m, gens)


def act_label(gbar, A: DirectSummand) -> DirectSummand:
    """Image of a label under an invertible matrix over o/pi^m."""
    ch = A.chain
    if not ch.is_unit(ch.det(gbar)):
        raise PreconditionError("matrix is not invertible mod pi^m")
    gens = [ch.matvec(gbar, col) for col in A.cols]
    return DirectSummand.from_generators(A.n, A.q, A.m, gens)


def transport_label(g, A: DirectSummand, m_out: int | None = None) -> DirectSummand:
    """Transport a level-m label along a general invertible matrix over F.

    Uses the normalized map x -> pi^(m - m' - r) g x with r the largest
    elementary divisor exponent; defined when the exponent spread is at most
    m - m'.  The image must again be a free direct summand of the same rank,
    which is checked at runtime.
    """
    from .matrices import mat_reduce_mod, mat_shift, smith_exponents

    m = A.m
    m_out = m if m_out is None else m_out
    if not 1 <= m_out <= m:
        raise PreconditionError("output level must be in [1, m]")
    exps = smith_exponents(g)
    spread = exps[-1] - exps[0]
    if spread > m - m_out:
        raise PreconditionError(
            f"elementary divisor spread {spread} exceeds level drop {m - m_out}")
    T = mat_shift(g, (m - m_out) - exps[-1])
    Tbar = mat_reduce_mod(T, m_out)
    ch_out = ChainRing(_field_cache(A.q), m_out)
    gens = []
    for col in A.cols:
        lift = col  # digits of level-m codes embed as integral series codes
        gens.append(ch_out.matvec(Tbar, tuple(c % ch_out.size for c in lift)))
    # reduction of codes mod pi^{m'} is truncation of base-q digits
    out = DirectSummand.from_generators(A.n, A.q, m_out, gens)
    if out.rank != A.rank:
        raise PreconditionError("label transport degenerates, rank drops")
    return out


def strata_fixed_count(gbar, n: int, q: int, m: int, h: int) -> int:
    """Number of rank-h labels fixed by an invertible matrix over o/pi^m."""
    ch = ChainRing(_field_cache(q), m)
    if not ch.is_unit(ch.det(gbar)):
        raise PreconditionError("matrix is not invertible mod pi^m")
    count = 0
    for A in enumerate_summands(n, q, m, h):
        if all(A.member(ch.matvec(gbar, col)) for col in A.cols):
            count += 1
    return count


@dataclass(frozen=True)
class Flag:
    """A chain of labels, strictly increasing rank, each a free direct
    summand of the next (and of the ambient module)."""

    parts: tuple  # DirectSummands, ascending rank

    def __post_init__(self):
        parts = self.parts
        if not parts:
            raise NotAFlag("empty chain")
        for A in parts:
            if not isinstance(A, DirectSummand):
                raise NotAFlag("chain entries must be labels")
        for A, B in zip(parts, parts[1:]):
            if not A.rank < B.rank:
                raise NotAFlag("ranks must strictly increase")
            if not A.is_summand_of(B):
                raise NotAFlag(
                    f"rank-{A.rank} part is not a free direct summand of the rank-{B.rank} part")

    @property
    def signature(self):
        return tuple(A.rank for A in self.parts)

    def describe(self) -> str:
        return " < ".join(A.describe() for A in self.parts)


def enumerate_flags(n: int, q: int, m: int, ranks=None):
    """All flags with the given rank signature (default: full, 1..n-1)."""
    if ranks is None:
        ranks = tuple(range(1, n))
    ranks = tuple(ranks)
    if not ranks:
        raise PreconditionError("empty rank signature")
    if list(ranks) != sorted(set(ranks)) or ranks[0] < 1 or ranks[-1] > n:
        raise PreconditionError("ranks must be strictly increasing in [1, n]")
    chains = [(A,) for A in enumerate_summands(n, q, m, ranks[0])]
    for h in ranks[1:]:
        bigger = enumerate_summands(n, q, m, h)
        chains = [c + (B,) for c in chains for B in bigger if c[-1].is_summand_of(B)]
    return [Flag(c) for c in chains]


def flag_of_point(values: dict, n: int, q: int, m: int) -> Flag:
    """Flag of the lower-tier cuts of a value table on (pi^-m o/o)^n.

    Keys are coordinate tuples of chain-ring codes and must cover the whole
    module (the zero vector may be omitted; its value is ignored).  A nonzero
    vector's value is its tier tuple, and x is strictly below y when
    tiers(x) < tiers(y) lexicographically, the rank-k stand-in for
    |x| < |y|^r holding at every r > 0.  Each strict lower cut, together
    with 0, must be a free direct summand or NotAFlag is raised; the flag
    collects the cuts in ascending rank, the full module included.
    """
    ch = ChainRing(_field_cache(q), m)
    zero = tuple([0] * n)
    table = {}
    for key, tiers in values.items():
        vec = tuple(key)
        if len(vec) != n or any(not 0 <= c < ch.size for c in vec):
            raise PreconditionError(f"vector {vec} is not in the module")
        if vec != zero:
            table[vec] = tuple(tiers)
    if len(table) != ch.size ** n - 1:
        raise PreconditionError(
            f"value table covers {len(table)} of {ch.size ** n - 1} nonzero vectors")
    if len({len(t) for t in table.values()}) > 1:
        raise PreconditionError("tier vectors must all have the same length")
    levels = sorted(set(table.values()))
    parts = []
    for cut in range(1, len(levels) + 1):
        allowed = set(levels[:cut])
        S = sorted(v for v, t in table.items() if t in allowed)
        got = _canonicalize(ch, n, S)
        if got is None:
            raise NotAFlag(
                f"the cut below tier {levels[cut - 1]} does not span a free direct summand")
        pivots, cols = got
        A = DirectSummand(n=n, q=q, m=m, pivots=pivots, cols=cols)
        if len(A.elements()) != len(S) + 1:
            raise NotAFlag(
                f"the cut below tier {levels[cut - 1]} is not closed under the module operations")
        parts.append(A)
    return Flag(tuple(parts))


def flag_of_label(A: DirectSummand) -> Flag:
    """The leading-position filtration of a label, validated as a flag.

    Repeatedly discards the elements whose first nonzero coordinate is the
    smallest one present; each surviving subset must again be a free direct
    summand, otherwise the filtration is not a flag and NotAFlag is raised.
    """
    ch = A.chain
    n = A.n
    zero = tuple([0] * n)
    stages = []
    cur = A.elements()
    while cur != {zero}:
        stages.append(cur)
        lead = min(leadpos(v) for v in cur if v != zero)
        cur = {v for v in cur if leadpos(v) > lead}
        # subgroup check for the survivor set
        for v in cur:
            for w in cur:
                if ch.vadd(v, w) not in cur:
                    raise NotAFlag("filtration stage is not closed under addition")
    parts = []
    for st in reversed(stages):
        got = _canonicalize(ch, n, sorted(st))
        if got is None:
            raise NotAFlag("filtration stage is not a free direct summand")
        pivots, cols = got
        parts.append(DirectSummand(n=n, q=A.q, m=A.m, pivots=pivots, cols=cols))
    dedup = []
    for P in parts:
        if not dedup or dedup[-1].key() != P.key():
            dedup.append(P)
    return Flag(tuple(dedup))
