"""Additive formal o-modules in polynomial normal form, full level
structures, level towers, and quotients by finite flat subgroups.

Conventions used throughout:

* o = F_q[[pi]] acts through the normal form
  [pi](T) = pi*T + u_1*T^q + ... + u_{n-1}*T^(q^(n-1)) + T^(q^n),
  [c](T) = c*T for c in F_q.
* A point of level m is a vector v in (o/pi^m)^n, int-encoded per ChainRing;
  v stands for sum_j v_j * pi^(-m) e_j in the generic fibre picture, so the
  unit vector e_j denotes the basis point pi^(-m) e_j.
* Polynomials are dense coefficient lists over a CoeffRing, lowest degree
  first, as in rings.py.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .chain import ChainRing
from .errors import (
    NoNormalForm,
    NonLinearIsogeny,
    PreconditionError,
)
from .fq import FqField
from .rings import (
    CoeffRing,
    DEFAULT_RANK_CAP,
    RingElem,
    convert,
    poly_add,
    poly_compose,
    poly_derivative,
    poly_divide_exact,
    poly_eval,
    poly_mul,
    poly_scale,
    poly_trim,
    ring_extend,
)


class FormalOModule:
    """A height-n additive formal o-module over a coefficient ring.

    Stored data: the ring, q, n, and the list of middle coefficients
    u_1 .. u_{n-1} (the T^q .. T^(q^(n-1)) coefficients of [pi]; the leading
    coefficient is always 1, the linear one always pi).
    """

    def __init__(self, ring: CoeffRing, n: int, q: int, u_values):
        if n < 1:
            raise PreconditionError("height must be >= 1")
        u_values = list(u_values)
        if len(u_values) != n - 1:
            raise PreconditionError(f"expected {n - 1} middle coefficients, got {len(u_values)}")
        p = ring.field.p
        f = 0
        qq = 1
        while qq < q:
            qq *= p
            f += 1
        if qq != q:
            raise PreconditionError(f"q={q} is not a power of the coefficient characteristic {p}")
        if ring.field.f % f != 0:
            raise PreconditionError("the scalar field F_q does not embed in the coefficient field")
        self.ring = ring
        self.n = n
        self.q = q
        self.scalar_field = FqField(p, f)
        if self.scalar_field.q == ring.field.q:
            self._embed = list(range(q))
        else:
            self._embed = self.scalar_field.embedding(ring.field)
        self.u_values = [v if isinstance(v, RingElem) else ring.from_int(v) for v in u_values]
        self._pi_powers = [[ring.zero(), ring.one()]]  # [pi^0] = T

    def scalar(self, c: int) -> RingElem:
        """The ring element acting as the F_q-scalar with code c."""
        return self.ring.from_field(self._embed[c])

    def pi_poly(self):
        """[pi](T) as a dense coefficient list of length q^n + 1."""
        ring, q, n = self.ring, self.q, self.n
        out = [ring.zero()] * (q ** n + 1)
        out[1] = ring.pi()
        for i, u in enumerate(self.u_values, start=1):
            out[q ** i] = u
        out[q ** n] = ring.one()
        return out

    def pi_power(self, k: int):
        """[pi^k](T), cached; degree q^(n*k), derivative pi^k."""
        if k < 0:
            raise PreconditionError("k must be >= 0")
        while len(self._pi_powers) <= k:
            self._pi_powers.append(poly_compose(self.pi_poly(), self._pi_powers[-1]))
        return self._pi_powers[k]

    def alpha_mult(self, digits):
        """[alpha](T) for alpha = sum_i digits[i] * pi^i, digits F_q-codes."""
        out = [self.ring.zero()]
        for i, c in enumerate(digits):
            if c:
                out = poly_add(out, poly_scale(self.scalar(c), self.pi_power(i)))
        return poly_trim(out)

    def act(self, digits, value: RingElem) -> RingElem:
        """Evaluate [alpha] at a point value without building the polynomial."""
        acc = self.ring.zero()
        cur = value
        pp = self.pi_poly()
        for i, c in enumerate(digits):
            if i:
                cur = poly_eval(pp, cur)
            if c:
                acc = acc + self.scalar(c) * cur
        return acc

    def describe(self) -> str:
        q, n = self.q, self.n
        terms = ["pi*T"]
        for i, u in enumerate(self.u_values, start=1):
            if not u.is_zero():
                terms.append(f"({u!r})*T^{q ** i}")
        terms.append(f"T^{q ** n}")
        return " + ".join(terms)

    def __repr__(self):
        return f"FormalOModule(n={self.n}, q={self.q}, over {self.ring.describe()})"


def make_module(n: int, q: int, u_spec=None, prec: int = 3,
                rank_cap: int = DEFAULT_RANK_CAP) -> FormalOModule:
    """Build a formal o-module over a fresh coefficient ring.

    u_spec is a list of n-1 entries, one per middle coefficient:
      * an int N >= 1: a formal nilpotent generator with that vanishing order
        (N = 1 collapses to the value 0),
      * a tuple/list of F_q digit codes (c_0, c_1, ...): the value
        sum_i c_i pi^i.
    The default makes every middle coefficient a square-zero formal generator.
    """
    if u_spec is None:
        u_spec = [2] * (n - 1)
    u_spec = list(u_spec)
    if len(u_spec) != n - 1:
        raise PreconditionError(f"u_spec must have {n - 1} entries")
    if prec < 2:
        raise PreconditionError("precision must be >= 2 so pi is visible")
    fld = _field_for_q(q)
    u_orders = tuple(s for s in u_spec if isinstance(s, int) and s >= 2)
    ring = CoeffRing(fld, prec, u_orders=u_orders, rank_cap=rank_cap)
    u_values = []
    slot = 0
    for s in u_spec:
        if isinstance(s, int):
            if s >= 2:
                slot += 1
                u_values.append(ring.u(slot))
            else:
                u_values.append(ring.zero())
        else:
            u_values.append(_pi_poly_value(ring, s))
    return FormalOModule(ring, n, q, u_values)


def _field_for_q(q: int) -> FqField:
    p, f = _split_prime_power(q)
    return FqField(p, f)


def _split_prime_power(q: int):
    if q < 2:
        raise PreconditionError("q must be a prime power >= 2")
    p = None
    for cand in range(2, q + 1):
        if q % cand == 0:
            p = cand
            break
    f = 0
    qq = 1
    while qq < q:
        qq *= p
        f += 1
    if qq != q:
        raise PreconditionError(f"q={q} is not a prime power")
    return p, f


def _pi_poly_value(ring: CoeffRing, digits) -> RingElem:
    out = ring.zero()
    pi = ring.pi()
    pw = ring.one()
    for c in digits:
        if c:
            out = out + ring.from_field(c) * pw
        pw = pw * pi
    return out


def alpha_mult(module: FormalOModule, digits):
    return module.alpha_mult(digits)


def pi_power(module: FormalOModule, k: int):
    return module.pi_power(k)


@dataclass
class LevelStructure:
    """A level-m structure: a value phi(v) for every v in (o/pi^m)^n."""

    module: FormalOModule
    m: int
    values: dict

    def __post_init__(self):
        self.chain = ChainRing(self.module.scalar_field, self.m)

    def basis_image(self, j: int) -> RingElem:
        """phi(pi^{-m} e_j), 1-based j."""
        v = tuple(1 if t == j - 1 else 0 for t in range(self.module.n))
        return self.values[v]

    def torsion_vectors(self):
        """Vectors killed by pi, i.e. with all digits below the top one zero."""
        ch = self.chain
        top = ch.q ** (ch.m - 1)
        from itertools import product as iproduct
        return [tuple(top * c for c in cs)
                for cs in iproduct(range(ch.q), repeat=self.module.n)]


def check_level(phi: LevelStructure, pair_cap: int = 20000):
    """Validate the level-structure contract.

    Checks, in order: the domain is complete; phi is additive (all pairs when
    that stays under pair_cap, else a deterministic stride sample); phi is
    F_q-linear and intertwines pi with [pi]; and the product of (T - phi(v))
    over the pi-torsion vectors divides [pi](T) exactly.

    Returns a report dict with keys ok, witness, quotient_degree, pairs_checked.
    """
    module, m, values = phi.module, phi.m, phi.values
    ring, ch = module.ring, phi.chain
    n = module.n
    report = {"ok": False, "witness": None, "quotient_degree": None, "pairs_checked": 0}

    expected = ch.size ** n
    if len(values) != expected:
        report["witness"] = {"kind": "domain", "detail": f"{len(values)} values, expected {expected}"}
        return report
    zero_vec = tuple([0] * n)
    if not values[zero_vec].is_zero():
        report["witness"] = {"kind": "zero", "detail": "phi(0) != 0"}
        return report

    vecs = list(values.keys())
    # additivity
    pairs = 0
    total_pairs = len(vecs) * len(vecs)
    stride = 1 if total_pairs <= pair_cap else (total_pairs // pair_cap) + 1
    idx = 0
    for v in vecs:
        pv = values[v]
        for w in vecs:
            idx += 1
            if stride > 1 and idx % stride:
                continue
            if values[ch.vadd(v, w)] != pv + values[w]:
                report["witness"] = {"kind": "additivity", "v": v, "w": w}
                return report
            pairs += 1
    report["pairs_checked"] = pairs

    gen = module.scalar_field.generator
    pp = module.pi_poly()
    for v in vecs:
        pv = values[v]
        if values[ch.vscale(gen, v)] != module.scalar(gen) * pv:
            report["witness"] = {"kind": "scalar", "v": v}
            return report
        target = values[ch.vscale(ch.pi, v)] if m > 1 else values[zero_vec]
        if poly_eval(pp, pv) != target:
            report["witness"] = {"kind": "pi-linearity", "v": v}
            return report

    prod = [ring.one()]
    for v in phi.torsion_vectors():
        prod = poly_mul(prod, [ring.zero() - values[v], ring.one()])
    try:
        quo = poly_divide_exact(pp, prod)
    except Exception as exc:  # NonExactDivision carries the witness coefficient
        report["witness"] = {"kind": "divisor", "detail": str(exc),
                             "remainder": repr(getattr(exc, "remainder", None))}
        return report
    report["quotient_degree"] = len(poly_trim(quo)) - 1
    report["ok"] = True
    return report


@dataclass
class Tower:
    """A full level-m structure built stage by stage over the base ring."""

    n: int
    q: int
    m: int
    base_ring: CoeffRing
    ring: CoeffRing
    module: FormalOModule
    stage_degrees: list
    level_values: list          # level_values[l-1]: dict for level l, in top ring
    basis_images: list          # basis_images[l-1][j-1] = phi_l(pi^{-l} e_{j}), top ring
    u_spec_label: str
    structure: LevelStructure = dc_field(init=False)

    def __post_init__(self):
        self.structure = LevelStructure(self.module, self.m, self.level_values[-1])

    @property
    def rank_over_base(self) -> int:
        r = 1
        for d in self.stage_degrees:
            r *= d
        return r


def _u_spec_label(n, u_spec) -> str:
    if u_spec is None:
        u_spec = [2] * (n - 1)
    parts = []
    for s in u_spec:
        if isinstance(s, int):
            parts.append(f"nil{s}")
        else:
            parts.append("val:" + ",".join(str(c) for c in s))
    return ";".join(parts) if parts else "-"


def gl_order(n: int, q: int, m: int = 1) -> int:
    """|GL_n(o/pi^m)| by the standard product formula."""
    r = q ** ((m - 1) * n * n)
    for i in range(n):
        r *= q ** n - q ** i
    return r


def build_tower(n: int, q: int, m: int, prec: int | None = None, u_spec=None,
                rank_cap: int = DEFAULT_RANK_CAP) -> Tower:
    """Adjoin a complete level-m structure stage by stage.

    Level 1 goes one basis point at a time: with the span V_i of the first i
    points already adjoined, psi_i(T) = prod_{a in V_i} (T - phi(a)) divides
    [pi](T) exactly and the quotient f_i is the minimal polynomial of the next
    point.  Each later level adjoins, for each j, a root of
    [pi](T) - phi_{l-1}(pi^{-(l-1)} e_j).  Requires prec >= m + 1 so that the
    tower sees one pi beyond the level being built.
    """
    if m < 1:
        raise PreconditionError("level must be >= 1")
    if prec is None:
        prec = m + 1
    if prec < m + 1:
        raise PreconditionError(f"precision {prec} < level + 1 = {m + 1}")
    module = make_module(n, q, u_spec=u_spec, prec=prec, rank_cap=rank_cap)
    base_ring = module.ring
    ring = base_ring
    fld = module.scalar_field

    stage_degrees = []
    # level 1, basis point by basis point
    ch1 = ChainRing(fld, 1)
    span = {tuple([0] * n): ring.zero()}
    level1_basis = []
    for i in range(n):
        psi = [ring.one()]
        for val in span.values():
            psi = poly_mul(psi, [ring.zero() - val, ring.one()])
        f_i = poly_divide_exact(module.pi_poly(), psi)
        f_i = poly_trim(f_i)
        stage_degrees.append(len(f_i) - 1)
        ring, theta = ring_extend(ring, f_i, name=f"y{i + 1}_1", rank_cap=rank_cap)
        module = FormalOModule(ring, n, q, [convert(u, ring) for u in module.u_values])
        span = {v: convert(val, ring) for v, val in span.items()}
        level1_basis = [convert(b, ring) for b in level1_basis]
        level1_basis.append(theta)
        new_span = {}
        for c in range(q):
            ct = module.scalar(c) * theta if c else ring.zero()
            for v, val in span.items():
                w = list(v)
                w[i] = fld.add(w[i], c)
                new_span[tuple(w)] = val + ct
        span = new_span
    level_value_dicts = [span]
    basis_images = [level1_basis]

    # higher levels
    for level in range(2, m + 1):
        prev_basis = basis_images[-1]
        new_basis = []
        for j in range(n):
            target = prev_basis[j]
            g = list(module.pi_poly())
            g[0] = g[0] - target
            stage_degrees.append(len(poly_trim(g)) - 1)
            ring, y = ring_extend(ring, g, name=f"y{j + 1}_{level}", rank_cap=rank_cap)
            module = FormalOModule(ring, n, q, [convert(u, ring) for u in module.u_values])
            basis_images = [[convert(b, ring) for b in lvl] for lvl in basis_images]
            level_value_dicts = [{v: convert(val, ring) for v, val in d.items()}
                                 for d in level_value_dicts]
            new_basis = [convert(b, ring) for b in new_basis]
            new_basis.append(y)
            prev_basis = basis_images[-1]
        basis_images.append(new_basis)
        # assemble the full value table for this level
        chl = ChainRing(fld, level)
        col = [basis_images[k] for k in range(level)]  # col[k][j] = phi_{k+1} basis value
        vals = {}
        from itertools import product as iproduct
        for vec in iproduct(range(chl.size), repeat=n):
            acc = ring.zero()
            for j, c in enumerate(vec):
                digs = chl.digits(c)
                for i, d in enumerate(digs):
                    if d:
                        # [d * pi^i] applied to the level-`level` basis point e_j
                        acc = acc + module.scalar(d) * col[level - i - 1][j]
            vals[vec] = acc
        level_value_dicts.append(vals)

    expected = gl_order(n, q, m)
    got = 1
    for d in stage_degrees:
        got *= d
    assert got == expected, f"tower rank {got} != unit-group order {expected}"
    assert ring.rank == base_ring.rank * expected

    return Tower(n=n, q=q, m=m, base_ring=base_ring, ring=ring, module=module,
                 stage_degrees=stage_degrees, level_values=level_value_dicts,
                 basis_images=basis_images, u_spec_label=_u_spec_label(n, u_spec))


def subgroup_product(module: FormalOModule, point_values):
    """prod (T - val) over a finite set of point values, with linearity check.

    Returns (psi, s) where s[i] is the coefficient of T^(q^i).  Raises
    NonLinearIsogeny if any coefficient sits at a non-q-power exponent or the
    set size is not a q-power.
    """
    ring, q = module.ring, module.q
    vals = list(point_values)
    size = len(vals)
    j = 0
    t = 1
    while t < size:
        t *= q
        j += 1
    if t != size:
        raise NonLinearIsogeny(f"subgroup size {size} is not a power of q={q}")
    psi = [ring.one()]
    for v in vals:
        psi = poly_mul(psi, [ring.zero() - v, ring.one()])
    qpows = {q ** i: i for i in range(j + 1)}
    s = [ring.zero()] * (j + 1)
    for e, c in enumerate(psi):
        if c.is_zero():
            continue
        if e not in qpows:
            raise NonLinearIsogeny(f"coefficient at exponent {e} is nonzero")
        s[qpows[e]] = c
    if s[j] != ring.one():
        raise NonLinearIsogeny("product is not monic in the expected degree")
    return psi, s


@dataclass
class QuotientResult:
    module: FormalOModule       # the target of the isogeny, in normal form
    psi: list                   # the isogeny polynomial
    values: dict                # induced structure on coset representatives
    cosets: dict                # vector -> chosen representative


def quotient_by_subgroup(phi: LevelStructure, subgroup) -> QuotientResult:
    """Quotient by a finite subgroup given as a list of domain vectors.

    Builds psi = prod_{a in A} (T - phi(a)), checks it is F_q-linear, and
    solves [pi]_Y o psi = psi o [pi]_X for the unique normal-form law Y.
    The triangular solve walks the unknown coefficients top down; every
    leftover equation is checked and any failure raises NoNormalForm.
    """
    module, ring, q, n = phi.module, phi.module.ring, phi.module.q, phi.module.n
    ch = phi.chain
    A = sorted(set(tuple(a) for a in subgroup))
    zero_vec = tuple([0] * n)
    if zero_vec not in A:
        raise PreconditionError("subgroup must contain 0")
    Aset = set(A)
    for a in A:
        for b in A:
            if ch.vadd(a, b) not in Aset:
                raise PreconditionError(f"not closed under addition at {a}+{b}")
        for c in range(ch.size):
            if ch.vscale(c, a) not in Aset:
                raise PreconditionError(f"not closed under o-scaling at {c}*{a}")

    psi, s = subgroup_product(module, [phi.values[a] for a in A])
    j = len(s) - 1

    # W = psi o [pi]_X, an additive polynomial supported on q-power exponents
    pp = module.pi_poly()
    W = {}
    for i in range(j + 1):
        if s[i].is_zero():
            continue
        qe = q ** i
        for e, c in enumerate(pp):
            if c.is_zero():
                continue
            key = e * qe
            W[key] = W.get(key, ring.zero()) + s[i] * (c ** qe)
    w = [W.get(q ** k, ring.zero()) for k in range(n + j + 1)]

    cprime = [ring.zero()] * (n + 1)
    for k in range(n + j, -1, -1):
        acc = ring.zero()
        for l in range(j + 1):
            i = k - l
            if 0 <= i <= n and l != j:
                if not cprime[i].is_zero() and not s[l].is_zero():
                    acc = acc + cprime[i] * (s[l] ** (q ** i))
        if k >= j:
            cprime[k - j] = w[k] - acc
        else:
            if acc != w[k]:
                raise NoNormalForm(f"inconsistent equation at exponent q^{k}")
    if cprime[0] != ring.pi():
        raise NoNormalForm("linear coefficient of the induced law is not pi")
    if cprime[n] != ring.one():
        raise NoNormalForm("induced law is not monic of the right degree")
    target = FormalOModule(ring, n, q, cprime[1:n])

    cosets = {}
    values = {}
    for v in sorted(phi.values.keys()):
        if v in cosets:
            continue
        orbit = sorted(ch.vadd(v, a) for a in A)
        rep = orbit[0]
        img = poly_eval(psi, phi.values[rep])
        for w_vec in orbit:
            cosets[w_vec] = rep
        values[rep] = img
    return QuotientResult(module=target, psi=psi, values=values, cosets=cosets)
