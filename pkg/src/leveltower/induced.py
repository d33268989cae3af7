"""Characters of representations induced from pi^Z K, and depth-zero matching.

Two shapes of inducing data are supported: the trivial character on
pi^Z K_m, and a character of GL_n(o/pi) inflated to K_0 and extended to
pi^Z K_0 by a central root of unity.  For a certified regular elliptic
argument the character of the induced representation is a finite sum over
the cosets h with h^{-1} g h in pi^Z K, which the lattice machinery of
`counting` enumerates; both its structured and brute routes are exposed
here so they can be played against each other.

`jl_match` compares these induced characters against the character table of
the quaternion unit quotient: for each cuspidal character of GL_2(F_q) it
looks for the unique quotient character whose values are the exact
negatives on every regular elliptic class, classes on the two sides being
aligned by reduced characteristic polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .certify import EllipticCertificate, regular_elliptic_certify
from .chartab import CharacterTable, character_table, cuspidal_characters
from .counting import (
    BRUTE_LATTICE_CAP,
    _lattice_bases,
    _lattice_eigen_matrix,
    count_brute,
    count_structured,
    stable_lattice_reduction,
)
from .cyclotomic import Cyclotomic
from .errors import CapExceeded, Inconclusive, OracleMismatch, PreconditionError
from .groups import group_gl, group_quaternion_quotient
from .matrices import (
    charpoly,
    companion,
    mat_identity,
    mat_reduce_mod,
    smith_exponents,
)

JL_Q_CAP = 4

_ONE = Cyclotomic.from_rational(1)


def _root_power(c: Cyclotomic, a: int) -> Cyclotomic:
    # inverse via conjugation, valid because c is constrained to |c| = 1
    out = _ONE
    base = c if a >= 0 else c.conjugate()
    for _ in range(abs(a)):
        out = out * base
    return out


@dataclass(frozen=True)
class InducedCharSpec:
    """Inducing data on pi^Z K.

    kind "trivial": K = K_m (m >= 1), the character is 1 everywhere.
    kind "inflated": K = K_0, the character is row `row` of `table` (a table
    of GL_n(o/pi)) inflated through K_0 -> GL_n(o/pi) and sent to `central`
    on the scalar pi.  pi^Z meets K_0 trivially, so any root of unity is a
    consistent central value.
    """

    kind: str
    m: int = 1
    table: CharacterTable | None = None
    row: int | None = None
    central: Cyclotomic = _ONE

    def __post_init__(self):
        if self.kind not in ("trivial", "inflated"):
            raise PreconditionError(f"unknown inducing kind {self.kind!r}")
        if self.central * self.central.conjugate() != _ONE:
            raise PreconditionError("the central value must be a root of unity")
        if self.kind == "trivial":
            if self.m < 1:
                raise PreconditionError("the trivial kind needs a level m >= 1")
            return
        if self.m != 0:
            raise PreconditionError("the inflated kind lives on pi^Z K_0, set m = 0")
        if self.table is None or self.row is None:
            raise PreconditionError("the inflated kind needs a table and a row")
        meta = self.table.group.meta
        if meta.get("kind") != "gl" or meta.get("m") != 1:
            raise PreconditionError(
                "the inflated kind needs a character table of GL_n(o/pi)")
        if not 0 <= self.row < len(self.table.degrees):
            raise PreconditionError("character row out of range")


def hc_character(spec: InducedCharSpec, g, route: str = "structured",
                 cert: EllipticCertificate | None = None) -> Cyclotomic:
    """Character of c-Ind(lambda) at a certified regular elliptic g.

    Evaluates sum_{h in G/pi^Z K, h^-1 g h in pi^Z K} lambda(h^-1 g h).
    Certification keeps the support finite and, on the structured route,
    pins it to the single stable lattice class.  The brute route rescans a
    lattice box and refuses (Inconclusive) if the scan does not stabilize.
    """
    if route not in ("structured", "brute"):
        raise PreconditionError(f"unknown route {route!r}")
    field = g[0][0].field
    n = len(g)
    if cert is None:
        cert = regular_elliptic_certify(charpoly(g))

    if spec.kind == "trivial":
        ident = mat_identity(field, n)
        if route == "structured":
            res = count_structured(g, ident, spec.m, cert)
        else:
            res = count_brute(g, ident, spec.m)
            if not res.stable:
                raise Inconclusive("the lattice box scan did not stabilize")
        if res.count == 0:
            return Cyclotomic.zero()
        return _root_power(spec.central, int(res.z_prime)) * Fraction(res.count)

    grp = spec.table.group
    if grp.meta.get("q") != field.q:
        raise PreconditionError("the table's residue field does not match g")
    if len(grp.elements[0]) != n:
        raise PreconditionError("the table's matrix size does not match g")
    zp = Fraction(cert.det_val, n)
    if zp.denominator != 1:
        # pi^Z-normalization impossible, the support is empty
        return Cyclotomic.zero()
    row = spec.table.values[spec.row]

    if route == "structured":
        _, Vbar, zp_int = stable_lattice_reduction(g, 1, cert)
        return _root_power(spec.central, zp_int) * row[grp.class_of[grp.index[Vbar]]]

    zp_int = int(zp)
    exps = smith_exponents(g)
    bound = (exps[-1] - exps[0]) + 3
    total = Cyclotomic.zero()
    touched = False
    for diag, H in _lattice_bases(field, n, bound, BRUTE_LATTICE_CAP):
        V = _lattice_eigen_matrix(H, g, zp_int)
        if V is None:
            continue
        Vbar = mat_reduce_mod(V, 1)
        idx = grp.index.get(Vbar)
        if idx is None:
            raise OracleMismatch("an integral eigen matrix reduced to a non-unit")
        if max(diag) >= bound:
            touched = True
        total = total + row[grp.class_of[idx]]
    if touched:
        raise Inconclusive("the lattice box scan did not stabilize")
    return _root_power(spec.central, zp_int) * total


@dataclass(frozen=True)
class EllipticClassRecord:
    """A regular elliptic class of the quaternion unit quotient, with its
    matched companion matrix over F_q((pi))."""

    class_index: int
    label: tuple
    kind: str                  # "unit" or "uniformizer"
    poly: tuple
    g_matrix: tuple
    certificate: EllipticCertificate


@dataclass(frozen=True)
class JLMatchResult:
    q: int
    convention: str
    pairs: tuple               # (cuspidal row in table_g, row in table_b)
    elliptic: tuple            # EllipticClassRecord per compared class
    pi_values: dict            # cuspidal row -> tuple of values per class
    rho_values: dict           # quotient row -> tuple of values per class
    table_g: CharacterTable
    table_b: CharacterTable

    def summary(self) -> dict:
        return {
            "q": self.q,
            "convention": self.convention,
            "pairs": [list(p) for p in self.pairs],
            "elliptic_classes": [
                {"label": list(r.label), "kind": r.kind,
                 "class_index": r.class_index}
                for r in self.elliptic
            ],
            "checks": [
                {"pair": [r, s],
                 "values": [[repr(self.rho_values[s][k]), repr(self.pi_values[r][k])]
                            for k in range(len(self.elliptic))]}
                for r, s in self.pairs
            ],
        }


def elliptic_quotient_classes(group) -> tuple:
    """The regular elliptic classes of a level-1 quaternion unit quotient.

    Each class representative (i, x), an element x*w^i of the algebra, gets
    its reduced characteristic polynomial computed honestly in the algebra
    and the companion matrix of that polynomial over F_q((pi)) attached.
    Classes whose polynomial fails certification (the residue-split units)
    are left out.
    """
    meta = group.meta
    if meta.get("kind") != "quaternion" or meta.get("k") != 1:
        raise PreconditionError("expected a level-1 quaternion unit quotient")
    alg = meta["algebra"]
    out = []
    for ci, rep_idx in enumerate(group.class_reps):
        i, x = group.elements[rep_idx]
        b = alg.elem([x, 0]) if i == 0 else alg.elem([0, x])
        pol = alg.reduced_charpoly(b)
        try:
            cert = regular_elliptic_certify(pol)
        except Inconclusive:
            continue
        out.append(EllipticClassRecord(
            class_index=ci,
            label=(i, x),
            kind="unit" if i == 0 else "uniformizer",
            poly=tuple(pol),
            g_matrix=companion(alg.small, list(pol)),
            certificate=cert,
        ))
    q = meta["q"]
    want = q * (q - 1) // 2 + (q - 1)
    if len(out) != want:
        raise OracleMismatch(
            f"found {len(out)} elliptic classes in the quotient, expected {want}")
    return tuple(out)


CONVENTION = ("pi lands in the identity coset of both quotient groups, so both "
              "inducing characters send pi to 1 and the comparison has no "
              "central twist")


def jl_match(q: int, cap_q: int = JL_Q_CAP) -> JLMatchResult:
    """Match each cuspidal character of GL_2(F_q) with its opposite number.

    For every cuspidal row chi of GL_2(F_q), find the rows of the quaternion
    quotient table whose value at each regular elliptic class b equals minus
    the induced character of chi at the companion matrix with b's reduced
    characteristic polynomial.  Exactly one row may survive per cuspidal and
    the assignment must be injective; anything else raises OracleMismatch
    with the offending class.
    """
    if q > cap_q:
        raise CapExceeded(f"matching is capped at q <= {cap_q}")
    grp_g = group_gl(2, q, 1)
    table_g = character_table(grp_g)
    cuspidal_rows = cuspidal_characters(table_g)
    grp_b = group_quaternion_quotient(q, 1)
    table_b = character_table(grp_b)
    elliptic = elliptic_quotient_classes(grp_b)

    pi_values = {}
    for r in cuspidal_rows:
        spec = InducedCharSpec(kind="inflated", m=0, table=table_g, row=r)
        pi_values[r] = tuple(
            hc_character(spec, rec.g_matrix, cert=rec.certificate)
            for rec in elliptic)
    rho_values = {
        s: tuple(table_b.values[s][rec.class_index] for rec in elliptic)
        for s in range(len(table_b.degrees))
    }

    pairs = []
    matched = {}
    for r in cuspidal_rows:
        survivors = []
        best = (-1, None, None)    # (#classes passed, row, first failing class)
        for s, vals in rho_values.items():
            passed = 0
            failing = None
            for k, rec in enumerate(elliptic):
                if vals[k] == -pi_values[r][k]:
                    passed += 1
                elif failing is None:
                    failing = rec
            if failing is None:
                survivors.append(s)
            elif passed > best[0]:
                best = (passed, s, failing)
        if len(survivors) != 1:
            detail = ""
            if not survivors and best[1] is not None:
                detail = (f"; closest row {best[1]} fails first at class "
                          f"{best[2].label} ({best[2].kind})")
            raise OracleMismatch(
                f"cuspidal row {r}: {len(survivors)} quotient rows satisfy the "
                f"sign identity on all elliptic classes, need exactly 1{detail}")
        s = survivors[0]
        if s in matched:
            raise OracleMismatch(
                f"quotient row {s} matches both cuspidal rows {matched[s]} and {r}")
        matched[s] = r
        pairs.append((r, s))

    return JLMatchResult(q=q, convention=CONVENTION, pairs=tuple(pairs),
                         elliptic=elliptic, pi_values=pi_values,
                         rho_values=rho_values, table_g=table_g, table_b=table_b)
