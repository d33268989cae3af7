"""Sound-but-incomplete certification of regular elliptic elements, and the
normalized filtration subgroups K(r) attached to a certified element.

The certifier looks at the Newton polygon of the characteristic polynomial
and, on a single integral slope, at the residue factorization.  It answers
"irreducible, totally ramified", "irreducible, unramified", or "reducible"
only when the answer is provable from those invariants; everything else
raises Inconclusive.  No certified answer is ever wrong; some true answers
are missed, and the callers treat that as a refusal, not a result.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, inf

from .errors import CertificationError, Inconclusive, PreconditionError, PrecisionError
from .fq import FqField
from .fqpoly import factor
from .laurent import Laurent
from .matrices import (
    WORK_PREC,
    det,
    hnf,
    lattice_intersect,
    mat_identity,
    mat_inv_gauss,
    mat_mul,
    mat_shift,
)


@dataclass
class EllipticCertificate:
    """A proof object: the extension F[g] is a degree-n field, with this shape."""

    degree: int
    kind: str              # "unramified" or "ramified"
    e: int                 # ramification index of F[g]/F
    f: int                 # residual degree
    eisenstein: bool
    det_val: int           # valuation of the constant coefficient
    slope: Fraction        # common valuation of the roots
    residual: tuple | None  # residue minimal polynomial codes, unramified case
    separable: bool
    disc_val: int | None
    coeffs: tuple          # the certified characteristic polynomial

    def summary(self) -> dict:
        return {
            "degree": self.degree,
            "kind": self.kind,
            "e": self.e,
            "f": self.f,
            "eisenstein": self.eisenstein,
            "det_val": self.det_val,
            "slope": [self.slope.numerator, self.slope.denominator],
            "separable": self.separable,
            "disc_val": self.disc_val,
        }


def newton_segments(coeffs):
    """Lower-hull segments of a monic polynomial over F_Q((pi)).

    Returns a list of (root_valuation: Fraction, multiplicity: int) pairs in
    increasing valuation order.  Zero coefficients contribute no point;
    an inexact coefficient that vanishes at its precision raises.
    """
    n = len(coeffs) - 1
    pts = []
    for i, c in enumerate(coeffs):
        if c.is_zero():
            if not c.exact:
                raise PrecisionError(f"coefficient {i} vanishes at precision, polygon unknown")
            continue
        pts.append((i, c.valuation()))
    if not pts or pts[0][0] != 0:
        raise PreconditionError("constant coefficient is zero, the polygon starts late")
    if pts[-1][0] != n:
        raise PreconditionError("polynomial is not monic of the declared degree")
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((Fraction(y1 - y2, x2 - x1), x2 - x1))
    return segs


def _sylvester_resultant(coeffs):
    """Res(P, P') via the Sylvester determinant with formal degrees (n, n-1)."""
    field = coeffs[0].field
    n = len(coeffs) - 1
    dcoeffs = []
    for i in range(1, n + 1):
        c = coeffs[i]
        acc = Laurent.zero(field)
        for _ in range(i % field.p):
            acc = acc + c
        dcoeffs.append(acc)
    m = n - 1
    size = n + m
    zero = Laurent.zero(field)
    rows = []
    for k in range(m):
        row = [zero] * size
        for i, c in enumerate(reversed(coeffs)):
            row[k + i] = c
        rows.append(tuple(row))
    for k in range(n):
        row = [zero] * size
        for i, c in enumerate(reversed(dcoeffs)):
            row[k + i] = c
        rows.append(tuple(row))
    return det(tuple(rows))


def regular_elliptic_certify(coeffs) -> EllipticCertificate:
    """Certify that a monic characteristic polynomial generates a field.

    coeffs: Laurent coefficients, lowest first, length n+1, monic.  Raises
    CertificationError when reducibility is proved, Inconclusive when neither
    direction is provable from the polygon and the residue factorization.
    """
    field = coeffs[0].field
    n = len(coeffs) - 1
    if n < 1:
        raise PreconditionError("degree must be >= 1")
    if not (coeffs[-1] == Laurent.one(field)):
        raise PreconditionError("characteristic polynomial must be monic")
    c0 = coeffs[0]
    if c0.is_zero():
        if not c0.exact:
            raise PrecisionError("constant coefficient vanishes at precision")
        if n == 1:
            raise CertificationError("determinant is zero, the element is singular")
        raise CertificationError("reducible: zero constant coefficient splits off T")

    sep, disc_val = _separability(coeffs, n)

    if n == 1:
        return EllipticCertificate(
            degree=1, kind="unramified", e=1, f=1, eisenstein=False,
            det_val=c0.valuation(), slope=Fraction(c0.valuation(), 1),
            residual=None, separable=True, disc_val=disc_val,
            coeffs=tuple(coeffs))

    segs = newton_segments(coeffs)
    if len(segs) > 1:
        parts = ", ".join(f"{s} x{l}" for s, l in segs)
        raise CertificationError(f"reducible: Newton polygon has several slopes ({parts})")
    slope, _ = segs[0]
    d = c0.valuation()
    assert slope == Fraction(d, n)
    g = gcd(abs(d), n)
    if g == 1:
        return EllipticCertificate(
            degree=n, kind="ramified", e=n, f=1, eisenstein=(d == 1),
            det_val=d, slope=slope, residual=None, separable=sep,
            disc_val=disc_val, coeffs=tuple(coeffs))
    if d % n == 0:
        s = d // n
        resid = []
        for i, c in enumerate(coeffs):
            shifted = c.shift((n - i) * -s) if s else c
            resid.append(shifted.coeff(0))
        _, parts = factor(field, resid)
        if len(parts) > 1:
            names = " * ".join(f"(deg {len(p) - 1})^{m}" for p, m in parts)
            raise CertificationError(f"reducible: residue polynomial splits as {names}")
        phi, mult = parts[0]
        if mult == 1:
            return EllipticCertificate(
                degree=n, kind="unramified", e=1, f=n, eisenstein=False,
                det_val=d, slope=slope, residual=tuple(phi), separable=sep,
                disc_val=disc_val, coeffs=tuple(coeffs))
        raise Inconclusive(
            f"residue polynomial is an irreducible power (multiplicity {mult}); "
            "the polygon and residue invariants cannot decide this case")
    raise Inconclusive(
        f"single slope {slope} with gcd({abs(d)}, {n}) = {g}; "
        "the polygon alone cannot decide this case")


def _separability(coeffs, n: int):
    if n == 1:
        return True, None
    disc = _sylvester_resultant(coeffs)
    if disc.is_zero():
        if not disc.exact:
            raise PrecisionError("discriminant vanishes at precision, separability unknown")
        return False, None
    return True, disc.valuation()


@dataclass
class KSubgroup:
    """K(r) = 1 + J(r) for the chain of fractional ideal lattices of F[g].

    `basis` is the canonical n^2 x n^2 triangular basis of J(r), rows/columns
    indexed by the matrix positions (i, j) flattened row-major.
    """

    n: int
    r: int
    e: int
    basis: tuple

    def basis_matrices(self):
        n = len(self.basis)
        side = self.n
        out = []
        for j in range(n):
            col = [self.basis[i][j] for i in range(n)]
            out.append(tuple(tuple(col[a * side + b] for b in range(side))
                             for a in range(side)))
        return out

    def diag_exponents(self):
        return [self.basis[i][i].valuation() for i in range(len(self.basis))]

    def contains_displacement(self, X) -> bool:
        """Whether the n x n matrix X lies in J(r), i.e. 1 + X in K(r)."""
        side = self.n
        x = [X[a][b] for a in range(side) for b in range(side)]
        H = self.basis
        n = len(H)
        coords = [None] * n
        for i in range(n - 1, -1, -1):
            acc = x[i]
            for j in range(i + 1, n):
                acc = acc - H[i][j] * coords[j]
            a_i = H[i][i].valuation()
            if acc.is_zero():
                coords[i] = Laurent.zero(acc.field)
                continue
            if acc.valuation() < a_i:
                return False
            coords[i] = acc.shift(-a_i)
        return True

    def log_index_from(self, other: "KSubgroup") -> int:
        """log_q [other : self] for nested subgroups of the same element."""
        return sum(self.diag_exponents()) - sum(other.diag_exponents())


def uniformizer_matrix(g, cert: EllipticCertificate):
    """A matrix generating the maximal ideal of F[g], valuation 1 in E."""
    field = g[0][0].field
    n = len(g)
    if cert.e == 1:
        return mat_shift(mat_identity(field, n), 1)
    d = cert.det_val % n
    if gcd(d, n) != 1:
        raise PreconditionError("no tame uniformizer recipe for this certificate")
    a = pow(d, -1, n)
    b = (1 - a * cert.det_val) // n
    P = mat_identity(field, n)
    for _ in range(a):
        P = mat_mul(P, g)
    return mat_shift(P, b)


def normalized_subgroup_Kr(g, cert: EllipticCertificate, r: int,
                           work_prec: int = WORK_PREC) -> KSubgroup:
    """The r-th normalized filtration subgroup attached to a certified g.

    J(r) is the intersection over one period of uniformizer shifts of the
    homomorphism lattices Hom(L, pi_E^r L) along the chain of fractional
    ideals L of the order o[g]; K(r) = 1 + J(r).
    """
    if r < 0:
        raise PreconditionError("r must be >= 0")
    field = g[0][0].field
    n = len(g)
    e = cert.e
    piE = uniformizer_matrix(g, cert)

    # lattice L_{r'}: columns piE^{r'} g^i e1
    gpow = [mat_identity(field, n)]
    for _ in range(n - 1):
        gpow.append(mat_mul(gpow[-1], g))

    def chain_lattice(k: int):
        shift, kk = divmod(k, e)  # piE^e and pi span the same ideal
        P = mat_identity(field, n)
        for _ in range(kk):
            P = mat_mul(P, piE)
        cols = []
        for i in range(n):
            PG = mat_mul(P, gpow[i])
            cols.append(tuple(PG[a][0] for a in range(n)))
        H = hnf(cols, work_prec)
        return mat_shift(H, shift)

    J = None
    for rp in range(e):
        B1 = chain_lattice(rp)
        B2 = chain_lattice(rp + r)
        B1inv = mat_inv_gauss(B1, work_prec)
        flat_cols = []
        for i in range(n):
            for j in range(n):
                Eij = [[Laurent.zero(field)] * n for _ in range(n)]
                Eij[i][j] = Laurent.one(field)
                Mk = mat_mul(mat_mul(B2, tuple(tuple(row) for row in Eij)), B1inv)
                flat_cols.append(tuple(Mk[a][b] for a in range(n) for b in range(n)))
        Hk = hnf(flat_cols, work_prec)
        J = Hk if J is None else lattice_intersect(J, Hk, work_prec)
    return KSubgroup(n=n, r=r, e=e, basis=J)
