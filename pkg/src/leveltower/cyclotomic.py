"""Exact cyclotomic numbers: Q(zeta_N) with rational coordinates mod Phi_N.

Values are stored as tuples of Fractions of length phi(N) (coordinates on
1, zeta, ..., zeta^(phi(N)-1) after reduction mod the N-th cyclotomic
polynomial), so equality is decidable by tuple comparison.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import CapExceeded, PreconditionError

CONDUCTOR_CAP = 10_000


def _divisors(n: int):
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[Fraction, ...]:
    """Coefficients of Phi_n, low degree first (exact, via x^n-1 = prod Phi_d)."""
    if n > CONDUCTOR_CAP:
        raise CapExceeded(f"conductor {n} exceeds cap {CONDUCTOR_CAP}")
    num = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    for d in _divisors(n):
        if d == n:
            continue
        num = _poly_divide_exact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_divide_exact(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    out = [Fraction(0)] * (len(a) - len(b) + 1)
    inv = 1 / b[-1]
    for k in range(len(out) - 1, -1, -1):
        c = a[len(b) - 1 + k] * inv
        out[k] = c
        if c:
            for i, bi in enumerate(b):
                a[i + k] -= c * bi
    assert not any(a[: len(b) - 1]), "non-exact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def _phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


class Cyclotomic:
    """An element of Q(zeta_N).  Immutable; arithmetic returns new objects."""

    __slots__ = ("N", "coords")

    def __init__(self, N: int, coords):
        d = _phi(N)
        cs = [Fraction(c) for c in coords]
        if len(cs) > d:
            cs = _reduce_mod_phi(N, cs)
        cs += [Fraction(0)] * (d - len(cs))
        self.N = N
        self.coords = tuple(cs)

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero(N: int = 1) -> "Cyclotomic":
        return Cyclotomic(N, [])

    @staticmethod
    def from_rational(x, N: int = 1) -> "Cyclotomic":
        return Cyclotomic(N, [Fraction(x)])

    @staticmethod
    def root_of_unity(N: int, power: int = 1) -> "Cyclotomic":
        power %= N
        v = [Fraction(0)] * (power + 1)
        v[power] = Fraction(1)
        return Cyclotomic(N, v)

    # -- structure -------------------------------------------------------------

    def lift(self, M: int) -> "Cyclotomic":
        """Rewrite in Q(zeta_M); requires N | M."""
        if M == self.N:
            return self
        if M % self.N:
            raise PreconditionError(f"{self.N} does not divide {M}")
        k = M // self.N
        out = [Fraction(0)] * ((_phi(self.N) - 1) * k + 1 or 1)
        for j, c in enumerate(self.coords):
            if c:
                out[j * k] += c
        return Cyclotomic(M, out)

    @staticmethod
    def _common(a: "Cyclotomic", b: "Cyclotomic"):
        if a.N == b.N:
            return a, b
        M = a.N * b.N // gcd(a.N, b.N)
        return a.lift(M), b.lift(M)

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other, self.N)
        a, b = Cyclotomic._common(self, other)
        return Cyclotomic(a.N, [x + y for x, y in zip(a.coords, b.coords)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.N, [-c for c in self.coords])

    def __sub__(self, other):
        return self + (-_coerce(other, self.N))

    def __rsub__(self, other):
        return _coerce(other, self.N) - self

    def __mul__(self, other):
        other = _coerce(other, self.N)
        a, b = Cyclotomic._common(self, other)
        n = len(a.coords) + len(b.coords) - 1
        out = [Fraction(0)] * max(n, 1)
        for i, x in enumerate(a.coords):
            if x:
                for j, y in enumerate(b.coords):
                    if y:
                        out[i + j] += x * y
        return Cyclotomic(a.N, out)

    __rmul__ = __mul__

    def conjugate(self) -> "Cyclotomic":
        """Complex conjugation zeta -> zeta^(N-1)."""
        out = [Fraction(0)] * self.N
        for j, c in enumerate(self.coords):
            if c:
                out[(-j) % self.N] += c
        return Cyclotomic(self.N, out)

    def __truediv__(self, other):
        if isinstance(other, Cyclotomic):
            raise TypeError("division by a general cyclotomic is not supported")
        return self * Fraction(1, other)

    # -- predicates ----------------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise PreconditionError("value is not rational")
        return self.coords[0] if self.coords else Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, Cyclotomic):
            try:
                other = _coerce(other, self.N)
            except TypeError:
                return NotImplemented
        a, b = Cyclotomic._common(self, other)
        return a.coords == b.coords

    def __hash__(self):
        if self.is_rational():
            return hash(self.coords[0] if self.coords else Fraction(0))
        return hash((self.N, self.coords))

    def __repr__(self):
        if self.is_rational():
            return f"Cyc({self.as_rational()})"
        return f"Cyc(N={self.N}, {list(self.coords)})"


def _reduce_mod_phi(N: int, coords: list[Fraction]) -> list[Fraction]:
    phi = list(cyclotomic_poly(N))
    d = len(phi) - 1
    cs = list(coords)
    # first fold exponents mod N (zeta^N = 1), then divide by Phi_N
    if len(cs) > N:
        folded = [Fraction(0)] * N
        for j, c in enumerate(cs):
            folded[j % N] += c
        cs = folded
    while len(cs) > d:
        c = cs[-1]
        if c:
            off = len(cs) - 1 - d
            for i in range(d + 1):
                cs[off + i] -= c * phi[i]
        cs.pop()
    return cs


def _coerce(x, N: int) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyclotomic.from_rational(x, 1)
    raise TypeError(f"cannot coerce {type(x)} to Cyclotomic")
