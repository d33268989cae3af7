"""Shared generators for the randomized counting suite."""

import random

from leveltower.certify import regular_elliptic_certify
from leveltower.errors import Inconclusive
from leveltower.fq import FqField
from leveltower.laurent import Laurent
from leveltower.matrices import charpoly, companion, det, mat_shift


def random_unit_matrix(field, n, rng, prec=3):
    """A random element of GL_n(o) with polynomial entries of bounded degree."""
    while True:
        m = [[sum((Laurent.pi(field, k).scale(rng.randrange(field.q))
                   for k in range(prec)), Laurent.zero(field))
              for _ in range(n)] for _ in range(n)]
        if det(m).valuation() == 0:
            return m


def _b_pool(field):
    """Certified companion-style elements with a spread of norm valuations."""
    q = field.q
    if q == 2:
        unit_polys = [(1, 1, 1)]
    else:
        unit_polys = [(1, 0, 1), (2, 2, 1), (2, 1, 1)]
    pool = []
    for codes in unit_polys:
        pol = [Laurent.const(field, c) for c in codes]
        pool.append(companion(field, pol))
        bumped = [pol[0] + Laurent.pi(field, 1), pol[1], pol[2]]
        pool.append(companion(field, bumped))
    # pi-scaled units (norm valuation 2) and an Eisenstein element (valuation 1)
    pool.extend(mat_shift(b, 1) for b in list(pool))
    pool.append(companion(field, [Laurent.pi(field, 1), Laurent.zero(field),
                                  Laurent.const(field, 1)]))
    return pool


def counting_suite(total=24, seed=1234):
    """Randomized certified instances (field, b, g, m, cert) for n = 2."""
    rng = random.Random(seed)
    fields = {2: FqField(2, 1), 3: FqField(3, 1)}
    out = []
    while len(out) < total:
        field = fields[rng.choice((2, 3))]
        m = rng.choice((1, 2))
        b = rng.choice(_b_pool(field))
        try:
            cert = regular_elliptic_certify(charpoly(b))
        except Inconclusive:
            continue
        g = random_unit_matrix(field, 2, rng)
        if rng.random() < 0.3:
            g = mat_shift(g, 1)
        out.append({"field": field, "b": b, "g": g, "m": m, "cert": cert})
    return out
