"""Randomized ring-axiom and normal-form suites over the coefficient rings."""

import random

import pytest

from leveltower.fq import FqField
from leveltower.rings import CoeffRing, ring_extend

CASES = 1000


def _tower_stage_ring():
    base = CoeffRing(FqField(2, 1), 2, (2,))
    # adjoin a root of X^2 + pi, a small Eisenstein stage
    ext, _root = ring_extend(base, [base.pi(), base.zero(), base.one()], "s")
    return ext


def _rings():
    return [
        CoeffRing(FqField(2, 1), 3, (2,)),
        CoeffRing(FqField(3, 1), 2, (3,)),
        _tower_stage_ring(),
    ]


@pytest.mark.parametrize("ridx", [0, 1, 2])
def test_ring_axioms_randomized(ridx):
    ring = _rings()[ridx]
    rng = random.Random(20_000 + ridx)
    zero, one = ring.zero(), ring.one()
    for _ in range(CASES):
        a = ring.random_element(rng)
        b = ring.random_element(rng)
        c = ring.random_element(rng)
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a + zero == a
        assert a * one == a
        assert a - a == zero


@pytest.mark.parametrize("ridx", [0, 1, 2])
def test_normal_form_idempotent(ridx):
    ring = _rings()[ridx]
    rng = random.Random(30_000 + ridx)
    for _ in range(CASES):
        x = ring.random_element(rng) * ring.random_element(rng)
        nf1 = x.nf()
        nf2 = nf1.nf()
        assert nf1 == nf2
        assert nf1.coords() == nf2.coords()
        assert x == nf1
