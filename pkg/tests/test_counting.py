"""Fixed-coset counting: structured route against the box-scan oracle."""

from fractions import Fraction

import pytest

from conftest import counting_suite, random_unit_matrix

from leveltower.certify import regular_elliptic_certify
from leveltower.counting import (
    count_brute,
    count_structured,
    stable_lattice_reduction,
    unit_group_order_unramified,
)
from leveltower.errors import PreconditionError
from leveltower.fq import FqField
from leveltower.laurent import Laurent
from leveltower.matrices import (
    adjugate,
    charpoly,
    companion,
    det,
    mat_identity,
    mat_shift,
)


def _codes(field, *cs):
    return [Laurent.const(field, c) for c in cs]


def _inv_unit(mat):
    field = mat[0][0].field
    d = det(mat)
    di = field.inv(d.coeff(0))
    adj = adjugate(mat)
    return [[entry.scale(di) for entry in row] for row in adj]


@pytest.mark.parametrize("q,codes,m,expected", [
    (2, (1, 1, 1), 1, 3),
    (2, (1, 1, 1), 2, 12),
    (3, (1, 0, 1), 1, 8),
    (3, (1, 0, 1), 2, 72),
])
def test_frozen_counts_self_pairing(q, codes, m, expected):
    field = FqField(q, 1)
    b = companion(field, _codes(field, *codes))
    g = _inv_unit(b)
    s = count_structured(b, g, m)
    bf = count_brute(b, g, m)
    assert s.count == expected
    assert bf.count == expected
    assert bf.stable
    assert expected == unit_group_order_unramified(2, q, m)


def test_frozen_count_rank_three():
    field = FqField(2, 1)
    b = companion(field, _codes(field, 1, 1, 0, 1))
    g = _inv_unit(b)
    s = count_structured(b, g, 1)
    bf = count_brute(b, g, 1)
    assert s.count == bf.count == 7 == unit_group_order_unramified(3, 2, 1)
    assert bf.stable


def test_ramified_element_count_vanishes():
    field = FqField(2, 1)
    b = companion(field, [Laurent.pi(field, 1), Laurent.zero(field),
                          Laurent.const(field, 1)])
    g = mat_identity(field, 2)
    s = count_structured(b, g, 1)
    bf = count_brute(b, g, 1)
    assert s.count == bf.count == 0
    assert s.z_prime == Fraction(1, 2)
    assert bf.stable


def test_stable_lattice_reduction_unit_case():
    field = FqField(2, 1)
    b = companion(field, _codes(field, 1, 1, 1))
    H, Vbar, zp = stable_lattice_reduction(b, 1)
    assert zp == 0
    ch_char = [c for c in charpoly(b)]
    # the reduced frame matrix has the same residual charpoly as b
    from leveltower.chain import ChainRing
    ch = ChainRing(field, 1)
    assert list(ch.charpoly(Vbar)) == [c.coeff(0) for c in ch_char]


def test_stable_lattice_reduction_rejects_half_integral():
    field = FqField(2, 1)
    b = companion(field, [Laurent.pi(field, 1), Laurent.zero(field),
                          Laurent.const(field, 1)])
    with pytest.raises(PreconditionError):
        stable_lattice_reduction(b, 1)


def test_noncommensurable_g_rejected():
    field = FqField(2, 1)
    b = companion(field, _codes(field, 1, 1, 1))
    g = [[Laurent.pi(field, 1), Laurent.zero(field)],
         [Laurent.zero(field), Laurent.const(field, 1)]]
    with pytest.raises(PreconditionError):
        count_structured(b, g, 1)
    with pytest.raises(PreconditionError):
        count_brute(b, g, 1)


def test_randomized_routes_agree():
    suite = counting_suite()
    assert len(suite) >= 20
    nonzero_seen = 0
    for inst in suite:
        b, g, m, cert = inst["b"], inst["g"], inst["m"], inst["cert"]
        s = count_structured(b, g, m, cert)
        bf = count_brute(b, g, m)
        assert bf.stable, (inst, bf.box_bound)
        assert s.count == bf.count, inst
        v_sum = det(g).valuation() + cert.det_val
        if v_sum % 2 != 0:
            assert s.count == 0
        if s.count:
            nonzero_seen += 1
            assert v_sum % 2 == 0
    assert nonzero_seen >= 1


def test_self_pairing_counts_scale_with_twist():
    # conjugation-invariant: twisting g by pi^2 keeps z integral and the count
    field = FqField(2, 1)
    b = companion(field, _codes(field, 1, 1, 1))
    g = _inv_unit(b)
    base = count_structured(b, g, 1).count
    twisted = count_structured(b, mat_shift(g, 2), 1).count
    assert base == twisted == 3
