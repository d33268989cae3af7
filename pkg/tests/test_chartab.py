"""Exact character tables of the finite matrix and quaternionic quotients."""

from fractions import Fraction

import pytest

from leveltower.chartab import character_table, cuspidal_characters
from leveltower.cyclotomic import Cyclotomic
from leveltower.errors import CapExceeded
from leveltower.groups import group_gl, group_quaternion_quotient


def test_gl2_f2_table():
    g = group_gl(2, 2, 1)
    assert g.order == 6
    tab = character_table(g)
    assert sorted(tab.degrees) == [1, 1, 2]
    assert tab.verify()


def test_gl2_f3_table():
    g = group_gl(2, 3, 1)
    assert g.order == 48
    tab = character_table(g)
    assert sorted(tab.degrees) == [1, 1, 2, 2, 2, 3, 3, 4]
    assert tab.verify()


def test_gl2_f4_table():
    g = group_gl(2, 4, 1)
    assert g.order == 180
    tab = character_table(g)
    assert tab.verify()
    assert sum(d * d for d in tab.degrees) == 180


@pytest.mark.parametrize("q,count", [(2, 1), (3, 3), (4, 6)])
def test_cuspidal_counts(q, count):
    tab = character_table(group_gl(2, q, 1))
    cusp = cuspidal_characters(tab)
    assert len(cusp) == count == q * (q - 1) // 2
    # cuspidal degree is q - 1 in rank two
    for i in cusp:
        assert tab.degrees[i] == q - 1


def test_quaternion_quotient_q2():
    # order 2(q^2 - 1) = 6; the unit classes fold into a symmetric group shape
    g = group_quaternion_quotient(2, 1)
    assert g.order == 6
    assert g.exponent == 6
    tab = character_table(g)
    assert sorted(tab.degrees) == [1, 1, 2]
    assert tab.verify()


def test_quaternion_quotient_q3_is_semidihedral():
    g = group_quaternion_quotient(3, 1)
    assert g.order == 16
    assert g.exponent == 8
    orders = [g.element_order(i) for i in range(g.order)]
    # 5 involutions, 6 of order 4, 4 of order 8: the semidihedral profile
    assert sorted(orders.count(k) for k in (2, 4, 8)) == sorted((5, 6, 4))
    tab = character_table(g)
    assert sorted(tab.degrees) == [1, 1, 1, 1, 2, 2, 2]
    assert tab.verify()


def test_row_inner_products_are_exact():
    tab = character_table(group_gl(2, 3, 1))
    one = Cyclotomic.from_rational(1)
    zero = Cyclotomic.zero()
    for i in range(tab.n_classes):
        for j in range(tab.n_classes):
            want = one if i == j else zero
            assert tab.row_inner(i, j) == want


def test_class_count_matches_rows():
    g = group_gl(2, 2, 1)
    tab = character_table(g)
    assert tab.n_classes == len(g.classes) == len(tab.values)


def test_table_cap_guard():
    with pytest.raises(CapExceeded):
        character_table(group_gl(2, 3, 1), cap=10)
