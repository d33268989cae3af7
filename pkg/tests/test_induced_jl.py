"""Induced-character evaluation and the depth-zero matching."""

import random
from fractions import Fraction

import pytest

from conftest import counting_suite, random_unit_matrix

from leveltower.certify import regular_elliptic_certify
from leveltower.chartab import character_table, cuspidal_characters
from leveltower.counting import count_structured
from leveltower.cyclotomic import Cyclotomic
from leveltower.errors import CapExceeded, OracleMismatch
from leveltower.fq import FqField
from leveltower.groups import group_gl
from leveltower.induced import (
    InducedCharSpec,
    elliptic_quotient_classes,
    hc_character,
    jl_match,
)
from leveltower.laurent import Laurent
from leveltower.matrices import adjugate, charpoly, companion, det, mat_identity, mat_mul


def test_trivial_spec_equals_count_on_suite():
    for inst in counting_suite(total=20, seed=4321):
        field, b, m, cert = inst["field"], inst["b"], inst["m"], inst["cert"]
        spec = InducedCharSpec("trivial", m=m)
        val = hc_character(spec, b, cert=cert)
        cnt = count_structured(b, mat_identity(field, 2), m, cert).count
        assert val == Cyclotomic.from_rational(cnt)
        assert hc_character(spec, b, route="brute") == val


def test_trivial_spec_rank_one_closed_form():
    # a single lattice class, so the value counts the residual unit frames
    for q, m, expected in [(3, 1, 2), (2, 2, 2), (3, 2, 6)]:
        field = FqField(q, 1)
        b = [[Laurent.const(field, 1)]]
        spec = InducedCharSpec("trivial", m=m)
        assert hc_character(spec, b) == Cyclotomic.from_rational(expected)
        assert hc_character(spec, b, route="brute") == Cyclotomic.from_rational(expected)


def test_trivial_spec_rank_one_congruence_gate():
    field = FqField(2, 1)
    b = [[Laurent.const(field, 1) + Laurent.pi(field, 1)]]
    spec1 = InducedCharSpec("trivial", m=1)
    spec2 = InducedCharSpec("trivial", m=2)
    # 1 + pi is trivial mod pi but not mod pi^2
    assert hc_character(spec1, b) == Cyclotomic.from_rational(2 ** 0 * 1)
    assert hc_character(spec2, b) == Cyclotomic.zero()


def test_central_twist_multiplies_by_root_of_unity():
    field = FqField(3, 1)
    b = [[Laurent.pi(field, 1)]]
    i_unit = Cyclotomic.root_of_unity(4)
    plain = InducedCharSpec("trivial", m=1)
    twisted = InducedCharSpec("trivial", m=1, central=i_unit)
    base = hc_character(plain, b)
    assert base == Cyclotomic.from_rational(2)
    got = hc_character(twisted, b)
    assert got == i_unit * base
    assert hc_character(twisted, b, route="brute") == got


def test_trivial_spec_vanishes_on_certified_rank_two_units():
    field = FqField(2, 1)
    b = companion(field, [Laurent.const(field, c) for c in (1, 1, 1)])
    spec = InducedCharSpec("trivial", m=1)
    assert hc_character(spec, b).is_zero()


def _inflated_spec(q, row=None):
    tab = character_table(group_gl(2, q, 1))
    if row is None:
        row = cuspidal_characters(tab)[0]
    return tab, InducedCharSpec("inflated", m=0, table=tab, row=row)


def test_inflated_spec_reads_residual_class():
    field = FqField(2, 1)
    tab, spec = _inflated_spec(2)
    b = companion(field, [Laurent.const(field, c) for c in (1, 1, 1)])
    val = hc_character(spec, b)
    # the residual class has order 3 and the q=2 cuspidal row is the sign row
    assert val == Cyclotomic.from_rational(1)
    assert hc_character(spec, b, route="brute") == val


def test_inflated_spec_conjugation_invariant():
    field = FqField(3, 1)
    tab, spec = _inflated_spec(3)
    b = companion(field, [Laurent.const(field, c) for c in (1, 0, 1)])
    base = hc_character(spec, b)
    rng = random.Random(11)
    for _ in range(5):
        w = random_unit_matrix(field, 2, rng)
        d = det(w)
        di = field.inv(d.coeff(0))
        winv = [[e.scale(di) for e in row] for row in adjugate(w)]
        conj = mat_mul(mat_mul(w, b), winv)
        assert hc_character(spec, conj) == base
        assert hc_character(spec, conj, route="brute") == base


def test_inflated_spec_vanishes_at_half_integral_valuation():
    field = FqField(2, 1)
    tab, spec = _inflated_spec(2)
    b = companion(field, [Laurent.pi(field, 1), Laurent.zero(field),
                          Laurent.const(field, 1)])
    assert hc_character(spec, b).is_zero()
    assert hc_character(spec, b, route="brute").is_zero()


def test_elliptic_quotient_class_census():
    for q, unr, ram in [(2, 1, 1), (3, 3, 2)]:
        from leveltower.groups import group_quaternion_quotient
        grp = group_quaternion_quotient(q, 1)
        classes = elliptic_quotient_classes(grp)
        kinds = [rec.kind for rec in classes]
        assert kinds.count("unit") == unr == q * (q - 1) // 2
        assert kinds.count("uniformizer") == ram == q - 1


def test_jl_match_q2():
    result = jl_match(2)
    assert result.pairs == ((0, 2),)
    assert len(result.elliptic) == 2
    for crow, brow in result.pairs:
        pi_vals = result.pi_values[crow]
        rho_vals = result.rho_values[brow]
        for got_rho, got_pi in zip(rho_vals, pi_vals):
            assert got_rho == Cyclotomic.from_rational(-1) * got_pi


def test_jl_match_q3():
    result = jl_match(3)
    assert result.pairs == ((2, 5), (3, 6), (4, 4))
    assert len(result.elliptic) == 5
    for crow, brow in result.pairs:
        for got_rho, got_pi in zip(result.rho_values[brow], result.pi_values[crow]):
            assert got_rho == Cyclotomic.from_rational(-1) * got_pi
    # rows pair off bijectively
    assert len({b for _, b in result.pairs}) == len(result.pairs)


def test_jl_match_respects_cap():
    with pytest.raises(CapExceeded):
        jl_match(5)


def test_spec_validation():
    with pytest.raises(Exception):
        InducedCharSpec("trivial", m=0)
    tab = character_table(group_gl(2, 2, 1))
    with pytest.raises(Exception):
        InducedCharSpec("inflated", m=1, table=tab, row=0)
