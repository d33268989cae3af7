"""Formal module arithmetic, level towers, and the level-structure checker."""

import dataclasses

import pytest

from leveltower.errors import CapExceeded, PreconditionError, RankCapExceeded
from leveltower.formal import (
    LevelStructure,
    build_tower,
    check_level,
    gl_order,
    make_module,
)
from leveltower.groups import group_gl
from leveltower.rings import poly_trim


def test_pi_poly_shape():
    mod = make_module(2, 2)
    pp = mod.pi_poly()
    assert len(pp) == 2 ** 2 + 1
    assert pp[1] == mod.ring.pi()
    assert pp[-1] == mod.ring.one()
    assert pp[0].is_zero()


@pytest.mark.parametrize("n,q,m", [(1, 2, 3), (2, 2, 2), (2, 3, 1), (3, 2, 1)])
def test_pi_power_degree_and_derivative(n, q, m):
    mod = make_module(n, q, prec=m + 1)
    poly = poly_trim(mod.pi_power(m))
    assert len(poly) - 1 == q ** (n * m)
    pi_m = mod.ring.one()
    for _ in range(m):
        pi_m = pi_m * mod.ring.pi()
    # the formal derivative collapses to the linear coefficient here
    assert poly[1] == pi_m
    assert poly[0].is_zero()


@pytest.mark.parametrize("q,expected", [(2, 6), (3, 48)])
def test_tower_rank_equals_group_order(q, expected):
    tower = build_tower(2, q, 1)
    assert tower.rank_over_base == expected
    assert tower.rank_over_base == gl_order(2, q, 1)
    # brute-force oracle: enumerate the invertible matrices outright
    assert group_gl(2, q, 1).order == expected


def test_tower_stage_degrees_q2():
    tower = build_tower(2, 2, 1)
    assert tower.stage_degrees == [3, 2]


def test_tower_rank_cap_triggers():
    with pytest.raises((CapExceeded, RankCapExceeded)):
        build_tower(3, 3, 1)


def test_check_level_passes_on_towers():
    for n, q, m in [(1, 2, 1), (1, 2, 2), (2, 2, 1)]:
        tower = build_tower(n, q, m)
        report = check_level(tower.structure)
        assert report["ok"], report["witness"]
        assert report["witness"] is None


def test_check_level_single_value_perturbation_fails():
    tower = build_tower(2, 2, 1)
    phi = tower.structure
    ring = tower.ring
    for v in sorted(phi.values):
        if v == (0, 0):
            continue
        values = dict(phi.values)
        values[v] = values[v] + ring.one()
        bad = LevelStructure(phi.module, phi.m, values)
        report = check_level(bad)
        assert not report["ok"]
        assert report["witness"] is not None


def test_check_level_duplicate_root_gives_remainder_witness():
    # collapsing a torsion value onto an existing root survives additivity
    # and pi-linearity, so only the exact-division step can catch it
    tower = build_tower(1, 2, 1)
    phi = tower.structure
    values = dict(phi.values)
    values[(1,)] = tower.ring.zero()
    bad = LevelStructure(phi.module, phi.m, values)
    report = check_level(bad)
    assert not report["ok"]
    assert report["witness"]["kind"] == "divisor"
    assert report["witness"]["remainder"] not in (None, "None", "0")


def test_build_tower_requires_enough_precision():
    with pytest.raises(PreconditionError):
        build_tower(2, 2, 2, prec=2)


def test_u_spec_value_form():
    tower = build_tower(2, 2, 1, u_spec=[[0, 1]])
    assert tower.rank_over_base == 6
    assert tower.u_spec_label == "val:0,1"
    assert check_level(tower.structure)["ok"]


def test_act_matches_alpha_polynomial():
    tower = build_tower(2, 2, 1)
    mod = tower.module
    phi = tower.structure
    from leveltower.rings import poly_eval

    digits = [1, 1]
    pol = mod.alpha_mult(digits)
    for v in list(phi.values)[:6]:
        x = phi.values[v]
        assert mod.act(digits, x) == poly_eval(pol, x)
