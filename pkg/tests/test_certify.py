"""Decision tree of the regular-elliptic certifier."""

import pytest

from leveltower.certify import regular_elliptic_certify
from leveltower.errors import CertificationError, Inconclusive
from leveltower.fq import FqField
from leveltower.laurent import Laurent


def _poly(field, *codes_or_laurents):
    out = []
    for c in codes_or_laurents:
        out.append(c if isinstance(c, Laurent) else Laurent.const(field, c))
    return out


def test_unramified_quadratic():
    f2 = FqField(2, 1)
    cert = regular_elliptic_certify(_poly(f2, 1, 1, 1))
    assert cert.kind == "unramified"
    assert (cert.e, cert.f) == (1, 2)
    assert cert.det_val == 0
    assert cert.separable
    assert not cert.eisenstein


def test_unramified_cubic():
    f2 = FqField(2, 1)
    cert = regular_elliptic_certify(_poly(f2, 1, 1, 0, 1))
    assert cert.kind == "unramified"
    assert (cert.e, cert.f) == (1, 3)
    assert cert.det_val == 0


def test_eisenstein_quadratic():
    f2 = FqField(2, 1)
    cert = regular_elliptic_certify([Laurent.pi(f2, 1), Laurent.zero(f2), Laurent.const(f2, 1)])
    assert cert.kind == "ramified"
    assert cert.eisenstein
    assert (cert.e, cert.f) == (2, 1)
    assert cert.det_val == 1


def test_eisenstein_cubic():
    f3 = FqField(3, 1)
    cert = regular_elliptic_certify(
        [Laurent.pi(f3, 1), Laurent.zero(f3), Laurent.zero(f3), Laurent.const(f3, 1)])
    assert cert.kind == "ramified"
    assert (cert.e, cert.f) == (3, 1)
    assert cert.det_val == 1


def test_split_newton_polygon_rejected():
    f2 = FqField(2, 1)
    # (T - 1)(T - pi): slopes 0 and 1
    pol = [Laurent.pi(f2, 1), Laurent.const(f2, 1) + Laurent.pi(f2, 1), Laurent.const(f2, 1)]
    with pytest.raises(CertificationError):
        regular_elliptic_certify(pol)


def test_split_separable_residue_rejected():
    f3 = FqField(3, 1)
    # residue T^2 + T = T(T + 1), distinct roots downstairs
    pol = _poly(f3, 0, 1, 1)
    with pytest.raises(CertificationError):
        regular_elliptic_certify(pol)


def test_irreducible_power_residue_is_inconclusive():
    f3 = FqField(3, 1)
    # T^2 + T + 1 = (T + 2)^2 over F_3
    pol = _poly(f3, 1, 1, 1)
    with pytest.raises(Inconclusive):
        regular_elliptic_certify(pol)


def test_pi_perturbation_keeps_certificate():
    f2 = FqField(2, 1)
    base = _poly(f2, 1, 1, 1)
    bumped = [base[0] + Laurent.pi(f2, 1), base[1], base[2]]
    cert = regular_elliptic_certify(bumped)
    assert cert.kind == "unramified"
    assert cert.det_val == 0


def test_summary_is_plain_data():
    f2 = FqField(2, 1)
    cert = regular_elliptic_certify(_poly(f2, 1, 1, 1))
    s = cert.summary()
    assert s["kind"] == "unramified"
    assert isinstance(s["det_val"], int)
