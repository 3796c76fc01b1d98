import pytest

from latnab.catalog import catalog
from latnab.errors import VenkovPreconditionError
from latnab.lattice import LatticeVector
from latnab.shells import kissing, minimum, theta
from latnab.venkov import venkov_project, venkov_sweep


def test_projection_of_lambda8(Lambda8):
    result = venkov_project(Lambda8, Lambda8.e(1))
    P = result.projected
    assert P.dim == 7
    assert P.is_integral()
    assert not P.is_even()
    assert P.determinant == 64
    assert result.det_ratio == result.projected.determinant / Lambda8.determinant
    assert minimum(P) == 3
    assert kissing(P) == 56


def test_o7_theta():
    t = theta(catalog("O7"), 4)
    assert (t[1], t[2], t[3], t[4]) == (0, 0, 56, 126)


@pytest.mark.slow
def test_sweep_gives_one_determinant(Lambda8):
    results = venkov_sweep(Lambda8)
    assert len(results) == 240
    assert {r.projected.determinant for r in results} == {64}


def test_projection_of_lambda4(Lambda4):
    result = venkov_project(Lambda4, Lambda4.e(1))
    assert result.projected.dim == 3
    assert result.projected.is_integral()
    assert result.det_ratio in (1, 1 / 4)


def test_preconditions(D4, Lambda4):
    with pytest.raises(VenkovPreconditionError):
        venkov_project(catalog("Z4"), LatticeVector.of([1, 1, 0, 0]))
    with pytest.raises(VenkovPreconditionError):
        venkov_project(D4, LatticeVector.of([1, 1, 0, 0]))
    with pytest.raises(VenkovPreconditionError):
        venkov_project(Lambda4, LatticeVector.of([1, 1, 1, 1]) * 2)
    with pytest.raises(VenkovPreconditionError):
        venkov_project(Lambda4, LatticeVector.of([1, 1, 1, 0]))
    with pytest.raises(VenkovPreconditionError):
        venkov_project(catalog("Lambda1"), LatticeVector.of([2]))
