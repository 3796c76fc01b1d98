from fractions import Fraction

import pytest

from latnab.catalog import catalog
from latnab.config import QuotientConfig
from latnab.errors import NotIntegralError, QuotientTooLargeError
from latnab.lattice import LatticeVector, from_gram
from latnab.quotient import (
    ClassRow, ClosestVector, class_table, closest_vector, coset_classes, discriminant_matrix, leader_is_minimal,
    quotient_group,
)
from latnab.reproduce import load_fixture


def _fixture_rows(section):
    return [ClassRow(c, p, Fraction(n), o) for c, p, n, o in load_fixture(section)["classes"]["rows"]]


def test_discriminant_group_of_d4(D4):
    Q = quotient_group(D4)
    assert Q.invariant_factors == (2, 2)
    assert Q.order == 4
    assert Q.exponent == 2
    assert all(Q.element_order(i) == 2 for i in range(1, 4))
    assert Q.class_of(LatticeVector.of([1, 1, 0, 0])) == (0, 0)
    assert Q.class_of(LatticeVector.of([1, 0, 0, 0])) != (0, 0)


def test_element_numbering(Lambda4):
    Q = quotient_group(Lambda4)
    assert Q.order == 64
    for i in range(Q.order):
        assert Q.index(Q.element(i)) == i
        assert Q.add(i, Q.neg(i)) == 0
    assert Q.add_table[0] == tuple(range(Q.order))


def test_class_of_rejects_vectors_outside_the_dual(D4):
    with pytest.raises(NotIntegralError):
        quotient_group(D4).class_of(LatticeVector.of(["1/3", 0, 0, 0]))


@pytest.mark.parametrize("section,name", [(2, "Lambda2"), (3, "Lambda3"), (4, "Lambda4")])
def test_class_tables(section, name):
    assert class_table(catalog(name)) == _fixture_rows(section)


def test_class_rows_add_up(Lambda4):
    rows = class_table(Lambda4)
    assert sum(r.classes for r in rows) == Lambda4.determinant
    assert str(rows[1]) == "(12x2, 1/2, 4)"


def test_leaders_are_minimal_in_their_coset():
    L = catalog("Lambda3")
    classes = coset_classes(L, certify=True)
    assert len(classes) == 32
    assert classes[0].leader_norm == 0
    assert all(leader_is_minimal(L, c) for c in classes)


def test_class_tables_certify_leaders_by_default(monkeypatch, D4):
    assert all(leader_is_minimal(D4, c) for c in coset_classes(D4))

    def shorter(L, target, perf=None):
        return ClosestVector(target, (0,) * L.dim, Fraction(-1))

    monkeypatch.setattr("latnab.quotient.closest_vector", shorter)
    with pytest.raises(RuntimeError):
        class_table(D4)
    assert len(coset_classes(D4, certify=False)) == 4


def test_discriminant_form_matches_leader_norms():
    L = catalog("Lambda2")
    Q = quotient_group(L)
    for c in coset_classes(L):
        assert Q.quadratic(c.index) == c.norm_mod1
    B = discriminant_matrix(Q)
    assert B.nrows == len(Q.invariant_factors)


def test_closest_vector():
    Z2 = catalog("Z2")
    found = closest_vector(Z2, LatticeVector.of(["2/5", "4/3"]))
    assert found.coefficients == (0, 1)
    assert found.distance == Fraction(4, 25) + Fraction(1, 9)

    on_lattice = closest_vector(Z2, LatticeVector.of([3, -1]))
    assert on_lattice.distance == 0
    assert on_lattice.coefficients == (3, -1)


def test_closest_vector_in_a_skew_lattice():
    A2 = catalog("A2")
    # Deep hole of A2: distance 2/3 to three lattice points
    hole = A2.vector([Fraction(1, 3), Fraction(2, 3)])
    assert closest_vector(A2, hole).distance == Fraction(2, 3)


def test_quotient_size_bound(Lambda8):
    with pytest.raises(QuotientTooLargeError):
        coset_classes(Lambda8, QuotientConfig(max_order=100))


def test_non_integral_lattices_have_no_quotient():
    with pytest.raises(NotIntegralError):
        quotient_group(from_gram([["1/2"]]))
