from collections import Counter
from fractions import Fraction

import pytest

from latnab.catalog import catalog
from latnab.config import CensusConfig, IsometryPolicy, PerformanceConfig, QuotientConfig
from latnab.errors import NotIntegralError, QuotientTooLargeError
from latnab.lattice import from_gram, index_in
from latnab.overlattice import bucket_counts, classify_census, integral_overlattices


@pytest.mark.parametrize("name,total", [("Lambda1", 2), ("Lambda2", 4), ("Lambda3", 11), ("Lambda4", 38)])
def test_census_sizes(name, total):
    assert integral_overlattices(catalog(name)).total == total


def test_members_are_integral_overlattices(Lambda4):
    census = integral_overlattices(Lambda4)
    assert census.members[0].order == 1
    assert Counter(m.order for m in census.members) == Counter({1: 1, 2: 15, 4: 19, 8: 3})
    for member, M in census:
        assert M.is_integral()
        assert M.determinant == census.determinant(member)
        assert index_in(Lambda4, M) == member.order
        assert census.parity(member) == ("even" if M.is_even() else "odd")


def test_threads_do_not_change_the_census(Lambda4):
    serial = integral_overlattices(Lambda4)
    threaded = integral_overlattices(Lambda4, perf=PerformanceConfig(threads=3))
    assert serial.members == threaded.members


def test_classification_with_references(Lambda4):
    census = integral_overlattices(Lambda4)
    references = {
        "Lambda4": Lambda4,
        "Z4": catalog("Z4"),
        "(A1)^4": catalog("A1^4"),
        "D4": catalog("D4"),
    }
    classify_census(census, IsometryPolicy.STRICT, references)
    counts = bucket_counts(census)
    assert counts["Lambda4"] == 1
    assert counts["Z4"] == 3
    assert counts["(A1)^4"] == 3
    assert counts["D4"] == 1
    assert sorted(counts.values()) == [1, 1, 3, 3, 12, 18]
    assert all(b.justification == "isometry" for b in census.buckets)
    assert sum(len(b.members) for b in census.buckets) == 38


def test_strict_classes_of_lambda3():
    census = classify_census(integral_overlattices(catalog("Lambda3")), IsometryPolicy.STRICT)
    assert sorted(b.count for b in census.buckets) == [1, 1, 3, 6]
    assert census.classified


def test_class_minimum(Lambda4):
    census = integral_overlattices(Lambda4, census=CensusConfig(theta_bound=3))
    assert census.class_minimum(0) == 0
    minima = Counter(census.class_minimum(i) for i in range(1, census.group.order))
    assert minima == {Fraction(1, 2): 24, Fraction(1): 12, Fraction(3, 2): 24, Fraction(2): 3}


def test_census_errors(Lambda8):
    with pytest.raises(NotIntegralError):
        integral_overlattices(from_gram([["1/2"]]))
    with pytest.raises(QuotientTooLargeError):
        integral_overlattices(Lambda8, QuotientConfig(max_order=64))


@pytest.mark.parametrize("name", ["Lambda3", "Lambda4"])
def test_census_is_closed_under_intersection(name):
    census = integral_overlattices(catalog(name))
    lattices = {member.mask: M for member, M in census}
    assert len(lattices) == census.total
    for a in lattices:
        for b in lattices:
            assert a & b in lattices
    # The member for the intersected subgroup lies in both overlattices
    orders = {member.mask: member.order for member in census.members}
    masks = sorted(lattices)
    for a, b in zip(masks, masks[1:]):
        inner = lattices[a & b]
        for outer in (a, b):
            k = index_in(inner, lattices[outer])
            assert orders[a & b] * k == orders[outer]
            assert lattices[outer].determinant * k ** 2 == inner.determinant
