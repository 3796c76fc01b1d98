from fractions import Fraction

import pytest

from latnab.catalog import catalog
from latnab.errors import DomainError, LatticeFormatError, ReproduceMismatchError
from latnab.lattice import LatticeVector
from latnab.reproduce import (
    Cell, ReproduceReport, construction_vector, load_fixture, reproduce_section, require_pass,
)


def test_construction_vectors(Lambda4):
    assert construction_vector("eps2+eps4", Lambda4) == LatticeVector.of([0, 1, 0, 1])
    assert construction_vector("e4/2", Lambda4) == LatticeVector.of(["1/2"] * 4)
    assert construction_vector("e1 - e4", Lambda4) == LatticeVector.of([1, -1, -1, -1])

    L3 = catalog("Lambda3")
    v = construction_vector("(e1+e3)/2", L3)
    assert v == (L3.e(1) + L3.e(3)) * Fraction(1, 2)
    assert construction_vector("(e1+2e2)/2", L3) == L3.e(1) * Fraction(1, 2) + L3.e(2)

    BW16 = catalog("BW16")
    assert BW16.norm(construction_vector("f1", BW16)) == 3


def test_named_construction_vectors():
    L5 = catalog("Lambda5")
    named = {"f1": "(e1+2e2+2e3+e4+e5)/2"}
    direct = construction_vector("(e1+2e2+2e3+e4+e5)/2", L5)
    assert construction_vector("f1", L5, named) == direct


@pytest.mark.parametrize("text", ["eps1", "e3", "f1", "e1+?", "(e1"])
def test_bad_constructions(text):
    # Lambda2 is gram-only: no orthonormal frame, two basis vectors
    with pytest.raises(LatticeFormatError):
        construction_vector(text, catalog("Lambda2"))


def test_fixture_range():
    assert load_fixture(4)["base"] == "Lambda4"
    with pytest.raises(DomainError):
        load_fixture(9)


def test_cells_ignore_parts_not_computed():
    cell = Cell("designs", "X m=4", [4, 24, 4, 5], [4, 24, None, 5], "test")
    assert cell.matches
    assert cell.partial
    assert not Cell("designs", "X m=4", [4, 24, 4, 5], [4, 24, 4, 3], "test").matches


def test_capped_strength_is_compared():
    assert not Cell("designs", "E8 m=2", [8, 240, 4, 3], [8, 240, 4, ">=11"], "test").matches
    assert Cell("designs", "E8 m=2", [8, 240, 4, 11], [8, 240, 4, ">=11"], "test").matches
    assert Cell("designs", "X m=4", [4, 24, 4, 7], [4, 24, 4, ">=5"], "test").matches
    assert not Cell("designs", "X m=1", [1, 2, 1, "-"], [1, 2, 1, ">=5"], "test").matches


def test_require_pass():
    good = ReproduceReport(2, "good", cells=[Cell("theta", "a q^1", 2, 2, "test")])
    typo = ReproduceReport(5, "typo", cells=[Cell("designs", "b m=5", 24, 56, "test", typo="printed 24")])
    bad = ReproduceReport(6, "bad", cells=[Cell("theta", "c q^2", 2, 3, "test")])
    require_pass([good, typo])
    assert typo.known_typo_flags[0]["matched"] is False
    with pytest.raises(ReproduceMismatchError):
        require_pass([good, bad])


@pytest.mark.parametrize("section", [2, 4])
def test_small_sections(section):
    report = reproduce_section(section)
    assert report.passed, [c.to_dict() for c in report.diffs]
    assert not report.skipped
    data = report.to_dict()
    assert data["passed"] is True
    assert data["generated"]["census"]["total"] == load_fixture(section)["census"]["total"]
    assert data["generated"]["figures"]


def test_neighbor_figures_of_lambda2():
    report = reproduce_section(2)
    edges = {(e["norm"], e["neighbor"], e["index"]): e["count"] for e in report.generated["figures"]}
    # Lambda2(e1/2) is reached through the three classes with a leader of norm 1
    assert edges[("1", "Lambda2(e1/2)", 2)] == 3


def test_fast_mode_skips_large_shells():
    report = reproduce_section(4, fast=True)
    assert report.fast
    assert report.passed


@pytest.mark.slow
@pytest.mark.parametrize("section", [0, 1, 3, 5, 6, 7, 8])
def test_sections(section):
    report = reproduce_section(section)
    assert report.passed, [c.to_dict() for c in report.diffs]


@pytest.mark.slow
def test_known_typo_is_flagged():
    report = reproduce_section(5)
    flags = [f for f in report.known_typo_flags if f.get("table") == "designs"]
    assert len(flags) == 1
    assert flags[0]["matched"] is False
    assert flags[0]["expected"][1] == 24
    assert flags[0]["computed"][1] == 56


def test_lambda3_census_count_is_flagged():
    report = reproduce_section(3, fast=True)
    assert report.passed, [c.to_dict() for c in report.diffs]
    flags = {f["cell"]: f for f in report.known_typo_flags if f.get("table") == "census"}
    assert flags["total"]["expected"] == 12
    assert flags["total"]["computed"] == 11
    assert flags["Lambda3(e1/2,e3/2)"]["computed"] == 3
    assert report.generated["census"]["total"] == 11
