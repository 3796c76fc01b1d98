import pytest

from latnab.catalog import catalog, catalog_names, catalog_vector, parse_name
from latnab.errors import UnknownLatticeError
from latnab.lattice import dual, neighbor
from latnab.shells import kissing, minimum

LAMINATED_DETERMINANTS = {1: 4, 2: 12, 3: 32, 4: 64, 5: 128, 6: 192, 7: 256, 8: 256}


@pytest.mark.parametrize("n,determinant", sorted(LAMINATED_DETERMINANTS.items()))
def test_laminated_determinants(n, determinant):
    L = catalog(f"Lambda{n}")
    assert L.dim == n
    assert L.determinant == determinant
    assert L.is_even()
    assert minimum(L) == 4


def test_root_lattices():
    assert catalog("A2").determinant == 3
    assert catalog("D5").determinant == 4
    assert catalog("E6").determinant == 3
    assert catalog("E7").determinant == 2
    assert catalog("E8").determinant == 1
    assert kissing(catalog("D4")) == 24


def test_powers_and_scaling():
    A1_4 = catalog("A1^4")
    assert A1_4.dim == 4
    assert A1_4.determinant == 16
    assert catalog("D4^2").determinant == 16
    assert catalog("sqrt2*D4").determinant == 64
    assert str(parse_name("sqrt2*D4^2")) == "sqrt2*D4^2"


def test_catalog_is_cached():
    assert catalog("Lambda4") is catalog("Lambda4")


def test_glue_vectors():
    f1 = catalog_vector("f1")
    assert f1.dim == 16
    assert sum(c * c for c in f1.coords) == 3
    assert sum(c * c for c in catalog_vector("f").coords) == 2
    with pytest.raises(UnknownLatticeError):
        catalog_vector("g12")


def test_sixteen_dimensional_lattices():
    BW16 = catalog("BW16")
    assert BW16.determinant == 256
    assert BW16.is_even()

    for name in ("D16+", "E8perpE8"):
        L = catalog(name)
        assert L.determinant == 1
        assert L.is_even()


def test_odd_neighbor_of_bw16():
    BW16 = catalog("BW16")
    O16 = catalog("O16")
    assert O16 == neighbor(BW16, catalog_vector("f1"))
    assert not O16.is_even()
    assert O16.determinant == 64


@pytest.mark.parametrize("name", ["Lambda9", "Q3", "Lambda16_2_4", "", "D1", "A0", "Z0", "D0", "E0", "Lambda0", "A1^0"])
def test_unknown_names(name):
    with pytest.raises(UnknownLatticeError):
        catalog(name)


def test_catalog_names_resolve():
    for name in catalog_names():
        if "<" not in name:
            catalog(name)


_SMALL_NAMES = (
    [f"Lambda{n}" for n in range(1, 9)] + [f"Z{n}" for n in range(1, 9)] + [f"A{n}" for n in range(1, 9)]
    + [f"D{n}" for n in range(2, 9)] + ["E6", "E7", "E8", "O1", "O7", "A1^4", "D4^2", "sqrt2*D4", "sqrt2*E8"]
)


@pytest.mark.parametrize("name", _SMALL_NAMES)
def test_dual_of_the_dual_is_the_lattice(name):
    L = catalog(name)
    assert L.dim <= 8
    L2 = dual(dual(L))
    assert L2 == L
    assert L2.determinant == L.determinant
    assert dual(L).determinant == 1 / L.determinant
