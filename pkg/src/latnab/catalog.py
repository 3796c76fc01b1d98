from __future__ import annotations

import re

from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from latnab.errors import UnknownLatticeError
from latnab.exact import RationalMatrix
from latnab.lattice import Lattice, LatticeVector, adjoin, from_basis, from_gram, orthogonal_sum, scale

# Named lattices and glue vectors. Every construction here is coordinate-for-coordinate the
# classical one:
#   (A1)^2k = <±(e_{2i-1} ± e_{2i})>, D_d = <±e_i ± e_j>, (D4)^k and (D8)^k block-wise,
#   E8 = <D8, f> with f = (e1 + ... + e8)/2.
# The laminated lattices Lambda_n have minimum 4; unscaled root lattices have their own names.


class CatalogName(NamedTuple):
    kind: str
    param: int | None = None
    power: int = 1
    sqrt2: bool = False

    def __str__(self) -> str:
        match self.kind:
            case "Z" | "A" | "D" | "E" | "Lambda":
                base = f"{self.kind}{self.param}"
            case "Lambda16_2":
                base = f"Lambda16_2_{self.param}"
            case "Lambda16_2prime":
                base = f"Lambda16_2_{self.param}'"
            case _:
                base = self.kind
        if self.power != 1:
            base = f"{base}^{self.power}"
        return f"sqrt2*{base}" if self.sqrt2 else base


_SIMPLE = {"BW16", "BW16alt", "O1", "O7", "O16", "D16+", "E8perpE8"}
_NAME_RE = re.compile(r"^(?P<sqrt2>sqrt2\*)?(?P<base>[A-Za-z0-9_+']+?)(?:\^(?P<power>\d+))?$")


def parse_name(text: str) -> CatalogName:
    m = _NAME_RE.match(text.strip())
    if m is None:
        raise UnknownLatticeError(f"Unknown lattice name: {text!r}")
    base = m.group("base")
    power = int(m.group("power") or 1)
    sqrt2 = m.group("sqrt2") is not None
    if power < 1:
        raise UnknownLatticeError(f"Power must be at least 1: {text!r}")
    if base in _SIMPLE:
        return CatalogName(base, None, power, sqrt2)
    if (mm := re.fullmatch(r"Lambda16_2_([123])('?)", base)):
        kind = "Lambda16_2prime" if mm.group(2) else "Lambda16_2"
        return CatalogName(kind, int(mm.group(1)), power, sqrt2)
    if (mm := re.fullmatch(r"(Z|A|D|E|Lambda)(\d+)", base)):
        if int(mm.group(2)) < 1:
            raise UnknownLatticeError(f"Dimension must be at least 1: {text!r}")
        return CatalogName(mm.group(1), int(mm.group(2)), power, sqrt2)
    raise UnknownLatticeError(f"Unknown lattice name: {text!r}")


def catalog_names() -> list[str]:
    # The names the catalog is usually asked for; families accept other parameters too.
    names = [f"Lambda{n}" for n in range(1, 9)]
    names += ["BW16", "BW16alt", "O1", "O7", "O16"]
    names += [f"Lambda16_2_{i}" for i in (1, 2, 3)] + [f"Lambda16_2_{i}'" for i in (1, 2, 3)]
    names += ["D16+", "E8perpE8", "E8^2"]
    names += ["Z<n>", "A<n>", "D<n>", "E6", "E7", "E8", "A1^<k>", "D4^<k>", "D8^<k>", "sqrt2*<name>"]
    return names


# Glue vectors

def _half(*signs: int) -> LatticeVector:
    return LatticeVector(tuple(Fraction(s, 2) for s in signs))


def _eps_sum(dim: int, *indices: int) -> LatticeVector:
    # e_i1 + e_i2 + ... in the orthonormal frame, 1-based indices
    return LatticeVector(tuple(Fraction(int(i + 1 in indices)) for i in range(dim)))


_G_INDICES = {
    1: (1, 5, 9, 13), 2: (1, 3, 5, 7), 3: (1, 3, 9, 11), 4: (1, 3, 13, 15),
    5: (1, 2, 3, 4), 6: (1, 2, 5, 6), 7: (1, 2, 7, 8), 8: (1, 2, 9, 10),
    9: (1, 2, 11, 12), 10: (1, 2, 13, 14), 11: (1, 2, 15, 16),
}


def catalog_vector(name: str) -> LatticeVector:
    """Named glue vectors: f (dimension 8), f0, f1, f2 and g1 ... g11 (dimension 16)."""
    match name:
        case "f":
            return _half(*[1] * 8)
        case "f0":
            return _half(-1, *[1] * 7, -1, *[1] * 7)
        case "f1":
            return _half(*[1] * 8, 2, *[0] * 7)
        case "f2":
            return _half(-1, *[1] * 7, *[0] * 8)
    if (m := re.fullmatch(r"g(\d+)", name)) and int(m.group(1)) in _G_INDICES:
        return _eps_sum(16, *_G_INDICES[int(m.group(1))])
    raise UnknownLatticeError(f"Unknown glue vector: {name!r}")


# Root lattices

def _cartan(n: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for a, b in edges:
        C[a - 1][b - 1] = C[b - 1][a - 1] = -1
    return C


def _chain(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(1, n)]


def _e_edges(n: int) -> list[tuple[int, int]]:
    # Bourbaki numbering: 1-3-4-5-...-n with 2 attached to 4
    return [(1, 3), (2, 4)] + [(i, i + 1) for i in range(3, n)]


def _d_lattice(n: int) -> Lattice:
    rows = []
    for i in range(n - 1):
        row = [0] * n
        row[i], row[i + 1] = 1, -1
        rows.append(row)
    last = [0] * n
    last[n - 2] = last[n - 1] = 1
    rows.append(last)
    return from_basis(rows, name=f"D{n}")


def _a1_power(k: int) -> Lattice:
    if k % 2:
        return from_gram([[2 if i == j else 0 for j in range(k)] for i in range(k)], name=f"A1^{k}")
    rows = []
    for i in range(0, k, 2):
        for s in (1, -1):
            row = [0] * k
            row[i], row[i + 1] = 1, s
            rows.append(row)
    return from_basis(rows, name=f"A1^{k}")


def _scaled_gram(C: list[list[int]], c: int) -> list[list[int]]:
    return [[c * x for x in row] for row in C]


# Laminated lattices of minimum 4, in the coordinates used for their neighbor constructions

def _laminated(n: int) -> Lattice:
    name = f"Lambda{n}"
    match n:
        case 1:
            return from_basis([[2]], name=name)
        case 2 | 3:
            return from_gram(_scaled_gram(_cartan(n, _chain(n)), 2), name=name)
        case 4:
            return from_basis([[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [1, 1, 1, 1]], name=name)
        case 5:
            C = [[2, -1, 0, 0, 0], [-1, 2, -1, 0, 0], [0, -1, 2, -1, -1], [0, 0, -1, 2, 0], [0, 0, -1, 0, 2]]
            return from_gram(_scaled_gram(C, 2), name=name)
        case 6:
            C = [[2, -1, 0, 0, 0, 0], [-1, 2, -1, 0, 0, 0], [0, -1, 2, -1, 0, -1],
                 [0, 0, -1, 2, -1, 0], [0, 0, 0, -1, 2, 0], [0, 0, -1, 0, 0, 2]]
            return from_gram(_scaled_gram(C, 2), name=name)
        case 7:
            rows = [[2 if i == j else 0 for j in range(7)] for i in range(4)]
            rows += [[1, 0, 1, 1, 1, 0, 0], [0, 1, 0, 1, 1, 1, 0], [0, 0, 1, 0, 1, 1, 1]]
            return from_basis(rows, name=name)
        case 8:
            rows = [
                [2, 0, 0, 0, 0, 0, 0, 0], [0, 2, 0, 0, 0, 0, 0, 0], [0, 0, 2, 0, 0, 0, 0, 0],
                [1, 1, 1, 1, 0, 0, 0, 0], [0, 0, 0, 0, 2, 0, 0, 0], [1, 1, 0, 0, 1, 1, 0, 0],
                [1, 0, 1, 0, 1, 0, 1, 0], [0, 1, 0, 1, 0, 1, 0, 1],
            ]
            return from_basis(rows, name=name)
    raise UnknownLatticeError(f"Laminated lattices are catalogued for 1 <= n <= 8, not {n}.")


# Dimension 16

_BW16_GENERATORS = ["2e1", "2e2", "2e3", "g5", "g6", "2e6", "g2", "g7", "g8", "g3", "g9", "g1", "g10", "g4", "g11", "f0"]

# Rescaled by 1/sqrt(2): only its Gram matrix M M^T / 2 is rational
_BW16_ALT_ROWS = [[4] + [0] * 15] + [[2] + [2 if j == i else 0 for j in range(1, 16)] for i in range(1, 11)] + [
    [1, 1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0],
    [0, 1, 1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0, 0],
    [0, 0, 1, 1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0],
    [0, 0, 0, 1, 1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 1, 0],
    [1] * 16,
]


def _generator(name: str) -> LatticeVector:
    # "2e6" is twice the sixth unit vector of the 16-dimensional frame, anything else a glue vector
    if (m := re.fullmatch(r"2e(\d+)", name)):
        return LatticeVector.unit(16, int(m.group(1)) - 1, 2)
    return catalog_vector(name)


def _glue(*names: str) -> list[LatticeVector]:
    return [catalog_vector(n) for n in names]


def _g(*indices: int) -> list[str]:
    return [f"g{i}" for i in indices]


def _sixteen(kind: str, param: int | None) -> Lattice:
    a1 = _a1_power(16)
    d4 = orthogonal_sum(*[_d_lattice(4)] * 4)
    d8 = orthogonal_sum(_d_lattice(8), _d_lattice(8))
    match kind, param:
        case "BW16", _:
            return from_basis([_generator(g).coords for g in _BW16_GENERATORS], name="BW16")
        case "BW16alt", _:
            M = RationalMatrix.of(_BW16_ALT_ROWS)
            return from_gram((M @ M.transpose()).scale(Fraction(1, 2)), name="BW16alt")
        case "Lambda16_2", 1:
            return adjoin(a1, _glue("f0", "f1", *_g(1, 2, 3, 4)), name="Lambda16_2_1")
        case "Lambda16_2", 2:
            return adjoin(d4, _glue("f0", "f1", "g1"), name="Lambda16_2_2")
        case "Lambda16_2", 3:
            return adjoin(d8, _glue("f0", "f1"), name="Lambda16_2_3")
        case "Lambda16_2prime", 1:
            return adjoin(a1, _glue("f0", *_g(1, 2, 3, 4)), name="Lambda16_2_1'")
        case "Lambda16_2prime", 2:
            return adjoin(d4, _glue("f0", "g1"), name="Lambda16_2_2'")
        case "Lambda16_2prime", 3:
            return adjoin(d8, _glue("f0"), name="Lambda16_2_3'")
        case "D16+", _:
            return adjoin(d8, [_eps_sum(16, 1, 9)] + _glue("f0"), name="D16+")
        case "E8perpE8", _:
            # <D8 + D8, f0, f2>: f2 glues the first block to E8 and f0 - f2 the second
            return adjoin(d8, _glue("f0", "f2"), name="E8perpE8")
    raise UnknownLatticeError(f"Unknown dimension-16 lattice {kind} {param}.")


def _build(name: CatalogName) -> Lattice:
    kind, n = name.kind, name.param
    match kind:
        case "Z":
            lat = from_basis([[int(i == j) for j in range(n)] for i in range(n)], name=f"Z{n}")
        case "A":
            lat = from_gram(_cartan(n, _chain(n)), name=f"A{n}")
        case "D" if n is not None and n >= 2:
            lat = _d_lattice(n)
        case "E" if n == 8:
            lat = adjoin(_d_lattice(8), [catalog_vector("f")], name="E8")
        case "E" if n in (6, 7):
            lat = from_gram(_cartan(n, _e_edges(n)), name=f"E{n}")
        case "Lambda":
            lat = _laminated(n or 0)
        case "O1":
            lat = from_gram([[3]], name="O1")
        case "O7":
            from latnab.venkov import catalog_O7
            lat = catalog_O7()
        case "O16":
            from latnab.venkov import catalog_O16
            lat = catalog_O16()
        case "BW16" | "BW16alt" | "Lambda16_2" | "Lambda16_2prime" | "D16+" | "E8perpE8":
            lat = _sixteen(kind, n)
        case _:
            raise UnknownLatticeError(f"Unknown lattice name: {name}")

    if name.power != 1:
        if kind == "A" and n == 1:
            lat = _a1_power(name.power)
        else:
            lat = orthogonal_sum(*[lat] * name.power)
    if name.sqrt2:
        lat = scale(lat, 2)
    return lat.renamed(str(name))


@lru_cache(maxsize=64)
def _catalog(name: CatalogName) -> Lattice:
    return _build(name)


def catalog(name: str | CatalogName) -> Lattice:
    """The named lattice. Results are cached, lattices are immutable."""
    if isinstance(name, str):
        name = parse_name(name)
    return _catalog(name)
