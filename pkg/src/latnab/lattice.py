from __future__ import annotations

import json

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Sequence

from latnab.errors import (
    DimensionMismatchError, IndexNotTwoError, LatticeFormatError, NonIntegralNeighborError,
    NotProperCosetError, NotSublatticeError, RankDeficientError,
)
from latnab.exact import (
    RationalLike, RationalMatrix, Vector, common_denominator, det, format_rational, hnf_basis,
    inverse, ldl, rational_sqrt, solve_left, to_rational,
)


@dataclass(frozen=True, slots=True)
class LatticeVector:
    # Coordinates in the frame of a lattice: the orthonormal ambient frame, or the metric frame
    # of a gram-only lattice. Inner products are taken by the lattice, not by the vector.
    coords: Vector

    @classmethod
    def of(cls, values: Iterable[RationalLike]) -> LatticeVector:
        return cls(tuple(to_rational(v) for v in values))

    @classmethod
    def zero(cls, dim: int) -> LatticeVector:
        return cls((Fraction(0),) * dim)

    @classmethod
    def unit(cls, dim: int, i: int, scale: RationalLike = 1) -> LatticeVector:
        s = to_rational(scale)
        return cls(tuple(s if j == i else Fraction(0) for j in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: LatticeVector) -> LatticeVector:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"Cannot add vectors of length {self.dim} and {other.dim}.")
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: LatticeVector) -> LatticeVector:
        return self + (-other)

    def __neg__(self) -> LatticeVector:
        return LatticeVector(tuple(-a for a in self.coords))

    def __mul__(self, c: RationalLike) -> LatticeVector:
        c = to_rational(c)
        return LatticeVector(tuple(c * a for a in self.coords))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "(" + ", ".join(format_rational(c) for c in self.coords) + ")"


class Lattice:
    """A full-rank lattice given by a basis in a frame.

    The frame is the orthonormal ambient frame when ``metric`` is None. Gram-only lattices carry the
    Gram matrix of their frame in ``metric``; their basis is then expressed in that frame (the
    identity basis for a lattice built straight from a Gram matrix). Inner products are always
    u . metric . v^T, so every operation below works the same way for both kinds.
    """

    def __init__(self, basis: RationalMatrix, metric: RationalMatrix | None = None, name: str | None = None):
        if not basis.is_square:
            raise DimensionMismatchError(f"Basis must be square, got {basis.nrows}x{basis.ncols}.")
        if metric is not None and (metric.nrows != basis.ncols or not metric.is_symmetric()):
            raise DimensionMismatchError("Metric must be a symmetric matrix matching the basis.")
        self.basis = basis
        self.metric = metric
        self.name = name
        if self.determinant <= 0:
            raise RankDeficientError("Basis rows are linearly dependent.")

    # Cached invariants

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def is_gram_only(self) -> bool:
        return self.metric is not None

    @cached_property
    def gram(self) -> RationalMatrix:
        if self.metric is None:
            return self.basis @ self.basis.transpose()
        return self.basis @ self.metric @ self.basis.transpose()

    @cached_property
    def determinant(self) -> Fraction:
        return det(self.gram)

    @cached_property
    def canonical(self) -> tuple[tuple[tuple[int, ...], ...], int]:
        # HNF of the basis cleared by the LCM of all its entries. The LCM is the same for every
        # basis of the lattice, so the pair is a canonical form.
        den = self.basis.denominator()
        rows = [[int(x * den) for x in row] for row in self.basis.entries]
        return tuple(tuple(r) for r in hnf_basis(rows)), den

    @cached_property
    def integer_gram(self) -> tuple[tuple[tuple[int, ...], ...], int]:
        # Gram matrix times the LCM of its denominators
        den = self.gram.denominator()
        return tuple(tuple(int(x * den) for x in row) for row in self.gram.entries), den

    @cached_property
    def _basis_inverse(self) -> RationalMatrix:
        return inverse(self.basis)

    # Vectors

    def inner(self, u: LatticeVector, v: LatticeVector) -> Fraction:
        if u.dim != self.dim or v.dim != self.dim:
            raise DimensionMismatchError(f"Vectors must have length {self.dim}.")
        if self.metric is None:
            return sum((a * b for a, b in zip(u.coords, v.coords)), Fraction(0))
        mv = self.metric.apply(v.coords)
        return sum((a * b for a, b in zip(u.coords, mv)), Fraction(0))

    def norm(self, v: LatticeVector) -> Fraction:
        return self.inner(v, v)

    def coefficients(self, v: LatticeVector) -> Vector:
        # Coordinates y of v in the lattice basis: y . basis = v
        if v.dim != self.dim:
            raise DimensionMismatchError(f"Vector has length {v.dim}, lattice has dimension {self.dim}.")
        return self._basis_inverse.apply(v.coords)

    def vector(self, coefficients: Sequence[RationalLike]) -> LatticeVector:
        return LatticeVector(self.basis.apply([to_rational(c) for c in coefficients]))

    def e(self, i: int) -> LatticeVector:
        # i-th basis vector, 1-based as in e_1 ... e_d
        return LatticeVector(self.basis[i - 1])

    def contains(self, v: LatticeVector) -> bool:
        return all(c.denominator == 1 for c in self.coefficients(v))

    def pairs_integrally(self, v: LatticeVector) -> bool:
        # v lies in the dual lattice
        return all(self.inner(self.e(i), v).denominator == 1 for i in range(1, self.dim + 1))

    # Predicates

    def is_integral(self) -> bool:
        return self.gram.is_integral()

    def is_even(self) -> bool:
        return self.is_integral() and all(self.gram[i][i].numerator % 2 == 0 for i in range(self.dim))

    def same_frame(self, other: Lattice) -> bool:
        return self.dim == other.dim and self.metric == other.metric

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.same_frame(other) and self.canonical == other.canonical

    def __hash__(self) -> int:
        return hash((self.canonical, self.metric))

    def __repr__(self) -> str:
        kind = "gram-only " if self.is_gram_only else ""
        label = f"{self.name} " if self.name else ""
        return f"<Lattice {label}{kind}dim={self.dim} det={format_rational(self.determinant)}>"

    def renamed(self, name: str | None) -> Lattice:
        lat = Lattice(self.basis, self.metric, name)
        return lat


# Constructors

def from_basis(rows: Iterable[Iterable[RationalLike]], metric: RationalMatrix | None = None, name: str | None = None) -> Lattice:
    basis = RationalMatrix.of(rows)
    if basis.nrows == 0:
        raise DimensionMismatchError("A lattice needs at least one basis vector.")
    return Lattice(basis, metric, name)


def from_gram(G: RationalMatrix | Iterable[Iterable[RationalLike]], name: str | None = None) -> Lattice:
    """Realize a Gram matrix as a lattice.

    When every pivot of the square completion is a rational square the lattice gets exact
    ambient coordinates. Otherwise it is gram-only, with the identity basis in a frame whose
    metric is G.
    """
    if not isinstance(G, RationalMatrix):
        G = RationalMatrix.of(G)
    q, r = ldl(G)
    n = G.nrows
    roots = [rational_sqrt(x) for x in q]
    if any(s is None for s in roots):
        return Lattice(RationalMatrix.identity(n), G, name)
    rows = []
    for i in range(n):
        row = [Fraction(0)] * n
        for j in range(i):
            row[j] = r[j][i] * roots[j]
        row[i] = roots[i]
        rows.append(row)
    return Lattice(RationalMatrix.of(rows), None, name)


def with_basis(L: Lattice, U: Sequence[Sequence[int]]) -> Lattice:
    # Same lattice, basis changed by the integer matrix U (unimodular for the same lattice)
    Um = RationalMatrix.of(U)
    return Lattice(Um @ L.basis, L.metric, L.name)


def dual(L: Lattice) -> Lattice:
    return Lattice(inverse(L.gram) @ L.basis, L.metric, f"{L.name}#" if L.name else None)


def index_in(sub: Lattice, sup: Lattice) -> int:
    if not sub.same_frame(sup):
        raise NotSublatticeError("Lattices live in different frames.")
    C = [sup.coefficients(LatticeVector(row)) for row in sub.basis.entries]
    if any(c.denominator != 1 for row in C for c in row):
        raise NotSublatticeError("First lattice is not contained in the second.")
    return abs(int(det(RationalMatrix.of(C))))


def adjoin(L: Lattice, xs: Iterable[LatticeVector], name: str | None = None) -> Lattice:
    """The smallest lattice containing L and the vectors xs: L(x_1, ..., x_k)."""
    extra = [x.coords for x in xs]
    if any(len(x) != L.dim for x in extra):
        raise DimensionMismatchError(f"Adjoined vectors must have length {L.dim}.")
    rows = list(L.basis.entries) + extra
    den = common_denominator(x for row in rows for x in row)
    H = hnf_basis([[int(x * den) for x in row] for row in rows])
    if len(H) != L.dim:
        raise RuntimeError("Adjoining vectors changed the rank, this should not happen.")
    return Lattice(RationalMatrix.of([[Fraction(x, den) for x in row] for row in H]), L.metric, name)


def neighbor(L: Lattice, x: LatticeVector, name: str | None = None) -> Lattice:
    """The index-2 overlattice L u (x + L)."""
    if L.contains(x):
        raise NotProperCosetError(f"Vector {x} lies in the lattice, not a proper coset.")
    if not L.contains(x * 2):
        raise IndexNotTwoError(f"Twice {x} is not in the lattice, the overlattice would not have index 2.")
    M = adjoin(L, [x], name)
    if not M.is_integral():
        raise NonIntegralNeighborError(f"Adjoining {x} gives a non-integral lattice.")
    if index_in(L, M) != 2:
        raise RuntimeError("Neighbor does not have index 2, this should not happen.")
    return M


def _block_diagonal(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    zero = Fraction(0)
    rows = [list(r) + [zero] * b.ncols for r in a.entries]
    rows += [[zero] * a.ncols + list(r) for r in b.entries]
    return RationalMatrix.of(rows)


def orthogonal_sum(*lattices: Lattice, name: str | None = None) -> Lattice:
    out = lattices[0]
    for L in lattices[1:]:
        basis = _block_diagonal(out.basis, L.basis)
        if out.metric is None and L.metric is None:
            metric = None
        else:
            metric = _block_diagonal(out.metric or RationalMatrix.identity(out.dim),
                                     L.metric or RationalMatrix.identity(L.dim))
        out = Lattice(basis, metric)
    return out.renamed(name)


def scale(L: Lattice, c: RationalLike, name: str | None = None) -> Lattice:
    """The lattice with every inner product multiplied by c."""
    c = to_rational(c)
    s = rational_sqrt(c)
    if s is not None:
        return Lattice(L.basis.scale(s), L.metric, name)
    metric = (L.metric or RationalMatrix.identity(L.dim)).scale(c)
    return Lattice(L.basis, metric, name)


# Lattice file format

def lattice_to_dict(L: Lattice) -> dict[str, Any]:
    data: dict[str, Any] = {
        "name": L.name,
        "dim": L.dim,
        "basis": [[format_rational(x) for x in row] for row in L.basis.entries],
    }
    if L.metric is not None:
        # For gram-only lattices "gram" is the Gram matrix of the frame the basis is written in
        data["gram"] = [[format_rational(x) for x in row] for row in L.metric.entries]
    return data


def lattice_from_dict(data: dict[str, Any]) -> Lattice:
    try:
        dim = int(data["dim"])
        gram = data.get("gram")
        metric = RationalMatrix.of(gram) if gram is not None else None
        if "basis" in data:
            basis = RationalMatrix.of(data["basis"])
        elif metric is not None:
            basis = RationalMatrix.identity(dim)
        else:
            raise LatticeFormatError("Lattice file needs a basis or a gram matrix.")
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise LatticeFormatError(f"Malformed lattice data: {e}") from e
    if basis.nrows != dim:
        raise LatticeFormatError(f"Declared dimension {dim} does not match {basis.nrows} basis rows.")
    if metric is not None:
        if not metric.is_square or metric.nrows != basis.ncols:
            raise LatticeFormatError(f"Gram matrix must be {basis.ncols}x{basis.ncols}, got {metric.nrows}x{metric.ncols}.")
        ldl(metric)
    return Lattice(basis, metric, data.get("name"))


def load_lattice(path: str | Path) -> Lattice:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise LatticeFormatError(f"{path} is not valid JSON: {e}") from e
    return lattice_from_dict(data)


def dump_lattice(L: Lattice, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(lattice_to_dict(L), f, indent=2)
        f.write("\n")


def parse_vector(text: str) -> LatticeVector:
    # "1/2,0,-1" -> LatticeVector
    try:
        return LatticeVector.of(part for part in text.split(",") if part.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise LatticeFormatError(f"Cannot parse vector {text!r}: {e}") from e
