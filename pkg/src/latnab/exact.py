from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Iterable, Sequence, Union

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_decomp
from sympy.polys.matrices.normalforms import invariant_factors as sympy_invariant_factors

from latnab.errors import DimensionMismatchError, NotPositiveDefiniteError, NotSquareError, RankDeficientError, SingularMatrixError

# Exact linear algebra over Q and Z. Nothing in the package uses floats for geometry.
#   Rational        -> fractions.Fraction, always in lowest terms
#   RationalMatrix  -> immutable rows of Fractions
#   IntegerMatrix   -> immutable rows of Python ints (normal form input and output)
# Determinants, solving and the normal forms run on sympy DomainMatrix over ZZ and QQ. The two
# wrappers are what the rest of the package passes around.

Rational = Fraction
RationalLike = Union[int, str, Fraction]
Vector = tuple[Fraction, ...]
IntVector = tuple[int, ...]


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("Booleans are not rationals.")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"Cannot interpret {value!r} as an exact rational.")


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def common_denominator(values: Iterable[Fraction]) -> int:
    den = 1
    for v in values:
        den = lcm(den, v.denominator)
    return den


@dataclass(frozen=True, slots=True)
class RationalMatrix:
    entries: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def of(cls, rows: Iterable[Iterable[RationalLike]]) -> RationalMatrix:
        entries = tuple(tuple(to_rational(x) for x in row) for row in rows)
        if entries and any(len(r) != len(entries[0]) for r in entries):
            raise DimensionMismatchError("Matrix rows have inconsistent lengths.")
        return cls(entries)

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def transpose(self) -> RationalMatrix:
        return RationalMatrix(tuple(zip(*self.entries))) if self.entries else self

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"Cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}.")
        cols = other.transpose().entries
        return RationalMatrix(tuple(
            tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols)
            for row in self.entries
        ))

    def scale(self, c: RationalLike) -> RationalMatrix:
        c = to_rational(c)
        return RationalMatrix(tuple(tuple(c * x for x in row) for row in self.entries))

    def apply(self, v: Sequence[Fraction]) -> Vector:
        # Row vector times matrix: v . M
        if len(v) != self.nrows:
            raise DimensionMismatchError(f"Vector of length {len(v)} does not fit {self.nrows} rows.")
        return tuple(sum((a * b for a, b in zip(v, col)), Fraction(0)) for col in zip(*self.entries))

    def denominator(self) -> int:
        return common_denominator(x for row in self.entries for x in row)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.entries for x in row)

    def is_symmetric(self) -> bool:
        n = self.nrows
        return self.is_square and all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(i))

    def to_integer(self) -> tuple[IntegerMatrix, int]:
        # Clear all denominators with a single LCM: self == result / den
        den = self.denominator()
        return IntegerMatrix(tuple(tuple(int(x * den) for x in row) for row in self.entries)), den

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(x) for x in row) for row in self.entries)
        return f"RationalMatrix([{body}])"


@dataclass(frozen=True, slots=True)
class IntegerMatrix:
    entries: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> IntegerMatrix:
        entries = tuple(tuple(int(x) for x in row) for row in rows)
        if entries and any(len(r) != len(entries[0]) for r in entries):
            raise DimensionMismatchError("Matrix rows have inconsistent lengths.")
        return cls(entries)

    @classmethod
    def identity(cls, n: int) -> IntegerMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __matmul__(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"Cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}.")
        cols = list(zip(*other.entries))
        return IntegerMatrix(tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.entries))

    def transpose(self) -> IntegerMatrix:
        return IntegerMatrix(tuple(zip(*self.entries))) if self.entries else self

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.nrows, self.ncols)))

    def to_rational(self) -> RationalMatrix:
        return RationalMatrix(tuple(tuple(Fraction(x) for x in row) for row in self.entries))

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]


# sympy domain matrices

def _qq(M: RationalMatrix) -> DomainMatrix:
    return DomainMatrix([[QQ(x.numerator, x.denominator) for x in row] for row in M.entries], (M.nrows, M.ncols), QQ)


def _zz(rows: Sequence[Sequence[int]], ncols: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (len(rows), ncols), ZZ)


def _fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _rational_matrix(dM: DomainMatrix) -> RationalMatrix:
    return RationalMatrix(tuple(tuple(_fraction(x) for x in row) for row in dM.to_list()))


def _integer_matrix(dM: DomainMatrix) -> IntegerMatrix:
    return IntegerMatrix(tuple(tuple(int(x) for x in row) for row in dM.to_list()))


def det(M: RationalMatrix | IntegerMatrix) -> Fraction:
    if M.nrows != M.ncols:
        raise NotSquareError(f"Determinant of a non-square {M.nrows}x{M.ncols} matrix.")
    if M.nrows == 0:
        return Fraction(1)
    if isinstance(M, IntegerMatrix):
        return Fraction(int(_zz(M.entries, M.ncols).det()))
    return _fraction(_qq(M).det())


def rank(rows: Sequence[Sequence[RationalLike]]) -> int:
    if not rows:
        return 0
    return _qq(RationalMatrix.of(rows)).rank()


def solve(M: RationalMatrix, v: Sequence[RationalLike]) -> Vector:
    """Solve M x = v exactly for square nonsingular M."""
    if not M.is_square:
        raise NotSquareError("solve needs a square matrix.")
    n = M.nrows
    if len(v) != n:
        raise DimensionMismatchError(f"Right-hand side has length {len(v)}, expected {n}.")
    if det(M) == 0:
        raise SingularMatrixError("Matrix is singular.")
    b = [to_rational(x) for x in v]
    rhs = DomainMatrix([[QQ(x.numerator, x.denominator)] for x in b], (n, 1), QQ)
    x = _qq(M).lu_solve(rhs)
    return tuple(_fraction(row[0]) for row in x.to_list())


def solve_left(M: RationalMatrix, v: Sequence[RationalLike]) -> Vector:
    # Solve x M = v, the row-vector form used for lattice coordinates.
    return solve(M.transpose(), v)


def inverse(M: RationalMatrix) -> RationalMatrix:
    if not M.is_square:
        raise NotSquareError("Only square matrices have inverses.")
    if det(M) == 0:
        raise SingularMatrixError("Matrix is singular.")
    return _rational_matrix(_qq(M).inv())


# Hermite normal form

def _row_hnf(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    # sympy returns the column HNF W (pivots to the bottom right, entries right of a pivot reduced).
    # Transposing and reversing both index orders turns it into the row form used here: pivot
    # columns strictly increase, pivots are positive and entries above a pivot lie in [0, pivot).
    m = len(rows)
    flipped = [[rows[m - 1 - j][ncols - 1 - i] for j in range(m)] for i in range(ncols)]
    W = hermite_normal_form(_zz(flipped, m)).to_list()
    r = len(W[0]) if W else 0
    return [[int(W[ncols - 1 - c][r - 1 - i]) for c in range(ncols)] for i in range(r)]


def hnf(M: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix]:
    """Row-style Hermite normal form H = U M of a full row rank integer matrix."""
    H = _row_hnf(M.entries, M.ncols)
    if len(H) < M.nrows:
        raise RankDeficientError("Hermite normal form needs full row rank.")
    # U M = H has the unique solution U = H M^T (M M^T)^-1
    Mq = _qq(M.to_rational())
    Hq = _qq(IntegerMatrix.of(H).to_rational())
    U = _rational_matrix(Hq * Mq.transpose() * (Mq * Mq.transpose()).inv())
    if not U.is_integral():
        raise RuntimeError("Hermite transform is not integral, this should not happen.")
    return IntegerMatrix.of(H), U.to_integer()[0]


def hnf_basis(rows: Iterable[Sequence[int]]) -> list[list[int]]:
    # HNF of the lattice generated by arbitrary integer rows, zero rows dropped.
    A = [list(r) for r in rows]
    if not A:
        return []
    return _row_hnf(A, len(A[0]))


def is_hnf(H: IntegerMatrix) -> bool:
    last = -1
    for i, row in enumerate(H.entries):
        c = next((j for j, x in enumerate(row) if x != 0), None)
        if c is None or c <= last or row[c] <= 0:
            return False
        if any(not 0 <= H.entries[k][c] < row[c] for k in range(i)):
            return False
        last = c
    return True


# Smith normal form

def _check_nonsingular(M: IntegerMatrix) -> None:
    if M.ncols != M.nrows:
        raise NotSquareError("Smith normal form is implemented for square matrices.")
    if det(M) == 0:
        raise SingularMatrixError("Smith normal form needs a nonsingular matrix.")


def snf(M: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Smith normal form D = S M T of a square nonsingular integer matrix, d1 | d2 | ...

    The diagonal is made positive by negating rows of S.
    """
    _check_nonsingular(M)
    dD, dS, dT = smith_normal_decomp(_zz(M.entries, M.ncols))
    D, S, T = _integer_matrix(dD), _integer_matrix(dS), _integer_matrix(dT)
    signs = [1 if d > 0 else -1 for d in D.diagonal()]
    D = IntegerMatrix(tuple(tuple(s * x for x in row) for s, row in zip(signs, D.entries)))
    S = IntegerMatrix(tuple(tuple(s * x for x in row) for s, row in zip(signs, S.entries)))
    if S @ M @ T != D:
        raise RuntimeError("Smith transforms do not reproduce the normal form, this should not happen.")
    return D, S, T


def invariant_factors(M: IntegerMatrix) -> tuple[int, ...]:
    _check_nonsingular(M)
    return tuple(abs(int(d)) for d in sympy_invariant_factors(_zz(M.entries, M.ncols)))


def unimodular_completion(c: Sequence[int]) -> IntegerMatrix:
    """A unimodular integer matrix whose first row is the primitive vector c."""
    n = len(c)
    if n == 0 or gcd(*c) != 1:
        raise ValueError(f"Vector {tuple(c)} is not primitive.")
    # Smith decomposition of the single row: s c T = (d, 0, ..., 0) with s, d = +-1,
    # so c is s d times the first row of T^-1.
    dD, dS, dT = smith_normal_decomp(_zz([list(c)], n))
    sign = int(dS.to_list()[0][0]) * int(dD.to_list()[0][0])
    Tinv = _rational_matrix(dT.convert_to(QQ).inv())
    if not Tinv.is_integral():
        raise RuntimeError("Inverse of a unimodular matrix is not integral, this should not happen.")
    rows = [[int(x) for x in row] for row in Tinv.entries]
    rows[0] = [sign * x for x in rows[0]]
    return IntegerMatrix.of(rows)


def ldl(G: RationalMatrix) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Exact square-completion of a positive definite form.

    Returns (q, r) with x G x^T = sum_i q[i] * (x_i + sum_{j>i} r[i][j] x_j)^2. Entries of r on or
    below the diagonal are unused. Raises NotPositiveDefiniteError on a non-positive pivot.
    """
    if not G.is_symmetric():
        raise NotPositiveDefiniteError("Gram matrix is not symmetric.")
    n = G.nrows
    Q = [list(row) for row in G.entries]
    for i in range(n):
        if Q[i][i] <= 0:
            raise NotPositiveDefiniteError("Gram matrix is not positive definite.")
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    q = [Q[i][i] for i in range(n)]
    return q, Q


def rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None
