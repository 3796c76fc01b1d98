from __future__ import annotations

import logging

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm, prod
from typing import Any, NamedTuple

from latnab.config.classes import PerformanceConfig, QuotientConfig
from latnab.errors import NotIntegralError, QuotientTooLargeError
from latnab.exact import IntVector, IntegerMatrix, RationalMatrix, Vector, format_rational, inverse, snf
from latnab.lattice import Lattice, LatticeVector
from latnab.shells import enumerate_vectors

# The discriminant group L#/L of an integral lattice with integer Gram matrix G.
#
# A dual vector with L-coordinates y has z = yG integral, and L corresponds to the row lattice
# of G. With the Smith form D = S G T, z -> zT mod (d_1, ..., d_n) is an isomorphism onto
# Z/d_1 x ... x Z/d_n, and the class with coordinates e_i is generated by y_i = S_i / d_i.
# Only the factors d_i > 1 are kept; an element is the tuple of its coordinates in those factors
# and is numbered in mixed radix, so that element 0 is the zero class.


@dataclass
class QuotientGroup:
    lattice: Lattice
    invariant_factors: tuple[int, ...]
    generators: tuple[Vector, ...]  # y_i in L-coordinates, one per invariant factor
    transform: tuple[tuple[int, ...], ...]  # columns of T for the kept factors

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return lcm(1, *self.invariant_factors)

    def generator_vectors(self) -> list[LatticeVector]:
        return [self.lattice.vector(y) for y in self.generators]

    # Element numbering

    def index(self, a: IntVector) -> int:
        i, w = 0, 1
        for ai, d in zip(a, self.invariant_factors):
            i += (ai % d) * w
            w *= d
        return i

    def element(self, i: int) -> IntVector:
        out = []
        for d in self.invariant_factors:
            i, r = divmod(i, d)
            out.append(r)
        return tuple(out)

    def class_of_dual(self, z: IntVector) -> IntVector:
        # z = yG for a dual vector y
        return tuple(sum(zk * col[k] for k, zk in enumerate(z)) % d
                     for col, d in zip(self.transform, self.invariant_factors))

    def class_of(self, v: LatticeVector) -> IntVector:
        y = self.lattice.coefficients(v)
        G = self.lattice.gram
        z = [sum((y[j] * G[j][k] for j in range(len(y))), Fraction(0)) for k in range(len(y))]
        if any(x.denominator != 1 for x in z):
            raise NotIntegralError(f"Vector {v} is not in the dual lattice.")
        return self.class_of_dual(tuple(int(x) for x in z))

    def representative(self, a: IntVector) -> Vector:
        # Sum a_i y_i in L-coordinates
        n = self.lattice.dim
        return tuple(sum((ai * y[k] for ai, y in zip(a, self.generators)), Fraction(0)) for k in range(n))

    def add(self, i: int, j: int) -> int:
        return self.index(tuple(x + y for x, y in zip(self.element(i), self.element(j))))

    def neg(self, i: int) -> int:
        return self.index(tuple(-x for x in self.element(i)))

    def element_order(self, i: int) -> int:
        return lcm(1, *(d // gcd(ai, d) for ai, d in zip(self.element(i), self.invariant_factors)))

    # Discriminant form values, both only defined modulo 1

    @cached_property
    def _generator_gram(self) -> tuple[tuple[Fraction, ...], ...]:
        G = self.lattice.gram
        n = self.lattice.dim
        Gy = [G.apply(y) for y in self.generators]
        return tuple(tuple(sum((yi[k] * gy[k] for k in range(n)), Fraction(0)) for gy in Gy) for yi in self.generators)

    def bilinear(self, i: int, j: int) -> Fraction:
        a, b = self.element(i), self.element(j)
        B = self._generator_gram
        v = sum((a[p] * b[q] * B[p][q] for p in range(len(a)) for q in range(len(b))), Fraction(0))
        return v - (v.numerator // v.denominator)

    def quadratic(self, i: int) -> Fraction:
        return self.bilinear(i, i)

    @cached_property
    def add_table(self) -> tuple[tuple[int, ...], ...]:
        N = self.order
        elems = [self.element(i) for i in range(N)]
        return tuple(tuple(self.index(tuple(x + y for x, y in zip(elems[i], elems[j]))) for j in range(N)) for i in range(N))


def _integer_gram(L: Lattice) -> IntegerMatrix:
    if not L.is_integral():
        raise NotIntegralError(f"{L.name or 'Lattice'} is not integral, L#/L is not defined.")
    return IntegerMatrix.of([[int(x) for x in row] for row in L.gram.entries])


def quotient_group(L: Lattice) -> QuotientGroup:
    """Structure of L#/L from the Smith normal form of the Gram matrix."""
    G = _integer_gram(L)
    D, S, T = snf(G)
    keep = [i for i, d in enumerate(D.diagonal()) if d > 1]
    factors = tuple(D.diagonal()[i] for i in keep)
    gens = tuple(tuple(Fraction(S[i][k], D[i][i]) for k in range(L.dim)) for i in keep)
    cols = tuple(tuple(T[k][i] for k in range(L.dim)) for i in keep)
    Q = QuotientGroup(L, factors, gens, cols)
    if Q.order != L.determinant:
        raise RuntimeError("Quotient order differs from the determinant, this should not happen.")
    return Q


# Coset leaders

@dataclass(frozen=True, slots=True)
class CosetClass:
    index: int
    element: IntVector
    leader: LatticeVector
    leader_coefficients: Vector  # in the basis of L
    leader_norm: Fraction
    group_order: int
    is_self_negative: bool

    @property
    def norm_mod1(self) -> Fraction:
        return self.leader_norm - (self.leader_norm.numerator // self.leader_norm.denominator)


def _check_order(Q: QuotientGroup, cfg: QuotientConfig) -> None:
    if Q.order > cfg.max_order:
        raise QuotientTooLargeError(f"L#/L has order {Q.order}, above the configured bound {cfg.max_order}.")


def coset_leaders(Q: QuotientGroup, perf: PerformanceConfig = PerformanceConfig()) -> dict[int, tuple[Fraction, Vector]]:
    """Minimal norm and leader (L-coordinates) of every class.

    Sweeps L# up to a bound R, keeping the best vector per class, and doubles R until every class
    is hit. A class hit below R has all of its minimal vectors below R, so the leaders are exact.
    Ties go to the lexicographically smallest L-coordinates.
    """
    log = logging.getLogger("latnab")
    L = Q.lattice
    n = L.dim
    Ginv = inverse(L.gram)  # Gram of L# in the dual basis
    best: dict[int, tuple[Fraction, Vector]] = {0: (Fraction(0), (Fraction(0),) * n)}
    bound = Fraction(1)
    while len(best) < Q.order:
        found = enumerate_vectors(Ginv, bound, perf=perf)
        if found.overflow:
            raise QuotientTooLargeError(f"Coset sweep needs more than {perf.vector_budget} dual vectors.")
        for norm, w in found.all_vectors():
            idx = Q.index(Q.class_of_dual(w))
            y = Ginv.apply(w)
            cur = best.get(idx)
            if cur is None or (norm, y) < cur:
                best[idx] = (norm, y)
        log.debug(f"Coset sweep to norm {format_rational(bound)} reached {len(best)}/{Q.order} classes")
        bound *= 2
    return best


def coset_classes(
    L: Lattice,
    cfg: QuotientConfig = QuotientConfig(),
    perf: PerformanceConfig = PerformanceConfig(),
    certify: bool = True,
) -> list[CosetClass]:
    """One CosetClass per element of L#/L, sorted by (leader norm, order, leader).

    With certify set, every leader norm is checked against a closest vector search in its coset.
    """
    log = logging.getLogger("latnab")
    Q = quotient_group(L)
    _check_order(Q, cfg)
    leaders = coset_leaders(Q, perf)
    out = []
    for idx, (norm, y) in leaders.items():
        order = Q.element_order(idx)
        cls = CosetClass(
            index=idx,
            element=Q.element(idx),
            leader=L.vector(y),
            leader_coefficients=y,
            leader_norm=norm,
            group_order=order,
            is_self_negative=Q.neg(idx) == idx,
        )
        if certify and not leader_is_minimal(L, cls, perf):
            raise RuntimeError(f"Leader of class {idx} is not minimal in its coset, this should not happen.")
        out.append(cls)
    out.sort(key=lambda c: (c.leader_norm, c.group_order, c.leader_coefficients))
    log.info(f"{L.name or 'Lattice'}: {len(out)} classes in L#/L, invariant factors {Q.invariant_factors}")
    return out


class ClassRow(NamedTuple):
    count: int  # pairs when paired, classes otherwise
    paired: bool
    norm: Fraction
    order: int

    @property
    def classes(self) -> int:
        return 2 * self.count if self.paired else self.count

    def to_dict(self) -> dict[str, Any]:
        return {"count": self.count, "paired": self.paired, "norm": format_rational(self.norm),
                "order": self.order, "classes": self.classes}

    def __str__(self) -> str:
        k = f"{self.count}x2" if self.paired else str(self.count)
        return f"({k}, {format_rational(self.norm)}, {self.order})"


def rows_from_classes(classes: list[CosetClass]) -> list[ClassRow]:
    # Self-negative classes are counted one by one, the others as +-pairs
    groups: dict[tuple[Fraction, int, bool], int] = {}
    for c in classes:
        key = (c.leader_norm, c.group_order, not c.is_self_negative)
        groups[key] = groups.get(key, 0) + 1
    rows = []
    for (norm, order, paired), k in sorted(groups.items()):
        if paired and k % 2:
            raise RuntimeError("Unpaired class in a paired row, this should not happen.")
        rows.append(ClassRow(k // 2 if paired else k, paired, norm, order))
    return rows


def class_table(
    L: Lattice,
    cfg: QuotientConfig = QuotientConfig(),
    perf: PerformanceConfig = PerformanceConfig(),
) -> list[ClassRow]:
    return rows_from_classes(coset_classes(L, cfg, perf))


# Closest vectors

class ClosestVector(NamedTuple):
    vector: LatticeVector  # the lattice vector nearest to the target
    coefficients: IntVector
    distance: Fraction  # squared distance norm(target - vector)


def closest_vector(L: Lattice, target: LatticeVector, perf: PerformanceConfig = PerformanceConfig()) -> ClosestVector:
    """Exhaustive closest vector search: a centred enumeration around the target.

    The starting radius is the distance to the coordinate-wise rounding of the target. Ties go to
    the lexicographically smallest coefficients.
    """
    t = L.coefficients(target)
    rounded = tuple(round(x) for x in t)
    center = tuple(r - x for r, x in zip(rounded, t))
    if not any(center):
        return ClosestVector(L.vector(rounded), rounded, Fraction(0))
    G = L.gram
    start = sum((center[i] * G[i][j] * center[j] for i in range(L.dim) for j in range(L.dim)), Fraction(0))
    # Lattice point x + rounded lies at squared distance norm(x + center) from the target
    found = enumerate_vectors(G, start, center=center, perf=perf)
    norm, x = min(found.all_vectors())
    coeffs = tuple(a + r for a, r in zip(x, rounded))
    return ClosestVector(L.vector(coeffs), coeffs, norm)


def leader_is_minimal(L: Lattice, cls: CosetClass, perf: PerformanceConfig = PerformanceConfig()) -> bool:
    return closest_vector(L, cls.leader, perf).distance == cls.leader_norm


def discriminant_matrix(Q: QuotientGroup) -> RationalMatrix:
    # Gram of the generators y_i, whose entries mod 1 define the discriminant form
    return RationalMatrix(Q._generator_gram)
