from __future__ import annotations

import logging

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal, Sequence

from latnab.config.classes import PerformanceConfig
from latnab.errors import VenkovPreconditionError
from latnab.exact import IntVector, RationalMatrix, format_rational, inverse, unimodular_completion
from latnab.lattice import Lattice, LatticeVector, adjoin, from_basis, lattice_to_dict
from latnab.shells import minimal_shell, minimum

# Projection of a minimal vector e of an even lattice of minimum 4:
#   L_e' = {x in L : (e, x) even},  L_e = p(L_e'),  p(x) = x - (x, e)/(e, e) e.
# e is primitive in L_e', so a basis of L_e' can start with e; the images of the other basis
# vectors then form a basis of L_e, with Gram (x_i, x_j) - (x_i, e)(x_j, e)/(e, e).


@dataclass(frozen=True, slots=True)
class VenkovResult:
    projected: Lattice
    assumption: Literal[1, 2]
    det_ratio: Fraction  # det(L_e) / det(L)

    def to_dict(self) -> dict[str, Any]:
        return {
            "assumption": self.assumption,
            "det_ratio": format_rational(self.det_ratio),
            "det": format_rational(self.projected.determinant),
            "projected": lattice_to_dict(self.projected),
        }


def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _pairings(L: Lattice, y: IntVector) -> list[int]:
    # (e, b_j) for the basis vectors b_j, e with L-coefficients y
    G = L.gram
    row = G.apply([Fraction(a) for a in y])
    return [int(x) for x in row]


def _even_sublattice(pairings: list[int]) -> tuple[Literal[1, 2], list[list[int]]]:
    """Assumption in force and a basis of L_e' in L-coefficients."""
    n = len(pairings)
    odd = [j for j, a in enumerate(pairings) if a % 2]
    if odd:
        j0 = odd[0]
        rows = []
        for j in range(n):
            row = [int(i == j) for i in range(n)]
            if j == j0:
                row[j0] = 2
            elif j in odd:
                row[j0] = 1
            rows.append(row)
        return 1, rows
    if any(a % 4 == 2 for a in pairings):
        return 2, [[int(i == j) for i in range(n)] for j in range(n)]
    raise VenkovPreconditionError("Every (e, x) is divisible by 4, neither projection assumption holds.")


def _check_preconditions(L: Lattice, e: LatticeVector, perf: PerformanceConfig) -> IntVector:
    if L.dim < 2:
        raise VenkovPreconditionError(f"Projection needs dimension at least 2, got {L.dim}.")
    if not L.is_even():
        raise VenkovPreconditionError(f"{L.name or 'Lattice'} is not an even integral lattice.")
    if not L.contains(e):
        raise VenkovPreconditionError(f"Vector {e} is not in the lattice.")
    if L.norm(e) != 4:
        raise VenkovPreconditionError(f"Vector {e} has norm {format_rational(L.norm(e))}, a minimal vector of norm 4 is needed.")
    m = minimum(L, perf)
    if m != 4:
        raise VenkovPreconditionError(f"{L.name or 'Lattice'} has minimum {format_rational(m)}, not 4.")
    return tuple(int(c) for c in L.coefficients(e))


def venkov_project(
    L: Lattice,
    e: LatticeVector,
    name: str | None = None,
    perf: PerformanceConfig = PerformanceConfig(),
) -> VenkovResult:
    """The projected lattice L_e as a gram-only lattice of rank dim(L) - 1."""
    log = logging.getLogger("latnab")
    y = _check_preconditions(L, e, perf)
    assumption, rows = _even_sublattice(_pairings(L, y))

    # Coordinates of e in the L_e' basis, then a basis of L_e' starting with e
    B = RationalMatrix.of(rows)
    c = inverse(B).apply([Fraction(a) for a in y])
    if any(x.denominator != 1 for x in c):
        raise RuntimeError("Minimal vector is not in its even-pairing sublattice, this should not happen.")
    U = unimodular_completion([int(x) for x in c]).to_rational()
    basis = (U @ B).entries[1:]

    G = L.gram
    ee = L.norm(e)
    Gy = G.apply([Fraction(a) for a in y])
    Gb = [G.apply(b) for b in basis]
    ge = [_dot(b, Gy) for b in basis]
    gram = [[_dot(bi, gbj) - ge[i] * ge[j] / ee for j, gbj in enumerate(Gb)] for i, bi in enumerate(basis)]
    projected = Lattice(RationalMatrix.identity(L.dim - 1), RationalMatrix.of(gram), name)

    if not projected.is_integral():
        raise RuntimeError("Projected lattice is not integral, this should not happen.")
    if projected.is_even():
        raise RuntimeError("Projected lattice is even, this should not happen.")
    ratio = projected.determinant / L.determinant
    if ratio != (1 if assumption == 1 else Fraction(1, 4)):
        raise RuntimeError(f"Determinant ratio {ratio} under assumption {assumption}, this should not happen.")
    log.debug(f"Projected {L.name or 'lattice'} at {e}: assumption {assumption}, det {format_rational(projected.determinant)}")
    return VenkovResult(projected, assumption, ratio)


def venkov_sweep(L: Lattice, perf: PerformanceConfig = PerformanceConfig()) -> list[VenkovResult]:
    # Projections at every minimal vector
    return [venkov_project(L, e, perf=perf) for e in minimal_shell(L, perf).vectors()]


def catalog_O7() -> Lattice:
    from latnab.catalog import catalog
    L8 = catalog("Lambda8")
    e = L8.e(1)
    return venkov_project(L8, e, name="O7").projected


_O16_GLUE = ["f0", "f1"] + [f"g{i}" for i in range(1, 12)]


def catalog_O16() -> Lattice:
    """O16 = <2e_1, ..., 2e_16, f0, f1, g1, ..., g11>."""
    from latnab.catalog import catalog_vector
    twice = from_basis([[2 * int(i == j) for j in range(16)] for i in range(16)])
    return adjoin(twice, [catalog_vector(v) for v in _O16_GLUE], name="O16")
