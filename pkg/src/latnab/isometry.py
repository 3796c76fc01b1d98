from __future__ import annotations

import logging

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from latnab.config.classes import IsometryConfig, PerformanceConfig
from latnab.config.policy import IsometryPolicy
from latnab.exact import IntVector, RationalMatrix, format_rational, hnf_basis, inverse, rank
from latnab.lattice import Lattice, from_gram
from latnab.shells import enumerate_vectors, short_vectors


# Fingerprints

@dataclass(frozen=True, slots=True)
class Fingerprint:
    dim: int
    determinant: Fraction
    parity: str  # even, odd or nonintegral
    theta_prefix: tuple[tuple[Fraction, int], ...]
    root_profile: tuple[tuple[int, int], ...]  # sorted (rank, vector count) per component
    decomposable: bool | None = None  # None when not computed

    def difference(self, other: Fingerprint) -> str | None:
        # Name of the first field that tells the two apart
        for name in ("dim", "determinant", "parity", "theta_prefix", "root_profile"):
            if getattr(self, name) != getattr(other, name):
                return name
        if self.decomposable is not None and other.decomposable is not None and self.decomposable != other.decomposable:
            return "decomposable"
        return None

    def key(self) -> tuple:
        return (self.dim, self.determinant, self.parity, self.theta_prefix, self.root_profile)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "det": format_rational(self.determinant),
            "parity": self.parity,
            "theta": {format_rational(k): v for k, v in self.theta_prefix},
            "roots": [list(r) for r in self.root_profile],
            "decomposable": self.decomposable,
        }


def parity(L: Lattice) -> str:
    if not L.is_integral():
        return "nonintegral"
    return "even" if L.is_even() else "odd"


def _int_gram(L: Lattice) -> tuple[np.ndarray, int]:
    rows, den = L.integer_gram
    return np.array(rows, dtype=np.int64), den


def _components(ips: np.ndarray) -> list[list[int]]:
    # Connected components of the graph with an edge wherever the inner product is nonzero
    n = ips.shape[0]
    adj = ips != 0
    seen = np.zeros(n, dtype=bool)
    comps: list[list[int]] = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp, frontier = [s], [s]
        while frontier:
            reach = adj[frontier].any(axis=0) & ~seen
            new = np.flatnonzero(reach).tolist()
            seen[new] = True
            comp.extend(new)
            frontier = new
        comps.append(sorted(comp))
    return comps


def root_profile_of(vectors: list[IntVector], gram: np.ndarray) -> tuple[tuple[int, int], ...]:
    """(rank, count) of each component of a +-symmetric vector set under nonzero inner product."""
    if not vectors:
        return ()
    V = np.array(vectors, dtype=np.int64)
    comps = _components(V @ gram @ V.T)
    return tuple(sorted((rank([vectors[i] for i in c]), len(c)) for c in comps))


def root_profile(L: Lattice, perf: PerformanceConfig = PerformanceConfig()) -> tuple[tuple[int, int], ...]:
    # Components of all vectors of norm <= 2, norm 1 included for odd lattices
    vs = [v for _, v in short_vectors(L, 2, perf)]
    G, _ = _int_gram(L)
    return root_profile_of(vs, G)


def fingerprint(
    L: Lattice,
    cfg: IsometryConfig = IsometryConfig(),
    perf: PerformanceConfig = PerformanceConfig(),
    decomposition: bool = True,
) -> Fingerprint:
    counts = enumerate_vectors(L.gram, cfg.theta_bound, collect=False, perf=perf).counts
    theta_prefix = tuple((k, v) for k, v in sorted({Fraction(0): 1, **counts}.items()) if v)
    return Fingerprint(
        dim=L.dim,
        determinant=L.determinant,
        parity=parity(L),
        theta_prefix=theta_prefix,
        root_profile=root_profile(L, perf),
        decomposable=len(orthogonal_decomposition(L, perf)) > 1 if decomposition else None,
    )


# Orthogonal decomposition

def _generates(rows: list[IntVector], n: int) -> tuple[bool, list[list[int]]]:
    H = hnf_basis(rows)
    ok = len(H) == n and all(H[i][i] == 1 for i in range(n))
    return ok, H


def irreducible_generators(L: Lattice, perf: PerformanceConfig = PerformanceConfig()) -> list[IntVector]:
    """A set of irreducible vectors of L, taken in order of norm, that generates L.

    v is reducible when v = u + w with u, w nonzero and orthogonal, that is when some u with
    norm(u) < norm(v) has (u, v) = norm(u). Irreducible vectors generate L.
    """
    log = logging.getLogger("latnab")
    n = L.dim
    G, den = _int_gram(L)
    step = Fraction(1, L.gram.denominator())
    bound = min(L.gram[i][i] for i in range(n))
    chosen: list[IntVector] = []
    H: list[list[int]] = []
    done: set[IntVector] = set()
    while True:
        allv = short_vectors(L, bound, perf)
        V = np.array([v for _, v in allv], dtype=np.int64)
        norms = np.array([int(m * den) for m, _ in allv], dtype=np.int64)
        # Half representatives not already processed, in order of norm
        todo = [(i, v) for i, (m, v) in enumerate(allv)
                if v not in done and tuple(-a for a in v) not in done and v > tuple(-a for a in v)]
        for start in range(0, len(todo), 64):
            batch = todo[start:start + 64]
            idx = np.array([i for i, _ in batch], dtype=np.int64)
            ips = V[idx] @ G @ V.T
            fresh: list[IntVector] = []
            for row, (i, v) in enumerate(batch):
                done.add(v)
                shorter = norms < norms[i]
                if np.any(shorter & (ips[row] == norms)):
                    continue
                fresh.append(v)
            if not fresh:
                continue
            chosen.extend(fresh)
            ok, H = _generates(H + [list(v) for v in fresh], n)
            if ok:
                log.debug(f"{len(chosen)} irreducible vectors of norm <= {format_rational(bound)} generate the lattice")
                return chosen
        bound += step


def _summands(L: Lattice, perf: PerformanceConfig) -> list[tuple[Lattice, list[list[int]]]]:
    # Each summand with its basis rows in the coordinates of L's basis
    gens = irreducible_generators(L, perf)
    G, _ = _int_gram(L)
    V = np.array(gens, dtype=np.int64)
    summands: list[tuple[int, Fraction, tuple, Lattice, list[list[int]]]] = []
    for comp in _components(V @ G @ V.T):
        B = hnf_basis([gens[i] for i in comp])
        Bm = RationalMatrix.of(B)
        gram = Bm @ L.gram @ Bm.transpose()
        part = from_gram(gram)
        summands.append((part.dim, part.determinant, gram.entries, part, B))
    summands.sort(key=lambda s: (s[0], s[1], s[2]))
    return [(s[3], s[4]) for s in summands]


def orthogonal_decomposition(L: Lattice, perf: PerformanceConfig = PerformanceConfig()) -> list[Lattice]:
    """Indecomposable orthogonal summands of L, as lattices built from their Gram matrices.

    The components of a generating set of irreducible vectors under nonzero inner product span the
    summands. Summands come sorted by (dimension, determinant, Gram).
    """
    return [part for part, _ in _summands(L, perf)]


# Isometry testing

class IsometryStatus(Enum):
    ISOMETRIC = "isometric"
    NOT_ISOMETRIC = "not-isometric"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True, slots=True)
class IsometryVerdict:
    status: IsometryStatus
    certificate: RationalMatrix | None = None  # T with T . Gram1 . T^T = Gram2
    witness: str | None = None

    @property
    def isometric(self) -> bool:
        return self.status is IsometryStatus.ISOMETRIC

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "certificate": None if self.certificate is None else
                [[format_rational(x) for x in row] for row in self.certificate.entries],
            "witness": self.witness,
        }


def _spanning_bound(L: Lattice, perf: PerformanceConfig) -> Fraction:
    # Smallest norm bound whose vectors span the whole space
    step = Fraction(1, L.gram.denominator())
    bound = min(L.gram[i][i] for i in range(L.dim))
    while rank([v for _, v in short_vectors(L, bound, perf)]) < L.dim:
        bound += step
    return bound


def _pick_frame(vs: list[tuple[Fraction, IntVector]], G: np.ndarray, n: int) -> list[int]:
    # Independent vectors, shortest first, preferring ones that pair with those already chosen
    chosen: list[int] = []
    rows: list[IntVector] = []
    V = np.array([v for _, v in vs], dtype=np.int64)
    ips = V @ G @ V.T
    while len(chosen) < n:
        best = None
        for i, (m, v) in enumerate(vs):
            if i in chosen or rank(rows + [v]) == len(rows):
                continue
            links = sum(1 for j in chosen if ips[i, j] != 0)
            key = (m, -links, i)
            if best is None or key < best[0]:
                best = (key, i)
            if links == len(chosen):
                break
        if best is None:
            raise RuntimeError("Vectors do not span the space, this should not happen.")
        chosen.append(best[1])
        rows.append(vs[best[1]][1])
    return chosen


def find_isometry(L1: Lattice, L2: Lattice, perf: PerformanceConfig = PerformanceConfig()) -> RationalMatrix | None:
    """Exact backtracking search for T with T . Gram(L1) . T^T = Gram(L2), T integral.

    A frame w_1..w_d of short independent vectors of L2 is fixed. Images u_i are chosen among the
    vectors of L1 of the same norm whose inner products with u_1..u_{i-1} match those of the w's,
    candidates with the fewest options first. A full assignment gives T = W^-1 U, accepted when
    integral.
    """
    if L1.dim != L2.dim or L1.determinant != L2.determinant:
        return None
    n = L1.dim
    bound = _spanning_bound(L2, perf)
    S2 = short_vectors(L2, bound, perf)
    S1 = short_vectors(L1, bound, perf)
    if Counter(m for m, _ in S1) != Counter(m for m, _ in S2):
        return None
    G1, den1 = _int_gram(L1)
    G2, den2 = _int_gram(L2)
    if den1 != den2:
        return None
    frame = _pick_frame(S2, G2, n)
    W = [S2[i][1] for i in frame]
    Wm = np.array(W, dtype=np.int64)
    target = Wm @ G2 @ Wm.T
    U1 = np.array([v for _, v in S1], dtype=np.int64)
    ip1 = U1 @ G1 @ U1.T
    norms1 = np.diag(ip1)
    Winv = inverse(RationalMatrix.of(W))
    gram1, gram2 = L1.gram, L2.gram

    # Order frame positions so that the most constrained come first
    by_norm = {m: int(np.count_nonzero(norms1 == m)) for m in set(np.diag(target).tolist())}
    order = sorted(range(n), key=lambda i: (by_norm[int(target[i, i])], i))
    assigned: dict[int, int] = {}

    def candidates(pos: int) -> np.ndarray:
        mask = norms1 == target[pos, pos]
        for p, u in assigned.items():
            mask &= ip1[u] == target[pos, p]
        return np.flatnonzero(mask)

    def leaf() -> RationalMatrix | None:
        Um = RationalMatrix.of([S1[assigned[i]][1] for i in range(n)])
        T = Winv @ Um
        if not T.is_integral():
            return None
        if T @ gram1 @ T.transpose() != gram2:
            raise RuntimeError("Isometry certificate does not preserve the Gram matrix, this should not happen.")
        return T

    def search(depth: int) -> RationalMatrix | None:
        if depth == n:
            return leaf()
        pos = order[depth]
        for c in candidates(pos).tolist():
            assigned[pos] = c
            found = search(depth + 1)
            if found is not None:
                return found
            del assigned[pos]
        return None

    return search(0)


def _summandwise(L1: Lattice, L2: Lattice, cfg: IsometryConfig, perf: PerformanceConfig) -> RationalMatrix | None:
    """Certificate assembled from isometries between matching orthogonal summands.

    Each summand of L1 is paired with a summand of L2 by the exact search. With B1, B2 the stacked
    summand bases and T0 the block-diagonal matrix of the summand isometries, T = B2^-1 T0 B1 maps
    Gram(L1) to Gram(L2). Returns None when some summand is too large or has no match.
    """
    S1 = _summands(L1, perf)
    S2 = _summands(L2, perf)
    if len(S1) < 2 or len(S1) != len(S2) or any(p.dim > cfg.strict_max_dim for p, _ in S1):
        return None
    n = L1.dim
    remaining = list(S2)
    rows1: list[list[int]] = []
    rows2: list[list[int]] = []
    block = [[Fraction(0)] * n for _ in range(n)]
    offset = 0
    for p, B in S1:
        for i, (q, C) in enumerate(remaining):
            T = find_isometry(p, q, perf)
            if T is not None:
                break
        else:
            return None
        remaining.pop(i)
        rows1.extend(B)
        rows2.extend(C)
        for r in range(p.dim):
            block[offset + r][offset:offset + p.dim] = T[r]
        offset += p.dim
    B1 = RationalMatrix.of(rows1)
    B2 = RationalMatrix.of(rows2)
    T = inverse(B2) @ RationalMatrix.of(block) @ B1
    if not T.is_integral() or T @ L1.gram @ T.transpose() != L2.gram:
        raise RuntimeError("Summand isometries do not assemble into a certificate, this should not happen.")
    return T


def is_isometric(
    L1: Lattice,
    L2: Lattice,
    policy: IsometryPolicy | None = None,
    cfg: IsometryConfig = IsometryConfig(),
    perf: PerformanceConfig = PerformanceConfig(),
) -> IsometryVerdict:
    log = logging.getLogger("latnab")
    policy = (policy or cfg.policy).resolve(L1.dim, cfg.strict_max_dim)
    f1 = fingerprint(L1, cfg, perf, decomposition=False)
    f2 = fingerprint(L2, cfg, perf, decomposition=False)
    if (diff := f1.difference(f2)) is not None:
        log.debug(f"Fingerprints differ in {diff}")
        return IsometryVerdict(IsometryStatus.NOT_ISOMETRIC, witness=diff)

    if policy is IsometryPolicy.STRICT:
        T = find_isometry(L1, L2, perf)
        if T is None:
            return IsometryVerdict(IsometryStatus.NOT_ISOMETRIC, witness="exhaustive search")
        return IsometryVerdict(IsometryStatus.ISOMETRIC, certificate=T)

    d1 = len(orthogonal_decomposition(L1, perf)) > 1
    d2 = len(orthogonal_decomposition(L2, perf)) > 1
    if d1 != d2:
        return IsometryVerdict(IsometryStatus.NOT_ISOMETRIC, witness="decomposable")
    if d1 and (T := _summandwise(L1, L2, cfg, perf)) is not None:
        return IsometryVerdict(IsometryStatus.ISOMETRIC, certificate=T, witness="isometric summands")
    return IsometryVerdict(IsometryStatus.INDETERMINATE, witness="fingerprint match")
