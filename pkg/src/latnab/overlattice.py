from __future__ import annotations

import logging

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Mapping, NamedTuple

import numpy as np

from latnab.config.classes import CensusConfig, IsometryConfig, PerformanceConfig, QuotientConfig
from latnab.config.policy import IsometryPolicy
from latnab.errors import DomainError, IndeterminateIsometryError, NotIntegralError, QuotientTooLargeError
from latnab.exact import format_rational, inverse
from latnab.isometry import Fingerprint, find_isometry, fingerprint, root_profile_of
from latnab.lattice import Lattice, adjoin
from latnab.quotient import QuotientGroup, discriminant_matrix, quotient_group
from latnab.shells import enumerate_vectors
from latnab.threadsafe import run_partitioned

# Integral overlattices L <= M <= L# correspond to the subgroups H of L#/L on which the
# discriminant form vanishes: every class of H has integral norm and every two classes of H pair
# integrally. Such subgroups are grown breadth first from {0}, one cyclic extension at a time.
# A subgroup is a bit mask over the element indices of L#/L.


def _to_bool(mask: int, N: int) -> np.ndarray:
    raw = np.frombuffer(mask.to_bytes((N + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:N].astype(bool)


def _from_bool(sel: np.ndarray) -> int:
    return int.from_bytes(np.packbits(sel, bitorder="little").tobytes(), "little")


def _from_indices(idx: np.ndarray, N: int) -> int:
    sel = np.zeros(N, dtype=bool)
    sel[idx] = True
    return _from_bool(sel)


def _radix(factors: np.ndarray) -> np.ndarray:
    # Mixed-radix place values of the element numbering
    return np.cumprod(np.concatenate(([1], factors)).astype(np.int64))[:-1]


class _Structure(NamedTuple):
    # Plain arrays and ints, so the structure pickles for process workers
    order: int
    add: np.ndarray  # add[i, j] = index of element i + element j
    isotropic: int  # classes of integral norm
    perp: tuple[int, ...]  # per class, the classes pairing integrally with it


class _Subgroup(NamedTuple):
    mask: int
    generators: tuple[int, ...]
    perp: int  # classes pairing integrally with all of the subgroup


class _Job(NamedTuple):
    structure: _Structure
    subgroups: tuple[_Subgroup, ...]


def _structure(Q: QuotientGroup) -> tuple[_Structure, np.ndarray, int]:
    """Addition table and form masks of L#/L, plus the exact form values a B a^T * den."""
    N = Q.order
    factors = np.array(Q.invariant_factors, dtype=np.int64)
    weights = _radix(factors)
    E = np.array([Q.element(i) for i in range(N)], dtype=np.int64).reshape(N, len(factors))

    add = np.empty((N, N), dtype=np.int32)
    for start in range(0, N, 64):
        block = (E[start:start + 64, None, :] + E[None, :, :]) % factors
        add[start:start + 64] = block @ weights

    B = discriminant_matrix(Q)
    den = B.denominator()
    Bi = np.array([[int(x * den) for x in row] for row in B.entries], dtype=np.int64).reshape(len(factors), len(factors))
    EB = E @ Bi
    forms = np.einsum("ij,ij->i", EB, E)
    perp = []
    for start in range(0, N, 256):
        P = (EB[start:start + 256] @ E.T) % den
        perp.extend(_from_bool(row == 0) for row in P)
    isotropic = _from_bool(forms % den == 0)
    return _Structure(N, add, isotropic, tuple(perp)), forms, den


def _closure(s: _Structure, elems: np.ndarray, H: int, c: int) -> tuple[int, int]:
    # <H, c> as a mask, and its index over H
    K = H
    k = 1
    x = c
    while not (H >> x) & 1:
        K |= _from_indices(s.add[elems, x], s.order)
        k += 1
        x = int(s.add[x, c])
    return K, k


def _order_mod(s: _Structure, H: int, e: int) -> int:
    k = 1
    x = e
    while not (H >> x) & 1:
        x = int(s.add[x, e])
        k += 1
    return k


def _extend(job: _Job) -> list[_Subgroup]:
    s = job.structure
    out: list[_Subgroup] = []
    for sub in job.subgroups:
        elems = np.flatnonzero(_to_bool(sub.mask, s.order))
        todo = sub.perp & s.isotropic & ~sub.mask
        while todo:
            c = (todo & -todo).bit_length() - 1
            K, k = _closure(s, elems, sub.mask, c)
            # Elements generating the same extension need not be tried again
            new = K & ~sub.mask
            for e in np.flatnonzero(_to_bool(new, s.order)).tolist():
                if _order_mod(s, sub.mask, e) == k:
                    todo &= ~(1 << e)
            out.append(_Subgroup(K, sub.generators + (c,), sub.perp & s.perp[c]))
    return out


# Census

@dataclass(frozen=True, slots=True)
class CensusMember:
    mask: int  # the subgroup H of L#/L
    generators: tuple[int, ...]  # class indices generating H
    order: int  # |H|, the index of L in the member


@dataclass(slots=True)
class CensusBucket:
    fingerprint: Fingerprint
    representative: CensusMember
    count: int = 0
    name: str | None = None
    justification: str = "fingerprint"  # how members were matched to the representative
    full_fingerprint: Fingerprint | None = None
    members: list[CensusMember] = field(default_factory=list, repr=False)

    def add(self, member: CensusMember) -> None:
        self.members.append(member)
        self.count += 1

    def to_dict(self) -> dict[str, Any]:
        data = {
            "name": self.name,
            "count": self.count,
            "fingerprint": (self.full_fingerprint or self.fingerprint).to_dict(),
            "justification": self.justification,
        }
        return data


class _ClassData(NamedTuple):
    # Per-class short vector data of L#, in dual-basis coordinates
    levels: tuple[Fraction, ...]
    counts: np.ndarray  # counts[class, level]
    short: np.ndarray  # vectors of norm <= 2
    short_classes: np.ndarray
    gram: np.ndarray  # integer multiple of the Gram matrix of L# in its dual basis


@dataclass
class OverlatticeCensus:
    base: Lattice
    group: QuotientGroup
    members: list[CensusMember]
    buckets: list[CensusBucket] = field(default_factory=list)
    theta_bound: int = CensusConfig().theta_bound
    _even: int = field(default=0, repr=False)
    _data: _ClassData | None = field(default=None, repr=False)
    _profiles: dict[int, tuple[tuple[int, int], ...]] = field(default_factory=dict, repr=False)

    @property
    def total(self) -> int:
        return len(self.members)

    @property
    def classified(self) -> bool:
        return bool(self.buckets)

    def elements(self, member: CensusMember) -> list[int]:
        return np.flatnonzero(_to_bool(member.mask, self.group.order)).tolist()

    def lattice(self, member: CensusMember, name: str | None = None) -> Lattice:
        Q = self.group
        glue = [self.base.vector(Q.representative(Q.element(g))) for g in member.generators]
        return adjoin(self.base, glue, name) if glue else self.base.renamed(name or self.base.name)

    def __iter__(self) -> Iterator[tuple[CensusMember, Lattice]]:
        for m in self.members:
            yield m, self.lattice(m)

    def determinant(self, member: CensusMember) -> Fraction:
        return self.base.determinant / (member.order * member.order)

    def parity(self, member: CensusMember) -> str:
        return "even" if self.base.is_even() and not member.mask & ~self._even else "odd"

    def _class_data(self, perf: PerformanceConfig) -> _ClassData:
        if self._data is not None:
            return self._data
        log = logging.getLogger("latnab")
        L, Q = self.base, self.group
        Ginv = inverse(L.gram)
        bound = max(self.theta_bound, 2)
        found = enumerate_vectors(Ginv, bound, perf=perf)
        if found.overflow:
            raise QuotientTooLargeError(f"More than {perf.vector_budget} dual vectors of norm <= {bound}.")
        vs = found.all_vectors()
        levels = tuple(sorted({m for m, _ in vs}))
        W = np.array([w for _, w in vs], dtype=np.int64).reshape(len(vs), L.dim)
        Tm = np.array(Q.transform, dtype=np.int64).reshape(len(Q.invariant_factors), L.dim).T
        factors = np.array(Q.invariant_factors, dtype=np.int64)
        weights = _radix(factors)
        classes = ((W @ Tm) % factors) @ weights if len(factors) else np.zeros(len(vs), dtype=np.int64)
        pos = {m: i for i, m in enumerate(levels)}
        counts = np.zeros((Q.order, len(levels)), dtype=np.int64)
        np.add.at(counts, (classes, np.array([pos[m] for m, _ in vs], dtype=np.int64)), 1)
        short = np.array([m <= 2 for m, _ in vs], dtype=bool)
        den = Ginv.denominator()
        gram = np.array([[int(x * den) for x in row] for row in Ginv.entries], dtype=np.int64)
        log.debug(f"{len(vs)} dual vectors of norm <= {bound} over {Q.order} classes")
        self._data = _ClassData(levels, counts, W[short], classes[short], gram)
        return self._data

    def fingerprint(self, member: CensusMember, perf: PerformanceConfig = PerformanceConfig()) -> Fingerprint:
        """Fingerprint of a member with the theta prefix to theta_bound, from per-class counts."""
        data = self._class_data(perf)
        sel = _to_bool(member.mask, self.group.order)
        theta = data.counts[sel].sum(axis=0)
        prefix = ((Fraction(0), 1),) + tuple(
            (m, int(c)) for m, c in zip(data.levels, theta.tolist()) if c and m <= self.theta_bound)
        rows = sel[data.short_classes]
        key = _from_bool(rows)
        profile = self._profiles.get(key)
        if profile is None:
            profile = root_profile_of([tuple(v) for v in data.short[rows].tolist()], data.gram)
            self._profiles[key] = profile
        return Fingerprint(
            dim=self.base.dim,
            determinant=self.determinant(member),
            parity=self.parity(member),
            theta_prefix=prefix,
            root_profile=profile,
        )

    def class_minimum(self, index: int, perf: PerformanceConfig = PerformanceConfig()) -> Fraction | None:
        # Leader norm of a class, None when it lies above the short vector bound
        if index == 0:
            return Fraction(0)
        data = self._class_data(perf)
        hit = np.flatnonzero(data.counts[index])
        return data.levels[int(hit[0])] if len(hit) else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "base": self.base.name,
            "total": self.total,
            "buckets": [b.to_dict() for b in self.buckets],
        }


def integral_overlattices(
    L: Lattice,
    cfg: QuotientConfig = QuotientConfig(),
    perf: PerformanceConfig = PerformanceConfig(),
    census: CensusConfig = CensusConfig(),
) -> OverlatticeCensus:
    """Every integral lattice between L and L#, one per subgroup of L#/L, L itself included."""
    log = logging.getLogger("latnab")
    if not L.is_integral():
        raise NotIntegralError(f"{L.name or 'Lattice'} is not integral.")
    Q = quotient_group(L)
    if Q.order > cfg.max_order:
        raise QuotientTooLargeError(f"L#/L has order {Q.order}, above the configured bound {cfg.max_order}.")
    s, forms, den = _structure(Q)
    even = _from_bool(forms % (2 * den) == 0)

    root = _Subgroup(1, (), (1 << Q.order) - 1)
    found: dict[int, _Subgroup] = {root.mask: root}
    frontier = [root]
    level = 0
    while frontier:
        parts = max(1, min(len(frontier), perf.threads * 4)) if perf.threads > 1 else 1
        jobs = [_Job(s, tuple(frontier[i::parts])) for i in range(parts)]
        nxt: dict[int, _Subgroup] = {}
        for chunk in run_partitioned(_extend, jobs, perf.threads, perf.workers):
            for sub in chunk:
                if sub.mask in found:
                    continue
                # Keep the smallest generator tuple, whatever the schedule
                cur = nxt.get(sub.mask)
                if cur is None or sub.generators < cur.generators:
                    nxt[sub.mask] = sub
        found.update(nxt)
        frontier = [nxt[k] for k in sorted(nxt)]
        level += 1
        log.info(f"Census of {L.name or 'lattice'}: {len(frontier)} new subgroups at depth {level}, {len(found)} in total")

    members = [CensusMember(sub.mask, sub.generators, sub.mask.bit_count()) for sub in found.values()]
    members.sort(key=lambda m: (m.order, m.mask))
    return OverlatticeCensus(L, Q, members, theta_bound=census.theta_bound, _even=even)


# Classification

def _isometric(A: Lattice, B: Lattice, perf: PerformanceConfig) -> bool:
    try:
        return find_isometry(A, B, perf) is not None
    except DomainError as e:
        raise IndeterminateIsometryError(f"Isometry of {A.name or 'lattice'} and {B.name or 'lattice'} not decided: {e}") from e


def classify_census(
    census: OverlatticeCensus,
    policy: IsometryPolicy | None = None,
    references: Mapping[str, Lattice] | None = None,
    cfg: IsometryConfig = IsometryConfig(),
    perf: PerformanceConfig = PerformanceConfig(),
    full_fingerprints: bool = True,
) -> OverlatticeCensus:
    """Bucket the members by isometry class and name the buckets after matching references.

    Under the fast policy a bucket is a fingerprint class. Under the strict policy every member is
    also checked against the representatives of its fingerprint class by exact isometry search.
    """
    log = logging.getLogger("latnab")
    policy = (policy or cfg.policy).resolve(census.base.dim, cfg.strict_max_dim)
    strict = policy is IsometryPolicy.STRICT
    by_key: dict[tuple, list[tuple[CensusBucket, Lattice | None]]] = {}
    for member in census.members:
        fp = census.fingerprint(member, perf)
        slot = by_key.setdefault(fp.key(), [])
        if not strict:
            if not slot:
                slot.append((CensusBucket(fp, member), None))
            slot[0][0].add(member)
            continue
        M = census.lattice(member)
        for bucket, rep in slot:
            if rep is not None and _isometric(M, rep, perf):
                bucket.add(member)
                break
        else:
            fresh = CensusBucket(fp, member, justification="isometry")
            fresh.add(member)
            slot.append((fresh, M))

    buckets = [b for slot in by_key.values() for b, _ in slot]
    buckets.sort(key=lambda b: (b.representative.order, b.representative.mask))
    reps = {id(b): rep for slot in by_key.values() for b, rep in slot}

    if references:
        local = IsometryConfig(census.theta_bound, cfg.strict_max_dim, cfg.policy)
        for name, ref in references.items():
            key = fingerprint(ref, local, perf, decomposition=False).key()
            matches = [b for b, _ in by_key.get(key, [])]
            if strict:
                matches = [b for b in matches if _isometric(ref, reps[id(b)] or census.lattice(b.representative), perf)]
            if len(matches) != 1:
                log.warning(f"Reference {name} matches {len(matches)} census buckets, left unnamed")
                continue
            if matches[0].name is not None:
                log.warning(f"Buckets named {matches[0].name} and {name} share a fingerprint")
            matches[0].name = name

    if full_fingerprints:
        for b in buckets:
            b.full_fingerprint = fingerprint(census.lattice(b.representative), cfg, perf, decomposition=False)

    if sum(b.count for b in buckets) != census.total:
        raise RuntimeError("Bucket counts do not add up to the census size, this should not happen.")
    census.buckets = buckets
    summary = ", ".join(f"{b.name or '?'}:{b.count}" for b in buckets)
    log.info(f"Census of {census.base.name or 'lattice'} ({census.total}, {policy.value}): {summary}")
    return census


def bucket_counts(census: OverlatticeCensus) -> Counter[str]:
    # Named bucket sizes; unnamed buckets are keyed by their determinant and theta prefix
    out: Counter[str] = Counter()
    for b in census.buckets:
        if b.name is not None:
            out[b.name] += b.count
        else:
            theta = " ".join(f"{format_rational(k)}:{v}" for k, v in b.fingerprint.theta_prefix)
            out[f"det {format_rational(b.fingerprint.determinant)} theta {theta}"] += b.count
    return out
