from __future__ import annotations

import logging

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterable, NamedTuple, Sequence

from latnab.cache import ThetaCache
from latnab.config.classes import PerformanceConfig
from latnab.errors import DomainError
from latnab.exact import IntVector, RationalLike, RationalMatrix, common_denominator, format_rational, ldl, to_rational
from latnab.hasher import lattice_digest
from latnab.lattice import Lattice, LatticeVector
from latnab.threadsafe import run_partitioned

# Fincke-Pohst enumeration in exact integer arithmetic.
#
# With the square completion x G x^T = sum_i q_i (z_i + sum_{j>i} r_ij z_j)^2, z = x + c, every
# quantity is scaled to an integer:
#   T  = common denominator of the centre c       Z_j = T z_j
#   D  = common denominator of the r_ij           W_i = D Z_i + sum_{j>i} (D r_ij) Z_j
#   P  = common denominator of the q_i            Q_i = P q_i
# so that P (DT)^2 * norm(z) = sum_i Q_i W_i^2 and the pruning test at each level is an integer
# comparison. W_i = S x_i + off_i with S = DT, which gives the coordinate range by floor division.


class _Context(NamedTuple):
    # Plain ints only, so a context pickles cheaply for process workers
    n: int
    S: int
    D: int
    T: int
    Q: tuple[int, ...]
    R: tuple[tuple[int, ...], ...]
    shift: tuple[int, ...]
    bound: int
    scale: int
    halve: bool


class _Job(NamedTuple):
    ctx: _Context
    tops: tuple[int, ...]
    keep: frozenset[int] | None
    budget: int


class _Chunk(NamedTuple):
    counts: dict[int, int]
    vectors: dict[int, list[IntVector]]
    stored: int
    overflow: bool


def _context(G: RationalMatrix, bound: Fraction, center: Sequence[Fraction] | None) -> _Context:
    n = G.nrows
    q, r = ldl(G)
    halve = center is None or not any(center)
    c = [Fraction(0)] * n if center is None else [to_rational(x) for x in center]
    T = common_denominator(c)
    D = common_denominator(r[i][j] for i in range(n) for j in range(i + 1, n))
    P = common_denominator(q)
    S = D * T
    scale = P * S * S
    return _Context(
        n=n, S=S, D=D, T=T,
        Q=tuple(int(x * P) for x in q),
        R=tuple(tuple(int(r[i][j] * D) if j > i else 0 for j in range(n)) for i in range(n)),
        shift=tuple(int(x * T) for x in c),
        bound=(bound.numerator * scale) // bound.denominator,
        scale=scale,
        halve=halve,
    )


def _top_values(ctx: _Context) -> list[int]:
    top = ctx.n - 1
    off = ctx.D * ctx.shift[top]
    t = isqrt(ctx.bound // ctx.Q[top])
    lo, hi = -((t + off) // ctx.S), (t - off) // ctx.S
    if ctx.halve:
        lo = max(lo, 1 if ctx.n == 1 else 0)
    return list(range(lo, hi + 1))


def _search(job: _Job) -> _Chunk:
    ctx, keep, budget = job.ctx, job.keep, job.budget
    n, S, D, T, Q, R, shift, bound = ctx.n, ctx.S, ctx.D, ctx.T, ctx.Q, ctx.R, ctx.shift, ctx.bound
    mult = 2 if ctx.halve else 1
    counts: Counter[int] = Counter()
    vectors: dict[int, list[IntVector]] = {}
    stored = 0
    overflow = False

    x = [0] * n
    Z = [0] * n
    rem = [0] * (n + 1)
    zero = [False] * (n + 1)
    cur = [0] * n
    hi = [0] * n
    off = [0] * n
    top = n - 1

    def emit(N: int) -> None:
        nonlocal stored, overflow
        counts[N] += mult
        if keep is not None and N not in keep:
            return
        if stored >= budget:
            overflow = True
            return
        vectors.setdefault(N, []).append(tuple(x))
        stored += 1

    for xt in job.tops:
        W = S * xt + D * shift[top]
        used = Q[top] * W * W
        if used > bound:
            continue
        x[top] = xt
        if n == 1:
            emit(used)
            continue
        Z[top] = T * xt + shift[top]
        rem[top] = bound - used
        zero[top] = ctx.halve and xt == 0

        k = top - 1
        enter = True
        while True:
            if enter:
                o = D * shift[k]
                Rk = R[k]
                for j in range(k + 1, n):
                    o += Rk[j] * Z[j]
                t = isqrt(rem[k + 1] // Q[k])
                lo = -((t + o) // S)
                if zero[k + 1]:
                    lo = max(lo, 1 if k == 0 else 0)
                off[k] = o
                cur[k] = lo
                hi[k] = (t - o) // S
                enter = False
            if cur[k] > hi[k]:
                k += 1
                if k == top:
                    break
                cur[k] += 1
                continue
            xk = cur[k]
            W = S * xk + off[k]
            left = rem[k + 1] - Q[k] * W * W
            x[k] = xk
            if k == 0:
                emit(bound - left)
                cur[0] += 1
                continue
            Z[k] = T * xk + shift[k]
            rem[k] = left
            zero[k] = zero[k + 1] and xk == 0
            k -= 1
            enter = True
        x[top] = 0
    return _Chunk(dict(counts), vectors, stored, overflow)


@dataclass(slots=True)
class Enumeration:
    """Every x with norm(x + center) <= bound, as integer coefficient vectors.

    Without a centre only one of each pair +-x is stored (the one whose last nonzero coordinate is
    positive) and the zero vector is skipped; counts include both signs.
    """
    counts: dict[Fraction, int]
    vectors: dict[Fraction, list[IntVector]]
    halved: bool
    overflow: bool

    def all_vectors(self) -> list[tuple[Fraction, IntVector]]:
        out: list[tuple[Fraction, IntVector]] = []
        for norm, vs in self.vectors.items():
            for v in vs:
                out.append((norm, v))
                if self.halved:
                    out.append((norm, tuple(-a for a in v)))
        out.sort()
        return out


def enumerate_vectors(
    G: RationalMatrix,
    bound: RationalLike,
    center: Sequence[Fraction] | None = None,
    keep: Iterable[Fraction] | None = None,
    collect: bool = True,
    perf: PerformanceConfig = PerformanceConfig(),
) -> Enumeration:
    # keep limits stored vectors to the listed norms; collect=False counts only.
    log = logging.getLogger("latnab")
    bound = to_rational(bound)
    if bound < 0:
        return Enumeration({}, {}, center is None, False)
    ctx = _context(G, bound, center)

    keep_scaled: frozenset[int] | None
    if not collect:
        keep_scaled = frozenset()
    elif keep is None:
        keep_scaled = None
    else:
        keep_scaled = frozenset(int(m * ctx.scale) for m in (to_rational(k) for k in keep)
                                if (m * ctx.scale).denominator == 1)

    tops = _top_values(ctx)
    parts = max(1, min(len(tops), perf.threads * 4)) if perf.threads > 1 else 1
    jobs = [_Job(ctx, tuple(tops[i::parts]), keep_scaled, perf.vector_budget) for i in range(parts)]
    log.debug(f"Enumerating norm <= {format_rational(bound)} in dimension {ctx.n}, {len(tops)} outer values in {parts} parts")
    chunks = run_partitioned(_search, jobs, perf.threads, perf.workers)

    counts: Counter[int] = Counter()
    scaled: dict[int, list[IntVector]] = {}
    stored = 0
    overflow = False
    for chunk in chunks:
        counts.update(chunk.counts)
        stored += chunk.stored
        overflow = overflow or chunk.overflow
        for N, vs in chunk.vectors.items():
            scaled.setdefault(N, []).extend(vs)
    mult = 2 if ctx.halve else 1
    if stored * mult > perf.vector_budget:
        overflow = True
    if overflow:
        log.info(f"Vector budget of {perf.vector_budget} exceeded, counting only")
        scaled = {}
    for vs in scaled.values():
        vs.sort()
    return Enumeration(
        counts={Fraction(N, ctx.scale): c for N, c in sorted(counts.items())},
        vectors={Fraction(N, ctx.scale): vs for N, vs in sorted(scaled.items())},
        halved=ctx.halve,
        overflow=overflow,
    )


# Shells and theta series

@dataclass(slots=True)
class Shell:
    lattice: Lattice
    norm: Fraction
    count: int
    # Sorted +-pairs of basis coefficient vectors; None when the shell went to the counting sink
    coefficients: tuple[IntVector, ...] | None = field(default=None, repr=False)

    @property
    def materialized(self) -> bool:
        return self.coefficients is not None

    def vectors(self) -> list[LatticeVector]:
        if self.coefficients is None:
            raise DomainError(f"Shell of norm {format_rational(self.norm)} has {self.count} vectors, above the vector budget.")
        return [self.lattice.vector(c) for c in self.coefficients]

    def __len__(self) -> int:
        return self.count

    def dump(self) -> str:
        # One vector per line, space separated rationals
        return "".join(" ".join(format_rational(a) for a in v.coords) + "\n" for v in self.vectors())


def _pair_up(halves: list[IntVector]) -> tuple[IntVector, ...]:
    out: list[IntVector] = []
    for v in sorted(halves):
        out.append(v)
        out.append(tuple(-a for a in v))
    return tuple(out)


def shell(L: Lattice, m: RationalLike, perf: PerformanceConfig = PerformanceConfig()) -> Shell:
    """s_m(L): all vectors of L of norm exactly m."""
    m = to_rational(m)
    if m <= 0:
        raise DomainError(f"Shell norm must be positive, got {format_rational(m)}.")
    found = enumerate_vectors(L.gram, m, keep=[m], perf=perf)
    count = found.counts.get(m, 0)
    if found.overflow:
        return Shell(L, m, count, None)
    return Shell(L, m, count, _pair_up(found.vectors.get(m, [])))


@dataclass(frozen=True, slots=True)
class ThetaSeries:
    max_norm: Fraction
    coefficients: dict[Fraction, int]

    def __getitem__(self, norm: RationalLike) -> int:
        return self.coefficients.get(to_rational(norm), 0)

    def norms(self) -> list[Fraction]:
        return sorted(self.coefficients)

    def truncate(self, max_norm: RationalLike) -> ThetaSeries:
        max_norm = to_rational(max_norm)
        return ThetaSeries(max_norm, {k: v for k, v in self.coefficients.items() if k <= max_norm})

    def to_dict(self) -> dict[str, int]:
        return {format_rational(k): v for k, v in sorted(self.coefficients.items())}

    def __str__(self) -> str:
        terms = []
        for k, v in sorted(self.coefficients.items()):
            terms.append(str(v) if k == 0 else f"{v} q^{format_rational(k)}")
        return " + ".join(terms)


def theta(
    L: Lattice,
    max_norm: RationalLike,
    perf: PerformanceConfig = PerformanceConfig(),
    cache: ThetaCache | None = None,
) -> ThetaSeries:
    """Theta coefficients for every norm up to max_norm, from one counting sweep."""
    log = logging.getLogger("latnab")
    max_norm = to_rational(max_norm)
    if max_norm < 0:
        raise DomainError(f"Theta bound must be non-negative, got {format_rational(max_norm)}.")
    digest = lattice_digest(L) if cache is not None else None
    if cache is not None and digest is not None:
        hit = cache.get(digest, max_norm)
        if hit is not None:
            log.debug(f"Theta cache hit for {L.name or digest[:12]} up to {format_rational(max_norm)}")
            return ThetaSeries(max_norm, hit)
    counts = enumerate_vectors(L.gram, max_norm, collect=False, perf=perf).counts
    coefficients = {Fraction(0): 1, **{k: v for k, v in counts.items() if v}}
    log.info(f"Theta of {L.name or 'lattice'} to norm {format_rational(max_norm)}: {sum(coefficients.values())} vectors")
    if cache is not None and digest is not None:
        cache.put(digest, max_norm, coefficients)
    return ThetaSeries(max_norm, coefficients)


def theta_product(t1: ThetaSeries, t2: ThetaSeries) -> ThetaSeries:
    # Theta series of an orthogonal sum, up to the smaller of the two bounds
    bound = min(t1.max_norm, t2.max_norm)
    out: Counter[Fraction] = Counter()
    for a, ca in t1.coefficients.items():
        for b, cb in t2.coefficients.items():
            if a + b <= bound:
                out[a + b] += ca * cb
    return ThetaSeries(bound, dict(sorted(out.items())))


def _minimal_counts(L: Lattice, perf: PerformanceConfig) -> tuple[Fraction, int]:
    bound = min(L.gram[i][i] for i in range(L.dim))
    counts = enumerate_vectors(L.gram, bound, collect=False, perf=perf).counts
    m = min(k for k, v in counts.items() if v)
    return m, counts[m]


def minimum(L: Lattice, perf: PerformanceConfig = PerformanceConfig()) -> Fraction:
    return _minimal_counts(L, perf)[0]


def kissing(L: Lattice, perf: PerformanceConfig = PerformanceConfig()) -> int:
    return _minimal_counts(L, perf)[1]


def minimal_shell(L: Lattice, perf: PerformanceConfig = PerformanceConfig()) -> Shell:
    return shell(L, minimum(L, perf), perf)


def short_vectors(L: Lattice, max_norm: RationalLike, perf: PerformanceConfig = PerformanceConfig()) -> list[tuple[Fraction, IntVector]]:
    # All nonzero vectors of norm <= max_norm with both signs, sorted by (norm, coefficients)
    found = enumerate_vectors(L.gram, max_norm, perf=perf)
    if found.overflow:
        raise DomainError(f"More than {perf.vector_budget} vectors of norm <= {format_rational(to_rational(max_norm))}.")
    return found.all_vectors()
