from __future__ import annotations

import logging

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, prod
from typing import Any, Literal

import numpy as np

from latnab.config.classes import DesignConfig, PerformanceConfig
from latnab.errors import DomainError, PairwiseBudgetError
from latnab.exact import IntVector, common_denominator, format_rational, ldl, rank, to_rational, RationalLike
from latnab.lattice import Lattice
from latnab.shells import Shell, minimal_shell, shell
from latnab.threadsafe import run_partitioned

# Design strength by the moment criterion. A finite antipodal set X of norm m spanning a space of
# dimension d is a spherical t-design iff for every k <= t
#       sum_{x,y in X} (x,y)^k = c_k n^2 m^k,
#       c_k = (k-1)!! / (d (d+2) ... (d+k-2)) for even k, 0 for odd k.
# Both sides are rational, so the test is exact. The pairwise method gets the left side from the
# histogram of all inner products. The tensor method writes (x,y) = sum_i q_i u_i(x) u_i(y) with
# the square completion of the Gram matrix and uses
#       sum_{x,y} (x,y)^k = sum_{|a|=k} k!/a! q^a (sum_x u(x)^a)^2.

Strength = int | Literal["unbounded", "not-computed"] | str

_EXACT_FLOAT = 2 ** 52
_INT64_SAFE = 2 ** 62


def moment_constant(k: int, d: int) -> Fraction:
    if k % 2:
        return Fraction(0)
    num = prod(range(k - 1, 0, -2)) if k > 0 else 1
    den = prod(d + 2 * j for j in range(k // 2))
    return Fraction(num, den)


@dataclass(slots=True)
class DesignReport:
    norm: Fraction
    d: int
    n: int
    s: int | Literal["exceeded"]
    t: Strength
    method: Literal["pairwise", "tensor-moment", "none"]
    distances: tuple[Fraction, ...] = field(default=(), repr=False)  # (x,y)/m for x != y

    def row(self) -> tuple[int, int, int | str, int | str]:
        return (self.d, self.n, self.s, self.t)

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": format_rational(self.norm),
            "d": self.d,
            "n": self.n,
            "s": self.s,
            "t": self.t,
            "method": self.method,
            "distances": [format_rational(x) for x in self.distances],
            "inner_products": [format_rational(x * self.norm) for x in self.distances],
        }

    def table_row(self) -> str:
        # d = 1 shells print '-' for their strength
        t = "-" if self.t == "unbounded" else self.t
        return f"({self.d}, {self.n}, {self.s}, {t})"


def _require(X: Shell) -> list[IntVector]:
    if X.count == 0:
        raise DomainError(f"Shell of norm {format_rational(X.norm)} is empty.")
    if X.coefficients is None:
        raise PairwiseBudgetError(f"Shell of norm {format_rational(X.norm)} has {X.count} vectors, above the vector budget.")
    return list(X.coefficients)


def span_dimension(X: Shell) -> int:
    vs = _require(X)
    n = X.lattice.dim
    # A prefix usually spans already
    head = rank(vs[: 4 * n])
    return head if head == n else rank(vs)


# Pairwise method

def _block_histogram(job: tuple[np.ndarray, np.ndarray, np.ndarray, int, bool]) -> np.ndarray:
    rows, G, C, M, use_float = job
    if use_float:
        P = np.rint((rows.astype(np.float64) @ G.astype(np.float64)) @ C.T.astype(np.float64)).astype(np.int64)
    else:
        P = (rows @ G) @ C.T
    return np.bincount((P + M).ravel(), minlength=2 * M + 1)


def inner_product_histogram(X: Shell, perf: PerformanceConfig = PerformanceConfig()) -> tuple[Counter[int], int]:
    """Counts of den * (x, y) over all ordered pairs of X, with den the Gram denominator.

    Only the half representatives are multiplied against the full set; the other half follows from
    (-x, y) = -(x, y).
    """
    vs = _require(X)
    if X.count > perf.pairwise_budget:
        raise PairwiseBudgetError(f"Shell has {X.count} vectors, above the pairwise budget {perf.pairwise_budget}.")
    rows_g, den = X.lattice.integer_gram
    G = np.array(rows_g, dtype=np.int64)
    C = np.array(vs, dtype=np.int64)
    half = C[0::2]
    M = int(X.norm * den)
    cmax = int(np.abs(C).max())
    gmax = int(np.abs(G).max())
    n = X.lattice.dim
    worst = n * n * cmax * gmax * cmax
    if worst >= _INT64_SAFE:
        raise PairwiseBudgetError("Coefficients too large for the pairwise kernel.")
    use_float = worst < _EXACT_FLOAT
    block = max(1, 4_000_000 // max(1, len(vs)))
    jobs = [(half[i:i + block], G, C, M, use_float) for i in range(0, len(half), block)]
    hists = run_partitioned(_block_histogram, jobs, perf.threads, "thread")
    total = np.sum(hists, axis=0)
    out: Counter[int] = Counter()
    for idx in np.flatnonzero(total).tolist():
        v = idx - M
        c = int(total[idx])
        out[v] += c
        out[-v] += c
    return out, den


def distance_set(X: Shell, perf: PerformanceConfig = PerformanceConfig()) -> tuple[Fraction, ...]:
    """Inner products (x, y)/m of distinct points, sorted."""
    hist, den = inner_product_histogram(X, perf)
    M = int(X.norm * den)
    return tuple(sorted(Fraction(v, M) for v in hist if v != M))


def _strength_from_moments(moment, n: int, d: int, m_scaled: int, t_cap: int) -> Strength:
    log = logging.getLogger("latnab")
    for k in range(1, t_cap + 1):
        lhs = moment(k)
        rhs = moment_constant(k, d) * n * n * m_scaled ** k
        if lhs != rhs:
            log.debug(f"Moment {k} fails: {lhs} != {rhs}")
            return k - 1
    return f">={t_cap}"


def _pairwise_strength(hist: Counter[int], n: int, d: int, m_scaled: int, t_cap: int) -> Strength:
    def moment(k: int) -> int:
        s = sum(c * v ** k for v, c in hist.items())
        if k % 2 and s != 0:
            raise RuntimeError("Odd moment of an antipodal shell is not zero, this should not happen.")
        return s
    return _strength_from_moments(moment, n, d, m_scaled, t_cap)


# Tensor-moment method

def _u_coordinates(X: Shell) -> tuple[np.ndarray, list[int], int]:
    # Integer U = D u(x) and weights Q_i = P q_i, so that P D^2 (x, y) = sum_i Q_i U_i(x) U_i(y)
    q, r = ldl(X.lattice.gram)
    n = len(q)
    D = common_denominator(r[i][j] for i in range(n) for j in range(i + 1, n))
    P = common_denominator(q)
    vs = X.coefficients or ()
    U = [[int(D * (x[i] + sum((r[i][j] * x[j] for j in range(i + 1, n)), Fraction(0)))) for i in range(n)] for x in vs]
    umax = max((abs(a) for row in U for a in row), default=0)
    dtype = np.int64 if umax ** 2 * max(1, len(vs)) < _INT64_SAFE else object
    return np.array(U, dtype=dtype), [int(x * P) for x in q], P * D * D


def tensor_moment(U: np.ndarray, weights: list[int], k: int) -> int:
    """sum_{x,y} <x,y>^k for <x,y> = sum_i w_i U_i(x) U_i(y), without forming pairs."""
    n, d = U.shape
    obj = U.dtype == object or int(np.abs(U).max(initial=0)) ** k * max(1, n) >= _INT64_SAFE
    cols = [U[:, i].astype(object) if obj else U[:, i] for i in range(d)]
    total = 0

    def dfs(i: int, left: int, acc: np.ndarray | None, coef: int) -> None:
        # coef = multinomial(k; a_0..a_{i-1}) * w^a over the exponents chosen so far
        nonlocal total
        if left == 0:
            s = int(acc.sum()) if acc is not None else n
            total += coef * s * s
            return
        if i == d - 1:
            p = cols[i] ** left if acc is None else acc * cols[i] ** left
            s = int(p.sum())
            total += coef * weights[i] ** left * s * s
            return
        cur = acc
        for e in range(0, left + 1):
            if e == 1:
                cur = cols[i] if acc is None else acc * cols[i]
            elif e > 1:
                cur = cur * cols[i]
            dfs(i + 1, left - e, cur, coef * comb(left, e) * weights[i] ** e)

    dfs(0, k, None, 1)
    return total


def _tensor_strength(X: Shell, d: int, t_cap: int) -> Strength:
    U, weights, scale = _u_coordinates(X)
    m_scaled = X.norm * scale
    if m_scaled.denominator != 1:
        raise RuntimeError("Scaled shell norm is not an integer, this should not happen.")

    def moment(k: int) -> int:
        # Odd moments of an antipodal set vanish term by term
        return 0 if k % 2 else tensor_moment(U, weights, k)
    return _strength_from_moments(moment, X.count, d, int(m_scaled), t_cap)


def design_strength(
    X: Shell,
    t_cap: int = DesignConfig().t_cap,
    method: Literal["pairwise", "tensor-moment"] = "pairwise",
    perf: PerformanceConfig = PerformanceConfig(),
) -> Strength:
    """Largest t <= t_cap for which X is a spherical t-design, '>=t_cap' when every moment passes,
    'unbounded' for a single antipodal pair."""
    d = span_dimension(X)
    if d == 1:
        return "unbounded"
    if method == "tensor-moment":
        return _tensor_strength(X, d, t_cap)
    hist, den = inner_product_histogram(X, perf)
    return _pairwise_strength(hist, X.count, d, int(X.norm * den), t_cap)


def configuration(
    L: Lattice,
    m: RationalLike,
    cfg: DesignConfig = DesignConfig(),
    perf: PerformanceConfig = PerformanceConfig(),
) -> DesignReport:
    """The (d, n, s, t) configuration of the shell of norm m."""
    log = logging.getLogger("latnab")
    m = to_rational(m)
    X = shell(L, m, perf)
    if X.count == 0:
        raise DomainError(f"{L.name or 'Lattice'} has no vectors of norm {format_rational(m)}.")
    if not X.materialized:
        return DesignReport(m, L.dim, X.count, "exceeded", "not-computed", "none")
    d = span_dimension(X)

    if X.count <= perf.pairwise_budget:
        hist, den = inner_product_histogram(X, perf)
        M = int(m * den)
        distances = tuple(sorted(Fraction(v, M) for v in hist if v != M))
        t: Strength = "unbounded" if d == 1 else _pairwise_strength(hist, X.count, d, M, cfg.t_cap)
        report = DesignReport(m, d, X.count, len(distances), t, "pairwise", distances)
    elif cfg.tensor_fallback and X.count <= cfg.tensor_budget:
        log.info(f"Shell of norm {format_rational(m)} has {X.count} vectors, using the tensor-moment method")
        t = "unbounded" if d == 1 else _tensor_strength(X, d, cfg.t_cap)
        report = DesignReport(m, d, X.count, "exceeded", t, "tensor-moment")
    else:
        report = DesignReport(m, d, X.count, "exceeded", "not-computed", "none")
    log.debug(f"{L.name or 'lattice'} m={format_rational(m)}: {report.table_row()} by {report.method}")
    return report


def is_strongly_perfect(L: Lattice, perf: PerformanceConfig = PerformanceConfig()) -> bool:
    # Minimal shell is a spherical 4-design
    X = minimal_shell(L, perf)
    t = design_strength(X, t_cap=5, perf=perf)
    return t == "unbounded" or (isinstance(t, int) and t >= 4) or t == ">=5"
