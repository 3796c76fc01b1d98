import logging

from collections import Counter
from fractions import Fraction
from itertools import product
from math import isqrt

import pytest
import sympy

from latnab.cache import ThetaCache
from latnab.catalog import catalog
from latnab.config import PerformanceConfig
from latnab.errors import DomainError
from latnab.exact import RationalMatrix
from latnab.shells import (
    enumerate_vectors, kissing, minimal_shell, minimum, shell, short_vectors, theta, theta_product,
)


def _random_gram(rng, n):
    while True:
        B = sympy.Matrix([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        if B.det() != 0:
            G = B * B.T
            return [[int(G[i, j]) for j in range(n)] for i in range(n)]


def _box_oracle(G, bound, center=None):
    # Brute force over a box wide enough to hold every solution of norm(x + c) <= bound
    n = len(G)
    c = [Fraction(0)] * n if center is None else list(center)
    Ginv = sympy.Matrix(G).inv()
    radius = [isqrt(int(bound * Ginv[i, i])) + 2 for i in range(n)]
    found = []
    for x in product(*[range(-r, r + 1) for r in radius]):
        if center is None and not any(x):
            continue
        y = [a + b for a, b in zip(x, c)]
        norm = sum(y[i] * G[i][j] * y[j] for i in range(n) for j in range(n))
        if norm <= bound:
            found.append((Fraction(norm), tuple(x)))
    return sorted(found)


def test_enumeration_matches_box_oracle(rng):
    for n in (2, 3):
        for _ in range(4):
            G = _random_gram(rng, n)
            expected = _box_oracle(G, 10)
            got = enumerate_vectors(RationalMatrix.of(G), 10)
            assert got.halved
            assert not got.overflow
            assert got.all_vectors() == expected
            assert {k: v for k, v in got.counts.items() if v} == dict(Counter(norm for norm, _ in expected))


def test_fifty_random_grams_match_box_oracle(rng):
    checked = 0
    for _ in range(2000):
        if checked == 50:
            break
        n = 1 + checked % 4
        G = _random_gram(rng, n)
        bound = 8 if n < 4 else 4
        # Keep the oracle's box small
        Ginv = sympy.Matrix(G).inv()
        if any(bound * Ginv[i, i] > (36 if n < 4 else 16) for i in range(n)):
            continue
        expected = _box_oracle(G, bound)
        got = enumerate_vectors(RationalMatrix.of(G), bound)
        assert got.all_vectors() == expected, G
        assert sum(got.counts.values()) == len(expected)
        checked += 1
    assert checked == 50


def test_centered_enumeration_matches_box_oracle(rng):
    G = _random_gram(rng, 3)
    center = (Fraction(1, 2), Fraction(-1, 3), Fraction(0))
    expected = _box_oracle(G, 8, center)
    got = enumerate_vectors(RationalMatrix.of(G), 8, center=center)
    assert not got.halved
    assert got.all_vectors() == expected


def test_enumeration_with_rational_gram():
    G = RationalMatrix.of([["1/2", "1/4"], ["1/4", "3/2"]])
    rows = [[Fraction(1, 2), Fraction(1, 4)], [Fraction(1, 4), Fraction(3, 2)]]
    got = enumerate_vectors(G, 2)
    assert got.all_vectors() == _box_oracle(rows, 2)


def test_threads_give_the_same_counts(E8):
    serial = enumerate_vectors(E8.gram, 4, collect=False)
    threaded = enumerate_vectors(E8.gram, 4, collect=False, perf=PerformanceConfig(threads=3))
    assert serial.counts == threaded.counts


def test_theta_series():
    assert theta(catalog("Z4"), 3).to_dict() == {"0": 1, "1": 8, "2": 24, "3": 32}
    t = theta(catalog("E8"), 6)
    assert (t[2], t[4], t[6]) == (240, 2160, 6720)
    assert t[1] == t[3] == t[5] == 0
    assert str(theta(catalog("A2"), 2)) == "1 + 6 q^2"


def test_theta_of_an_orthogonal_sum():
    t1 = theta(catalog("Z1"), 5)
    assert theta_product(t1, t1) == theta(catalog("Z2"), 5)
    assert theta_product(t1, theta(catalog("Z1"), 3)).max_norm == 3


def test_shells_and_minimal_vectors(Lambda4, Lambda8):
    s = shell(Lambda4, 4)
    assert s.count == len(s) == 24
    assert s.materialized
    vectors = s.vectors()
    assert len(set(vectors)) == 24
    assert all(Lambda4.norm(v) == 4 for v in vectors)
    assert shell(Lambda4, 5).count == 0

    assert minimum(Lambda8) == 4
    assert kissing(Lambda8) == 240
    assert minimal_shell(catalog("A2")).count == 6


def test_shell_needs_positive_norm(D4):
    with pytest.raises(DomainError):
        shell(D4, 0)


def test_vector_budget_sends_shells_to_the_counting_sink(E8):
    s = shell(E8, 2, PerformanceConfig(vector_budget=10))
    assert s.count == 240
    assert not s.materialized
    with pytest.raises(DomainError):
        s.vectors()
    with pytest.raises(DomainError):
        short_vectors(E8, 2, PerformanceConfig(vector_budget=10))


def test_short_vectors(D4):
    found = short_vectors(D4, 2)
    assert len(found) == 24
    assert all(norm == 2 for norm, _ in found)


def test_theta_uses_the_cache(caplog, D4):
    cache = ThetaCache(None)
    cache.load()
    first = theta(D4, 6, cache=cache)
    assert len(cache) == 1

    caplog.set_level(logging.DEBUG, logger="latnab")
    second = theta(D4, 4, cache=cache)
    assert "Theta cache hit" in caplog.text
    assert second == first.truncate(4)
