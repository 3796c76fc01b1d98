from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from latnab.catalog import catalog
from latnab.config import DesignConfig, PerformanceConfig
from latnab.designs import (
    configuration, design_strength, distance_set, inner_product_histogram, is_strongly_perfect,
    moment_constant, tensor_moment,
)
from latnab.errors import DomainError, PairwiseBudgetError
from latnab.lattice import adjoin
from latnab.shells import shell, theta


def test_moment_constants():
    assert moment_constant(0, 4) == 1
    assert moment_constant(2, 4) == Fraction(1, 4)
    assert moment_constant(4, 8) == Fraction(3, 80)
    assert moment_constant(6, 2) == Fraction(15, 48)
    assert moment_constant(3, 5) == 0


@pytest.mark.parametrize("name,m,row", [
    ("E8", 2, (8, 240, 4, 7)),
    ("Lambda4", 4, (4, 24, 4, 5)),
    ("Z4", 1, (4, 8, 2, 3)),
    ("Lambda2", 4, (2, 6, 3, 5)),
    ("D4", 2, (4, 24, 4, 5)),
])
def test_configurations(name, m, row):
    report = configuration(catalog(name), m)
    assert report.row() == row
    assert report.method == "pairwise"


def test_single_pair_shells_have_unbounded_strength():
    L = catalog("Lambda2")
    M = adjoin(L, [L.e(1) * Fraction(1, 2)])
    report = configuration(M, 1)
    assert report.row() == (1, 2, 1, "unbounded")
    assert report.table_row() == "(1, 2, 1, -)"


def test_distance_set_and_histogram(D4):
    X = shell(D4, 2)
    assert distance_set(X) == (Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2))
    hist, den = inner_product_histogram(X)
    assert den == 1
    assert sum(hist.values()) == 24 * 24
    assert hist[2] == 24
    assert hist[-2] == 24


def test_tensor_method_agrees_with_pairwise():
    for name, m in (("E8", 2), ("Lambda4", 8), ("Z4", 3), ("A2", 6)):
        X = shell(catalog(name), m)
        assert design_strength(X, method="tensor-moment") == design_strength(X, method="pairwise")


@pytest.mark.slow
@pytest.mark.parametrize("name,max_norm", [("A2", 30), ("Z3", 12), ("D4", 12), ("Lambda4", 12), ("E6", 6), ("E8", 6)])
def test_tensor_and_pairwise_agree_on_every_small_shell(name, max_norm):
    L = catalog(name)
    series = theta(L, max_norm)
    checked = 0
    for m in series.norms():
        if m == 0 or series[m] > 10_000:
            continue
        X = shell(L, m)
        assert X.count == series[m]
        assert design_strength(X, method="tensor-moment") == design_strength(X, method="pairwise"), m
        checked += 1
    assert checked > 0


def test_tensor_moment_matches_the_pair_sum(rng):
    U = np.array([[rng.randint(-3, 3) for _ in range(3)] for _ in range(7)], dtype=np.int64)
    weights = [2, 3, 5]
    for k in (1, 2, 3, 4):
        direct = 0
        for x, y in product(U.tolist(), repeat=2):
            direct += sum(w * a * b for w, a, b in zip(weights, x, y)) ** k
        assert tensor_moment(U, weights, k) == direct


def test_strength_cap(E8):
    assert design_strength(shell(E8, 2), t_cap=5) == ">=5"


def test_budgets(E8):
    small = PerformanceConfig(pairwise_budget=100)
    report = configuration(E8, 2, DesignConfig(tensor_fallback=False), small)
    assert report.method == "none"
    assert report.row() == (8, 240, "exceeded", "not-computed")

    report = configuration(E8, 2, DesignConfig(), small)
    assert report.method == "tensor-moment"
    assert report.row() == (8, 240, "exceeded", 7)

    report = configuration(E8, 2, perf=PerformanceConfig(vector_budget=50))
    assert report.row() == (8, 240, "exceeded", "not-computed")

    with pytest.raises(PairwiseBudgetError):
        inner_product_histogram(shell(E8, 2), small)


def test_empty_shell(Lambda4):
    with pytest.raises(DomainError):
        configuration(Lambda4, 5)


def test_strongly_perfect():
    assert is_strongly_perfect(catalog("E8"))
    assert is_strongly_perfect(catalog("D4"))
    assert not is_strongly_perfect(catalog("Z2"))
    assert not is_strongly_perfect(catalog("A1^4"))


def test_threaded_histogram(E8):
    X = shell(E8, 4)
    serial, _ = inner_product_histogram(X)
    threaded, _ = inner_product_histogram(X, PerformanceConfig(threads=4))
    assert serial == threaded
    assert serial[4] == 2160
