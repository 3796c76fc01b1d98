from itertools import product
from math import isqrt

import pytest
import sympy

from latnab.catalog import catalog
from latnab.config import IsometryConfig, IsometryPolicy
from latnab.exact import det
from latnab.isometry import (
    IsometryStatus, find_isometry, fingerprint, is_isometric, orthogonal_decomposition, parity, root_profile,
)
from latnab.lattice import from_gram, orthogonal_sum, with_basis


def _reduced_binary_forms(rng, count):
    forms = []
    while len(forms) < count:
        a = rng.randint(1, 4)
        c = rng.randint(a, 5)
        b = rng.randint(-a + 1, a - 1) if a > 1 else 0
        forms.append([[a, b], [b, c]])
    return forms


def _oracle_isometric(G1, G2):
    # Search integer T with T G1 T^T = G2: rows of T are vectors of norm G2[i][i] under G1
    n = len(G1)
    Ginv = sympy.Matrix(G1).inv()
    bound = max(G2[i][i] for i in range(n))
    radius = [isqrt(int(bound * Ginv[i, i])) + 1 for i in range(n)]

    def form(u, v):
        return sum(u[i] * G1[i][j] * v[j] for i in range(n) for j in range(n))

    box = list(product(*[range(-r, r + 1) for r in radius]))
    rows = [[u for u in box if form(u, u) == G2[i][i]] for i in range(n)]
    for T in product(*rows):
        if all(form(T[i], T[j]) == G2[i][j] for i in range(n) for j in range(n)):
            if abs(sympy.Matrix(T).det()) == 1:
                return True
    return False


def test_find_isometry_matches_brute_force(rng):
    forms = _reduced_binary_forms(rng, 8)
    forms += [[[1, 0], [0, 1]], [[2, 1], [1, 2]], [[2, -1], [-1, 2]], [[2, 1], [1, 5]], [[2, -1], [-1, 5]]]
    for G1 in forms:
        for G2 in forms:
            found = find_isometry(from_gram(G1), from_gram(G2))
            assert (found is not None) == _oracle_isometric(G1, G2), (G1, G2)


def test_certificate_preserves_the_gram_matrix(Lambda4):
    other = catalog("sqrt2*D4")
    verdict = is_isometric(Lambda4, other, IsometryPolicy.STRICT)
    assert verdict.status is IsometryStatus.ISOMETRIC
    T = verdict.certificate
    assert T.is_integral()
    assert abs(det(T)) == 1
    assert T @ Lambda4.gram @ T.transpose() == other.gram


def test_isometric_after_a_change_of_basis(rng):
    G = sympy.Matrix([[4, 1, 0], [1, 3, 1], [0, 1, 5]])
    for _ in range(3):
        U = sympy.eye(3)
        for _ in range(6):
            i, j = rng.sample(range(3), 2)
            E = sympy.eye(3)
            E[i, j] = rng.choice([-1, 1])
            U = E * U
        H = U * G * U.T
        L1 = from_gram([[int(x) for x in G.row(i)] for i in range(3)])
        L2 = from_gram([[int(x) for x in H.row(i)] for i in range(3)])
        assert is_isometric(L1, L2, IsometryPolicy.STRICT).isometric


def _random_unimodular(rng, n, steps=5):
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        s = rng.choice([-1, 1])
        U[i] = [a + s * b for a, b in zip(U[i], U[j])]
    if rng.random() < 0.5:
        U[0] = [-a for a in U[0]]
    return U


def test_fingerprint_is_invariant_under_basis_changes(rng):
    cfg = IsometryConfig(theta_bound=4)
    for name in ("A2", "A3", "D4", "A1^3"):
        L = catalog(name)
        expected = fingerprint(L, cfg)
        for _ in range(25):
            U = _random_unimodular(rng, L.dim)
            changed = with_basis(L, U)
            assert changed == L
            got = fingerprint(changed, cfg)
            assert got.key() == expected.key(), (name, U)
            assert got.decomposable == expected.decomposable


def test_fingerprint_fields(D4, E8):
    fp = fingerprint(D4)
    assert fp.dim == 4
    assert fp.determinant == 4
    assert fp.parity == "even"
    assert dict(fp.theta_prefix)[2] == 24
    assert fp.root_profile == ((4, 24),)
    assert fp.decomposable is False
    assert root_profile(E8) == ((8, 240),)
    assert parity(catalog("Z2")) == "odd"
    assert parity(from_gram([["1/2"]])) == "nonintegral"
    assert fingerprint(D4).difference(fingerprint(catalog("Z4"))) == "determinant"


def test_orthogonal_decomposition():
    parts = orthogonal_decomposition(catalog("A1^4"))
    assert len(parts) == 4
    assert all(p.dim == 1 and p.determinant == 2 for p in parts)

    parts = orthogonal_decomposition(orthogonal_sum(catalog("A2"), catalog("D4"), catalog("Z1")))
    assert [p.dim for p in parts] == [1, 2, 4]
    assert [p.determinant for p in parts] == [1, 3, 4]

    assert len(orthogonal_decomposition(catalog("E8"))) == 1


def test_different_fingerprints_decide_quickly():
    verdict = is_isometric(catalog("D16+"), catalog("E8perpE8"), IsometryPolicy.FAST, IsometryConfig(theta_bound=2))
    assert verdict.status is IsometryStatus.NOT_ISOMETRIC
    assert verdict.witness == "root_profile"


def test_same_theta_different_lattices_are_separated_by_roots():
    # Z4 and the sum of Z2 with itself are the same lattice, D4 and A1^4 are not
    assert is_isometric(catalog("Z4"), orthogonal_sum(catalog("Z2"), catalog("Z2"))).isometric
    assert not is_isometric(catalog("D4"), catalog("A1^4")).isometric


@pytest.mark.slow
def test_summandwise_isometry_in_dimension_16(E8):
    verdict = is_isometric(catalog("E8perpE8"), orthogonal_sum(E8, E8), IsometryPolicy.FAST, IsometryConfig(theta_bound=2))
    assert verdict.status is IsometryStatus.ISOMETRIC
    assert verdict.witness == "isometric summands"


def test_summandwise_verdict_carries_a_certificate():
    L1 = orthogonal_sum(catalog("A2"), catalog("D4"), catalog("Z1"))
    U = [[1 if i == j else 0 for j in range(7)] for i in range(7)]
    U[0][3] = 1
    U[2][6] = -1
    U[5][1] = 2
    L2 = with_basis(orthogonal_sum(catalog("Z1"), catalog("D4"), catalog("A2")), U)
    verdict = is_isometric(L1, L2, IsometryPolicy.FAST, IsometryConfig(theta_bound=2))
    assert verdict.status is IsometryStatus.ISOMETRIC
    assert verdict.witness == "isometric summands"
    T = verdict.certificate
    assert T is not None and T.is_integral()
    assert abs(det(T)) == 1
    assert T @ L1.gram @ T.transpose() == L2.gram


def test_fast_policy_is_indeterminate_on_matching_fingerprints(E8):
    cfg = IsometryConfig(theta_bound=2, strict_max_dim=4)
    verdict = is_isometric(E8, E8, IsometryPolicy.AUTO, cfg)
    assert verdict.status is IsometryStatus.INDETERMINATE
