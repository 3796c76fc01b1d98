from fractions import Fraction

import pytest

from latnab.cache import ThetaCache
from latnab.catalog import catalog
from latnab.hasher import lattice_digest
from latnab.lattice import with_basis


def test_round_trip(tmp_path):
    path = tmp_path / "nested" / "theta.json.gz"
    cache = ThetaCache(path)
    cache.load()
    cache.put("abc", Fraction(4), {Fraction(0): 1, Fraction(2): 24, Fraction(4): 24})
    cache.save()
    assert path.is_file()

    reloaded = ThetaCache(path)
    reloaded.load()
    assert len(reloaded) == 1
    assert reloaded.get("abc", Fraction(2)) == {Fraction(0): 1, Fraction(2): 24}
    assert reloaded.get("abc", Fraction(6)) is None
    assert reloaded.get("xyz", Fraction(1)) is None


def test_shorter_entries_do_not_replace_longer_ones():
    cache = ThetaCache(None)
    cache.load()
    cache.put("abc", Fraction(6), {Fraction(0): 1, Fraction(6): 2})
    cache.put("abc", Fraction(2), {Fraction(0): 1})
    assert cache.get("abc", Fraction(6)) == {Fraction(0): 1, Fraction(6): 2}


def test_unreadable_cache_is_ignored(tmp_path):
    path = tmp_path / "theta.json.gz"
    path.write_bytes(b"not gzip")
    cache = ThetaCache(path)
    cache.load()
    assert len(cache) == 0


def test_cache_must_be_loaded():
    cache = ThetaCache(None)
    with pytest.raises(RuntimeError):
        cache.get("abc", Fraction(1))
    cache.load()
    with pytest.raises(RuntimeError):
        cache.load()


def test_digest_ignores_the_basis():
    D4 = catalog("D4")
    U = [[1, 0, 0, 0], [3, 1, 0, 0], [0, 0, 1, 0], [0, 2, 0, 1]]
    assert lattice_digest(with_basis(D4, U)) == lattice_digest(D4)
    assert lattice_digest(D4) != lattice_digest(catalog("Z4"))
    assert lattice_digest(catalog("sqrt2*D4")) != lattice_digest(D4)
    with pytest.raises(ValueError):
        lattice_digest(D4, "nope")
