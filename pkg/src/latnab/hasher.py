import hashlib

from latnab.exact import format_rational
from latnab.lattice import Lattice

def lattice_digest(L: Lattice, algorithm: str = "sha256") -> str:
    # Hash of the canonical HNF basis, its denominator and the frame metric. Equal lattices in the
    # same frame get the same digest whatever basis they were built from.
    algorithm = algorithm.lower()
    if algorithm not in hashlib.algorithms_available:
        raise ValueError(f"Unsupported hash algorithm: {algorithm}")
    hash_alg = hashlib.new(algorithm)

    rows, den = L.canonical
    hash_alg.update(f"dim={L.dim};den={den};".encode())
    for row in rows:
        hash_alg.update((",".join(str(x) for x in row) + ";").encode())
    if L.metric is not None:
        hash_alg.update(b"metric;")
        for mrow in L.metric.entries:
            hash_alg.update((",".join(format_rational(x) for x in mrow) + ";").encode())
    return hash_alg.hexdigest()
