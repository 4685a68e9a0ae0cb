"""Seeded, reproducible graph constructions.

Two universes: binomial random graphs G(n,p) and concrete pseudo-random
graphs (Paley graphs of prime order, near-uniform random regular graphs).
Equal parameters and seed always yield byte-identical graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationError
from .graphcore import GraphSnapshot
from .rng import substream

PAIRING_RESTART_CAP = 500


@dataclass(frozen=True)
class GnpParams:
    n: int
    p: float
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0,1], got {self.p}")


@dataclass(frozen=True)
class RegularParams:
    n: int
    d: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if not 0 <= self.d < self.n:
            raise ValueError(f"need 0 <= d < n, got d={self.d}, n={self.n}")
        if (self.n * self.d) % 2 != 0:
            raise ValueError(f"n*d must be even, got n={self.n}, d={self.d}")


def gen_gnp(params: GnpParams) -> GraphSnapshot:
    """G(n,p): each unordered pair is an edge independently with prob p.

    One uniform draw per pair in canonical (u<v, lexicographic) order,
    with edge inclusion as ``draw < p``; the stream depends on (seed, n)
    only, so for a fixed seed raising p never removes an edge.
    """
    n, p = params.n, params.p
    rng = substream(params.seed, "gnp", n)
    draws = rng.random(n * (n - 1) // 2)
    us, vs = np.triu_indices(n, k=1)
    keep = draws < p
    edges = zip(us[keep].tolist(), vs[keep].tolist())
    return GraphSnapshot.from_edges(
        n, edges, label=f"gnp(n={n},p={p},seed={params.seed})"
    )


def _is_prime(m: int) -> bool:
    # deterministic Miller-Rabin, exact for m < 3.3e24
    if m < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def gen_paley(q: int) -> GraphSnapshot:
    """Paley graph on a prime q = 1 (mod 4): u ~ v iff u - v is a nonzero
    quadratic residue mod q.  (q-1)/2-regular with spectral gap
    lambda = (sqrt(q)+1)/2."""
    if not _is_prime(q):
        raise ValueError(f"q must be prime, got {q}")
    if q % 4 != 1:
        raise ValueError(f"q must be 1 mod 4 for a symmetric relation, got {q}")
    residues = {pow(x, 2, q) for x in range(1, q)}
    edges = [
        (u, v) for u in range(q) for v in range(u + 1, q) if (v - u) % q in residues
    ]
    return GraphSnapshot.from_edges(q, edges, label=f"paley(q={q})")


def gen_random_regular(params: RegularParams) -> GraphSnapshot:
    """Near-uniform d-regular simple graph via the pairing model.

    Stubs are shuffled and paired; colliding stubs (self-loop or duplicate
    edge) are re-queued and re-paired.  When no suitable pairing of the
    leftover stubs exists the whole attempt restarts, up to
    ``PAIRING_RESTART_CAP`` restarts.
    """
    n, d = params.n, params.d
    rng = substream(params.seed, "regular", n, d)
    label = f"regular(n={n},d={d},seed={params.seed})"
    if d == 0:
        return GraphSnapshot.from_edges(n, [], label=label)

    def attempt() -> set[tuple[int, int]] | None:
        edges: set[tuple[int, int]] = set()
        stubs = [v for v in range(n) for _ in range(d)]
        while stubs:
            stub_arr = np.array(stubs)
            rng.shuffle(stub_arr)
            stubs_shuffled = stub_arr.tolist()
            leftovers: list[int] = []
            for s1, s2 in zip(stubs_shuffled[::2], stubs_shuffled[1::2]):
                if s1 > s2:
                    s1, s2 = s2, s1
                if s1 != s2 and (s1, s2) not in edges:
                    edges.add((s1, s2))
                else:
                    leftovers.extend((s1, s2))
            if not leftovers:
                return edges
            if not _repairable(edges, leftovers):
                return None
            stubs = leftovers
        return edges

    for _ in range(PAIRING_RESTART_CAP):
        edges = attempt()
        if edges is not None:
            return GraphSnapshot.from_edges(n, edges, label=label)
    raise GenerationError(
        f"pairing model failed after {PAIRING_RESTART_CAP} restarts "
        f"(n={n}, d={d}); degree likely too close to n"
    )


def _repairable(edges: set[tuple[int, int]], leftovers: list[int]) -> bool:
    # some pair of leftover stubs must still form a fresh edge
    distinct = sorted(set(leftovers))
    for i, s1 in enumerate(distinct):
        for s2 in distinct[i + 1:]:
            if (s1, s2) not in edges:
                return True
    return False
