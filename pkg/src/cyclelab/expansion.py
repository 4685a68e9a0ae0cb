"""Expansion checkers and constructive layer growth.

Empirical checkers for vertex-expansion bounds (|N(X)\\X| >= 2|X| and the
rotation-extension hypothesis |N(X)\\X| >= 2|X|-1), BFS layer structures,
codegree audits, large-set half-spread checks, and the twin-layer growth
procedure that drives the medium-cycle construction on pseudo-random
graphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .errors import TwinLayerError
from .graphcore import (GraphSnapshot, VertexSet, bfs_distances, bfs_levels,
                        check_vertex, check_vertex_set, kth_neighborhood,
                        neighbors_of_set)
from .rng import substream

if TYPE_CHECKING:
    from .spectral import PseudoRandomCert

ENUMERATION_GUARD = 10**6
DEFAULT_SAMPLES_PER_SIZE = 20_000
MAX_RECORDED_VIOLATIONS = 64
DELTA_CAP = 8.0


@dataclass(frozen=True)
class ExpansionReport:
    """Minimum observed outside-expansion ratio |N(X)\\X| / |X|.

    ``violations`` lists (bound-id, X) pairs for tested sets failing a
    stated bound: "posa-2x-1" for |N(X)\\X| < 2|X|-1 and "expansion-2x"
    for |N(X)\\X| < 2|X| (at most MAX_RECORDED_VIOLATIONS kept;
    ``violation_count`` is the full tally).  ``posa_holds`` is the
    rotation-extension hypothesis verdict over all tested sets.
    """

    sizes_tested: tuple[int, ...]
    mode: str
    min_ratio: float
    witness: VertexSet | None
    violations: tuple[tuple[str, VertexSet], ...]
    violation_count: int
    posa_holds: bool


def expansion_ratio(g: GraphSnapshot, sizes: Iterable[int],
                    mode: str = "exhaustive",
                    samples_per_size: int = DEFAULT_SAMPLES_PER_SIZE,
                    seed: int = 0) -> ExpansionReport:
    """Measure min |N(X)\\X|/|X| over sets X of the given sizes.

    Exhaustive mode enumerates every subset per size (guarded at
    ENUMERATION_GUARD total subsets); sampled mode draws uniform subsets.
    Sampled minima are upper bounds of the exhaustive minimum.
    """
    size_list = sorted(set(sizes))
    if not size_list:
        raise ValueError("no sizes requested")
    if size_list[0] < 1 or size_list[-1] > g.n:
        raise ValueError(f"sizes must lie in [1, n={g.n}], got {size_list}")

    if mode == "exhaustive":
        total = sum(math.comb(g.n, s) for s in size_list)
        if total > ENUMERATION_GUARD:
            raise ValueError(
                f"{total} subsets exceed the enumeration guard "
                f"({ENUMERATION_GUARD}); use mode='sampled'"
            )
        candidates = (
            frozenset(c)
            for s in size_list
            for c in itertools.combinations(range(g.n), s)
        )
    elif mode == "sampled":
        rng = substream(seed, "expansion-ratio", g.n)
        candidates = (
            frozenset(rng.choice(g.n, size=s, replace=False).tolist())
            for s in size_list
            for _ in range(samples_per_size)
        )
    else:
        raise ValueError(f"unknown mode {mode!r}")

    nbr = g.neighbor_sets
    min_ratio = math.inf
    witness: VertexSet | None = None
    violations: list[tuple[str, VertexSet]] = []
    violation_count = 0
    posa_holds = True
    for X in candidates:
        outside: set[int] = set()
        for v in X:
            outside.update(nbr[v])
        outside -= X
        r = len(outside) / len(X)
        if r < min_ratio:
            min_ratio = r
            witness = X
        if len(outside) < 2 * len(X) - 1:
            posa_holds = False
            violation_count += 1
            if len(violations) < MAX_RECORDED_VIOLATIONS:
                violations.append(("posa-2x-1", X))
        elif len(outside) < 2 * len(X):
            violation_count += 1
            if len(violations) < MAX_RECORDED_VIOLATIONS:
                violations.append(("expansion-2x", X))
    return ExpansionReport(
        sizes_tested=tuple(size_list), mode=mode, min_ratio=min_ratio,
        witness=witness, violations=tuple(violations),
        violation_count=violation_count, posa_holds=posa_holds,
    )


# ---------------------------------------------------------------------------
# layers

@dataclass(frozen=True)
class LayerStructure:
    """BFS level sets from an origin vertex: layers[i] is the set of
    vertices at distance exactly i."""

    origin: int
    layers: tuple[VertexSet, ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.layers)


def grow_layers(g: GraphSnapshot, v: int, depth: int) -> LayerStructure:
    """Pure measurement of BFS level sets to the requested depth."""
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    levels = bfs_levels(g, v, depth=depth)
    return LayerStructure(origin=v, layers=tuple(levels))


@dataclass(frozen=True)
class CodegreeVerdict:
    passed: bool
    threshold: float
    worst_vertex: int | None
    worst_value: int
    vertices_checked: int


def codegree_check(g: GraphSnapshot, v: int, l: int,
                   threshold: float | None = None) -> CodegreeVerdict:
    """For every w at distance >= l-2 from v, measure
    |N^(l-2)(v) ∩ N(w)|; passes iff all values are <= threshold
    (default: natural log of n).  Monotone in the threshold."""
    check_vertex(g, v)
    if l < 3:
        raise ValueError(f"l must be at least 3, got {l}")
    if threshold is None:
        threshold = math.log(g.n) if g.n > 1 else 1.0
    shell = kth_neighborhood(g, v, l - 2)
    dist = bfs_distances(g, v)
    worst_vertex: int | None = None
    worst = -1
    checked = 0
    for w in range(g.n):
        d = dist[w]
        eligible = (d == -1) or (d >= l - 2)
        if w == v or not eligible:
            continue
        checked += 1
        value = len(g.neighbor_sets[w] & shell)
        if value > worst:
            worst = value
            worst_vertex = w
    return CodegreeVerdict(
        passed=(worst <= threshold), threshold=threshold,
        worst_vertex=worst_vertex, worst_value=max(worst, 0),
        vertices_checked=checked,
    )


@dataclass(frozen=True)
class HalfspreadVerdict:
    passed: bool
    neighborhood_size: int
    required: float


def large_set_halfspread_check(g_prime: GraphSnapshot, X: Iterable[int],
                               eps: float) -> HalfspreadVerdict:
    """Check |N(X)| >= (1/2 + eps/2) * n."""
    xs = check_vertex_set(g_prime, X)
    if not xs:
        raise ValueError("X must be nonempty")
    size = len(neighbors_of_set(g_prime, xs))
    required = (0.5 + eps / 2) * g_prime.n
    return HalfspreadVerdict(passed=size >= required,
                             neighborhood_size=size, required=required)


# ---------------------------------------------------------------------------
# twin layers

@dataclass(frozen=True)
class TwinLayerStructure:
    """Disjoint equal-size layer pairs X_i, Y_i grown from one origin.

    Structural invariants (asserted by the test-suite on every successful
    run): X_i ∩ Y_i = ∅ and |X_i| = |Y_i| for i >= 1; each next layer sits
    inside the neighborhood of the previous one minus everything used so
    far (z_union is the cumulative union)."""

    origin: int
    x_layers: tuple[VertexSet, ...]
    y_layers: tuple[VertexSet, ...]
    z_union: VertexSet
    l: int
    growth_ratios: tuple[float, ...]
    stop_threshold: float


def grow_twin_layers(g_prime: GraphSnapshot, v: int, cert: "PseudoRandomCert",
                     eps: float, k: int,
                     stop_threshold: float | None = None,
                     delta_cap: float = DELTA_CAP) -> TwinLayerStructure:
    """Grow disjoint twin layers X_i, Y_i from v until |X_i| reaches the
    stop size delta_cap * (lam/d)^2 * n (or a caller override).

    Seeds X_1, Y_1 with floor(d/4) disjoint neighbors each; at every step
    takes the next layers inside N(X_i) and N(Y_i) minus everything used,
    splitting shared frontier vertices alternately in sorted order to keep
    the layers disjoint and equal-sized.  Growth must stop within
    floor((k-1)/2) steps; running out of frontier or out of steps raises
    :class:`TwinLayerError`, signaling the graph is outside the procedure's
    regime.
    """
    check_vertex(g_prime, v)
    if k < 3:
        raise ValueError(f"k must be at least 3, got {k}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    d = cert.d_nominal
    lam = cert.lam
    if d <= 0:
        raise ValueError("certificate has non-positive nominal degree")
    need = (0.5 + eps) * d
    if g_prime.min_degree() < need:
        raise ValueError(
            f"residual min degree {g_prime.min_degree()} below required "
            f"(1/2+eps)*d = {need:.2f}"
        )
    if stop_threshold is None:
        stop_threshold = delta_cap * (lam * lam) / (d * d) * g_prime.n
    size_cap = math.floor(eps / (8 * k) * g_prime.n)
    l_max = max(1, (k - 1) // 2)

    seed_size = max(1, d // 4)
    nbrs = sorted(g_prime.adjacency[v])
    if len(nbrs) < 2 * seed_size:
        raise TwinLayerError(
            f"vertex {v} has only {len(nbrs)} neighbors, cannot seed two "
            f"disjoint layers of size {seed_size}", achieved_depth=0, sizes=(1,))
    x_layers: list[frozenset[int]] = [frozenset((v,)), frozenset(nbrs[:seed_size])]
    y_layers: list[frozenset[int]] = [frozenset((v,)), frozenset(nbrs[seed_size:2 * seed_size])]
    used: set[int] = {v} | set(nbrs[:2 * seed_size])

    nbr = g_prime.neighbor_sets
    final_l: int | None = None
    i = 1
    while True:
        if len(x_layers[i]) >= stop_threshold:
            final_l = i
            break
        if i >= l_max:
            raise TwinLayerError(
                f"no layer reached stop size {stop_threshold:.2f} within "
                f"l_max={l_max} steps", achieved_depth=i,
                sizes=tuple(len(s) for s in x_layers))
        fx: set[int] = set()
        for u in x_layers[i]:
            fx.update(nbr[u])
        fy: set[int] = set()
        for u in y_layers[i]:
            fy.update(nbr[u])
        fx -= used
        fy -= used
        shared = fx & fy
        only_x = sorted(fx - shared)
        only_y = sorted(fy - shared)
        for j, w in enumerate(sorted(shared)):
            (only_x if j % 2 == 0 else only_y).append(w)
        m = min(len(only_x), len(only_y))
        if m == 0:
            raise TwinLayerError(
                f"frontier exhausted at step {i} "
                f"(|N(X)\\Z|={len(only_x)}, |N(Y)\\Z|={len(only_y)})",
                achieved_depth=i, sizes=tuple(len(s) for s in x_layers))
        nx = sorted(only_x)[:m]
        ny = sorted(only_y)[:m]
        # shrink toward the relative size cap only when it does not defeat
        # the stop size; at desk scale the cap is usually below 1
        if size_cap >= max(1, math.ceil(stop_threshold)) and m > size_cap:
            nx, ny = nx[:size_cap], ny[:size_cap]
        x_layers.append(frozenset(nx))
        y_layers.append(frozenset(ny))
        used.update(nx)
        used.update(ny)
        i += 1

    ratios = tuple(
        len(x_layers[j + 1]) / len(x_layers[j]) for j in range(final_l)
    )
    return TwinLayerStructure(
        origin=v,
        x_layers=tuple(x_layers[: final_l + 1]),
        y_layers=tuple(y_layers[: final_l + 1]),
        z_union=frozenset(used),
        l=final_l,
        growth_ratios=ratios,
        stop_threshold=stop_threshold,
    )
