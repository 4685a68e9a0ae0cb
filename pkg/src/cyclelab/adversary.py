"""Degree-budgeted edge-deletion strategies with auditable plans.

Every adversary produces a :class:`DeletionPlan` whose per-vertex deletion
tallies never exceed the budget; :func:`validate_budget` re-derives the
tallies from scratch so plans stay audit-exact.  Budgets are absolute
integers per vertex; :func:`budget_from_fraction` converts relative forms
like 0.45 of the mean degree.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import GraphFormatError
from .graphcore import Edge, GraphSnapshot, canonical_edge, delete_edges
from .rng import stable_hash64, substream

BIPARTITION_RETRIES = 5


@dataclass(frozen=True)
class DeletionPlan:
    """An adversary's deleted edge set with per-vertex budget accounting.

    ``complete`` records whether the strategy achieved its goal (full
    within-part deletion, no target cycle left, ...) within budget.
    """

    edges: frozenset[Edge]
    per_vertex_deleted: tuple[int, ...]
    budget: int
    base_label: str = ""
    complete: bool = True
    info: dict = field(default_factory=dict)

    @staticmethod
    def from_edges(g: GraphSnapshot, edges: Iterable[Edge], budget: int,
                   complete: bool = True,
                   info: Mapping | None = None) -> "DeletionPlan":
        canon = frozenset(canonical_edge(u, v) for u, v in edges)
        tally = [0] * g.n
        for u, v in canon:
            if not g.has_edge(u, v):
                raise ValueError(f"planned edge ({u},{v}) not present in base graph")
            tally[u] += 1
            tally[v] += 1
        worst = max(tally, default=0)
        if worst > budget:
            raise ValueError(
                f"plan exceeds budget {budget} at vertex {tally.index(worst)}"
            )
        return DeletionPlan(
            edges=canon, per_vertex_deleted=tuple(tally), budget=budget,
            base_label=g.label, complete=complete, info=dict(info or {}),
        )


@dataclass(frozen=True)
class BudgetAudit:
    ok: bool
    worst_vertex: int | None
    worst_count: int
    message: str


def budget_from_fraction(scale: float, fraction: float) -> int:
    """Absolute per-vertex budget floor(fraction * scale); scale is
    typically the mean degree n*p or d."""
    if fraction < 0:
        raise ValueError(f"fraction must be non-negative, got {fraction}")
    return math.floor(fraction * scale)


def apply_plan(g: GraphSnapshot, plan: DeletionPlan) -> GraphSnapshot:
    return delete_edges(g, plan.edges)


def validate_budget(plan: DeletionPlan, g: GraphSnapshot) -> BudgetAudit:
    """Recompute tallies from scratch and compare against the stored plan.

    Foreign edges or tally mismatches are audit failures, not exceptions.
    """
    tally = [0] * g.n
    for u, v in plan.edges:
        if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
            return BudgetAudit(False, None, 0,
                               f"edge absent from base graph: ({u},{v})")
        tally[u] += 1
        tally[v] += 1
    if tuple(tally) != plan.per_vertex_deleted:
        bad = next(v for v in range(g.n) if tally[v] != plan.per_vertex_deleted[v])
        return BudgetAudit(False, bad, tally[bad],
                           f"stored tally mismatch at vertex {bad}")
    worst = max(range(g.n), key=lambda v: tally[v], default=None)
    worst_count = tally[worst] if worst is not None else 0
    if worst_count > plan.budget:
        return BudgetAudit(False, worst, worst_count,
                           f"budget {plan.budget} exceeded at vertex {worst} "
                           f"({worst_count} deletions)")
    return BudgetAudit(True, worst, worst_count, "ok")


# ---------------------------------------------------------------------------
# adversaries

def bipartition_adversary(g: GraphSnapshot, seed: int, budget: int,
                          partition: tuple[Iterable[int], Iterable[int]] | None = None,
                          retries: int = BIPARTITION_RETRIES) -> DeletionPlan:
    """Delete within-part edges of a random balanced partition.

    Draws a uniformly random partition into parts of size floor(n/2) and
    ceil(n/2) and deletes every within-part edge whose two endpoints both
    still have remaining budget.  If some within-part edge survives the
    budget, the partition is redrawn up to `retries` times and the attempt
    with the fewest blocked edges is reported with ``complete=False``.
    An explicit partition skips the retry loop.
    """
    if budget < 0:
        raise ValueError(f"budget must be non-negative, got {budget}")

    def run(parts: tuple[frozenset[int], frozenset[int]], attempt: int):
        side = [0] * g.n
        for v in parts[1]:
            side[v] = 1
        tally = [0] * g.n
        chosen: list[Edge] = []
        blocked = 0
        for u, v in g.edges():
            if side[u] != side[v]:
                continue
            if tally[u] < budget and tally[v] < budget:
                chosen.append((u, v))
                tally[u] += 1
                tally[v] += 1
            else:
                blocked += 1
        info = {
            "kind": "bipartition",
            "attempts": attempt + 1,
            "blocked_edges": blocked,
            "partition": (tuple(sorted(parts[0])), tuple(sorted(parts[1]))),
        }
        return chosen, blocked, info

    if partition is not None:
        p0 = frozenset(partition[0])
        p1 = frozenset(partition[1])
        if p0 | p1 != frozenset(range(g.n)) or p0 & p1:
            raise ValueError("partition must split the vertex set exactly")
        chosen, blocked, info = run((p0, p1), 0)
        return DeletionPlan.from_edges(g, chosen, budget,
                                       complete=blocked == 0, info=info)

    best = None
    for attempt in range(max(1, retries)):
        rng = substream(seed, "bipartition", attempt)
        perm = rng.permutation(g.n)
        parts = (frozenset(perm[: g.n // 2].tolist()),
                 frozenset(perm[g.n // 2:].tolist()))
        chosen, blocked, info = run(parts, attempt)
        if best is None or blocked < best[1]:
            best = (chosen, blocked, info)
        if blocked == 0:
            break
    chosen, blocked, info = best
    return DeletionPlan.from_edges(g, chosen, budget,
                                   complete=blocked == 0, info=info)


def _pick_cycle_edge(cycle: tuple[int, ...], tally: list[int],
                     budget: int) -> Edge | None:
    """Edge of the cycle maximizing min remaining endpoint slack, tie
    broken by lexicographically smallest edge; None when every edge is
    budget-blocked."""
    best: tuple[int, Edge] | None = None
    for a, b in zip(cycle, cycle[1:] + (cycle[0],)):
        e = canonical_edge(a, b)
        slack = min(budget - tally[e[0]] - 1, budget - tally[e[1]] - 1)
        if slack < 0:
            continue
        if best is None or (slack, (-e[0], -e[1])) > (best[0], (-best[1][0], -best[1][1])):
            best = (slack, e)
    return None if best is None else best[1]


def cycle_destroyer(g: GraphSnapshot, l: int, budget: int,
                    seed: int = 0) -> DeletionPlan:
    """Greedily delete one edge of each detected l-cycle until none is
    found (``complete=True``) or the budget blocks every edge of some
    found cycle (``complete=False``).

    ``info["certified"]`` records whether the final no-cycle verdict came
    from an exhaustive detector or only from a budget-capped heuristic.
    """
    if l < 3:
        raise ValueError(f"cycle length must be at least 3, got {l}")
    if budget < 0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    if l == 3:
        return _destroy_triangles(g, budget)
    return _destroy_generic(g, l, budget, seed)


def _destroy_triangles(g: GraphSnapshot, budget: int) -> DeletionPlan:
    # Deletions only remove triangles, so one full scan enumerates every
    # candidate; popped entries are re-checked against the live adjacency.
    adj = [set(row) for row in g.adjacency]
    queue: deque[tuple[int, int, int]] = deque()
    for u in range(g.n):
        for v in g.adjacency[u]:
            if v <= u:
                continue
            for w in sorted(adj[u] & adj[v]):
                if w > v:
                    queue.append((u, v, w))
    tally = [0] * g.n
    removed: list[Edge] = []
    complete = True
    blocking: tuple[int, ...] | None = None
    while queue:
        u, v, w = queue.popleft()
        if v not in adj[u] or w not in adj[u] or w not in adj[v]:
            continue  # already destroyed
        edge = _pick_cycle_edge((u, v, w), tally, budget)
        if edge is None:
            complete = False
            blocking = (u, v, w)
            break
        a, b = edge
        adj[a].discard(b)
        adj[b].discard(a)
        tally[a] += 1
        tally[b] += 1
        removed.append(edge)
    info: dict = {"kind": "destroy-cycle", "l": 3, "certified": complete}
    if blocking is not None:
        info["blocking_cycle"] = blocking
    return DeletionPlan.from_edges(g, removed, budget, complete=complete,
                                   info=info)


def _destroy_generic(g: GraphSnapshot, l: int, budget: int,
                     seed: int) -> DeletionPlan:
    from . import pathscycles  # deferred: adversary is importable standalone

    current = g
    tally = [0] * g.n
    removed: list[Edge] = []
    complete = True
    certified = False
    blocking: tuple[int, ...] | None = None
    iteration = 0
    while True:
        verdict = pathscycles.find_cycle_fixed_length(
            current, l, seed=stable_hash64(seed, "destroyer", iteration) % 2**63)
        if verdict.status == pathscycles.ABSENT:
            certified = True
            break
        if verdict.status == pathscycles.UNKNOWN:
            break  # detector exhausted; no cycle in sight, uncertified
        cycle = verdict.witness.vertices
        edge = _pick_cycle_edge(cycle, tally, budget)
        if edge is None:
            complete = False
            blocking = cycle
            break
        a, b = edge
        current = delete_edges(current, [(a, b)])
        tally[a] += 1
        tally[b] += 1
        removed.append(edge)
        iteration += 1
    info: dict = {"kind": "destroy-cycle", "l": l, "certified": certified}
    if blocking is not None:
        info["blocking_cycle"] = tuple(blocking)
    return DeletionPlan.from_edges(g, removed, budget, complete=complete,
                                   info=info)


def random_capped_adversary(g: GraphSnapshot, fraction: float, seed: int,
                            extend: DeletionPlan | None = None) -> DeletionPlan:
    """Visit edges in seed-determined random order; delete an edge iff both
    endpoints stay within their per-vertex cap floor(fraction * degree).

    With ``extend`` set, the given plan's deletions are replayed first and
    the pass continues under the larger caps, so plans built from the same
    seed with growing fractions are nested.
    """
    if not 0 <= fraction < 1:
        raise ValueError(f"fraction must lie in [0,1), got {fraction}")
    caps = [math.floor(fraction * g.degree(v)) for v in range(g.n)]
    tally = [0] * g.n
    chosen: list[Edge] = []
    if extend is not None:
        for u, v in sorted(extend.edges):
            if tally[u] >= caps[u] or tally[v] >= caps[v]:
                raise ValueError(
                    "extension base plan does not fit under the new caps"
                )
            tally[u] += 1
            tally[v] += 1
            chosen.append((u, v))
    rng = substream(seed, "random-capped", g.n)
    all_edges = sorted(g.edges())
    order = rng.permutation(len(all_edges))
    base = frozenset(chosen)
    for idx in order:
        u, v = all_edges[idx]
        if (u, v) in base:
            continue
        if tally[u] < caps[u] and tally[v] < caps[v]:
            tally[u] += 1
            tally[v] += 1
            chosen.append((u, v))
    return DeletionPlan.from_edges(
        g, chosen, max(caps, default=0), complete=True,
        info={"kind": "random-capped", "fraction": fraction,
              "extended": extend is not None},
    )


# ---------------------------------------------------------------------------
# plan files: edge-list body plus required JSON metadata sibling

def save_plan(plan: DeletionPlan, n: int, path: str | Path) -> Path:
    path = Path(path)
    lines = [f"n {n}"]
    lines.extend(f"{u} {v}" for u, v in sorted(plan.edges))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = {
        "budget": plan.budget,
        "complete": plan.complete,
        "base_label": plan.base_label,
        "info": _jsonable(plan.info),
    }
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2) + "\n",
                                         encoding="utf-8")
    return path


def load_plan(path: str | Path, g: GraphSnapshot) -> DeletionPlan:
    """Load a plan against its base graph; edges are re-validated and
    tallies recomputed."""
    path = Path(path)
    meta_path = Path(str(path) + ".json")
    if not meta_path.exists():
        raise GraphFormatError(f"plan metadata missing: {meta_path}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    edges: list[Edge] = []
    n_header: int | None = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n_header is None:
            if parts[0] != "n" or len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected 'n <count>'")
            n_header = int(parts[1])
            continue
        edges.append((int(parts[0]), int(parts[1])))
    if n_header != g.n:
        raise GraphFormatError(
            f"{path}: plan header n={n_header} does not match graph n={g.n}"
        )
    return DeletionPlan.from_edges(
        g, edges, int(meta["budget"]), complete=bool(meta.get("complete", True)),
        info=dict(meta.get("info", {})),
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    return obj
