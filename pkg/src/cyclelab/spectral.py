"""Spectral certification and edge-distribution audits.

Measures the second largest absolute adjacency eigenvalue, certifies
near-regular pseudo-randomness, audits the expander mixing bound
|e(X,Y) - (d/n)|X||Y|| <= lambda*sqrt(|X||Y|), and computes the trace
lower bound every d-regular graph forces on lambda.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NumericalError
from .graphcore import GraphSnapshot, VertexSet, check_vertex_set, is_connected
from .rng import substream

DENSE_TOLERANCE = 1e-8
ITERATIVE_TOLERANCE = 1e-6
DENSE_CUTOFF = 2000
EXHAUSTIVE_PAIR_GUARD = 2 * 10**7


@dataclass(frozen=True)
class PseudoRandomCert:
    """Measured regularity and spectral data of a graph.

    ``eps_prime`` is the minimum-degree slack (d_nominal - d_min)/d_nominal;
    ``lam`` is the second largest absolute adjacency eigenvalue; ``residual``
    bounds the numerical backward error of the eigensolve.
    """

    n: int
    d_min: int
    d_max: int
    d_nominal: int
    eps_prime: float
    lam: float
    method: str
    residual: float

    def regime_ratio(self, k: int) -> float:
        """Dimensionless ratio d^(k-1) / (n * lam^(k-2)) for a given cycle
        length k; "large" values put the graph in the usable regime."""
        if k < 3:
            raise ValueError(f"k must be at least 3, got {k}")
        if self.lam == 0:
            return math.inf
        return self.d_nominal ** (k - 1) / (self.n * self.lam ** (k - 2))


@dataclass(frozen=True)
class MixingReport:
    pairs_checked: int
    max_violation: float
    worst_pair: tuple[VertexSet, VertexSet] | None


def adjacency_matrix(g: GraphSnapshot, dtype=np.float64) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=dtype)
    for u in range(g.n):
        row = g.adjacency[u]
        if row:
            a[u, list(row)] = 1
    return a


def _sparse_adjacency(g: GraphSnapshot) -> sp.csr_matrix:
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    indices = []
    for u in range(g.n):
        indices.extend(g.adjacency[u])
        indptr[u + 1] = len(indices)
    data = np.ones(len(indices), dtype=np.float64)
    return sp.csr_matrix((data, np.array(indices, dtype=np.int64), indptr),
                         shape=(g.n, g.n))


def second_eigenvalue(g: GraphSnapshot, method: str = "auto",
                      dense_cutoff: int = DENSE_CUTOFF,
                      maxiter: int | None = None) -> tuple[float, float]:
    """max(|mu_2|, ..., |mu_n|) of the adjacency spectrum, plus a residual.

    Dense symmetric solve for n <= dense_cutoff, otherwise restarted
    Lanczos with the top eigenvector deflated, taking the max of the
    second-largest and (by sign flip) most-negative estimates.
    """
    if g.n < 2:
        raise ValueError("second eigenvalue needs at least 2 vertices")
    if not is_connected(g):
        warnings.warn(
            f"graph {g.label or '<unlabeled>'} is disconnected; the reported "
            "value includes the duplicated top eigenvalue", stacklevel=2)
    if method == "dense" or (method == "auto" and g.n <= dense_cutoff):
        return _dense_second_eigenvalue(g)
    return _iterative_second_eigenvalue(g, maxiter=maxiter)


def _dense_second_eigenvalue(g: GraphSnapshot) -> tuple[float, float]:
    a = adjacency_matrix(g)
    vals, vecs = np.linalg.eigh(a)
    lam = max(abs(vals[0]), abs(vals[-2]))
    pick = 0 if abs(vals[0]) >= abs(vals[-2]) else g.n - 2
    v = vecs[:, pick]
    residual = float(np.linalg.norm(a @ v - vals[pick] * v))
    return float(lam), max(residual, DENSE_TOLERANCE)


def _iterative_second_eigenvalue(g: GraphSnapshot,
                                 maxiter: int | None = None) -> tuple[float, float]:
    a = _sparse_adjacency(g)
    n = g.n
    maxiter = maxiter or 50 * n
    try:
        top_val, top_vec = spla.eigsh(a, k=1, which="LA", maxiter=maxiter,
                                      tol=ITERATIVE_TOLERANCE)
    except spla.ArpackNoConvergence as exc:
        raise NumericalError("top eigenpair did not converge",
                             estimate=None) from exc
    theta = float(top_val[0])
    u = top_vec[:, 0]

    def deflated(x):
        return a @ x - theta * u * (u @ x)

    op = spla.LinearOperator((n, n), matvec=deflated, dtype=np.float64)
    neg = spla.LinearOperator((n, n), matvec=lambda x: -deflated(x),
                              dtype=np.float64)
    best = 0.0
    best_vec = None
    try:
        for operator, sign in ((op, 1.0), (neg, -1.0)):
            vals, vecs = spla.eigsh(operator, k=1, which="LA", maxiter=maxiter,
                                    tol=ITERATIVE_TOLERANCE)
            if abs(vals[0]) > best:
                best = float(abs(vals[0]))
                best_vec = (vecs[:, 0], sign * float(vals[0]))
    except spla.ArpackNoConvergence as exc:
        raise NumericalError("deflated eigensolve did not converge",
                             estimate=best) from exc
    if best_vec is None:
        raise NumericalError("deflated eigensolve produced no estimate")
    vec, val = best_vec
    residual = float(np.linalg.norm(a @ vec - val * vec))
    return best, max(residual, ITERATIVE_TOLERANCE)


def certify_ndl(g: GraphSnapshot, method: str = "auto") -> PseudoRandomCert:
    """Fill a pseudo-randomness certificate for g.

    d_nominal is the average degree rounded to nearest; the certificate
    records min/max degrees as well so callers can pick their anchor.
    Certification is measurement, not endorsement: a star gets a
    certificate too, with a large eps_prime.
    """
    degrees = g.degrees()
    d_min, d_max = min(degrees), max(degrees)
    d_nominal = round(2 * g.edge_count / g.n) if g.n else 0
    eps_prime = 0.0 if d_nominal == 0 else (d_nominal - d_min) / d_nominal
    lam, residual = second_eigenvalue(g, method=method)
    used = "dense" if (method == "dense" or (method == "auto" and g.n <= DENSE_CUTOFF)) else "iterative"
    return PseudoRandomCert(
        n=g.n, d_min=d_min, d_max=d_max, d_nominal=d_nominal,
        eps_prime=max(0.0, eps_prime), lam=lam, method=used, residual=residual,
    )


def lambda_trace_lower_bound(n: int, d: float) -> float:
    """sqrt((n*d - d^2)/(n-1)): the lower bound on lambda forced on any
    d-regular graph on n vertices by trace(A^2) = n*d."""
    if d <= 0:
        raise ValueError(f"degree must be positive, got {d}")
    if d > n - 1:
        raise ValueError(f"degree {d} exceeds n-1 = {n - 1}")
    return math.sqrt((n * d - d * d) / (n - 1))


def looks_bipartite(g: GraphSnapshot, tol: float = 1e-6) -> bool:
    """Spectral bipartiteness indicator for (near-)regular graphs:
    -min eigenvalue equals max eigenvalue within tol."""
    vals = np.linalg.eigvalsh(adjacency_matrix(g))
    return bool(abs(vals[0] + vals[-1]) <= tol * max(1.0, abs(vals[-1])))


# ---------------------------------------------------------------------------
# mixing audit

def _violation_terms(e_xy: float, sx: float, sy: float, d: float, n: int,
                     lam: float) -> float:
    return abs(e_xy - d * sx * sy / n) - lam * math.sqrt(sx * sy)


def mixing_check(g: GraphSnapshot, cert: PseudoRandomCert,
                 mode: str = "exhaustive", max_size: int | None = None,
                 count: int = 10_000, seed: int = 0) -> MixingReport:
    """Audit |e(X,Y) - (d/n)|X||Y|| <= lam*sqrt(|X||Y|) over set pairs.

    mode="exhaustive" enumerates all nonempty subsets (optionally only
    those up to max_size), guarded so the pair count stays interactive;
    mode="sampled" draws `count` random pairs of random sizes.
    max_violation <= tolerance certifies the checked pairs.
    """
    if cert.n != g.n:
        raise ValueError("certificate does not match graph")
    if mode == "exhaustive":
        return _mixing_exhaustive(g, cert, max_size)
    if mode == "sampled":
        return _mixing_sampled(g, cert, count, seed)
    raise ValueError(f"unknown mode {mode!r}")


def _subset_indicators(n: int, max_size: int | None) -> np.ndarray:
    cap = n if max_size is None else min(max_size, n)
    total = sum(math.comb(n, s) for s in range(1, cap + 1))
    if total * total > EXHAUSTIVE_PAIR_GUARD:
        raise ValueError(
            f"{total}^2 subset pairs exceed the exhaustive guard "
            f"({EXHAUSTIVE_PAIR_GUARD}); use mode='sampled' or lower max_size"
        )
    rows = np.zeros((total, n), dtype=np.float64)
    i = 0
    for s in range(1, cap + 1):
        for combo in itertools.combinations(range(n), s):
            rows[i, list(combo)] = 1.0
            i += 1
    return rows


def _mixing_exhaustive(g: GraphSnapshot, cert: PseudoRandomCert,
                       max_size: int | None) -> MixingReport:
    if max_size is None and g.n > 12:
        raise ValueError(
            f"full exhaustive enumeration is limited to n <= 12 (got n={g.n}); "
            "pass max_size or use mode='sampled'"
        )
    S = _subset_indicators(g.n, max_size)
    sizes = S.sum(axis=1)
    A = adjacency_matrix(g)
    M = S @ A  # row i: per-vertex edge counts into subset i
    k = S.shape[0]
    d, lam = float(cert.d_nominal), cert.lam
    best = -math.inf
    best_idx: tuple[int, int] | None = None
    block = max(1, min(k, 512))
    sqrt_sizes = np.sqrt(sizes)
    for lo in range(0, k, block):
        hi = min(lo + block, k)
        e_block = M[lo:hi] @ S.T
        expect = (d / g.n) * np.outer(sizes[lo:hi], sizes)
        bound = lam * np.outer(sqrt_sizes[lo:hi], sqrt_sizes)
        viol = np.abs(e_block - expect) - bound
        j = int(np.argmax(viol))
        if viol.flat[j] > best:
            best = float(viol.flat[j])
            best_idx = (lo + j // k, j % k)
    assert best_idx is not None
    worst = (
        frozenset(np.nonzero(S[best_idx[0]])[0].tolist()),
        frozenset(np.nonzero(S[best_idx[1]])[0].tolist()),
    )
    return MixingReport(pairs_checked=k * k, max_violation=best, worst_pair=worst)


def _mixing_sampled(g: GraphSnapshot, cert: PseudoRandomCert, count: int,
                    seed: int) -> MixingReport:
    if count < 1:
        raise ValueError("sample count must be positive")
    rng = substream(seed, "mixing", g.n)
    A = adjacency_matrix(g)
    d, lam = float(cert.d_nominal), cert.lam
    best = -math.inf
    worst: tuple[VertexSet, VertexSet] | None = None
    for _ in range(count):
        sx, sy = rng.integers(1, g.n + 1, size=2)
        X = rng.choice(g.n, size=sx, replace=False)
        Y = rng.choice(g.n, size=sy, replace=False)
        e_xy = float(A[np.ix_(X, Y)].sum())
        v = _violation_terms(e_xy, sx, sy, d, g.n, lam)
        if v > best:
            best = v
            worst = (frozenset(X.tolist()), frozenset(Y.tolist()))
    return MixingReport(pairs_checked=count, max_violation=best, worst_pair=worst)
