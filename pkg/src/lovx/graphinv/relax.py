"""Convex relaxations of submodular vertex cover and multiway partition."""

from __future__ import annotations

import itertools
import math
import warnings

import numpy as np

from ..lovasz import lovasz_eval, lovasz_subgradient
from ..setfun import DiscreteFunction, members
from ..submod import is_submodular
from .graph import Graph
from .invariants import InvariantResult, _guard


def _warn_if_not_submodular(f: DiscreteFunction):
    if f.n <= 16:
        ok, wit = is_submodular(f)
        if not ok:
            warnings.warn(f"{f.name or 'f'} is not submodular (witness {wit}); the relaxation is not convex",
                          stacklevel=3)


def _set_table(f: DiscreteFunction) -> np.ndarray:
    return np.array([f.value(m) for m in range(1 << f.n)])


# ---------------------------------------------------------------------------
# Vertex cover


def project_cover_polytope(G: Graph, x: np.ndarray, sweeps: int = 500, tol: float = 1e-13) -> np.ndarray:
    """Dykstra's alternating projection onto [0,1]^n and every half-space x_i + x_j >= 1."""
    x = np.asarray(x, dtype=float).copy()
    corr = np.zeros((G.m + 1, G.n))
    for _ in range(sweeps):
        prev = x.copy()
        for r, (i, j) in enumerate(G.edges):
            y = x + corr[r]
            z = y.copy()
            viol = 1.0 - (y[i] + y[j])
            if viol > 0:
                z[i] += viol / 2
                z[j] += viol / 2
            corr[r] = y - z
            x = z
        y = x + corr[-1]
        z = np.clip(y, 0.0, 1.0)
        corr[-1] = y - z
        x = z
        if np.abs(x - prev).max() <= tol:
            break
    return x


def _is_cover(G: Graph, mask: int) -> bool:
    return all((mask >> i) & 1 or (mask >> j) & 1 for i, j in G.edges)


def submodular_vertex_cover(G: Graph, f: DiscreteFunction, steps: int = 400, step: float = 0.5,
                            tol: float = 1e-9) -> InvariantResult:
    """Exact minimum of f over vertex covers and a projected-subgradient
    minimization of the extension over the relaxed cover polytope.

    Threshold sets of each iterate that are covers are visited too (they are
    vertices of the polytope), so the relaxation value is a best visited value.
    """
    if f.mode != "set" or f.n != G.n:
        raise ValueError("f must be a set function on the vertices")
    _guard(G.n, 16)
    _warn_if_not_submodular(f)
    table = _set_table(f)
    covers = [m for m in range(1 << G.n) if _is_cover(G, m)]
    best_mask = min(covers, key=lambda m: (table[m], m))
    res = InvariantResult("submodular_vertex_cover", float(table[best_mask]), list(members(best_mask)))
    best_v, best_x = math.inf, None

    def visit(x):
        nonlocal best_v, best_x
        v = lovasz_eval(f, x)
        if v < best_v:
            best_v, best_x = v, x.copy()

    for x0 in (np.full(G.n, 0.5), np.ones(G.n)):
        x = project_cover_polytope(G, x0)
        for t in range(1, steps + 1):
            visit(x)
            for lvl in np.unique(x):
                m = sum(1 << i for i in range(G.n) if x[i] >= lvl)
                if _is_cover(G, m):
                    visit(np.array([(m >> i) & 1 for i in range(G.n)], dtype=float))
            g = lovasz_subgradient(f, x)
            nrm = float(np.linalg.norm(g))
            if nrm == 0:
                break
            x = project_cover_polytope(G, x - step / math.sqrt(t) * g / nrm)
    res.continuous = float(best_v)
    res.details["relaxation_point"] = best_x
    res.details["relaxation_ok"] = bool(best_v <= res.value + tol)
    return res


# ---------------------------------------------------------------------------
# Multiway partition


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of v onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def _project_multiway(X: np.ndarray, terminals: list[int]) -> np.ndarray:
    Y = np.empty_like(X)
    for v in range(X.shape[1]):
        Y[:, v] = project_simplex(X[:, v])
    for i, a in enumerate(terminals):
        Y[:, a] = 0.0
        Y[i, a] = 1.0
    return Y


def multiway_partition(f: DiscreteFunction, terminals, steps: int = 300, step: float = 0.5,
                       tol: float = 1e-9) -> InvariantResult:
    """min sum_i f(V_i) over partitions with terminal a_i in V_i, exactly and
    through the relaxation over the product of vertex simplices."""
    terminals = [int(a) for a in terminals]
    if len(set(terminals)) != len(terminals):
        raise ValueError(f"duplicate terminals in {terminals}")
    if not terminals or any(not 0 <= a < f.n for a in terminals):
        raise ValueError("terminals must be vertices")
    if f.mode != "set":
        raise ValueError("f must be a set function")
    k, n = len(terminals), f.n
    _guard(n, 12)
    if k > 4:
        raise ValueError("at most 4 terminals")
    _warn_if_not_submodular(f)
    table = _set_table(f)
    free = [v for v in range(n) if v not in terminals]
    best_val, best_parts = math.inf, None
    for labels in itertools.product(range(k), repeat=len(free)):
        masks = [1 << a for a in terminals]
        for v, l in zip(free, labels):
            masks[l] |= 1 << v
        val = float(sum(table[m] for m in masks))
        if val < best_val:
            best_val, best_parts = val, masks
    res = InvariantResult("multiway_partition", best_val, [list(members(m)) for m in best_parts])

    def objective(X):
        return sum(lovasz_eval(f, X[i]) for i in range(k))

    X = np.full((k, n), 1.0 / k)
    X = _project_multiway(X, terminals)
    best_r, best_X = math.inf, X
    for t in range(1, steps + 1):
        val = objective(X)
        if val < best_r:
            best_r, best_X = val, X.copy()
        # rounding each vertex to its heaviest part gives a feasible indicator point
        R = np.zeros_like(X)
        R[np.argmax(X, axis=0), np.arange(n)] = 1.0
        R = _project_multiway(R, terminals)
        rv = objective(R)
        if rv < best_r:
            best_r, best_X = rv, R
        g = np.array([lovasz_subgradient(f, X[i]) for i in range(k)])
        nrm = float(np.linalg.norm(g))
        if nrm == 0:
            break
        X = _project_multiway(X - step / math.sqrt(t) * g / nrm, terminals)
    res.continuous = float(best_r)
    res.details["relaxation_point"] = best_X
    res.details["relaxation_ok"] = bool(best_r <= best_val + tol)
    return res
