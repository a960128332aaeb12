"""Independent reference computations used to cross-check the package.

Everything here takes a different route from the library code: threshold
integrals instead of sorted sums, Möbius inversion, networkx for graph
invariants, plain Python set loops for Cheeger constants, dense numpy
elimination for GF(2) ranks and Stirling numbers for subdivision counts.
"""

from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np


def _mask(cond) -> int:
    return sum(1 << i for i, c in enumerate(cond) if c)


def _breakpoints(vals, lo, hi):
    pts = sorted({float(v) for v in vals if lo < v < hi} | {lo, hi})
    return list(zip(pts, pts[1:]))


# ---------------------------------------------------------------------------
# Extensions by threshold integrals


def integral_set(value, x) -> float:
    """min(x) f(V) + integral from min(x) to max(x) of f({x > t}) dt."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    lo, hi = float(x.min()), float(x.max())
    total = lo * value((1 << n) - 1)
    for a, b in _breakpoints(x, lo, hi):
        t = 0.5 * (a + b)
        total += (b - a) * value(_mask(x > t))
    return total


def integral_pair(value, x) -> float:
    """integral from 0 to max|x| of f({x > t}, {x < -t}) dt."""
    x = np.asarray(x, dtype=float)
    top = float(np.abs(x).max())
    total = 0.0
    for a, b in _breakpoints(np.abs(x), 0.0, top):
        t = 0.5 * (a + b)
        total += (b - a) * value((_mask(x > t), _mask(x < -t)))
    return total


def integral_kway(value, X) -> float:
    """integral from 0 to max X of f(X^1 > t, ..., X^k > t) dt, for X >= 0."""
    X = np.asarray(X, dtype=float)
    assert np.all(X >= 0)
    top = float(X.max())
    total = 0.0
    for a, b in _breakpoints(X.ravel(), 0.0, top):
        t = 0.5 * (a + b)
        total += (b - a) * value(tuple(_mask(row > t) for row in X))
    return total


def integral_kway_pair(value, X) -> float:
    X = np.asarray(X, dtype=float)
    top = float(np.abs(X).max())
    total = 0.0
    for a, b in _breakpoints(np.abs(X).ravel(), 0.0, top):
        t = 0.5 * (a + b)
        total += (b - a) * value(tuple((_mask(row > t), _mask(row < -t)) for row in X))
    return total


def mobius_set(value, n: int, x) -> float:
    """sum over nonempty S of m(S) min_{i in S} x_i, m the Möbius transform of f."""
    total = 0.0
    for S in range(1, 1 << n):
        m = 0.0
        B = S
        while True:
            m += (-1) ** (bin(S).count("1") - bin(B).count("1")) * (value(B) if B else 0.0)
            if B == 0:
                break
            B = (B - 1) & S
        total += m * min(x[i] for i in range(n) if (S >> i) & 1)
    return total


# ---------------------------------------------------------------------------
# Graph invariants


def nx_graph(G) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.edges)
    return H


def alpha(G) -> int:
    comp = nx.complement(nx_graph(G))
    return max(len(c) for c in nx.find_cliques(comp))


def matching(G) -> int:
    return len(nx.max_weight_matching(nx_graph(G), maxcardinality=True))


def chromatic(G) -> int:
    for k in range(1, G.n + 1):
        for col in itertools.product(range(k), repeat=G.n):
            if all(col[i] != col[j] for i, j in G.edges):
                return k
    return G.n


def max_kcut(G, k: int) -> int:
    return max(sum(lab[i] != lab[j] for i, j in G.edges) for lab in itertools.product(range(k), repeat=G.n))


def cheeger_brute(G, variant: str) -> float | None:
    """Plain-Python enumeration of the set-based Cheeger constants."""
    V = set(range(G.n))
    nbr = [set(G.adj[i]) | {i} for i in range(G.n)]
    deg = [len(G.adj[i]) for i in range(G.n)]
    best = math.inf
    for r in range(1, G.n):
        for S in itertools.combinations(range(G.n), r):
            S = set(S)
            Sc = V - S
            cut = sum((i in S) != (j in S) for i, j in G.edges)
            crossing = [i for i in V if nbr[i] & S and nbr[i] & Sc]
            if variant == "classic":
                num, den = cut, min(sum(deg[i] for i in S), sum(deg[i] for i in Sc))
            elif variant == "expansion":
                num, den = cut, min(len(S), len(Sc))
            elif variant == "multiplicative":
                num, den = cut, len(S) * len(Sc)
            elif variant == "h_int":
                num, den = sum(i in S for i in crossing), min(len(S), len(Sc))
            elif variant == "h_ext":
                num, den = sum(i in Sc for i in crossing), min(len(S), len(Sc))
            elif variant == "h_ver":
                num, den = len(crossing), min(len(S), len(Sc))
            else:
                raise ValueError(variant)
            if den > 0:
                best = min(best, num / den)
    return None if best == math.inf else best


# ---------------------------------------------------------------------------
# Topology


def rank_gf2_dense(M: np.ndarray) -> int:
    M = (np.asarray(M) % 2).astype(np.uint8)
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] ^= M[r]
        r += 1
        if r == rows:
            break
    return r


def betti_dense(simplices) -> tuple[int, ...]:
    S = sorted({tuple(sorted(s)) for s in simplices if len(s)}, key=lambda s: (len(s), s))
    top = max(len(s) for s in S) - 1
    by = {d: [s for s in S if len(s) == d + 1] for d in range(top + 1)}
    idx = {d: {s: k for k, s in enumerate(by[d])} for d in by}
    ranks = {}
    for d in range(1, top + 1):
        M = np.zeros((len(by[d - 1]), len(by[d])), dtype=np.uint8)
        for k, s in enumerate(by[d]):
            for v in range(len(s)):
                M[idx[d - 1][s[:v] + s[v + 1:]], k] = 1
        ranks[d] = rank_gf2_dense(M)
    return tuple(len(by[d]) - ranks.get(d, 0) - ranks.get(d + 1, 0) for d in range(top + 1))


def stirling2(a: int, b: int) -> int:
    if a == b:
        return 1
    if b == 0 or b > a:
        return 0
    return b * stirling2(a - 1, b) + stirling2(a - 1, b - 1)


def subdivision_counts(face_sizes) -> list[int]:
    """Faces of the barycentric subdivision: chains ending at a face of size s
    with m+1 elements number m+1 factorial times S(s, m+1)."""
    top = max(face_sizes)
    return [sum(math.factorial(m + 1) * stirling2(s, m + 1) for s in face_sizes) for m in range(top)]
