"""Graph invariants computed by enumeration and through their continuous
ratio representations.

Each invariant exposes an exact discrete routine and the matching
continuous objective. The continuous value at the indicator of the discrete
optimizer must equal the discrete optimum, and no other point may beat it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np

from ..setfun import DiscreteFunction, members, popcount
from ..solvers import FractionalProblem, Region, SolverConfig, mixed_ipsd, multistart, sum_terms
from .catalog import edge_plus, inf_norm, total_variation
from .graph import Graph
from .terms import edge_plus_term, inf_norm_term, total_variation_term, weighted_l1_term

ENUM_LIMIT = 20


@dataclass
class InvariantResult:
    name: str
    value: float | None = None
    witness: Any = None
    continuous: float | None = None
    continuous_at_witness: float | None = None
    certified: bool = True
    details: dict = field(default_factory=dict)

    @property
    def gap(self) -> float | None:
        if self.value is None or self.continuous is None:
            return None
        return float(self.continuous - self.value)

    def to_json(self) -> dict:
        def conv(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, (list, tuple)):
                return [conv(u) for u in v]
            if isinstance(v, dict):
                return {str(k): conv(u) for k, u in v.items()}
            return v

        return {"name": self.name, "value": conv(self.value), "witness": conv(self.witness),
                "continuous": conv(self.continuous), "continuous_at_witness": conv(self.continuous_at_witness),
                "gap": self.gap, "certified": self.certified, "details": conv(self.details)}


def _guard(n: int, limit: int = ENUM_LIMIT, what: str = "enumeration"):
    if n > limit:
        raise ValueError(f"{what} limited to n <= {limit}, got n={n}")


@lru_cache(maxsize=32)
def membership(n: int) -> np.ndarray:
    """Boolean (2^n, n) table; row m lists the members of mask m."""
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def inner_edge_counts(G: Graph) -> np.ndarray:
    M = membership(G.n)
    i, j = G.edge_array
    return (M[:, i] & M[:, j]).sum(axis=1)


def _method_flags(method: str) -> tuple[bool, bool]:
    if method not in ("discrete", "continuous", "both"):
        raise ValueError("method must be discrete, continuous or both")
    return method != "continuous", method != "discrete"


def _to_mask(vs) -> int:
    return sum(1 << int(v) for v in vs)


# ---------------------------------------------------------------------------
# Independence number


def independence_objective(G: Graph, x) -> float | np.ndarray:
    """(I-(x) + I+(x) - 2 sum_i (deg_i - 1)|x_i|) / (2 |x|_inf), as written
    (isolated vertices get weight -1)."""
    X = np.atleast_2d(np.asarray(x, dtype=float))
    num = total_variation(G, X) + edge_plus(G, X) - 2 * np.abs(X) @ (G.deg - 1)
    r = num / (2 * inf_norm(X))
    return float(r[0]) if np.ndim(x) == 1 else r


def independence_problem(G: Graph) -> FractionalProblem:
    """Max-sense DC problem; isolated vertices move their -1 weight to the concave side."""
    n = G.n
    w = G.deg - 1
    F1 = sum_terms(total_variation_term(n, G.edges), edge_plus_term(n, G.edges),
                   weighted_l1_term(2 * np.maximum(-w, 0)))
    F2 = weighted_l1_term(2 * np.maximum(w, 0))
    return FractionalProblem(n, F1, inf_norm_term().scaled(2.0), F2=F2, region=Region("sphere"),
                             sense="max", rounding="pair", name="independence")


def _alpha_enum(G: Graph) -> tuple[int, int]:
    """max_S #S - #E(S) and a maximum independent set attaining it."""
    _guard(G.n)
    score = membership(G.n).sum(axis=1) - inner_edge_counts(G)
    best = int(score.max())
    inner = inner_edge_counts(G)
    cand = np.flatnonzero((score == best) & (inner == 0))
    return best, int(cand[0])


def independence_number(G: Graph, method: str = "discrete", cfg: SolverConfig | None = None,
                        starts: int = 20) -> InvariantResult:
    do_d, do_c = _method_flags(method)
    res = InvariantResult("independence_number")
    if do_d:
        iso = [v for v in range(G.n) if G.deg[v] == 0]
        core_vs = [v for v in range(G.n) if G.deg[v] > 0]
        if core_vs:
            idx = {v: t for t, v in enumerate(core_vs)}
            core = Graph(len(core_vs), [(idx[i], idx[j]) for i, j in G.edges])
            a, m = _alpha_enum(core)
            S = [core_vs[t] for t in members(m)] + iso
        else:
            a, S = 0, iso
        res.value = a + len(iso)
        res.witness = sorted(S)
        res.continuous_at_witness = independence_objective(G, _indicator(G.n, S))
        res.details["isolated"] = iso
    if do_c:
        r, x, traces = multistart(mixed_ipsd, independence_problem(G), cfg or SolverConfig(), starts)
        res.continuous = r
        res.certified = False
        res.details["continuous_point"] = x
        res.details["statuses"] = [t.status for t in traces]
    return res


def _indicator(n: int, S) -> np.ndarray:
    x = np.zeros(n)
    x[list(S)] = 1.0
    return x


# ---------------------------------------------------------------------------
# k-independence


def k_independence_number(G: Graph, k: int) -> InvariantResult:
    """Largest vertex set with pairwise distances > k, via the k-th distance power."""
    if k < 1:
        raise ValueError("k must be at least 1")
    _guard(G.n, 16)
    H = G.power(k)
    base = independence_number(H)
    res = InvariantResult("k_independence_number", base.value, base.witness)
    x = _indicator(G.n, base.witness)
    res.continuous_at_witness = independence_objective(H, x)
    res.details["quadratic_form_at_witness"] = quadratic_independence_ratio(G, k, x)
    return res


def quadratic_independence_ratio(G: Graph, k: int, x) -> float:
    """|x|_1^2 / (|x|_1^2 - 2 sum_{i<j, dist(i,j) > k} x_i x_j)."""
    x = np.asarray(x, dtype=float)
    far = np.triu(G.distances > k, 1)
    s = np.abs(x).sum() ** 2
    return float(s / (s - 2 * float(x @ far @ x)))


# ---------------------------------------------------------------------------
# Chromatic number


def _colorable(G: Graph, k: int) -> list[int] | None:
    order = sorted(range(G.n), key=lambda v: -G.deg[v])
    color = [-1] * G.n

    def place(t: int, used: int) -> bool:
        if t == len(order):
            return True
        v = order[t]
        banned = {color[u] for u in G.adj[v] if color[u] >= 0}
        for c in range(min(used + 1, k)):
            if c not in banned:
                color[v] = c
                if place(t + 1, max(used, c + 1)):
                    return True
                color[v] = -1
        return False

    return list(color) if place(0, 0) else None


def coloring_value(G: Graph, classes) -> float:
    """n sum #E(A_i) + sum sgn #A_i + n (n - #union A_i) over an n-tuple of sets (padded with empties)."""
    n = G.n
    masks = [_to_mask(c) if not isinstance(c, (int, np.integer)) else int(c) for c in classes]
    if len(masks) > n:
        raise ValueError("at most n classes")
    masks += [0] * (n - len(masks))
    union = 0
    for m in masks:
        union |= m
    return float(n * sum(G.inner_edges(m) for m in masks) + sum(1 for m in masks if m)
                 + n * (n - popcount(union)))


def coloring_function(G: Graph) -> DiscreteFunction:
    """The coloring function on n-tuples of disjoint pairs; each slot uses A_i + B_i."""
    n = G.n
    return DiscreteFunction(n, "kway_pair", n, fn=lambda key: coloring_value(G, [a | b for a, b in key]),
                            name="coloring")


def _as_matrices(x, n: int) -> tuple[np.ndarray, bool]:
    X = np.asarray(x, dtype=float)
    single = X.ndim == 2
    X = X[None] if single else X
    if X.shape[1:] != (n, n):
        raise ValueError(f"coloring matrices must be {n}x{n}")
    return X, single


def chromatic_extension(G: Graph, x) -> float | np.ndarray:
    """Extension of the coloring function at x (rows are colour classes):

    n^2 |x|_inf + n |x|_{1-deg,1} + |x|_{inf,1} - n I_{+-,1}(x) - n |x|^{inf,1}.
    """
    n = G.n
    X, single = _as_matrices(x, n)
    A = np.abs(X)
    i, j = G.edge_array
    ipm = 0.5 * (np.abs(X[:, :, i] - X[:, :, j]) + np.abs(X[:, :, i] + X[:, :, j])).sum(axis=(1, 2))
    v = (n * n * A.max(axis=(1, 2)) + n * (A * G.deg[None, None, :]).sum(axis=(1, 2))
         + A.max(axis=2).sum(axis=1) - n * ipm - n * A.max(axis=1).sum(axis=1))
    return float(v[0]) if single else v


def chromatic_objective(G: Graph, x) -> float | np.ndarray:
    """n^2 minus the supremand of the continuous chromatic formula; its infimum is the chromatic number."""
    X, single = _as_matrices(x, G.n)
    v = chromatic_extension(G, X) / np.abs(X).max(axis=(1, 2))
    return float(v[0]) if single else v


def chromatic_objective_intro(G: Graph, x) -> float | np.ndarray:
    """The per-index arrangement of the same formula, kept literally:
    n^2 - sum_k [n sum_E (|x_ik - x_jk| + |x_ik + x_jk|) + 2n|x^k|_inf
                 - 2n deg_k |x^k|_1 - 2|x^{,k}|_inf] / (2|x|_inf),
    where x^k is row k and x^{,k} column k. Edges act on the first index, so
    rows here are vertices and columns colours: the value equals
    chromatic_objective at the transposed matrix."""
    n = G.n
    X, single = _as_matrices(x, n)
    A = np.abs(X)
    i, j = G.edge_array
    t1 = n * (np.abs(X[:, i, :] - X[:, j, :]) + np.abs(X[:, i, :] + X[:, j, :])).sum(axis=(1, 2))
    t2 = 2 * n * A.max(axis=2).sum(axis=1)
    t3 = 2 * n * (G.deg[None, :] * A.sum(axis=2)).sum(axis=1)
    t4 = 2 * A.max(axis=1).sum(axis=1)
    v = n * n - (t1 + t2 - t3 - t4) / (2 * A.max(axis=(1, 2)))
    return float(v[0]) if single else v


def coloring_matrix(n: int, classes) -> np.ndarray:
    X = np.zeros((n, n))
    for r, c in enumerate(classes):
        X[r, list(c)] = 1.0
    return X


def _classes_from_colors(color: list[int]) -> list[list[int]]:
    k = max(color) + 1 if color else 0
    return [[v for v, c in enumerate(color) if c == t] for t in range(k)]


def _greedy_classes(G: Graph, order) -> list[list[int]]:
    color = [-1] * G.n
    for v in order:
        banned = {color[u] for u in G.adj[v]}
        c = 0
        while c in banned:
            c += 1
        color[v] = c
    return _classes_from_colors(color)


def chromatic_number(G: Graph, method: str = "discrete", seed: int = 42, samples: int = 200,
                     climb_steps: int = 200) -> InvariantResult:
    """Exact chromatic number by backtracking (n <= 12) and, optionally, a
    non-certified continuous search of the chromatic formula."""
    do_d, do_c = _method_flags(method)
    res = InvariantResult("chromatic_number")
    if do_d:
        _guard(G.n, 12, "exact colouring")
        for k in range(1, G.n + 1):
            color = _colorable(G, k)
            if color is not None:
                break
        classes = _classes_from_colors(color)
        res.value = len(classes)
        res.witness = classes
        res.details["coloring_value"] = coloring_value(G, classes)
        res.continuous_at_witness = chromatic_objective(G, coloring_matrix(G.n, classes))
        res.details["intro_form_at_witness"] = chromatic_objective_intro(G, coloring_matrix(G.n, classes).T)
    if do_c:
        best, X = chromatic_search(G, seed, samples, climb_steps)
        res.continuous = best
        res.certified = False
        res.details["continuous_point"] = X
    return res


def chromatic_search(G: Graph, seed: int = 42, samples: int = 200, climb_steps: int = 200):
    """Minimize the chromatic objective over greedy colouring indicators,
    random matrices and a random-perturbation descent from the best ones."""
    n = G.n
    rng = np.random.default_rng(seed)
    cands = [coloring_matrix(n, _greedy_classes(G, rng.permutation(n))) for _ in range(samples // 4 + 1)]
    cands += list(rng.normal(size=(samples, n, n)))
    X = np.array(cands)
    vals = chromatic_objective(G, X)
    keep = np.argsort(vals, kind="stable")[:8]
    pts, cur = X[keep].copy(), vals[keep].copy()
    for t in range(climb_steps):
        scale = 0.5 / math.sqrt(t + 1)
        prop = pts + scale * rng.normal(size=pts.shape)
        pv = chromatic_objective(G, prop)
        better = pv < cur
        pts[better], cur[better] = prop[better], pv[better]
    j = int(np.argmin(np.concatenate([vals, cur])))
    allX = np.concatenate([X, pts])
    return float(np.concatenate([vals, cur])[j]), allX[j]


def clique_number(G: Graph) -> int:
    _guard(G.n)
    return independence_number(G.complement()).value


def clique_cover_number(G: Graph) -> int:
    return int(chromatic_number(G.complement()).value)


# ---------------------------------------------------------------------------
# Max k-cut


def _labelings(n: int, k: int) -> np.ndarray:
    """All labelings with vertex 0 in part 0 (the rest by symmetry), as int8 rows."""
    if n == 1:
        return np.zeros((1, 1), dtype=np.int8)
    codes = np.arange(k ** (n - 1), dtype=np.int64)
    digits = (codes[:, None] // (k ** np.arange(n - 1, dtype=np.int64))) % k
    return np.hstack([np.zeros((len(codes), 1), dtype=np.int8), digits.astype(np.int8)])


def max_kcut(G: Graph, k: int, method: str = "discrete", seed: int = 42, samples: int = 2000) -> InvariantResult:
    """Maximum number of edges cut by a partition of V into at most k parts."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > G.n:
        raise ValueError(f"k={k} exceeds the number of vertices {G.n}")
    do_d, do_c = _method_flags(method)
    res = InvariantResult("max_kcut")
    res.details["k"] = k
    if do_d:
        _guard(G.n, 12, "partition enumeration")
        L = _labelings(G.n, k)
        i, j = G.edge_array
        cut = (L[:, i] != L[:, j]).sum(axis=1) if G.m else np.zeros(len(L), dtype=int)
        b = int(np.argmax(cut))
        res.value = int(cut[b])
        parts = [[v for v in range(G.n) if L[b, v] == t] for t in range(k)]
        res.witness = parts
        res.continuous_at_witness = kcut_ratio(G, partition_matrix(G.n, parts))
    if do_c:
        best, X = kcut_search(G, k, seed, samples)
        res.continuous = best
        res.certified = False
        res.details["continuous_point"] = X
    return res


def partition_matrix(n: int, parts) -> np.ndarray:
    """Indicator rows of the first k-1 parts; the last part is implicit."""
    return coloring_matrix(n, parts[:-1])[: len(parts) - 1]


def kcut_ratio(G: Graph, x) -> float | np.ndarray:
    """(sum_i TV(x^i) + TV(max_i x^i)) / (2 max x) for nonnegative rows with disjoint supports."""
    X = np.asarray(x, dtype=float)
    single = X.ndim == 2
    X = X[None] if single else X
    m, r, n = X.shape
    tv_rows = total_variation(G, X.reshape(m * r, n)).reshape(m, r).sum(axis=1)
    tv_max = total_variation(G, X.max(axis=1))
    v = (tv_rows + tv_max) / (2 * X.max(axis=(1, 2)))
    return float(v[0]) if single else v


def kcut_search(G: Graph, k: int, seed: int = 42, samples: int = 2000):
    """Best ratio over random feasible points: every vertex picks one of k
    parts (the last one means zero) and a random positive height."""
    rng = np.random.default_rng(seed)
    lab = rng.integers(0, k, size=(samples, G.n))
    lab[:, 0] = 0
    h = rng.uniform(0.05, 1.0, size=(samples, G.n))
    h[: samples // 2] = 1.0
    X = np.zeros((samples, k - 1, G.n))
    for t in range(k - 1):
        X[:, t, :] = np.where(lab == t, h, 0.0)
    vals = kcut_ratio(G, X)
    j = int(np.argmax(vals))
    return float(vals[j]), X[j]


# ---------------------------------------------------------------------------
# Matching number


def matching_number(G: Graph, method: str = "discrete", seed: int = 42, samples: int = 2000) -> InvariantResult:
    do_d, do_c = _method_flags(method)
    res = InvariantResult("matching_number")
    if do_d:
        _guard(G.n)
        res.value, res.witness = _max_matching(G)
        if G.m:
            y = np.array([1.0 if e in res.witness else 0.0 for e in G.edges])
            res.continuous_at_witness = matching_ratio(G, y)
        else:
            res.continuous_at_witness = 0.0
    if do_c:
        if not G.m:
            res.continuous = 0.0
        else:
            rng = np.random.default_rng(seed)
            Y = rng.uniform(0, 1, size=(samples, G.m))
            Y[: samples // 2] *= rng.random((samples // 2, G.m)) < 0.5
            Y = Y[Y.sum(axis=1) > 0]
            vals = matching_ratio(G, Y)
            res.continuous = float(vals.max())
        res.certified = False
    return res


def _max_matching(G: Graph) -> tuple[int, list]:
    if not G.m:
        return 0, []

    @lru_cache(maxsize=None)
    def best(free: int) -> tuple[int, tuple]:
        if free == 0:
            return 0, ()
        v = (free & -free).bit_length() - 1
        rest = free & ~(1 << v)
        top = best(rest)
        for w in sorted(G.adj[v]):
            if (rest >> w) & 1:
                sub = best(rest & ~(1 << w))
                if sub[0] + 1 > top[0]:
                    top = (sub[0] + 1, ((min(v, w), max(v, w)),) + sub[1])
        return top

    val, es = best((1 << G.n) - 1)
    best.cache_clear()
    return val, sorted(es)


def matching_ratio(G: Graph, y) -> float | np.ndarray:
    """|y|_1^2 / (|y|_1^2 - 2 sum over unordered disjoint edge pairs of y_e y_e')."""
    Y = np.atleast_2d(np.asarray(y, dtype=float))
    es = G.edges
    D = np.array([[1.0 if (a != b and not set(es[a]) & set(es[b])) else 0.0 for b in range(len(es))]
                  for a in range(len(es))])
    s = Y.sum(axis=1) ** 2 if np.all(Y >= 0) else np.abs(Y).sum(axis=1) ** 2
    q = np.einsum("mi,ij,mj->m", Y, D, Y)  # ordered pairs, i.e. twice the unordered sum
    v = s / (s - q)
    return float(v[0]) if np.ndim(y) == 1 else v
