"""Cheeger-type constants: exact enumeration, continuous ratio forms and
solver problems; the Cheeger-like edge constants; the Poincare sandwich."""

from __future__ import annotations

import numpy as np

from ..setfun import from_set_fn, popcount
from ..solvers import FractionalProblem, Region, SolverConfig, Term, mixed_ipsd, multistart
from .catalog import functional_catalog, nbr_max, nbr_min, pairwise_spread, total_variation, weighted_median_spread
from .graph import Graph
from .invariants import InvariantResult, _guard, membership
from .terms import (abs_linear_term, edge_matrix, nbr_range_term, total_variation_term, weighted_l1_term,
                    weighted_median_term)

VARIANTS = ("classic", "expansion", "multiplicative", "isoperimetric", "h_int", "h_ext", "h_ver",
            "dirichlet", "neumann")
BOUNDARY_VARIANTS = ("dirichlet", "neumann")
VERTEX_VARIANTS = {"h_int": "int", "h_ext": "ext", "h_ver": "ver"}


def _domain(G: Graph, variant: str) -> list[int]:
    if variant == "dirichlet":
        return sorted(G.interior)
    if variant == "neumann":
        return sorted(G.closure)
    return list(range(G.n))


def _touching_interior_edges(G: Graph, variant: str) -> list:
    A = G.interior
    if variant == "dirichlet":
        return [e for e in G.edges if e[0] in A or e[1] in A]
    dom = G.closure
    return [e for e in G.edges if (e[0] in A or e[1] in A) and e[0] in dom and e[1] in dom]


def _vertex_boundary_counts(G: Graph, M: np.ndarray, masks: np.ndarray):
    """(#int, #ext, #ver) boundary sizes for each row of the membership table."""
    b_int = np.zeros(len(masks), dtype=np.int64)
    b_ext = np.zeros(len(masks), dtype=np.int64)
    for i, nb in enumerate(G.closed_nbr_masks):
        hit = masks & nb
        crossing = (hit != 0) & (hit != nb)
        b_int += crossing & M[:, i]
        b_ext += crossing & ~M[:, i]
    return b_int, b_ext, b_int + b_ext


def cheeger_table(G: Graph, variant: str, k: int | None = None):
    """Numerators, denominators and masks of every feasible set of a variant."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; known: {', '.join(VARIANTS)}")
    if variant in BOUNDARY_VARIANTS and G.interior is None:
        raise ValueError(f"variant {variant!r} needs a graph with an interior/boundary split")
    dom = _domain(G, variant)
    _guard(len(dom))
    local = membership(len(dom))
    M = np.zeros((len(local), G.n), dtype=bool)
    M[:, dom] = local
    masks = (M.astype(np.int64) << np.arange(G.n)).sum(axis=1)
    size = M.sum(axis=1)
    deg = G.deg
    i, j = G.edge_array
    full = (1 << G.n) - 1
    if variant in BOUNDARY_VARIANTS:
        es = _touching_interior_edges(G, variant)
        ei = np.array([e[0] for e in es], dtype=int)
        ej = np.array([e[1] for e in es], dtype=int)
        num = (M[:, ei] != M[:, ej]).sum(axis=1) if es else np.zeros(len(M), dtype=int)
        if variant == "dirichlet":
            den = M @ deg
        else:
            inA = np.zeros(G.n, dtype=bool)
            inA[sorted(G.interior)] = True
            volA = float(deg[inA].sum())
            vs = M[:, inA] @ deg[inA]
            den = np.minimum(vs, volA - vs)
        ok = size > 0
    else:
        cut = (M[:, i] != M[:, j]).sum(axis=1) if G.m else np.zeros(len(M), dtype=int)
        proper = (masks != 0) & (masks != full)
        if variant == "classic":
            num, vol = cut, M @ deg
            den = np.minimum(vol, deg.sum() - vol)
        elif variant == "expansion":
            num, den = cut, np.minimum(size, G.n - size)
        elif variant == "multiplicative":
            num, den = cut, size * (G.n - size)
        elif variant == "isoperimetric":
            if k is None or k < 1:
                raise ValueError("isoperimetric profile needs k >= 1")
            num, den = cut, size.astype(float)
            proper = (size >= 1) & (size <= k)
        else:
            counts = dict(zip(("h_int", "h_ext", "h_ver"), _vertex_boundary_counts(G, M, masks)))
            num, den = counts[variant], np.minimum(size, G.n - size)
        ok = proper
    den = np.asarray(den, dtype=float)
    ok = ok & (den > 0)
    return np.asarray(num, dtype=float), den, masks, ok


def cheeger(G: Graph, variant: str = "classic", k: int | None = None, method: str = "discrete",
            cfg: SolverConfig | None = None, starts: int = 10) -> InvariantResult:
    """Exact Cheeger-type constant with its optimal set; optionally also the
    best value found by the mixed IP-SD solver on the continuous form."""
    num, den, masks, ok = cheeger_table(G, variant, k)
    res = InvariantResult(f"cheeger_{variant}")
    res.details.update(variant=variant, k=k)
    if variant == "dirichlet":
        res.details["interior_connected"] = G.interior_connected()
    if not ok.any():
        res.value = None
        res.details["status"] = "infeasible: no set with a positive denominator"
        return res
    ratio = np.where(ok, num / np.where(ok, den, 1.0), np.inf)
    b = int(np.argmin(ratio))
    res.value = float(ratio[b])
    S = [v for v in range(G.n) if (int(masks[b]) >> v) & 1]
    res.witness = S
    res.details.update(numerator=float(num[b]), denominator=float(den[b]))
    x = np.zeros(G.n)
    x[S] = 1.0
    res.continuous_at_witness = cheeger_form(G, variant, k)(x)
    if method in ("both", "continuous"):
        if variant == "isoperimetric":
            res.details["continuous_status"] = "no solver form for the support constraint"
        else:
            prob, dom = cheeger_problem(G, variant)
            r, y, traces = multistart(mixed_ipsd, prob, cfg or SolverConfig(), starts)
            res.continuous = r
            res.details["continuous_point"] = y
            res.details["domain"] = dom
            res.details["statuses"] = [t.status for t in traces]
    elif method != "discrete":
        raise ValueError("method must be discrete, continuous or both")
    return res


# ---------------------------------------------------------------------------
# Continuous forms


def cheeger_form(G: Graph, variant: str, k: int | None = None):
    """Ratio evaluator on full-length vectors (or batches) whose infimum is the constant.

    Boundary variants read only the coordinates of their domain; the
    isoperimetric form is +inf off the support constraint.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    ones = np.ones(G.n)

    def form(x):
        X = np.atleast_2d(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            r = _form_rows(X)
        r = np.where(np.isnan(r), np.inf, r)
        return float(r[0]) if np.ndim(x) == 1 else r

    def _form_rows(X):
        if variant == "classic":
            r = total_variation(G, X) / weighted_median_spread(X, G.deg)
        elif variant == "expansion":
            r = total_variation(G, X) / weighted_median_spread(X, ones)
        elif variant == "multiplicative":
            r = total_variation(G, X) / pairwise_spread(X)
        elif variant == "isoperimetric":
            supp = (np.abs(X) > 0).sum(axis=1)
            r = np.where(supp <= k, total_variation(G, X) / np.abs(X).sum(axis=1), np.inf)
        elif variant in VERTEX_VARIANTS:
            hi, lo = nbr_max(G, X), nbr_min(G, X)
            num = {"h_int": X - lo, "h_ext": hi - X, "h_ver": hi - lo}[variant].sum(axis=1)
            r = num / weighted_median_spread(X, ones)
        else:
            dom = _domain(G, variant)
            Z = np.zeros_like(X)
            Z[:, dom] = X[:, dom]
            es = _touching_interior_edges(G, variant)
            num = sum(np.abs(Z[:, a] - Z[:, b]) for a, b in es) if es else np.zeros(len(X))
            A = sorted(G.interior)
            if variant == "dirichlet":
                den = np.abs(Z[:, A]) @ G.deg[A]
            else:
                den = weighted_median_spread(Z[:, A], G.deg[A])
            r = num / den
        return r

    form.__name__ = f"{variant}_form"
    return form


def cheeger_problem(G: Graph, variant: str) -> tuple[FractionalProblem, list[int]]:
    """Fractional problem for the solvers, on the coordinates of the variant's domain."""
    n = G.n
    if variant == "isoperimetric":
        raise ValueError("the isoperimetric profile has a support constraint the solvers do not model")
    dom = _domain(G, variant)
    if variant in BOUNDARY_VARIANTS:
        pos = {v: t for t, v in enumerate(dom)}
        rows = []
        for a, b in _touching_interior_edges(G, variant):
            r = np.zeros(len(dom))
            if a in pos:
                r[pos[a]] += 1.0
            if b in pos:
                r[pos[b]] -= 1.0
            rows.append(r)
        F1 = abs_linear_term(np.array(rows), "boundary TV") if rows else Term.zero()
        w = np.array([G.deg[v] if v in G.interior else 0.0 for v in dom])
        if variant == "dirichlet":
            G1, rounding = weighted_l1_term(w, "vol"), "pair"
        else:
            disc = from_set_fn(len(dom), lambda m: _min_weight(w, m), name="min interior volume")
            G1, rounding = weighted_median_term(w, disc, "interior spread"), "set"
        return FractionalProblem(len(dom), F1, G1, region=Region("sphere"), rounding=rounding,
                                 name=f"cheeger_{variant}"), dom
    F1 = total_variation_term(n, G.edges)
    if variant in VERTEX_VARIANTS:
        nb = G.closed_nbr_lists
        which = VERTEX_VARIANTS[variant]
        disc = from_set_fn(n, lambda m: _vertex_boundary(G, m, which), name=variant)
        F1 = nbr_range_term(nb, which, disc)
    if variant == "classic":
        G1 = weighted_median_term(G.deg, functional_catalog("min_volume", G)[0], "min volume")
    elif variant == "multiplicative":
        iu, ju = np.triu_indices(n, 1)
        D = np.zeros((len(iu), n))
        D[np.arange(len(iu)), iu] = 1.0
        D[np.arange(len(iu)), ju] = -1.0
        G1 = abs_linear_term(D, "pair spread")
    else:
        G1 = weighted_median_term(np.ones(n), from_set_fn(n, lambda m: min(popcount(m), n - popcount(m))),
                                  "min size")
    return FractionalProblem(n, F1, G1, region=Region("sphere"), rounding="set", name=f"cheeger_{variant}"), dom


def _min_weight(w: np.ndarray, m: int) -> float:
    s = float(sum(w[i] for i in range(len(w)) if (m >> i) & 1))
    return min(s, float(w.sum()) - s)


def _vertex_boundary(G: Graph, mask: int, which: str) -> int:
    c = 0
    for i, nb in enumerate(G.closed_nbr_masks):
        hit = mask & nb
        if hit and hit != nb:
            inside = (mask >> i) & 1
            c += which == "ver" or (which == "int" and inside) or (which == "ext" and not inside)
    return c


# ---------------------------------------------------------------------------
# Cheeger-like edge constants


def common_neighbours(G: Graph) -> np.ndarray:
    return np.array([len(G.adj[a] & G.adj[b]) for a, b in G.edges], dtype=float)


def cheeger_like(G: Graph, seed: int = 42, samples: int = 500) -> InvariantResult:
    """max over edges of 1/deg v + 1/deg w, with the neighbourhood companion
    min over edges of #common neighbours / max(deg v, deg w); both checked
    against their continuous forms on random edge weights."""
    if not G.m:
        raise ValueError("the Cheeger-like constant needs at least one edge")
    c = 1.0 / G.deg
    vals = np.array([c[a] + c[b] for a, b in G.edges])
    b = int(np.argmax(vals))
    res = InvariantResult("cheeger_like", float(vals[b]), G.edges[b])
    t = common_neighbours(G)
    dmax = np.array([max(G.deg[a], G.deg[b]) for a, b in G.edges])
    comp = t / dmax
    bc = int(np.argmin(comp))
    rng = np.random.default_rng(seed)
    gam = rng.normal(size=(samples, G.m))
    gam[: samples // 4] *= rng.random((samples // 4, G.m)) < 0.4
    gam = gam[np.abs(gam).sum(axis=1) > 0]
    e_best = np.zeros(G.m)
    e_best[b] = 1.0
    e_comp = np.zeros(G.m)
    e_comp[bc] = 1.0
    res.continuous = float(cheeger_like_form(G, gam).max())
    res.continuous_at_witness = cheeger_like_form(G, e_best)
    res.certified = False
    res.details.update(
        companion=float(comp[bc]), companion_edge=G.edges[bc],
        companion_continuous=float(companion_form(G, gam).min()),
        companion_at_witness=companion_form(G, e_comp),
    )
    return res


def cheeger_like_form(G: Graph, gamma) -> float | np.ndarray:
    """sum_v (1/deg v) |sum_{e at v} gamma_e| / sum_e |gamma_e|; edges are
    oriented low -> high, and the orientation signs drop out of the maximum."""
    Y = np.atleast_2d(np.asarray(gamma, dtype=float))
    inc = np.zeros((G.m, G.n))
    for r, (a, b) in enumerate(G.edges):
        inc[r, a] = 1.0
        inc[r, b] = 1.0
    num = np.abs(Y @ inc) @ (1.0 / np.where(G.deg > 0, G.deg, 1.0))
    v = num / np.abs(Y).sum(axis=1)
    return float(v[0]) if np.ndim(gamma) == 1 else v


def companion_form(G: Graph, gamma) -> float | np.ndarray:
    """sum_e |gamma_e| t_e / sum_e |gamma_e| max(deg) with t_e the number of common neighbours."""
    Y = np.abs(np.atleast_2d(np.asarray(gamma, dtype=float)))
    dmax = np.array([max(G.deg[a], G.deg[b]) for a, b in G.edges])
    v = (Y @ common_neighbours(G)) / (Y @ dmax)
    return float(v[0]) if np.ndim(gamma) == 1 else v


# ---------------------------------------------------------------------------
# Poincare profile


def p1_quotient(G: Graph, x) -> float | np.ndarray:
    """sum_i max_{j ~ i} |x_i - x_j| / |x|_1 (the caller keeps <x, 1> = 0)."""
    X = np.atleast_2d(np.asarray(x, dtype=float))
    num = np.zeros(len(X))
    for i in range(G.n):
        nb = sorted(G.adj[i])
        if nb:
            num += np.abs(X[:, [i]] - X[:, nb]).max(axis=1)
    v = num / np.abs(X).sum(axis=1)
    return float(v[0]) if np.ndim(x) == 1 else v


def _p1_term(G: Graph) -> Term:
    # directed neighbour pairs (i, j), grouped by i
    I = np.array([i for i in range(G.n) for j in sorted(G.adj[i])], dtype=int)
    J = np.array([j for i in range(G.n) for j in sorted(G.adj[i])], dtype=int)

    def value(x):
        best = np.zeros(G.n)
        np.maximum.at(best, I, np.abs(x[I] - x[J]))
        return float(best.sum())

    def grad(x):
        d = x[I] - x[J]
        order = np.lexsort((-np.abs(d), I))
        first = order[np.r_[True, I[order][1:] != I[order][:-1]]]
        s = np.where(d[first] >= 0, 1.0, -1.0)
        g = np.zeros(len(x))
        np.add.at(g, I[first], s)
        np.add.at(g, J[first], -s)
        return g

    return Term(value, grad, 1.0, None, "P1 numerator")


def poincare_profile_check(G: Graph, cfg: SolverConfig | None = None, starts: int = 5,
                           tol: float = 1e-9) -> dict:
    """Exact h_int, h_ext, h_ver and an upper estimate of the 1-Poincare
    profile; checks half max(h_int, h_ext) <= estimate <= h_ver."""
    if not G.is_connected():
        raise ValueError("the Poincare profile check needs a connected graph")
    _guard(G.n, 12)
    h = {v: cheeger(G, v) for v in ("h_int", "h_ext", "h_ver")}
    lower = 0.5 * max(h["h_int"].value, h["h_ext"].value)
    upper = h["h_ver"].value
    S = h["h_ver"].witness
    x = np.zeros(G.n)
    x[S] = 1.0
    x -= x.mean()
    at_hver = p1_quotient(G, x)
    # centred indicators of every proper subset
    M = membership(G.n)[1:-1].astype(float)
    Xc = M - M.mean(axis=1, keepdims=True)
    q = p1_quotient(G, Xc)
    best = min(at_hver, float(q.min()))
    solver_best = None
    if starts > 0:
        prob = FractionalProblem(G.n, _p1_term(G), weighted_l1_term(np.ones(G.n)),
                                 region=Region("sphere", zero_sum=True), name="P1")
        r, y, _ = multistart(mixed_ipsd, prob, cfg or SolverConfig(max_iter=30, inner_steps=150), starts)
        solver_best = float(r)
        best = min(best, solver_best)
    holds = lower - tol <= best <= upper + tol and at_hver <= upper + tol
    return {"h_int": h["h_int"].value, "h_ext": h["h_ext"].value, "h_ver": upper,
            "lower": lower, "upper": upper, "p1_at_h_ver_set": at_hver, "p1_solver": solver_best,
            "p1_best": best, "sandwich_holds": bool(holds)}
