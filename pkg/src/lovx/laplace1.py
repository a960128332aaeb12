"""Graph 1-Laplacian with boundary: eigenpair verification, Rayleigh
quotients and nodal domains.

Deciding whether (mu, x) is an eigenpair means finding selections
z_ij in Sgn(x_i - x_j) (antisymmetric) and c_i in Sgn(x_i) that satisfy
one linear equation per vertex. That is a bounded linear feasibility problem,
solved here by an exact phase-one simplex over rationals, with a floating
point LP as fallback for large instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphinv.graph import Graph

ZERO_TOL = 1e-12
EXACT_LIMIT = 200


@dataclass
class EigenCandidate:
    x: np.ndarray
    mu: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if not np.all(np.isfinite(self.x)) or not np.isfinite(self.mu):
            raise ValueError("candidate must be finite")
        if np.all(np.abs(self.x) <= ZERO_TOL):
            raise ValueError("eigenvector candidate must be nonzero")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")

    @classmethod
    def from_json(cls, data: dict) -> "EigenCandidate":
        return cls(np.asarray(data["x"], dtype=float), float(data["mu"]))


def sign_interval(t: float, zero_tol: float = ZERO_TOL) -> tuple[int, int]:
    """Sgn(t) as an interval: (1, 1), (-1, -1) or (-1, 1) near zero."""
    if abs(t) <= zero_tol:
        return (-1, 1)
    return (1, 1) if t > 0 else (-1, -1)


# ---------------------------------------------------------------------------
# Bounded linear feasibility


@dataclass
class _System:
    """sum_k rows[r][k] * v_k = rhs[r], with lo_k <= v_k <= hi_k."""

    names: list
    lo: list
    hi: list
    rows: list
    rhs: list


def _simplex_phase_one(A: list[list[Fraction]], b: list[Fraction], slack_rows: dict[int, int]):
    """Exact phase one for A w = b, w >= 0 (Bland's rule).

    ``slack_rows`` maps a row to a column that is a unit vector there and
    zero elsewhere, so it can start in the basis; other rows get artificials.
    Returns w or None when infeasible.
    """
    m, N = len(A), len(A[0]) if A else 0
    T = [row[:] for row in A]
    rhs = b[:]
    for r in range(m):
        if rhs[r] < 0 and r not in slack_rows:
            T[r] = [-v for v in T[r]]
            rhs[r] = -rhs[r]
    art = [r for r in range(m) if r not in slack_rows]
    for r in range(m):
        T[r] += [Fraction(1) if (a == r) else Fraction(0) for a in art]
    total = N + len(art)
    basis = [slack_rows[r] if r in slack_rows else N + art.index(r) for r in range(m)]
    # objective: minimize the sum of artificials, as reduced costs
    obj = [Fraction(0)] * total
    obj_val = Fraction(0)
    for r in art:
        for j in range(total):
            obj[j] -= T[r][j]
        obj_val -= rhs[r]
    for j in range(N, total):
        obj[j] += 1
    while True:
        enter = next((j for j in range(total) if obj[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for r in range(m):
            if T[r][enter] > 0:
                q = rhs[r] / T[r][enter]
                if best is None or q < best or (q == best and basis[r] < basis[leave]):
                    leave, best = r, q
        if leave is None:
            break  # unbounded direction cannot occur in phase one; defensive
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        rhs[leave] /= piv
        for r in range(m):
            if r != leave and T[r][enter] != 0:
                f = T[r][enter]
                T[r] = [a - f * c for a, c in zip(T[r], T[leave])]
                rhs[r] -= f * rhs[leave]
        f = obj[enter]
        obj = [a - f * c for a, c in zip(obj, T[leave])]
        obj_val -= f * rhs[leave]
        basis[leave] = enter
    if obj_val != 0:
        return None
    w = [Fraction(0)] * N
    for r, j in enumerate(basis):
        if j < N:
            w[j] = rhs[r]
        elif rhs[r] != 0:
            return None
    return w


def _solve_exact(sys: _System, tol: float):
    """Shift v = lo + w, add w + s = hi - lo and a +-tol slack on each equation."""
    lo = [Fraction(v) for v in sys.lo]
    hi = [Fraction(v) for v in sys.hi]
    free = [k for k in range(len(lo)) if hi[k] > lo[k]]
    eps = Fraction(tol)
    nf, ne = len(free), len(sys.rows)
    # columns: w (free vars), s (their bound slacks), e' (equation slacks in [0, 2 eps])
    ncols = 2 * nf + (2 * ne if eps > 0 else 0)
    A, b, slack_rows = [], [], {}
    for r, (row, rhs) in enumerate(zip(sys.rows, sys.rhs)):
        a = [Fraction(0)] * ncols
        rest = Fraction(rhs)
        for k, coef in row.items():
            c = Fraction(coef)
            rest -= c * lo[k]
        for t, k in enumerate(free):
            if k in row:
                a[t] = Fraction(row[k])
        if eps > 0:
            a[2 * nf + r] = Fraction(1)
            rest += eps
        A.append(a)
        b.append(rest)
    for t, k in enumerate(free):
        a = [Fraction(0)] * ncols
        a[t] = Fraction(1)
        a[nf + t] = Fraction(1)
        slack_rows[len(A)] = nf + t
        A.append(a)
        b.append(hi[k] - lo[k])
    if eps > 0:
        for r in range(ne):
            a = [Fraction(0)] * ncols
            a[2 * nf + r] = Fraction(1)
            a[2 * nf + ne + r] = Fraction(1)
            slack_rows[len(A)] = 2 * nf + ne + r
            A.append(a)
            b.append(2 * eps)
    if ncols == 0:
        ok = all(abs(v) <= eps for v in b)
        return (list(lo) if ok else None)
    w = _simplex_phase_one(A, b, slack_rows)
    if w is None:
        return None
    v = list(lo)
    for t, k in enumerate(free):
        v[k] = lo[k] + w[t]
    return v


def _solve_float(sys: _System, tol: float):
    from scipy.optimize import linprog

    K = len(sys.lo)
    M = np.zeros((len(sys.rows), K))
    for r, row in enumerate(sys.rows):
        for k, c in row.items():
            M[r, k] = c
    rhs = np.array(sys.rhs, dtype=float)
    res = linprog(np.zeros(K), A_ub=np.vstack([M, -M]), b_ub=np.concatenate([rhs + tol, -rhs + tol]),
                  bounds=list(zip(sys.lo, sys.hi)), method="highs")
    return list(res.x) if res.status == 0 else None


def _solve(sys: _System, tol: float, exact: bool | None):
    use_exact = len(sys.lo) <= EXACT_LIMIT if exact is None else exact
    if not use_exact:
        return _solve_float(sys, tol), "float"
    v = _solve_exact(sys, 0.0)
    if v is None and tol > 0:
        return _solve_exact(sys, tol), "exact+tol"
    return v, "exact"


# ---------------------------------------------------------------------------
# Eigenpair systems


@dataclass
class EigenReport:
    feasible: bool
    method: str
    z: dict | None = None
    c: dict | None = None
    s: dict | None = None
    max_residual: float | None = None

    def to_json(self) -> dict:
        def keyed(d):
            return None if d is None else {f"{k[0]},{k[1]}" if isinstance(k, tuple) else str(k): float(v)
                                           for k, v in d.items()}
        return {"feasible": self.feasible, "method": self.method, "z": keyed(self.z), "c": keyed(self.c),
                "s": keyed(self.s), "max_residual": self.max_residual}


def _check_boundary(G: Graph):
    if G.interior is None:
        raise ValueError("graph needs an interior/boundary split")


def _build(G: Graph, cand: EigenCandidate, kind: str):
    _check_boundary(G)
    x, mu = cand.x, float(cand.mu)
    if len(x) != G.n:
        raise ValueError(f"x must have {G.n} entries")
    A, dA = G.interior, G.boundary
    closure = A | dA
    if np.all(np.abs(x[sorted(closure)]) <= ZERO_TOL):
        raise ValueError("x vanishes on the closure of the interior")
    names, lo, hi = [], [], []
    zidx, cidx, sidx = {}, {}, {}

    def var(name, iv):
        names.append(name)
        lo.append(iv[0])
        hi.append(iv[1])
        return len(names) - 1

    if kind == "dirichlet":
        bad = [i for i in dA if abs(x[i]) > ZERO_TOL]
        if bad:
            raise ValueError(f"Dirichlet candidate must vanish on the boundary; nonzero at {sorted(bad)}")
        edges = [(i, j) for i, j in G.edges if i in A and j in A]
    else:
        edges = [(i, j) for i, j in G.edges if (i in A or j in A) and i in closure and j in closure]
    for i, j in edges:
        zidx[(i, j)] = var(("z", i, j), sign_interval(x[i] - x[j]))
    for i in sorted(A):
        cidx[i] = var(("c", i), sign_interval(x[i]))
        if kind == "dirichlet":
            sidx[i] = var(("s", i), sign_interval(x[i]))
    rows, rhs = [], []
    deg, p = G.deg, G.boundary_degree if kind == "dirichlet" else None

    def z_terms(i, row, allowed):
        for (a, b), k in zidx.items():
            if a == i and b in allowed:
                row[k] = row.get(k, 0.0) + 1.0
            elif b == i and a in allowed:
                row[k] = row.get(k, 0.0) - 1.0  # z_ba = -z_ab

    for i in sorted(A):
        row: dict = {}
        if kind == "dirichlet":
            z_terms(i, row, A)
            if p[i]:
                row[cidx[i]] = float(p[i])
            row[sidx[i]] = row.get(sidx[i], 0.0) - mu * deg[i]
        else:
            z_terms(i, row, closure)
            row[cidx[i]] = row.get(cidx[i], 0.0) - mu * deg[i]
        rows.append(row)
        rhs.append(0.0)
    if kind == "neumann":
        for i in sorted(dA):
            row = {}
            z_terms(i, row, A)
            rows.append(row)
            rhs.append(0.0)
    return _System(names, lo, hi, rows, rhs), zidx, cidx, sidx


def _verify(G: Graph, cand: EigenCandidate, kind: str, tol: float, exact: bool | None) -> EigenReport:
    sys, zidx, cidx, sidx = _build(G, cand, kind)
    v, method = _solve(sys, tol, exact)
    if v is None:
        return EigenReport(False, method)
    resid = max((abs(sum(float(c) * float(v[k]) for k, c in row.items()) - r) for row, r in zip(sys.rows, sys.rhs)),
                default=0.0)
    return EigenReport(True, method, {e: float(v[k]) for e, k in zidx.items()},
                       {i: float(v[k]) for i, k in cidx.items()},
                       {i: float(v[k]) for i, k in sidx.items()} if sidx else None, float(resid))


def verify_dirichlet_eigenpair(G: Graph, cand: EigenCandidate, tol: float = 1e-9,
                               exact: bool | None = None) -> EigenReport:
    """Exists z_ij in Sgn(x_i - x_j), c_i, s_i in Sgn(x_i) with
    sum_{j ~ i, j in A} z_ij + p_i c_i = mu d_i s_i for every i in A."""
    return _verify(G, cand, "dirichlet", tol, exact)


def verify_neumann_eigenpair(G: Graph, cand: EigenCandidate, tol: float = 1e-9,
                             exact: bool | None = None) -> EigenReport:
    """Exists z_ij in Sgn(x_i - x_j), c_i in Sgn(x_i) with
    sum_{j ~ i, j in closure} z_ij = mu d_i c_i for i in A and
    sum_{j ~ i, j in A} z_ij = 0 for i on the boundary."""
    return _verify(G, cand, "neumann", tol, exact)


# ---------------------------------------------------------------------------
# Quotients and nodal domains


def rayleigh_1(G: Graph, x) -> float:
    """sum over edges |x_i - x_j| / sum_i d_i |x_i|."""
    x = np.asarray(x, dtype=float)
    den = float(np.abs(x) @ G.deg)
    if den <= 0:
        raise ValueError("zero denominator")
    i, j = G.edge_array
    return float(np.abs(x[i] - x[j]).sum()) / den


def dirichlet_rayleigh(G: Graph, x) -> float:
    """(sum over interior edges |x_i - x_j| + sum_{i in A} p_i |x_i|) / sum_{i in A} d_i |x_i|."""
    _check_boundary(G)
    x = np.asarray(x, dtype=float)
    A = sorted(G.interior)
    den = float(np.abs(x[A]) @ G.deg[A])
    if den <= 0:
        raise ValueError("zero denominator")
    inner = sum(abs(x[i] - x[j]) for i, j in G.edges if i in G.interior and j in G.interior)
    return float(inner + np.abs(x[A]) @ G.boundary_degree[A]) / den


def neumann_rayleigh(G: Graph, x) -> float:
    """Edges meeting A inside the closure, over min_c sum_{i in A} d_i |x_i - c|."""
    _check_boundary(G)
    x = np.asarray(x, dtype=float)
    A, cl = G.interior, G.closure
    num = sum(abs(x[i] - x[j]) for i, j in G.edges if (i in A or j in A) and i in cl and j in cl)
    a = sorted(A)
    xa, w = x[a], G.deg[a]
    den = float(min((w * np.abs(xa - t)).sum() for t in xa))
    if den <= 0:
        raise ValueError("zero denominator")
    return float(num) / den


def nodal_domains(G: Graph, x, zero_tol: float = ZERO_TOL) -> tuple[int, list[dict]]:
    """Connected components of the subgraphs induced on {x > 0} and {x < 0}."""
    x = np.asarray(x, dtype=float)
    out = []
    for sign, sel in ((1, x > zero_tol), (-1, x < -zero_tol)):
        mask = sum(1 << i for i in range(G.n) if sel[i])
        if mask:
            out += [{"sign": sign, "vertices": comp} for comp in G.components(mask)]
    return len(out), out
