"""Convex one-homogeneous terms with closed-form values and subgradients,
used to feed graph objectives to the fractional solvers."""

from __future__ import annotations

import itertools

import numpy as np

from ..lovasz import subdifferential_vertices
from ..setfun import DiscreteFunction
from ..solvers import Term

SIGN_TOL = 1e-12
MAX_VERTICES = 4096


def _sgn(v: np.ndarray) -> np.ndarray:
    s = np.sign(v)
    s[np.abs(v) <= SIGN_TOL] = 0.0
    return s


def abs_linear_term(A: np.ndarray, name: str = "") -> Term:
    """x -> sum_r |<a_r, x>| for the rows a_r of A."""
    A = np.atleast_2d(np.asarray(A, dtype=float))

    def value(x):
        return float(np.abs(A @ x).sum())

    def grad(x):
        return A.T @ _sgn(A @ x)

    def subdiff(x):
        y = A @ x
        s = _sgn(y)
        zero = np.flatnonzero(s == 0)
        if len(zero) > 12:
            zero = zero[:12]  # truncated vertex list; the LP then over-estimates the residual
        out = []
        for signs in itertools.product((-1.0, 1.0), repeat=len(zero)):
            t = s.copy()
            t[zero] = signs
            out.append(A.T @ t)
        return np.array(out)

    return Term(value, grad, 1.0, subdiff, name)


def edge_matrix(n: int, edges, plus: bool = False) -> np.ndarray:
    M = np.zeros((len(edges), n))
    for r, (i, j) in enumerate(edges):
        M[r, i] = 1.0
        M[r, j] = 1.0 if plus else -1.0
    return M


def total_variation_term(n: int, edges, name: str = "TV") -> Term:
    return abs_linear_term(edge_matrix(n, edges), name) if edges else Term.zero()


def edge_plus_term(n: int, edges, name: str = "I+") -> Term:
    return abs_linear_term(edge_matrix(n, edges, plus=True), name) if edges else Term.zero()


def weighted_l1_term(w, name: str = "l1") -> Term:
    w = np.asarray(w, dtype=float)
    if np.all(w == 0):
        return Term.zero()
    if np.any(w < 0):
        raise ValueError("weighted l1 needs nonnegative weights to be convex")
    return abs_linear_term(np.diag(w), name)


def inf_norm_term(name: str = "linf") -> Term:
    def value(x):
        return float(np.abs(x).max())

    def grad(x):
        a = np.abs(x)
        i = int(np.argmax(a))
        g = np.zeros_like(x, dtype=float)
        g[i] = 1.0 if x[i] >= 0 else -1.0
        return g

    def subdiff(x):
        a = np.abs(x)
        top = np.flatnonzero(a >= a.max() - SIGN_TOL)
        out = []
        for i in top:
            for s in ((1.0, -1.0) if a.max() <= SIGN_TOL else ((1.0 if x[i] > 0 else -1.0),)):
                g = np.zeros(len(x))
                g[i] = s
                out.append(g)
        return np.array(out)

    return Term(value, grad, 1.0, subdiff, name)


def weighted_median_term(w, discrete: DiscreteFunction | None = None, name: str = "spread") -> Term:
    """x -> min_t sum_i w_i |x_i - t|.

    The subgradient is w_i * sign(x_i - t*) off the median, with the tied
    coordinates sharing whatever keeps the total at zero (optimality in t).
    ``discrete`` supplies the subdifferential vertices when given.
    """
    w = np.asarray(w, dtype=float)

    def best_t(x):
        costs = (w[:, None] * np.abs(x[:, None] - x[None, :])).sum(axis=0)
        return x[int(np.argmin(costs))]

    def value(x):
        return float((w * np.abs(x - best_t(x))).sum())

    def grad(x):
        t = best_t(x)
        s = _sgn(x - t)
        tie = s == 0
        wt = w[tie].sum()
        if wt > 0:
            s[tie] = -(w[~tie] * s[~tie]).sum() / wt
        return w * s

    sub = (lambda x: subdifferential_vertices(discrete, x, limit=MAX_VERTICES)) if discrete is not None else None
    return Term(value, grad, 1.0, sub, name)


def nbr_range_term(nbrs: list, which: str = "ver", discrete: DiscreteFunction | None = None,
                   name: str = "") -> Term:
    """Sums over vertices i of max_{N(i)} x - min_{N(i)} x ("ver"),
    x_i - min_{N(i)} x ("int") or max_{N(i)} x - x_i ("ext")."""
    if which not in ("ver", "int", "ext"):
        raise ValueError("which must be ver, int or ext")

    def value(x):
        tot = 0.0
        for i, nb in enumerate(nbrs):
            hi = x[nb].max() if which != "int" else x[i]
            lo = x[nb].min() if which != "ext" else x[i]
            tot += hi - lo
        return float(tot)

    def grad(x):
        g = np.zeros(len(x))
        for i, nb in enumerate(nbrs):
            hi = nb[int(np.argmax(x[nb]))] if which != "int" else i
            lo = nb[int(np.argmin(x[nb]))] if which != "ext" else i
            g[hi] += 1.0
            g[lo] -= 1.0
        return g

    sub = (lambda x: subdifferential_vertices(discrete, x, limit=MAX_VERTICES)) if discrete is not None else None
    return Term(value, grad, 1.0, sub, name or f"range_{which}")
