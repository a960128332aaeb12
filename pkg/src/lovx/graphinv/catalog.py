"""Graph functionals with known closed-form extensions.

Each catalog entry pairs a set or pair function on the vertices with a
vectorized closed form of its extension. The two are tested to agree
everywhere, which is what makes the continuous objectives below trustworthy.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..setfun import DiscreteFunction, from_pair_fn, from_set_fn, popcount
from .graph import Graph


def _rows(x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    return (x[None, :], True) if x.ndim == 1 else (x, False)


def _out(v: np.ndarray, single: bool):
    return float(v[0]) if single else v


# ---------------------------------------------------------------------------
# Closed-form building blocks; all take X with shape (m, n) and return (m,)


def total_variation(G: Graph, X: np.ndarray) -> np.ndarray:
    i, j = G.edge_array
    return np.abs(X[:, i] - X[:, j]).sum(axis=1)


def edge_plus(G: Graph, X: np.ndarray) -> np.ndarray:
    """I+(x) = sum over edges of |x_i + x_j|."""
    i, j = G.edge_array
    return np.abs(X[:, i] + X[:, j]).sum(axis=1)


def weighted_median_spread(X: np.ndarray, w: np.ndarray) -> np.ndarray:
    """min over t of sum_i w_i |x_i - t|; the minimum sits at one of the x_i."""
    D = np.abs(X[:, :, None] - X[:, None, :])  # D[m, i, t]
    return (w[None, :, None] * D).sum(axis=1).min(axis=1)


def pairwise_spread(X: np.ndarray) -> np.ndarray:
    """Sum over unordered pairs i < j of |x_i - x_j|."""
    n = X.shape[1]
    iu, ju = np.triu_indices(n, 1)
    return np.abs(X[:, iu] - X[:, ju]).sum(axis=1)


def nbr_max(G: Graph, X: np.ndarray) -> np.ndarray:
    return np.stack([X[:, nb].max(axis=1) for nb in G.closed_nbr_lists], axis=1)


def nbr_min(G: Graph, X: np.ndarray) -> np.ndarray:
    return np.stack([X[:, nb].min(axis=1) for nb in G.closed_nbr_lists], axis=1)


def inf_norm(X: np.ndarray) -> np.ndarray:
    return np.abs(X).max(axis=1)


# ---------------------------------------------------------------------------
# Discrete helpers


def _min_volume(G: Graph, mask: int) -> float:
    v = G.volume(mask)
    return min(v, float(G.deg.sum()) - v)


def _nbr_crossing(G: Graph, mask: int) -> int:
    """Number of vertices whose closed neighbourhood meets both mask and its complement."""
    return sum(1 for nb in G.closed_nbr_masks if (mask & nb) and (nb & ~mask))


# ---------------------------------------------------------------------------
# Catalog


def _set_entries(G: Graph, C: float) -> dict:
    n = G.n
    full = (1 << n) - 1
    return {
        "cut": (lambda A: G.cut(A), lambda X: total_variation(G, X)),
        "constant": (lambda A: C if A else 0.0, lambda X: C * X.max(axis=1)),
        "volume": (lambda A: G.volume(A), lambda X: X @ G.deg),
        "min_volume": (lambda A: _min_volume(G, A), lambda X: weighted_median_spread(X, G.deg)),
        "size_product": (lambda A: popcount(A) * popcount(full & ~A), pairwise_spread),
        "vertex_boundary": (lambda A: _nbr_crossing(G, A),
                            lambda X: (nbr_max(G, X) - nbr_min(G, X)).sum(axis=1)),
    }


def _pair_entries(G: Graph, C: float) -> dict:
    n = G.n
    full = (1 << n) - 1
    i, j = G.edge_array

    def between(X):
        return 0.5 * (np.abs(X) @ G.deg - edge_plus(G, X))

    def inner_min(X):
        a = np.abs(X)
        return np.minimum(a[:, i], a[:, j]).sum(axis=1)

    def size_inner(X):
        a = np.abs(X)
        e = np.minimum(a[:, i], a[:, j])  # (m, E)
        return np.minimum(a[:, :, None], e[:, None, :]).sum(axis=(1, 2))

    return {
        "pair_cut": (lambda A, B: G.cut(A) + G.cut(B), lambda X: total_variation(G, X)),
        "pair_between": (lambda A, B: G.between(A, B), between),
        "pair_constant": (lambda A, B: C if (A | B) else 0.0, lambda X: C * inf_norm(X)),
        "pair_volume": (lambda A, B: G.volume(A) + G.volume(B), lambda X: np.abs(X) @ G.deg),
        "pair_min_volume": (lambda A, B: _min_volume(G, A) + _min_volume(G, B),
                            lambda X: weighted_median_spread(X, G.deg)),
        "pair_inner_edges": (lambda A, B: G.inner_edges(A | B), inner_min),
        "pair_size_inner_edges": (lambda A, B: popcount(A | B) * G.inner_edges(A | B), size_inner),
        "pair_size_product": (lambda A, B: popcount(A | B) * popcount(full & ~(A | B)),
                              lambda X: pairwise_spread(np.abs(X))),
    }


SET_ROWS = ("cut", "constant", "volume", "min_volume", "size_product", "vertex_boundary")
PAIR_ROWS = ("pair_cut", "pair_between", "pair_constant", "pair_volume", "pair_min_volume",
             "pair_inner_edges", "pair_size_inner_edges", "pair_size_product")
CATALOG = SET_ROWS + PAIR_ROWS


def functional_catalog(name: str, G: Graph, C: float = 1.0) -> tuple[DiscreteFunction, Callable]:
    """Return (discrete function, closed form of its extension) for a catalog row.

    The closed form accepts one point (shape (n,)) or a batch (shape (m, n)).
    """
    if name in SET_ROWS:
        fn, cf = _set_entries(G, C)[name]
        f = from_set_fn(G.n, fn, name=name)
    elif name in PAIR_ROWS:
        fn, cf = _pair_entries(G, C)[name]
        f = from_pair_fn(G.n, fn, name=name)
    else:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}")

    def closed_form(x, cf=cf):
        X, single = _rows(x)
        if X.shape[1] != G.n:
            raise ValueError(f"expected {G.n} coordinates, got {X.shape[1]}")
        return _out(np.asarray(cf(X), dtype=float), single)

    closed_form.__name__ = f"{name}_closed_form"
    return f, closed_form
