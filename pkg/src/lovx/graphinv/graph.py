"""Simple undirected graphs with an optional interior/boundary split."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..setfun import members


@dataclass(frozen=True)
class Graph:
    """Graph on vertices 0..n-1.

    ``interior`` is an optional vertex set A; its boundary is the set of
    vertices outside A adjacent to A, and the closure is A plus its boundary.
    """

    n: int
    edges: tuple = ()
    interior: frozenset | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        seen = set()
        for e in self.edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise ValueError(f"loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {e} out of range for n={self.n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        if self.interior is not None:
            A = frozenset(int(v) for v in self.interior)
            if not A or any(not 0 <= v < self.n for v in A):
                raise ValueError("interior must be a nonempty set of vertices")
            object.__setattr__(self, "interior", A)

    # -- adjacency -------------------------------------------------------

    @cached_property
    def adj(self) -> list[frozenset]:
        nb = [set() for _ in range(self.n)]
        for i, j in self.edges:
            nb[i].add(j)
            nb[j].add(i)
        return [frozenset(s) for s in nb]

    @cached_property
    def deg(self) -> np.ndarray:
        return np.array([len(s) for s in self.adj], dtype=float)

    @cached_property
    def edge_array(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.edges:
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        a = np.array(self.edges, dtype=int)
        return a[:, 0], a[:, 1]

    @cached_property
    def closed_nbr_masks(self) -> list[int]:
        """Bit-mask of N(i) = {i} plus the neighbours of i."""
        return [(1 << i) | sum(1 << j for j in self.adj[i]) for i in range(self.n)]

    @cached_property
    def closed_nbr_lists(self) -> list[np.ndarray]:
        return [np.array(sorted(self.adj[i] | {i}), dtype=int) for i in range(self.n)]

    @property
    def m(self) -> int:
        return len(self.edges)

    # -- boundary ---------------------------------------------------------

    @cached_property
    def boundary(self) -> frozenset:
        if self.interior is None:
            raise ValueError("graph has no interior/boundary split")
        return frozenset(j for i in self.interior for j in self.adj[i] if j not in self.interior)

    @cached_property
    def closure(self) -> frozenset:
        return self.interior | self.boundary

    @cached_property
    def boundary_degree(self) -> np.ndarray:
        """p_i: number of neighbours of i lying in the boundary."""
        b = self.boundary
        return np.array([sum(j in b for j in self.adj[i]) for i in range(self.n)], dtype=float)

    def with_interior(self, interior) -> "Graph":
        return Graph(self.n, self.edges, frozenset(interior), self.name)

    def interior_connected(self) -> bool:
        A = sorted(self.interior)
        return len(self.components(sum(1 << v for v in A))) <= 1

    # -- counting ---------------------------------------------------------

    def cut(self, mask: int) -> int:
        return sum(((mask >> i) & 1) != ((mask >> j) & 1) for i, j in self.edges)

    def inner_edges(self, mask: int) -> int:
        return sum(((mask >> i) & 1) and ((mask >> j) & 1) for i, j in self.edges)

    def between(self, a: int, b: int) -> int:
        """Number of edges with one end in a and the other in b."""
        return sum((((a >> i) & 1) and ((b >> j) & 1)) or (((a >> j) & 1) and ((b >> i) & 1))
                   for i, j in self.edges)

    def volume(self, mask: int) -> float:
        return float(sum(self.deg[i] for i in members(mask)))

    def components(self, mask: int | None = None) -> list[list[int]]:
        """Connected components of the subgraph induced on ``mask`` (default: all)."""
        verts = set(range(self.n)) if mask is None else set(members(mask))
        out = []
        while verts:
            s = min(verts)
            comp, q = [], deque([s])
            verts.discard(s)
            while q:
                v = q.popleft()
                comp.append(v)
                for w in self.adj[v]:
                    if w in verts:
                        verts.discard(w)
                        q.append(w)
            out.append(sorted(comp))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    @cached_property
    def distances(self) -> np.ndarray:
        """All-pairs shortest path lengths by BFS; unreachable pairs are inf."""
        D = np.full((self.n, self.n), np.inf)
        for s in range(self.n):
            D[s, s] = 0
            q = deque([s])
            while q:
                v = q.popleft()
                for w in self.adj[v]:
                    if D[s, w] == np.inf:
                        D[s, w] = D[s, v] + 1
                        q.append(w)
        return D

    def power(self, k: int) -> "Graph":
        """Graph joining distinct vertices at distance at most k."""
        D = self.distances
        return Graph(self.n, [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if D[i, j] <= k],
                     name=f"{self.name}^{k}")

    def complement(self) -> "Graph":
        es = set(self.edges)
        return Graph(self.n, [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if (i, j) not in es],
                     name=f"co-{self.name}")

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        d = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.interior is not None:
            d["boundary"] = {"interior": sorted(self.interior)}
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        if "n" not in data or "edges" not in data:
            raise ValueError("graph JSON needs 'n' and 'edges'")
        interior = None
        if data.get("boundary") is not None:
            b = data["boundary"]
            interior = frozenset(b["interior"])
            g = cls(int(data["n"]), tuple(tuple(e) for e in data["edges"]), interior, data.get("name", ""))
            if "delta" in b and set(b["delta"]) != set(g.boundary):
                raise ValueError(f"boundary.delta {sorted(b['delta'])} disagrees with adjacency {sorted(g.boundary)}")
            return g
        return cls(int(data["n"]), tuple(tuple(e) for e in data["edges"]), interior, data.get("name", ""))


# ---------------------------------------------------------------------------
# Builders


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)], name=f"P{n}")


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)], name=f"C{n}")


def complete(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)], name=f"K{n}")


def empty(n: int) -> Graph:
    return Graph(n, (), name=f"E{n}")


def star(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)], name=f"S{leaves}")


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)], name=f"K{a},{b}")


def wheel(rim: int) -> Graph:
    es = [(0, i) for i in range(1, rim + 1)] + [(i, i % rim + 1) for i in range(1, rim + 1)]
    return Graph(rim + 1, es, name=f"W{rim}")


def disjoint_union(*gs: Graph) -> Graph:
    off, es = 0, []
    for g in gs:
        es += [(i + off, j + off) for i, j in g.edges]
        off += g.n
    return Graph(off, es, name="+".join(g.name for g in gs))


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    es = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph(n, es, name=f"G({n},{p},{seed})")


def triangle_flower(k: int) -> Graph:
    """k triangles sharing the centre vertex 0."""
    es = []
    for t in range(k):
        a, b = 1 + 2 * t, 2 + 2 * t
        es += [(0, a), (0, b), (a, b)]
    return Graph(2 * k + 1, es, name=f"flower{k}")


def corpus() -> list[Graph]:
    """Thirty small graphs (n <= 7) used by the acceptance and regression tests."""
    named = [
        Graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)], name="paw"),
        Graph(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)], name="diamond"),
        Graph(5, [(0, 1), (1, 2), (0, 2), (1, 3), (2, 4)], name="bull"),
        Graph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (3, 4)], name="house"),
        Graph(4, [(0, 1), (1, 2)], name="P3+K1"),
    ]
    out = [path(n) for n in range(2, 8)]
    out += [cycle(n) for n in range(3, 8)]
    out += [complete(n) for n in (4, 5, 6)]
    out += [star(k) for k in (3, 4, 5)]
    out += [complete_bipartite(2, 3), complete_bipartite(3, 3), wheel(4), wheel(5), empty(3),
            disjoint_union(complete(3), complete(3))]
    out += named
    out += [random_graph(7, 0.4, 1), random_graph(7, 0.6, 2)]
    return out
