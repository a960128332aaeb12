"""Discrete Morse functions on simplicial complexes and hypergraphs, their
order complexes, GF(2) homology, and the PL criticality of the Lovász
extension restricted to the order complex.

Faces and hyperedges are bit-masks over the vertex set. Order-complex
simplices are chains, stored as tuples of face indices sorted by size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .lovasz import lovasz_eval
from .setfun import DiscreteFunction, mask_of, members, popcount

MAX_CHAINS = 10**6
VALUE_TOL = 1e-12


def _face_mask(face) -> int:
    if isinstance(face, (int, np.integer)):
        return int(face)
    return mask_of(face)


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class SimplicialComplex:
    n: int
    faces: tuple  # sorted by (size, mask)

    def __post_init__(self):
        faces = sorted({_face_mask(f) for f in self.faces}, key=lambda m: (popcount(m), m))
        object.__setattr__(self, "faces", tuple(faces))
        if self.n < 1:
            raise ValueError("need at least one vertex")
        fs = set(faces)
        for m in faces:
            if m == 0:
                raise ValueError("faces must be nonempty")
            if m >> self.n:
                raise ValueError(f"face {list(members(m))} uses a vertex outside 0..{self.n - 1}")
            for i in members(m):
                sub = m & ~(1 << i)
                if sub and sub not in fs:
                    raise ValueError(f"not downward closed: {list(members(sub))} missing below {list(members(m))}")
        for i in range(self.n):
            if (1 << i) not in fs:
                raise ValueError(f"vertex {i} is not a face")

    @classmethod
    def from_faces(cls, n: int, faces, close: bool = False) -> "SimplicialComplex":
        masks = {_face_mask(f) for f in faces}
        masks |= {1 << i for i in range(n)}
        if close:
            out = set()
            for m in masks:
                sub = m
                while sub:
                    out.add(sub)
                    sub = (sub - 1) & m
            masks = out
        return cls(n, tuple(masks))

    @classmethod
    def from_json(cls, data: dict, close: bool = False) -> "SimplicialComplex":
        return cls.from_faces(int(data["n"]), [tuple(f) for f in data["faces"]], close=close)

    def to_json(self) -> dict:
        return {"n": self.n, "faces": [list(members(m)) for m in self.faces]}

    @property
    def dim(self) -> int:
        return max(popcount(m) for m in self.faces) - 1

    def index(self, face) -> int:
        return self._index[_face_mask(face)]

    @property
    def _index(self) -> dict:
        d = self.__dict__.get("_idx")
        if d is None:
            d = {m: k for k, m in enumerate(self.faces)}
            object.__setattr__(self, "_idx", d)
        return d

    def __contains__(self, face) -> bool:
        return _face_mask(face) in self._index

    def f_vector(self) -> list[int]:
        out = [0] * (self.dim + 1)
        for m in self.faces:
            out[popcount(m) - 1] += 1
        return out

    def euler(self) -> int:
        return sum((-1) ** p * c for p, c in enumerate(self.f_vector()))

    def facets_of(self, m: int) -> list[int]:
        return [m & ~(1 << i) for i in members(m) if m & ~(1 << i)]

    def cofacets_of(self, m: int) -> list[int]:
        return [m | (1 << i) for i in range(self.n) if not (m >> i) & 1 and (m | (1 << i)) in self._index]

    def as_simplices(self) -> list[tuple]:
        return [members(m) for m in self.faces]


@dataclass(frozen=True)
class Hypergraph:
    n: int
    edges: tuple

    def __post_init__(self):
        masks = [_face_mask(e) for e in self.edges]
        if len(set(masks)) != len(masks):
            raise ValueError("duplicate hyperedges")
        for m in masks:
            if m == 0 or m >> self.n:
                raise ValueError(f"bad hyperedge {list(members(m))}")
        object.__setattr__(self, "edges", tuple(sorted(masks, key=lambda m: (popcount(m), m))))

    @classmethod
    def from_json(cls, data: dict) -> "Hypergraph":
        return cls(int(data["n"]), tuple(mask_of(e) for e in data.get("edges", data.get("faces", []))))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(members(m)) for m in self.edges]}


@dataclass
class FaceFunction:
    """Real values on every face (or hyperedge), keyed by mask."""

    values: dict
    injective: bool = False

    def __post_init__(self):
        self.values = {_face_mask(k): float(v) for k, v in self.values.items()}
        if self.injective:
            vs = sorted(self.values.values())
            if any(b - a <= VALUE_TOL for a, b in zip(vs, vs[1:])):
                raise ValueError("function flagged injective has repeated values")

    def __call__(self, face) -> float:
        return self.values[_face_mask(face)]

    def check_total(self, faces) -> None:
        missing = [list(members(m)) for m in faces if m not in self.values]
        if missing:
            raise ValueError(f"function undefined on {missing[:5]}")
        extra = [list(members(m)) for m in self.values if m not in set(faces)]
        if extra:
            raise ValueError(f"function defined off the complex on {extra[:5]}")

    def is_injective(self) -> bool:
        vs = sorted(self.values.values())
        return all(b - a > VALUE_TOL for a, b in zip(vs, vs[1:]))

    @classmethod
    def from_json(cls, data: dict) -> "FaceFunction":
        vals = {}
        for e in data["entries"]:
            m = mask_of(e["face"])
            if m in vals:
                raise ValueError(f"face {e['face']} listed twice")
            vals[m] = float(e["value"])
        return cls(vals, injective=bool(data.get("injective", False)))

    def to_json(self) -> dict:
        return {"entries": [{"face": list(members(m)), "value": v}
                            for m, v in sorted(self.values.items(), key=lambda kv: (popcount(kv[0]), kv[0]))],
                "injective": self.injective}

    def extended(self, n: int) -> DiscreteFunction:
        """The set function equal to f on its faces and 0 elsewhere."""
        return DiscreteFunction(n, "set", values=dict(self.values))


# ---------------------------------------------------------------------------
# Forman


@dataclass
class MorseCheck:
    valid: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.valid


def _up_low(K: SimplicialComplex, f: FaceFunction, m: int):
    fm = f(m)
    up = [t for t in K.cofacets_of(m) if f(t) <= fm]
    low = [v for v in K.facets_of(m) if f(v) >= fm]
    return up, low


def validate_discrete_morse(K: SimplicialComplex, f: FaceFunction) -> MorseCheck:
    f.check_total(K.faces)
    bad = []
    for m in K.faces:
        up, low = _up_low(K, f, m)
        if len(up) > 1 or len(low) > 1:
            bad.append({"face": list(members(m)), "U": [list(members(t)) for t in up],
                        "L": [list(members(v)) for v in low]})
    return MorseCheck(not bad, bad)


def forman_critical(K: SimplicialComplex, f: FaceFunction) -> tuple[list[tuple[tuple, int]], list[int]]:
    """Critical faces with their index (dimension) and the Morse vector."""
    chk = validate_discrete_morse(K, f)
    if not chk:
        raise ValueError(f"not a discrete Morse function: {chk.violations[:3]}")
    crit = []
    vec = [0] * (K.dim + 1)
    for m in K.faces:
        up, low = _up_low(K, f, m)
        if not up and not low:
            d = popcount(m) - 1
            crit.append((members(m), d))
            vec[d] += 1
    return crit, vec


def gradient_pairs(K: SimplicialComplex, f: FaceFunction) -> list[tuple[tuple, tuple]]:
    """Regular pairs (sigma, tau) with sigma a facet of tau and f(sigma) >= f(tau)."""
    out = []
    for m in K.faces:
        for t in K.cofacets_of(m):
            if f(t) <= f(m):
                out.append((members(m), members(t)))
    return out


# ---------------------------------------------------------------------------
# Order complex


@dataclass
class OrderComplex:
    n: int
    vertices: tuple  # masks, sorted by size
    chains: list  # tuples of vertex indices, each sorted by size
    coords: np.ndarray  # row k is the indicator vector of vertices[k]
    _containing: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return max((len(c) for c in self.chains), default=0) - 1

    def f_vector(self) -> list[int]:
        out = [0] * (self.dim + 1)
        for c in self.chains:
            out[len(c) - 1] += 1
        return out

    def euler(self) -> int:
        return sum((-1) ** p * c for p, c in enumerate(self.f_vector()))

    def maximal_chains(self) -> list[tuple]:
        longer = set()
        for c in self.chains:
            for k in range(len(c)):
                longer.add(c[:k] + c[k + 1:])
        return [c for c in self.chains if c not in longer]

    def containing(self, v: int) -> list[tuple]:
        if not self._containing:
            for c in self.chains:
                for u in c:
                    self._containing.setdefault(u, []).append(c)
        return self._containing.get(v, [])

    def link(self, v: int) -> list[tuple]:
        return [tuple(u for u in c if u != v) for c in self.containing(v) if len(c) > 1]


def order_complex(K, limit: int = MAX_CHAINS) -> OrderComplex:
    """All chains under strict inclusion of the faces of K (or edges of a hypergraph)."""
    verts = tuple(K.faces if isinstance(K, SimplicialComplex) else K.edges)
    idx = range(len(verts))
    ups = [[j for j in idx if verts[j] != verts[i] and verts[j] & verts[i] == verts[i]] for i in idx]
    chains: list[tuple] = []

    def grow(chain):
        chains.append(chain)
        if len(chains) > limit:
            raise ValueError(f"order complex has more than {limit} chains")
        for j in ups[chain[-1]]:
            grow(chain + (j,))

    for i in idx:
        grow((i,))
    chains.sort(key=lambda c: (len(c), c))
    coords = np.array([[(m >> i) & 1 for i in range(K.n)] for m in verts], dtype=float)
    return OrderComplex(K.n, verts, chains, coords)


@lru_cache(maxsize=None)
def surjections(a: int, b: int) -> int:
    """Number of surjections from an a-set onto a b-set (inclusion-exclusion)."""
    return sum((-1) ** j * math.comb(b, j) * (b - j) ** a for j in range(b + 1))


def subdivision_f_vector(K: SimplicialComplex) -> list[int]:
    """Face numbers of the barycentric subdivision from K's face sizes alone.

    Chains of length m+1 topped by a face of size s are ordered set
    partitions of it into m+1 blocks.
    """
    top = K.dim + 1
    return [sum(surjections(popcount(s), m + 1) for s in K.faces) for m in range(top)]


def _chain_of_point(verts_index: dict, x: np.ndarray, tol: float):
    """Write x >= 0 with max(x) <= 1 as sum lambda_k 1_{S_k} over nested level sets."""
    if np.any(x < -tol) or x.max() > 1 + tol:
        raise ValueError("point must lie in [0,1]^n to be in the order complex")
    levels = sorted({float(v) for v in x if v > tol}, reverse=True)
    out = []
    for k, t in enumerate(levels):
        nxt = levels[k + 1] if k + 1 < len(levels) else 0.0
        m = int(sum(1 << i for i in range(len(x)) if x[i] >= t - tol))
        if m not in verts_index:
            raise ValueError(f"level set {list(members(m))} is not a face; the point is off the order complex")
        out.append((m, t - nxt))
    return out


def lovasz_on_order_complex(K, f: FaceFunction, point, tol: float = 1e-9) -> float:
    """sum lambda_sigma f(sigma) for x = sum lambda_sigma 1_sigma on a chain.

    ``point`` is either a mapping face -> coefficient or a vector in [0,1]^n.
    The value is cross-checked against the Lovász extension of f extended by
    zero off K.
    """
    verts = K.faces if isinstance(K, SimplicialComplex) else K.edges
    vidx = {m: k for k, m in enumerate(verts)}
    if isinstance(point, dict):
        terms = [(_face_mask(k), float(v)) for k, v in point.items() if float(v) != 0.0]
        if any(v < -tol for _, v in terms) or sum(v for _, v in terms) > 1 + tol:
            raise ValueError("coefficients must be nonnegative with sum at most 1")
        ms = sorted((m for m, _ in terms), key=popcount)
        for a, b in zip(ms, ms[1:]):
            if a & b != a or a == b:
                raise ValueError("faces do not form a chain")
        for m, _ in terms:
            if m not in vidx:
                raise ValueError(f"{list(members(m))} is not a face")
        x = np.zeros(K.n)
        for m, v in terms:
            x += v * np.array([(m >> i) & 1 for i in range(K.n)], dtype=float)
    else:
        x = np.asarray(point, dtype=float)
        if x.shape != (K.n,):
            raise ValueError(f"point must have length {K.n}")
        terms = _chain_of_point(vidx, x, tol)
    val = float(sum(v * f(m) for m, v in terms))
    ref = lovasz_eval(f.extended(K.n), x)
    if abs(val - ref) > tol * max(1.0, abs(ref)):
        raise AssertionError(f"chain value {val} disagrees with the extension {ref}")
    return val


# ---------------------------------------------------------------------------
# GF(2) homology


def _rank_gf2(rows: list[int]) -> int:
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            p = r.bit_length() - 1
            if p in basis:
                r ^= basis[p]
            else:
                basis[p] = r
                break
    return len(basis)


def _normalize(simplices) -> set:
    return {frozenset(s) for s in simplices}


def betti_gf2(simplices, relative_to=None, reduced: bool = False) -> tuple[int, ...]:
    """Betti numbers over GF(2) from boundary-matrix ranks.

    ``simplices`` is any downward-closed family of vertex tuples. With
    ``relative_to`` the homology of the pair is returned. With ``reduced``
    the empty simplex is added in degree -1 and the tuple starts at degree
    -1, so the empty complex gives (1,).
    """
    S = _normalize(simplices)
    S.discard(frozenset())
    for s in S:
        for v in s:
            t = s - {v}
            if t and t not in S:
                raise ValueError(f"not a complex: {sorted(t)} missing below {sorted(s)}")
    A = set()
    if relative_to is not None:
        A = _normalize(relative_to)
        A.discard(frozenset())
        if not A <= S:
            raise ValueError("subcomplex is not contained in the complex")
        for s in A:
            for v in s:
                t = s - {v}
                if t and t not in A:
                    raise ValueError("relative_to is not closed")
    if reduced:
        S.add(frozenset())
        if A:
            A.add(frozenset())
    top = max((len(s) for s in S), default=0) - 1
    lo = -1 if reduced else 0
    by_dim: dict[int, list] = {}
    for s in S - A:
        by_dim.setdefault(len(s) - 1, []).append(s)
    index = {d: {s: k for k, s in enumerate(sorted(by_dim.get(d, []), key=sorted))} for d in range(lo, top + 1)}
    ranks = {}
    for d in range(lo + 1, top + 1):
        below = index[d - 1]
        rows = []
        for s in index[d]:
            r = 0
            for v in s:
                k = below.get(s - {v})
                if k is not None:
                    r |= 1 << k
            rows.append(r)
        ranks[d] = _rank_gf2(rows)
    return tuple(len(index[d]) - ranks.get(d, 0) - ranks.get(d + 1, 0) for d in range(lo, top + 1))


def cone(simplices, apex) -> list[tuple]:
    S = _normalize(simplices)
    S.discard(frozenset())
    return [tuple(s) for s in S] + [tuple(s | {apex}) for s in S] + [(apex,)]


# ---------------------------------------------------------------------------
# PL criticality on the order complex


@dataclass
class PLReport:
    face: tuple
    critical: bool
    indices: dict  # index -> multiplicity
    link_betti: tuple  # reduced, starting at degree -1
    star_betti: tuple  # relative Betti of (closed lower star, lower link)

    def to_json(self) -> dict:
        return {"face": list(self.face), "critical": self.critical,
                "indices": {str(k): v for k, v in self.indices.items()},
                "link_betti": list(self.link_betti), "star_betti": list(self.star_betti)}


def _pl_at(oc: OrderComplex, fv: list[float], v: int) -> PLReport:
    c = fv[v]
    low = [s for s in oc.link(v) if all(fv[u] <= c for u in s)]
    red = betti_gf2(low, reduced=True)
    star = betti_gf2(cone(low, v), relative_to=low)
    # red[k] is the reduced Betti number in degree k-1, which gives index k
    indices = {k: b for k, b in enumerate(red) if b}
    # the two homological readings differ only by a degree shift
    if tuple(star) != tuple(red[:len(star)]) or any(red[len(star):]):
        raise AssertionError(f"lower-star and lower-link Betti disagree at {members(oc.vertices[v])}")
    return PLReport(members(oc.vertices[v]), bool(indices), indices, red, star)


def _values_on(oc: OrderComplex, f: FaceFunction) -> list[float]:
    return [f(m) for m in oc.vertices]


def pl_critical(K, f: FaceFunction, face, oc: OrderComplex | None = None, check: bool = True) -> PLReport:
    """PL criticality of the vertex 1_face of the order complex for the
    extension of f, from the reduced homology of its lower link.

    On a simplicial complex the answer is compared with the Forman
    criticality of ``face`` (same index).
    """
    if not f.is_injective():
        raise ValueError("PL criticality needs an injective function")
    oc = oc or order_complex(K)
    m = _face_mask(face)
    v = oc.vertices.index(m)
    rep = _pl_at(oc, _values_on(oc, f), v)
    if check and isinstance(K, SimplicialComplex):
        up, low = _up_low(K, f, m)
        forman = not up and not low
        d = popcount(m) - 1
        pl_ok = rep.indices == {d: 1} if forman else not rep.critical
        if not pl_ok:
            raise AssertionError(f"Forman and PL criticality disagree at {list(members(m))}: {rep.indices}")
    return rep


def morse_euler_check(K: SimplicialComplex, f: FaceFunction) -> dict:
    """Alternating sum of the Morse vector against both Euler characteristics,
    and the PL-critical scan of all order-complex vertices."""
    crit, vec = forman_critical(K, f)
    oc = order_complex(K)
    fv = _values_on(oc, f)
    pl_vec = [0] * (K.dim + 1)
    degenerate = []
    for v in range(len(oc.vertices)):
        rep = _pl_at(oc, fv, v)
        for i, k in rep.indices.items():
            pl_vec[i] += k
        if rep.critical and sum(rep.indices.values()) != 1:
            degenerate.append(list(rep.face))
    alt = sum((-1) ** i * c for i, c in enumerate(vec))
    chi_k, chi_s = K.euler(), oc.euler()
    return {
        "morse_vector": vec,
        "pl_morse_vector": pl_vec,
        "critical": [{"face": list(s), "index": d} for s, d in crit],
        "alternating_sum": alt,
        "euler_complex": chi_k,
        "euler_order_complex": chi_s,
        "degenerate": degenerate,
        "ok": alt == chi_k == chi_s and vec == pl_vec and not degenerate,
    }


# ---------------------------------------------------------------------------
# Hypergraphs


def sequential_pairs(E: Hypergraph) -> list[tuple[int, int]]:
    es = E.edges
    out = []
    for a in es:
        for b in es:
            if a != b and a & b == a:
                if not any(c not in (a, b) and a & c == a and c & b == c for c in es):
                    out.append((a, b))
    return out


def heights(E: Hypergraph) -> dict[int, int]:
    h: dict[int, int] = {}
    for e in E.edges:  # sorted by size, so every strict subset comes first
        below = [h[c] for c in h if c != e and c & e == c]
        h[e] = 1 + max(below) if below else 0
    return h


def hypergraph_morse(E: Hypergraph, f: FaceFunction, pl: bool = True) -> dict:
    """Simple discrete Morse validation over sequential pairs, critical edges
    with their heights, and (optionally) the PL reading on the order complex."""
    f.check_total(E.edges)
    pairs = sequential_pairs(E)
    below = {e: [a for a, b in pairs if b == e and f(a) >= f(e)] for e in E.edges}
    above = {e: [b for a, b in pairs if a == e and f(e) >= f(b)] for e in E.edges}
    violations = [{"edge": list(members(e)), "below": [list(members(a)) for a in below[e]],
                   "above": [list(members(b)) for b in above[e]]}
                  for e in E.edges if len(below[e]) > 1 or len(above[e]) > 1]
    h = heights(E)
    crit = [{"edge": list(members(e)), "height": h[e]} for e in E.edges if not below[e] and not above[e]]
    out = {"valid": not violations, "violations": violations, "critical": crit,
           "heights": {",".join(map(str, members(e))): h[e] for e in E.edges},
           "sequential_pairs": [[list(members(a)), list(members(b))] for a, b in pairs]}
    if pl and f.is_injective():
        oc = order_complex(E)
        fv = _values_on(oc, f)
        reps = [_pl_at(oc, fv, v) for v in range(len(oc.vertices))]
        pl_crit = [{"edge": list(r.face), "indices": {str(k): b for k, b in r.indices.items()}}
                   for r in reps if r.critical]
        out["pl_critical"] = pl_crit
        # agreement is only promised when every lower boundary is a sphere
        out["pl_agrees"] = sorted((c["edge"], {str(c["height"]): 1}) for c in crit) == \
            sorted((c["edge"], c["indices"]) for c in pl_crit) if out["valid"] else None
    return out


# ---------------------------------------------------------------------------
# Random instances


def random_complex(n: int, rng: np.random.Generator, max_dim: int = 2, facets: int | None = None) -> SimplicialComplex:
    facets = facets if facets is not None else int(rng.integers(1, n + 2))
    chosen = []
    for _ in range(facets):
        size = int(rng.integers(2, min(max_dim + 1, n) + 1)) if n > 1 else 1
        chosen.append(tuple(int(v) for v in rng.choice(n, size=size, replace=False)))
    return SimplicialComplex.from_faces(n, chosen, close=True)


def random_morse_function(K: SimplicialComplex, rng: np.random.Generator, pair_prob: float = 0.8) -> FaceFunction:
    """An injective discrete Morse function from a random acyclic matching.

    Arrows a -> b mean f(a) > f(b): a face points to its facets, except for
    matched pairs where the smaller face points up. A pair is only matched
    when the reversal keeps the arrow graph acyclic, and f is read off a
    random topological order.
    """
    faces = list(K.faces)
    out: dict[int, set] = {m: set(K.facets_of(m)) for m in faces}
    matched: set = set()
    cands = [(s, t) for t in faces for s in K.facets_of(t)]
    rng.shuffle(cands)

    def reaches(src, dst):
        seen, stack = {src}, [src]
        while stack:
            u = stack.pop()
            if u == dst:
                return True
            for w in out[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    for s, t in cands:
        if s in matched or t in matched or rng.random() > pair_prob:
            continue
        out[t].discard(s)
        if reaches(t, s):
            out[t].add(s)
            continue
        out[s].add(t)
        matched |= {s, t}

    indeg = {m: 0 for m in faces}
    for u in faces:
        for w in out[u]:
            indeg[w] += 1
    ready = [m for m in faces if indeg[m] == 0]
    order = []
    while ready:
        u = ready.pop(int(rng.integers(len(ready))))
        order.append(u)
        for w in out[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    # first in topological order is the largest value
    N = len(order)
    return FaceFunction({m: float(N - k) for k, m in enumerate(order)}, injective=True)


def circle_complex() -> SimplicialComplex:
    return SimplicialComplex.from_faces(3, [(0, 1), (0, 2), (1, 2)])


def full_simplex(n: int) -> SimplicialComplex:
    return SimplicialComplex.from_faces(n, [tuple(range(n))], close=True)
