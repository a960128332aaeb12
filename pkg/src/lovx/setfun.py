"""Discrete functions on subsets, disjoint pairs and k-tuples of subsets.

Subsets of the ground set {0, ..., n-1} are bit-masks. The four argument
shapes ("modes") are encoded canonically as

* ``set``        a single int mask ``A``
* ``pair``       a tuple ``(A, B)`` of disjoint masks
* ``kway``       a tuple ``(A_1, ..., A_k)`` of masks
* ``kway_pair``  a tuple ``((A_1, B_1), ..., (A_k, B_k))`` of disjoint pairs

Enumeration always runs in increasing canonical order (Python tuple order on
the encodings above), which fixes every tie-break in the oracles.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator

import numpy as np

MODES = ("set", "pair", "kway", "kway_pair")
MAX_ITEMS = 30
MAX_CANDIDATES = 1 << 26


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << int(i)
    return m


def members(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` in increasing order."""
    subs = []
    s = mask
    while True:
        subs.append(s)
        if s == 0:
            break
        s = (s - 1) & mask
    return iter(reversed(subs))


@dataclass(frozen=True)
class GroundSet:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set must be nonempty")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1


def empty_arg(mode: str, k: int = 1):
    if mode == "set":
        return 0
    if mode == "pair":
        return (0, 0)
    if mode == "kway":
        return (0,) * k
    if mode == "kway_pair":
        return ((0, 0),) * k
    raise ValueError(f"unknown mode {mode!r}")


def all_args(mode: str, n: int, k: int = 1) -> Iterator:
    """Every argument of the given shape, in increasing canonical order."""
    full = (1 << n) - 1
    if mode == "set":
        yield from range(full + 1)
    elif mode == "pair":
        for a in range(full + 1):
            for b in submasks(full & ~a):
                yield (a, b)
    elif mode == "kway":
        yield from itertools.product(range(full + 1), repeat=k)
    elif mode == "kway_pair":
        pairs = list(all_args("pair", n))
        yield from itertools.product(pairs, repeat=k)
    else:
        raise ValueError(f"unknown mode {mode!r}")


def count_args(mode: str, n: int, k: int = 1) -> int:
    if mode == "set":
        return 1 << n
    if mode == "pair":
        return 3**n
    if mode == "kway":
        return 1 << (n * k)
    if mode == "kway_pair":
        return 3 ** (n * k)
    raise ValueError(f"unknown mode {mode!r}")


def _as_mask(x, n: int, where: str) -> int:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        m = int(x)
    else:
        m = 0
        for i in x:
            i = int(i)
            if not 0 <= i < n:
                raise ValueError(f"{where}: element {i} outside 0..{n - 1}")
            m |= 1 << i
    if m < 0 or m >> n:
        raise ValueError(f"{where}: mask {m} not a subset of the ground set")
    return m


def _as_pair(x, n: int, where: str) -> tuple[int, int]:
    if len(x) != 2:
        raise ValueError(f"{where}: a disjoint pair needs two sets")
    a = _as_mask(x[0], n, where + "[0]")
    b = _as_mask(x[1], n, where + "[1]")
    if a & b:
        raise ValueError(f"{where}: pair sets overlap on {list(members(a & b))}")
    return (a, b)


def canonical_arg(mode: str, n: int, k: int, arg, where: str = "arg"):
    """Normalize ``arg`` to the canonical encoding of ``mode``.

    Plain ints are read as masks, any other iterable as a list of elements.
    """
    if mode == "set":
        return _as_mask(arg, n, where)
    if mode == "pair":
        return _as_pair(arg, n, where)
    if len(arg) != k:
        raise ValueError(f"{where}: expected {k} components, got {len(arg)}")
    if mode == "kway":
        return tuple(_as_mask(a, n, f"{where}[{i}]") for i, a in enumerate(arg))
    if mode == "kway_pair":
        return tuple(_as_pair(a, n, f"{where}[{i}]") for i, a in enumerate(arg))
    raise ValueError(f"unknown mode {mode!r}")


def is_empty_arg(mode: str, key) -> bool:
    if mode == "set":
        return key == 0
    if mode == "pair":
        return key == (0, 0)
    if mode == "kway":
        return not any(key)
    return not any(a or b for a, b in key)


@dataclass(frozen=True, eq=False)
class DiscreteFunction:
    """A real function of subsets / disjoint pairs / k-tuples.

    Values come from ``values`` (keyed by canonical arguments), then from the
    optional callable ``fn``, then from ``default``. The empty argument
    evaluates to 0 unless it is listed explicitly in ``values``. With
    ``strict=True`` a missing entry raises instead of using the default.
    """

    n: int
    mode: str = "set"
    k: int = 1
    values: dict = field(default_factory=dict)
    default: float = 0.0
    fn: Callable[[Any], float] | None = None
    strict: bool = False
    name: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 1 <= self.n <= MAX_ITEMS:
            raise ValueError(f"n must be in 1..{MAX_ITEMS}")
        if self.mode in ("set", "pair") and self.k != 1:
            object.__setattr__(self, "k", 1)
        if self.k < 1:
            raise ValueError("k must be positive")
        clean = {}
        for key, v in self.values.items():
            clean[canonical_arg(self.mode, self.n, self.k, key)] = float(v)
        object.__setattr__(self, "values", clean)

    @property
    def ground(self) -> GroundSet:
        return GroundSet(self.n)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def key(self, arg):
        return canonical_arg(self.mode, self.n, self.k, arg)

    def evaluate(self, arg) -> float:
        return self.value(self.key(arg))

    __call__ = evaluate

    def value(self, key) -> float:
        """Value at an already canonical argument (no validation)."""
        v = self.values.get(key)
        if v is not None:
            return v
        if is_empty_arg(self.mode, key):
            return 0.0
        if self.fn is not None:
            return float(self.fn(key))
        if self.strict:
            raise KeyError(f"no value stored for {key!r}")
        return float(self.default)

    def args(self) -> Iterator:
        return all_args(self.mode, self.n, self.k)

    def table(self) -> dict:
        """Materialized values over every argument."""
        return {a: self.value(a) for a in self.args()}

    def full_arg(self):
        """The argument (V, ..., V); in pair modes (V, empty)."""
        if self.mode == "set":
            return self.full
        if self.mode == "pair":
            return (self.full, 0)
        if self.mode == "kway":
            return (self.full,) * self.k
        return ((self.full, 0),) * self.k

    def map(self, op: Callable[[float], float], name: str = "") -> "DiscreteFunction":
        return DiscreteFunction(self.n, self.mode, self.k, values={a: op(v) for a, v in self.table().items()}, name=name)

    def combine(self, other: "DiscreteFunction", op: Callable[[float, float], float], name: str = "") -> "DiscreteFunction":
        if (other.n, other.mode, other.k) != (self.n, self.mode, self.k):
            raise ValueError("functions live on different domains")
        vals = {a: op(self.value(a), other.value(a)) for a in self.args()}
        return DiscreteFunction(self.n, self.mode, self.k, values=vals, name=name)

    def __add__(self, other):
        return self.combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self.combine(other, lambda a, b: a - b)

    def scaled(self, c: float) -> "DiscreteFunction":
        return self.map(lambda v: c * v)

    # JSON --------------------------------------------------------------
    def to_json(self) -> dict:
        entries = []
        for key in sorted(self.values):
            if self.mode == "set":
                arg = [list(members(key))]
            elif self.mode == "pair":
                arg = [[list(members(key[0])), list(members(key[1]))]]
            elif self.mode == "kway":
                arg = [list(members(a)) for a in key]
            else:
                arg = [[list(members(a)), list(members(b))] for a, b in key]
            entries.append({"arg": arg, "value": self.values[key]})
        return {"n": self.n, "mode": self.mode, "k": self.k, "entries": entries, "default": self.default}

    @classmethod
    def from_json(cls, data: dict) -> "DiscreteFunction":
        for fld in ("n", "mode"):
            if fld not in data:
                raise ValueError(f"function.{fld}: missing")
        n, mode = int(data["n"]), data["mode"]
        if mode not in MODES:
            raise ValueError(f"function.mode: unknown mode {mode!r}")
        k = int(data.get("k", 1))
        values = {}
        for i, e in enumerate(data.get("entries", [])):
            where = f"function.entries[{i}].arg"
            arg = e["arg"]
            if mode in ("set", "pair"):
                if len(arg) != 1:
                    raise ValueError(f"{where}: expected a single slot")
                arg = arg[0]
            values[canonical_arg(mode, n, k, arg, where)] = float(e["value"])
        return cls(n, mode, k, values=values, default=float(data.get("default", 0.0)), strict=bool(data.get("strict", False)))


def from_set_fn(n: int, fn: Callable[[int], float], name: str = "") -> DiscreteFunction:
    return DiscreteFunction(n, "set", fn=fn, name=name)


def from_pair_fn(n: int, fn: Callable[[int, int], float], name: str = "") -> DiscreteFunction:
    return DiscreteFunction(n, "pair", fn=lambda key: fn(*key), name=name)


# ---------------------------------------------------------------------------
# Families


class RestrictedFamily:
    """Admissible arguments, given explicitly or by a predicate on all arguments."""

    def __init__(self, mode: str, n: int, k: int = 1, args: Iterable | None = None,
                 predicate: Callable[[Any], bool] | None = None):
        self.mode, self.n, self.k = mode, n, (k if mode in ("kway", "kway_pair") else 1)
        self.predicate = predicate
        self._args = None
        if args is not None:
            keys = {canonical_arg(mode, n, self.k, a) for a in args}
            if not keys:
                raise ValueError("family must be nonempty")
            self._args = sorted(keys)

    @classmethod
    def everything(cls, mode: str, n: int, k: int = 1) -> "RestrictedFamily":
        return cls(mode, n, k)

    @classmethod
    def nonempty(cls, mode: str, n: int, k: int = 1) -> "RestrictedFamily":
        return cls(mode, n, k, predicate=lambda a: not is_empty_arg(mode, a))

    @classmethod
    def proper_nonempty(cls, n: int) -> "RestrictedFamily":
        full = (1 << n) - 1
        return cls("set", n, predicate=lambda a: 0 < a < full)

    def size_bound(self) -> int:
        return len(self._args) if self._args is not None else count_args(self.mode, self.n, self.k)

    def __iter__(self):
        if self._args is not None:
            return iter(self._args)
        base = all_args(self.mode, self.n, self.k)
        if self.predicate is None:
            return base
        return (a for a in base if self.predicate(a))

    def __contains__(self, key) -> bool:
        if self._args is not None:
            return key in set(self._args)
        return self.predicate is None or bool(self.predicate(key))


def _check_enumerable(f: DiscreteFunction, family: RestrictedFamily):
    if f.n > MAX_ITEMS or family.size_bound() > MAX_CANDIDATES:
        raise ValueError("instance too large for exhaustive enumeration")


def enumerate_ratio_optimum(f: DiscreteFunction, g: DiscreteFunction, family: RestrictedFamily | None = None,
                            sense: str = "min") -> tuple[float, Any]:
    """Exact optimum of f/g over the family restricted to g != 0.

    Ties keep the first argument in canonical order.
    """
    if (f.n, f.mode, f.k) != (g.n, g.mode, g.k):
        raise ValueError("f and g must share ground set and mode")
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    family = family if family is not None else RestrictedFamily.everything(f.mode, f.n, f.k)
    _check_enumerable(f, family)
    best, best_arg = None, None
    for a in family:
        ga = g.value(a)
        if ga < 0:
            raise ValueError(f"g is negative at {a!r}")
        if ga == 0:
            continue
        r = f.value(a) / ga
        if best is None or (r < best if sense == "min" else r > best):
            best, best_arg = r, a
    if best is None:
        raise ValueError("empty feasible set: g vanishes on the whole family")
    return best, best_arg


def enumerate_optimum(f: DiscreteFunction, family: RestrictedFamily | None = None, sense: str = "min"):
    one = DiscreteFunction(f.n, f.mode, f.k, fn=lambda a: 1.0, values={empty_arg(f.mode, f.k): 1.0})
    return enumerate_ratio_optimum(f, one, family, sense)


# ---------------------------------------------------------------------------
# Difference of submodular functions


def _set_array(f: DiscreteFunction) -> np.ndarray:
    return np.array([f.value(a) for a in range(1 << f.n)], dtype=float)


def _pairwise_gaps(vals: np.ndarray, n: int, non_nested_only: bool = True):
    """Submodularity gaps f(A)+f(B)-f(A|B)-f(A&B) over all mask pairs."""
    m = np.arange(1 << n)
    a, b = m[:, None], m[None, :]
    gap = vals[a] + vals[b] - vals[a | b] - vals[a & b]
    if non_nested_only:
        nested = ((a & b) == a) | ((a & b) == b)
        gap = np.where(nested, np.inf, gap)
    return gap


def _local_gaps(vals: np.ndarray, n: int) -> np.ndarray:
    """Gaps on the elementary pairs (A+i, A+j), i != j outside A."""
    out = []
    m = np.arange(1 << n)
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = 1 << i, 1 << j
            base = m[(m & (bi | bj)) == 0]
            out.append(vals[base | bi] + vals[base | bj] - vals[base | bi | bj] - vals[base])
    return np.concatenate(out) if out else np.zeros(0)


def dc_decompose(f: DiscreteFunction) -> tuple[DiscreteFunction, DiscreteFunction]:
    """Write a set function as f1 - f2 with f1, f2 submodular.

    f2 = C*g with g(A) = -|A|^2, whose gap on a non-nested pair (A, B) is
    2|A\\B||B\\A| >= 2. C is the worst violation of f on non-nested pairs
    divided by that minimum gap, plus one.
    """
    if f.mode != "set":
        raise ValueError("dc_decompose works on set functions")
    if f.n > 20:
        raise ValueError("n must be at most 20")
    n = f.n
    vals = _set_array(f)
    if n <= 10:
        gaps = _pairwise_gaps(vals, n)
        finite = gaps[np.isfinite(gaps)]
    else:
        # elementary pairs are non-nested and govern submodularity on the full lattice
        finite = _local_gaps(vals, n)
    violation = float(max(0.0, -finite.min())) if finite.size else 0.0
    delta_g = 2.0
    c = violation / delta_g + 1.0
    sizes = np.array([popcount(a) for a in range(1 << n)], dtype=float)
    g = -(sizes**2)
    f2 = DiscreteFunction(n, "set", values={a: c * g[a] for a in range(1 << n)}, name="dc_concave_part")
    f1 = DiscreteFunction(n, "set", values={a: vals[a] + c * g[a] for a in range(1 << n)}, name="dc_convex_part")
    return f1, f2


# ---------------------------------------------------------------------------
# Random instances (used by checks, tests and the CLI)


def random_function(n: int, rng: np.random.Generator, mode: str = "set", k: int = 1,
                    low: float = -1.0, high: float = 1.0, integer: bool = False) -> DiscreteFunction:
    vals = {}
    for a in all_args(mode, n, k):
        if is_empty_arg(mode, a):
            vals[a] = 0.0
        else:
            v = rng.integers(int(low), int(high) + 1) if integer else rng.uniform(low, high)
            vals[a] = float(v)
    return DiscreteFunction(n, mode, k, values=vals)


def random_submodular(n: int, rng: np.random.Generator, terms: int = 3) -> DiscreteFunction:
    """Random submodular set function with f(empty) = 0.

    Sum of concave functions of nonnegative modular functions, a weighted cut
    and a signed modular part.
    """
    weights = rng.uniform(0.0, 1.0, size=(terms, n))
    kinds = rng.integers(0, 3, size=terms)
    caps = rng.uniform(0.3, 2.0, size=terms)
    cut_w = np.triu(rng.uniform(0.0, 1.0, size=(n, n)) * (rng.random((n, n)) < 0.5), 1)
    modular = rng.uniform(-1.0, 1.0, size=n)
    vals = {}
    for a in range(1 << n):
        ind = np.array([(a >> i) & 1 for i in range(n)], dtype=float)
        v = float(modular @ ind)
        for t in range(terms):
            s = float(weights[t] @ ind)
            v += (math.sqrt(s), min(s, caps[t]), math.log1p(s))[kinds[t]]
        v += float(np.sum(cut_w * np.abs(ind[:, None] - ind[None, :])))
        vals[a] = v
    vals[0] = 0.0
    return DiscreteFunction(n, "set", values=vals)
