"""Submodularity on subsets, disjoint pairs, k-tuples and real vectors.

Discrete checks are exhaustive over all argument pairs, vectorized by
encoding every argument as one integer key:

* set / kway: the concatenated masks (slot i at bit offset i*n)
* pair / kway_pair: slot i holds A_i at offset 2*n*i and B_i right above it

Continuous checks are sampled, uniformly on [-1, 1]^n and on the boundary of
that cube, with part of the samples rounded so that ties and zeros occur.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from .lovasz import arg_vector, lovasz_eval
from .setfun import DiscreteFunction, all_args, count_args, is_empty_arg, members


class FamilyNotLattice(ValueError):
    """The admissible family is not closed under join and meet."""


# ---------------------------------------------------------------------------
# Lattice operations


def join(mode: str, a, b):
    if mode == "set":
        return a | b
    if mode == "pair":
        (a1, a2), (b1, b2) = a, b
        return ((a1 | b1) & ~(a2 | b2), (a2 | b2) & ~(a1 | b1))
    if mode == "kway":
        return tuple(x | y for x, y in zip(a, b))
    return tuple(join("pair", x, y) for x, y in zip(a, b))


def meet(mode: str, a, b):
    if mode == "set":
        return a & b
    if mode == "pair":
        return (a[0] & b[0], a[1] & b[1])
    if mode == "kway":
        return tuple(x & y for x, y in zip(a, b))
    return tuple(meet("pair", x, y) for x, y in zip(a, b))


def vjoin(x: np.ndarray, y: np.ndarray, mode: str = "S2") -> np.ndarray:
    """Join of real vectors: componentwise max (S2) or the signed join (BS2)."""
    if mode == "S2":
        return np.maximum(x, y)
    both_pos = (x >= 0) & (y >= 0)
    both_neg = (x <= 0) & (y <= 0)
    return np.where(both_pos, np.maximum(x, y), np.where(both_neg, np.minimum(x, y), 0.0))


def vmeet(x: np.ndarray, y: np.ndarray, mode: str = "S2") -> np.ndarray:
    if mode == "S2":
        return np.minimum(x, y)
    both_pos = (x >= 0) & (y >= 0)
    both_neg = (x <= 0) & (y <= 0)
    return np.where(both_pos, np.minimum(x, y), np.where(both_neg, np.maximum(x, y), 0.0))


def vector_mode(mode: str) -> str:
    return "S2" if mode in ("set", "kway") else "BS2"


# ---------------------------------------------------------------------------
# Discrete check


def _encode(mode: str, n: int, arg) -> int:
    if mode == "set":
        return arg
    if mode == "pair":
        return arg[0] | (arg[1] << n)
    if mode == "kway":
        key = 0
        for i, a in enumerate(arg):
            key |= a << (i * n)
        return key
    key = 0
    for i, (a, b) in enumerate(arg):
        key |= (a | (b << n)) << (2 * n * i)
    return key


def _decode(mode: str, n: int, k: int, key: int):
    full = (1 << n) - 1
    if mode == "set":
        return key
    if mode == "pair":
        return (key & full, (key >> n) & full)
    if mode == "kway":
        return tuple((key >> (i * n)) & full for i in range(k))
    return tuple(((key >> (2 * n * i)) & full, (key >> (2 * n * i + n)) & full) for i in range(k))


def _vec_join_meet(mode: str, n: int, k: int, a: np.ndarray, b: np.ndarray):
    if mode in ("set", "kway"):
        return a | b, a & b
    full = (1 << n) - 1
    shape = np.broadcast(a, b).shape
    j = np.zeros(shape, dtype=np.int64)
    m = np.zeros(shape, dtype=np.int64)
    for i in range(k):
        off = 2 * n * i
        a1, a2 = (a >> off) & full, (a >> (off + n)) & full
        b1, b2 = (b >> off) & full, (b >> (off + n)) & full
        u1, u2 = a1 | b1, a2 | b2
        j |= ((u1 & ~u2) | ((u2 & ~u1) << n)) << off
        m |= ((a1 & b1) | ((a2 & b2) << n)) << off
    return j, m


def _key_space(mode: str, n: int, k: int) -> int:
    bits = n * k if mode in ("set", "kway") else 2 * n * k
    return 1 << bits


def _local_set_check(vals: np.ndarray, n: int, tol: float):
    m = np.arange(1 << n)
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = 1 << i, 1 << j
            base = m[(m & (bi | bj)) == 0]
            gap = vals[base | bi] + vals[base | bj] - vals[base | bi | bj] - vals[base]
            bad = np.flatnonzero(gap < -tol)
            if len(bad):
                p = bad[0]
                return (float(gap[p]), int(base[p] | bi), int(base[p] | bj))
    return None


def is_submodular(f: DiscreteFunction, family: Iterable | None = None, tol: float = 1e-10,
                  chunk: int = 1 << 22) -> tuple[bool, dict | None]:
    """Exhaustive lattice inequality check; returns (ok, witness).

    The witness holds the violating pair, their join and meet, and the gap
    f(A)+f(B)-f(A v B)-f(A ^ B) < 0. A family that is not closed under join
    and meet raises ``FamilyNotLattice``.
    """
    mode, n, k = f.mode, f.n, f.k
    if n > 16:
        raise ValueError("exhaustive check supports n <= 16")
    if family is None:
        args = list(all_args(mode, n, k)) if count_args(mode, n, k) <= (1 << 16) else None
        if mode == "set" and n > 10:
            vals = np.array([f.value(a) for a in range(1 << n)])
            w = _local_set_check(vals, n, tol)
            if w is None:
                return True, None
            gap, a, b = w
            return False, {"A": a, "B": b, "join": a | b, "meet": a & b, "gap": gap}
        if args is None:
            raise ValueError("too many arguments for an exhaustive pair check")
    else:
        args = sorted({f.key(a) for a in family})
        if not args:
            raise ValueError("family must be nonempty")
    space = _key_space(mode, n, k)
    if space > (1 << 24):
        raise ValueError("argument encoding too large")
    vals = np.full(space, np.nan)
    keys = np.array([_encode(mode, n, a) for a in args], dtype=np.int64)
    vals[keys] = [f.value(a) for a in args]
    rows = max(1, chunk // len(keys))
    for start in range(0, len(keys), rows):
        a = keys[start:start + rows, None]
        b = keys[None, :]
        j, m = _vec_join_meet(mode, n, k, a, b)
        vj, vm = vals[j], vals[m]
        bad = np.isnan(vj) | np.isnan(vm)
        if bad.any():
            p, q = np.argwhere(bad)[0]
            raise FamilyNotLattice(
                f"family not closed: join/meet of {_decode(mode, n, k, int(a[p, 0]))} and "
                f"{_decode(mode, n, k, int(b[0, q]))} missing")
        gap = vals[a] + vals[b] - vj - vm
        viol = np.argwhere(gap < -tol)
        if len(viol):
            p, q = viol[0]
            A, B = _decode(mode, n, k, int(a[p, 0])), _decode(mode, n, k, int(b[0, q]))
            return False, {"A": A, "B": B, "join": join(mode, A, B), "meet": meet(mode, A, B),
                           "gap": float(gap[p, q])}
    return True, None


# ---------------------------------------------------------------------------
# Continuous checks


def _sample_pairs(rng: np.random.Generator, shape, samples: int, nonneg: bool = False):
    for s in range(samples):
        x = rng.uniform(-1.0, 1.0, size=shape)
        y = rng.uniform(-1.0, 1.0, size=shape)
        if s % 2:
            x /= np.abs(x).max()
            y /= np.abs(y).max()
        if s % 3 == 0:
            x = np.round(x * 2) / 2
            y = np.round(y * 2) / 2
        if nonneg:
            x, y = np.abs(x), np.abs(y)
        yield x, y


def _lists(*arrs):
    return [np.asarray(a).tolist() for a in arrs]


def is_continuous_submodular(F: Callable[[np.ndarray], float], n: int | tuple, mode: str = "S2",
                             samples: int = 1000, seed: int = 0, tol: float = 1e-10,
                             extra_pairs: Iterable | None = None, nonneg: bool = False):
    """Sampled check of F(x)+F(y) >= F(x v y)+F(x ^ y); returns (ok, witness)."""
    if samples < 1:
        raise ValueError("samples must be positive")
    shape = (n,) if isinstance(n, int) else tuple(n)
    rng = np.random.default_rng(seed)
    pairs = _sample_pairs(rng, shape, samples, nonneg)
    if extra_pairs is not None:
        pairs = _chain(extra_pairs, pairs)
    for x, y in pairs:
        jx, mx = vjoin(x, y, mode), vmeet(x, y, mode)
        lhs = F(x) + F(y)
        rhs = F(jx) + F(mx)
        if lhs < rhs - tol * (1 + abs(lhs) + abs(rhs)):
            xl, yl, jl, ml = _lists(x, y, jx, mx)
            return False, {"x": xl, "y": yl, "join": jl, "meet": ml, "gap": float(lhs - rhs)}
    return True, None


def _chain(*its):
    for it in its:
        yield from it


def midpoint_convex(F: Callable[[np.ndarray], float], shape, samples: int = 1000, seed: int = 0,
                    tol: float = 1e-10, extra_pairs: Iterable | None = None, nonneg: bool = False):
    """Sampled midpoint inequality F((x+y)/2) <= (F(x)+F(y))/2; returns (ok, witness)."""
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    rng = np.random.default_rng(seed)
    pairs = _sample_pairs(rng, shape, samples, nonneg)
    if extra_pairs is not None:
        pairs = _chain(extra_pairs, pairs)
    for x, y in pairs:
        mid = F(0.5 * (x + y))
        avg = 0.5 * (F(x) + F(y))
        if mid > avg + tol * (1 + abs(mid) + abs(avg)):
            xl, yl = _lists(x, y)
            return False, {"x": xl, "y": yl, "midpoint_value": mid, "average": avg}
    return True, None


def _indicator_pairs(f: DiscreteFunction, limit: int, rng: np.random.Generator):
    pts = [arg_vector(f, a) for a in f.args() if not is_empty_arg(f.mode, a)]
    if len(pts) ** 2 <= limit:
        for p in pts:
            for q in pts:
                yield p, q
    else:
        for _ in range(limit):
            yield pts[int(rng.integers(len(pts)))], pts[int(rng.integers(len(pts)))]


def check_convexity_equivalence(f: DiscreteFunction, trials: int = 1000, seed: int = 0, tol: float = 1e-10,
                                indicator_limit: int = 4096) -> dict:
    """Compare discrete submodularity, convexity of the extension, and its
    continuous submodularity. All three must agree.

    Random pairs are drawn from the natural domain of the extension (the
    nonnegative orthant in kway mode). Pairs of indicator points are added, as
    those are where a discrete violation becomes visible.
    """
    shape = (f.n,) if f.mode in ("set", "pair") else (f.k, f.n)
    nonneg = f.mode == "kway"
    F = lambda x: lovasz_eval(f, x)  # noqa: E731
    ok_d, w_d = is_submodular(f, tol=tol)
    rng = np.random.default_rng(seed + 1)
    ok_c, w_c = midpoint_convex(F, shape, trials, seed, tol,
                                extra_pairs=_indicator_pairs(f, indicator_limit, rng), nonneg=nonneg)
    rng = np.random.default_rng(seed + 2)
    ok_s, w_s = is_continuous_submodular(F, shape, vector_mode(f.mode), trials, seed + 3, tol,
                                         extra_pairs=_indicator_pairs(f, indicator_limit, rng), nonneg=nonneg)
    return {
        "submodular": {"passed": ok_d, "witness": _jsonable_arg(w_d)},
        "convex_extension": {"passed": ok_c, "witness": w_c},
        "submodular_extension": {"passed": ok_s, "witness": w_s},
        "agree": ok_d == ok_c == ok_s,
    }


def _jsonable_arg(w):
    if w is None:
        return None
    out = {}
    for key, v in w.items():
        out[key] = v if isinstance(v, float) else _arg_lists(v)
    return out


def _arg_lists(a):
    if isinstance(a, int):
        return list(members(a))
    return [_arg_lists(x) for x in a]


# ---------------------------------------------------------------------------
# Characterizations of extensions among continuous functions


class _Checks:
    def __init__(self):
        self.out: dict[str, dict] = {}

    def add(self, name, ok, witness=None):
        r = self.out.setdefault(name, {"passed": True, "checked": 0, "witness": None})
        r["checked"] += 1
        if not ok and r["passed"]:
            r["passed"] = False
            r["witness"] = witness


def _close(a, b, tol):
    return abs(a - b) <= tol * (1 + abs(a) + abs(b))


def _sign_completions(x: np.ndarray, limit: int = 64):
    """Sign vectors s in {+1,-1}^n agreeing with the signs of x off its zeros."""
    zeros = np.flatnonzero(x == 0)
    base = np.where(x < 0, -1.0, 1.0)
    if 2 ** len(zeros) > limit:
        yield base
        return
    for bits in range(2 ** len(zeros)):
        s = base.copy()
        for t, z in enumerate(zeros):
            if (bits >> t) & 1:
                s[z] = -1.0
        yield s


def _random_vec(rng, n, s):
    x = rng.normal(size=n)
    if s % 3 == 0:
        x = np.round(x)
    return x


EXTENSION_CONDITIONS = {
    "set": ("homogeneity", "comonotonic_additivity"),
    "pair": ("homogeneity", "abs_comonotonic_additivity", "layer_split"),
}


def check_characterization(F: Callable[[np.ndarray], float], n: int, mode: str = "set", samples: int = 300,
                           seed: int = 0, tol: float = 1e-9) -> dict:
    """Test whether F is the extension of a set function (mode "set") or of a
    pair function (mode "pair"), via sampled defining conditions.

    Set mode: positive homogeneity and comonotonic additivity decide whether F
    is an extension at all; translation F(x + t1) = F(x) + t F(1) and (S2)
    submodularity are the extra conditions for a submodular f.
    Pair mode: positive homogeneity, absolute comonotonic additivity and the
    layer split F(x ^ c1_s) + F(x - x ^ c1_s) = F(x) decide extension-ness;
    (BS2) bisubmodularity and the translation inequality along a full sign
    pattern extending that of x are reported as the bisubmodular conditions.
    When F passes as an extension, f is rebuilt from indicator values, F is
    compared with its extension on random points and f is checked for
    (bi)submodularity exhaustively.
    """
    if mode not in ("set", "pair"):
        raise ValueError("mode must be 'set' or 'pair'")
    rng = np.random.default_rng(seed)
    c = _Checks()
    one = np.ones(n)
    F1 = F(one)
    for s in range(samples):
        x = _random_vec(rng, n, s)
        y = _random_vec(rng, n, s + 1)
        t = float(rng.uniform(0, 4))
        Fx = F(x)
        c.add("homogeneity", _close(F(t * x), t * Fx, tol), {"x": x.tolist(), "t": t})
        if mode == "set":
            tt = float(rng.normal())
            c.add("translation", _close(F(x + tt), Fx + tt * F1, tol), {"x": x.tolist(), "t": tt})
            lhs, rhs = Fx + F(y), F(np.maximum(x, y)) + F(np.minimum(x, y))
            c.add("submodular_S2", lhs >= rhs - tol * (1 + abs(lhs)), {"x": x.tolist(), "y": y.tolist()})
            perm = rng.permutation(n)
            u, v = np.empty(n), np.empty(n)
            u[perm] = np.sort(rng.normal(size=n))
            v[perm] = np.sort(rng.normal(size=n))
            c.add("comonotonic_additivity", _close(F(u + v), F(u) + F(v), tol), {"x": u.tolist(), "y": v.tolist()})
        else:
            lhs, rhs = Fx + F(y), F(vjoin(x, y, "BS2")) + F(vmeet(x, y, "BS2"))
            c.add("bisubmodular_BS2", lhs >= rhs - tol * (1 + abs(lhs)), {"x": x.tolist(), "y": y.tolist()})
            ok = False
            for sg in _sign_completions(x):
                if F(x + t * sg) >= Fx + F(t * sg) - tol * (1 + abs(Fx)):
                    ok = True
                    break
            c.add("translation_inequality", ok, {"x": x.tolist(), "t": t})
            perm = rng.permutation(n)
            sg = rng.choice([-1.0, 1.0], size=n)
            a, b = np.empty(n), np.empty(n)
            a[perm] = np.sort(np.abs(rng.normal(size=n)))
            b[perm] = np.sort(np.abs(rng.normal(size=n)))
            u, v = sg * a, sg * b
            c.add("abs_comonotonic_additivity", _close(F(u + v), F(u) + F(v), tol),
                  {"x": u.tolist(), "y": v.tolist()})
            cc = float(rng.uniform(0, 1.5 * np.abs(x).max()))
            ok = False
            for sg in _sign_completions(x):
                low = vmeet(x, cc * sg, "BS2")
                if _close(F(low) + F(x - low), Fx, tol):
                    ok = True
                    break
            c.add("layer_split", ok, {"x": x.tolist(), "c": cc})
    report: dict = {"conditions": dict(c.out)}
    report["is_extension"] = all(c.out[name]["passed"] for name in EXTENSION_CONDITIONS[mode])
    if report["is_extension"]:
        if mode == "set":
            f = DiscreteFunction(n, "set", values={a: F(arg_vector_set(n, a)) for a in range(1 << n)})
        else:
            f = DiscreteFunction(n, "pair", values={(a, b): F(arg_vector_set(n, a) - arg_vector_set(n, b))
                                                   for a, b in all_args("pair", n)})
        worst = 0.0
        for s in range(samples):
            x = _random_vec(rng, n, s)
            worst = max(worst, abs(F(x) - lovasz_eval(f, x)) / (1 + abs(F(x))))
        ok, wit = is_submodular(f, tol=tol)
        report["reconstruction"] = {"passed": worst <= tol, "max_rel_error": worst}
        report["discrete_submodular"] = {"passed": ok, "witness": _jsonable_arg(wit)}
        report["reconstructed"] = f
    return report


def arg_vector_set(n: int, mask: int) -> np.ndarray:
    v = np.zeros(n)
    v[list(members(mask))] = 1.0
    return v


def characterization_passed(report: dict) -> bool:
    """True when F was recognized as an extension and rebuilt exactly."""
    return report["is_extension"] and report["reconstruction"]["passed"]
