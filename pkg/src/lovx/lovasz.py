"""Lovász extensions of set, pair and k-tuple functions.

Set mode: sort x ascending (ties by index) and sum the widths between
consecutive values times f of the strict upper level set, with the first width
measured from 0 against f(V).

Pair mode: the same over |x|, with the level set split by sign into a
disjoint pair (positive part, negative part).

k-way modes integrate the tuple of level sets of all rows over one common
threshold. The integrand is piecewise constant, so the integral is an exact
sum over the sorted breakpoints.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable

import numpy as np

from .setfun import DiscreteFunction, all_args, is_empty_arg, members


def _as_point(f: DiscreteFunction, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if f.mode in ("set", "pair"):
        if x.shape != (f.n,):
            raise ValueError(f"point has shape {x.shape}, expected ({f.n},)")
    else:
        if x.ndim == 1 and f.k == 1 and x.shape == (f.n,):
            x = x[None, :]
        if x.shape != (f.k, f.n):
            raise ValueError(f"point has shape {x.shape}, expected ({f.k}, {f.n})")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite entries")
    return x


def _suffix_masks(order: np.ndarray) -> list[int]:
    """suffix[i] = mask of order[i:], with suffix[n] = 0."""
    n = len(order)
    out = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        out[i] = out[i + 1] | (1 << int(order[i]))
    return out


def _eval_set(f: DiscreteFunction, x: np.ndarray) -> float:
    order = np.argsort(x, kind="stable")
    xs = x[order]
    suf = _suffix_masks(order)
    total = xs[0] * f.value(suf[0])
    for i in range(1, len(xs)):
        w = xs[i] - xs[i - 1]
        if w != 0.0:
            total += w * f.value(suf[i])
    return float(total)


def _eval_pair(f: DiscreteFunction, x: np.ndarray) -> float:
    a = np.abs(x)
    order = np.argsort(a, kind="stable")
    as_ = a[order]
    pos = _suffix_masks(np.array([j for j in order if x[j] > 0], dtype=int))
    neg = _suffix_masks(np.array([j for j in order if x[j] < 0], dtype=int))
    # position -> index into the sign-filtered suffix lists
    pi = ni = 0
    total = 0.0
    prev = 0.0
    for i, j in enumerate(order):
        w = as_[i] - prev
        if w != 0.0:
            total += w * f.value((pos[pi], neg[ni]))
        prev = as_[i]
        if x[j] > 0:
            pi += 1
        elif x[j] < 0:
            ni += 1
    return float(total)


def _row_masks(cond: np.ndarray) -> tuple[int, ...]:
    out = []
    for row in cond:
        m = 0
        for j in np.flatnonzero(row):
            m |= 1 << int(j)
        out.append(m)
    return tuple(out)


def _eval_kway(f: DiscreteFunction, x: np.ndarray) -> float:
    b = np.unique(x)
    total = b[0] * f.value(_row_masks(np.ones_like(x, dtype=bool)))
    for j in range(len(b) - 1):
        total += (b[j + 1] - b[j]) * f.value(_row_masks(x > b[j]))
    return float(total)


def _eval_kway_pair(f: DiscreteFunction, x: np.ndarray) -> float:
    b = np.unique(np.concatenate(([0.0], np.abs(x).ravel())))
    total = 0.0
    for j in range(len(b) - 1):
        arg = tuple(zip(_row_masks(x > b[j]), _row_masks(x < -b[j])))
        total += (b[j + 1] - b[j]) * f.value(arg)
    return float(total)


def lovasz_eval(f: DiscreteFunction, x) -> float:
    """Value of the Lovász extension of ``f`` (matching its mode) at ``x``."""
    x = _as_point(f, x)
    if f.mode == "set":
        return _eval_set(f, x)
    if f.mode == "pair":
        return _eval_pair(f, x)
    if f.mode == "kway":
        return _eval_kway(f, x)
    return _eval_kway_pair(f, x)


def _grad_from_chain(f: DiscreteFunction, order, signs, x_shape) -> np.ndarray:
    """Gradient of the piece given by a total order (ascending) and signs.

    The chain is S_i = order[i:], split by ``signs`` in pair mode. The
    component at order[i] is sign * (f(S_i) - f(S_{i+1})) with f(S_n) = 0.
    """
    n = len(order)
    g = np.zeros(x_shape)
    pos = neg = 0
    vals = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        j = int(order[i])
        if signs is None:
            pos |= 1 << j
            vals[i] = f.value(pos)
        else:
            if signs[j] >= 0:
                pos |= 1 << j
            else:
                neg |= 1 << j
            vals[i] = f.value((pos, neg))
    for i in range(n):
        j = int(order[i])
        d = vals[i] - vals[i + 1]
        g[j] = d if signs is None else (d if signs[j] >= 0 else -d)
    return g


def lovasz_subgradient(f: DiscreteFunction, x) -> np.ndarray:
    """Gradient of the linear piece selected by the stable ascending sort.

    Pair mode sorts |x|; zero entries are put on the positive side.
    """
    if f.mode not in ("set", "pair"):
        raise ValueError("subgradients are provided for set and pair modes only")
    x = _as_point(f, x)
    if f.mode == "set":
        return _grad_from_chain(f, np.argsort(x, kind="stable"), None, x.shape)
    signs = np.where(x < 0, -1, 1)
    return _grad_from_chain(f, np.argsort(np.abs(x), kind="stable"), signs, x.shape)


def subdifferential_vertices(f: DiscreteFunction, x, limit: int = 4096, seed: int = 0) -> np.ndarray:
    """Gradients of every linear piece touching ``x`` (rows of the result).

    Pieces correspond to the orderings compatible with the ties of x (and, in
    pair mode, to the sign choices of zero entries). When there are more than
    ``limit`` of them a seeded random subset is returned.
    """
    if f.mode not in ("set", "pair"):
        raise ValueError("set and pair modes only")
    x = _as_point(f, x)
    key = x if f.mode == "set" else np.abs(x)
    vals, inverse = np.unique(key, return_inverse=True)
    groups = [np.flatnonzero(inverse == g) for g in range(len(vals))]
    zeros = np.flatnonzero(x == 0) if f.mode == "pair" else np.zeros(0, dtype=int)
    count = math.prod(math.factorial(len(g)) for g in groups) * (2 ** len(zeros))
    rng = np.random.default_rng(seed)

    def build(perms, zsigns):
        order = np.concatenate(perms) if perms else np.zeros(0, dtype=int)
        if f.mode == "set":
            return _grad_from_chain(f, order, None, x.shape)
        signs = np.where(x < 0, -1, 1)
        signs[zeros] = zsigns
        return _grad_from_chain(f, order, signs, x.shape)

    out = []
    if count <= limit:
        for perms in itertools.product(*(itertools.permutations(g) for g in groups)):
            for zs in itertools.product((1, -1), repeat=len(zeros)):
                out.append(build([np.array(p, dtype=int) for p in perms], np.array(zs, dtype=int)))
    else:
        for _ in range(limit):
            perms = [rng.permutation(g) for g in groups]
            zs = rng.choice([1, -1], size=len(zeros))
            out.append(build(perms, zs))
    return np.unique(np.array(out), axis=0)


def level_vectors(x: np.ndarray, mode: str = "set") -> list[np.ndarray]:
    """Indicator vectors of the threshold sets of ``x``.

    Set mode gives 1_{x > t} for every value t below the maximum and 1_V;
    pair mode gives 1_{x > t} - 1_{x < -t} for t in {0} and the values of |x|
    below the maximum.
    """
    x = np.asarray(x, dtype=float)
    out = []
    if mode == "set":
        vals = np.unique(x)
        out.append(np.ones_like(x))
        for t in vals[:-1]:
            out.append((x > t).astype(float))
    else:
        vals = np.unique(np.concatenate(([0.0], np.abs(x))))
        for t in vals[:-1]:
            out.append((x > t).astype(float) - (x < -t).astype(float))
    return out


def indicator(n: int, mask: int) -> np.ndarray:
    v = np.zeros(n)
    v[list(members(mask))] = 1.0
    return v


def arg_vector(f: DiscreteFunction, arg) -> np.ndarray:
    """The point at which the extension reproduces f(arg)."""
    if f.mode == "set":
        return indicator(f.n, arg)
    if f.mode == "pair":
        return indicator(f.n, arg[0]) - indicator(f.n, arg[1])
    if f.mode == "kway":
        return np.array([indicator(f.n, a) for a in arg])
    return np.array([indicator(f.n, a) - indicator(f.n, b) for a, b in arg])


# ---------------------------------------------------------------------------
# Structural checks


def _random_point(rng, shape, ties: bool) -> np.ndarray:
    x = rng.normal(size=shape) * rng.uniform(0.1, 3.0)
    if ties:
        x = np.round(x * 2) / 2
    return x


def _comonotonic_pair(rng, shape):
    size = int(np.prod(shape))
    perm = rng.permutation(size)
    x = np.empty(size)
    y = np.empty(size)
    x[perm] = np.sort(rng.normal(size=size))
    y[perm] = np.sort(rng.normal(size=size))
    if rng.random() < 0.3:
        x = np.round(x * 2) / 2
        x[perm] = np.sort(x[perm])
    return x.reshape(shape), y.reshape(shape)


def _abs_comonotonic_pair(rng, shape):
    size = int(np.prod(shape))
    perm = rng.permutation(size)
    signs = rng.choice([-1.0, 1.0], size=size)
    a = np.empty(size)
    b = np.empty(size)
    a[perm] = np.sort(np.abs(rng.normal(size=size)))
    b[perm] = np.sort(np.abs(rng.normal(size=size)))
    zero = rng.random(size) < 0.15
    # a zero magnitude is allowed at the bottom of the common order only
    cut = int(zero.sum())
    a[perm[:cut]] = 0.0
    b[perm[:cut]] = 0.0
    return (signs * a).reshape(shape), (signs * b).reshape(shape)


class _Recorder:
    def __init__(self):
        self.results: dict[str, dict] = {}

    def record(self, name: str, ok: bool, witness=None):
        r = self.results.setdefault(name, {"passed": True, "checked": 0, "witness": None})
        r["checked"] += 1
        if not ok and r["passed"]:
            r["passed"] = False
            r["witness"] = witness


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * (1.0 + abs(a) + abs(b))


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _w(**kw):
    return {k: _jsonable(v) for k, v in kw.items()}


def _pos(x):
    return np.maximum(x, 0.0)


def _neg(x):
    return np.maximum(-x, 0.0)


def setpair_companions(h: DiscreteFunction) -> dict[str, tuple[DiscreteFunction, Callable]]:
    """Pair functions built from a set function h, with their predicted extensions.

    Each entry maps a label to (pair function, callable giving its extension in
    terms of the extension of h). The labels name the construction rule.
    """
    n, full = h.n, h.full
    hv = {a: h.value(a) for a in range(full + 1)}
    hv[0] = 0.0
    hs = {a: hv[a] + hv[full & ~a] - hv[full] for a in range(full + 1)}
    hsym = DiscreteFunction(n, "set", values=hs)
    hL = lambda x: _eval_set(h, x)  # noqa: E731
    hsL = lambda x: _eval_set(hsym, x)  # noqa: E731

    def pair(fn):
        return DiscreteFunction(n, "pair", values={(a, b): fn(a, b) for a, b in all_args("pair", n)})

    return {
        "complement_shift": (pair(lambda a, b: hv[a] + hv[full & ~b] - hv[full]), hL),
        "symmetric_sum": (pair(lambda a, b: hs[a] + hs[b]), hsL),
        "first_slot": (pair(lambda a, b: hv[a]), hL),
        "union": (pair(lambda a, b: hv[a | b]), lambda x: hL(np.abs(x))),
        "sum": (pair(lambda a, b: hv[a] + hv[b]), lambda x: hL(_pos(x)) + hL(_neg(x))),
        "difference": (pair(lambda a, b: hv[a] - hv[b]), lambda x: hL(_pos(x)) - hL(_neg(x))),
    }


def check_structural(f: DiscreteFunction, trials: int = 100, seed: int = 0, h: DiscreteFunction | None = None,
                     parts: list[DiscreteFunction] | None = None, tol: float = 1e-9) -> dict:
    """Randomized checks of the structural identities of the extension of ``f``.

    Returns ``{property: {"passed", "checked", "witness"}}``. Failures are
    reported, never raised.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    rec = _Recorder()
    shape = (f.n,) if f.mode in ("set", "pair") else (f.k, f.n)
    fl = lambda x: lovasz_eval(f, x)  # noqa: E731
    table = f.table()
    nonempty_vals = [abs(v) for a, v in table.items() if not is_empty_arg(f.mode, a)]
    max_abs = max(nonempty_vals, default=0.0)
    sum_abs = float(sum(nonempty_vals))
    args = list(table)
    set_like = f.mode in ("set", "kway")
    f_full = f.value(f.full_arg())

    if h is None and f.mode == "set":
        h = f
    companions = setpair_companions(h) if h is not None else {}
    if parts is None and f.mode == "set":
        parts = [f, DiscreteFunction(f.n, "set", values={a: float(rng.uniform(-1, 1)) if a else 0.0
                                                          for a in range(1 << f.n)})]
    sep = None
    if parts:
        if any(p.mode != "set" or p.n != parts[0].n for p in parts):
            raise ValueError("separable parts must be set functions on one ground set")
        pvals = [[p.value(a) if a else 0.0 for a in range(1 << p.n)] for p in parts]
        sep = DiscreteFunction(parts[0].n, "kway", len(parts),
                               fn=lambda key: sum(pv[a] for pv, a in zip(pvals, key)))

    for t in range(trials):
        x = _random_point(rng, shape, ties=(t % 3 == 0))
        y = _random_point(rng, shape, ties=(t % 5 == 0))
        fx, fy = fl(x), fl(y)

        s = float(rng.uniform(0.0, 5.0)) if t % 7 else 0.0
        lhs = fl(s * x)
        rec.record("homogeneity", _close(lhs, s * fx, tol), _w(x=x, t=s, lhs=lhs, rhs=s * fx))

        a = args[int(rng.integers(len(args)))]
        if not is_empty_arg(f.mode, a):
            val = fl(arg_vector(f, a))
            rec.record("indicator", _close(val, table[a], tol), _w(arg=str(a), extension=val, value=table[a]))

        d1 = float(np.abs(x - y).sum())
        dinf = float(np.abs(x - y).max())
        diff = abs(fx - fy)
        rec.record("lipschitz_l1", diff <= 2 * max_abs * d1 + tol * (1 + diff),
                   _w(x=x, y=y, diff=diff, bound=2 * max_abs * d1))
        rec.record("lipschitz_linf", diff <= 2 * sum_abs * dinf + tol * (1 + diff),
                   _w(x=x, y=y, diff=diff, bound=2 * sum_abs * dinf))

        if set_like:
            s = float(rng.normal())
            lhs = fl(x + s)
            rec.record("translation", _close(lhs, fx + s * f_full, tol), _w(x=x, t=s, lhs=lhs, rhs=fx + s * f_full))
            u, v = _comonotonic_pair(rng, shape)
            lhs, rhs = fl(u + v), fl(u) + fl(v)
            rec.record("comonotonic_additivity", _close(lhs, rhs, tol), _w(x=u, y=v, lhs=lhs, rhs=rhs))
        else:
            u, v = _abs_comonotonic_pair(rng, shape)
            lhs, rhs = fl(u + v), fl(u) + fl(v)
            rec.record("abs_comonotonic_additivity", _close(lhs, rhs, tol), _w(x=u, y=v, lhs=lhs, rhs=rhs))

        if companions:
            z = _random_point(rng, (h.n,), ties=(t % 4 == 0))
            znn = np.abs(z)
            for label, (pf, pred) in companions.items():
                pt = znn if label == "first_slot" else z
                lhs, rhs = _eval_pair(pf, pt), pred(pt)
                rec.record(f"setpair_{label}", _close(lhs, rhs, tol), _w(x=pt, lhs=lhs, rhs=rhs))

        if sep is not None:
            X = _random_point(rng, (sep.k, sep.n), ties=(t % 4 == 0))
            lhs = _eval_kway(sep, X)
            rhs = sum(_eval_set(p, X[i]) for i, p in enumerate(parts))
            rec.record("separable_summation", _close(lhs, rhs, tol), _w(x=X, lhs=lhs, rhs=rhs))

    return rec.results


def all_passed(report: dict) -> bool:
    return all(r["passed"] for r in report.values())
