"""Fractional programming: Dinkelbach, mixed inverse-power/steepest-descent,
projected subgradient and a stochastic subgradient iteration.

Problems minimize F/G with F = F1 - F2 and G = G1 - G2, all parts convex.
Maximization is handled by swapping F1 and F2 (i.e. negating F) and negating
the optimal ratio on the way out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np
from scipy.optimize import linprog

from .lovasz import level_vectors, lovasz_eval, lovasz_subgradient, subdifferential_vertices
from .setfun import DiscreteFunction, RestrictedFamily, _check_enumerable

ZERO_DENOMINATOR = 1e-12


@dataclass
class Term:
    """A convex, positively homogeneous part of a DC split."""

    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    degree: float = 1.0
    subdiff: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""
    is_zero: bool = False

    @classmethod
    def zero(cls) -> "Term":
        return cls(lambda x: 0.0, lambda x: np.zeros_like(x, dtype=float), 1.0,
                   lambda x: np.zeros((1, len(x))), "zero", True)

    @classmethod
    def from_function(cls, f: DiscreteFunction, name: str = "") -> "Term":
        """Extension of a set or pair function, with its exact piece gradients."""
        return cls(lambda x: lovasz_eval(f, x), lambda x: lovasz_subgradient(f, x), 1.0,
                   lambda x: subdifferential_vertices(f, x), name or f.name)

    def scaled(self, c: float) -> "Term":
        if c < 0:
            raise ValueError("scaling a convex part by a negative number")
        sub = (lambda x: c * self.subdiff(x)) if self.subdiff is not None else None
        return Term(lambda x: c * self.value(x), lambda x: c * self.grad(x), self.degree, sub,
                    f"{c}*{self.name}", self.is_zero or c == 0)


def sum_terms(*terms: Term) -> Term:
    live = [t for t in terms if not t.is_zero]
    if not live:
        return Term.zero()
    if len(live) == 1:
        return live[0]
    return Term(lambda x: sum(t.value(x) for t in live), lambda x: sum(t.grad(x) for t in live),
                live[0].degree, None, "+".join(t.name for t in live))


@dataclass
class Region:
    """Feasible set: l-infinity ball or sphere, nonnegative sphere, or a box.

    ``zero_sum`` adds the constraint <x, 1> = 0.
    """

    kind: str = "sphere"
    zero_sum: bool = False
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("ball", "sphere", "nonneg_sphere", "box", "free"):
            raise ValueError(f"unknown region {self.kind!r}")

    def project(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "free":
            return x - x.mean() if self.zero_sum else x
        if self.kind in ("ball", "box"):
            lo = -np.ones_like(x) if self.lo is None or self.kind == "ball" else self.lo
            hi = np.ones_like(x) if self.hi is None or self.kind == "ball" else self.hi
            if not self.zero_sum:
                return np.clip(x, lo, hi)
            return _project_box_hyperplane(x, lo, hi)
        if self.kind == "nonneg_sphere":
            x = np.maximum(x, 0.0)
        if self.zero_sum:
            x = x - x.mean()
        m = np.abs(x).max()
        if m <= ZERO_DENOMINATOR:
            x = np.zeros_like(x)
            x[0] = 1.0
            if self.zero_sum and len(x) > 1:
                x[1] = -1.0
            return x
        return x / m


def _project_box_hyperplane(x, lo, hi):
    """Euclidean projection onto {lo <= y <= hi, sum(y) = 0}.

    y = clip(x - mu, lo, hi) with mu a root of the piecewise linear,
    nonincreasing s(mu) = sum(y); the root is found exactly between two
    consecutive breakpoints x - hi, x - lo.
    """
    bps = np.unique(np.concatenate([x - hi, x - lo]))
    s = np.clip(x[None, :] - bps[:, None], lo, hi).sum(axis=1)
    if s[0] < 0 or s[-1] > 0:
        raise ValueError("box does not meet the zero-sum hyperplane")
    j = int(np.searchsorted(-s, 0.0))  # first breakpoint with s <= 0
    if s[j] == 0 or j == 0:
        mu = bps[j]
    else:
        mu = bps[j - 1] + (bps[j] - bps[j - 1]) * s[j - 1] / (s[j - 1] - s[j])
    return np.clip(x - mu, lo, hi)


@dataclass
class SolverConfig:
    max_iter: int = 50
    tol: float = 1e-10
    inner_restarts: int = 0
    inner_steps: int = 300
    step: float = 0.5
    seed: int = 42
    proximal_weight: float = 1.0
    slack: float = 1e-9

    def __post_init__(self):
        if self.max_iter < 1 or self.inner_steps < 1 or self.step <= 0 or self.tol <= 0:
            raise ValueError("solver settings must be positive")
        if self.proximal_weight < 0 or self.inner_restarts < 0:
            raise ValueError("proximal weight and restarts must be nonnegative")


@dataclass
class SolverTrace:
    iterations: list = field(default_factory=list)
    converged: bool = False
    status: str = "running"
    eigen_residual: float | None = None
    eigen_residual_selected: float | None = None

    def ratios(self) -> list[float]:
        return [it["r"] for it in self.iterations]

    def is_monotone(self, slack: float = 1e-9) -> bool:
        r = self.ratios()
        return all(b <= a + slack * (1 + abs(a)) for a, b in zip(r, r[1:]))

    def to_json(self, with_points: bool = True) -> dict:
        its = []
        for it in self.iterations:
            d = {k: v for k, v in it.items() if k != "x"}
            if with_points and "x" in it:
                d["x"] = [float(v) for v in np.asarray(it["x"]).ravel()]
            its.append(d)
        return {"iterations": its, "converged": self.converged, "status": self.status,
                "eigen_residual": self.eigen_residual, "eigen_residual_selected": self.eigen_residual_selected}


@dataclass
class FractionalProblem:
    """Minimize or maximize (F1 - F2)/(G1 - G2) over a region.

    ``rounding`` ("set" or "pair") declares that F and G are extensions of
    discrete functions, so threshold vectors of an iterate never have a worse
    ratio than the iterate; the IP-SD loop then also tries them.
    """

    n: int
    F1: Term
    G1: Term
    F2: Term = field(default_factory=Term.zero)
    G2: Term = field(default_factory=Term.zero)
    region: Region = field(default_factory=Region)
    sense: str = "min"
    rounding: str | None = None
    name: str = ""

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")

    def F(self, x) -> float:
        return self.F1.value(x) - self.F2.value(x)

    def G(self, x) -> float:
        return self.G1.value(x) - self.G2.value(x)

    def ratio(self, x) -> float:
        return self.F(x) / self.G(x)

    def as_min(self) -> tuple["FractionalProblem", float]:
        if self.sense == "min":
            return self, 1.0
        return replace(self, F1=self.F2, F2=self.F1, sense="min"), -1.0

    def check_homogeneity(self, seed: int = 0, count: int = 10, tol: float = 1e-9) -> dict:
        """Spot check part(2x) = 2^p part(x) for every part."""
        rng = np.random.default_rng(seed)
        out = {}
        for label in ("F1", "F2", "G1", "G2"):
            t = getattr(self, label)
            ok = True
            for _ in range(count):
                x = rng.normal(size=self.n)
                a, b = t.value(2 * x), (2.0**t.degree) * t.value(x)
                ok &= abs(a - b) <= tol * (1 + abs(a) + abs(b))
            out[label] = bool(ok)
        return out


def _random_start(prob: FractionalProblem, rng: np.random.Generator) -> np.ndarray:
    for _ in range(100):
        x = prob.region.project(rng.normal(size=prob.n)) if prob.region.kind != "free" else rng.normal(size=prob.n)
        if prob.region.kind in ("ball", "box"):
            x = Region("sphere", prob.region.zero_sum).project(x)
        if prob.G(x) > ZERO_DENOMINATOR:
            return x
    raise ValueError("could not find a start with positive denominator")


# ---------------------------------------------------------------------------
# Projected subgradient


def projected_subgradient(value: Callable, grad: Callable, region: Region, cfg: SolverConfig,
                          x0: np.ndarray | None = None, n: int | None = None) -> tuple[float, np.ndarray]:
    """Minimize a convex function by projected subgradient steps c/sqrt(t).

    Runs from ``x0`` and from ``cfg.inner_restarts`` seeded random points and
    returns the best visited (value, point).
    """
    rng = np.random.default_rng(cfg.seed)
    starts = []
    if x0 is not None:
        starts.append(region.project(np.asarray(x0, dtype=float)))
    dim = n if n is not None else len(starts[0])
    for _ in range(cfg.inner_restarts + (0 if starts else 1)):
        starts.append(region.project(rng.normal(size=dim)))
    best_v, best_x = math.inf, None
    for x in starts:
        v = value(x)
        if v < best_v:
            best_v, best_x = v, x.copy()
        for t in range(1, cfg.inner_steps + 1):
            g = grad(x)
            norm = float(np.linalg.norm(g))
            if norm == 0.0:
                break
            x = region.project(x - (cfg.step / math.sqrt(t)) * g / norm)
            v = value(x)
            if v < best_v:
                best_v, best_x = v, x.copy()
    return float(best_v), best_x


# ---------------------------------------------------------------------------
# Dinkelbach over finite sets


def dinkelbach(fv: np.ndarray, gv: np.ndarray, start: int = 0, max_iter: int = 10_000):
    """Dinkelbach's iteration for min fv/gv over a finite index set (gv > 0).

    The inner problem argmin fv - r*gv is solved exactly (first minimizer).
    Returns (r, index, [(k, r_k, index_k), ...]).
    """
    j = start
    r = fv[j] / gv[j]
    trace = [(0, float(r), j)]
    for k in range(1, max_iter + 1):
        vals = fv - r * gv
        jn = int(np.argmin(vals))
        if vals[jn] >= 0:
            break
        rn = fv[jn] / gv[jn]
        if not rn < r:
            break
        j, r = jn, rn
        trace.append((k, float(r), j))
    return float(r), j, trace


def dinkelbach_discrete(f: DiscreteFunction, g: DiscreteFunction, family: RestrictedFamily | None = None,
                        sense: str = "min"):
    """Exact Dinkelbach scheme over an enumerable family; returns (r*, arg*, trace)."""
    if (f.n, f.mode, f.k) != (g.n, g.mode, g.k):
        raise ValueError("f and g must share ground set and mode")
    family = family if family is not None else RestrictedFamily.everything(f.mode, f.n, f.k)
    _check_enumerable(f, family)
    args, fl, gl = [], [], []
    for a in family:
        ga = g.value(a)
        if ga < 0:
            raise ValueError(f"g is negative at {a!r}")
        if ga > 0:
            args.append(a)
            fl.append(f.value(a))
            gl.append(ga)
    if not args:
        raise ValueError("infeasible family: g vanishes everywhere on it")
    sign = 1.0 if sense == "min" else -1.0
    r, j, raw = dinkelbach(sign * np.array(fl), np.array(gl))
    trace = SolverTrace([{"k": k, "r": sign * rk, "arg": args[i]} for k, rk, i in raw], True, "converged")
    return sign * r, args[j], trace


# ---------------------------------------------------------------------------
# Mixed inverse-power / steepest-descent


def _eigen_residual(p: FractionalProblem, x: np.ndarray, r: float, u: np.ndarray, v: np.ndarray):
    """Residual of 0 in dF1 - dF2 - r(dG1 - dG2) at x.

    Returns (selected, best): the sup-norm with the chosen subgradients, and,
    when every part exposes its subdifferential vertices, the distance from 0
    over all subgradient choices (a small linear program).
    """
    if r >= 0:
        conv_grad = p.F1.grad(x) + r * p.G2.grad(x)
    else:
        conv_grad = p.F1.grad(x) - r * p.G1.grad(x)
    selected = float(np.abs(conv_grad - u - abs(r) * v).max())
    parts = [(p.F1, 1.0), (p.F2, -1.0), (p.G1, -r), (p.G2, r)]
    if any(t.subdiff is None for t, _ in parts):
        return selected, selected
    blocks = [(c, t.subdiff(x)) for t, c in parts if not t.is_zero and c != 0]
    if not blocks:
        return selected, 0.0
    n = len(x)
    cols = sum(len(V) for _, V in blocks)
    # variables: convex weights for each block, then t
    A_ub, b_ub = [], []
    M = np.hstack([c * V.T for c, V in blocks])
    for sgn in (1.0, -1.0):
        A_ub.append(np.hstack([sgn * M, -np.ones((n, 1))]))
        b_ub.append(np.zeros(n))
    A_eq = np.zeros((len(blocks), cols + 1))
    pos = 0
    for i, (_, V) in enumerate(blocks):
        A_eq[i, pos:pos + len(V)] = 1.0
        pos += len(V)
    cost = np.zeros(cols + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=np.vstack(A_ub), b_ub=np.concatenate(b_ub), A_eq=A_eq, b_eq=np.ones(len(blocks)),
                  bounds=[(0, None)] * (cols + 1), method="highs")
    best = float(res.x[-1]) if res.status == 0 else selected
    return selected, min(selected, best)


def mixed_ipsd(prob: FractionalProblem, cfg: SolverConfig | None = None, variant: str = "ball",
               x0: np.ndarray | None = None) -> tuple[float, np.ndarray, SolverTrace]:
    """One run of the mixed IP-SD scheme.

    Each step solves, over the l-infinity ball (``variant="ball"``) or the
    whole space followed by rescaling to the unit sphere (``"normalized"``),
    the convex problem

        min  C(y) - <w, y> + lam*|y - x_k|^2

    where, for r_k >= 0, C = F1 + r_k G2 and w = u + r_k v with u in dF2(x_k),
    v in dG1(x_k); for r_k < 0 the roles of G1 and G2 swap. The inner solver
    starts at x_k and keeps its best point, so r_k never increases.
    """
    cfg = cfg or SolverConfig()
    if variant not in ("ball", "normalized"):
        raise ValueError("variant must be 'ball' or 'normalized'")
    p, sign = prob.as_min()
    rng = np.random.default_rng(cfg.seed)
    x = _random_start(p, rng) if x0 is None else np.asarray(x0, dtype=float)
    gx = p.G(x)
    if not gx > ZERO_DENOMINATOR:
        raise ValueError("start point must have positive denominator")
    r = p.F(x) / gx
    trace = SolverTrace()
    trace.iterations.append({"k": 0, "r": sign * r, "x": x.copy(), "inner": "start"})
    lam = cfg.proximal_weight
    inner_region = Region("ball", p.region.zero_sum) if variant == "ball" else Region("free", p.region.zero_sum)
    u = v = np.zeros(p.n)
    for k in range(1, cfg.max_iter + 1):
        u = p.F2.grad(x)
        if r >= 0:
            conv, lin = sum_terms(p.F1, p.G2.scaled(r)), p.G1.grad(x)
        else:
            conv, lin = sum_terms(p.F1, p.G1.scaled(-r)), p.G2.grad(x)
        w = u + abs(r) * lin
        xk = x.copy()

        def phi(y, conv=conv, w=w, xk=xk):
            return conv.value(y) - float(w @ y) + lam * float((y - xk) @ (y - xk))

        def dphi(y, conv=conv, w=w, xk=xk):
            return conv.grad(y) - w + 2 * lam * (y - xk)

        inner_cfg = replace(cfg, seed=cfg.seed + k)
        phi0 = phi(xk)
        phi_best, y = projected_subgradient(phi, dphi, inner_region, inner_cfg, x0=xk)
        status = "improved" if phi_best < phi0 else "stalled"
        if variant == "normalized":
            m = np.abs(y).max()
            if m <= ZERO_DENOMINATOR:
                trace.status = "terminated-at-zero-denominator"
                break
            y = y / m
        gy = p.G(y)
        ry = p.F(y) / gy if gy > ZERO_DENOMINATOR else math.inf
        if p.rounding is not None:
            for z in level_vectors(y, p.rounding):
                gz = p.G(z)
                if gz > ZERO_DENOMINATOR:
                    rz = p.F(z) / gz
                    if rz < ry:
                        y, ry, gy = z, rz, gz
        if not gy > ZERO_DENOMINATOR:
            trace.status = "terminated-at-zero-denominator"
            break
        if ry > r + cfg.slack * (1 + abs(r)):
            trace.status = "inner-not-descending"
            break
        trace.iterations.append({"k": k, "r": sign * ry, "x": y.copy(), "inner": status})
        done = abs(ry - r) <= cfg.tol * (1 + abs(r))
        x, r = y, min(r, ry)
        if done:
            trace.converged = True
            trace.status = "converged"
            break
    else:
        trace.status = "max-iter"
    u = p.F2.grad(x)
    lin = p.G1.grad(x) if r >= 0 else p.G2.grad(x)
    sel, best = _eigen_residual(p, x, r, u, lin)
    trace.eigen_residual_selected, trace.eigen_residual = sel, best
    return sign * r, x, trace


def multistart(solver: Callable, prob: FractionalProblem, cfg: SolverConfig, starts: int = 20,
               **kw) -> tuple[float, np.ndarray, list]:
    """Run ``solver`` from ``starts`` seeds; the best value wins, then the lowest seed."""
    results = []
    for s in range(starts):
        r, x, tr = solver(prob, replace(cfg, seed=cfg.seed + s), **kw)
        results.append((r, s, x, tr))
    key = (lambda t: (t[0], t[1])) if prob.sense == "min" else (lambda t: (-t[0], t[1]))
    r, s, x, _ = min(results, key=key)
    return r, x, [t[3] for t in results]


# ---------------------------------------------------------------------------
# Stochastic subgradient


def stochastic_subgradient_ratio(prob: FractionalProblem, cfg: SolverConfig | None = None, noise_scale: float = 0.0,
                                 x0: np.ndarray | None = None) -> tuple[float, np.ndarray, SolverTrace]:
    """x_{k+1} = x_k - a_k (y_k + xi_k) with y_k a subgradient of F/G at x_k,
    xi_k Gaussian noise and a_k = c/sqrt(k). Returns the best ratio seen."""
    cfg = cfg or SolverConfig(max_iter=1000)
    p, sign = prob.as_min()
    rng = np.random.default_rng(cfg.seed)
    x = _random_start(p, rng) if x0 is None else np.asarray(x0, dtype=float)
    trace = SolverTrace()
    best_r, best_x = math.inf, x.copy()
    sphere = Region("sphere", p.region.zero_sum)
    renorm = 0
    for k in range(1, cfg.max_iter + 1):
        g = p.G(x)
        if not g > ZERO_DENOMINATOR or np.abs(x).max() <= ZERO_DENOMINATOR:
            x = sphere.project(x if np.abs(x).max() > ZERO_DENOMINATOR else rng.normal(size=p.n))
            renorm += 1
            g = p.G(x)
            if not g > ZERO_DENOMINATOR:
                continue
        f = p.F(x)
        r = f / g
        if r < best_r:
            best_r, best_x = r, x.copy()
        trace.iterations.append({"k": k, "r": sign * r})
        gf = p.F1.grad(x) - p.F2.grad(x)
        gg = p.G1.grad(x) - p.G2.grad(x)
        y = (gf - r * gg) / g
        xi = noise_scale * rng.normal(size=p.n) if noise_scale > 0 else 0.0
        x = x - (cfg.step / math.sqrt(k)) * (y + xi)
        if p.region.kind == "nonneg_sphere":
            x = np.maximum(x, 0.0)
    trace.status = "max-iter" if renorm == 0 else f"max-iter ({renorm} renormalizations)"
    return sign * best_r, best_x, trace
