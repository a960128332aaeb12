"""Command-line front end: reads JSON inputs, runs one computation and
writes a single JSON report.

Exit codes: 0 on success, 1 when the computation fails or the input is
invalid, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import laplace1, morse
from .graphinv.cheeger import VARIANTS, cheeger, cheeger_like, poincare_profile_check
from .graphinv import invariants as inv
from .graphinv.catalog import CATALOG, functional_catalog
from .graphinv.graph import Graph
from .graphinv.relax import multiway_partition, submodular_vertex_cover
from .lovasz import all_passed, check_structural, lovasz_eval, lovasz_subgradient, subdifferential_vertices
from .setfun import DiscreteFunction, RestrictedFamily, dc_decompose, from_set_fn, members
from .solvers import (FractionalProblem, Region, SolverConfig, Term, dinkelbach_discrete, mixed_ipsd, multistart,
                      stochastic_subgradient_ratio)
from .submod import characterization_passed, check_characterization, check_convexity_equivalence, is_submodular


class InputError(ValueError):
    """Bad input file or field; reported with exit code 1."""


class Failure(Exception):
    """The computation ran but its answer is a failure (e.g. infeasible)."""

    def __init__(self, results):
        super().__init__("computation failed")
        self.results = results


# ---------------------------------------------------------------------------
# Parsing


def _load_json(path: str, what: str):
    p = Path(path[1:] if path.startswith("@") else path)
    try:
        return json.loads(p.read_text())
    except FileNotFoundError:
        raise InputError(f"{what}: file {p} not found") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{what}: {p} is not JSON ({e})") from None


def _wrap(what: str, build, data):
    try:
        return build(data)
    except (KeyError, TypeError) as e:
        raise InputError(f"{what}: missing or malformed field {e}") from None
    except ValueError as e:
        raise InputError(f"{what}: {e}") from None


def parse_graph(path: str) -> Graph:
    return _wrap("graph", Graph.from_json, _load_json(path, "graph"))


def parse_function(path: str) -> DiscreteFunction:
    return _wrap("function", DiscreteFunction.from_json, _load_json(path, "function"))


def parse_complex(path: str, close: bool = False) -> morse.SimplicialComplex:
    return _wrap("complex", lambda d: morse.SimplicialComplex.from_json(d, close=close), _load_json(path, "complex"))


def parse_hypergraph(path: str) -> morse.Hypergraph:
    return _wrap("hypergraph", morse.Hypergraph.from_json, _load_json(path, "hypergraph"))


def parse_face_function(path: str) -> morse.FaceFunction:
    return _wrap("face function", morse.FaceFunction.from_json, _load_json(path, "face function"))


def parse_point(text: str, shape: str | None = None) -> np.ndarray:
    if text.startswith("@"):
        data = _load_json(text, "point")
        if isinstance(data, dict):
            data = data.get("x", data.get("point"))
        x = np.asarray(data, dtype=float)
    else:
        try:
            x = np.array([float(t) for t in text.split(",") if t.strip()])
        except ValueError:
            raise InputError(f"point: cannot parse {text!r}") from None
    if shape:
        try:
            dims = tuple(int(t) for t in shape.split(","))
            x = x.reshape(dims)
        except ValueError:
            raise InputError(f"point: cannot reshape {x.size} values to {shape}") from None
    if not np.all(np.isfinite(x)):
        raise InputError("point: values must be finite")
    return x


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# JSON helpers


def _plain(v):
    if isinstance(v, np.ndarray):
        return [_plain(u) for u in v.tolist()]
    if isinstance(v, (np.floating,)):
        return _plain(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, float):
        if v != v:
            return "nan"
        if v in (float("inf"), float("-inf")):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, dict):
        return {str(k): _plain(u) for k, u in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        return [_plain(u) for u in v]
    if hasattr(v, "to_json"):
        return _plain(v.to_json())
    return v


def _digest(argv: list[str], files: list[str]) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(argv).encode())
    for f in files:
        p = Path(f[1:] if f.startswith("@") else f)
        if p.is_file():
            h.update(p.read_bytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Commands


def cmd_eval(a):
    f = parse_function(a.function)
    x = parse_point(a.point, a.shape)
    return {"value": lovasz_eval(f, x), "point": x}


def cmd_subgrad(a):
    f = parse_function(a.function)
    x = parse_point(a.point, a.shape)
    out = {"subgradient": lovasz_subgradient(f, x), "value": lovasz_eval(f, x)}
    if a.vertices:
        out["vertices"] = subdifferential_vertices(f, x, seed=a.seed)
    return out


def cmd_check(a):
    if a.what == "catalog":
        if not a.graph:
            raise InputError("--graph is required")
        G = parse_graph(a.graph)
        rows = [a.row] if a.row else list(CATALOG)
        rng = np.random.default_rng(a.seed)
        out, ok = {}, True
        for name in rows:
            f, form = functional_catalog(name, G)
            X = rng.uniform(-1, 1, size=(a.trials, G.n))
            err = max(abs(lovasz_eval(f, x) - float(form(x))) for x in X)
            out[name] = {"max_error": err, "passed": err <= a.tol}
            ok &= err <= a.tol
        return out, ok
    if not a.function:
        raise InputError("--function is required")
    f = parse_function(a.function)
    if a.what == "structural":
        rep = check_structural(f, trials=a.trials, seed=a.seed)
        return rep, all_passed(rep)
    if a.what == "submodularity":
        ok, wit = is_submodular(f)
        return {"submodular": ok, "witness": wit}, True
    if a.what == "convexity":
        rep = check_convexity_equivalence(f, trials=a.trials, seed=a.seed)
        return rep, bool(rep.get("agree", True))
    if a.what == "characterization":
        rep = check_characterization(lambda x: lovasz_eval(f, x), f.n, mode=f.mode, samples=a.trials, seed=a.seed)
        return rep, characterization_passed(rep)
    raise InputError(f"unknown check {a.what}")


def _family(name: str, f: DiscreteFunction):
    if name == "all":
        return RestrictedFamily.everything(f.mode, f.n, f.k)
    if name == "nonempty":
        return RestrictedFamily.nonempty(f.mode, f.n, f.k)
    if name == "proper":
        if f.mode != "set":
            raise InputError("family 'proper' needs set functions")
        return RestrictedFamily.proper_nonempty(f.n)
    raise InputError(f"unknown family {name}")


def _set_problem(f: DiscreteFunction, g: DiscreteFunction, sense: str) -> FractionalProblem:
    if f.mode != "set" or g.mode != "set":
        raise InputError("continuous solvers take set functions")
    f1, f2 = dc_decompose(f)
    g1, g2 = dc_decompose(g)
    return FractionalProblem(f.n, Term.from_function(f1, "f1"), Term.from_function(g1, "g1"),
                             Term.from_function(f2, "f2"), Term.from_function(g2, "g2"),
                             Region("nonneg_sphere"), sense, "set", "ratio")


def cmd_solve(a):
    f = parse_function(a.function)
    g = parse_function(a.denominator)
    if (f.n, f.mode, f.k) != (g.n, g.mode, g.k):
        raise InputError("numerator and denominator must share ground set and mode")
    if a.method == "dinkelbach":
        r, arg, trace = dinkelbach_discrete(f, g, _family(a.family, f), sense=a.sense)
        return {"value": r, "argument": arg, "trace": trace}
    prob = _set_problem(f, g, a.sense)
    cfg = SolverConfig(seed=a.seed, tol=a.tol, max_iter=a.iters)
    if a.method == "ipsd":
        r, x, traces = multistart(mixed_ipsd, prob, cfg, starts=a.restarts)
        return {"value": r, "x": x, "monotone": all(t.is_monotone() for t in traces),
                "traces": [t.to_json(with_points=False) for t in traces]}
    r, x, trace = stochastic_subgradient_ratio(prob, cfg, noise_scale=a.noise)
    return {"value": r, "x": x, "trace": trace.to_json(with_points=False)}


def _cfg(a) -> SolverConfig:
    return SolverConfig(seed=a.seed, tol=a.tol)


def cmd_invariant(a):
    G = parse_graph(a.graph)
    name = a.name
    if name == "alpha":
        return inv.independence_number(G, a.method, _cfg(a), starts=a.restarts)
    if name == "gamma":
        return inv.chromatic_number(G, a.method, seed=a.seed, samples=a.trials)
    if name == "maxkcut":
        return inv.max_kcut(G, a.k or 2, a.method, seed=a.seed, samples=a.trials)
    if name == "matching":
        return inv.matching_number(G, a.method, seed=a.seed, samples=a.trials)
    if name == "k-alpha":
        return inv.k_independence_number(G, a.k or 2)
    if name == "cheeger":
        return cheeger(G, a.variant, a.k, a.method, _cfg(a), starts=a.restarts)
    if name == "cheeger-like":
        return cheeger_like(G, seed=a.seed, samples=a.trials)
    if name == "poincare":
        return poincare_profile_check(G, tol=a.tol)
    f = parse_function(a.function) if a.function else from_set_fn(G.n, G.cut, "cut")
    if name == "vertex-cover":
        return submodular_vertex_cover(G, f)
    if name == "multiway":
        return multiway_partition(f, _ints(a.terminals))
    raise InputError(f"unknown invariant {name}")


def _candidate(a) -> laplace1.EigenCandidate:
    if a.candidate:
        return _wrap("candidate", laplace1.EigenCandidate.from_json, _load_json(a.candidate, "candidate"))
    if a.point is None or a.mu is None:
        raise InputError("give --candidate file or both --point and --mu")
    return _wrap("candidate", lambda d: laplace1.EigenCandidate(*d), (parse_point(a.point), a.mu))


def cmd_laplace(a):
    G = parse_graph(a.graph)
    if a.what in ("verify-dirichlet", "verify-neumann"):
        c = _candidate(a)
        fn = laplace1.verify_dirichlet_eigenpair if a.what == "verify-dirichlet" else laplace1.verify_neumann_eigenpair
        rep = _wrap("eigenpair", lambda _: fn(G, c, tol=a.tol), None)
        out = {"report": rep, "x": c.x, "mu": c.mu}
        if not rep.feasible:
            raise Failure(out)
        return out
    x = parse_point(a.point) if a.point else None
    if x is None:
        raise InputError("--point is required")
    if a.what == "rayleigh":
        quotients = {"R1": laplace1.rayleigh_1}
        if G.interior is not None:
            quotients.update(dirichlet=laplace1.dirichlet_rayleigh, neumann=laplace1.neumann_rayleigh)
        out, undefined = {}, {}
        # each quotient stands alone; one zero denominator does not sink the others
        for name, q in quotients.items():
            try:
                out[name] = q(G, x)
            except ValueError as e:
                out[name] = None
                undefined[name] = str(e)
        if undefined:
            out["undefined"] = undefined
        if all(v is None for k, v in out.items() if k != "undefined"):
            raise Failure(out)
        return out
    count, doms = laplace1.nodal_domains(G, x)
    return {"count": count, "domains": doms}


def cmd_morse(a):
    if a.what == "hypergraph":
        E = parse_hypergraph(a.hypergraph or a.complex)
        f = parse_face_function(a.function)
        return morse.hypergraph_morse(E, f)
    K = parse_complex(a.complex, a.close)
    if a.what == "order":
        oc = morse.order_complex(K)
        return {"vertices": [list(members(m)) for m in oc.vertices], "f_vector": oc.f_vector(),
                "subdivision_f_vector": morse.subdivision_f_vector(K), "euler": oc.euler(),
                "maximal_chains": [[list(members(oc.vertices[v])) for v in c] for c in oc.maximal_chains()]}
    f = parse_face_function(a.function)
    if a.what == "validate":
        chk = morse.validate_discrete_morse(K, f)
        out = {"valid": chk.valid, "violations": chk.violations}
        if not chk.valid:
            raise Failure(out)
        return out
    if a.what == "critical":
        crit, vec = _wrap("morse", lambda _: morse.forman_critical(K, f), None)
        return {"critical": [{"face": list(s), "index": d} for s, d in crit], "morse_vector": vec}
    if a.what == "pl":
        faces = [morse.mask_of(_ints(a.face))] if a.face else list(K.faces)
        oc = morse.order_complex(K)
        return {"faces": [_wrap("pl", lambda m: morse.pl_critical(K, f, m, oc), m) for m in faces]}
    if a.what == "euler":
        rep = morse.morse_euler_check(K, f)
        if not rep["ok"]:
            raise Failure(rep)
        return rep
    raise InputError(f"unknown morse command {a.what}")


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--restarts", type=int, default=10)
    common.add_argument("--out", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="lovx", description="Lovász extensions, graph invariants and discrete Morse tools")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="evaluate the extension at a point")
    s.add_argument("--function", required=True)
    s.add_argument("--point", required=True)
    s.add_argument("--shape")
    s.set_defaults(run=cmd_eval)

    s = sub.add_parser("subgrad", parents=[common], help="subgradient of the extension")
    s.add_argument("--function", required=True)
    s.add_argument("--point", required=True)
    s.add_argument("--shape")
    s.add_argument("--vertices", action="store_true", help="also list subdifferential vertices")
    s.set_defaults(run=cmd_subgrad)

    s = sub.add_parser("check", parents=[common], help="property checks")
    s.add_argument("what", choices=["structural", "submodularity", "convexity", "characterization", "catalog"])
    s.add_argument("--function")
    s.add_argument("--graph")
    s.add_argument("--row", choices=list(CATALOG))
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("solve", parents=[common], help="ratio optimization")
    s.add_argument("method", choices=["dinkelbach", "ipsd", "sgd"])
    s.add_argument("--function", required=True)
    s.add_argument("--denominator", required=True)
    s.add_argument("--family", default="nonempty", choices=["all", "nonempty", "proper"])
    s.add_argument("--sense", default="min", choices=["min", "max"])
    s.add_argument("--iters", type=int, default=50)
    s.add_argument("--noise", type=float, default=0.0)
    s.set_defaults(run=cmd_solve)

    s = sub.add_parser("invariant", parents=[common], help="graph invariants")
    s.add_argument("name", choices=["alpha", "gamma", "maxkcut", "matching", "cheeger", "cheeger-like", "poincare",
                                    "vertex-cover", "multiway", "k-alpha"])
    s.add_argument("--graph", required=True)
    s.add_argument("--method", default="discrete", choices=["discrete", "continuous", "both"])
    s.add_argument("--k", type=int)
    s.add_argument("--variant", default="classic", choices=list(VARIANTS))
    s.add_argument("--function", help="set function for vertex-cover / multiway (default: cut)")
    s.add_argument("--terminals")
    s.set_defaults(run=cmd_invariant)

    s = sub.add_parser("laplace", parents=[common], help="graph 1-Laplacian tools")
    s.add_argument("what", choices=["verify-dirichlet", "verify-neumann", "rayleigh", "nodal"])
    s.add_argument("--graph", required=True)
    s.add_argument("--candidate")
    s.add_argument("--point")
    s.add_argument("--mu", type=float)
    s.set_defaults(run=cmd_laplace)

    s = sub.add_parser("morse", parents=[common], help="discrete Morse tools")
    s.add_argument("what", choices=["validate", "critical", "pl", "euler", "order", "hypergraph"])
    s.add_argument("--complex")
    s.add_argument("--hypergraph")
    s.add_argument("--function")
    s.add_argument("--face")
    s.add_argument("--close", action="store_true", help="add missing subfaces instead of rejecting")
    s.set_defaults(run=cmd_morse)
    return p


def _input_files(a) -> list[str]:
    out = []
    for key in ("function", "denominator", "graph", "complex", "hypergraph", "candidate", "point"):
        v = getattr(a, key, None)
        if isinstance(v, str) and (key != "point" or v.startswith("@")):
            out.append(v)
    return out


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    t0 = time.perf_counter()
    code = 0
    report = {"command": argv, "seed": a.seed}
    try:
        report["digest"] = _digest(argv, _input_files(a))
        out = a.run(a)
        if isinstance(out, tuple):
            out, ok = out
            code = 0 if ok else 1
        report["results"] = out
    except Failure as e:
        report["results"] = e.results
        code = 1
    except (InputError, ValueError, AssertionError) as e:
        report["error"] = str(e)
        code = 1
    report["status"] = "ok" if code == 0 else "failed"
    report["timing"] = {"seconds": time.perf_counter() - t0}
    text = json.dumps(_plain(report), indent=2, sort_keys=True)
    if a.out:
        Path(a.out).write_text(text + "\n")
    else:
        print(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
