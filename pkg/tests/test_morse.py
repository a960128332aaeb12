import json
import pathlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from lovx.lovasz import lovasz_eval
from lovx.morse import (FaceFunction, Hypergraph, SimplicialComplex, betti_gf2, circle_complex, cone,
                        forman_critical, full_simplex, gradient_pairs, heights, hypergraph_morse,
                        lovasz_on_order_complex, morse_euler_check, order_complex, pl_critical,
                        random_complex, random_morse_function, subdivision_f_vector,
                        validate_discrete_morse)

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"

CIRCLE_F = {(0,): 0, (1,): 1, (2,): 2, (0, 1): 0.5, (0, 2): 1.5, (1, 2): 3}


def circle_f():
    return FaceFunction(CIRCLE_F, injective=True)


def collapsing_triangle():
    """Gradient pairs (v1, e01), (v2, e02), (e12, t); only v0 is left."""
    return FaceFunction({(0,): 0, (1,): 2, (0, 1): 1, (2,): 4, (0, 2): 3, (1, 2): 6, (0, 1, 2): 5},
                        injective=True)


def test_validate_examples():
    K = circle_complex()
    assert validate_discrete_morse(K, circle_f()).valid
    const = FaceFunction({m: 1.0 for m in K.faces})
    chk = validate_discrete_morse(K, const)
    assert not chk.valid
    assert any(len(v["U"]) > 1 for v in chk.violations) and any(len(v["L"]) > 1 for v in chk.violations)
    T = full_simplex(3)
    by_dim = FaceFunction({m: bin(m).count("1") + 0.01 * m for m in T.faces}, injective=True)
    crit, vec = forman_critical(T, by_dim)
    assert vec == [3, 3, 1] and len(crit) == len(T.faces)


def test_forman_examples():
    crit, vec = forman_critical(circle_complex(), circle_f())
    assert crit == [((0,), 0), ((1, 2), 1)]
    assert vec == [1, 1]
    two = SimplicialComplex.from_faces(2, [(0,), (1,)])
    assert forman_critical(two, FaceFunction({(0,): 0, (1,): 1}, injective=True))[1] == [2]
    with pytest.raises(ValueError):
        forman_critical(circle_complex(), FaceFunction({m: 1.0 for m in circle_complex().faces}))


def test_full_simplex_collapses_to_one_vertex():
    T = full_simplex(3)
    f = collapsing_triangle()
    crit, vec = forman_critical(T, f)
    assert crit == [((0,), 0)] and vec == [1, 0, 0]
    assert sorted(gradient_pairs(T, f)) == [((1,), (0, 1)), ((1, 2), (0, 1, 2)), ((2,), (0, 2))]
    rep = morse_euler_check(T, f)
    assert rep["ok"] and rep["pl_morse_vector"] == [1, 0, 0]


def test_random_full_simplex_one_critical_vertex():
    rng = np.random.default_rng(0)
    seen = 0
    for _ in range(200):
        T = full_simplex(4)
        f = random_morse_function(T, rng, pair_prob=1.0)
        _, vec = forman_critical(T, f)
        assert sum((-1) ** i * c for i, c in enumerate(vec)) == 1
        seen += vec == [1, 0, 0, 0]
    assert seen > 0


def test_order_complex_examples():
    oc = order_complex(circle_complex())
    assert len(oc.vertices) == 6
    assert len(oc.maximal_chains()) == 6 and all(len(c) == 2 for c in oc.maximal_chains())
    assert oc.f_vector() == [6, 6] == subdivision_f_vector(circle_complex())
    point = order_complex(SimplicialComplex.from_faces(1, [(0,)]))
    assert point.f_vector() == [1]
    hyp = order_complex(Hypergraph(3, [(0,), (0, 1, 2)]))
    assert hyp.f_vector() == [2, 1]
    with pytest.raises(ValueError):
        order_complex(full_simplex(6), limit=100)


def test_subdivision_counts_against_oracle():
    rng = np.random.default_rng(1)
    for _ in range(40):
        K = random_complex(int(rng.integers(2, 7)), rng, max_dim=3)
        sizes = [bin(m).count("1") for m in K.faces]
        assert order_complex(K).f_vector() == subdivision_f_vector(K) == O.subdivision_counts(sizes)
        assert order_complex(K).euler() == K.euler()


def test_lovasz_on_order_complex_examples():
    K, f = circle_complex(), circle_f()
    assert lovasz_on_order_complex(K, f, {(1, 2): 1.0}) == 3
    assert lovasz_on_order_complex(K, f, {(1,): 0.5, (1, 2): 0.5}) == pytest.approx((1 + 3) / 2)
    rng = np.random.default_rng(2)
    fx = f.extended(3)
    for chain in order_complex(K).maximal_chains():
        lam = rng.dirichlet(np.ones(len(chain) + 1))[:-1]
        faces = [order_complex(K).vertices[v] for v in chain]
        x = sum(l * np.array([(m >> i) & 1 for i in range(3)], dtype=float) for l, m in zip(lam, faces))
        assert abs(lovasz_on_order_complex(K, f, x) - lovasz_eval(fx, x)) < 1e-12
    with pytest.raises(ValueError):
        lovasz_on_order_complex(K, f, np.array([1.0, 1.0, 1.0]))  # the 2-face is missing


def test_betti_examples():
    circle = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
    disc = circle + [(0, 1, 2)]
    assert betti_gf2(circle) == (1, 1)
    assert betti_gf2(disc) == (1, 0, 0)
    assert betti_gf2(disc, relative_to=circle) == (0, 0, 1)
    assert betti_gf2([], reduced=True) == (1,)
    assert betti_gf2(cone(circle, 9)) == (1, 0, 0)
    with pytest.raises(ValueError):
        betti_gf2(circle, relative_to=[(0, 5)])


def test_betti_against_dense_oracle():
    rng = np.random.default_rng(3)
    for _ in range(60):
        K = random_complex(int(rng.integers(2, 8)), rng, max_dim=3)
        S = K.as_simplices()
        assert betti_gf2(S) == O.betti_dense(S)
        cb = betti_gf2(cone(S, 99))
        assert cb[0] == 1 and not any(cb[1:])


def test_pl_examples():
    K, f = circle_complex(), circle_f()
    r = pl_critical(K, f, (0,))
    assert r.critical and r.indices == {0: 1} and r.link_betti == (1,)
    r = pl_critical(K, f, (1, 2))
    assert r.indices == {1: 1} and r.link_betti[:2] == (0, 1)
    r = pl_critical(K, f, (2,))
    assert not r.critical and not any(r.link_betti)
    with pytest.raises(ValueError):
        pl_critical(K, FaceFunction({m: 0.0 for m in K.faces}), (0,))


def test_euler_examples():
    rep = morse_euler_check(circle_complex(), circle_f())
    assert rep["ok"] and rep["alternating_sum"] == 0 == rep["euler_complex"]
    two_edges = SimplicialComplex.from_faces(4, [(0, 1), (2, 3)], close=True)
    f = random_morse_function(two_edges, np.random.default_rng(0))
    rep = morse_euler_check(two_edges, f)
    assert rep["ok"] and rep["euler_complex"] == 2 == rep["alternating_sum"]


def test_critical_faces_strict_on_all_cofaces_and_faces():
    rng = np.random.default_rng(4)
    for _ in range(100):
        K = random_complex(int(rng.integers(2, 7)), rng, max_dim=3)
        f = random_morse_function(K, rng)
        crit, _ = forman_critical(K, f)
        for s, _ in crit:
            m = sum(1 << v for v in s)
            for t in K.faces:
                if t != m and t & m == m:
                    assert f(t) > f(m)
                if t != m and t & m == t:
                    assert f(t) < f(m)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(1, 3), st.integers(0, 10**6), st.floats(0.0, 1.0))
def test_forman_pl_agreement(n, d, seed, pair_prob):
    rng = np.random.default_rng(seed)
    K = random_complex(n, rng, max_dim=d)
    f = random_morse_function(K, rng, pair_prob=pair_prob)
    assert validate_discrete_morse(K, f).valid
    oc = order_complex(K)
    for m in K.faces:
        pl_critical(K, f, m, oc=oc)  # raises on any disagreement
    assert morse_euler_check(K, f)["ok"]


def test_hypergraph_examples():
    E = Hypergraph(3, [(0,), (1,), (0, 1, 2)])
    f = FaceFunction({(0,): 0, (1,): 1, (0, 1, 2): 2}, injective=True)
    rep = hypergraph_morse(E, f)
    assert rep["valid"]
    assert [(c["edge"], c["height"]) for c in rep["critical"]] == [([0], 0), ([1], 0), ([0, 1, 2], 1)]
    assert rep["pl_agrees"]
    g = FaceFunction({(0,): 3, (1,): 1, (0, 1, 2): 2}, injective=True)
    assert [c["edge"] for c in hypergraph_morse(E, g)["critical"]] == [[1]]
    single = Hypergraph(2, [(0, 1)])
    assert hypergraph_morse(single, FaceFunction({(0, 1): 1.0}))["critical"] == [{"edge": [0, 1], "height": 0}]
    assert heights(Hypergraph(3, [(0,), (0, 1), (0, 1, 2), (2,)])) == {1: 0, 4: 0, 3: 1, 7: 2}


def test_json_round_trips():
    K = SimplicialComplex.from_json(json.loads((DATA / "circle.json").read_text()))
    f = FaceFunction.from_json(json.loads((DATA / "circle_morse.json").read_text()))
    assert forman_critical(K, f)[1] == [1, 1]
    assert SimplicialComplex.from_json(K.to_json()) == K
    assert FaceFunction.from_json(f.to_json()).values == f.values
    E = Hypergraph.from_json(json.loads((DATA / "hyper.json").read_text()))
    assert Hypergraph.from_json(E.to_json()) == E


def test_input_validation():
    with pytest.raises(ValueError):
        SimplicialComplex.from_faces(3, [(0, 1, 2)])  # edges missing without closing
    with pytest.raises(ValueError):
        Hypergraph(3, [(0,), (0,)])
    with pytest.raises(ValueError):
        FaceFunction({(0,): 1.0, (1,): 1.0}, injective=True)
    with pytest.raises(ValueError):
        FaceFunction.from_json({"entries": [{"face": [0], "value": 1}, {"face": [0], "value": 2}]})
    with pytest.raises(ValueError):
        validate_discrete_morse(circle_complex(), FaceFunction({(0,): 1.0}))
