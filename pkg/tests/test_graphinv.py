import numpy as np
import pytest

import oracles as O
from lovx.graphinv import (CATALOG, Graph, cheeger, cheeger_form, cheeger_like, chromatic_number,
                           chromatic_objective, chromatic_objective_intro, clique_cover_number, clique_number,
                           complete, complete_bipartite, corpus, cycle, empty, functional_catalog,
                           independence_number, independence_objective, k_independence_number, matching_number,
                           matching_ratio, max_kcut, multiway_partition, path, poincare_profile_check, star,
                           submodular_vertex_cover)
from lovx.graphinv.invariants import coloring_matrix
from lovx.lovasz import lovasz_eval
from lovx.setfun import DiscreteFunction, from_set_fn

SMALL = [g for g in corpus() if g.n <= 6]


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_identity(name):
    rng = np.random.default_rng(0)
    for G in (path(3), complete(3), cycle(4), star(3)):
        f, cf = functional_catalog(name, G, C=1.7)
        X = rng.normal(size=(200, G.n))
        X[rng.random(X.shape) < 0.2] = 0.0
        batch = cf(X)
        for x, v in zip(X, batch):
            ref = lovasz_eval(f, x)
            assert abs(v - ref) <= 1e-10 * (1 + abs(ref))


def test_catalog_examples():
    f, cf = functional_catalog("size_product", complete(3))
    assert cf(np.array([1.0, 0, 0])) == 2 == f.value(1)
    f, cf = functional_catalog("pair_constant", path(3), C=2.5)
    assert cf(np.array([0.2, -0.7, 0.1])) == pytest.approx(2.5 * 0.7)
    with pytest.raises(KeyError):
        functional_catalog("nope", path(3))


def test_independence_against_networkx():
    for G in SMALL:
        assert independence_number(G).value == O.alpha(G)


def test_independence_examples():
    assert independence_number(complete(3)).value == 1
    assert independence_objective(complete(3), [1, 0, 0]) == 1
    assert independence_number(path(3)).value == 2
    assert independence_objective(path(3), [1, 0, 1]) == 2
    assert independence_number(empty(4)).value == 4


def test_chromatic_against_brute_force():
    for G in SMALL:
        if G.n <= 5:
            assert chromatic_number(G).value == O.chromatic(G)


def test_chromatic_examples():
    K3 = complete(3)
    assert chromatic_number(K3).value == 3
    assert chromatic_objective(K3, np.eye(3)) == 3
    assert chromatic_number(empty(3)).value == 1


def test_chromatic_forms_agree_at_colorings():
    for G in SMALL[:12]:
        res = chromatic_number(G)
        X = coloring_matrix(G.n, res.witness)
        assert abs(chromatic_objective(G, X) - res.value) < 1e-9
        assert abs(chromatic_objective_intro(G, X.T) - res.value) < 1e-9  # vertices as rows


@pytest.mark.parametrize("k", [2, 3])
def test_max_kcut_against_brute_force(k):
    for G in SMALL:
        if k <= G.n <= 5:
            assert max_kcut(G, k).value == O.max_kcut(G, k)


def test_max_kcut_examples():
    assert max_kcut(complete(3), 2).value == 2
    assert max_kcut(cycle(4), 2).value == 4
    assert max_kcut(complete(3), 3).value == 3


def test_matching():
    for G in SMALL:
        assert matching_number(G).value == O.matching(G)
    assert matching_number(path(4)).value == 2
    assert matching_ratio(path(4), [1, 0, 1]) == 2
    assert matching_number(empty(3)).value == 0
    rng = np.random.default_rng(0)
    for y in rng.random((50, 2)):
        assert matching_ratio(path(3), y) == pytest.approx(1.0)
    k3 = Graph(6, [(0, 1), (2, 3), (4, 5)])
    assert matching_ratio(k3, np.ones(3)) == pytest.approx(3.0)


def test_k_independence():
    assert k_independence_number(path(4), 2).value == 2
    for k in (1, 2, 3):
        assert k_independence_number(complete(3), k).value == 1
    for G in SMALL[:10]:
        assert k_independence_number(G, 1).value == independence_number(G).value


@pytest.mark.parametrize("variant", ["classic", "expansion", "multiplicative", "h_int", "h_ext", "h_ver"])
def test_cheeger_against_brute_force(variant):
    for G in SMALL:
        ref = O.cheeger_brute(G, variant)
        got = cheeger(G, variant).value
        assert (got is None and ref is None) or abs(got - ref) < 1e-12


def test_cheeger_examples():
    P3 = path(3)
    r = cheeger(P3, "h_ver")
    assert (r.value, r.witness) == (2.0, [0])
    assert cheeger(P3, "h_ext").value == 1 and cheeger(P3, "h_int").value == 1
    r = cheeger(P3.with_interior([1]), "dirichlet")
    assert (r.value, r.witness) == (1.0, [1])


@pytest.mark.parametrize("variant", ["classic", "expansion", "multiplicative", "h_int", "h_ext", "h_ver"])
def test_cheeger_forms_never_beat_discrete(variant):
    rng = np.random.default_rng(1)
    for G in (cycle(5), complete_bipartite(2, 3), corpus()[0]):
        res = cheeger(G, variant)
        form = cheeger_form(G, variant)
        assert abs(res.continuous_at_witness - res.value) < 1e-12
        for x in rng.normal(size=(300, G.n)):
            v = form(x)
            if np.isfinite(v):
                assert v >= res.value - 1e-9


def test_cheeger_solver_reaches_value():
    for G in (path(4), cycle(5), complete(4)):
        res = cheeger(G, "classic", method="both", starts=10)
        assert abs(res.continuous - res.value) < 1e-6


def test_cheeger_like_examples():
    assert cheeger_like(path(3)).value == 1.5
    assert cheeger_like(complete(3)).value == 1
    assert cheeger_like(star(3)).value == pytest.approx(4 / 3)
    for G in (path(3), complete(4), star(3)):
        r = cheeger_like(G)
        assert r.continuous <= r.value + 1e-9
        assert abs(r.continuous_at_witness - r.value) < 1e-12
    with pytest.raises(ValueError):
        cheeger_like(empty(2))


@pytest.mark.parametrize("G", [path(3), complete(2), complete(4)])
def test_poincare_sandwich(G):
    rep = poincare_profile_check(G, starts=3)
    assert rep["sandwich_holds"]
    assert rep["lower"] - 1e-9 <= rep["p1_best"] <= rep["upper"] + 1e-9
    if G.n == 3:
        assert (rep["lower"], rep["upper"]) == (0.5, 2.0)


def test_poincare_rejects_disconnected():
    with pytest.raises(ValueError):
        poincare_profile_check(empty(3))


def test_vertex_cover_examples():
    card = lambda n: from_set_fn(n, lambda m: bin(m).count("1"))  # noqa: E731
    r = submodular_vertex_cover(path(3), card(3))
    assert (r.value, r.witness) == (1.0, [1]) and r.continuous <= 1 + 1e-9
    r = submodular_vertex_cover(complete(3), card(3))
    assert r.value == 2 and r.continuous <= 2 + 1e-9
    assert lovasz_eval(card(3), np.full(3, 0.5)) == 1.5
    r = submodular_vertex_cover(empty(3), card(3))
    assert (r.value, r.witness) == (0.0, [])


def test_multiway_examples():
    P3 = path(3)
    half_cut = from_set_fn(3, lambda m: P3.cut(m) / 2)
    r = multiway_partition(half_cut, [0, 2])
    assert r.value == 1.0 and r.continuous <= r.value + 1e-9
    f = from_set_fn(3, lambda m: bin(m).count("1") ** 0.5)
    assert multiway_partition(f, [1]).value == f.value(7)
    assert multiway_partition(DiscreteFunction(3), [0, 1]).value == 0


def test_perfect_graph_cross_check():
    for G in (complete(3), complete(4), complete_bipartite(2, 3), complete_bipartite(3, 3), path(5), cycle(6)):
        assert chromatic_number(G).value == clique_number(G)


def test_clique_cover_is_complement_coloring():
    for G in SMALL[:15]:
        assert clique_cover_number(G) == O.chromatic(G.complement())


def test_boundary_validation():
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (0, 1)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    G = path(4).with_interior([1, 2])
    assert G.boundary == frozenset({0, 3})
