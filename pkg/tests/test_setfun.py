import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lovx.graphinv.graph import complete, path
from lovx.setfun import (DiscreteFunction, RestrictedFamily, all_args, canonical_arg, count_args, dc_decompose,
                         enumerate_optimum, enumerate_ratio_optimum, from_set_fn, mask_of, members, random_function)
from lovx.submod import is_submodular


def cut_fn(G):
    return from_set_fn(G.n, G.cut, "cut")


def test_evaluate_examples():
    P3 = path(3)
    assert cut_fn(P3)({0}) == 1
    assert cut_fn(P3)(0) == 0
    card = from_set_fn(3, lambda m: bin(m).count("1"))
    assert card({0, 2}) == 2


def test_default_and_strict():
    f = DiscreteFunction(3, values={1: 2.0}, default=5.0)
    assert f(1) == 2.0 and f(2) == 5.0 and f(0) == 0.0
    g = DiscreteFunction(3, values={1: 2.0}, strict=True)
    with pytest.raises(KeyError):
        g(2)


def test_pair_overlap_rejected_with_path():
    with pytest.raises(ValueError, match=r"entries\[0\].arg"):
        DiscreteFunction.from_json({"n": 3, "mode": "pair", "entries": [{"arg": [[[0, 1], [1]]], "value": 1}]})


def test_json_round_trip():
    rng = np.random.default_rng(0)
    for mode, k in [("set", 1), ("pair", 1), ("kway", 2), ("kway_pair", 2)]:
        f = random_function(2, rng, mode, k)
        g = DiscreteFunction.from_json(f.to_json())
        assert f.table() == g.table()


def test_arg_counts():
    for mode, k in [("set", 1), ("pair", 1), ("kway", 2), ("kway_pair", 2)]:
        assert len(list(all_args(mode, 3, k))) == count_args(mode, 3, k)


def test_ratio_examples():
    P3 = path(3)
    g = from_set_fn(3, lambda m: min(bin(m).count("1"), 3 - bin(m).count("1")))
    r, arg = enumerate_ratio_optimum(cut_fn(P3), g, RestrictedFamily.proper_nonempty(3))
    assert (r, arg) == (1.0, 1)
    card = from_set_fn(4, lambda m: bin(m).count("1"))
    assert enumerate_optimum(card, sense="max") == (4.0, 15)
    K3 = complete(3)
    f = from_set_fn(3, lambda m: bin(m).count("1") - sum((m >> i) & (m >> j) & 1 for i, j in K3.edges))
    assert enumerate_optimum(f, sense="max")[0] == 1.0


def test_ratio_exhaustive_against_loop():
    rng = np.random.default_rng(3)
    for _ in range(20):
        f = random_function(4, rng)
        g = random_function(4, rng, low=0.1, high=2.0)
        r, arg = enumerate_ratio_optimum(f, g, RestrictedFamily.nonempty("set", 4))
        ref = min(f.value(a) / g.value(a) for a in range(1, 16))
        assert r == ref
        assert all(r <= f.value(a) / g.value(a) for a in range(1, 16))


def test_dc_examples():
    K3 = complete(3)
    f = from_set_fn(3, lambda m: -sum((m >> i) & (m >> j) & 1 for i, j in K3.edges))
    f1, f2 = dc_decompose(f)
    assert is_submodular(f1)[0] and is_submodular(f2)[0]
    zero = DiscreteFunction(3)
    z1, z2 = dc_decompose(zero)
    assert z1.table() == z2.table()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_dc_decompose_property(n, seed):
    f = random_function(n, np.random.default_rng(seed))
    f1, f2 = dc_decompose(f)
    for a in range(1 << n):
        assert abs(f1.value(a) - f2.value(a) - f.value(a)) < 1e-9
    for A, B in itertools.product(range(1 << n), repeat=2):
        for h in (f1, f2):
            assert h.value(A) + h.value(B) >= h.value(A | B) + h.value(A & B) - 1e-9


def test_one_to_two_identity():
    """min_A f/g equals min over disjoint pairs of (f(A)+f(B))/(g(A)+g(B))."""
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        f = random_function(n, rng, low=0.0, high=2.0)
        g = random_function(n, rng, low=0.1, high=2.0)
        one = enumerate_ratio_optimum(f, g, RestrictedFamily.nonempty("set", n))[0]
        two = min((f.value(a) + f.value(b)) / (g.value(a) + g.value(b))
                  for a, b in all_args("pair", n) if a | b)
        assert abs(one - two) < 1e-12


def test_one_to_k_identity():
    rng = np.random.default_rng(12)
    for _ in range(10):
        n = 3
        f = random_function(n, rng, low=0.0, high=2.0)
        g = random_function(n, rng, low=0.1, high=2.0)
        one = enumerate_ratio_optimum(f, g, RestrictedFamily.nonempty("set", n))[0]
        k = min(sum(f.value(a) for a in t) / sum(g.value(a) for a in t)
                for t in itertools.product(range(1 << n), repeat=3) if any(t))
        assert abs(one - k) < 1e-12


def test_masks():
    assert mask_of([0, 2]) == 5
    assert members(5) == (0, 2)
    assert canonical_arg("pair", 3, 1, ([0], [2])) == (1, 4)
