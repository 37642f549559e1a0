import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_maximal_cliques
from stonecover.cliques import bits, clique_cap, iter_maximal_cliques, mask_of, maximal_cliques, threshold_graph
from stonecover.errors import CliqueCapExceeded


def _adj_from_matrix(m):
    return [mask_of(j for j in range(len(m)) if m[i][j] and i != j) for i in range(len(m))]


@given(st.integers(1, 9), st.floats(0.0, 1.0), st.integers(0, 2**31))
@settings(max_examples=150, deadline=None)
def test_matches_brute_force(n, density, seed):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < density, 1)
    m = (upper | upper.T).tolist()
    got = {frozenset(bits(c)) for c in iter_maximal_cliques(_adj_from_matrix(m))}
    assert got == brute_maximal_cliques(m)


def test_isolated_vertices_are_singletons():
    assert [bits(c) for c in maximal_cliques([0, 0, 0])] == [[0], [1], [2]]


def test_threshold_graph_strictness():
    d = np.array([[0, 1.0], [1.0, 0]])
    assert threshold_graph(d, 1.0, strict=True) == [0, 0]
    assert threshold_graph(d, 1.0, strict=False) == [0b10, 0b01]


def test_cap_raises_and_env_override(monkeypatch):
    # complement of a perfect matching on 2k vertices has 2^k maximal cliques
    k = 6
    n = 2 * k
    m = [[i != j and i // 2 != j // 2 for j in range(n)] for i in range(n)]
    adj = _adj_from_matrix(m)
    assert sum(1 for _ in iter_maximal_cliques(adj)) == 2**k
    with pytest.raises(CliqueCapExceeded):
        list(iter_maximal_cliques(adj, cap=10))
    monkeypatch.setenv("STONE_CLIQUE_CAP", "5")
    assert clique_cap() == 5
    with pytest.raises(CliqueCapExceeded):
        list(iter_maximal_cliques(adj))


def test_each_clique_once():
    m = [[i != j for j in range(5)] for i in range(5)]
    assert list(iter_maximal_cliques(_adj_from_matrix(m))) == [0b11111]
    assert len(list(itertools.islice(iter_maximal_cliques(_adj_from_matrix(m)), 3))) == 1
