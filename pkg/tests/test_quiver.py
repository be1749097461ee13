import random

import networkx as nx
import pytest
import sympy

from traceseries.errors import ConfigError, ConnectivityError
from traceseries.exactpoly import ONE, Monomial, t, z
from traceseries.quiver import (
    BlockQuiver, BlockStructure, Edge, build_quiver, fundamental_cycle, simple_cycles,
    spanning_in_trees, tree_substitution,
)


def complete(n):
    return build_quiver(BlockStructure.uniform((1,) * n))


def test_two_vertex_quiver():
    q = complete(2)
    assert q.to_edge_list() == [(1, 2, "t(1,2,1)"), (2, 1, "t(2,1,1)")]
    assert q.loops == (t(1, 1), t(2, 2))


def test_three_vertex_quiver():
    q = complete(3)
    assert len(q.edges) == 6 and len(q.loops) == 3


def test_off_diagonal_example_quiver():
    q = build_quiver(BlockStructure((2, 1), {(1, 2): 1, (2, 1): 1}))
    assert {(e.tail, e.head) for e in q.edges} == {(1, 3), (2, 3), (3, 1), (3, 2)}
    assert q.loops == ()


def test_shared_labels():
    q = build_quiver(BlockStructure.uniform((2,)), distinct_labels=False)
    assert {e.label for e in q.edges} == {t(1, 1)}
    assert q.loops == (t(1, 1), t(1, 1))


def test_bad_block_structure():
    with pytest.raises(ConfigError):
        BlockStructure((2, 0))
    with pytest.raises(ConfigError):
        BlockStructure((1,), {(1, 2): 1})


def test_gamma():
    bs = BlockStructure.uniform((2, 1))
    assert bs.gamma(1, 3) == (1, 2) and bs.gamma(2, 1) == (1, 1) and bs.n == 3


def test_in_trees_small():
    assert [tuple((e.tail, e.head) for e in tr.tree_edges) for tr in spanning_in_trees(complete(2))] == [((2, 1),)]
    trees = {frozenset((e.tail, e.head) for e in tr.tree_edges) for tr in spanning_in_trees(complete(3))}
    assert trees == {frozenset({(2, 1), (3, 1)}), frozenset({(2, 1), (3, 2)}), frozenset({(3, 1), (2, 3)})}
    single = spanning_in_trees(complete(1))
    assert len(single) == 1 and single[0].tree_edges == ()


def test_no_in_tree():
    q = BlockQuiver(2, (Edge(0, 1, 2, t(1, 2)),))
    with pytest.raises(ConnectivityError):
        spanning_in_trees(q)


def random_quiver(rng, n):
    edges = []
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            if u != v:
                for _ in range(rng.choice([0, 1, 1, 2])):
                    edges.append(Edge(len(edges), u, v, t(u, v, len(edges) + 1)))
    return BlockQuiver(n, tuple(edges))


def matrix_tree_count(q, root=1):
    # in-trees toward root: out-degree Laplacian with the root row/column removed
    n = q.n
    lap = sympy.zeros(n, n)
    for e in q.edges:
        lap[e.tail - 1, e.tail - 1] += 1
        lap[e.tail - 1, e.head - 1] -= 1
    keep = [i for i in range(n) if i != root - 1]
    return int(lap.extract(keep, keep).det())


@pytest.mark.parametrize("seed", range(12))
def test_tree_count_matches_matrix_tree_theorem(seed):
    rng = random.Random(seed)
    q = random_quiver(rng, rng.randint(2, 5))
    expected = matrix_tree_count(q)
    if expected == 0:
        with pytest.raises(ConnectivityError):
            spanning_in_trees(q)
    else:
        assert len(spanning_in_trees(q)) == expected


def test_cycles_complete_digraphs():
    assert [c.weight for c in simple_cycles(complete(2))] == [Monomial([(t(1, 2), 1), (t(2, 1), 1)])]
    cyc = simple_cycles(complete(3))
    assert sorted(len(c.edges) for c in cyc) == [2, 2, 2, 3, 3]
    assert simple_cycles(BlockQuiver(3, ())) == []


@pytest.mark.parametrize("seed", range(8))
def test_cycles_match_networkx(seed):
    rng = random.Random(100 + seed)
    q = random_quiver(rng, rng.randint(2, 5))
    g = nx.MultiDiGraph()
    g.add_nodes_from(range(1, q.n + 1))
    for e in q.edges:
        g.add_edge(e.tail, e.head, key=e.id)
    # networkx reports vertex cycles; expand parallel edges
    expected = 0
    for vc in nx.simple_cycles(nx.DiGraph(g)):
        mult = 1
        for i in range(len(vc)):
            mult *= g.number_of_edges(vc[i], vc[(i + 1) % len(vc)])
        expected += mult
    cycles = simple_cycles(q)
    assert len(cycles) == expected
    assert all(c.is_closed() and c.is_simple() and c.weight.all_positive() for c in cycles)


def test_fundamental_cycles_close_and_substitute():
    for n in (2, 3, 4):
        q = complete(n)
        for tree in spanning_in_trees(q):
            sub = tree_substitution(tree, n)
            assert sub[z(1)] == ONE
            for e in q.edges:
                if e in tree.tree_edges:
                    w = (Monomial([(z(e.tail), 1), (z(e.head), -1)]) * Monomial.var(e.label)).substitute(sub)
                    assert w.is_one()
                    continue
                c = fundamental_cycle(e, tree)
                assert c.is_closed()
                assert c.edges[0] == (e, 1)
                factor = (Monomial([(z(e.tail), 1), (z(e.head), -1)]) * Monomial.var(e.label)).substitute(sub)
                assert factor == c.weight


def test_fundamental_cycle_two_vertex():
    q = complete(2)
    tree = spanning_in_trees(q)[0]
    c = fundamental_cycle(q.edges[0], tree)
    assert [s for _, s in c.edges] == [1, 1]
    assert c.weight == Monomial([(t(1, 2), 1), (t(2, 1), 1)])


def test_tree_substitution_on_laurent_polynomial():
    from traceseries.exactpoly import Polynomial
    tree = spanning_in_trees(complete(2))[0]
    f = Polynomial({ONE: 2, Monomial([(z(1), 1), (z(2), -1)]): 1, Monomial([(z(2), 1), (z(1), -1)]): 1})
    u = t(2, 1)
    assert f.substitute(tree_substitution(tree, 2)) == Polynomial({ONE: 2, Monomial([(u, 1)]): 1, Monomial([(u, -1)]): 1})
