from fractions import Fraction

import pytest

from modtr.coeffring import CoeffElem, EvenPoly
from modtr.kernels import Exponential, FormalMoments, Indicator, Kontsevich, Mirzakhani
from modtr.stablegraphs import StableGraph, enumerate_graphs, graph_sum_volume
from modtr.trengine import stable_range, twisted_volume, volume

# counts of stable graphs with labelled leaves
COUNTS = {(0, 3): 1, (1, 1): 2, (0, 4): 4, (1, 2): 5, (0, 5): 26, (1, 3): 23, (2, 1): 16, (0, 6): 236, (1, 4): 163, (2, 2): 75}


@pytest.mark.parametrize("gn", sorted(COUNTS))
def test_graph_counts(gn):
    gs = enumerate_graphs(*gn)
    assert len(gs) == COUNTS[gn]
    for G in gs:
        assert G.genus == gn[0] and G.n == gn[1]
        assert G.is_connected() and G.is_stable()


def test_torus_graphs():
    gs = enumerate_graphs(1, 1)
    assert sorted(G.aut for G in gs) == [1, 2]


def test_aut_examples():
    # two vertices joined by a double edge, one leg each: swap the edges
    G = StableGraph((0, 0), ((0, 1), (0, 1)), (0, 1))
    assert G.aut == 2
    # genus-0 vertex with two loops: 2! * 2^2
    assert StableGraph((0,), ((0, 0), (0, 0)), (0,)).aut == 8


def test_closed_surfaces_enumerate():
    assert len(enumerate_graphs(2, 0)) == 7


def test_unstable():
    with pytest.raises(ValueError):
        enumerate_graphs(0, 2)


@pytest.mark.parametrize("fam", [Mirzakhani(), Kontsevich()], ids=lambda f: f.id)
def test_graph_sum_equals_twisted_recursion(fam):
    f = FormalMoments()
    for g, n in stable_range(3):
        if n:
            assert graph_sum_volume(g, n, fam, f) == twisted_volume(g, n, fam, f)


def test_numeric_twists():
    for f in (Indicator(2), Exponential(Fraction(1, 3))):
        for g, n in [(1, 1), (0, 4), (1, 2)]:
            assert graph_sum_volume(g, n, Mirzakhani(), f) == twisted_volume(g, n, Mirzakhani(), f)


def test_zero_twist_is_untwisted():
    assert graph_sum_volume(1, 2, Mirzakhani(), Indicator(0)) == volume(1, 2, Mirzakhani())


def test_callable_base():
    base = lambda h, k: volume(h, k, Mirzakhani())
    f = FormalMoments()
    assert graph_sum_volume(1, 1, base, f) == volume(1, 1, Mirzakhani()) + EvenPoly.constant(1, CoeffElem.symbol("u_0_0", 1, Fraction(1, 2)))


def _permute_legs(G, perm):
    legs = [0] * G.n
    for i, v in enumerate(G.legs):
        legs[perm[i]] = v
    return StableGraph(G.genera, G.edges, tuple(legs)).canonical()


@pytest.mark.parametrize("gn", [(0, 4), (1, 2), (0, 5), (1, 3), (2, 1)])
def test_leaf_label_equivariance(gn):
    from itertools import permutations

    gs = enumerate_graphs(*gn)
    base = {G.canonical(): G.aut for G in gs}
    for perm in permutations(range(gn[1])):
        moved = {}
        for G in gs:
            moved[_permute_legs(G, perm)] = G.aut
        assert moved == base


@pytest.mark.parametrize("gn", sorted(COUNTS))
def test_edge_count_bound(gn):
    g, n = gn
    assert max(len(G.edges) for G in enumerate_graphs(g, n)) == 3 * g - 3 + n
