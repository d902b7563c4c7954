"""2d TQFT amplitudes by contracting the product tensor along pants decompositions.

A network is a list of trivalent vertices, each a list of three slots; a slot
is ``("leg", i)`` or ``("e", 2*edge + side)``.  Each vertex carries mu and each
edge the inverse pairing.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Dict, List, Sequence, Tuple

from ..stablegraphs import StableGraph, enumerate_graphs, vertex_slots
from .algebra import FrobeniusAlgebra

__all__ = ["Tensor", "pants_decompositions", "contract_network", "graph_network", "tqft_amplitude", "amplitudes_by_decomposition"]

Tensor = Dict[Tuple[int, ...], Fraction]
Slot = Tuple[str, int]


def _check_stable(g: int, n: int) -> None:
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise ValueError(f"(g,n)=({g},{n}) is not stable")


def pants_decompositions(g: int, n: int) -> List[StableGraph]:
    """Stable graphs whose vertices are all genus-0 trivalent."""
    _check_stable(g, n)
    return [G for G in enumerate_graphs(g, n) if all(h == 0 for h in G.genera) and all(G.valence(v) == 3 for v in range(len(G.genera)))]


def graph_network(G: StableGraph) -> List[List[Slot]]:
    return [vertex_slots(G, v) for v in range(len(G.genera))]


def contract_network(alg: FrobeniusAlgebra, vertices: Sequence[Sequence[Slot]], n: int, n_edges: int) -> Tensor:
    pairs = alg.pairs()
    out: Tensor = {}
    for legs in product(range(alg.dim), repeat=n):
        total = Fraction(0)
        for choice in product(pairs, repeat=n_edges):
            w = Fraction(1)
            for x, y, q in choice:
                w *= q
            for slots in vertices:
                idx = []
                for kind, i in slots:
                    if kind == "leg":
                        idx.append(legs[i])
                    else:
                        idx.append(choice[i // 2][i % 2])
                w *= alg.mu[idx[0]][idx[1]][idx[2]]
                if not w:
                    break
            total += w
        out[legs] = total
    return out


def amplitudes_by_decomposition(alg: FrobeniusAlgebra, g: int, n: int) -> List[Tuple[StableGraph, Tensor]]:
    return [(G, contract_network(alg, graph_network(G), n, len(G.edges))) for G in pants_decompositions(g, n)]


def tqft_amplitude(alg: FrobeniusAlgebra, g: int, n: int) -> Tensor:
    """F_{g,n} as a dense tensor keyed by label tuples."""
    G = pants_decompositions(g, n)[0]
    return contract_network(alg, graph_network(G), n, len(G.edges))
