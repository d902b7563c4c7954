"""Stable graphs and the stable-graph sum for twisted volumes.

A stable graph is stored as three tuples: vertex genera, edges as vertex
pairs ``(v, w)`` with ``v <= w`` (loops allowed), and ``legs[i]`` = vertex
carrying leaf ``i+1``.  Graphs are generated by iterated degeneration of the
one-vertex graph and deduplicated by a canonical form that minimises over
vertex relabelings; at the sizes used here there are at most four vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from math import factorial
from typing import Callable, Dict, List, Sequence, Tuple

from .coeffring import ZERO, CoeffElem, EvenPoly
from .kernels import MomentSpec

__all__ = ["StableGraph", "enumerate_graphs", "graph_sum_volume", "edge_integrand", "expand_vertices", "vertex_slots"]


@dataclass(frozen=True)
class StableGraph:
    genera: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    legs: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.b1

    @property
    def b1(self) -> int:
        return len(self.edges) - len(self.genera) + 1

    def valence(self, v: int) -> int:
        k = sum(1 for x in self.legs if x == v)
        for a, b in self.edges:
            k += (a == v) + (b == v)
        return k

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for a, b in self.edges:
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in seen:
                        seen.add(y)
                        stack.append(y)
        return len(seen) == len(self.genera)

    def is_stable(self) -> bool:
        return all(2 * h - 2 + self.valence(v) > 0 for v, h in enumerate(self.genera))

    def half_edges(self):
        """(incidence, involution, leaf labels) on half-edges.

        Half-edges 0..n-1 are the leaves; then two per edge.  Leaves are
        fixed points of the involution.
        """
        inc = list(self.legs)
        inv = list(range(self.n))
        for a, b in self.edges:
            h = len(inc)
            inc += [a, b]
            inv += [h + 1, h]
        labels = {i: i + 1 for i in range(self.n)}
        return inc, inv, labels

    def _relabel(self, perm: Sequence[int]):
        genera = [0] * len(self.genera)
        for v, h in enumerate(self.genera):
            genera[perm[v]] = h
        edges = sorted(tuple(sorted((perm[a], perm[b]))) for a, b in self.edges)
        legs = tuple(perm[v] for v in self.legs)
        return tuple(genera), tuple(edges), legs

    def canonical(self) -> "StableGraph":
        best = min(self._relabel(p) for p in permutations(range(len(self.genera))))
        return StableGraph(*best)

    @property
    def aut(self) -> int:
        return _aut(self)

    def to_json(self) -> dict:
        return {
            "genera": list(self.genera),
            "edges": [list(e) for e in self.edges],
            "legs": list(self.legs),
            "aut": self.aut,
        }


@lru_cache(maxsize=None)
def _aut(G: StableGraph) -> int:
    key = G._relabel(range(len(G.genera)))
    vertex_autos = sum(1 for p in permutations(range(len(G.genera))) if G._relabel(p) == key)
    mult: Dict[Tuple[int, int], int] = {}
    for e in G.edges:
        mult[e] = mult.get(e, 0) + 1
    out = vertex_autos
    for (a, b), k in mult.items():
        out *= factorial(k)
        if a == b:
            out *= 2 ** k
    return out


def _degenerations(G: StableGraph):
    genera, edges, legs = list(G.genera), list(G.edges), list(G.legs)
    for v, h in enumerate(genera):
        if h >= 1:
            ng = genera.copy()
            ng[v] -= 1
            yield StableGraph(tuple(ng), tuple(edges + [(v, v)]), tuple(legs))
        # split v in two joined by a new edge
        ends = [("leg", i) for i, x in enumerate(legs) if x == v]
        for e, (a, b) in enumerate(edges):
            if a == v:
                ends.append(("e", e, 0))
            if b == v:
                ends.append(("e", e, 1))
        w = len(genera)
        for r in range(len(ends) + 1):
            for moved in combinations(ends, r):
                for h1 in range(h + 1):
                    ng = genera + [h - h1]
                    ng[v] = h1
                    nl = legs.copy()
                    ne = [list(x) for x in edges]
                    for end in moved:
                        if end[0] == "leg":
                            nl[end[1]] = w
                        else:
                            ne[end[1]][end[2]] = w
                    ne.append([v, w])
                    cand = StableGraph(tuple(ng), tuple(tuple(sorted(x)) for x in ne), tuple(nl))
                    if cand.is_stable():
                        yield cand


@lru_cache(maxsize=None)
def enumerate_graphs(g: int, n: int) -> Tuple[StableGraph, ...]:
    """All stable graphs of type (g,n) up to isomorphism fixing leaf labels."""
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise ValueError(f"(g,n)=({g},{n}) is not stable")
    start = StableGraph((g,), (), (0,) * n).canonical()
    found = {start}
    layer = {start}
    while layer:
        nxt = set()
        for G in layer:
            for H in _degenerations(G):
                c = H.canonical()
                if c not in found:
                    found.add(c)
                    nxt.add(c)
        layer = nxt
    return tuple(sorted(found, key=lambda G: (len(G.edges), len(G.genera), G.genera, G.edges, G.legs)))


def vertex_slots(G: StableGraph, v: int) -> List[Tuple[str, int]]:
    """Slots at v: leaves by label, then edge ends ("e", 2*edge + side)."""
    slots = [("leg", i) for i, x in enumerate(G.legs) if x == v]
    for e, (a, b) in enumerate(G.edges):
        if a == v:
            slots.append(("e", 2 * e))
        if b == v:
            slots.append(("e", 2 * e + 1))
    return slots


def expand_vertices(
    G: StableGraph, polys: Sequence[EvenPoly]
) -> Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], CoeffElem]:
    """Expand prod_v polys[v] over (leaf exponents, edge-end exponents).

    ``polys[v]`` takes its arguments in the order of :func:`vertex_slots`.
    Edge-end exponents are listed as (e0 side a, e0 side b, e1 side a, ...).
    """
    nE = len(G.edges)
    state: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], CoeffElem] = {((0,) * G.n, (0,) * (2 * nE)): None}
    for v in range(len(G.genera)):
        slots = vertex_slots(G, v)
        new = {}
        for (lk, ek), c in state.items():
            for d, pc in polys[v].items():
                lk2, ek2 = list(lk), list(ek)
                for slot, x in zip(slots, d):
                    if slot[0] == "leg":
                        lk2[slot[1]] = x
                    else:
                        ek2[slot[1]] = x
                key = (tuple(lk2), tuple(ek2))
                val = pc if c is None else c * pc
                prev = new.get(key)
                new[key] = val if prev is None else prev + val
        state = new
    return state


def edge_integrand(
    G: StableGraph, vertex_poly: Callable[[int, int], EvenPoly]
) -> Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], CoeffElem]:
    """Expand prod_v V_{h(v),k(v)}; see :func:`expand_vertices`."""
    return expand_vertices(G, [vertex_poly(h, G.valence(v)) for v, h in enumerate(G.genera)])


def graph_sum_volume(g: int, n: int, base, f: MomentSpec) -> EvenPoly:
    """Sum over stable graphs of edge-integrated products of vertex volumes.

    ``base`` is a kernel family (volumes come from the recursion engine) or a
    callable ``(h, k) -> EvenPoly``.
    """
    if callable(base) and not hasattr(base, "polynomial_type"):
        vertex_poly = base
    else:
        from .trengine import volume

        vertex_poly = lambda h, k: volume(h, k, base)
    terms: Dict[Tuple[int, ...], CoeffElem] = {}
    for G in enumerate_graphs(g, n):
        w = Fraction(1, G.aut)
        for (lk, ek), c in edge_integrand(G, vertex_poly).items():
            val = c.scale(w)
            for e in range(len(G.edges)):
                val = val * f.u(ek[2 * e], ek[2 * e + 1])
            prev = terms.get(lk)
            terms[lk] = val if prev is None else prev + val
    return EvenPoly(n, terms)
