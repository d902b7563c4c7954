"""Rooted uni-trivalent fatgraphs.

A fatgraph is a pair of permutations on darts: ``sigma`` (rotation, 3-cycles
at trivalent vertices, fixed points at univalent ones) and ``alpha`` (a
fixed-point-free involution pairing darts into edges).  The root is dart 0,
a univalent dart.  Rooted connected maps have no automorphisms, so relabeling
darts in breadth-first order from the root gives a canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import FrobeniusAlgebra
from .amplitudes import Tensor, contract_network

__all__ = ["Fatgraph", "fatgraph_enumerate", "enumerate_by_matchings", "enumerate_by_rotations", "strict_gr_sum"]

Perm = Tuple[int, ...]


def _connected(sigma: Perm, alpha: Perm) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        d = stack.pop()
        for e in (sigma[d], alpha[d]):
            if e not in seen:
                seen.add(e)
                stack.append(e)
    return len(seen) == len(sigma)


def _canonical(sigma: Perm, alpha: Perm, root: int) -> Tuple[Perm, Perm]:
    new = {root: 0}
    order = [root]
    i = 0
    while i < len(order):
        d = order[i]
        i += 1
        for e in (alpha[d], sigma[d]):
            if e not in new:
                new[e] = len(order)
                order.append(e)
    s = tuple(new[sigma[d]] for d in order)
    a = tuple(new[alpha[d]] for d in order)
    return s, a


@dataclass(frozen=True)
class Fatgraph:
    sigma: Perm
    alpha: Perm

    @property
    def darts(self) -> int:
        return len(self.sigma)

    def is_univalent(self, d: int) -> bool:
        return self.sigma[d] == d

    def vertex_of(self, d: int) -> int:
        """Smallest dart in the sigma-orbit."""
        return min(d, self.sigma[d], self.sigma[self.sigma[d]])

    @cached_property
    def trivalent(self) -> List[int]:
        return sorted({self.vertex_of(d) for d in range(self.darts) if not self.is_univalent(d)})

    @property
    def n(self) -> int:
        return sum(1 for d in range(self.darts) if self.is_univalent(d))

    @property
    def genus(self) -> int:
        edges = self.darts // 2
        verts = len(self.trivalent) + self.n
        return edges - verts + 1

    def face(self, d: int) -> int:
        return self.sigma[self.alpha[d]]

    @cached_property
    def faces(self) -> Dict[int, int]:
        fid: Dict[int, int] = {}
        for d in range(self.darts):
            if d in fid:
                continue
            e = d
            while e not in fid:
                fid[e] = d
                e = self.face(e)
        return fid

    @cached_property
    def _traversal(self):
        """Face traversal from the root.

        Walk around the current face, adding each edge that reaches an
        unvisited vertex to the tree.  Then walk it again and jump across
        the first edge whose opposite face is unexplored; resume after
        returning.
        """
        visited = {self.vertex_of(0)}
        explored = {self.faces[0]}
        tree: List[Tuple[int, int]] = []
        reached: List[int] = []

        def explore(start: int) -> None:
            d = start
            while True:
                w = self.vertex_of(self.alpha[d])
                if w not in visited:
                    visited.add(w)
                    tree.append((d, self.alpha[d]))
                    reached.append(w)
                d = self.face(d)
                if d == start:
                    break
            d = start
            while True:
                f = self.faces[self.alpha[d]]
                if f not in explored:
                    explored.add(f)
                    explore(self.alpha[d])
                d = self.face(d)
                if d == start:
                    break

        explore(0)
        return tree, reached

    @property
    def spanning_tree(self) -> List[Tuple[int, int]]:
        return self._traversal[0]

    @cached_property
    def leg_labels(self) -> Dict[int, int]:
        """Root is boundary 1, other legs numbered in traversal order."""
        out = {0: 1}
        for w in self._traversal[1]:
            if self.is_univalent(w):
                out[w] = len(out) + 1
        return out

    @cached_property
    def _unfolding(self):
        """Remove pants one at a time starting from the root.

        The pants next to a component's root has two further boundaries; each
        is a boundary of the component (a leg or an earlier cut), a loop, or
        an interior curve.  Types: A (no interior curve), B^j (one, with j
        the other boundary), C (two), D (loop).
        """
        removed = set()
        order: List[int] = []
        types: List[str] = []
        cut_name: Dict[int, str] = {}

        def boundary_name(d: int) -> Optional[str]:
            e = self.alpha[d]
            if self.is_univalent(e):
                return str(self.leg_labels[e])
            if self.vertex_of(e) in removed:
                return cut_name[min(d, e)]
            return None

        def process(r: int) -> None:
            v = self.vertex_of(r)
            removed.add(v)
            order.append(v)
            h2, h3 = self.sigma[r], self.sigma[self.sigma[r]]
            if self.alpha[h2] == h3:
                types.append("D")
                return
            b2, b3 = boundary_name(h2), boundary_name(h3)
            for h in (h2, h3):
                cut_name.setdefault(min(h, self.alpha[h]), f"c{len(cut_name) + 1}")
            if b2 is not None and b3 is not None:
                types.append("A")
            elif b2 is not None or b3 is not None:
                types.append("B" + (b2 if b2 is not None else b3))
                process(self.alpha[h3 if b2 is not None else h2])
            else:
                types.append("C")
                process(self.alpha[h2])
                if self.vertex_of(self.alpha[h3]) not in removed:
                    process(self.alpha[h3])

        process(self.alpha[0])
        return order, types

    @property
    def pants_order(self) -> List[int]:
        return self._unfolding[0]

    @property
    def type_map(self) -> List[str]:
        return self._unfolding[1]

    def network(self):
        """Trivalent vertices as slot lists with legs numbered by ``leg_labels``."""
        edge_id: Dict[int, int] = {}
        for d in range(self.darts):
            e = self.alpha[d]
            if not self.is_univalent(d) and not self.is_univalent(e) and d < e:
                edge_id[d] = len(edge_id)
        verts = []
        for v in self.trivalent:
            slots = []
            for d in (v, self.sigma[v], self.sigma[self.sigma[v]]):
                e = self.alpha[d]
                if self.is_univalent(e):
                    slots.append(("leg", self.leg_labels[e] - 1))
                elif d < e:
                    slots.append(("e", 2 * edge_id[d]))
                else:
                    slots.append(("e", 2 * edge_id[e] + 1))
            verts.append(slots)
        return verts, len(edge_id)

    def to_json(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "alpha": list(self.alpha),
            "spanning_tree": [list(e) for e in self.spanning_tree],
            "type_map": self.type_map,
        }


def _sizes(g: int, n: int) -> Tuple[int, int]:
    if g < 0 or n < 1 or 2 * g - 2 + n < 1:
        raise ValueError(f"(g,n)=({g},{n}) has no rooted uni-trivalent fatgraphs")
    v3 = 2 * g - 2 + n
    return v3, 3 * v3 + n


def _matchings(items: List[int]):
    if not items:
        yield []
        return
    a = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1 :]
        for m in _matchings(rest):
            yield [(a, items[i])] + m


def enumerate_by_matchings(g: int, n: int) -> List[Fatgraph]:
    """Fix the rotation, run over all edge matchings."""
    v3, D = _sizes(g, n)
    sigma = []
    for i in range(v3):
        sigma += [3 * i + 1, 3 * i + 2, 3 * i]
    sigma += list(range(3 * v3, D))
    sigma = tuple(sigma)
    legs = set(range(3 * v3, D))
    found = set()
    for m in _matchings(list(range(D))):
        if any(a in legs and b in legs for a, b in m):
            continue
        alpha = [0] * D
        for a, b in m:
            alpha[a], alpha[b] = b, a
        alpha = tuple(alpha)
        if _connected(sigma, alpha):
            found.add(_canonical(sigma, alpha, 3 * v3))
    return sorted((Fatgraph(s, a) for s, a in found), key=lambda G: (G.sigma, G.alpha))


def _three_cycles(items: List[int]):
    if not items:
        yield []
        return
    a = items[0]
    rest = items[1:]
    for b in rest:
        for c in rest:
            if c == b:
                continue
            left = [x for x in rest if x != b and x != c]
            for m in _three_cycles(left):
                yield [(a, b, c)] + m


def enumerate_by_rotations(g: int, n: int) -> List[Fatgraph]:
    """Fix the edge matching, run over rotations and root choices."""
    v3, D = _sizes(g, n)
    alpha = tuple(d ^ 1 for d in range(D))
    found = set()
    for fixed in combinations(range(D), n):
        if any(alpha[d] in fixed for d in fixed):
            continue
        rest = [d for d in range(D) if d not in fixed]
        for cycles in _three_cycles(rest):
            sigma = list(range(D))
            for a, b, c in cycles:
                sigma[a], sigma[b], sigma[c] = b, c, a
            sigma = tuple(sigma)
            if not _connected(sigma, alpha):
                continue
            for r in fixed:
                found.add(_canonical(sigma, alpha, r))
    return sorted((Fatgraph(s, a) for s, a in found), key=lambda G: (G.sigma, G.alpha))


@lru_cache(maxsize=None)
def _enumerate(g: int, n: int) -> Tuple[Fatgraph, ...]:
    return tuple(enumerate_by_matchings(g, n))


def fatgraph_enumerate(g: int, n: int) -> List[Fatgraph]:
    """Rooted uni-trivalent fatgraphs of type (g,n) up to root-preserving isomorphism."""
    return list(_enumerate(g, n))


def strict_gr_sum(alg: FrobeniusAlgebra, g: int, n: int) -> Tensor:
    """Sum over fatgraphs of the contraction along each graph's pants."""
    total: Tensor = {}
    for G in fatgraph_enumerate(g, n):
        verts, ne = G.network()
        for k, v in contract_network(alg, verts, n, ne).items():
            total[k] = total.get(k, 0) + v
    return total
