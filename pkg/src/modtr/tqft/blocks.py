"""Algebra-valued recursion for conformal blocks and its twist by the weights.

Initial data: A = mu, B = s B^M mu, C = s^2 C^M mu and the torus term
s * rk(1,1; lam) * VD^M, where ``s`` is a formal symbol standing for
(2 i pi / sqrt(c/12))^2.  Volumes are dicts from label tuples to EvenPoly.

The twist uses f(l) = -sum_lam Theta(H_lam - l) e_lam (x) e_lam^dagger, with
H_lam formal (``H_<label>``) unless specialised to H^2 = 2 (c/24 - r_lam).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, Sequence, Tuple

from ..coeffring import CoeffElem, EvenPoly
from ..kernels import Mirzakhani
from ..stablegraphs import enumerate_graphs, expand_vertices, vertex_slots
from ..trengine import poly_data
from .algebra import FrobeniusAlgebra, verlinde_rank
from .amplitudes import tqft_amplitude

__all__ = [
    "S_SYMBOL",
    "algebra_valued_volume",
    "torus_ranks",
    "conformal_block_twist",
    "specialize_weights",
    "rank_factorization_residual",
]

S_SYMBOL = "s"
TensorPoly = Dict[Tuple[int, ...], EvenPoly]


def _s(k: int) -> CoeffElem:
    return CoeffElem.symbol(S_SYMBOL, k) if k else CoeffElem.const(1)


def torus_ranks(alg: FrobeniusAlgebra) -> Tuple[int, ...]:
    """rk(1,1; lam), from modular data when present, else from the amplitude."""
    if alg.has_modular_data:
        return tuple(verlinde_rank(alg, 1, 1, [x]) for x in range(alg.dim))
    F = tqft_amplitude(alg, 1, 1)
    return tuple(F[(x,)] for x in range(alg.dim))


def _embed(p: EvenPoly, places: Sequence[int], nvars: int) -> Dict[tuple, CoeffElem]:
    out = {}
    for d, c in p.items():
        e = [0] * nvars
        for pos, x in zip(places, d):
            e[pos] = x
        out[tuple(e)] = c
    return out


def _add(acc: Dict[tuple, CoeffElem], d: tuple, c: CoeffElem) -> None:
    prev = acc.get(d)
    acc[d] = c if prev is None else prev + c


@lru_cache(maxsize=None)
def _volume(alg: FrobeniusAlgebra, g: int, n: int) -> TensorPoly:
    data = poly_data(Mirzakhani())
    labels = list(product(range(alg.dim), repeat=n))
    pairs = alg.pairs()
    mu = alg.mu
    if (g, n) == (0, 3):
        return {lam: EvenPoly.constant(3, mu[lam[0]][lam[1]][lam[2]]) for lam in labels}
    if (g, n) == (1, 1):
        rk = torus_ranks(alg)
        return {lam: data.VD.scale(_s(1).scale(rk[lam[0]])) for lam in labels}
    half = Fraction(1, 2)
    out: TensorPoly = {}
    for lam in labels:
        acc: Dict[tuple, CoeffElem] = {}
        if n >= 2 and 2 * g - 3 + n > 0:
            prev = _volume(alg, g, n - 1)
            for m in range(1, n):
                rest = tuple(lam[i] for i in range(1, n) if i != m)
                others = [i for i in range(1, n) if i != m]
                w: Dict[tuple, CoeffElem] = {}
                for x, y, q in pairs:
                    k = mu[lam[0]][lam[m]][x] * q
                    if k:
                        for d, c in prev[(y,) + rest].items():
                            _add(w, d, c.scale(k))
                for d, c in w.items():
                    for (i, j), cb in data.B(d[0]).items():
                        e = [0] * n
                        e[0], e[m] = i, j
                        for pos, v in zip(others, d[1:]):
                            e[pos] = v
                        _add(acc, tuple(e), cb * c * _s(1))
        glued: Dict[tuple, CoeffElem] = {}
        rest_idx = list(range(1, n))
        for (x, y, q), (x2, y2, q2) in product(pairs, pairs):
            k = mu[lam[0]][x][x2] * q * q2
            if not k:
                continue
            if g >= 1 and 2 * g - 3 + n > 0:
                for d, c in _volume(alg, g - 1, n + 1)[(y, y2) + lam[1:]].items():
                    _add(glued, d, c.scale(k))
            for h in range(g + 1):
                for r in range(n):
                    for J in combinations(rest_idx, r):
                        Jp = [i for i in rest_idx if i not in J]
                        if 2 * h - 1 + len(J) <= 0 or 2 * (g - h) - 1 + len(Jp) <= 0:
                            continue
                        V1 = _volume(alg, h, 1 + len(J))[(y,) + tuple(lam[i] for i in J)]
                        V2 = _volume(alg, g - h, 1 + len(Jp))[(y2,) + tuple(lam[i] for i in Jp)]
                        P1 = _embed(V1, [0] + [i + 1 for i in J], n + 1)
                        P2 = _embed(V2, [1] + [i + 1 for i in Jp], n + 1)
                        for d1, c1 in P1.items():
                            for d2, c2 in P2.items():
                                d = tuple(a + b for a, b in zip(d1, d2))
                                _add(glued, d, (c1 * c2).scale(k))
        for d, c in glued.items():
            for (i,), cc in data.C(d[0], d[1]).items():
                _add(acc, (i,) + d[2:], cc.scale(half) * c * _s(2))
        out[lam] = EvenPoly(n, acc)
    return out


def algebra_valued_volume(alg: FrobeniusAlgebra, g: int, n: int) -> TensorPoly:
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise ValueError(f"(g,n)=({g},{n}) is not stable with a boundary")
    return dict(_volume(alg, g, n))


def rank_factorization_residual(alg: FrobeniusAlgebra, g: int, n: int) -> Dict[Tuple[int, ...], EvenPoly]:
    """Nonzero entries of V^Z - s^(3g-3+n) rk V^M; empty when the factorization holds."""
    from ..trengine import volume

    VM = volume(g, n, Mirzakhani())
    V = algebra_valued_volume(alg, g, n)
    sp = _s(3 * g - 3 + n)
    out = {}
    for lam, p in V.items():
        rk = verlinde_rank(alg, g, n, lam) if alg.has_modular_data else tqft_amplitude(alg, g, n)[lam]
        diff = p - VM.scale(sp.scale(rk))
        if diff:
            out[lam] = diff
    return out


def _h_moment(alg: FrobeniusAlgebra, x: int, a: int, b: int) -> CoeffElem:
    # int_0^H l^(2a+2b+1) dl for the step function at H_x
    p = 2 * (a + b) + 2
    return CoeffElem.symbol(f"H_{alg.labels[x]}", p, Fraction(1, p))


def conformal_block_twist(alg: FrobeniusAlgebra, g: int, n: int, specialize: bool = False) -> TensorPoly:
    """Twisted algebra-valued volume as a sum over stable graphs."""
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise ValueError(f"(g,n)=({g},{n}) is not stable with a boundary")
    pairs = alg.pairs()
    out: Dict[Tuple[int, ...], Dict[tuple, CoeffElem]] = {}
    for G in enumerate_graphs(g, n):
        nE = len(G.edges)
        slots = [vertex_slots(G, v) for v in range(len(G.genera))]
        tensors = [_volume(alg, h, len(slots[v])) for v, h in enumerate(G.genera)]
        w = Fraction(1, G.aut)
        for lam in product(range(alg.dim), repeat=n):
            acc = out.setdefault(lam, {})
            for choice in product(pairs, repeat=nE):
                polys = []
                for v, sl in enumerate(slots):
                    key = tuple(lam[i] if kind == "leg" else choice[i // 2][i % 2] for kind, i in sl)
                    polys.append(tensors[v][key])
                if any(not p for p in polys):
                    continue
                sign = Fraction((-1) ** nE)
                for _, _, q in choice:
                    sign *= q
                for (lk, ek), c in expand_vertices(G, polys).items():
                    val = c.scale(w * sign)
                    for e in range(nE):
                        val = val * _h_moment(alg, choice[e][0], ek[2 * e], ek[2 * e + 1])
                    _add(acc, lk, val)
    res = {lam: EvenPoly(n, acc) for lam, acc in out.items()}
    return specialize_weights(alg, res) if specialize else res


def specialize_weights(alg: FrobeniusAlgebra, vol: TensorPoly) -> TensorPoly:
    """Replace H_lam^(2m) by (2 (c/24 - r_lam))^m."""
    if alg.weights is None or alg.c is None:
        raise ValueError("algebra has no conformal weights")
    h2 = {f"H_{alg.labels[x]}": 2 * (alg.c / 24 - alg.weights[x]) for x in range(alg.dim)}

    def fix(c: CoeffElem) -> CoeffElem:
        terms = {}
        for (k, syms), q in c.monomials().items():
            keep = []
            for name, e in syms:
                if name in h2:
                    q = q * h2[name] ** (e // 2)
                else:
                    keep.append((name, e))
            key = (k, tuple(keep))
            terms[key] = terms.get(key, Fraction(0)) + q
        return CoeffElem(terms)

    return {lam: p.map_coefficients(fix) for lam, p in vol.items()}
