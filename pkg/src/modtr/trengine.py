"""Topological recursion over polynomial-type initial data.

Three views of the same numbers live here:

* :func:`volume` runs the recursion on polynomials, applying the moment
  transforms of :mod:`modtr.kernels` monomial by monomial;
* :func:`airy_tensors` / :func:`ks_recursion` run the same recursion on the
  coefficient tensors (A, B, C, D) indexed by monomial degrees;
* :func:`laplace_export` rewrites a volume on the basis used for
  Eynard-Orantin differentials.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations, product
from math import factorial
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .coeffring import ONE, ZERO, CoeffElem, EvenPoly
from .kernels import KernelFamily, MomentSpec, NotPolynomialType, moment_B, moment_C, twist, vd_poly

__all__ = [
    "PolynomialData",
    "poly_data",
    "volume",
    "twisted_volume",
    "volume_table",
    "volume_rows",
    "stable_range",
    "degree_bound",
    "RelationReport",
    "AIRY_RELATIONS",
    "clear_cache",
    "psi_intersections",
    "AiryTensors",
    "airy_tensors",
    "check_airy_relations",
    "ks_recursion",
    "check_integrated_symmetry",
    "laplace_export",
    "UnstableError",
    "CapExhausted",
]


class UnstableError(ValueError):
    pass


class CapExhausted(ValueError):
    pass


def _check_stable(g: int, n: int) -> None:
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise UnstableError(f"(g,n)=({g},{n}) is not stable with n >= 1")


def degree_bound(g: int, n: int) -> int:
    return 3 * g - 3 + n


# ---------------------------------------------------------------------------
# polynomial initial data


@dataclass(frozen=True)
class PolynomialData:
    """Initial data through its polynomial shadows.

    ``B(k)`` is the transform of ``l^(2k)`` (an EvenPoly in L1, L2),
    ``C(j, k)`` the transform of ``l^(2j) l'^(2k)`` (an EvenPoly in L1).
    """

    id: str
    A: EvenPoly
    B: Callable[[int], EvenPoly]
    C: Callable[[int, int], EvenPoly]
    VD: EvenPoly

    def __hash__(self) -> int:
        return hash(self.id)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolynomialData) and self.id == other.id


def poly_data(fam) -> PolynomialData:
    if isinstance(fam, PolynomialData):
        return fam
    if not fam.polynomial_type:
        raise NotPolynomialType(f"{fam.id} is not of polynomial type")
    return PolynomialData(
        id=fam.id,
        A=fam.A_poly(),
        B=lambda k, fam=fam: moment_B(fam, k),
        C=lambda j, k, fam=fam: moment_C(fam, j, k),
        VD=vd_poly(fam),
    )


# ---------------------------------------------------------------------------
# the recursion on polynomials

_memo: Dict[Tuple[str, int, int], EvenPoly] = {}
_memo_lock = threading.Lock()


def clear_cache() -> None:
    with _memo_lock:
        _memo.clear()


def _insert(key, value: EvenPoly) -> EvenPoly:
    with _memo_lock:
        return _memo.setdefault(key, value)


def _lookup(key) -> Optional[EvenPoly]:
    with _memo_lock:
        return _memo.get(key)


def volume(g: int, n: int, fam) -> EvenPoly:
    """Integrated amplitude V_{g,n}(L_1, ..., L_n)."""
    _check_stable(g, n)
    data = poly_data(fam)
    return _volume(g, n, data)


def _volume(g: int, n: int, data: PolynomialData) -> EvenPoly:
    key = (data.id, g, n)
    hit = _lookup(key)
    if hit is not None:
        return hit
    if (g, n) == (0, 3):
        return _insert(key, data.A)
    if (g, n) == (1, 1):
        return _insert(key, data.VD)
    return _insert(key, _recurse(g, n, data))


def _add_into(acc: Dict[tuple, CoeffElem], d: tuple, c: CoeffElem) -> None:
    prev = acc.get(d)
    v = c if prev is None else prev + c
    if v:
        acc[d] = v
    else:
        acc.pop(d, None)


def _recurse(g: int, n: int, data: PolynomialData) -> EvenPoly:
    acc: Dict[tuple, CoeffElem] = {}
    half = Fraction(1, 2)

    # B terms: L1 and L_m bound a pair of pants with the glued curve
    if n >= 2 and 2 * g - 2 + (n - 1) > 0:
        prev = _volume(g, n - 1, data)
        for m in range(1, n):
            others = [i for i in range(1, n) if i != m]
            for d, c in prev.items():
                bk = data.B(d[0])
                for (i, j), cb in bk.items():
                    e = [0] * n
                    e[0] = i
                    e[m] = j
                    for pos, x in zip(others, d[1:]):
                        e[pos] = x
                    _add_into(acc, tuple(e), cb * c)

    # C terms: glued pair (l, l') against the rest
    glued: Dict[Tuple[int, int], Dict[tuple, CoeffElem]] = {}

    def put(j, k, rest, c):
        _add_into(glued.setdefault((j, k), {}), rest, c)

    if g >= 1 and 2 * (g - 1) - 2 + (n + 1) > 0:
        for d, c in _volume(g - 1, n + 1, data).items():
            put(d[0], d[1], d[2:], c)
    rest_idx = list(range(1, n))
    for h in range(0, g + 1):
        hp = g - h
        for r in range(0, n):
            for J in combinations(rest_idx, r):
                Jp = [i for i in rest_idx if i not in J]
                n1, n2 = 1 + len(J), 1 + len(Jp)
                if 2 * h - 2 + n1 <= 0 or 2 * hp - 2 + n2 <= 0:
                    continue
                V1 = _volume(h, n1, data)
                V2 = _volume(hp, n2, data)
                for d1, c1 in V1.items():
                    for d2, c2 in V2.items():
                        rest = [0] * (n - 1)
                        for pos, x in zip(J, d1[1:]):
                            rest[pos - 1] = x
                        for pos, x in zip(Jp, d2[1:]):
                            rest[pos - 1] = x
                        put(d1[0], d2[0], tuple(rest), c1 * c2)
    for (j, k), polys in glued.items():
        cjk = data.C(j, k)
        for (i,), cc in cjk.items():
            w = cc.scale(half)
            for rest, c in polys.items():
                _add_into(acc, (i,) + rest, w * c)
    return EvenPoly(n, acc)


def twisted_volume(g: int, n: int, fam: KernelFamily, f: Optional[MomentSpec]) -> EvenPoly:
    return volume(g, n, twist(fam, f))


def stable_range(max_complexity: int) -> List[Tuple[int, int]]:
    """Stable (g,n), n >= 1, with 2g-2+n <= max_complexity, ordered by complexity."""
    out = []
    for chi in range(1, max_complexity + 1):
        for g in range(0, chi // 2 + 2):
            n = chi - 2 * g + 2
            if n >= 1:
                out.append((g, n))
    return out


def volume_table(fam, cells: Sequence[Tuple[int, int]]) -> Dict[Tuple[int, int], EvenPoly]:
    return {(g, n): volume(g, n, fam) for g, n in cells}


def volume_rows(g: int, n: int, p: EvenPoly) -> Iterator[dict]:
    """Flat rows: one per (monomial, pi^2 power)."""
    for d, c in p.sorted_items():
        for (k, syms), q in c.sorted_items():
            row = {
                "g": g,
                "n": n,
                "d": list(d),
                "pi2": k,
                "num": str(q.numerator),
                "den": str(q.denominator),
            }
            if syms:
                row["sym"] = {s: e for s, e in syms}
            yield row


def _psi_factor(d: Sequence[int]) -> int:
    out = 1
    for x in d:
        out *= 2 ** x * factorial(x)
    return out


def psi_intersections(g: int, n: int) -> Dict[Tuple[int, ...], Fraction]:
    """<tau_d1 ... tau_dn>_g from the Kontsevich volume."""
    from .kernels import Kontsevich

    v = volume(g, n, Kontsevich())
    return {d: c.to_fraction() * _psi_factor(d) for d, c in v.sorted_items()}


def laplace_export(v: EvenPoly) -> Dict[Tuple[int, ...], CoeffElem]:
    """Coefficients against prod (2d_i+1)!! dz_i / z_i^(2d_i+2)."""
    return {d: c.scale(_psi_factor(d)) for d, c in v.sorted_items()}


# ---------------------------------------------------------------------------
# Airy tensors

Index3 = Tuple[int, int, int]


@dataclass
class AiryTensors:
    """Sparse coefficient tensors A^i_{j,k}, B^i_{j,k}, C^i_{j,k}, D^i up to ``cap``.

    Each map stores only nonzero entries with every index <= cap.  The
    ``shift`` fields record how far the output degree of a transform can
    exceed its input degree; they decide how many internal indices a
    contraction needs.
    """

    A: Dict[Index3, CoeffElem]
    B: Dict[Index3, CoeffElem]
    C: Dict[Index3, CoeffElem]
    D: Dict[int, CoeffElem]
    cap: int
    label: str = ""
    b_shift: int = 1
    c_shift: int = 1

    def a(self, i, j, k) -> CoeffElem:
        return self.A.get((i, j, k), ZERO)

    def b(self, i, j, k) -> CoeffElem:
        return self.B.get((i, j, k), ZERO)

    def c(self, i, j, k) -> CoeffElem:
        return self.C.get((i, j, k), ZERO)

    def d(self, i) -> CoeffElem:
        return self.D.get(i, ZERO)

    def a_max(self) -> int:
        return max((max(key) for key in self.A), default=0)

    def d_max(self) -> int:
        return max(self.D, default=0)

    def copy(self) -> "AiryTensors":
        return replace(self, A=dict(self.A), B=dict(self.B), C=dict(self.C), D=dict(self.D))

    def to_json(self) -> dict:
        def entries(m):
            return [{"index": list(k) if isinstance(k, tuple) else [k], "value": v.to_json()} for k, v in sorted(m.items())]

        return {
            "label": self.label,
            "cap": self.cap,
            "b_shift": self.b_shift,
            "c_shift": self.c_shift,
            "A": entries(self.A),
            "B": entries(self.B),
            "C": entries(self.C),
            "D": entries(self.D),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AiryTensors":
        def read(key, arity):
            out = {}
            for e in data.get(key, []):
                ix = tuple(int(x) for x in e["index"])
                if len(ix) != arity:
                    raise ValueError(f"{key} entry {ix} should have {arity} indices")
                out[ix if arity > 1 else ix[0]] = CoeffElem.from_json(e["value"])
            return out

        return cls(
            read("A", 3),
            read("B", 3),
            read("C", 3),
            read("D", 1),
            int(data["cap"]),
            str(data.get("label", "")),
            int(data.get("b_shift", 1)),
            int(data.get("c_shift", 1)),
        )

    def check_declared_symmetries(self) -> List[str]:
        bad = []
        for (i, j, k), v in self.A.items():
            if self.a(i, k, j) != v:
                bad.append(f"A^{i}_{{{j},{k}}} != A^{i}_{{{k},{j}}}")
        for (i, j, k), v in self.C.items():
            if self.c(i, k, j) != v:
                bad.append(f"C^{i}_{{{j},{k}}} != C^{i}_{{{k},{j}}}")
        return bad


def airy_tensors(fam, cap: int) -> AiryTensors:
    """Coefficient tensors of polynomial-type initial data, indices <= cap."""
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    data = poly_data(fam)
    A = {d: c for d, c in data.A.items() if max(d) <= cap}
    B: Dict[Index3, CoeffElem] = {}
    C: Dict[Index3, CoeffElem] = {}
    b_shift = c_shift = 0
    for k in range(cap + 1):
        for (i, j), c in data.B(k).items():
            b_shift = max(b_shift, i + j - k)
            if i <= cap and j <= cap:
                B[(i, j, k)] = c
        for j in range(cap + 1):
            for (i,), c in data.C(j, k).items():
                c_shift = max(c_shift, i - j - k)
                if i <= cap:
                    C[(i, j, k)] = c
    D = {d[0]: c for d, c in data.VD.items() if d[0] <= cap}
    if len(D) != len(data.VD):
        raise CapExhausted(f"cap {cap} cannot hold the one-holed torus amplitude")
    return AiryTensors(A, B, C, D, cap, data.id, b_shift, c_shift)


def ks_recursion(t: AiryTensors, g: int, n: int) -> Dict[Tuple[int, ...], CoeffElem]:
    """F_{g,n}[i_1..i_n] by the Kontsevich-Soibelman recursion (nonzero entries)."""
    _check_stable(g, n)
    memo: Dict[Tuple[int, int], Dict[Tuple[int, ...], CoeffElem]] = {}
    return dict(_ks(t, g, n, memo))


def _ks(t: AiryTensors, g: int, n: int, memo) -> Dict[Tuple[int, ...], CoeffElem]:
    if (g, n) in memo:
        return memo[(g, n)]
    D = degree_bound(g, n)
    if D > t.cap:
        raise CapExhausted(f"cap {t.cap} < 3g-3+n = {D} for (g,n)=({g},{n})")
    out: Dict[Tuple[int, ...], CoeffElem] = {}
    if (g, n) == (0, 3):
        out = {k: v for k, v in t.A.items()}
    elif (g, n) == (1, 1):
        out = {(i,): v for i, v in t.D.items()}
    else:
        subs_B = _ks(t, g, n - 1, memo) if n >= 2 and 2 * g - 2 + (n - 1) > 0 else {}
        subs_C = _ks(t, g - 1, n + 1, memo) if g >= 1 and 2 * g - 4 + n + 1 > 0 else {}
        pieces = {}
        for h in range(g + 1):
            for r in range(n):
                if 2 * h - 2 + 1 + r > 0 and 2 * (g - h) - 2 + n - r > 0:
                    pieces[(h, 1 + r)] = _ks(t, h, 1 + r, memo)
                    pieces[(g - h, n - r)] = _ks(t, g - h, n - r, memo)
        half = Fraction(1, 2)
        for idx in _index_vectors(n, D):
            i1, rest = idx[0], idx[1:]
            total = ZERO
            for m in range(1, n):
                others = rest[: m - 1] + rest[m:]
                for key, fv in subs_B.items():
                    if key[1:] == others:
                        bv = t.b(i1, idx[m], key[0])
                        if bv:
                            total = total + bv * fv
            pair: Dict[Tuple[int, int], CoeffElem] = {}
            for key, fv in subs_C.items():
                if key[2:] == rest:
                    pair[key[:2]] = pair.get(key[:2], ZERO) + fv
            positions = list(range(n - 1))
            for h in range(g + 1):
                for r in range(n):
                    k1, k2 = (h, 1 + r), (g - h, n - r)
                    if k1 not in pieces or k2 not in pieces:
                        continue
                    for J in combinations(positions, r):
                        Jp = [p for p in positions if p not in J]
                        rj = tuple(rest[p] for p in J)
                        rjp = tuple(rest[p] for p in Jp)
                        for key1, f1 in pieces[k1].items():
                            if key1[1:] != rj:
                                continue
                            for key2, f2 in pieces[k2].items():
                                if key2[1:] == rjp:
                                    ab = (key1[0], key2[0])
                                    pair[ab] = pair.get(ab, ZERO) + f1 * f2
            for (a, b), pv in pair.items():
                cv = t.c(i1, a, b)
                if cv and pv:
                    total = total + cv.scale(half) * pv
            if total:
                out[idx] = total
    memo[(g, n)] = out
    return out


def _index_vectors(n: int, total: int) -> Iterator[Tuple[int, ...]]:
    for idx in product(range(total + 1), repeat=n):
        if sum(idx) <= total:
            yield idx


@dataclass
class RelationReport:
    residuals: Dict[str, List[Tuple[tuple, CoeffElem]]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not any(self.residuals.values())

    def failing(self) -> List[str]:
        return [name for name, r in self.residuals.items() if r]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "relations": {
                name: [{"index": list(ix), "residual": str(v)} for ix, v in r]
                for name, r in self.residuals.items()
            },
        }


AIRY_RELATIONS = ("A-symmetry", "f-antisymmetry", "BA", "BB-CA", "BC", "BD-CA")


def check_airy_relations(t: AiryTensors, window: int) -> RelationReport:
    """Exact residuals of the six compatibility relations for indices <= window."""
    if window > t.cap:
        raise CapExhausted(f"window {window} exceeds cap {t.cap}")
    # internal index range: contractions B^a_{k,l}, B^j_{a,l}, C^a_{k,l}, D^a, A^a
    need = max(window + t.b_shift, 2 * window + t.c_shift, t.a_max(), t.d_max())
    if need > t.cap:
        raise CapExhausted(f"internal sums need indices up to {need} but cap is {t.cap}")
    R = range(window + 1)
    I = range(need + 1)
    rep = RelationReport({name: [] for name in AIRY_RELATIONS})
    a, b, c, d = t.a, t.b, t.c, t.d

    for i, j, k in product(R, R, R):
        r = a(i, j, k) - a(j, i, k)
        if r:
            rep.residuals["A-symmetry"].append(((i, j, k), r))
        # f^k_{i,j} := B^i_{j,k} - B^j_{i,k}
        r = (b(i, j, k) - b(j, i, k)) + (b(j, i, k) - b(i, j, k))
        if r:
            rep.residuals["f-antisymmetry"].append(((i, j, k), r))

    def side_BA(i, j, k, l):
        s = ZERO
        for x in I:
            s = s + b(i, j, x) * a(x, k, l) + b(i, k, x) * a(j, x, l) + b(i, l, x) * a(j, x, k)
        return s

    def side_BB(i, j, k, l):
        s = ZERO
        for x in I:
            s = s + b(i, j, x) * b(x, k, l) + b(i, k, x) * b(j, x, l) + c(i, l, x) * a(j, x, k)
        return s

    def side_BC(i, j, k, l):
        s = ZERO
        for x in I:
            s = s + b(i, j, x) * c(x, k, l) + c(i, k, x) * b(j, x, l) + c(i, l, x) * b(j, x, k)
        return s

    for i, j in product(R, R):
        if i >= j:
            continue
        for k, l in product(R, R):
            for name, side in (("BA", side_BA), ("BB-CA", side_BB), ("BC", side_BC)):
                r = side(i, j, k, l) - side(j, i, k, l)
                if r:
                    rep.residuals[name].append(((i, j, k, l), r))
        s = ZERO
        for x in I:
            s = s + b(i, j, x) * d(x) - b(j, i, x) * d(x)
            for y in I:
                s = s + (c(i, x, y) * a(j, x, y) - c(j, x, y) * a(i, x, y)).scale(Fraction(1, 2))
        if s:
            rep.residuals["BD-CA"].append(((i, j), s))
    return rep


# ---------------------------------------------------------------------------
# integrated symmetry


def check_integrated_symmetry(fam, window: int = 3) -> Dict[str, List[Tuple[tuple, EvenPoly]]]:
    """Residuals of the four averaged symmetry conditions.

    The first and last are polynomial identities in (L1..L4) and (L1, L2).
    In the middle two, L4 (resp. L3 and L4) sit in kernel slots that are
    later integrated; they are tested against l^(2k+1) dl for k <= window,
    leaving polynomial identities in the remaining variables.  Each entry
    lists (moment indices, nonzero residual); an empty list means the
    condition holds.
    """
    data = poly_data(fam)
    A = data.A
    out: Dict[str, List[Tuple[tuple, EvenPoly]]] = {"AB": [], "BB-CA": [], "BC": [], "BD-CA": []}

    def lift(p: EvenPoly, places: Sequence[int], nv: int) -> EvenPoly:
        terms = {}
        for dd, c in p.items():
            e = [0] * nv
            for pos, x in zip(places, dd):
                e[pos] = x
            terms[tuple(e)] = c
        return EvenPoly(nv, terms)

    def mono(nv: int, places: Sequence[int], exps: Sequence[int], c) -> EvenPoly:
        e = [0] * nv
        for pos, x in zip(places, exps):
            e[pos] += x
        return EvenPoly(nv, {tuple(e): c})

    def antisym(p: EvenPoly) -> EvenPoly:
        perm = list(range(p.nvars))
        perm[0], perm[1] = 1, 0
        return p - p.permute(perm)

    # B(L1,L2,l)A(l,L3,L4) + B(L1,L3,l)A(L2,l,L4) + B(L1,L4,l)A(L2,l,L3)
    s = EvenPoly.zero(4)
    for (x, k, l), c in A.items():
        s = s + lift(data.B(x), (0, 1), 4) * mono(4, (2, 3), (k, l), c)
    for (j, x, l), c in A.items():
        s = s + lift(data.B(x), (0, 2), 4) * mono(4, (1, 3), (j, l), c)
    for (j, x, k), c in A.items():
        s = s + lift(data.B(x), (0, 3), 4) * mono(4, (1, 2), (j, k), c)
    r = antisym(s)
    if r:
        out["AB"].append(((), r))

    for l in range(window + 1):
        # B(L1,L2,l)B(l,L3,L4) + B(L1,L3,l)B(L2,l,L4) + C(L1,L4,l)A(L2,l,L3), L4 tested by l^2l
        s = EvenPoly.zero(3)
        for (x, k), c in data.B(l).items():
            s = s + lift(data.B(x), (0, 1), 3) * mono(3, (2,), (k,), c)
        for (j, x), c in data.B(l).items():
            s = s + lift(data.B(x), (0, 2), 3) * mono(3, (1,), (j,), c)
        for (j, x, k), c in A.items():
            s = s + lift(data.C(l, x), (0,), 3) * mono(3, (1, 2), (j, k), c)
        r = antisym(s)
        if r:
            out["BB-CA"].append(((l,), r))

    for k in range(window + 1):
        for l in range(window + 1):
            # B(L1,L2,l)C(l,L3,L4) + C(L1,L3,l)B(L2,l,L4) + C(L1,L4,l)B(L2,l,L3)
            s = EvenPoly.zero(2)
            for (x,), c in data.C(k, l).items():
                s = s + data.B(x).scale(c)
            for (j, x), c in data.B(l).items():
                s = s + lift(data.C(k, x), (0,), 2) * mono(2, (1,), (j,), c)
            for (j, x), c in data.B(k).items():
                s = s + lift(data.C(l, x), (0,), 2) * mono(2, (1,), (j,), c)
            r = antisym(s)
            if r:
                out["BC"].append(((k, l), r))

    s = EvenPoly.zero(2)
    for (x,), c in data.VD.items():
        s = s + data.B(x).scale(c)
    for (j, x, y), c in A.items():
        s = s + lift(data.C(x, y), (0,), 2) * mono(2, (1,), (j,), c.scale(Fraction(1, 2)))
    r = antisym(s)
    if r:
        out["BD-CA"].append(((), r))
    return out
