"""Exact coefficient ring Q[pi^2] and sparse even polynomials over it.

Volumes are polynomials in the squared lengths ``L_i^2`` whose coefficients
are rational multiples of powers of ``pi^2``.  Both layers are stored
sparsely with :class:`fractions.Fraction` coefficients; ``pi^2`` is a formal
symbol and is only replaced by a float inside :meth:`EvenPoly.eval`.

A coefficient may additionally carry formal scalar symbols (moments ``u_i_j``
of a twisting function, the level scalar ``s`` of a modular functor, step
heights ``H_x``).  Without them the ring is exactly Q[pi^2].
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import product
from numbers import Rational
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

__all__ = [
    "CoeffElem",
    "EvenPoly",
    "PI2",
    "ONE",
    "ZERO",
    "add",
    "mul",
    "coefficient",
    "top_degree_part",
    "scale_lengths",
]

# (name, exponent) pairs sorted by name
Symbols = Tuple[Tuple[str, int], ...]
# (pi^2 exponent, formal symbols)
CMono = Tuple[int, Symbols]


def _merge_symbols(a: Symbols, b: Symbols) -> Symbols:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for name, e in b:
        out[name] = out.get(name, 0) + e
    return tuple(sorted(out.items()))


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


class CoeffElem:
    """Element of Q[pi^2] (optionally extended by formal scalar symbols).

    ``terms`` maps ``k`` to the rational coefficient of ``pi^(2k)`` when no
    formal symbol is present.  Instances are immutable and hashable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping] = None):
        clean: Dict[CMono, Fraction] = {}
        if terms:
            for key, q in terms.items():
                if isinstance(key, int):
                    key = (key, ())
                k, syms = key
                if k < 0:
                    raise ValueError("negative pi^2 exponent")
                syms = tuple(sorted((s, e) for s, e in syms if e))
                q = _as_fraction(q)
                if q:
                    clean[(k, syms)] = clean.get((k, syms), Fraction(0)) + q
        self._terms = {m: q for m, q in clean.items() if q}
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[CMono, Fraction]) -> "CoeffElem":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, q) -> "CoeffElem":
        return cls({0: q})

    @classmethod
    def pi2(cls, k: int = 1, q=1) -> "CoeffElem":
        return cls({k: q})

    @classmethod
    def symbol(cls, name: str, exponent: int = 1, q=1) -> "CoeffElem":
        return cls({(0, ((name, exponent),)): q})

    @property
    def terms(self) -> Dict[int, Fraction]:
        """pi^2-exponent -> rational; only valid without formal symbols."""
        if self.has_symbols():
            raise ValueError("element carries formal symbols; use monomials()")
        return {k: q for (k, _), q in self._terms.items()}

    def monomials(self) -> Dict[CMono, Fraction]:
        return dict(self._terms)

    def has_symbols(self) -> bool:
        return any(syms for (_, syms) in self._terms)

    def symbols(self) -> set:
        return {s for (_, syms) in self._terms for s, _ in syms}

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_rational(self) -> bool:
        return all(m == (0, ()) for m in self._terms)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational number")
        return self._terms.get((0, ()), Fraction(0))

    def __add__(self, other) -> "CoeffElem":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, q in other._terms.items():
            v = out.get(m, 0) + q
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return CoeffElem._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "CoeffElem":
        return CoeffElem._raw({m: -q for m, q in self._terms.items()})

    def __sub__(self, other) -> "CoeffElem":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "CoeffElem":
        return (-self) + other

    def __mul__(self, other) -> "CoeffElem":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return ZERO
        out: Dict[CMono, Fraction] = {}
        for (k1, s1), q1 in self._terms.items():
            for (k2, s2), q2 in other._terms.items():
                m = (k1 + k2, _merge_symbols(s1, s2))
                v = out.get(m, 0) + q1 * q2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return CoeffElem._raw(out)

    __rmul__ = __mul__

    def scale(self, q) -> "CoeffElem":
        q = _as_fraction(q)
        if not q:
            return ZERO
        return CoeffElem._raw({m: c * q for m, c in self._terms.items()})

    def __pow__(self, e: int) -> "CoeffElem":
        if e < 0:
            raise ValueError("negative powers are not in the ring")
        out = ONE
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def evaluate(self, pi2_value: float, symbols: Optional[Mapping[str, complex]] = None) -> complex:
        symbols = symbols or {}
        total = 0.0
        for (k, syms), q in self._terms.items():
            term = float(q) * pi2_value ** k
            for name, e in syms:
                if name not in symbols:
                    raise KeyError(f"no numeric value for symbol {name!r}")
                term = term * symbols[name] ** e
            total = total + term
        return total

    def substitute(self, values: Mapping[str, "CoeffElem"]) -> "CoeffElem":
        """Replace formal symbols by ring elements."""
        out = ZERO
        for (k, syms), q in self._terms.items():
            term = CoeffElem._raw({(k, ()): q})
            rest = []
            for name, e in syms:
                if name in values:
                    term = term * (_coerce(values[name]) ** e)
                else:
                    rest.append((name, e))
            if rest:
                term = term * CoeffElem._raw({(0, tuple(rest)): Fraction(1)})
            out = out + term
        return out

    def degree_in(self, name: str) -> int:
        return max((dict(syms).get(name, 0) for (_, syms) in self._terms), default=0)

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: (kv[0][0], kv[0][1]))

    def to_json(self) -> list:
        out = []
        for (k, syms), q in self.sorted_items():
            entry = {"pi2": k, "num": str(q.numerator), "den": str(q.denominator)}
            if syms:
                entry["sym"] = {name: e for name, e in syms}
            out.append(entry)
        return out

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "CoeffElem":
        terms = {}
        for entry in data:
            syms = tuple(sorted((entry.get("sym") or {}).items()))
            key = (int(entry["pi2"]), syms)
            terms[key] = terms.get(key, Fraction(0)) + Fraction(int(entry["num"]), int(entry["den"]))
        return cls(terms)

    def __repr__(self) -> str:
        return f"CoeffElem({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (k, syms), q in self.sorted_items():
            factors = []
            if k == 1:
                factors.append("pi^2")
            elif k > 1:
                factors.append(f"pi^{2 * k}")
            for name, e in syms:
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors:
                parts.append(str(q))
            elif q == 1:
                parts.append("*".join(factors))
            elif q == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(f"{q}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")


def _coerce(x):
    if isinstance(x, CoeffElem):
        return x
    if isinstance(x, (int, Fraction, Rational)):
        return CoeffElem._raw({(0, ()): Fraction(x)} if x else {})
    return NotImplemented


ZERO = CoeffElem._raw({})
ONE = CoeffElem._raw({(0, ()): Fraction(1)})
PI2 = CoeffElem._raw({(1, ()): Fraction(1)})


Exponent = Tuple[int, ...]


class EvenPoly:
    """Sparse polynomial in ``L_1^2, ..., L_n^2`` with :class:`CoeffElem` coefficients.

    The key ``d = (d_1, ..., d_n)`` stands for the monomial
    ``prod L_i^(2 d_i)``, so odd powers cannot be represented.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Mapping[Sequence[int], object]] = None):
        if nvars < 1:
            raise ValueError("polynomials need at least one length variable")
        self.nvars = nvars
        clean: Dict[Exponent, CoeffElem] = {}
        for d, c in (terms or {}).items():
            d = tuple(int(x) for x in d)
            if len(d) != nvars:
                raise ValueError(f"exponent {d} has length {len(d)}, expected {nvars}")
            if any(x < 0 for x in d):
                raise ValueError(f"negative exponent in {d}")
            c = _coerce(c)
            if c is NotImplemented:
                raise TypeError(f"bad coefficient {c!r}")
            prev = clean.get(d)
            c = c if prev is None else prev + c
            if c:
                clean[d] = c
            else:
                clean.pop(d, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exponent, CoeffElem]) -> "EvenPoly":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, nvars: int) -> "EvenPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "EvenPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, d: Sequence[int], c=1) -> "EvenPoly":
        return cls(len(d), {tuple(d): c})

    @property
    def terms(self) -> Dict[Exponent, CoeffElem]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def _check(self, other: "EvenPoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other) -> "EvenPoly":
        other = self._lift(other)
        self._check(other)
        out = dict(self._terms)
        for d, c in other._terms.items():
            prev = out.get(d)
            v = c if prev is None else prev + c
            if v:
                out[d] = v
            else:
                out.pop(d, None)
        return EvenPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "EvenPoly":
        return EvenPoly._raw(self.nvars, {d: -c for d, c in self._terms.items()})

    def __sub__(self, other) -> "EvenPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "EvenPoly":
        return self._lift(other) - self

    def _lift(self, other) -> "EvenPoly":
        if isinstance(other, EvenPoly):
            return other
        c = _coerce(other)
        if c is NotImplemented:
            raise TypeError(f"cannot combine EvenPoly with {type(other).__name__}")
        return EvenPoly.constant(self.nvars, c)

    def is_constant(self) -> bool:
        return all(not any(d) for d in self._terms)

    def constant_term(self) -> CoeffElem:
        return self._terms.get((0,) * self.nvars, ZERO)

    def __mul__(self, other) -> "EvenPoly":
        if not isinstance(other, EvenPoly):
            c = _coerce(other)
            if c is NotImplemented:
                return NotImplemented
            return self.scale(c)
        if self.nvars != other.nvars:
            if other.is_constant():
                return self.scale(other.constant_term())
            if self.is_constant():
                return other.scale(self.constant_term())
            self._check(other)
        out: Dict[Exponent, CoeffElem] = {}
        for d1, c1 in self._terms.items():
            for d2, c2 in other._terms.items():
                d = tuple(a + b for a, b in zip(d1, d2))
                prev = out.get(d)
                v = c1 * c2 if prev is None else prev + c1 * c2
                if v:
                    out[d] = v
                else:
                    out.pop(d, None)
        return EvenPoly._raw(self.nvars, out)

    def __rmul__(self, other) -> "EvenPoly":
        return self.__mul__(other)

    def scale(self, c) -> "EvenPoly":
        c = _coerce(c)
        if not c:
            return EvenPoly._raw(self.nvars, {})
        out = {}
        for d, v in self._terms.items():
            w = v * c
            if w:
                out[d] = w
        return EvenPoly._raw(self.nvars, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EvenPoly):
            c = _coerce(other)
            if c is NotImplemented:
                return False
            other = EvenPoly.constant(self.nvars, c)
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def coefficient(self, d: Sequence[int]) -> CoeffElem:
        d = tuple(d)
        if len(d) != self.nvars:
            raise ValueError(f"exponent {d} has length {len(d)}, expected {self.nvars}")
        return self._terms.get(d, ZERO)

    def degree(self) -> int:
        """Total degree in the L variables (twice the exponent sum)."""
        return max((2 * sum(d) for d in self._terms), default=0)

    def top_degree_part(self) -> "EvenPoly":
        if not self._terms:
            return self
        top = max(sum(d) for d in self._terms)
        return EvenPoly._raw(self.nvars, {d: c for d, c in self._terms.items() if sum(d) == top})

    def permute(self, perm: Sequence[int]) -> "EvenPoly":
        """Return q with q(L) = p(L_perm[0], ..., L_perm[n-1])."""
        out = {}
        for d, c in self._terms.items():
            nd = [0] * self.nvars
            for i, p in enumerate(perm):
                nd[p] = d[i]
            out[tuple(nd)] = c
        return EvenPoly._raw(self.nvars, out)

    def is_symmetric(self) -> bool:
        for d, c in self._terms.items():
            for d2 in set(_perms(d)):
                if self._terms.get(d2) != c:
                    return False
        return True

    def rescale(self, beta) -> "EvenPoly":
        """p(beta*L) for a rational beta."""
        b2 = _as_fraction(beta) ** 2
        return EvenPoly._raw(self.nvars, {d: c.scale(b2 ** sum(d)) for d, c in self._terms.items()})

    def map_coefficients(self, fn) -> "EvenPoly":
        return EvenPoly(self.nvars, {d: fn(c) for d, c in self._terms.items()})

    def eval(self, point: Sequence[complex], pi2_value: float, symbols: Optional[Mapping] = None) -> complex:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} entries, expected {self.nvars}")
        sq = [complex(x) ** 2 for x in point]
        total = 0j
        for d, c in self._terms.items():
            mono = 1 + 0j
            for s, e in zip(sq, d):
                if e:
                    mono *= s ** e
            total += c.evaluate(pi2_value, symbols) * mono
        return total

    def sorted_items(self):
        return sorted(self._terms.items())

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"d": list(d), "coeff": c.to_json()} for d, c in self.sorted_items()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data: Mapping) -> "EvenPoly":
        n = int(data["nvars"])
        return cls(n, {tuple(t["d"]): CoeffElem.from_json(t["coeff"]) for t in data["terms"]})

    @classmethod
    def loads(cls, text: str) -> "EvenPoly":
        return cls.from_json(json.loads(text))

    def __repr__(self) -> str:
        return f"EvenPoly({self.nvars}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for d, c in self.sorted_items():
            mono = "*".join(
                (f"L{i + 1}^{2 * e}") for i, e in enumerate(d) if e
            )
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif " " in cs:
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)


def _perms(d: Exponent):
    from itertools import permutations

    return permutations(d)


def add(p: EvenPoly, q: EvenPoly) -> EvenPoly:
    return p + q


def mul(p: EvenPoly, q: EvenPoly) -> EvenPoly:
    return p * q


def coefficient(p: EvenPoly, d: Sequence[int]) -> CoeffElem:
    return p.coefficient(d)


def top_degree_part(p: EvenPoly) -> EvenPoly:
    return p.top_degree_part()


def scale_lengths(p: EvenPoly) -> Dict[int, EvenPoly]:
    """Grade p by the power of an extra variable beta.

    Substituting ``L -> beta L`` multiplies each monomial by
    ``beta^(2 sum d)``; the result maps that beta exponent to the
    homogeneous piece carrying it.
    """
    graded: Dict[int, Dict[Exponent, CoeffElem]] = {}
    for d, c in p.items():
        graded.setdefault(2 * sum(d), {})[d] = c
    return {k: EvenPoly._raw(p.nvars, v) for k, v in sorted(graded.items())}


def all_exponents(nvars: int, max_total: int):
    """Exponent vectors with sum <= max_total."""
    for d in product(range(max_total + 1), repeat=nvars):
        if sum(d) <= max_total:
            yield d
