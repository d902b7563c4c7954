"""Commutative Frobenius algebras, fusion rings and Verlinde ranks.

Tensors are stored with lowered indices in the basis e_0, ..., e_{N-1}:
``eta[a][b] = <e_a, e_b>`` and ``mu[a][b][c] = <e_a e_b, e_c>``.  Gluing two
boundaries contracts with the inverse pairing ``eta_inv``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "FrobeniusAlgebra",
    "AxiomError",
    "RankResidualError",
    "trivial_algebra",
    "su2_fusion",
    "su2_algebra",
    "load_modular_data",
    "from_modular_data",
    "verlinde_rank",
]

Matrix = Tuple[Tuple[Fraction, ...], ...]


class AxiomError(ValueError):
    pass


class RankResidualError(ArithmeticError):
    pass


def _frac_inverse(m: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise AxiomError("pairing is degenerate")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


@dataclass(frozen=True)
class FrobeniusAlgebra:
    labels: Tuple[str, ...]
    dagger: Tuple[int, ...]
    eta: Matrix
    mu: Tuple[Tuple[Tuple[Fraction, ...], ...], ...]
    S: Optional[Tuple[Tuple[complex, ...], ...]] = None
    weights: Optional[Tuple[Fraction, ...]] = None
    c: Optional[Fraction] = None
    vacuum: int = 0
    name: str = ""
    eta_inv: Matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "eta_inv", _frac_inverse(self.eta))
        problems = self.axiom_violations()
        if problems:
            raise AxiomError("; ".join(problems[:5]))

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def has_modular_data(self) -> bool:
        return self.S is not None

    def pairs(self) -> List[Tuple[int, int, Fraction]]:
        """Nonzero entries of the inverse pairing."""
        r = range(self.dim)
        return [(x, y, self.eta_inv[x][y]) for x in r for y in r if self.eta_inv[x][y] != 0]

    def product(self, a: int, b: int) -> List[Fraction]:
        """Coordinates of e_a e_b."""
        r = range(self.dim)
        return [sum((self.mu[a][b][d] * self.eta_inv[d][c] for d in r), Fraction(0)) for c in r]

    def axiom_violations(self) -> List[str]:
        n = self.dim
        r = range(n)
        out = []
        if len(self.dagger) != n or sorted(self.dagger) != list(r):
            out.append("dagger is not a permutation of the labels")
        elif any(self.dagger[self.dagger[a]] != a for a in r):
            out.append("dagger is not an involution")
        for a, b in product(r, r):
            if self.eta[a][b] != self.eta[b][a]:
                out.append(f"pairing not symmetric at {a},{b}")
        for a, b, c in product(r, r, r):
            m = self.mu[a][b][c]
            if m != self.mu[b][a][c]:
                out.append(f"product not commutative at {a},{b},{c}")
            if m != self.mu[a][c][b]:
                out.append(f"pairing not invariant at {a},{b},{c}")
        prods = {(a, b): self.product(a, b) for a in r for b in r}
        for a, b, c in product(r, r, r):
            left = [sum((prods[(a, b)][d] * prods[(d, c)][e] for d in r), Fraction(0)) for e in r]
            right = [sum((prods[(b, c)][d] * prods[(a, d)][e] for d in r), Fraction(0)) for e in r]
            if left != right:
                out.append(f"product not associative at {a},{b},{c}")
        for b in r:
            if prods[(self.vacuum, b)] != [Fraction(int(i == b)) for i in r]:
                out.append(f"e_{self.vacuum} is not a unit")
                break
        if self.S is not None:
            S = np.array(self.S, dtype=complex)
            if S.shape != (n, n) or abs(np.linalg.det(S)) < 1e-12:
                out.append("S is not invertible")
            if self.weights is not None and any(self.weights[self.dagger[a]] != self.weights[a] for a in r):
                out.append("weights are not dagger invariant")
        return out

    def to_json(self) -> dict:
        d = {
            "name": self.name,
            "labels": list(self.labels),
            "dagger": list(self.dagger),
            "eta": [[str(x) for x in row] for row in self.eta],
            "mu": [[[str(x) for x in row] for row in m] for m in self.mu],
        }
        if self.S is not None:
            d["S"] = [[complex(x).real for x in row] for row in self.S]
            d["weights"] = [str(w) for w in self.weights]
            d["c"] = str(self.c)
        return d


def trivial_algebra() -> FrobeniusAlgebra:
    one = Fraction(1)
    return FrobeniusAlgebra(("1",), (0,), ((one,),), (((one,),),), name="trivial")


def su2_fusion(k: int) -> Dict[Tuple[int, int, int], int]:
    """Brute-force su(2)_k fusion numbers N_{abc} (all labels self-dual)."""
    out = {}
    for a, b, c in product(range(k + 1), repeat=3):
        ok = abs(a - b) <= c <= min(a + b, 2 * k - a - b) and (a + b + c) % 2 == 0
        out[(a, b, c)] = int(ok)
    return out


def load_modular_data(path: Optional[str] = None, k: Optional[int] = None) -> dict:
    if path is not None:
        with open(path) as fh:
            return json.load(fh)
    if k is None:
        raise ValueError("give a path or a level")
    ref = resources.files("modtr") / "data" / f"su2_k{k}.json"
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled data for level {k}")
    return json.loads(ref.read_text())


def _snap(x: complex, tol: float, what: str) -> int:
    n = round(x.real)
    res = abs(x - n)
    if res > tol:
        raise RankResidualError(f"{what}: {x} is {res:.3g} away from an integer")
    return int(n)


def from_modular_data(data: dict, tol: float = 1e-8) -> FrobeniusAlgebra:
    """Fusion algebra from modular data, structure constants by Verlinde's formula."""
    for key in ("labels", "dagger", "S", "weights", "c"):
        if key not in data:
            raise ValueError(f"modular data lacks {key!r}")
    labels = tuple(str(x) for x in data["labels"])
    n = len(labels)
    dagger = tuple(int(x) for x in data["dagger"])
    S = np.array(data["S"], dtype=complex)
    if S.shape != (n, n):
        raise ValueError("S has the wrong shape")
    Sinv = np.linalg.inv(S)
    weights = tuple(Fraction(w) for w in data["weights"])
    vac = weights.index(Fraction(0)) if Fraction(0) in weights else 0
    # N_ab^c = sum_m S_am S_bm Sinv_mc / S_0m
    N = np.einsum("am,bm,mc->abc", S, S, Sinv / S[vac][:, None])
    mu = tuple(
        tuple(tuple(Fraction(_snap(N[a, b, dagger[c]], tol, "fusion")) for c in range(n)) for b in range(n))
        for a in range(n)
    )
    eta = tuple(tuple(Fraction(int(b == dagger[a])) for b in range(n)) for a in range(n))
    return FrobeniusAlgebra(
        labels,
        dagger,
        eta,
        mu,
        S=tuple(tuple(complex(x) for x in row) for row in S),
        weights=weights,
        c=Fraction(data["c"]),
        vacuum=vac,
        name=str(data.get("name", "fusion")),
    )


def su2_algebra(k: int) -> FrobeniusAlgebra:
    return from_modular_data(load_modular_data(k=k))


def verlinde_rank(alg: FrobeniusAlgebra, g: int, n: int, lam: Sequence[int], tol: float = 1e-8) -> int:
    """Dimension of conformal blocks, snapped to an integer.

    rk = sum_m prod_i Sinv[lam_i, m] / Sinv[vac, m]^(2g-2+n)
    """
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise ValueError(f"(g,n)=({g},{n}) is not stable")
    if not alg.has_modular_data:
        raise ValueError("algebra has no modular data")
    if len(lam) != n:
        raise ValueError("need one label per boundary")
    Sinv = np.linalg.inv(np.array(alg.S, dtype=complex))
    total = 0j
    for m in range(alg.dim):
        term = 1 + 0j
        for x in lam:
            term *= Sinv[x, m]
        total += term / Sinv[alg.vacuum, m] ** (2 * g - 2 + n)
    return _snap(total, tol, f"rank({g},{n},{tuple(lam)})")
