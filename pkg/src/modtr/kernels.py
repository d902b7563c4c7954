"""Recursion kernels (A, B, C, VD) and their exact moment transforms.

All kernels share one shape.  With a profile function ``phi``

    B(L1, L2, l) = (phi(L1-L2-l) + phi(L1+L2-l) - phi(-L1+L2-l) - phi(-L1-L2-l)) / (2 L1)
    C(L1, l, l') = (phi(L1-l-l') - phi(-L1-l-l')) / L1

where ``phi = F`` (Mirzakhani), ``phi(x) = F(beta x)/beta`` (beta family) or
``phi(x) = [x]_+`` (Kontsevich).  Every moment transform then reduces to the
odd polynomial

    I_m(t) = int_0^oo s^m (phi(t-s) - phi(-t-s)) ds,     m odd,

which is computed exactly from the even moments of ``phi''``.  For
Mirzakhani these are moments of a logistic law and involve ``zeta(2p)``,
hence powers of ``pi^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Dict, Optional, Sequence, Tuple

from .coeffring import ONE, ZERO, CoeffElem, EvenPoly

__all__ = [
    "eval_F",
    "bernoulli",
    "zeta_even",
    "MomentSpec",
    "Indicator",
    "Exponential",
    "FormalMoments",
    "KernelFamily",
    "Mirzakhani",
    "Kontsevich",
    "BetaScaled",
    "Twisted",
    "twist",
    "eval_A",
    "eval_B",
    "eval_C",
    "eval_B_logratio",
    "eval_C_logratio",
    "moment_B",
    "moment_C",
    "quadrature_oracle",
    "vd_poly",
    "odd_profile_poly",
    "moment_spec_from_json",
    "MomentSum",
    "family_from_json",
    "NotPolynomialType",
]


class NotPolynomialType(ValueError):
    pass


# ---------------------------------------------------------------------------
# pointwise profile


def eval_F(x: float) -> float:
    """F(x) = 2 ln(1 + e^{x/2}), stable for large |x|."""
    if x > 0:
        return x + 2.0 * math.log1p(math.exp(-x / 2.0))
    return 2.0 * math.log1p(math.exp(x / 2.0))


def _pos(x: float) -> float:
    return x if x > 0 else 0.0


# ---------------------------------------------------------------------------
# exact constants


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2:
        return Fraction(0)
    return -sum(comb(n + 1, k) * bernoulli(k) for k in range(n)) / (n + 1)


def zeta_even(p: int) -> CoeffElem:
    """zeta(2p) as a rational multiple of pi^(2p)."""
    if p < 1:
        raise ValueError("zeta_even needs p >= 1")
    q = (-1) ** (p + 1) * bernoulli(2 * p) * Fraction(2) ** (2 * p) / (2 * factorial(2 * p))
    return CoeffElem.pi2(p, q)


def _eta_even(p: int) -> CoeffElem:
    # Dirichlet eta at 2p
    return zeta_even(p).scale(1 - Fraction(2) ** (1 - 2 * p))


# ---------------------------------------------------------------------------
# twisting functions


class MomentSpec:
    """A twisting function known through its odd moments m_k = int l^k f(l) dl."""

    def odd_moment(self, k: int) -> CoeffElem:
        raise NotImplementedError

    def u(self, a: int, b: int) -> CoeffElem:
        """Pairing of l^(2a) with l^(2b) against l f(l) dl."""
        return self.odd_moment(2 * (a + b) + 1)

    def pointwise(self, ell: float) -> float:
        raise NotImplementedError(f"{type(self).__name__} has no pointwise values")

    def is_zero(self) -> bool:
        return False

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Indicator(MomentSpec):
    """f = indicator of [0, H)."""

    H: Fraction

    def __post_init__(self):
        object.__setattr__(self, "H", Fraction(self.H))
        if self.H < 0:
            raise ValueError("H must be nonnegative")

    def odd_moment(self, k: int) -> CoeffElem:
        return CoeffElem.const(self.H ** (k + 1) / (k + 1))

    def pointwise(self, ell: float) -> float:
        return 1.0 if ell < self.H else 0.0

    def is_zero(self) -> bool:
        return self.H == 0

    def to_json(self) -> dict:
        return {"type": "indicator", "H": str(self.H)}


@dataclass(frozen=True)
class Exponential(MomentSpec):
    """f(l) = exp(-rate l)."""

    rate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rate", Fraction(self.rate))
        if self.rate <= 0:
            raise ValueError("rate must be positive")

    def odd_moment(self, k: int) -> CoeffElem:
        return CoeffElem.const(Fraction(factorial(k)) / self.rate ** (k + 1))

    def pointwise(self, ell: float) -> float:
        return math.exp(-float(self.rate) * ell)

    def to_json(self) -> dict:
        return {"type": "exponential", "rate": str(self.rate)}


@dataclass(frozen=True)
class FormalMoments(MomentSpec):
    """Pairings u_{a,b} = u_{b,a} kept as independent symbols ``<prefix>_<a>_<b>``.

    For an actual function u_{a,b} only depends on a+b; keeping the symbols
    independent makes identities checked with them strictly stronger.
    """

    prefix: str = "u"

    def u(self, a: int, b: int) -> CoeffElem:
        a, b = min(a, b), max(a, b)
        return CoeffElem.symbol(f"{self.prefix}_{a}_{b}")

    def odd_moment(self, k: int) -> CoeffElem:
        raise ValueError("formal pairings are not moments of a single function")

    def to_json(self) -> dict:
        return {"type": "formal", "prefix": self.prefix}


@dataclass(frozen=True)
class MomentSum(MomentSpec):
    """f + g, moment by moment."""

    parts: Tuple[MomentSpec, ...]

    def odd_moment(self, k: int) -> CoeffElem:
        out = ZERO
        for p in self.parts:
            out = out + p.odd_moment(k)
        return out

    def u(self, a: int, b: int) -> CoeffElem:
        out = ZERO
        for p in self.parts:
            out = out + p.u(a, b)
        return out

    def pointwise(self, ell: float) -> float:
        return sum(p.pointwise(ell) for p in self.parts)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.parts)

    def to_json(self) -> dict:
        return {"type": "sum", "parts": [p.to_json() for p in self.parts]}


def moment_spec_from_json(data: dict) -> MomentSpec:
    kind = data.get("type")
    if kind == "indicator":
        return Indicator(Fraction(data["H"]))
    if kind == "exponential":
        return Exponential(Fraction(data["rate"]))
    if kind == "formal":
        return FormalMoments(data.get("prefix", "u"))
    if kind == "sum":
        return MomentSum(tuple(moment_spec_from_json(p) for p in data["parts"]))
    raise ValueError(f"unknown moment spec {data!r}")


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class KernelFamily:
    kind: str  # "mirzakhani", "kontsevich", "beta" or "twisted"
    beta: Fraction = Fraction(1)
    base: Optional["KernelFamily"] = None
    f: Optional[MomentSpec] = None
    polynomial_type: bool = True

    @property
    def id(self) -> str:
        if self.kind == "beta":
            return f"beta({self.beta})"
        if self.kind == "twisted":
            return f"twisted({self.base.id},{_spec_id(self.f)})"
        return self.kind

    def root(self) -> "KernelFamily":
        fam = self
        while fam.kind == "twisted":
            fam = fam.base
        return fam

    def A(self, L1: float, L2: float, L3: float) -> float:
        return eval_A(self, L1, L2, L3)

    def B(self, L1: float, L2: float, ell: float) -> float:
        return eval_B(self, L1, L2, ell)

    def C(self, L1: float, ell: float, ellp: float) -> float:
        return eval_C(self, L1, ell, ellp)

    @property
    def VD(self) -> EvenPoly:
        return vd_poly(self)

    def A_poly(self) -> EvenPoly:
        return EvenPoly.constant(3, ONE)

    def to_json(self) -> dict:
        if self.kind == "beta":
            return {"family": "beta", "beta": str(self.beta)}
        if self.kind == "twisted":
            return {"family": "twisted", "base": self.base.to_json(), "f": self.f.to_json()}
        return {"family": self.kind}


def _spec_id(f: MomentSpec) -> str:
    import json

    return json.dumps(f.to_json(), sort_keys=True, separators=(",", ":"))


def Mirzakhani() -> KernelFamily:
    return KernelFamily("mirzakhani")


def Kontsevich() -> KernelFamily:
    return KernelFamily("kontsevich")


def BetaScaled(beta) -> KernelFamily:
    beta = Fraction(beta)
    if beta <= 0:
        raise ValueError("beta must be positive")
    return KernelFamily("beta", beta=beta)


def Twisted(base: KernelFamily, f: MomentSpec) -> KernelFamily:
    return KernelFamily("twisted", base=base, f=f)


def twist(fam: KernelFamily, f: Optional[MomentSpec]) -> KernelFamily:
    """Twisted initial data A[f], B[f], C[f], VD[f]."""
    if f is None or f.is_zero():
        return fam
    for k in range(3):
        try:
            f.u(0, k)
        except (ZeroDivisionError, OverflowError) as exc:
            raise ValueError(f"divergent moment m_{2 * k + 1}") from exc
    return Twisted(fam, f)


def family_from_json(data: dict) -> KernelFamily:
    kind = data.get("family")
    if kind in ("mirzakhani", "kontsevich"):
        return KernelFamily(kind)
    if kind == "beta":
        return BetaScaled(Fraction(data["beta"]))
    if kind == "twisted":
        return twist(family_from_json(data["base"]), moment_spec_from_json(data["f"]))
    raise ValueError(f"unknown kernel family {data!r}")


# ---------------------------------------------------------------------------
# pointwise evaluation


def _phi(fam: KernelFamily) -> Callable[[float], float]:
    if fam.kind == "mirzakhani":
        return eval_F
    if fam.kind == "kontsevich":
        return _pos
    if fam.kind == "beta":
        b = float(fam.beta)
        return lambda x: eval_F(b * x) / b
    raise ValueError(f"no profile function for {fam.id}")


def eval_A(fam: KernelFamily, L1: float, L2: float, L3: float) -> float:
    return 1.0


def eval_B(fam: KernelFamily, L1: float, L2: float, ell: float) -> float:
    if L1 <= 0:
        raise ValueError("L1 must be positive")
    if fam.kind == "twisted":
        return eval_B(fam.base, L1, L2, ell) + eval_A(fam.base, L1, L2, ell) * fam.f.pointwise(ell)
    phi = _phi(fam)
    return (phi(L1 - L2 - ell) + phi(L1 + L2 - ell) - phi(-L1 + L2 - ell) - phi(-L1 - L2 - ell)) / (2 * L1)


def eval_C(fam: KernelFamily, L1: float, ell: float, ellp: float) -> float:
    if L1 <= 0:
        raise ValueError("L1 must be positive")
    if fam.kind == "twisted":
        b, f = fam.base, fam.f
        fl, flp = f.pointwise(ell), f.pointwise(ellp)
        return (
            eval_C(b, L1, ell, ellp)
            + eval_B(b, L1, ell, ellp) * fl
            + eval_B(b, L1, ellp, ell) * flp
            + eval_A(b, L1, ell, ellp) * fl * flp
        )
    phi = _phi(fam)
    return (phi(L1 - ell - ellp) - phi(-L1 - ell - ellp)) / L1


def eval_B_logratio(L1: float, L2: float, ell: float) -> float:
    """Mirzakhani B through the cosh log-ratio form."""
    num = math.cosh(L2 / 2) + math.cosh((L1 + ell) / 2)
    den = math.cosh(L2 / 2) + math.cosh((L1 - ell) / 2)
    return 1.0 - math.log(num / den) / L1


def eval_C_logratio(L1: float, ell: float, ellp: float) -> float:
    """Mirzakhani C through the exponential log-ratio form."""
    s = (ell + ellp) / 2
    # divide through by e^{max} to keep both sides finite
    m = max(L1 / 2, s)
    num = math.exp(L1 / 2 - m) + math.exp(s - m)
    den = math.exp(-L1 / 2 - m) + math.exp(s - m)
    return 2.0 / L1 * math.log(num / den)


# ---------------------------------------------------------------------------
# exact moment transforms


def _profile_moments(fam: KernelFamily, m: int):
    """(a_m, {r: mu_r}) for the odd polynomial I_m."""
    if fam.kind == "kontsevich":
        return ZERO, {0: ONE}
    beta = fam.beta if fam.kind == "beta" else Fraction(1)
    a = _eta_even((m + 1) // 2).scale(Fraction(2) ** (m + 2) * factorial(m) / beta ** (m + 1))
    mus = {0: ONE}
    for r in range(2, m, 2):
        mus[r] = _eta_even(r // 2).scale(Fraction(2) ** (r + 1) * factorial(r) / beta ** r)
    return a, mus


@lru_cache(maxsize=None)
def odd_profile_poly(fam: KernelFamily, m: int) -> Dict[int, CoeffElem]:
    """Coefficients {p: c_p} of I_m(t) = sum c_p t^p (m odd, p odd)."""
    if m % 2 == 0 or m < 1:
        raise ValueError("I_m is only needed for odd m >= 1")
    a, mus = _profile_moments(fam, m)
    out: Dict[int, CoeffElem] = {}
    if a:
        out[1] = a
    for r, mu in mus.items():
        p = m - r + 2
        c = mu.scale(Fraction(comb(m, r), (m - r + 1) * (m - r + 2)))
        out[p] = out.get(p, ZERO) + c
    return {p: c for p, c in out.items() if c}


def _require_poly(fam: KernelFamily) -> None:
    if not fam.polynomial_type:
        raise NotPolynomialType(f"{fam.id} is not of polynomial type")


@lru_cache(maxsize=None)
def moment_B(fam: KernelFamily, k: int) -> EvenPoly:
    """int_0^oo B(L1, L2, l) l^(2k+1) dl as an even polynomial in (L1, L2)."""
    _require_poly(fam)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if fam.kind == "twisted":
        return _twisted_moment_B(fam, k)
    # (I(L1+L2) + I(L1-L2)) / (2 L1), odd powers of L2 cancel
    terms: Dict[Tuple[int, int], CoeffElem] = {}
    for p, c in odd_profile_poly(fam, 2 * k + 1).items():
        for j in range(0, p + 1, 2):
            key = ((p - j - 1) // 2, j // 2)
            terms[key] = terms.get(key, ZERO) + c.scale(comb(p, j))
    return EvenPoly(2, terms)


@lru_cache(maxsize=None)
def moment_C(fam: KernelFamily, j: int, k: int) -> EvenPoly:
    """int int C(L1, l, l') l^(2j+1) l'^(2k+1) dl dl' as an even polynomial in L1."""
    _require_poly(fam)
    if j < 0 or k < 0:
        raise ValueError("indices must be nonnegative")
    if fam.kind == "twisted":
        return _twisted_moment_C(fam, j, k)
    # the segment l + l' = s carries s^(2j+2k+3) times a beta integral
    w = Fraction(factorial(2 * j + 1) * factorial(2 * k + 1), factorial(2 * j + 2 * k + 3))
    terms = {}
    for p, c in odd_profile_poly(fam, 2 * j + 2 * k + 3).items():
        terms[((p - 1) // 2,)] = c.scale(w)
    return EvenPoly(1, terms)


def _A_coeffs(fam: KernelFamily):
    # A(L1, L2, L3) = sum A^i_{j,k} L1^2i L2^2j L3^2k
    return fam.A_poly().items()


def _twisted_moment_B(fam: KernelFamily, k: int) -> EvenPoly:
    base, f = fam.base, fam.f
    terms: Dict[Tuple[int, int], CoeffElem] = {}
    for (i, jj, a), c in _A_coeffs(base):
        terms[(i, jj)] = terms.get((i, jj), ZERO) + c * f.u(a, k)
    return moment_B(base, k) + EvenPoly(2, terms)


def _twisted_moment_C(fam: KernelFamily, j: int, k: int) -> EvenPoly:
    base, f = fam.base, fam.f
    terms: Dict[Tuple[int], CoeffElem] = {}

    def put(i, c):
        terms[(i,)] = terms.get((i,), ZERO) + c

    for (i, a), c in moment_B(base, k).items():
        put(i, c * f.u(a, j))
    for (i, a), c in moment_B(base, j).items():
        put(i, c * f.u(a, k))
    for (i, a, b), c in _A_coeffs(base):
        put(i, c * f.u(a, j) * f.u(b, k))
    return moment_C(base, j, k) + EvenPoly(1, terms)


@lru_cache(maxsize=None)
def vd_poly(fam: KernelFamily) -> EvenPoly:
    """Integrated one-holed torus amplitude VD(L1)."""
    if fam.kind == "twisted":
        base, f = fam.base, fam.f
        terms = {}
        for (i, a, b), c in _A_coeffs(base):
            terms[(i,)] = terms.get((i,), ZERO) + c * f.u(a, b).scale(Fraction(1, 2))
        return vd_poly(base) + EvenPoly(1, terms)
    # (1/2) int l C(L, l, l) dl = I_1(L) / (8 L)
    return EvenPoly(1, {((p - 1) // 2,): c.scale(Fraction(1, 8)) for p, c in odd_profile_poly(fam, 1).items()})


# ---------------------------------------------------------------------------
# quadrature oracle


def quadrature_oracle(
    fam: KernelFamily,
    which: str,
    powers: Sequence[int],
    point: Sequence[float],
    epsabs: float = 1e-11,
    epsrel: float = 1e-12,
) -> float:
    """Adaptive numerical value of a moment transform (test oracle).

    ``which="B"``: powers (k,), point (L1, L2).
    ``which="C"``: powers (j, k), point (L1,).
    ``which="VD"``: powers (), point (L1,).
    """
    from scipy import integrate

    opts = dict(epsabs=epsabs, epsrel=epsrel, limit=400)

    def check(res):
        val, err = res[0], res[1]
        if not math.isfinite(val) or err > max(1e3 * epsabs, 1e-7 * abs(val)):
            raise ArithmeticError(f"quadrature did not converge (value {val}, error {err})")
        return val

    if which == "B":
        (k,) = powers
        L1, L2 = map(float, point)
        f = lambda l: eval_B(fam, L1, L2, l) * l ** (2 * k + 1)
        kinks = sorted({abs(L1 - L2), L1 + L2})
        edges = [0.0] + [x for x in kinks if x > 0] + [L1 + L2 + _tail(fam)]
        total = 0.0
        for lo, hi in zip(edges, edges[1:]):
            total += check(integrate.quad(f, lo, hi, **opts))
        return total
    if which == "C":
        j, k = powers
        (L1,) = map(float, point)
        top = L1 + _tail(fam)

        def inner(l):
            g = lambda lp: eval_C(fam, L1, l, lp) * lp ** (2 * k + 1)
            cut = L1 - l
            if 0 < cut < top:
                return check(integrate.quad(g, 0, cut, **opts)) + check(integrate.quad(g, cut, top, **opts))
            return check(integrate.quad(g, 0, top, **opts))

        outer = lambda l: inner(l) * l ** (2 * j + 1)
        return check(integrate.quad(outer, 0, L1, **opts)) + check(integrate.quad(outer, L1, top, **opts))
    if which == "VD":
        (L1,) = map(float, point)
        f = lambda l: 0.5 * l * eval_C(fam, L1, l, l)
        return check(integrate.quad(f, 0, L1 / 2, **opts)) + check(integrate.quad(f, L1 / 2, L1 + _tail(fam), **opts))
    raise ValueError(f"unknown transform {which!r}")


def _tail(fam: KernelFamily) -> float:
    # past L1+L2+tail the Mirzakhani profile difference is below e^{-tail/2}
    root = fam.root()
    if root.kind == "kontsevich" and fam.kind != "twisted":
        return 0.0
    b = float(root.beta) if root.kind == "beta" else 1.0
    return 160.0 / min(b, 1.0)
